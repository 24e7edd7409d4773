//! Polarizations, the beta function and the stability predicates.
//!
//! All comparisons are exact: beta values are handled internally as the
//! integers `r * chi(I_Y) - e_Y` and only turned into rationals for reports.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::curve::{DualGraph, Subcurve};
use crate::error::{Error, Result};
use crate::lp::{self, LpOutcome};
use crate::sheaf::CombSheaf;
use crate::Rational;

/// Per-component weights `e_v` over a positive rank `r`; slopes are `e_v / r`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Polarization {
    rank: i64,
    weights: Vec<i64>,
}

impl Polarization {
    pub fn new(rank: i64, weights: Vec<i64>) -> Result<Self> {
        if rank <= 0 {
            return Err(Error::InvalidPolarization(format!("rank must be positive, got {rank}")));
        }
        let total: i64 = weights.iter().sum();
        if total % rank != 0 {
            return Err(Error::InvalidPolarization(format!(
                "total weight {total} is not divisible by the rank {rank}"
            )));
        }
        Ok(Polarization { rank, weights })
    }

    /// Rank-one polarization with integral slopes.
    pub fn integral(weights: Vec<i64>) -> Self {
        Polarization { rank: 1, weights }
    }

    /// Smallest-rank polarization realizing the given slopes; their sum must be integral.
    pub fn from_slopes(slopes: &[Rational]) -> Result<Self> {
        let rank = slopes.iter().fold(1i64, |acc, q| acc.lcm(q.denom()));
        let weights: Vec<i64> = slopes.iter().map(|q| q.numer() * (rank / q.denom())).collect();
        Polarization::new(rank, weights)
    }

    pub fn rank(&self) -> i64 {
        self.rank
    }

    pub fn weights(&self) -> &[i64] {
        &self.weights
    }

    /// `e_Y`.
    pub fn weight_of(&self, y: Subcurve) -> i64 {
        y.vertices().map(|v| self.weights[v]).sum()
    }

    pub fn slope(&self, v: usize) -> Rational {
        Rational::new(self.weights[v], self.rank)
    }

    pub fn slopes(&self) -> Vec<Rational> {
        (0..self.weights.len()).map(|v| self.slope(v)).collect()
    }

    /// Euler characteristic a sheaf on the whole curve must have.
    pub fn target(&self) -> i64 {
        self.weights.iter().sum::<i64>() / self.rank
    }

    /// `e_Y / r`.
    pub fn target_on(&self, y: Subcurve) -> Rational {
        Rational::new(self.weight_of(y), self.rank)
    }

    fn check_graph(&self, g: &DualGraph) -> Result<()> {
        if self.weights.len() != g.num_vertices() {
            return Err(Error::InvalidPolarization(format!(
                "{} weights given for {} components",
                self.weights.len(),
                g.num_vertices()
            )));
        }
        Ok(())
    }
}

/// A subcurve together with its beta value.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Witness {
    pub subcurve: Subcurve,
    pub beta: Rational,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Predicate {
    Semistable,
    Stable,
    Quasistable,
    /// Quasistability with respect to the given component.
    WQuasistable(usize),
    /// Quasistability with respect to the component carrying a marked point.
    SigmaQuasistable(usize),
    SimpleSemistable,
}

impl Predicate {
    pub fn name(&self) -> &'static str {
        match self {
            Predicate::Semistable => "semistable",
            Predicate::Stable => "stable",
            Predicate::Quasistable => "quasistable",
            Predicate::WQuasistable(_) => "w-quasistable",
            Predicate::SigmaQuasistable(_) => "sigma-quasistable",
            Predicate::SimpleSemistable => "simple-semistable",
        }
    }

    /// Name with the component spelled out, e.g. `w-quasistable(u)`.
    pub fn label(&self, g: &DualGraph) -> String {
        match self {
            Predicate::WQuasistable(w) | Predicate::SigmaQuasistable(w) => {
                format!("{}({})", self.name(), g.vertex(*w).id)
            }
            _ => self.name().to_string(),
        }
    }
}

impl fmt::Display for Predicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StabilityReport {
    pub predicate: Predicate,
    pub holds: bool,
    /// Lexicographically smallest subcurve of minimal beta in the family the predicate inspects.
    pub witness: Option<Witness>,
    /// Subcurves breaking the predicate, in lexicographic order.
    pub violations: Vec<Witness>,
    /// Subcurves with beta zero, in lexicographic order.
    pub tight: Vec<Witness>,
    /// Components for which the sheaf is quasistable (filled for the quasistability predicates).
    pub qualifying: Vec<usize>,
}

/// Scaled beta values `r * beta(Y)` over every non-empty proper subcurve of the support.
#[derive(Debug, Clone)]
pub struct BetaTable {
    ambient: Subcurve,
    rank: i64,
    entries: Vec<(Subcurve, i64)>,
}

impl BetaTable {
    pub fn new(g: &DualGraph, i: &CombSheaf, pol: &Polarization) -> Result<Self> {
        check_target(g, i, pol)?;
        let ambient = i.ambient();
        let entries = ambient
            .proper_subsets()
            .map(|y| (y, scaled_beta(g, i, pol, y)))
            .collect();
        Ok(BetaTable { ambient, rank: pol.rank, entries })
    }

    pub fn ambient(&self) -> Subcurve {
        self.ambient
    }

    pub fn entries(&self) -> impl Iterator<Item = (Subcurve, Rational)> + '_ {
        self.entries.iter().map(move |&(y, b)| (y, Rational::new(b, self.rank)))
    }

    pub fn beta(&self, y: Subcurve) -> Option<Rational> {
        if y.is_empty() || y == self.ambient {
            return y.is_subset_of(self.ambient).then(|| Rational::from_integer(0));
        }
        self.entries.iter().find(|(z, _)| *z == y).map(|&(_, b)| Rational::new(b, self.rank))
    }

    pub fn is_semistable(&self) -> bool {
        self.entries.iter().all(|&(_, b)| b >= 0)
    }

    pub fn is_stable(&self) -> bool {
        self.entries.iter().all(|&(_, b)| b > 0)
    }

    pub fn is_w_quasistable(&self, w: usize) -> bool {
        self.is_semistable() && self.entries.iter().all(|&(y, b)| !y.contains(w) || b > 0)
    }

    /// Components `w` of the support with the sheaf `w`-quasistable.
    pub fn quasistable_components(&self) -> Vec<usize> {
        if !self.is_semistable() {
            return Vec::new();
        }
        let mut blocked = Subcurve::EMPTY;
        for &(y, b) in &self.entries {
            if b == 0 {
                blocked = blocked.union(y);
            }
        }
        self.ambient.difference(blocked).vertices().collect()
    }

    fn witness(&self, y: Subcurve, b: i64) -> Witness {
        Witness { subcurve: y, beta: Rational::new(b, self.rank) }
    }

    fn sorted(&self, mut keep: impl FnMut(Subcurve, i64) -> bool) -> Vec<Witness> {
        let mut out: Vec<Witness> = self
            .entries
            .iter()
            .filter(|&&(y, b)| keep(y, b))
            .map(|&(y, b)| self.witness(y, b))
            .collect();
        out.sort_by(|a, b| a.subcurve.lex_cmp(b.subcurve));
        out
    }

    fn min_witness(&self, mut family: impl FnMut(Subcurve) -> bool) -> Option<Witness> {
        self.entries
            .iter()
            .filter(|(y, _)| family(*y))
            .min_by(|a, b| a.1.cmp(&b.1).then_with(|| a.0.lex_cmp(b.0)))
            .map(|&(y, b)| self.witness(y, b))
    }
}

fn check_target(g: &DualGraph, i: &CombSheaf, pol: &Polarization) -> Result<()> {
    pol.check_graph(g)?;
    let chi = i.euler_char(g);
    let ambient = i.ambient();
    if chi.checked_mul(pol.rank).ok_or(Error::Overflow)? != pol.weight_of(ambient) {
        return Err(Error::ChiMismatch { chi, target: pol.target_on(ambient).to_string() });
    }
    Ok(())
}

pub(crate) fn scaled_beta(g: &DualGraph, i: &CombSheaf, pol: &Polarization, y: Subcurve) -> i64 {
    pol.rank * i.restricted_euler_unchecked(g, y) - pol.weight_of(y)
}

/// `beta_I(Y) = chi(I_Y) - e_Y / r`.
pub fn beta(g: &DualGraph, i: &CombSheaf, pol: &Polarization, y: Subcurve) -> Result<Rational> {
    check_target(g, i, pol)?;
    i.restricted_euler(g, y)?;
    Ok(Rational::new(scaled_beta(g, i, pol, y), pol.rank))
}

fn semistable_report(table: &BetaTable, predicate: Predicate) -> StabilityReport {
    StabilityReport {
        predicate,
        holds: table.is_semistable(),
        witness: table.min_witness(|_| true),
        violations: table.sorted(|_, b| b < 0),
        tight: table.sorted(|_, b| b == 0),
        qualifying: Vec::new(),
    }
}

pub fn is_semistable(g: &DualGraph, i: &CombSheaf, pol: &Polarization) -> Result<StabilityReport> {
    let table = BetaTable::new(g, i, pol)?;
    Ok(semistable_report(&table, Predicate::Semistable))
}

pub fn is_stable(g: &DualGraph, i: &CombSheaf, pol: &Polarization) -> Result<StabilityReport> {
    let table = BetaTable::new(g, i, pol)?;
    Ok(StabilityReport {
        predicate: Predicate::Stable,
        holds: table.is_stable(),
        witness: table.min_witness(|_| true),
        violations: table.sorted(|_, b| b <= 0),
        tight: table.sorted(|_, b| b == 0),
        qualifying: Vec::new(),
    })
}

fn w_report(table: &BetaTable, w: usize, predicate: Predicate) -> StabilityReport {
    if !table.is_semistable() {
        let mut report = semistable_report(table, predicate);
        report.holds = false;
        return report;
    }
    let holds = table.is_w_quasistable(w);
    StabilityReport {
        predicate,
        holds,
        witness: table.min_witness(|y| y.contains(w)),
        violations: table.sorted(|y, b| y.contains(w) && b <= 0),
        tight: table.sorted(|_, b| b == 0),
        qualifying: if holds { vec![w] } else { Vec::new() },
    }
}

fn check_component(g: &DualGraph, i: &CombSheaf, w: usize) -> Result<()> {
    if w >= g.num_vertices() {
        return Err(Error::UnknownVertex(format!("#{w}")));
    }
    if !i.ambient().contains(w) {
        return Err(Error::NotContained(g.describe(Subcurve::singleton(w)), g.describe(i.ambient())));
    }
    Ok(())
}

/// Semistable, with `beta > 0` on every proper subcurve containing `w`.
pub fn is_w_quasistable(g: &DualGraph, i: &CombSheaf, pol: &Polarization, w: usize) -> Result<StabilityReport> {
    check_component(g, i, w)?;
    let table = BetaTable::new(g, i, pol)?;
    Ok(w_report(&table, w, Predicate::WQuasistable(w)))
}

pub fn is_quasistable(g: &DualGraph, i: &CombSheaf, pol: &Polarization) -> Result<StabilityReport> {
    let table = BetaTable::new(g, i, pol)?;
    let mut report = semistable_report(&table, Predicate::Quasistable);
    if report.holds {
        report.qualifying = table.quasistable_components();
        report.holds = !report.qualifying.is_empty();
        report.violations = if report.holds { Vec::new() } else { report.tight.clone() };
    }
    Ok(report)
}

/// Quasistability with respect to the component carrying the marked point `mark`.
pub fn is_p_quasistable(g: &DualGraph, i: &CombSheaf, pol: &Polarization, mark: &str) -> Result<StabilityReport> {
    let w = g.marked_vertex(mark)?;
    check_component(g, i, w)?;
    let table = BetaTable::new(g, i, pol)?;
    Ok(w_report(&table, w, Predicate::SigmaQuasistable(w)))
}

pub fn evaluate(g: &DualGraph, i: &CombSheaf, pol: &Polarization, predicate: Predicate) -> Result<StabilityReport> {
    match predicate {
        Predicate::Semistable => is_semistable(g, i, pol),
        Predicate::Stable => is_stable(g, i, pol),
        Predicate::Quasistable => is_quasistable(g, i, pol),
        Predicate::WQuasistable(w) => is_w_quasistable(g, i, pol, w),
        Predicate::SigmaQuasistable(w) => {
            check_component(g, i, w)?;
            let table = BetaTable::new(g, i, pol)?;
            Ok(w_report(&table, w, predicate))
        }
        Predicate::SimpleSemistable => {
            let mut report = is_semistable(g, i, pol)?;
            report.predicate = predicate;
            report.holds = report.holds && i.is_simple(g);
            Ok(report)
        }
    }
}

/// Verdict only, from a single pass over the beta table.
pub fn holds(g: &DualGraph, i: &CombSheaf, pol: &Polarization, predicate: Predicate) -> Result<bool> {
    let table = BetaTable::new(g, i, pol)?;
    Ok(verdict(g, i, &table, predicate))
}

pub(crate) fn verdict(g: &DualGraph, i: &CombSheaf, table: &BetaTable, predicate: Predicate) -> bool {
    match predicate {
        Predicate::Semistable => table.is_semistable(),
        Predicate::Stable => table.is_stable(),
        Predicate::Quasistable => !table.quasistable_components().is_empty(),
        Predicate::WQuasistable(w) | Predicate::SigmaQuasistable(w) => {
            i.ambient().contains(w) && table.is_w_quasistable(w)
        }
        Predicate::SimpleSemistable => table.is_semistable() && i.is_simple(g),
    }
}

/// Cuts with both sides connected through free nodes. On a non-simple sheaf
/// this family is empty and every proper subcurve is returned instead.
fn connected_cuts<'a>(g: &'a DualGraph, i: &CombSheaf) -> impl Iterator<Item = Subcurve> + 'a {
    let ambient = i.ambient();
    let free = g.internal_edges_unchecked(ambient).difference(i.nonfree());
    let simple = g.is_connected_via(ambient, free);
    ambient.proper_subsets().filter(move |&y| {
        !simple || (g.is_connected_via(y, free) && g.is_connected_via(ambient.difference(y), free))
    })
}

/// Semistability decided on subcurves `Y` with both `Y` and its complement
/// connected through free nodes (all subcurves for a non-simple sheaf);
/// agrees with the full scan.
pub fn semistable_by_connected_cuts(g: &DualGraph, i: &CombSheaf, pol: &Polarization) -> Result<bool> {
    check_target(g, i, pol)?;
    Ok(connected_cuts(g, i).all(|y| scaled_beta(g, i, pol, y) >= 0))
}

/// Stability decided on free-connected cuts only.
pub fn stable_by_connected_cuts(g: &DualGraph, i: &CombSheaf, pol: &Polarization) -> Result<bool> {
    check_target(g, i, pol)?;
    Ok(connected_cuts(g, i).all(|y| scaled_beta(g, i, pol, y) > 0))
}

/// Polarization with slopes `a_v * chi` turning Seshadri `a`-(semi)stability into ours.
pub fn seshadri_convert(a: &[Rational], chi: i64) -> Result<Polarization> {
    if a.is_empty() {
        return Err(Error::InvalidWeights("no weights given".into()));
    }
    if let Some(bad) = a.iter().find(|x| !x.is_positive()) {
        return Err(Error::InvalidWeights(format!("weight {bad} is not positive")));
    }
    let total: Rational = a.iter().sum();
    if total != Rational::from_integer(1) {
        return Err(Error::InvalidWeights(format!("weights sum to {total}, not 1")));
    }
    let slopes: Vec<Rational> = a.iter().map(|x| x * chi).collect();
    Polarization::from_slopes(&slopes)
}

/// A polarization making the simple sheaf `i` quasistable with respect to `w`.
///
/// Solves the exact linear program maximizing a margin `t <= 1` subject to
/// `q_Y <= chi(I_Y)` for every proper `Y`, `q_Y + t <= chi(I_Y)` when `w` is
/// in `Y`, and `q` summing to `chi(I)`. A positive optimum is a valid answer.
pub fn find_polarization(g: &DualGraph, i: &CombSheaf, w: usize) -> Result<Polarization> {
    check_component(g, i, w)?;
    if !i.is_simple(g) {
        return Err(Error::NotSimple);
    }
    let ambient = i.ambient();
    let members: Vec<usize> = ambient.vertices().collect();
    let chi_single: Vec<i64> = members.iter().map(|&v| i.restricted_euler_unchecked(g, Subcurve::singleton(v))).collect();
    let mut slopes = vec![Rational::from_integer(0); g.num_vertices()];
    if members.len() == 1 {
        slopes[members[0]] = Rational::from_integer(i.euler_char(g));
    } else {
        // variables: s_v = chi(I_v) - q_v >= 0 for each member, then the margin t
        let k = members.len();
        let slack_of = |y: Subcurve| -> i64 {
            let singles: i64 = members.iter().zip(&chi_single).filter(|(v, _)| y.contains(**v)).map(|(_, c)| c).sum();
            singles - i.restricted_euler_unchecked(g, y)
        };
        let mut a = Vec::new();
        let mut b = Vec::new();
        for y in ambient.proper_subsets() {
            let mut row: Vec<BigRational> = members.iter().map(|&v| lp::int(if y.contains(v) { -1 } else { 0 })).collect();
            row.push(lp::int(if y.contains(w) { 1 } else { 0 }));
            a.push(row);
            b.push(lp::int(-slack_of(y)));
        }
        let total = slack_of(ambient);
        let mut up: Vec<BigRational> = vec![lp::int(1); k];
        up.push(lp::int(0));
        let down: Vec<BigRational> = up.iter().map(|x| -x).collect();
        a.push(up);
        b.push(lp::int(total));
        a.push(down);
        b.push(lp::int(-total));
        let mut cap = vec![lp::int(0); k];
        cap.push(lp::int(1));
        a.push(cap);
        b.push(lp::int(1));
        let mut c = vec![lp::int(0); k];
        c.push(lp::int(1));
        let (x, value) = match lp::maximize(&a, &b, &c) {
            LpOutcome::Optimal { x, value } => (x, value),
            LpOutcome::Infeasible => return Err(Error::Infeasible("semistability constraints are infeasible".into())),
            LpOutcome::Unbounded => return Err(Error::InvariantBreach("margin program is unbounded".into())),
        };
        if !value.is_positive() {
            return Err(Error::Infeasible(format!("no positive margin for component `{}`", g.vertex(w).id)));
        }
        for (idx, &v) in members.iter().enumerate() {
            let q = BigRational::from_integer(BigInt::from(chi_single[idx])) - &x[idx];
            slopes[v] = to_small(&q)?;
        }
    }
    let pol = Polarization::from_slopes(&slopes)?;
    let table = BetaTable::new(g, i, &pol)?;
    if !table.is_w_quasistable(w) {
        return Err(Error::InvariantBreach("polarization search returned a non-quasistable answer".into()));
    }
    Ok(pol)
}

fn to_small(q: &BigRational) -> Result<Rational> {
    let n = q.numer().to_i64().ok_or(Error::Overflow)?;
    let d = q.denom().to_i64().ok_or(Error::Overflow)?;
    if d.is_zero() {
        return Err(Error::Overflow);
    }
    Ok(Rational::new(n, d))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::EdgeSet;

    fn s(vs: &[usize]) -> Subcurve {
        Subcurve::from_vertices(vs.iter().copied())
    }

    fn r(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    #[test]
    fn beta_examples() {
        let g = DualGraph::two_vertex(3);
        let i = CombSheaf::invertible(&g, vec![1, -1]).unwrap();
        // chi(I) = 0 + (2 - 3) = -1
        let pol = Polarization::integral(vec![0, -1]);
        assert_eq!(beta(&g, &i, &pol, g.full()).unwrap(), r(0, 1));
        assert_eq!(beta(&g, &i, &pol, s(&[0])).unwrap(), r(2, 1));
        let pol2 = Polarization::new(2, vec![1, -3]).unwrap();
        assert_eq!(beta(&g, &i, &pol2, s(&[0])).unwrap(), r(3, 2));
        let bad = Polarization::integral(vec![0, 0]);
        assert!(matches!(beta(&g, &i, &bad, s(&[0])), Err(Error::ChiMismatch { .. })));
    }

    #[test]
    fn irreducible_curves_are_stable() {
        let g = DualGraph::irreducible(2, 1);
        let i = CombSheaf::on_curve(&g, EdgeSet::from_edges([0]), vec![3]).unwrap();
        let chi = i.euler_char(&g);
        let pol = Polarization::integral(vec![chi]);
        assert!(is_semistable(&g, &i, &pol).unwrap().holds);
        assert!(is_stable(&g, &i, &pol).unwrap().holds);
        assert!(is_w_quasistable(&g, &i, &pol, 0).unwrap().holds);
        assert_eq!(is_quasistable(&g, &i, &pol).unwrap().qualifying, vec![0]);
    }

    #[test]
    fn semistable_and_stable_on_two_components() {
        let g = DualGraph::two_vertex(3);
        // chi(I) = 0 - 1 = -1 ... use d = (1,-1): chi = -1 with e = (0,-1)
        let pol = Polarization::integral(vec![1, -2]);
        let i = CombSheaf::invertible(&g, vec![1, -1]).unwrap();
        let ss = is_semistable(&g, &i, &pol).unwrap();
        // beta(u) = 2 - 1 = 1, beta(v) = 0 - (-2) = 2
        assert!(ss.holds);
        assert_eq!(ss.witness.unwrap().subcurve, s(&[0]));

        let pol = Polarization::integral(vec![2, -3]);
        let i = CombSheaf::invertible(&g, vec![3, -3]).unwrap();
        // chi = -1, beta(u) = 4 - 2 = 2, beta(v) = -2 + 3 = 1
        assert!(is_stable(&g, &i, &pol).unwrap().holds);
        let pol = Polarization::integral(vec![4, -5]);
        // beta(u) = 0, beta(v) = 3
        let st = is_stable(&g, &i, &pol).unwrap();
        assert!(!st.holds);
        assert_eq!(st.violations, vec![Witness { subcurve: s(&[0]), beta: r(0, 1) }]);
        assert!(is_semistable(&g, &i, &pol).unwrap().holds);
        assert!(is_w_quasistable(&g, &i, &pol, 1).unwrap().holds);
        assert!(!is_w_quasistable(&g, &i, &pol, 0).unwrap().holds);
        assert_eq!(is_quasistable(&g, &i, &pol).unwrap().qualifying, vec![1]);

        let pol = Polarization::integral(vec![6, -7]);
        let report = is_semistable(&g, &i, &pol).unwrap();
        assert!(!report.holds);
        assert_eq!(report.witness, Some(Witness { subcurve: s(&[0]), beta: r(-2, 1) }));
        assert!(!is_w_quasistable(&g, &i, &pol, 1).unwrap().holds);
    }

    #[test]
    fn p_quasistable_delegates_to_marked_component() {
        let g = DualGraph::two_vertex(3).with_marking("sigma", 1).unwrap();
        let i = CombSheaf::invertible(&g, vec![3, -3]).unwrap();
        let pol = Polarization::integral(vec![4, -5]);
        let report = is_p_quasistable(&g, &i, &pol, "sigma").unwrap();
        assert!(report.holds);
        assert_eq!(report.predicate, Predicate::SigmaQuasistable(1));
        assert!(matches!(is_p_quasistable(&g, &i, &pol, "tau"), Err(Error::UnknownMark(_))));
    }

    #[test]
    fn seshadri_examples() {
        let p = seshadri_convert(&[r(1, 2), r(1, 2)], 4).unwrap();
        assert_eq!((p.rank(), p.weights()), (1, &[2, 2][..]));
        let p = seshadri_convert(&[r(1, 3), r(2, 3)], 3).unwrap();
        assert_eq!((p.rank(), p.weights()), (1, &[1, 2][..]));
        let p = seshadri_convert(&[r(1, 2), r(1, 2)], 3).unwrap();
        assert_eq!((p.rank(), p.weights()), (2, &[3, 3][..]));
        assert!(seshadri_convert(&[r(1, 2), r(1, 3)], 3).is_err());
        assert!(seshadri_convert(&[r(3, 2), r(-1, 2)], 3).is_err());
    }

    #[test]
    fn find_polarization_examples() {
        let g = DualGraph::irreducible(1, 0);
        let i = CombSheaf::invertible(&g, vec![5]).unwrap();
        let p = find_polarization(&g, &i, 0).unwrap();
        assert_eq!(p.slopes(), vec![r(5, 1)]);

        let g = DualGraph::two_vertex(2);
        let i = CombSheaf::invertible(&g, vec![1, -1]).unwrap();
        let p = find_polarization(&g, &i, 0).unwrap();
        assert_eq!(p.target(), 0);
        assert!(is_w_quasistable(&g, &i, &p, 0).unwrap().holds);

        let non_simple = CombSheaf::on_curve(&g, EdgeSet::all(2), vec![0, 0]).unwrap();
        assert_eq!(find_polarization(&g, &non_simple, 0), Err(Error::NotSimple));
    }

    #[test]
    fn find_polarization_on_chain() {
        let p3 = DualGraph::path(3);
        let i = CombSheaf::invertible(&p3, vec![0, -1, 0]).unwrap();
        for w in 0..3 {
            let p = find_polarization(&p3, &i, w).unwrap();
            let report = is_w_quasistable(&p3, &i, &p, w).unwrap();
            assert!(report.holds);
            assert!(p.slope(w) < Rational::from_integer(i.restricted_euler(&p3, s(&[w])).unwrap()));
        }
    }
}
