//! Exhaustive enumeration of sheaf classes by stability predicate, plus the
//! matrix-tree oracle and the genus-one stratification report.

use std::collections::{BTreeMap, HashSet};

use rayon::prelude::*;

use crate::curve::{DualGraph, EdgeSet, Subcurve};
use crate::error::{Error, Result};
use crate::jordan_holder::{gr, JhClass};
use crate::sheaf::CombSheaf;
use crate::stability::{verdict, BetaTable, Polarization, Predicate};

pub const BUDGET_VAR: &str = "JACSTAB_MAX_SUBSETS";
const DEFAULT_BUDGET: u128 = 1 << 16;

/// Upper bound on the number of non-free node sets scanned by one enumeration.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budget {
    pub max_subsets: u128,
}

impl Budget {
    pub fn new(max_subsets: u128) -> Self {
        Budget { max_subsets }
    }

    /// Reads `JACSTAB_MAX_SUBSETS`, falling back to 65536.
    pub fn from_env() -> Result<Self> {
        match std::env::var(BUDGET_VAR) {
            Ok(v) => v
                .trim()
                .parse::<u128>()
                .map(Budget::new)
                .map_err(|_| Error::Parse(format!("{BUDGET_VAR} must be a non-negative integer, got `{v}`"))),
            Err(_) => Ok(Budget::default()),
        }
    }
}

impl Default for Budget {
    fn default() -> Self {
        Budget::new(DEFAULT_BUDGET)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct EnumerationOptions {
    /// Only scan `S = {}`.
    pub invertible_only: bool,
    pub budget: Budget,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EnumerationResult {
    pub predicate: Predicate,
    pub polarization: Polarization,
    pub chi: i64,
    /// Classes in canonical order: by `S`, then multidegree.
    pub classes: Vec<CombSheaf>,
    /// Number of listed classes by `|S|`.
    pub strata: BTreeMap<usize, usize>,
    /// Number of distinct associated graded classes among the listed ones.
    pub jh_classes: usize,
}

impl EnumerationResult {
    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    pub fn invertible(&self) -> usize {
        self.strata.get(&0).copied().unwrap_or(0)
    }
}

/// Per-component degree window `[lo, hi]` containing every semistable class with non-free set `s`.
pub fn degree_window(g: &DualGraph, pol: &Polarization, s: EdgeSet) -> Vec<(i64, i64)> {
    (0..g.num_vertices())
        .map(|v| {
            let q = pol.slope(v).ceil().to_integer();
            let loops = g.loops_at(v).difference(s).len() as i64;
            let lo = q - (1 - g.genus(v)) + loops;
            (lo, lo + g.link_degree(v) as i64)
        })
        .collect()
}

fn check_chi(g: &DualGraph, pol: &Polarization, chi: i64) -> Result<()> {
    if pol.weights().len() != g.num_vertices() {
        return Err(Error::InvalidPolarization(format!(
            "{} weights given for {} components",
            pol.weights().len(),
            g.num_vertices()
        )));
    }
    if pol.target() != chi || pol.weights().iter().sum::<i64>() != chi * pol.rank() {
        return Err(Error::ChiMismatch { chi, target: pol.target_on(g.full()).to_string() });
    }
    Ok(())
}

fn check_predicate(g: &DualGraph, predicate: Predicate) -> Result<()> {
    match predicate {
        Predicate::WQuasistable(w) | Predicate::SigmaQuasistable(w) if w >= g.num_vertices() => {
            Err(Error::UnknownVertex(format!("#{w}")))
        }
        _ => Ok(()),
    }
}

/// Classes with non-free set `s` satisfying `predicate`, in multidegree order.
pub fn enumerate_stratum(
    g: &DualGraph,
    pol: &Polarization,
    chi: i64,
    predicate: Predicate,
    s: EdgeSet,
) -> Result<Vec<CombSheaf>> {
    check_chi(g, pol, chi)?;
    check_predicate(g, predicate)?;
    if !s.is_subset_of(g.all_edges()) {
        return Err(Error::InvalidSheaf("non-free set mentions unknown nodes".into()));
    }
    scan_stratum(g, pol, chi, predicate, s)
}

fn scan_stratum(g: &DualGraph, pol: &Polarization, chi: i64, predicate: Predicate, s: EdgeSet) -> Result<Vec<CombSheaf>> {
    let n = g.num_vertices();
    let window = degree_window(g, pol, s);
    // chi = sum(d) + chi(O_X) + |S| fixes the last coordinate
    let fixed_sum = chi - g.euler_structure_unchecked(g.full()) - s.len() as i64;
    let mut out = Vec::new();
    let mut d: Vec<i64> = window.iter().map(|w| w.0).collect();
    loop {
        let partial: i64 = d[..n - 1].iter().sum();
        let last = fixed_sum - partial;
        let (lo, hi) = window[n - 1];
        if (lo..=hi).contains(&last) {
            d[n - 1] = last;
            let i = CombSheaf::on_curve(g, s, d.clone())?;
            let table = BetaTable::new(g, &i, pol)?;
            if verdict(g, &i, &table, predicate) {
                out.push(i);
            }
        }
        // odometer over the free coordinates, last one varying fastest
        let mut k = n - 1;
        loop {
            if k == 0 {
                return Ok(out);
            }
            k -= 1;
            if d[k] < window[k].1 {
                d[k] += 1;
                break;
            }
            d[k] = window[k].0;
        }
    }
}

pub fn enumerate(g: &DualGraph, pol: &Polarization, chi: i64, predicate: Predicate) -> Result<EnumerationResult> {
    enumerate_with(g, pol, chi, predicate, &EnumerationOptions { invertible_only: false, budget: Budget::from_env()? })
}

pub fn enumerate_with(
    g: &DualGraph,
    pol: &Polarization,
    chi: i64,
    predicate: Predicate,
    opts: &EnumerationOptions,
) -> Result<EnumerationResult> {
    check_chi(g, pol, chi)?;
    check_predicate(g, predicate)?;
    let subsets: Vec<EdgeSet> = if opts.invertible_only {
        vec![EdgeSet::EMPTY]
    } else {
        let needed = 1u128 << g.num_edges().min(127);
        if needed > opts.budget.max_subsets {
            return Err(Error::BudgetExceeded { needed, limit: opts.budget.max_subsets });
        }
        g.all_edges().subsets().collect()
    };
    let per_stratum: Vec<Vec<CombSheaf>> = subsets
        .par_iter()
        .map(|&s| scan_stratum(g, pol, chi, predicate, s))
        .collect::<Result<_>>()?;
    let mut classes: Vec<CombSheaf> = per_stratum.into_iter().flatten().collect();
    classes.sort_by(|a, b| a.canonical_cmp(b));
    let mut strata = BTreeMap::new();
    for c in &classes {
        *strata.entry(c.nonfree().len()).or_insert(0) += 1;
    }
    let graded: Vec<JhClass> = classes.par_iter().map(|c| gr(g, c, pol)).collect::<Result<_>>()?;
    let jh_classes = graded.into_iter().collect::<HashSet<_>>().len();
    Ok(EnumerationResult { predicate, polarization: pol.clone(), chi, classes, strata, jh_classes })
}

/// Distinct associated graded classes among all semistable classes.
pub fn count_jh_classes(g: &DualGraph, pol: &Polarization, chi: i64) -> Result<usize> {
    Ok(enumerate(g, pol, chi, Predicate::Semistable)?.jh_classes)
}

pub fn count_jh_classes_with(g: &DualGraph, pol: &Polarization, chi: i64, opts: &EnumerationOptions) -> Result<usize> {
    Ok(enumerate_with(g, pol, chi, Predicate::Semistable, opts)?.jh_classes)
}

/// Number of spanning trees: determinant of the reduced Laplacian (fraction-free elimination).
pub fn spanning_tree_count(g: &DualGraph) -> Result<u128> {
    let n = g.num_vertices() - 1;
    if n == 0 {
        return Ok(1);
    }
    let mut m = vec![vec![0i128; n]; n];
    for edge in g.edges() {
        if edge.is_loop() {
            continue;
        }
        let (a, b) = (edge.a, edge.b);
        if a < n {
            m[a][a] += 1;
        }
        if b < n {
            m[b][b] += 1;
        }
        if a < n && b < n {
            m[a][b] -= 1;
            m[b][a] -= 1;
        }
    }
    let mut sign = 1i128;
    let mut prev = 1i128;
    for k in 0..n {
        if m[k][k] == 0 {
            match (k + 1..n).find(|&r| m[r][k] != 0) {
                Some(r) => {
                    m.swap(k, r);
                    sign = -sign;
                }
                None => return Err(Error::InvariantBreach("reduced Laplacian is singular".into())),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let a = m[i][j].checked_mul(m[k][k]).ok_or(Error::Overflow)?;
                let b = m[i][k].checked_mul(m[k][j]).ok_or(Error::Overflow)?;
                m[i][j] = a.checked_sub(b).ok_or(Error::Overflow)? / prev;
            }
        }
        prev = m[k][k];
    }
    u128::try_from(sign * m[n - 1][n - 1]).map_err(|_| Error::InvariantBreach("negative tree count".into()))
}

/// Polarization `q_v = deg_v M - [v = mark]` turning `p`-quasistability into
/// the condition `chi(I_Y) >= deg_Y M` on proper subcurves.
pub fn abel_polarization(g: &DualGraph, mark: &str, m_degrees: &[i64]) -> Result<Polarization> {
    let p = g.marked_vertex(mark)?;
    if m_degrees.len() != g.num_vertices() {
        return Err(Error::InvalidPolarization(format!(
            "{} degrees given for {} components",
            m_degrees.len(),
            g.num_vertices()
        )));
    }
    let weights = m_degrees.iter().enumerate().map(|(v, &d)| d - i64::from(v == p)).collect();
    Polarization::new(1, weights)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Genus1Report {
    /// Sigma-quasistable invertible classes.
    pub invertible: usize,
    /// Sigma-quasistable classes with exactly one non-free node, listed per node.
    pub per_node: Vec<usize>,
    /// Sigma-quasistable classes with two or more non-free nodes.
    pub deeper: usize,
}

impl Genus1Report {
    pub fn singular(&self) -> usize {
        self.per_node.iter().sum()
    }

    /// `n` invertible classes, one class per node, nothing deeper.
    pub fn matches_curve(&self) -> bool {
        let n = self.per_node.len();
        self.invertible == n && self.per_node.iter().all(|&c| c == 1) && self.deeper == 0
    }
}

pub fn is_genus1_cycle(g: &DualGraph) -> bool {
    let n = g.num_vertices();
    n == g.num_edges()
        && (0..n).all(|v| g.genus(v) == 0 && g.link_degree(v) + 2 * g.loops_at(v).len() == 2)
}

pub fn genus1_stratification(g: &DualGraph, pol: &Polarization, mark: &str) -> Result<Genus1Report> {
    if !is_genus1_cycle(g) {
        return Err(Error::InvalidParts("graph is not a cycle of rational components".into()));
    }
    let p = g.marked_vertex(mark)?;
    let opts = EnumerationOptions { invertible_only: false, budget: Budget::new(u128::MAX) };
    let res = enumerate_with(g, pol, pol.target(), Predicate::SigmaQuasistable(p), &opts)?;
    let mut per_node = vec![0; g.num_edges()];
    let mut deeper = 0;
    for c in &res.classes {
        match c.nonfree().len() {
            0 => {}
            1 => per_node[c.nonfree().edges().next().expect("one node")] += 1,
            _ => deeper += 1,
        }
    }
    Ok(Genus1Report { invertible: res.invertible(), per_node, deeper })
}

/// Nodes joining `y` to its complement.
pub fn cut_edges(g: &DualGraph, y: Subcurve) -> EdgeSet {
    g.edges_between(y, g.full().difference(y))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::MinCut;
    use crate::stability::holds;

    fn opts_inv() -> EnumerationOptions {
        EnumerationOptions { invertible_only: true, budget: Budget::default() }
    }

    #[test]
    fn two_vertex_counts() {
        for delta in 1..=5usize {
            let g = DualGraph::two_vertex(delta);
            let chi = 2 - delta as i64;
            let pol = Polarization::integral(vec![1, chi - 1]);
            let count = |p| enumerate_with(&g, &pol, chi, p, &opts_inv()).unwrap().len();
            assert_eq!(count(Predicate::Semistable), delta + 1);
            assert_eq!(count(Predicate::Stable), delta - 1);
            assert_eq!(count(Predicate::WQuasistable(0)), delta);
            assert_eq!(count(Predicate::WQuasistable(1)), delta);
            assert_eq!(count(Predicate::Quasistable), delta + 1);

            let pol2 = Polarization::new(2, vec![1, 2 * chi - 1]).unwrap();
            let count2 = |p| enumerate_with(&g, &pol2, chi, p, &opts_inv()).unwrap().len();
            assert_eq!(count2(Predicate::Stable), delta);
            assert_eq!(count2(Predicate::Semistable), delta);
        }
    }

    #[test]
    fn window_is_complete() {
        let g = DualGraph::from_edges(3, &[(0, 1), (1, 2), (0, 2), (1, 1)]).unwrap();
        let pol = Polarization::new(2, vec![1, 0, 1]).unwrap();
        let chi = pol.target();
        for s in g.all_edges().subsets() {
            let found = enumerate_stratum(&g, &pol, chi, Predicate::Semistable, s).unwrap();
            let mut naive = Vec::new();
            let base = chi - g.euler_structure(g.full()).unwrap() - s.len() as i64;
            for a in -12..=12 {
                for b in -12..=12 {
                    let i = CombSheaf::on_curve(&g, s, vec![a, b, base - a - b]).unwrap();
                    if holds(&g, &i, &pol, Predicate::Semistable).unwrap() {
                        naive.push(i);
                    }
                }
            }
            assert_eq!(found, naive);
        }
    }

    #[test]
    fn tree_counts() {
        assert_eq!(spanning_tree_count(&DualGraph::two_vertex(4)).unwrap(), 4);
        assert_eq!(spanning_tree_count(&DualGraph::cycle(5)).unwrap(), 5);
        assert_eq!(spanning_tree_count(&DualGraph::path(4)).unwrap(), 1);
        assert_eq!(spanning_tree_count(&DualGraph::irreducible(1, 2)).unwrap(), 1);
        let k4 = DualGraph::from_edges(4, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]).unwrap();
        assert_eq!(spanning_tree_count(&k4).unwrap(), 16);
    }

    #[test]
    fn jh_class_counts() {
        let g = DualGraph::two_vertex(3);
        let pol = Polarization::integral(vec![1, -2]);
        assert_eq!(count_jh_classes(&g, &pol, -1).unwrap(), 6);

        let c3 = DualGraph::cycle(3);
        let pol = Polarization::new(3, vec![1, 1, 1]).unwrap();
        assert_eq!(count_jh_classes_with(&c3, &pol, 1, &opts_inv()).unwrap(), 3);
        assert_eq!(count_jh_classes(&c3, &pol, 1).unwrap(), 6);

        let x = DualGraph::irreducible(1, 1);
        let pol = Polarization::integral(vec![0]);
        let res = enumerate(&x, &pol, 0, Predicate::Semistable).unwrap();
        assert_eq!(res.jh_classes, res.len());
    }

    #[test]
    fn genus_one_cycles() {
        for n in 1..=3 {
            let g = DualGraph::cycle(n).with_marking("p", 0).unwrap();
            let mut m = vec![0; n];
            m[n - 1] = 1;
            let pol = abel_polarization(&g, "p", &m).unwrap();
            let report = genus1_stratification(&g, &pol, "p").unwrap();
            assert_eq!(report.invertible, n);
            assert_eq!(report.singular(), n);
            assert_eq!(report.deeper, 0);
            assert!(report.matches_curve());
        }
        assert!(genus1_stratification(&DualGraph::path(2).with_marking("p", 0).unwrap(), &Polarization::integral(vec![0, 1]), "p").is_err());
    }

    #[test]
    fn simplicity_threshold() {
        let g = DualGraph::two_vertex(3);
        let MinCut::Finite(k) = g.min_cut() else { panic!() };
        for s in g.all_edges().subsets() {
            let i = CombSheaf::on_curve(&g, s, vec![0, 0]).unwrap();
            if s.len() < k {
                assert!(i.is_simple(&g));
            }
        }
        let witness = CombSheaf::on_curve(&g, cut_edges(&g, Subcurve::singleton(0)), vec![0, 0]).unwrap();
        assert!(!witness.is_simple(&g));
    }

    #[test]
    fn budget_enforced() {
        let g = DualGraph::two_vertex(5);
        let pol = Polarization::integral(vec![0, -3]);
        let opts = EnumerationOptions { invertible_only: false, budget: Budget::new(8) };
        assert!(matches!(
            enumerate_with(&g, &pol, -3, Predicate::Semistable, &opts),
            Err(Error::BudgetExceeded { needed: 32, limit: 8 })
        ));
    }
}
