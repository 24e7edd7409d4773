//! Twisting by subcurves and the reductions to semistable and
//! sigma-quasistable representatives of a twist class.

use crate::curve::{DualGraph, Subcurve};
use crate::error::{Error, Result};
use crate::sheaf::CombSheaf;
use crate::stability::{is_semistable, scaled_beta, BetaTable, Polarization};
use crate::Rational;

/// Twist by `O(Z)` along the free nodes of the support.
///
/// A component of `Z` gains one degree per free node leading out of `Z`; a
/// component outside `Z` loses one per free node leading into it.
pub fn twist(g: &DualGraph, i: &CombSheaf, z: Subcurve) -> Result<CombSheaf> {
    let ambient = i.ambient();
    if !z.is_subset_of(ambient) {
        return Err(Error::NotContained(g.describe(z), g.describe(ambient)));
    }
    let outside = ambient.difference(z);
    let free = g.internal_edges_unchecked(ambient).difference(i.nonfree());
    let mut degrees = i.degrees().to_vec();
    for e in g.edges_between(z, outside).meet(free).edges() {
        let edge = g.edge(e);
        let (inner, outer) = if z.contains(edge.a) { (edge.a, edge.b) } else { (edge.b, edge.a) };
        degrees[inner] = degrees[inner].checked_add(1).ok_or(Error::Overflow)?;
        degrees[outer] = degrees[outer].checked_sub(1).ok_or(Error::Overflow)?;
    }
    CombSheaf::new(g, ambient, i.nonfree(), degrees)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TwistStep {
    pub fired: Subcurve,
    /// Minimum of beta before the step.
    pub beta_min: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TwistTrace {
    pub start: CombSheaf,
    pub steps: Vec<TwistStep>,
    pub result: CombSheaf,
}

impl TwistTrace {
    pub fn iterations(&self) -> usize {
        self.steps.len()
    }

    /// Re-applies the recorded twists to the starting sheaf.
    pub fn replay(&self, g: &DualGraph) -> Result<CombSheaf> {
        self.steps.iter().try_fold(self.start.clone(), |acc, st| twist(g, &acc, st.fired))
    }
}

/// Iteration cap for [`semistable_reduce`].
pub fn reduction_cap(g: &DualGraph, i: &CombSheaf, pol: &Polarization) -> usize {
    let spread = i
        .ambient()
        .proper_subsets()
        .fold(1usize, |acc, y| acc.saturating_add(scaled_beta(g, i, pol, y).unsigned_abs() as usize));
    spread.saturating_mul(g.num_vertices().max(10))
}

/// Twists a simple `i` until it is semistable.
///
/// Each step fires the union of all subcurves where beta attains its negative
/// minimum; the minimum never decreases and the fired set shrinks while it
/// stays put, so the loop terminates.
pub fn semistable_reduce(g: &DualGraph, i: &CombSheaf, pol: &Polarization) -> Result<TwistTrace> {
    if !i.is_simple(g) {
        return Err(Error::NotSimple);
    }
    let cap = reduction_cap(g, i, pol);
    let mut current = i.clone();
    let mut steps = Vec::new();
    loop {
        let table = BetaTable::new(g, &current, pol)?;
        let min = table.entries().map(|(_, b)| b).min();
        let Some(min) = min.filter(|m| *m < Rational::from_integer(0)) else {
            break;
        };
        let fired = table
            .entries()
            .filter(|(_, b)| *b == min)
            .fold(Subcurve::EMPTY, |acc, (y, _)| acc.union(y));
        if table.beta(fired) != Some(min) {
            return Err(Error::InvariantBreach("union of minimizers is not a minimizer".into()));
        }
        if steps.len() >= cap {
            return Err(Error::IterationCap(cap));
        }
        current = twist(g, &current, fired)?;
        steps.push(TwistStep { fired, beta_min: min });
    }
    Ok(TwistTrace { start: i.clone(), steps, result: current })
}

/// Twists a semistable `i` into the unique representative of its class that
/// is quasistable with respect to the component `w`.
///
/// Each step fires the smallest beta-zero subcurve containing `w`; it grows
/// strictly, so at most one step per component is needed.
pub fn sigma_reduce(g: &DualGraph, i: &CombSheaf, pol: &Polarization, w: usize) -> Result<TwistTrace> {
    let ambient = i.ambient();
    if w >= g.num_vertices() || !ambient.contains(w) {
        return Err(Error::NotContained(format!("#{w}"), g.describe(ambient)));
    }
    if !i.is_simple(g) {
        return Err(Error::NotSimple);
    }
    let report = is_semistable(g, i, pol)?;
    if !report.holds {
        let wit = report.witness.expect("a non-semistable sheaf has a witness");
        return Err(Error::NotSemistable { witness: g.describe(wit.subcurve), beta: wit.beta.to_string() });
    }
    let cap = ambient.len();
    let mut current = i.clone();
    let mut steps = Vec::new();
    loop {
        let table = BetaTable::new(g, &current, pol)?;
        if !table.is_semistable() {
            return Err(Error::InvariantBreach("twist left the semistable locus".into()));
        }
        let fired = table
            .entries()
            .filter(|(y, b)| y.contains(w) && *b == Rational::from_integer(0))
            .fold(ambient, |acc, (y, _)| acc.meet(y));
        if fired == ambient {
            break;
        }
        if table.beta(fired) != Some(Rational::from_integer(0)) {
            return Err(Error::InvariantBreach("intersection of tight subcurves is not tight".into()));
        }
        if steps.len() >= cap {
            return Err(Error::IterationCap(cap));
        }
        current = twist(g, &current, fired)?;
        steps.push(TwistStep { fired, beta_min: Rational::from_integer(0) });
    }
    Ok(TwistTrace { start: i.clone(), steps, result: current })
}

/// Reduction to semistable followed by reduction to `w`-quasistable.
pub fn quasistable_representative(g: &DualGraph, i: &CombSheaf, pol: &Polarization, w: usize) -> Result<TwistTrace> {
    let first = semistable_reduce(g, i, pol)?;
    let second = sigma_reduce(g, &first.result, pol, w)?;
    let mut steps = first.steps;
    steps.extend(second.steps);
    Ok(TwistTrace { start: i.clone(), steps, result: second.result })
}

/// Twist class of an invertible multidegree: the total degree and a reduced
/// residue modulo the lattice spanned by the graph Laplacian.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ClassId {
    pub total: i64,
    pub residue: Vec<i64>,
}

/// Upper-triangular basis (positive pivots) of the reduced Laplacian lattice.
pub(crate) fn laplacian_basis(g: &DualGraph) -> Result<Vec<Vec<i128>>> {
    let n = g.num_vertices() - 1;
    let mut rows = vec![vec![0i128; n]; n];
    for edge in g.edges() {
        if edge.is_loop() {
            continue;
        }
        for (x, y) in [(edge.a, edge.b), (edge.b, edge.a)] {
            if x < n {
                rows[x][x] += 1;
                if y < n {
                    rows[x][y] -= 1;
                }
            }
        }
    }
    for c in 0..n {
        loop {
            let pivot = (c..n).filter(|&r| rows[r][c] != 0).min_by_key(|&r| rows[r][c].abs());
            let Some(p) = pivot else {
                return Err(Error::InvariantBreach("reduced Laplacian is singular".into()));
            };
            rows.swap(c, p);
            let mut done = true;
            for r in c + 1..n {
                if rows[r][c] == 0 {
                    continue;
                }
                let q = rows[r][c] / rows[c][c];
                for k in c..n {
                    let sub = q.checked_mul(rows[c][k]).ok_or(Error::Overflow)?;
                    rows[r][k] = rows[r][k].checked_sub(sub).ok_or(Error::Overflow)?;
                }
                if rows[r][c] != 0 {
                    done = false;
                }
            }
            if done {
                break;
            }
        }
        if rows[c][c] < 0 {
            for x in rows[c].iter_mut() {
                *x = -*x;
            }
        }
    }
    Ok(rows)
}

pub(crate) fn reduce_residue(basis: &[Vec<i128>], degrees: &[i64]) -> Result<Vec<i64>> {
    let n = basis.len();
    let mut x: Vec<i128> = degrees[..n].iter().map(|&d| d as i128).collect();
    for k in 0..n {
        let q = x[k].div_euclid(basis[k][k]);
        if q != 0 {
            for j in k..n {
                let sub = q.checked_mul(basis[k][j]).ok_or(Error::Overflow)?;
                x[j] = x[j].checked_sub(sub).ok_or(Error::Overflow)?;
            }
        }
    }
    x.into_iter().map(|v| i64::try_from(v).map_err(|_| Error::Overflow)).collect()
}

pub fn class_id(g: &DualGraph, i: &CombSheaf) -> Result<ClassId> {
    if !i.is_invertible() {
        return Err(Error::NotInvertible);
    }
    let basis = laplacian_basis(g)?;
    Ok(ClassId { total: i.total_degree(), residue: reduce_residue(&basis, i.degrees())? })
}
