//! Jordan–Hölder filtrations and associated graded classes.
//!
//! A filtration repeatedly peels off a quotient `I_Y` that is stable with
//! beta zero, keeping the kernel on the rest of the support. The pieces,
//! compared as numerical classes, make up the [`JhClass`] of the sheaf.
//! [`build_quasistable`] goes the other way: from a part system it glues a
//! sheaf that is quasistable with respect to a chosen component.

use crate::curve::{DualGraph, EdgeSet, Subcurve};
use crate::error::{Error, Result};
use crate::sheaf::CombSheaf;
use crate::stability::{is_semistable, scaled_beta, BetaTable, Polarization};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JhStep {
    /// Support `Z_i` of the current sheaf.
    pub support: Subcurve,
    /// The sheaf `I_i` on `Z_i`.
    pub sheaf: CombSheaf,
    /// The peeled subcurve `Y_i = Z_i - Z_{i+1}`.
    pub peeled: Subcurve,
    /// The stable quotient `I_i / I_{i+1}` on `Y_i`.
    pub piece: CombSheaf,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JhFiltration {
    pub steps: Vec<JhStep>,
}

impl JhFiltration {
    pub fn class(&self) -> JhClass {
        JhClass::new(self.steps.iter().map(|s| s.piece.clone()).collect())
    }
}

/// Canonically sorted multiset of stable pieces with pairwise disjoint supports.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct JhClass {
    pieces: Vec<CombSheaf>,
}

impl JhClass {
    pub fn new(mut pieces: Vec<CombSheaf>) -> Self {
        pieces.sort_by(|a, b| a.canonical_cmp(b));
        JhClass { pieces }
    }

    pub fn pieces(&self) -> &[CombSheaf] {
        &self.pieces
    }

    pub fn len(&self) -> usize {
        self.pieces.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pieces.is_empty()
    }

    /// The direct sum of the pieces, as a sheaf on the union of their supports.
    pub fn split_representative(&self, g: &DualGraph) -> Result<CombSheaf> {
        let mut support = Subcurve::EMPTY;
        let mut nonfree = EdgeSet::EMPTY;
        let mut degrees = vec![0i64; g.num_vertices()];
        for p in &self.pieces {
            if !support.is_disjoint(p.ambient()) {
                return Err(Error::InvalidParts("piece supports overlap".into()));
            }
            support = support.union(p.ambient());
            nonfree = nonfree.union(p.nonfree());
            for v in p.ambient().vertices() {
                degrees[v] = p.degree(v);
            }
        }
        let mut cross = g.internal_edges_unchecked(support);
        for p in &self.pieces {
            cross = cross.difference(g.internal_edges_unchecked(p.ambient()));
        }
        CombSheaf::new(g, support, nonfree.union(cross), degrees)
    }
}

/// How to pick among several inclusion-minimal zero-beta subcurves.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PieceChoice {
    LexFirst,
    LexLast,
}

/// Inclusion-minimal non-empty subcurves of the support with beta zero (the support itself included).
pub fn minimal_zero_subcurves(g: &DualGraph, i: &CombSheaf, pol: &Polarization) -> Vec<Subcurve> {
    let ambient = i.ambient();
    let zeros: Vec<Subcurve> = ambient
        .subsets()
        .filter(|y| !y.is_empty() && (*y == ambient || scaled_beta(g, i, pol, *y) == 0))
        .collect();
    let mut minimal: Vec<Subcurve> = zeros
        .iter()
        .copied()
        .filter(|y| !zeros.iter().any(|z| z != y && z.is_subset_of(*y)))
        .collect();
    minimal.sort_by(|a, b| a.lex_cmp(*b));
    minimal
}

pub fn jh_filtration(g: &DualGraph, i: &CombSheaf, pol: &Polarization) -> Result<JhFiltration> {
    jh_filtration_with(g, i, pol, PieceChoice::LexFirst)
}

pub fn jh_filtration_with(
    g: &DualGraph,
    i: &CombSheaf,
    pol: &Polarization,
    choice: PieceChoice,
) -> Result<JhFiltration> {
    require_semistable(g, i, pol)?;
    let mut steps = Vec::new();
    let mut current = i.clone();
    loop {
        let table = BetaTable::new(g, &current, pol)?;
        if !table.is_semistable() {
            return Err(Error::InvariantBreach("kernel in a filtration is not semistable".into()));
        }
        let minimal = minimal_zero_subcurves(g, &current, pol);
        let peeled = match choice {
            PieceChoice::LexFirst => minimal[0],
            PieceChoice::LexLast => minimal[minimal.len() - 1],
        };
        let support = current.ambient();
        let piece = current.restrict(g, peeled)?;
        if !BetaTable::new(g, &piece, pol)?.is_stable() {
            return Err(Error::InvariantBreach("filtration piece is not stable".into()));
        }
        if peeled == support {
            steps.push(JhStep { support, sheaf: current, peeled, piece });
            break;
        }
        let next = current.kernel_to(g, peeled)?;
        steps.push(JhStep { support, sheaf: current, peeled, piece });
        current = next;
    }
    Ok(JhFiltration { steps })
}

fn require_semistable(g: &DualGraph, i: &CombSheaf, pol: &Polarization) -> Result<()> {
    let report = is_semistable(g, i, pol)?;
    if !report.holds {
        let w = report.witness.expect("a non-semistable sheaf has a witness");
        return Err(Error::NotSemistable { witness: g.describe(w.subcurve), beta: w.beta.to_string() });
    }
    Ok(())
}

/// Associated graded class.
pub fn gr(g: &DualGraph, i: &CombSheaf, pol: &Polarization) -> Result<JhClass> {
    Ok(jh_filtration(g, i, pol)?.class())
}

pub fn jh_equivalent(g: &DualGraph, i: &CombSheaf, j: &CombSheaf, pol: &Polarization) -> Result<bool> {
    let (ci, cj) = (i.euler_char(g), j.euler_char(g));
    if ci != cj {
        return Err(Error::ChiMismatch { chi: cj, target: ci.to_string() });
    }
    Ok(gr(g, i, pol)? == gr(g, j, pol)?)
}

/// Gluing order and kept free node for each step of the quasistable construction.
///
/// `order[0]` is the first part peeled by the filtration, `order[q]` the
/// innermost one. `free_edges[k]` joins `order[k]` to the union of the later
/// parts; `None` glues that step by a split extension instead.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GluingPlan {
    pub order: Vec<usize>,
    pub free_edges: Vec<Option<usize>>,
}

/// Canonical gluing plan ending at `parts[last]`.
///
/// Parts are attached one at a time onto the growing union, taking the
/// canonically smallest adjacent part and the smallest connecting node.
pub fn plan_gluing(g: &DualGraph, parts: &[CombSheaf], last: usize) -> Result<GluingPlan> {
    if last >= parts.len() {
        return Err(Error::InvalidParts(format!("no part with index {last}")));
    }
    let mut remaining: Vec<usize> = (0..parts.len()).filter(|&k| k != last).collect();
    remaining.sort_by(|&a, &b| parts[a].canonical_cmp(&parts[b]));
    let mut union = parts[last].ambient();
    let mut order = vec![last];
    let mut free_edges = Vec::new();
    while !remaining.is_empty() {
        let pick = remaining
            .iter()
            .position(|&k| !g.edges_between(parts[k].ambient(), union).is_empty())
            .ok_or_else(|| Error::InvalidParts("no node joins the remaining parts to the glued curve".into()))?;
        let k = remaining.remove(pick);
        let edge = g.edges_between(parts[k].ambient(), union).edges().next();
        union = union.union(parts[k].ambient());
        order.push(k);
        free_edges.push(edge);
    }
    order.reverse();
    free_edges.reverse();
    Ok(GluingPlan { order, free_edges })
}

/// Glues the parts along `plan`: inter-part nodes are non-free except the kept
/// ones, and each kept node adds one degree on its endpoint in the deeper block.
pub fn glue(g: &DualGraph, parts: &[CombSheaf], plan: &GluingPlan) -> Result<CombSheaf> {
    let split = JhClass { pieces: parts.to_vec() }.split_representative(g)?;
    if split.ambient() != g.full() {
        return Err(Error::InvalidParts("parts do not cover the curve".into()));
    }
    let mut nonfree = split.nonfree();
    let mut degrees = split.degrees().to_vec();
    let mut deeper = Subcurve::EMPTY;
    for k in (0..plan.order.len()).rev() {
        let part = parts[plan.order[k]].ambient();
        if k + 1 < plan.order.len() {
            if let Some(e) = plan.free_edges[k] {
                let edge = g.edge(e);
                let inner = if deeper.contains(edge.a) && part.contains(edge.b) {
                    edge.a
                } else if deeper.contains(edge.b) && part.contains(edge.a) {
                    edge.b
                } else {
                    return Err(Error::InvalidParts(format!(
                        "node {} does not join {} to the deeper parts",
                        g.describe_edge(e),
                        g.describe(part)
                    )));
                };
                nonfree.remove(e);
                degrees[inner] += 1;
            }
        }
        deeper = deeper.union(part);
    }
    CombSheaf::on_curve(g, nonfree, degrees)
}

fn validate_parts(g: &DualGraph, parts: &[CombSheaf], pol: &Polarization) -> Result<()> {
    if parts.is_empty() {
        return Err(Error::InvalidParts("no parts given".into()));
    }
    let mut cover = Subcurve::EMPTY;
    for p in parts {
        if !cover.is_disjoint(p.ambient()) {
            return Err(Error::InvalidParts(format!("part {} overlaps another part", g.describe(p.ambient()))));
        }
        cover = cover.union(p.ambient());
        let table = BetaTable::new(g, p, pol).map_err(|e| match e {
            Error::ChiMismatch { chi, target } => Error::InvalidParts(format!(
                "piece on {} has chi {chi} but beta zero needs {target}",
                g.describe(p.ambient())
            )),
            other => other,
        })?;
        if !table.is_stable() {
            return Err(Error::InvalidParts(format!("piece on {} is not stable", g.describe(p.ambient()))));
        }
    }
    if cover != g.full() {
        return Err(Error::InvalidParts(format!("parts miss {}", g.describe(g.full().difference(cover)))));
    }
    Ok(())
}

/// A `w`-quasistable sheaf whose associated graded class is the given part system.
pub fn build_quasistable(g: &DualGraph, parts: &[CombSheaf], w: usize, pol: &Polarization) -> Result<CombSheaf> {
    validate_parts(g, parts, pol)?;
    let last = parts
        .iter()
        .position(|p| p.ambient().contains(w))
        .ok_or_else(|| Error::UnknownVertex(format!("#{w}")))?;
    let plan = plan_gluing(g, parts, last)?;
    let sheaf = glue(g, parts, &plan)?;
    if gr(g, &sheaf, pol)? != JhClass::new(parts.to_vec()) {
        return Err(Error::InvariantBreach("glued sheaf has the wrong graded class".into()));
    }
    if !BetaTable::new(g, &sheaf, pol)?.is_w_quasistable(w) {
        return Err(Error::InvariantBreach("glued sheaf is not quasistable".into()));
    }
    Ok(sheaf)
}
