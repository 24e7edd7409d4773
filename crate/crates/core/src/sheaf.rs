//! Numerical classes of torsion-free rank-1 sheaves on nodal curves.
//!
//! A class is the pushforward of a line bundle from the partial normalization
//! at a set `S` of nodes. It is recorded as its support (a subcurve), the set
//! `S` of non-free nodes inside the support, and the multidegree of the line
//! bundle on the partial normalization. The model is exact for nodal curves
//! only.

use std::cmp::Ordering;

use crate::curve::{DualGraph, EdgeSet, Subcurve};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CombSheaf {
    ambient: Subcurve,
    nonfree: EdgeSet,
    // indexed by global vertex position; zero outside `ambient`
    degrees: Vec<i64>,
}

impl CombSheaf {
    pub fn new(g: &DualGraph, ambient: Subcurve, nonfree: EdgeSet, degrees: Vec<i64>) -> Result<Self> {
        if ambient.is_empty() {
            return Err(Error::EmptySubcurve);
        }
        g.check(ambient)?;
        if degrees.len() != g.num_vertices() {
            return Err(Error::InvalidSheaf(format!(
                "multidegree has {} entries, graph has {} vertices",
                degrees.len(),
                g.num_vertices()
            )));
        }
        if let Some(v) = (0..degrees.len()).find(|&v| !ambient.contains(v) && degrees[v] != 0) {
            return Err(Error::InvalidSheaf(format!(
                "degree given on `{}` outside the support {}",
                g.vertex(v).id,
                g.describe(ambient)
            )));
        }
        if nonfree.edges().any(|e| e >= g.num_edges()) {
            return Err(Error::InvalidSheaf("non-free node index out of range".into()));
        }
        if !nonfree.is_subset_of(g.internal_edges_unchecked(ambient)) {
            return Err(Error::InvalidSheaf(format!(
                "non-free nodes must lie inside the support {}",
                g.describe(ambient)
            )));
        }
        Ok(CombSheaf { ambient, nonfree, degrees })
    }

    /// Sheaf on the whole curve.
    pub fn on_curve(g: &DualGraph, nonfree: EdgeSet, degrees: Vec<i64>) -> Result<Self> {
        CombSheaf::new(g, g.full(), nonfree, degrees)
    }

    /// Line bundle on the whole curve.
    pub fn invertible(g: &DualGraph, degrees: Vec<i64>) -> Result<Self> {
        CombSheaf::new(g, g.full(), EdgeSet::EMPTY, degrees)
    }

    pub fn ambient(&self) -> Subcurve {
        self.ambient
    }

    pub fn nonfree(&self) -> EdgeSet {
        self.nonfree
    }

    pub fn degrees(&self) -> &[i64] {
        &self.degrees
    }

    pub fn degree(&self, v: usize) -> i64 {
        self.degrees[v]
    }

    pub fn total_degree(&self) -> i64 {
        self.degrees.iter().sum()
    }

    pub fn is_invertible(&self) -> bool {
        self.nonfree.is_empty()
    }

    pub fn euler_char(&self, g: &DualGraph) -> i64 {
        self.total_degree() + g.euler_structure_unchecked(self.ambient) + self.nonfree.len() as i64
    }

    fn check_inside(&self, g: &DualGraph, y: Subcurve) -> Result<()> {
        if y.is_empty() {
            return Err(Error::EmptySubcurve);
        }
        if !y.is_subset_of(self.ambient) {
            return Err(Error::NotContained(g.describe(y), g.describe(self.ambient)));
        }
        Ok(())
    }

    fn check_proper(&self, g: &DualGraph, y: Subcurve) -> Result<()> {
        self.check_inside(g, y)?;
        if y == self.ambient {
            return Err(Error::NotProper(g.describe(y), g.describe(self.ambient)));
        }
        Ok(())
    }

    /// Euler characteristic of the maximal torsion-free quotient of the restriction to `y`.
    pub fn restricted_euler(&self, g: &DualGraph, y: Subcurve) -> Result<i64> {
        self.check_inside(g, y)?;
        Ok(self.restricted_euler_unchecked(g, y))
    }

    /// Same as [`CombSheaf::restricted_euler`] for `y` already known to lie in the support;
    /// the empty subcurve yields 0.
    pub(crate) fn restricted_euler_unchecked(&self, g: &DualGraph, y: Subcurve) -> i64 {
        let mut chi = 0i64;
        for v in y.vertices() {
            chi += self.degrees[v] + 1 - g.genus(v);
        }
        let free_inside = g.internal_edges_unchecked(y).difference(self.nonfree);
        chi - free_inside.len() as i64
    }

    pub fn restrict(&self, g: &DualGraph, y: Subcurve) -> Result<CombSheaf> {
        self.check_inside(g, y)?;
        let nonfree = self.nonfree.meet(g.internal_edges_unchecked(y));
        let degrees = (0..self.degrees.len())
            .map(|v| if y.contains(v) { self.degrees[v] } else { 0 })
            .collect();
        Ok(CombSheaf { ambient: y, nonfree, degrees })
    }

    /// Kernel of the quotient onto the restriction to `y`, a sheaf on the rest of the support.
    ///
    /// Each vertex of the remainder loses one degree per free node joining it to `y`.
    pub fn kernel_to(&self, g: &DualGraph, y: Subcurve) -> Result<CombSheaf> {
        self.check_proper(g, y)?;
        let z = self.ambient.difference(y);
        let nonfree = self.nonfree.meet(g.internal_edges_unchecked(z));
        let mut degrees = vec![0i64; self.degrees.len()];
        for v in z.vertices() {
            degrees[v] = self.degrees[v];
        }
        for k in g.edges_between(y, z).difference(self.nonfree).edges() {
            let e = g.edge(k);
            let inner = if z.contains(e.a) { e.a } else { e.b };
            degrees[inner] -= 1;
        }
        Ok(CombSheaf { ambient: z, nonfree, degrees })
    }

    /// Whether every node joining `y` to the rest of the support is non-free.
    pub fn decomposes_at(&self, g: &DualGraph, y: Subcurve) -> Result<bool> {
        self.check_proper(g, y)?;
        let link = g.edges_between(y, self.ambient.difference(y));
        Ok(link.is_subset_of(self.nonfree))
    }

    /// Indecomposability, read off as connectivity of the support through free nodes.
    pub fn is_simple(&self, g: &DualGraph) -> bool {
        let free = g.internal_edges_unchecked(self.ambient).difference(self.nonfree);
        g.is_connected_via(self.ambient, free)
    }

    /// `chi(I_Y) + chi(I_Z) - chi(I_{Y u Z})` for disjoint non-empty `y`, `z`.
    pub fn delta(&self, g: &DualGraph, y: Subcurve, z: Subcurve) -> Result<i64> {
        self.check_inside(g, y)?;
        self.check_inside(g, z)?;
        if !y.is_disjoint(z) {
            return Err(Error::Overlapping(g.describe(y), g.describe(z)));
        }
        Ok(self.restricted_euler_unchecked(g, y) + self.restricted_euler_unchecked(g, z)
            - self.restricted_euler_unchecked(g, y.union(z)))
    }

    /// Canonical order: support (lexicographic), then non-free set, then multidegree.
    pub fn canonical_cmp(&self, other: &CombSheaf) -> Ordering {
        self.ambient
            .lex_cmp(other.ambient)
            .then_with(|| self.nonfree.cmp(&other.nonfree))
            .then_with(|| self.degrees.cmp(&other.degrees))
    }
}
