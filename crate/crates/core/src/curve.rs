//! Dual graphs of nodal curves and the boolean lattice of subcurves.
//!
//! Vertices are irreducible components (with their geometric genus), edges are
//! nodes. A self-loop is a node where a component meets itself. Subcurves are
//! vertex subsets stored as 64-bit masks; edge sets are 128-bit masks over the
//! canonical edge order.

use std::cmp::Ordering;
use std::fmt;

use crate::error::{Error, Result};

pub const MAX_VERTICES: usize = 64;
pub const MAX_EDGES: usize = 128;

/// A union of irreducible components, as a set of vertex indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Subcurve(u64);

impl Subcurve {
    pub const EMPTY: Subcurve = Subcurve(0);

    pub fn from_bits(bits: u64) -> Self {
        Subcurve(bits)
    }

    pub fn bits(self) -> u64 {
        self.0
    }

    pub fn singleton(v: usize) -> Self {
        Subcurve(1u64 << v)
    }

    /// All of the first `n` vertices.
    pub fn full(n: usize) -> Self {
        if n >= 64 {
            Subcurve(u64::MAX)
        } else {
            Subcurve((1u64 << n) - 1)
        }
    }

    pub fn from_vertices<I: IntoIterator<Item = usize>>(vertices: I) -> Self {
        Subcurve(vertices.into_iter().fold(0u64, |acc, v| acc | (1u64 << v)))
    }

    pub fn contains(self, v: usize) -> bool {
        v < 64 && self.0 & (1u64 << v) != 0
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn meet(self, other: Subcurve) -> Subcurve {
        Subcurve(self.0 & other.0)
    }

    pub fn union(self, other: Subcurve) -> Subcurve {
        Subcurve(self.0 | other.0)
    }

    pub fn difference(self, other: Subcurve) -> Subcurve {
        Subcurve(self.0 & !other.0)
    }

    /// Complement inside `ambient`.
    pub fn complement_in(self, ambient: Subcurve) -> Subcurve {
        ambient.difference(self)
    }

    pub fn is_subset_of(self, other: Subcurve) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn is_disjoint(self, other: Subcurve) -> bool {
        self.0 & other.0 == 0
    }

    pub fn vertices(self) -> impl Iterator<Item = usize> {
        let mut bits = self.0;
        std::iter::from_fn(move || {
            if bits == 0 {
                None
            } else {
                let v = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                Some(v)
            }
        })
    }

    pub fn first(self) -> Option<usize> {
        if self.0 == 0 {
            None
        } else {
            Some(self.0.trailing_zeros() as usize)
        }
    }

    /// Lexicographic order on the sorted vertex lists; `{0} < {0,1} < {0,2} < {1}`.
    pub fn lex_cmp(self, other: Subcurve) -> Ordering {
        let mut a = self.vertices();
        let mut b = other.vertices();
        loop {
            match (a.next(), b.next()) {
                (None, None) => return Ordering::Equal,
                (None, Some(_)) => return Ordering::Less,
                (Some(_), None) => return Ordering::Greater,
                (Some(x), Some(y)) => match x.cmp(&y) {
                    Ordering::Equal => continue,
                    ord => return ord,
                },
            }
        }
    }

    /// Every subset of `self`, including the empty set and `self`.
    pub fn subsets(self) -> impl Iterator<Item = Subcurve> {
        let full = self.0;
        let mut next = Some(full);
        std::iter::from_fn(move || {
            let cur = next?;
            next = if cur == 0 { None } else { Some((cur - 1) & full) };
            Some(Subcurve(cur))
        })
    }

    /// Non-empty proper subsets of `self`.
    pub fn proper_subsets(self) -> impl Iterator<Item = Subcurve> {
        let full = self;
        self.subsets().filter(move |y| !y.is_empty() && *y != full)
    }
}

impl fmt::Display for Subcurve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, v) in self.vertices().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, "}}")
    }
}

/// A set of edges (nodes), indexed by canonical edge position.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, PartialOrd, Ord)]
pub struct EdgeSet(u128);

impl EdgeSet {
    pub const EMPTY: EdgeSet = EdgeSet(0);

    pub fn from_bits(bits: u128) -> Self {
        EdgeSet(bits)
    }

    pub fn bits(self) -> u128 {
        self.0
    }

    pub fn all(m: usize) -> Self {
        if m >= 128 {
            EdgeSet(u128::MAX)
        } else {
            EdgeSet((1u128 << m) - 1)
        }
    }

    pub fn from_edges<I: IntoIterator<Item = usize>>(edges: I) -> Self {
        EdgeSet(edges.into_iter().fold(0u128, |acc, e| acc | (1u128 << e)))
    }

    pub fn contains(self, e: usize) -> bool {
        e < 128 && self.0 & (1u128 << e) != 0
    }

    pub fn insert(&mut self, e: usize) {
        self.0 |= 1u128 << e;
    }

    pub fn remove(&mut self, e: usize) {
        self.0 &= !(1u128 << e);
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn union(self, other: EdgeSet) -> EdgeSet {
        EdgeSet(self.0 | other.0)
    }

    pub fn meet(self, other: EdgeSet) -> EdgeSet {
        EdgeSet(self.0 & other.0)
    }

    pub fn difference(self, other: EdgeSet) -> EdgeSet {
        EdgeSet(self.0 & !other.0)
    }

    pub fn is_subset_of(self, other: EdgeSet) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn edges(self) -> impl Iterator<Item = usize> {
        let mut bits = self.0;
        std::iter::from_fn(move || {
            if bits == 0 {
                None
            } else {
                let e = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                Some(e)
            }
        })
    }

    /// Every subset of `self`.
    pub fn subsets(self) -> impl Iterator<Item = EdgeSet> {
        let full = self.0;
        let mut next = Some(0u128);
        std::iter::from_fn(move || {
            let cur = next?;
            // increasing submask enumeration
            next = if cur == full { None } else { Some(((cur | !full).wrapping_add(1)) & full) };
            Some(EdgeSet(cur))
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vertex {
    pub id: String,
    pub genus: u32,
}

/// A node joining components `a <= b` (`a == b` for a self-node).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Edge {
    pub a: usize,
    pub b: usize,
}

impl Edge {
    pub fn is_loop(self) -> bool {
        self.a == self.b
    }

    fn mask(self) -> u64 {
        (1u64 << self.a) | (1u64 << self.b)
    }
}

/// A non-singular marked point, lying on exactly one component.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Marking {
    pub id: String,
    pub vertex: usize,
}

/// The minimum number of nodes separating the curve; infinite when irreducible.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum MinCut {
    Finite(usize),
    Infinite,
}

impl MinCut {
    /// True when `k` is strictly below the cut size.
    pub fn exceeds(self, k: usize) -> bool {
        match self {
            MinCut::Finite(c) => k < c,
            MinCut::Infinite => true,
        }
    }
}

impl fmt::Display for MinCut {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MinCut::Finite(c) => write!(f, "{c}"),
            MinCut::Infinite => write!(f, "inf"),
        }
    }
}

/// Dual graph of a connected nodal curve.
///
/// Immutable after construction. Edges are kept in canonical order: by
/// endpoint positions, then by insertion order among parallel edges.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DualGraph {
    vertices: Vec<Vertex>,
    edges: Vec<Edge>,
    markings: Vec<Marking>,
}

impl DualGraph {
    pub fn new(vertices: Vec<Vertex>, edges: Vec<(usize, usize)>, markings: Vec<Marking>) -> Result<Self> {
        let n = vertices.len();
        if n == 0 {
            return Err(Error::EmptyGraph);
        }
        if n > MAX_VERTICES {
            return Err(Error::TooManyVertices(n));
        }
        if edges.len() > MAX_EDGES {
            return Err(Error::TooManyEdges(edges.len()));
        }
        for (i, v) in vertices.iter().enumerate() {
            if vertices[..i].iter().any(|w| w.id == v.id) {
                return Err(Error::DuplicateVertex(v.id.clone()));
            }
        }
        let mut normalized = Vec::with_capacity(edges.len());
        for (a, b) in edges {
            for x in [a, b] {
                if x >= n {
                    return Err(Error::UnknownVertex(format!("#{x}")));
                }
            }
            normalized.push(Edge { a: a.min(b), b: a.max(b) });
        }
        // stable sort keeps insertion order among parallel edges
        normalized.sort_by_key(|e| (e.a, e.b));
        for m in &markings {
            if m.vertex >= n {
                return Err(Error::UnknownVertex(format!("#{}", m.vertex)));
            }
        }
        let g = DualGraph { vertices, edges: normalized, markings };
        g.check_connected()?;
        Ok(g)
    }

    /// Graph with vertex ids `v0, v1, ...` and genus 0 everywhere.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let vertices = (0..n).map(|i| Vertex { id: format!("v{i}"), genus: 0 }).collect();
        DualGraph::new(vertices, edges.to_vec(), Vec::new())
    }

    /// Two rational components `u`, `v` meeting in `delta` nodes.
    pub fn two_vertex(delta: usize) -> Self {
        let vertices = vec![Vertex { id: "u".into(), genus: 0 }, Vertex { id: "v".into(), genus: 0 }];
        DualGraph::new(vertices, vec![(0, 1); delta], Vec::new()).expect("two-vertex graph")
    }

    /// Chain `v1 - v2 - ... - vn` of rational components.
    pub fn path(n: usize) -> Self {
        let vertices = (1..=n).map(|i| Vertex { id: format!("v{i}"), genus: 0 }).collect();
        let edges = (1..n).map(|i| (i - 1, i)).collect();
        DualGraph::new(vertices, edges, Vec::new()).expect("path graph")
    }

    /// Cycle of `n` rational components; `n = 1` is a single self-node.
    pub fn cycle(n: usize) -> Self {
        let vertices = (1..=n).map(|i| Vertex { id: format!("v{i}"), genus: 0 }).collect();
        let edges = (0..n).map(|i| (i, (i + 1) % n)).collect();
        DualGraph::new(vertices, edges, Vec::new()).expect("cycle graph")
    }

    /// One component of the given geometric genus with `loops` self-nodes.
    pub fn irreducible(genus: u32, loops: usize) -> Self {
        DualGraph::new(vec![Vertex { id: "x".into(), genus }], vec![(0, 0); loops], Vec::new())
            .expect("irreducible graph")
    }

    pub fn with_marking(mut self, id: &str, vertex: usize) -> Result<Self> {
        if vertex >= self.vertices.len() {
            return Err(Error::UnknownVertex(format!("#{vertex}")));
        }
        self.markings.push(Marking { id: id.to_string(), vertex });
        Ok(self)
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn vertex(&self, v: usize) -> &Vertex {
        &self.vertices[v]
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, e: usize) -> Edge {
        self.edges[e]
    }

    pub fn markings(&self) -> &[Marking] {
        &self.markings
    }

    pub fn vertex_index(&self, id: &str) -> Result<usize> {
        self.vertices
            .iter()
            .position(|v| v.id == id)
            .ok_or_else(|| Error::UnknownVertex(id.to_string()))
    }

    pub fn marked_vertex(&self, mark: &str) -> Result<usize> {
        self.markings
            .iter()
            .find(|m| m.id == mark)
            .map(|m| m.vertex)
            .ok_or_else(|| Error::UnknownMark(mark.to_string()))
    }

    pub fn full(&self) -> Subcurve {
        Subcurve::full(self.vertices.len())
    }

    pub fn all_edges(&self) -> EdgeSet {
        EdgeSet::all(self.edges.len())
    }

    pub fn genus(&self, v: usize) -> i64 {
        i64::from(self.vertices[v].genus)
    }

    /// Arithmetic genus `sum g_v + |E| - |V| + 1`.
    pub fn arithmetic_genus(&self) -> i64 {
        let geometric: i64 = self.vertices.iter().map(|v| i64::from(v.genus)).sum();
        geometric + self.edges.len() as i64 - self.vertices.len() as i64 + 1
    }

    /// Fails unless `y` only names vertices of this graph.
    pub fn check(&self, y: Subcurve) -> Result<()> {
        if y.is_subset_of(self.full()) {
            Ok(())
        } else {
            let stray = y.difference(self.full()).first().unwrap_or(0);
            Err(Error::UnknownVertex(format!("#{stray}")))
        }
    }

    /// Edges with both endpoints in `y`, self-nodes included.
    pub fn internal_edges(&self, y: Subcurve) -> Result<EdgeSet> {
        self.check(y)?;
        Ok(self.internal_edges_unchecked(y))
    }

    pub(crate) fn internal_edges_unchecked(&self, y: Subcurve) -> EdgeSet {
        let mut out = EdgeSet::EMPTY;
        for (k, e) in self.edges.iter().enumerate() {
            if e.mask() & !y.bits() == 0 {
                out.insert(k);
            }
        }
        out
    }

    /// Edges with exactly one endpoint in `y`.
    pub fn linking_edges(&self, y: Subcurve) -> Result<EdgeSet> {
        self.check(y)?;
        Ok(self.edges_between(y, self.full().difference(y)))
    }

    /// Edges joining a vertex of `y` to a vertex of `z`, for disjoint `y`, `z`.
    pub fn edges_between(&self, y: Subcurve, z: Subcurve) -> EdgeSet {
        let mut out = EdgeSet::EMPTY;
        for (k, e) in self.edges.iter().enumerate() {
            if (y.contains(e.a) && z.contains(e.b)) || (y.contains(e.b) && z.contains(e.a)) {
                out.insert(k);
            }
        }
        out
    }

    /// Euler characteristic of the structure sheaf of `y`.
    pub fn euler_structure(&self, y: Subcurve) -> Result<i64> {
        if y.is_empty() {
            return Err(Error::EmptySubcurve);
        }
        self.check(y)?;
        Ok(self.euler_structure_unchecked(y))
    }

    pub(crate) fn euler_structure_unchecked(&self, y: Subcurve) -> i64 {
        let components: i64 = y.vertices().map(|v| 1 - self.genus(v)).sum();
        components - self.internal_edges_unchecked(y).len() as i64
    }

    /// Number of non-loop edges at `v` whose other endpoint lies in `y`.
    pub fn link_count(&self, v: usize, y: Subcurve) -> usize {
        self.edges
            .iter()
            .filter(|e| !e.is_loop() && ((e.a == v && y.contains(e.b)) || (e.b == v && y.contains(e.a))))
            .count()
    }

    /// Non-loop edge count at `v`.
    pub fn link_degree(&self, v: usize) -> usize {
        self.edges.iter().filter(|e| !e.is_loop() && (e.a == v || e.b == v)).count()
    }

    pub fn loops_at(&self, v: usize) -> EdgeSet {
        EdgeSet::from_edges(
            self.edges
                .iter()
                .enumerate()
                .filter(|(_, e)| e.is_loop() && e.a == v)
                .map(|(k, _)| k),
        )
    }

    /// Whether the vertices of `y` are connected using only edges of `allowed`
    /// that lie inside `y`. The empty subcurve counts as connected.
    pub fn is_connected_via(&self, y: Subcurve, allowed: EdgeSet) -> bool {
        let Some(start) = y.first() else {
            return true;
        };
        let mut seen = Subcurve::singleton(start);
        loop {
            let mut grown = seen;
            for k in allowed.edges() {
                let e = self.edges[k];
                if !(y.contains(e.a) && y.contains(e.b)) {
                    continue;
                }
                if seen.contains(e.a) || seen.contains(e.b) {
                    grown = grown.union(Subcurve::from_vertices([e.a, e.b]));
                }
            }
            if grown == seen {
                return seen == y;
            }
            seen = grown;
        }
    }

    fn check_connected(&self) -> Result<()> {
        let full = self.full();
        if self.is_connected_via(full, self.all_edges()) {
            return Ok(());
        }
        let mut seen = Subcurve::singleton(0);
        loop {
            let mut grown = seen;
            for e in &self.edges {
                if seen.contains(e.a) || seen.contains(e.b) {
                    grown = grown.union(Subcurve::from_vertices([e.a, e.b]));
                }
            }
            if grown == seen {
                break;
            }
            seen = grown;
        }
        let lost = full.difference(seen).first().unwrap_or(0);
        Err(Error::Disconnected(self.vertices[lost].id.clone(), self.vertices[0].id.clone()))
    }

    /// Global minimum cut by Stoer–Wagner on edge multiplicities; self-nodes never count.
    pub fn min_cut(&self) -> MinCut {
        let n = self.vertices.len();
        if n == 1 {
            return MinCut::Infinite;
        }
        let mut w = vec![vec![0usize; n]; n];
        for e in &self.edges {
            if !e.is_loop() {
                w[e.a][e.b] += 1;
                w[e.b][e.a] += 1;
            }
        }
        let mut alive: Vec<usize> = (0..n).collect();
        let mut best = usize::MAX;
        while alive.len() > 1 {
            let mut added = vec![false; n];
            let mut key = vec![0usize; n];
            let mut prev = alive[0];
            let mut last = alive[0];
            for step in 0..alive.len() {
                let next = *alive
                    .iter()
                    .filter(|&&v| !added[v])
                    .max_by(|&&x, &&y| key[x].cmp(&key[y]).then(y.cmp(&x)))
                    .expect("vertex left");
                added[next] = true;
                if step == alive.len() - 1 {
                    best = best.min(key[next]);
                }
                prev = last;
                last = next;
                for &v in &alive {
                    if !added[v] {
                        key[v] += w[next][v];
                    }
                }
            }
            // merge `last` into `prev`
            for &v in &alive {
                w[prev][v] += w[last][v];
                w[v][prev] = w[prev][v];
            }
            w[prev][prev] = 0;
            alive.retain(|&v| v != last);
        }
        MinCut::Finite(best)
    }

    /// Human-readable subcurve, e.g. `{u,v}`.
    pub fn describe(&self, y: Subcurve) -> String {
        let names: Vec<&str> = y
            .vertices()
            .map(|v| self.vertices.get(v).map(|x| x.id.as_str()).unwrap_or("?"))
            .collect();
        format!("{{{}}}", names.join(","))
    }

    /// Position of `e` among the parallel edges joining its endpoints.
    pub fn parallel_index(&self, e: usize) -> usize {
        let target = self.edges[e];
        self.edges[..e].iter().filter(|x| **x == target).count()
    }

    /// Edge `k`-th among those joining `a` and `b` (in either order).
    pub fn find_edge(&self, a: usize, b: usize, k: usize) -> Option<usize> {
        let key = Edge { a: a.min(b), b: a.max(b) };
        self.edges
            .iter()
            .enumerate()
            .filter(|(_, e)| **e == key)
            .nth(k)
            .map(|(i, _)| i)
    }

    pub fn describe_edge(&self, e: usize) -> String {
        let edge = self.edges[e];
        format!(
            "({},{},{})",
            self.vertices[edge.a].id,
            self.vertices[edge.b].id,
            self.parallel_index(e)
        )
    }
}
