//! Edge cocycles over finite 2-complexes: validation, coboundaries,
//! holonomy, covering spaces, and the normalization and decomposition of
//! transition data for canonical models.

mod covering;
mod normalize;
mod sample;
mod structure;

pub use covering::{holonomy_index, CoveringSpace};
pub use normalize::{
    decompose, extract_multiplicity_cocycles, include, is_compatible, multiplicity_cocycle_residual, normalize_transitions,
    Decomposition, Normalized,
};
pub use sample::{random_discrete_cocycle, random_gauge, random_normalized_vect};
pub use structure::{AutGroup, ComponentAutGroup, GeneralLinear, StructureGroup};

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::FiniteGroup;

/// A finite simplicial 2-complex on charts `0..charts`. Edges are stored as
/// `[a, b]` with `a < b`, triangles as `[a, b, c]` with `a < b < c`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "ComplexFile", into = "ComplexFile")]
pub struct BaseComplex {
    charts: usize,
    edges: Vec<[usize; 2]>,
    triangles: Vec<[usize; 3]>,
    connected: bool,
}

#[derive(Serialize, Deserialize)]
struct ComplexFile {
    charts: usize,
    edges: Vec<[usize; 2]>,
    #[serde(default)]
    triangles: Vec<[usize; 3]>,
}

impl TryFrom<ComplexFile> for BaseComplex {
    type Error = Error;
    fn try_from(f: ComplexFile) -> Result<Self> {
        BaseComplex::new(f.charts, &f.edges, &f.triangles)
    }
}

impl From<BaseComplex> for ComplexFile {
    fn from(c: BaseComplex) -> Self {
        ComplexFile { charts: c.charts, edges: c.edges, triangles: c.triangles }
    }
}

impl BaseComplex {
    pub fn new(charts: usize, edges: &[[usize; 2]], triangles: &[[usize; 3]]) -> Result<Self> {
        if charts == 0 {
            return Err(Error::InvalidInput("complex has no charts".into()));
        }
        let mut es: Vec<[usize; 2]> = Vec::new();
        for &[a, b] in edges {
            if a >= charts || b >= charts || a == b {
                return Err(Error::InvalidInput(format!("bad edge [{a}, {b}]")));
            }
            es.push([a.min(b), a.max(b)]);
        }
        es.sort_unstable();
        es.dedup();
        let mut ts: Vec<[usize; 3]> = Vec::new();
        for t in triangles {
            let mut s = *t;
            s.sort_unstable();
            let [a, b, c] = s;
            for e in [[a, b], [b, c], [a, c]] {
                if es.binary_search(&e).is_err() {
                    return Err(Error::InvalidInput(format!("triangle {t:?} is missing edge {e:?}")));
                }
            }
            ts.push(s);
        }
        ts.sort_unstable();
        ts.dedup();
        let mut out = BaseComplex { charts, edges: es, triangles: ts, connected: false };
        out.connected = out.components().iter().all(|&c| c == 0);
        Ok(out)
    }

    /// The cycle graph `0 – 1 – … – (n−1) – 0`, no triangles.
    pub fn cycle(n: usize) -> Self {
        let edges: Vec<[usize; 2]> = (0..n).map(|i| [i, (i + 1) % n]).collect();
        Self::new(n, &edges, &[]).expect("cycle complex")
    }

    /// The full 2-skeleton of the `(n−1)`-simplex.
    pub fn simplex(n: usize) -> Self {
        let mut edges = Vec::new();
        let mut tris = Vec::new();
        for a in 0..n {
            for b in a + 1..n {
                edges.push([a, b]);
                for c in b + 1..n {
                    tris.push([a, b, c]);
                }
            }
        }
        Self::new(n, &edges, &tris).expect("simplex complex")
    }

    pub fn path(n: usize) -> Self {
        let edges: Vec<[usize; 2]> = (1..n).map(|i| [i - 1, i]).collect();
        Self::new(n, &edges, &[]).expect("path complex")
    }

    pub fn charts(&self) -> usize {
        self.charts
    }

    pub fn edges(&self) -> &[[usize; 2]] {
        &self.edges
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    pub fn is_connected(&self) -> bool {
        self.connected
    }

    pub fn edge_index(&self, a: usize, b: usize) -> Option<usize> {
        self.edges.binary_search(&[a.min(b), a.max(b)]).ok()
    }

    fn neighbors(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.charts];
        for &[a, b] in &self.edges {
            adj[a].push(b);
            adj[b].push(a);
        }
        adj
    }

    /// Connected component index per chart, components numbered by smallest chart.
    pub fn components(&self) -> Vec<usize> {
        let forest = self.spanning_forest();
        let mut comp = vec![usize::MAX; self.charts];
        let mut next = 0;
        for &v in &forest.order {
            comp[v] = match forest.parent[v] {
                Some(p) => comp[p],
                None => {
                    next += 1;
                    next - 1
                }
            };
        }
        comp
    }

    /// Breadth-first spanning forest rooted at the smallest chart of each component.
    pub fn spanning_forest(&self) -> SpanningForest {
        let adj = self.neighbors();
        let mut parent = vec![None; self.charts];
        let mut seen = vec![false; self.charts];
        let mut order = Vec::with_capacity(self.charts);
        for root in 0..self.charts {
            if seen[root] {
                continue;
            }
            seen[root] = true;
            let mut queue = VecDeque::from([root]);
            while let Some(v) = queue.pop_front() {
                order.push(v);
                for &w in &adj[v] {
                    if !seen[w] {
                        seen[w] = true;
                        parent[w] = Some(v);
                        queue.push_back(w);
                    }
                }
            }
        }
        let tree: Vec<bool> = self
            .edges
            .iter()
            .map(|&[a, b]| parent[b] == Some(a) || parent[a] == Some(b))
            .collect();
        SpanningForest { parent, order, tree }
    }

    /// Edges lying on at least one triangle.
    pub fn edges_on_triangles(&self) -> Vec<bool> {
        let mut on = vec![false; self.edges.len()];
        for &[a, b, c] in &self.triangles {
            for (x, y) in [(a, b), (b, c), (a, c)] {
                on[self.edge_index(x, y).unwrap()] = true;
            }
        }
        on
    }
}

#[derive(Debug, Clone)]
pub struct SpanningForest {
    /// Tree parent of each chart, `None` for roots.
    pub parent: Vec<Option<usize>>,
    /// Charts in breadth-first order; parents precede children.
    pub order: Vec<usize>,
    /// Whether each edge of the complex is a tree edge.
    pub tree: Vec<bool>,
}

/// Transition labels on the edges of a complex, valued in a structure group.
/// `labels[i]` belongs to `edges()[i] = [a, b]` read from `b` to `a`; the
/// reverse orientation is the inverse.
#[derive(Debug, Clone)]
pub struct EdgeCocycle<E> {
    pub complex: BaseComplex,
    pub labels: Vec<E>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TriangleViolation {
    pub triangle: [usize; 3],
    pub residual: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CocycleReport {
    pub violations: Vec<TriangleViolation>,
    pub max_residual: f64,
    pub valid: bool,
}

impl<E: Clone> EdgeCocycle<E> {
    pub fn new(complex: BaseComplex, labels: Vec<E>) -> Result<Self> {
        if labels.len() != complex.edges().len() {
            return Err(Error::InvalidInput(format!(
                "{} labels for {} edges",
                labels.len(),
                complex.edges().len()
            )));
        }
        Ok(EdgeCocycle { complex, labels })
    }

    pub fn constant<S: StructureGroup<Elem = E>>(complex: BaseComplex, s: &S) -> Self {
        let labels = vec![s.identity(); complex.edges().len()];
        EdgeCocycle { complex, labels }
    }

    /// The label read from chart `b` to chart `a`.
    pub fn get<S: StructureGroup<Elem = E>>(&self, s: &S, a: usize, b: usize) -> E {
        let i = self.complex.edge_index(a, b).expect("edge of the complex");
        if a < b {
            self.labels[i].clone()
        } else {
            s.inv(&self.labels[i])
        }
    }

    /// Checks `Ψ_αγ = Ψ_αβ · Ψ_βγ` on every triangle `α < β < γ`.
    pub fn validate<S: StructureGroup<Elem = E>>(&self, s: &S, tol: f64) -> CocycleReport {
        let mut violations = Vec::new();
        let mut max_residual: f64 = 0.0;
        for &t in self.complex.triangles() {
            let [a, b, c] = t;
            let lhs = self.get(s, a, c);
            let rhs = s.mul(&self.get(s, a, b), &self.get(s, b, c));
            let r = s.distance(&lhs, &rhs);
            max_residual = max_residual.max(r);
            if r > tol {
                violations.push(TriangleViolation { triangle: t, residual: r });
            }
        }
        CocycleReport { valid: violations.is_empty(), violations, max_residual }
    }

    /// `Ψ'_αβ = c_α⁻¹ · Ψ_αβ · c_β`.
    pub fn apply_coboundary<S: StructureGroup<Elem = E>>(&self, s: &S, cochain: &[E]) -> Self {
        let labels = self
            .complex
            .edges()
            .iter()
            .zip(&self.labels)
            .map(|(&[a, b], l)| s.mul(&s.mul(&s.inv(&cochain[a]), l), &cochain[b]))
            .collect();
        EdgeCocycle { complex: self.complex.clone(), labels }
    }

    pub fn map<F, T>(&self, f: F) -> EdgeCocycle<T>
    where
        F: FnMut(&E) -> T,
    {
        EdgeCocycle { complex: self.complex.clone(), labels: self.labels.iter().map(f).collect() }
    }

    pub fn distance<S: StructureGroup<Elem = E>>(&self, s: &S, other: &EdgeCocycle<E>) -> f64 {
        if self.complex != other.complex {
            return f64::INFINITY;
        }
        self.labels.iter().zip(&other.labels).map(|(x, y)| s.distance(x, y)).fold(0.0, f64::max)
    }

    /// Transport from the root of each tree to every chart along the
    /// spanning forest: `T_child = T_parent · Ψ_{parent, child}`.
    pub fn tree_transport<S: StructureGroup<Elem = E>>(&self, s: &S, forest: &SpanningForest) -> Vec<E> {
        let mut t: Vec<Option<E>> = vec![None; self.complex.charts()];
        for &v in &forest.order {
            t[v] = Some(match forest.parent[v] {
                None => s.identity(),
                Some(p) => s.mul(t[p].as_ref().unwrap(), &self.get(s, p, v)),
            });
        }
        t.into_iter().map(Option::unwrap).collect()
    }

    /// Holonomy around the fundamental cycle of each non-tree edge `[a, b]`:
    /// `T_a · Ψ_ab · T_b⁻¹`, based at the root of the component.
    pub fn holonomies<S: StructureGroup<Elem = E>>(&self, s: &S) -> Vec<E> {
        let forest = self.complex.spanning_forest();
        let t = self.tree_transport(s, &forest);
        self.complex
            .edges()
            .iter()
            .zip(&forest.tree)
            .filter(|(_, &tree)| !tree)
            .map(|(&[a, b], _)| s.mul(&s.mul(&t[a], &self.get(s, a, b)), &s.inv(&t[b])))
            .collect()
    }
}

/// A cochain `c` with `c_α⁻¹ · c1_αβ · c_β = c2_αβ` on every edge, if any.
///
/// On each connected component the value at the root determines the rest
/// along the spanning tree, so it suffices to try every root value.
pub fn discrete_cohomologous(g0: &FiniteGroup, c1: &EdgeCocycle<usize>, c2: &EdgeCocycle<usize>) -> Option<Vec<usize>> {
    if c1.complex != c2.complex {
        return None;
    }
    let complex = &c1.complex;
    let forest = complex.spanning_forest();
    let comp = complex.components();
    let mut out = vec![0; complex.charts()];
    let ncomp = comp.iter().max().map_or(0, |m| m + 1);
    for k in 0..ncomp {
        let charts: Vec<usize> = forest.order.iter().copied().filter(|&v| comp[v] == k).collect();
        let found = (0..g0.order()).find_map(|root| {
            let mut c = vec![usize::MAX; complex.charts()];
            for &v in &charts {
                c[v] = match forest.parent[v] {
                    None => root,
                    Some(p) => g0.mul(g0.mul(g0.inv(c1.get(g0, p, v)), c[p]), c2.get(g0, p, v)),
                };
            }
            let ok = complex.edges().iter().enumerate().all(|(i, &[a, b])| {
                comp[a] != k || g0.mul(g0.mul(g0.inv(c[a]), c1.labels[i]), c[b]) == c2.labels[i]
            });
            ok.then_some(c)
        })?;
        for &v in &charts {
            out[v] = found[v];
        }
    }
    Some(out)
}

/// Whether two tuples of group elements agree up to one simultaneous conjugation.
pub fn simultaneously_conjugate(g: &FiniteGroup, x: &[usize], y: &[usize]) -> bool {
    x.len() == y.len() && (0..g.order()).any(|c| x.iter().zip(y).all(|(&a, &b)| g.conj(c, a) == b))
}
