//! Tropical curves, cycle bases, Jacobians and tropicalization of nodal models.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use num::{BigInt, One, Signed, Zero};

use crate::connectivity::{colored_cyclic_equivalence, three_ec_with_classes};
use crate::error::{invalid, Error, Limits, Result};
use crate::forms::QuadraticForm;
use crate::graph::{Edge, Vertex, WeightedGraph};
use crate::matrix::{IntMatrix, RatMatrix};
use crate::rational::Rational;

/// A weighted graph with positive rational edge lengths.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TropicalCurve {
    graph: WeightedGraph,
    /// Indexed by edge position.
    lengths: Vec<Rational>,
}

/// Dual graph of a nodal curve with node widths and the extension degree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NodalModel {
    dual: WeightedGraph,
    widths: Vec<u64>,
    degree: u64,
}

/// A ℤ-basis of `H₁(Γ, ℤ)` as signed edge-coefficient vectors.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CycleBasis {
    pub tree_edges: BTreeSet<String>,
    /// `cycles[k][i]` is the coefficient of edge position `i`.
    pub cycles: Vec<Vec<i64>>,
}

impl TropicalCurve {
    pub fn new(graph: WeightedGraph, lengths: &BTreeMap<String, Rational>) -> Result<Self> {
        if !graph.is_stable() {
            return invalid("tropical curve must have a stable underlying graph");
        }
        Self::new_unstable(graph, lengths)
    }

    /// Like [`TropicalCurve::new`] without the stability requirement; used for
    /// subdivisions and other derived models.
    pub fn new_unstable(graph: WeightedGraph, lengths: &BTreeMap<String, Rational>) -> Result<Self> {
        if lengths.len() != graph.edge_count() {
            return invalid("lengths must be given for exactly the edges of the graph");
        }
        let mut ls = Vec::with_capacity(graph.edge_count());
        for e in graph.edges() {
            let l = lengths
                .get(&e.id)
                .ok_or_else(|| Error::Validation(format!("missing length for edge {:?}", e.id)))?;
            if !l.is_positive() {
                return invalid(format!("length of edge {:?} must be positive", e.id));
            }
            ls.push(l.clone());
        }
        Ok(TropicalCurve { graph, lengths: ls })
    }

    /// Lengths listed by edge position.
    pub fn from_vec(graph: WeightedGraph, lengths: Vec<Rational>) -> Result<Self> {
        let map = graph
            .edges()
            .iter()
            .map(|e| e.id.clone())
            .zip(lengths)
            .collect();
        Self::new(graph, &map)
    }

    pub fn unit(graph: WeightedGraph) -> Result<Self> {
        let n = graph.edge_count();
        Self::from_vec(graph, vec![Rational::one(); n])
    }

    pub fn graph(&self) -> &WeightedGraph {
        &self.graph
    }

    pub fn genus(&self) -> u32 {
        self.graph.genus()
    }

    pub fn length(&self, edge_id: &str) -> Option<&Rational> {
        self.graph.edge_index(edge_id).map(|i| &self.lengths[i])
    }

    pub fn length_vec(&self) -> &[Rational] {
        &self.lengths
    }

    pub fn lengths(&self) -> BTreeMap<String, Rational> {
        self.graph
            .edges()
            .iter()
            .zip(&self.lengths)
            .map(|(e, l)| (e.id.clone(), l.clone()))
            .collect()
    }
}

impl NodalModel {
    pub fn new(dual: WeightedGraph, widths: &BTreeMap<String, u64>, degree: u64) -> Result<Self> {
        if !dual.is_stable() {
            return invalid("dual graph of a nodal model must be stable");
        }
        if degree == 0 {
            return invalid("extension degree must be positive");
        }
        if widths.len() != dual.edge_count() {
            return invalid("widths must be given for exactly the edges of the dual graph");
        }
        let mut ws = Vec::with_capacity(dual.edge_count());
        for e in dual.edges() {
            match widths.get(&e.id) {
                Some(&w) if w >= 1 => ws.push(w),
                Some(_) => return invalid(format!("width of node {:?} must be positive", e.id)),
                None => return invalid(format!("missing width for node {:?}", e.id)),
            }
        }
        Ok(NodalModel {
            dual,
            widths: ws,
            degree,
        })
    }

    pub fn dual(&self) -> &WeightedGraph {
        &self.dual
    }

    pub fn degree(&self) -> u64 {
        self.degree
    }

    pub fn widths(&self) -> BTreeMap<String, u64> {
        self.dual
            .edges()
            .iter()
            .zip(&self.widths)
            .map(|(e, &w)| (e.id.clone(), w))
            .collect()
    }
}

/// Edge orientation: from the endpoint with the smaller id to the larger.
fn orientation(g: &WeightedGraph, e: &Edge) -> (usize, usize) {
    let [a, b] = e.ends;
    if g.vertices()[a].id <= g.vertices()[b].id {
        (a, b)
    } else {
        (b, a)
    }
}

fn step_sign(g: &WeightedGraph, e: &Edge, from: usize) -> i64 {
    if orientation(g, e).0 == from {
        1
    } else {
        -1
    }
}

/// Fundamental cycles of a BFS spanning tree (least vertex id first,
/// incident edges in id order), one per non-tree edge in id order.
pub fn cycle_basis(g: &WeightedGraph) -> CycleBasis {
    let n = g.vertex_count();
    let mut incident: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (i, e) in g.edges().iter().enumerate() {
        if !e.is_loop() {
            incident[e.ends[0]].push(i);
            incident[e.ends[1]].push(i);
        }
    }
    for list in &mut incident {
        list.sort_by(|&x, &y| g.edges()[x].id.cmp(&g.edges()[y].id));
    }
    let root = (0..n)
        .min_by(|&x, &y| g.vertices()[x].id.cmp(&g.vertices()[y].id))
        .expect("nonempty graph");
    let mut parent: Vec<Option<(usize, usize)>> = vec![None; n];
    let mut seen = vec![false; n];
    let mut depth = vec![0usize; n];
    seen[root] = true;
    let mut queue = VecDeque::from([root]);
    let mut tree = BTreeSet::new();
    while let Some(u) = queue.pop_front() {
        for &i in &incident[u] {
            let v = g.edges()[i].other(u);
            if !seen[v] {
                seen[v] = true;
                parent[v] = Some((i, u));
                depth[v] = depth[u] + 1;
                tree.insert(i);
                queue.push_back(v);
            }
        }
    }
    let mut non_tree: Vec<usize> = (0..g.edge_count()).filter(|i| !tree.contains(i)).collect();
    non_tree.sort_by(|&x, &y| g.edges()[x].id.cmp(&g.edges()[y].id));
    let cycles = non_tree
        .into_iter()
        .map(|i| {
            let e = &g.edges()[i];
            let mut v = vec![0i64; g.edge_count()];
            v[i] = 1;
            if e.is_loop() {
                return v;
            }
            // Close the cycle with the tree path from head back to tail.
            let (tail, head) = orientation(g, e);
            let (mut x, mut y) = (head, tail);
            let mut down = Vec::new();
            while x != y {
                if depth[x] >= depth[y] {
                    let (f, p) = parent[x].expect("non-root");
                    v[f] += step_sign(g, &g.edges()[f], x);
                    x = p;
                } else {
                    let (f, p) = parent[y].expect("non-root");
                    down.push((f, p));
                    y = p;
                }
            }
            for (f, p) in down {
                v[f] += step_sign(g, &g.edges()[f], p);
            }
            v
        })
        .collect();
    CycleBasis {
        tree_edges: tree.into_iter().map(|i| g.edges()[i].id.clone()).collect(),
        cycles,
    }
}

impl CycleBasis {
    /// Validates arbitrary integer cycle vectors as a ℤ-basis of `H₁(Γ, ℤ)`:
    /// each must be a cycle, and their coordinates on the non-tree edges of
    /// the deterministic basis must form a unimodular matrix.
    pub fn from_vectors(g: &WeightedGraph, cycles: Vec<Vec<i64>>) -> Result<Self> {
        let fundamental = cycle_basis(g);
        if cycles.len() != fundamental.cycles.len() {
            return invalid(format!("expected {} cycles", fundamental.cycles.len()));
        }
        for c in &cycles {
            if c.len() != g.edge_count() {
                return invalid("cycle vector length must equal the edge count");
            }
            let mut boundary = vec![0i64; g.vertex_count()];
            for (e, &k) in g.edges().iter().zip(c) {
                let (t, h) = orientation(g, e);
                boundary[h] += k;
                boundary[t] -= k;
            }
            if boundary.iter().any(|&b| b != 0) {
                return invalid("vector is not a cycle");
            }
        }
        let non_tree: Vec<usize> = (0..g.edge_count())
            .filter(|&i| !fundamental.tree_edges.contains(&g.edges()[i].id))
            .collect();
        let coords = IntMatrix::from_fn(cycles.len(), cycles.len(), |a, b| BigInt::from(cycles[a][non_tree[b]]));
        if !coords.is_unimodular() {
            return invalid("cycles do not form a basis of the integral cycle space");
        }
        Ok(CycleBasis {
            tree_edges: fundamental.tree_edges,
            cycles,
        })
    }

    pub fn len(&self) -> usize {
        self.cycles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cycles.is_empty()
    }
}

/// Gram matrix of the Jacobian form in the deterministic cycle basis,
/// padded by a zero block for the total weight.
pub fn jacobian(c: &TropicalCurve) -> QuadraticForm {
    jacobian_in_basis(c, &cycle_basis(&c.graph))
}

pub fn jacobian_in_basis(c: &TropicalCurve, basis: &CycleBasis) -> QuadraticForm {
    let b = basis.len();
    let g = c.genus() as usize;
    let gram = RatMatrix::from_fn(g, g, |x, y| {
        if x >= b || y >= b {
            return Rational::zero();
        }
        basis.cycles[x]
            .iter()
            .zip(&basis.cycles[y])
            .zip(&c.lengths)
            .fold(Rational::zero(), |acc, ((&p, &q), l)| acc + l * Rational::from_integer(BigInt::from(p * q)))
    });
    QuadraticForm::new(gram).expect("Jacobian Gram matrices are positive semidefinite")
}

/// Unit-length Jacobian of a weighted graph (stability not required).
pub fn graph_form(g: &WeightedGraph) -> QuadraticForm {
    let n = g.edge_count();
    let c = TropicalCurve {
        graph: g.clone(),
        lengths: vec![Rational::one(); n],
    };
    jacobian(&c)
}

/// 3-edge-connectivization; each survivor carries the length of its class.
pub fn tropical_3ec(c: &TropicalCurve) -> TropicalCurve {
    let (graph, classes) = three_ec_with_classes(&c.graph);
    let lengths = graph
        .edges()
        .iter()
        .map(|e| {
            classes[&e.id]
                .iter()
                .fold(Rational::zero(), |acc, &i| acc + &c.lengths[i])
        })
        .collect();
    TropicalCurve { graph, lengths }
}

/// Cyclic equivalence that also matches lengths edge by edge.
pub fn tropical_cyclically_equivalent(
    c1: &TropicalCurve,
    c2: &TropicalCurve,
) -> Result<Option<BTreeMap<String, String>>> {
    tropical_cyclically_equivalent_with(c1, c2, &Limits::default())
}

pub fn tropical_cyclically_equivalent_with(
    c1: &TropicalCurve,
    c2: &TropicalCurve,
    limits: &Limits,
) -> Result<Option<BTreeMap<String, String>>> {
    colored_cyclic_equivalence(
        &c1.graph,
        |i| c1.lengths[i].clone(),
        &c2.graph,
        |i| c2.lengths[i].clone(),
        limits,
    )
}

/// Length of each edge is the node width divided by the extension degree.
pub fn tropicalize(m: &NodalModel) -> TropicalCurve {
    let d = Rational::from_integer(BigInt::from(m.degree));
    let lengths = m
        .widths
        .iter()
        .map(|&w| Rational::from_integer(BigInt::from(w)) / &d)
        .collect();
    TropicalCurve {
        graph: m.dual.clone(),
        lengths,
    }
}

/// Replaces edge `e` by a chain through fresh weight-0 vertices with the given
/// segment lengths. The result is generally not stable.
pub fn subdivide_edge(c: &TropicalCurve, e: &str, parts: &[Rational]) -> Result<TropicalCurve> {
    Ok(subdivide_in_basis(c, &cycle_basis(&c.graph), e, parts)?.0)
}

/// Subdivision together with the image of `basis` under the canonical
/// identification of first homology (each edge ↦ the sum of its segments).
pub fn subdivide_in_basis(
    c: &TropicalCurve,
    basis: &CycleBasis,
    e: &str,
    parts: &[Rational],
) -> Result<(TropicalCurve, CycleBasis)> {
    let idx = c
        .graph
        .edge_index(e)
        .ok_or_else(|| Error::Validation(format!("unknown edge id {e:?}")))?;
    if parts.is_empty() || parts.iter().any(|p| !p.is_positive()) {
        return invalid("subdivision parts must be positive");
    }
    let total = parts.iter().fold(Rational::zero(), |a, p| a + p);
    if total != c.lengths[idx] {
        return invalid(format!("parts sum to {total} but edge {e:?} has length {}", c.lengths[idx]));
    }
    let g = &c.graph;
    let (tail, head) = orientation(g, &g.edges()[idx]);
    let fresh = |stem: String| {
        let mut id = stem;
        while g.vertex_index(&id).is_some() || g.edge_index(&id).is_some() {
            id.push('\'');
        }
        id
    };
    let mut vertices: Vec<Vertex> = g.vertices().to_vec();
    let mut chain = vec![tail];
    for k in 1..parts.len() {
        vertices.push(Vertex {
            id: fresh(format!("{e}.v{k}")),
            weight: 0,
        });
        chain.push(vertices.len() - 1);
    }
    chain.push(head);
    let mut edges: Vec<Edge> = g.edges().to_vec();
    let mut lengths = c.lengths.clone();
    let mut segment_pos = vec![idx];
    edges[idx].ends = [chain[0], chain[1]];
    lengths[idx] = parts[0].clone();
    for k in 1..parts.len() {
        edges.push(Edge {
            id: fresh(format!("{e}.e{k}")),
            ends: [chain[k], chain[k + 1]],
        });
        lengths.push(parts[k].clone());
        segment_pos.push(edges.len() - 1);
    }
    let graph = WeightedGraph::new(
        vertices.iter().map(|v| (v.id.clone(), v.weight)).collect(),
        edges
            .iter()
            .map(|x| (x.id.clone(), vertices[x.ends[0]].id.clone(), vertices[x.ends[1]].id.clone()))
            .collect(),
    )?;
    let signs: Vec<i64> = (0..parts.len())
        .map(|k| step_sign(&graph, &graph.edges()[segment_pos[k]], chain[k]))
        .collect();
    let cycles = basis
        .cycles
        .iter()
        .map(|v| {
            let mut w = v.clone();
            w.resize(graph.edge_count(), 0);
            for (k, &pos) in segment_pos.iter().enumerate() {
                w[pos] = v[idx] * signs[k];
            }
            w
        })
        .collect();
    let new_basis = CycleBasis::from_vectors(&graph, cycles)?;
    Ok((TropicalCurve { graph, lengths }, new_basis))
}

/// The right-hand side of the Picard–Lefschetz identity: subdivide every
/// edge into `width` unit segments, take the unit-length Gram matrix in the
/// transported basis and divide by the extension degree.
pub fn width_subdivided_form(m: &NodalModel) -> Result<QuadraticForm> {
    let mut curve = TropicalCurve {
        graph: m.dual.clone(),
        lengths: m.widths.iter().map(|&w| Rational::from_integer(BigInt::from(w))).collect(),
    };
    let mut basis = cycle_basis(&curve.graph);
    let ids: Vec<String> = m.dual.edges().iter().map(|e| e.id.clone()).collect();
    for (id, &w) in ids.iter().zip(&m.widths) {
        let parts = vec![Rational::one(); w as usize];
        let (c, b) = subdivide_in_basis(&curve, &basis, id, &parts)?;
        curve = c;
        basis = b;
    }
    let d = Rational::from_integer(BigInt::from(m.degree));
    Ok(jacobian_in_basis(&curve, &basis).scale(&(Rational::one() / d)))
}
