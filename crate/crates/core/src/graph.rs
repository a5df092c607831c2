//! Weighted multigraphs: genus, stability, contraction, isomorphism,
//! automorphisms and exhaustive enumeration of stable graphs.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};

use crate::canon::{self, CanonCode, Canonical, ColoredGraph};
use crate::error::{invalid, Error, Limits, Result};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Vertex {
    pub id: String,
    pub weight: u32,
}

/// An edge between two vertex positions; `ends[0] == ends[1]` is a loop.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Edge {
    pub id: String,
    pub ends: [usize; 2],
}

impl Edge {
    pub fn is_loop(&self) -> bool {
        self.ends[0] == self.ends[1]
    }

    pub fn other(&self, v: usize) -> usize {
        if self.ends[0] == v {
            self.ends[1]
        } else {
            self.ends[0]
        }
    }
}

/// Connected multigraph with loops and nonnegative vertex weights.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct WeightedGraph {
    vertices: Vec<Vertex>,
    edges: Vec<Edge>,
}

/// A pair of bijections `(σ, ψ)` on vertex and edge ids.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct GraphMorphism {
    pub vertex_map: BTreeMap<String, String>,
    pub edge_map: BTreeMap<String, String>,
}

pub type GraphCode = CanonCode<u64>;

impl WeightedGraph {
    /// Validating constructor. Edges are `(id, end, end)` over vertex ids.
    pub fn new(vertices: Vec<(String, u32)>, edges: Vec<(String, String, String)>) -> Result<Self> {
        let mut pos = HashMap::new();
        for (i, (id, _)) in vertices.iter().enumerate() {
            if pos.insert(id.clone(), i).is_some() {
                return invalid(format!("duplicate vertex id {id:?}"));
            }
        }
        let mut seen = HashSet::new();
        let mut es = Vec::with_capacity(edges.len());
        for (id, a, b) in edges {
            if !seen.insert(id.clone()) {
                return invalid(format!("duplicate edge id {id:?}"));
            }
            let lookup = |v: &String| {
                pos.get(v).copied().ok_or_else(|| {
                    Error::Validation(format!("edge {id:?} references unknown vertex {v:?}"))
                })
            };
            es.push(Edge {
                ends: [lookup(&a)?, lookup(&b)?],
                id,
            });
        }
        let g = WeightedGraph {
            vertices: vertices
                .into_iter()
                .map(|(id, weight)| Vertex { id, weight })
                .collect(),
            edges: es,
        };
        if g.vertices.is_empty() {
            return invalid("a weighted graph needs at least one vertex");
        }
        if !g.is_connected() {
            return invalid("graph is not connected");
        }
        Ok(g)
    }

    /// Ids `v0, v1, …` and `e0, e1, …`; panics if disconnected.
    pub fn from_indices(weights: &[u32], edges: &[(usize, usize)]) -> Self {
        Self::try_from_indices(weights, edges).expect("valid graph")
    }

    pub fn try_from_indices(weights: &[u32], edges: &[(usize, usize)]) -> Result<Self> {
        let vs = weights
            .iter()
            .enumerate()
            .map(|(i, &w)| (format!("v{i}"), w))
            .collect();
        let es = edges
            .iter()
            .enumerate()
            .map(|(i, &(a, b))| (format!("e{i}"), format!("v{a}"), format!("v{b}")))
            .collect();
        Self::new(vs, es)
    }

    /// Same vertices and edge ids with new endpoints; caller keeps it connected.
    pub(crate) fn with_edge_ends(&self, ends: &[[usize; 2]]) -> Self {
        let edges = self
            .edges
            .iter()
            .zip(ends)
            .map(|(e, &ends)| Edge {
                id: e.id.clone(),
                ends,
            })
            .collect();
        WeightedGraph {
            vertices: self.vertices.clone(),
            edges,
        }
    }

    /// Subgraph induced on vertex positions `keep` with the edges `edge_positions`
    /// (whose endpoints must lie in `keep`).
    pub(crate) fn sub(&self, keep: &[usize], edge_positions: &[usize]) -> Self {
        let index: HashMap<usize, usize> = keep.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        WeightedGraph {
            vertices: keep.iter().map(|&v| self.vertices[v].clone()).collect(),
            edges: edge_positions
                .iter()
                .map(|&i| Edge {
                    id: self.edges[i].id.clone(),
                    ends: [index[&self.edges[i].ends[0]], index[&self.edges[i].ends[1]]],
                })
                .collect(),
        }
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn vertex_index(&self, id: &str) -> Option<usize> {
        self.vertices.iter().position(|v| v.id == id)
    }

    pub fn edge_index(&self, id: &str) -> Option<usize> {
        self.edges.iter().position(|e| e.id == id)
    }

    pub fn edge_by_id(&self, id: &str) -> Result<&Edge> {
        self.edges
            .iter()
            .find(|e| e.id == id)
            .ok_or_else(|| Error::Validation(format!("unknown edge id {id:?}")))
    }

    pub fn total_weight(&self) -> u32 {
        self.vertices.iter().map(|v| v.weight).sum()
    }

    /// First Betti number `|E| − |V| + 1`.
    pub fn betti(&self) -> usize {
        self.edges.len() + 1 - self.vertices.len()
    }

    pub fn genus(&self) -> u32 {
        self.betti() as u32 + self.total_weight()
    }

    /// Valence with loops counted twice.
    pub fn valence(&self, v: usize) -> usize {
        self.edges
            .iter()
            .map(|e| e.ends.iter().filter(|&&x| x == v).count())
            .sum()
    }

    pub fn is_stable(&self) -> bool {
        (0..self.vertices.len()).all(|v| self.vertices[v].weight > 0 || self.valence(v) >= 3)
    }

    pub fn is_connected(&self) -> bool {
        self.is_connected_without(&[], &[])
    }

    /// Connectivity after deleting the given edge and vertex positions.
    /// The empty graph counts as connected.
    pub fn is_connected_without(&self, edges: &[usize], vertices: &[usize]) -> bool {
        let n = self.vertices.len();
        let alive: Vec<bool> = (0..n).map(|v| !vertices.contains(&v)).collect();
        let Some(start) = (0..n).find(|&v| alive[v]) else {
            return true;
        };
        let mut dsu = Dsu::new(n);
        for (i, e) in self.edges.iter().enumerate() {
            if edges.contains(&i) || !alive[e.ends[0]] || !alive[e.ends[1]] {
                continue;
            }
            dsu.union(e.ends[0], e.ends[1]);
        }
        let root = dsu.find(start);
        (0..n).filter(|&v| alive[v]).all(|v| dsu.find(v) == root)
    }

    /// Connected components after deleting the given edges, as sorted vertex lists.
    pub fn components_without(&self, edges: &[usize]) -> Vec<Vec<usize>> {
        let n = self.vertices.len();
        let mut dsu = Dsu::new(n);
        for (i, e) in self.edges.iter().enumerate() {
            if !edges.contains(&i) {
                dsu.union(e.ends[0], e.ends[1]);
            }
        }
        let mut comps: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for v in 0..n {
            comps.entry(dsu.find(v)).or_default().push(v);
        }
        let mut out: Vec<Vec<usize>> = comps.into_values().collect();
        out.sort();
        out
    }

    /// Contracts one edge. Non-loop: endpoints merge (keeping the smaller id),
    /// weights add. Loop: removed, its vertex gains weight 1.
    pub fn contract_edge(&self, edge_id: &str) -> Result<WeightedGraph> {
        let idx = self
            .edge_index(edge_id)
            .ok_or_else(|| Error::Validation(format!("unknown edge id {edge_id:?}")))?;
        Ok(self.contract_positions(&[idx]))
    }

    /// Contracts a set of edges (order-independent).
    pub fn contract_edges(&self, edge_ids: &[&str]) -> Result<WeightedGraph> {
        let mut idx = Vec::with_capacity(edge_ids.len());
        for id in edge_ids {
            idx.push(
                self.edge_index(id)
                    .ok_or_else(|| Error::Validation(format!("unknown edge id {id:?}")))?,
            );
        }
        Ok(self.contract_positions(&idx))
    }

    pub(crate) fn contract_positions(&self, positions: &[usize]) -> WeightedGraph {
        let n = self.vertices.len();
        let mut dsu = Dsu::new(n);
        let mut extra = vec![0u32; n];
        let mut sorted = positions.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        for &i in &sorted {
            let [a, b] = self.edges[i].ends;
            let (ra, rb) = (dsu.find(a), dsu.find(b));
            if ra == rb {
                extra[ra] += 1;
            } else {
                let r = dsu.union(ra, rb);
                let moved = extra[ra] + extra[rb];
                extra[ra] = 0;
                extra[rb] = 0;
                extra[r] = moved;
            }
        }
        // Representative of each class: the member with the smallest id.
        let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for v in 0..n {
            groups.entry(dsu.find(v)).or_default().push(v);
        }
        let mut reps: Vec<(usize, Vertex)> = groups
            .iter()
            .map(|(&root, members)| {
                let keep = *members
                    .iter()
                    .min_by(|&&x, &&y| self.vertices[x].id.cmp(&self.vertices[y].id))
                    .expect("nonempty class");
                let weight = members.iter().map(|&m| self.vertices[m].weight).sum::<u32>()
                    + extra[root];
                (
                    keep,
                    Vertex {
                        id: self.vertices[keep].id.clone(),
                        weight,
                    },
                )
            })
            .collect();
        reps.sort_by_key(|(keep, _)| *keep);
        let new_pos: HashMap<usize, usize> = reps
            .iter()
            .enumerate()
            .flat_map(|(i, (keep, _))| {
                groups[&dsu.find(*keep)]
                    .iter()
                    .map(move |&m| (m, i))
                    .collect::<Vec<_>>()
            })
            .collect();
        let edges = self
            .edges
            .iter()
            .enumerate()
            .filter(|(i, _)| sorted.binary_search(i).is_err())
            .map(|(_, e)| Edge {
                id: e.id.clone(),
                ends: [new_pos[&e.ends[0]], new_pos[&e.ends[1]]],
            })
            .collect();
        WeightedGraph {
            vertices: reps.into_iter().map(|(_, v)| v).collect(),
            edges,
        }
    }

    /// Colored multigraph view; vertex colors come from `color`.
    pub fn colored<C: Ord + Clone>(&self, color: impl Fn(usize) -> C) -> ColoredGraph<C> {
        let mut cg = ColoredGraph::new((0..self.vertices.len()).map(color).collect());
        for e in &self.edges {
            cg.add_edge(e.ends[0], e.ends[1], 1);
        }
        cg
    }

    fn weight_canonical(&self) -> Canonical<u64> {
        self.colored(|v| self.vertices[v].weight as u64).canonical()
    }

    /// Isomorphism-invariant code of the weighted multigraph.
    pub fn canonical_code(&self) -> GraphCode {
        self.weight_canonical().code
    }

    /// Copy with vertices in canonical order and ids `v0…`, edges sorted by
    /// endpoints with ids `e0…`. Isomorphic inputs give identical outputs.
    pub fn canonical_relabel(&self) -> WeightedGraph {
        let c = self.weight_canonical();
        let mut pos = vec![0; self.vertices.len()];
        for (k, &v) in c.order.iter().enumerate() {
            pos[v] = k;
        }
        let mut ends: Vec<[usize; 2]> = self
            .edges
            .iter()
            .map(|e| {
                let (a, b) = (pos[e.ends[0]], pos[e.ends[1]]);
                [a.min(b), a.max(b)]
            })
            .collect();
        ends.sort();
        let vertices = c
            .order
            .iter()
            .enumerate()
            .map(|(k, &v)| Vertex {
                id: format!("v{k}"),
                weight: self.vertices[v].weight,
            })
            .collect();
        let edges = ends
            .into_iter()
            .enumerate()
            .map(|(i, ends)| Edge {
                id: format!("e{i}"),
                ends,
            })
            .collect();
        WeightedGraph { vertices, edges }
    }

    /// Edge positions grouped by unordered endpoint pair, each group sorted by id.
    fn parallel_classes(&self) -> BTreeMap<(usize, usize), Vec<usize>> {
        let mut m: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
        for (i, e) in self.edges.iter().enumerate() {
            let (a, b) = (e.ends[0].min(e.ends[1]), e.ends[0].max(e.ends[1]));
            m.entry((a, b)).or_default().push(i);
        }
        for v in m.values_mut() {
            v.sort_by(|&x, &y| self.edges[x].id.cmp(&self.edges[y].id));
        }
        m
    }

    fn morphism_from_vertex_map(&self, other: &WeightedGraph, p: &[usize]) -> GraphMorphism {
        let theirs = other.parallel_classes();
        let mut edge_map = BTreeMap::new();
        for ((a, b), group) in self.parallel_classes() {
            let (x, y) = (p[a].min(p[b]), p[a].max(p[b]));
            for (&mine, &image) in group.iter().zip(&theirs[&(x, y)]) {
                edge_map.insert(self.edges[mine].id.clone(), other.edges[image].id.clone());
            }
        }
        GraphMorphism {
            vertex_map: (0..p.len())
                .map(|v| (self.vertices[v].id.clone(), other.vertices[p[v]].id.clone()))
                .collect(),
            edge_map,
        }
    }

    /// A weight-preserving multigraph isomorphism `self → other`, if any.
    pub fn isomorphic(&self, other: &WeightedGraph) -> Option<GraphMorphism> {
        let p = canon::isomorphism(&self.weight_canonical(), &other.weight_canonical())?;
        Some(self.morphism_from_vertex_map(other, &p))
    }

    /// All `(σ, ψ)`: vertex automorphisms combined with every permutation of
    /// parallel edges (loops at one vertex included). Loop flips are not tracked.
    pub fn automorphism_group(&self) -> Vec<GraphMorphism> {
        let classes = self.parallel_classes();
        let mut out = Vec::new();
        for p in self.weight_canonical().automorphisms {
            let base = self.morphism_from_vertex_map(self, &p);
            let mut maps = vec![base.edge_map.clone()];
            for group in classes.values().filter(|g| g.len() > 1) {
                let images: Vec<String> = group.iter().map(|&i| base.edge_map[&self.edges[i].id].clone()).collect();
                let mut next = Vec::new();
                for m in &maps {
                    for perm in permutations(images.len()) {
                        let mut m2 = m.clone();
                        for (k, &i) in group.iter().enumerate() {
                            m2.insert(self.edges[i].id.clone(), images[perm[k]].clone());
                        }
                        next.push(m2);
                    }
                }
                maps = next;
            }
            for edge_map in maps {
                out.push(GraphMorphism {
                    vertex_map: base.vertex_map.clone(),
                    edge_map,
                });
            }
        }
        out.sort();
        out
    }

    /// True iff some set of edges of `self` contracts to a graph isomorphic to `other`.
    pub fn dominates(&self, other: &WeightedGraph) -> bool {
        if self.genus() != other.genus() || self.edges.len() < other.edges.len() {
            return false;
        }
        let target = other.canonical_code();
        let k = self.edges.len() - other.edges.len();
        subsets_of_size(self.edges.len(), k)
            .into_iter()
            .any(|s| self.contract_positions(&s).canonical_code() == target)
    }

    /// Codes of every graph obtainable by contracting a subset of edges.
    pub fn contraction_codes(&self) -> HashSet<GraphCode> {
        let m = self.edges.len();
        (0u64..1 << m)
            .map(|mask| {
                let s: Vec<usize> = (0..m).filter(|&i| mask >> i & 1 == 1).collect();
                self.contract_positions(&s).canonical_code()
            })
            .collect()
    }
}

impl GraphMorphism {
    /// Checks that the maps are bijections respecting weights and incidences.
    pub fn verify(&self, from: &WeightedGraph, to: &WeightedGraph) -> bool {
        if from.vertex_count() != to.vertex_count() || from.edge_count() != to.edge_count() {
            return false;
        }
        let images: BTreeSet<&String> = self.vertex_map.values().collect();
        let eimages: BTreeSet<&String> = self.edge_map.values().collect();
        if images.len() != to.vertex_count() || eimages.len() != to.edge_count() {
            return false;
        }
        for v in from.vertices() {
            let Some(w) = self.vertex_map.get(&v.id).and_then(|id| to.vertex_index(id)) else {
                return false;
            };
            if to.vertices()[w].weight != v.weight {
                return false;
            }
        }
        for e in from.edges() {
            let Some(f) = self.edge_map.get(&e.id).and_then(|id| to.edge_index(id)) else {
                return false;
            };
            let map = |x: usize| to.vertex_index(&self.vertex_map[&from.vertices()[x].id]).unwrap();
            let mut a = [map(e.ends[0]), map(e.ends[1])];
            let mut b = to.edges()[f].ends;
            a.sort_unstable();
            b.sort_unstable();
            if a != b {
                return false;
            }
        }
        true
    }
}

/// One representative per isomorphism class of stable weighted graphs of
/// the given genus, in canonical form, sorted by decreasing edge count.
///
/// Stability forces `|V| ≤ 2g − 2` and `|E| ≤ 3g − 3`: every weight-0
/// vertex has valence ≥ 3 and every weighted vertex contributes to the
/// genus directly, so `2|E| ≥ 3·#{w = 0}` and `|E| − |V| + 1 + |w| = g`.
pub fn enumerate_stable_weighted_graphs(genus: u32) -> Result<Vec<WeightedGraph>> {
    enumerate_stable_weighted_graphs_with(genus, &Limits::default())
}

pub fn enumerate_stable_weighted_graphs_with(genus: u32, limits: &Limits) -> Result<Vec<WeightedGraph>> {
    if genus < 2 {
        return invalid(format!("genus must be at least 2, got {genus}"));
    }
    if genus > limits.genus {
        return Err(Error::Limit(format!(
            "enumeration capped at genus {}, requested {genus}",
            limits.genus
        )));
    }
    let g = genus as usize;
    let mut found: HashMap<GraphCode, WeightedGraph> = HashMap::new();
    for n in 1..=2 * g - 2 {
        for weights in nonincreasing_vectors(n, g) {
            let total: usize = weights.iter().sum();
            let m = g - total + n - 1;
            if m > 3 * g - 3 {
                continue;
            }
            let mut gen = Augment::new(&weights, m);
            gen.run(0, 0, m, &mut |mult| {
                let mut edges = Vec::with_capacity(m);
                for (&(i, j), &k) in gen_pairs(n).iter().zip(mult) {
                    for _ in 0..k {
                        edges.push((i, j));
                    }
                }
                let w32: Vec<u32> = weights.iter().map(|&w| w as u32).collect();
                if let Ok(graph) = WeightedGraph::try_from_indices(&w32, &edges) {
                    if graph.is_stable() {
                        found.entry(graph.canonical_code()).or_insert(graph);
                    }
                }
            });
        }
    }
    let mut out: Vec<(GraphCode, WeightedGraph)> = found
        .into_iter()
        .map(|(code, g)| (code, g.canonical_relabel()))
        .collect();
    out.sort_by(|(ca, a), (cb, b)| {
        (b.edge_count(), b.vertex_count())
            .cmp(&(a.edge_count(), a.vertex_count()))
            .then_with(|| ca.cmp(cb))
    });
    Ok(out.into_iter().map(|(_, g)| g).collect())
}

fn gen_pairs(n: usize) -> Vec<(usize, usize)> {
    let mut v = Vec::new();
    for i in 0..n {
        for j in i..n {
            v.push((i, j));
        }
    }
    v
}

/// Row-by-row multiplicity assignment over vertex pairs with stability and
/// symmetry-breaking pruning (valence nonincreasing within equal weights).
struct Augment<'a> {
    weights: &'a [usize],
    pairs: Vec<(usize, usize)>,
    mult: Vec<usize>,
    valence: Vec<usize>,
    total: usize,
}

impl<'a> Augment<'a> {
    fn new(weights: &'a [usize], total: usize) -> Self {
        let n = weights.len();
        Augment {
            weights,
            pairs: gen_pairs(n),
            mult: vec![0; n * (n + 1) / 2],
            valence: vec![0; n],
            total,
        }
    }

    fn row_complete(&self, i: usize) -> bool {
        let n = self.weights.len();
        let v = self.valence[i];
        if self.weights[i] == 0 && v < 3 {
            return false;
        }
        if n > 1 && v == 0 {
            return false;
        }
        if i > 0 && self.weights[i] == self.weights[i - 1] && v > self.valence[i - 1] {
            return false;
        }
        true
    }

    fn run(&mut self, k: usize, used: usize, m: usize, emit: &mut dyn FnMut(&[usize])) {
        if k == self.pairs.len() {
            if used == m {
                emit(&self.mult);
            }
            return;
        }
        let (i, j) = self.pairs[k];
        let last_in_row = j + 1 == self.weights.len();
        let remaining = m - used;
        for c in 0..=remaining {
            self.mult[k] = c;
            let add = if i == j { 2 * c } else { c };
            self.valence[i] += add;
            if i != j {
                self.valence[j] += c;
            }
            let ok = !last_in_row || self.row_complete(i);
            if ok {
                self.run(k + 1, used + c, m, emit);
            }
            self.valence[i] -= add;
            if i != j {
                self.valence[j] -= c;
            }
        }
        self.mult[k] = 0;
        let _ = self.total;
    }
}

/// Nonincreasing vectors of length `n` with entries summing to at most `max`.
fn nonincreasing_vectors(n: usize, max: usize) -> Vec<Vec<usize>> {
    fn rec(n: usize, cap: usize, budget: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == n {
            out.push(cur.clone());
            return;
        }
        for w in 0..=cap.min(budget) {
            cur.push(w);
            rec(n, w, budget - w, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, max, max, &mut Vec::new(), &mut out);
    out
}

pub(crate) fn subsets_of_size(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::new(), &mut out);
    out
}

pub(crate) fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn rec(cur: &mut Vec<usize>, used: &mut Vec<bool>, out: &mut Vec<Vec<usize>>) {
        let n = used.len();
        if cur.len() == n {
            out.push(cur.clone());
            return;
        }
        for i in 0..n {
            if !used[i] {
                used[i] = true;
                cur.push(i);
                rec(cur, used, out);
                cur.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut vec![false; n], &mut out);
    out
}

pub(crate) struct Dsu {
    parent: Vec<usize>,
}

impl Dsu {
    pub(crate) fn new(n: usize) -> Self {
        Dsu {
            parent: (0..n).collect(),
        }
    }

    pub(crate) fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.parent[r] != r {
            r = self.parent[r];
        }
        let mut c = x;
        while self.parent[c] != r {
            let next = self.parent[c];
            self.parent[c] = r;
            c = next;
        }
        r
    }

    /// Returns the new root.
    pub(crate) fn union(&mut self, a: usize, b: usize) -> usize {
        let (ra, rb) = (self.find(a), self.find(b));
        let (lo, hi) = (ra.min(rb), ra.max(rb));
        self.parent[hi] = lo;
        lo
    }
}
