//! Bridges, coparallel classes, 3-connectivity, the 3-edge-connectivization,
//! twists at separating pairs and cyclic (cycle-matroid) equivalence.

use std::collections::{BTreeMap, BTreeSet};

use crate::canon::{self, Canonical, ColoredGraph};
use crate::error::{invalid, Error, Limits, Result};
use crate::graph::{subsets_of_size, Dsu, WeightedGraph};

/// Bridges plus the coparallel classes of the remaining edges (edge ids).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoparallelPartition {
    pub bridges: BTreeSet<String>,
    /// Sorted by least member.
    pub classes: Vec<BTreeSet<String>>,
}

/// A separating pair of edges together with the two sides of the cut.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TwistSpec {
    pub pair: [String; 2],
    /// Vertex ids of the side containing the first endpoint slot `p`.
    pub side1: BTreeSet<String>,
    /// Vertex ids of the other side, whose endpoints `q¹, q²` get exchanged.
    pub side2: BTreeSet<String>,
}

pub fn bridges(g: &WeightedGraph) -> BTreeSet<String> {
    bridge_positions(g)
        .into_iter()
        .map(|i| g.edges()[i].id.clone())
        .collect()
}

pub(crate) fn bridge_positions(g: &WeightedGraph) -> Vec<usize> {
    (0..g.edge_count())
        .filter(|&i| !g.edges()[i].is_loop() && !g.is_connected_without(&[i], &[]))
        .collect()
}

/// Coparallel classes as edge positions, each sorted by edge id.
pub(crate) fn coparallel_positions(g: &WeightedGraph) -> (Vec<usize>, Vec<Vec<usize>>) {
    let bridges = bridge_positions(g);
    let m = g.edge_count();
    let candidates: Vec<usize> = (0..m).filter(|i| !bridges.contains(i)).collect();
    let cut = |a: usize, b: usize| {
        !g.edges()[a].is_loop() && !g.edges()[b].is_loop() && !g.is_connected_without(&[a, b], &[])
    };
    let mut dsu = Dsu::new(m);
    for (k, &a) in candidates.iter().enumerate() {
        for &b in &candidates[k + 1..] {
            if cut(a, b) {
                dsu.union(a, b);
            }
        }
    }
    let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for &i in &candidates {
        groups.entry(dsu.find(i)).or_default().push(i);
    }
    let mut classes: Vec<Vec<usize>> = groups.into_values().collect();
    for class in &mut classes {
        class.sort_by(|&x, &y| g.edges()[x].id.cmp(&g.edges()[y].id));
        for (k, &a) in class.iter().enumerate() {
            for &b in &class[k + 1..] {
                assert!(cut(a, b), "coparallel relation failed transitivity");
            }
        }
    }
    classes.sort_by(|x, y| g.edges()[x[0]].id.cmp(&g.edges()[y[0]].id));
    (bridges, classes)
}

pub fn coparallel_classes(g: &WeightedGraph) -> CoparallelPartition {
    let (bridges, classes) = coparallel_positions(g);
    let id = |i: usize| g.edges()[i].id.clone();
    CoparallelPartition {
        bridges: bridges.into_iter().map(id).collect(),
        classes: classes
            .into_iter()
            .map(|c| c.into_iter().map(id).collect())
            .collect(),
    }
}

pub fn is_3_edge_connected(g: &WeightedGraph) -> bool {
    let (bridges, classes) = coparallel_positions(g);
    bridges.is_empty() && classes.iter().all(|c| c.len() == 1)
}

/// No 1- or 2-separation in Tutte's sense (an edge bipartition with both
/// sides of size ≥ k meeting in ≤ k vertices), and connected after deleting
/// any at most two vertices.
pub fn is_3_vertex_connected(g: &WeightedGraph) -> bool {
    let n = g.vertex_count();
    for k in 1..=2usize.min(n) {
        for s in subsets_of_size(n, k) {
            if !g.is_connected_without(&[], &s) {
                return false;
            }
        }
    }
    let m = g.edge_count();
    if m >= 64 {
        return false;
    }
    let touched = |mask: u64, side: bool| {
        let mut vs = BTreeSet::new();
        for (i, e) in g.edges().iter().enumerate() {
            if (mask >> i & 1 == 1) == side {
                vs.extend(e.ends);
            }
        }
        vs
    };
    for mask in 1..(1u64 << m) - 1 {
        // Each bipartition once: edge 0 on the first side.
        if mask & 1 == 0 {
            continue;
        }
        let a = mask.count_ones() as usize;
        let b = m - a;
        let shared = touched(mask, true).intersection(&touched(mask, false)).count();
        for k in 1..=2 {
            if a >= k && b >= k && shared <= k {
                return false;
            }
        }
    }
    true
}

/// Γ³ with, for each surviving edge, the edge positions of its class in `g`.
pub(crate) fn three_ec_with_classes(g: &WeightedGraph) -> (WeightedGraph, BTreeMap<String, Vec<usize>>) {
    let (bridges, classes) = coparallel_positions(g);
    let mut contract = bridges;
    let mut survivors = BTreeMap::new();
    for class in classes {
        contract.extend(class[1..].iter().copied());
        survivors.insert(g.edges()[class[0]].id.clone(), class);
    }
    (g.contract_positions(&contract), survivors)
}

/// Contracts every bridge and all but the least-id edge of each coparallel class.
pub fn three_edge_connectivization(g: &WeightedGraph) -> WeightedGraph {
    three_ec_with_classes(g).0
}

impl TwistSpec {
    /// Validates that `e1, e2` form a 2-edge-cut and records the two sides.
    pub fn new(g: &WeightedGraph, e1: &str, e2: &str) -> Result<Self> {
        let a = g
            .edge_index(e1)
            .ok_or_else(|| Error::Validation(format!("unknown edge id {e1:?}")))?;
        let b = g
            .edge_index(e2)
            .ok_or_else(|| Error::Validation(format!("unknown edge id {e2:?}")))?;
        if a == b {
            return invalid("a twist needs two distinct edges");
        }
        let comps = g.components_without(&[a, b]);
        let crosses = |i: usize| {
            let [x, y] = g.edges()[i].ends;
            comps.len() == 2 && comps[0].contains(&x) != comps[0].contains(&y)
        };
        if comps.len() != 2 || !crosses(a) || !crosses(b) {
            return invalid(format!("edges {e1:?} and {e2:?} do not form a separating pair"));
        }
        let ids = |c: &Vec<usize>| c.iter().map(|&v| g.vertices()[v].id.clone()).collect();
        Ok(TwistSpec {
            pair: [e1.to_string(), e2.to_string()],
            side1: ids(&comps[0]),
            side2: ids(&comps[1]),
        })
    }

    fn validate(&self, g: &WeightedGraph) -> Result<()> {
        let fresh = TwistSpec::new(g, &self.pair[0], &self.pair[1])?;
        let same = (fresh.side1 == self.side1 && fresh.side2 == self.side2)
            || (fresh.side1 == self.side2 && fresh.side2 == self.side1);
        if !same {
            return invalid("twist sides do not match the components of the cut");
        }
        Ok(())
    }
}

/// Every separating pair (within each coparallel class), in id order.
pub fn twist_specs(g: &WeightedGraph) -> Vec<TwistSpec> {
    let (_, classes) = coparallel_positions(g);
    let mut out = Vec::new();
    for class in classes {
        for (k, &a) in class.iter().enumerate() {
            for &b in &class[k + 1..] {
                out.push(
                    TwistSpec::new(g, &g.edges()[a].id, &g.edges()[b].id)
                        .expect("coparallel edges form a separating pair"),
                );
            }
        }
    }
    out
}

/// Regluing across the cut: with `e1 = p¹q¹`, `e2 = p²q²` (`p` on side 1),
/// the result has `e1 = p¹q²` and `e2 = p²q¹`. Ids are preserved.
pub fn twist(g: &WeightedGraph, spec: &TwistSpec) -> Result<WeightedGraph> {
    spec.validate(g)?;
    let a = g.edge_index(&spec.pair[0]).expect("validated");
    let b = g.edge_index(&spec.pair[1]).expect("validated");
    let on_side1 = |v: usize| spec.side1.contains(&g.vertices()[v].id);
    let split = |i: usize| {
        let [x, y] = g.edges()[i].ends;
        if on_side1(x) {
            (x, y)
        } else {
            (y, x)
        }
    };
    let (p1, q1) = split(a);
    let (p2, q2) = split(b);
    let mut ends: Vec<[usize; 2]> = g.edges().iter().map(|e| e.ends).collect();
    ends[a] = [p1, q2];
    ends[b] = [p2, q1];
    Ok(g.with_edge_ends(&ends))
}

/// All circuits of the cycle matroid, each a sorted list of edge positions.
///
/// Each circuit is found once, from its least edge, as a simple path between
/// that edge's endpoints through larger edges.
pub fn circuits(g: &WeightedGraph, limits: &Limits) -> Result<Vec<Vec<usize>>> {
    let n = g.vertex_count();
    let mut incident: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
    for (i, e) in g.edges().iter().enumerate() {
        if !e.is_loop() {
            incident[e.ends[0]].push((i, e.ends[1]));
            incident[e.ends[1]].push((i, e.ends[0]));
        }
    }
    let mut out = Vec::new();
    for (i, e) in g.edges().iter().enumerate() {
        if e.is_loop() {
            out.push(vec![i]);
            continue;
        }
        let mut visited = vec![false; n];
        visited[e.ends[0]] = true;
        let mut path = vec![i];
        paths(&incident, e.ends[0], e.ends[1], i, &mut visited, &mut path, &mut out, limits.circuits)?;
        if out.len() > limits.circuits {
            return Err(Error::Limit(format!("more than {} circuits", limits.circuits)));
        }
    }
    for c in &mut out {
        c.sort_unstable();
    }
    out.sort();
    Ok(out)
}

#[allow(clippy::too_many_arguments)]
fn paths(
    incident: &[Vec<(usize, usize)>],
    at: usize,
    target: usize,
    min_edge: usize,
    visited: &mut [bool],
    path: &mut Vec<usize>,
    out: &mut Vec<Vec<usize>>,
    cap: usize,
) -> Result<()> {
    if at == target {
        out.push(path.clone());
        if out.len() > cap {
            return Err(Error::Limit(format!("more than {cap} circuits")));
        }
        return Ok(());
    }
    for &(edge, next) in &incident[at] {
        if edge <= min_edge || visited[next] {
            continue;
        }
        visited[next] = true;
        path.push(edge);
        paths(incident, next, target, min_edge, visited, path, out, cap)?;
        path.pop();
        visited[next] = false;
    }
    Ok(())
}

/// Element–circuit incidence graph; edge nodes first, colored by `color`.
pub(crate) fn matroid_graph<C: Ord + Clone>(
    g: &WeightedGraph,
    color: impl Fn(usize) -> C,
    limits: &Limits,
) -> Result<ColoredGraph<(u8, Option<C>)>> {
    let cs = circuits(g, limits)?;
    let m = g.edge_count();
    let colors = (0..m)
        .map(|i| (0, Some(color(i))))
        .chain(cs.iter().map(|_| (1, None)))
        .collect();
    let mut cg = ColoredGraph::new(colors);
    for (k, c) in cs.iter().enumerate() {
        for &e in c {
            cg.add_edge(e, m + k, 1);
        }
    }
    Ok(cg)
}

pub(crate) fn matroid_canonical<C: Ord + Clone>(
    g: &WeightedGraph,
    color: impl Fn(usize) -> C,
    limits: &Limits,
) -> Result<Canonical<(u8, Option<C>)>> {
    Ok(matroid_graph(g, color, limits)?.canonical())
}

/// Edge bijection `g1 → g2` sending circuits onto circuits, with edge colors
/// preserved; `None` if the colored cycle matroids are not isomorphic.
pub(crate) fn colored_cyclic_equivalence<C: Ord + Clone>(
    g1: &WeightedGraph,
    c1: impl Fn(usize) -> C,
    g2: &WeightedGraph,
    c2: impl Fn(usize) -> C,
    limits: &Limits,
) -> Result<Option<BTreeMap<String, String>>> {
    if g1.edge_count() != g2.edge_count() {
        return Ok(None);
    }
    let a = matroid_canonical(g1, c1, limits)?;
    let b = matroid_canonical(g2, c2, limits)?;
    Ok(canon::isomorphism(&a, &b).map(|p| {
        (0..g1.edge_count())
            .map(|i| (g1.edges()[i].id.clone(), g2.edges()[p[i]].id.clone()))
            .collect()
    }))
}

/// Graphic-matroid isomorphism (Whitney 2-isomorphism) as an edge-id map.
pub fn cyclically_equivalent(g1: &WeightedGraph, g2: &WeightedGraph) -> Result<Option<BTreeMap<String, String>>> {
    cyclically_equivalent_with(g1, g2, &Limits::default())
}

pub fn cyclically_equivalent_with(
    g1: &WeightedGraph,
    g2: &WeightedGraph,
    limits: &Limits,
) -> Result<Option<BTreeMap<String, String>>> {
    colored_cyclic_equivalence(g1, |_| (), g2, |_| (), limits)
}

/// True iff `map` sends the circuit set of `g1` exactly onto that of `g2`.
pub fn verify_cyclic_map(g1: &WeightedGraph, g2: &WeightedGraph, map: &BTreeMap<String, String>) -> Result<bool> {
    let limits = Limits::default();
    let as_ids = |g: &WeightedGraph, cs: Vec<Vec<usize>>| -> BTreeSet<BTreeSet<String>> {
        cs.into_iter()
            .map(|c| c.into_iter().map(|i| g.edges()[i].id.clone()).collect())
            .collect()
    };
    let c1 = as_ids(g1, circuits(g1, &limits)?);
    let c2 = as_ids(g2, circuits(g2, &limits)?);
    let images: BTreeSet<&String> = map.values().collect();
    if map.len() != g1.edge_count() || images.len() != g2.edge_count() {
        return Ok(false);
    }
    let mut mapped = BTreeSet::new();
    for c in c1 {
        let mut image = BTreeSet::new();
        for e in c {
            match map.get(&e) {
                Some(f) => {
                    image.insert(f.clone());
                }
                None => return Ok(false),
            }
        }
        mapped.insert(image);
    }
    Ok(mapped == c2)
}
