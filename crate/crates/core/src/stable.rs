//! Combinatorial shadow of stable curves: separating blocks, stabilization,
//! C1-sets, C1- and twist-equivalence, compactified Torelli fibers and the
//! canonical-image quotient.
//!
//! The normalization of each irreducible component is abstracted to an
//! opaque label; the branch points it carries are implied by edge
//! incidences. Two models with equal shadows describe C1-equivalent curves
//! only if their labelled normalizations really agree, which is taken as
//! given. Hyperellipticity, on which the canonical-image statement depends,
//! is not checked.

use std::collections::{BTreeMap, BTreeSet, HashSet, VecDeque};

use crate::canon::{CanonCode, ColoredGraph};
use crate::connectivity::{bridge_positions, coparallel_classes, coparallel_positions, twist, twist_specs, CoparallelPartition, TwistSpec};
use crate::error::{invalid, Error, Limits, Result};
use crate::graph::WeightedGraph;

/// Dual graph plus a label per vertex (the normalized component).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CurveModel {
    dual: WeightedGraph,
    labels: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockDecomposition {
    pub blocks: Vec<CurveModel>,
    pub bridge_count: usize,
    pub positive_genus_blocks: Vec<CurveModel>,
}

/// Vertex bijection plus C1-set bijection realizing a C1-equivalence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct C1Witness {
    pub vertex_map: BTreeMap<String, String>,
    pub set_map: Vec<(BTreeSet<String>, BTreeSet<String>)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiberComparison {
    pub equal: bool,
    pub blocks: [Vec<CurveModel>; 2],
    /// Pairs `(i, j)` of matched stabilized positive-genus blocks.
    pub matching: Vec<(usize, usize)>,
}

/// Components with one singular point per C1-set `S`, of multiplicity `2|S|`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CanonicalImage {
    /// `(label, weight)` per component.
    pub components: Vec<(String, u32)>,
    pub points: Vec<SingularPoint>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SingularPoint {
    pub multiplicity: usize,
    /// Component index → number of branches through the point.
    pub branches: BTreeMap<usize, usize>,
}

impl CurveModel {
    /// `labels` maps vertex ids to component labels; missing ids get `""`.
    pub fn new(dual: WeightedGraph, labels: &BTreeMap<String, String>) -> Result<Self> {
        for id in labels.keys() {
            if dual.vertex_index(id).is_none() {
                return invalid(format!("label for unknown vertex {id:?}"));
            }
        }
        if !dual.is_stable() {
            return invalid("dual graph of a stable curve must be stable");
        }
        Ok(Self::from_parts(dual, labels))
    }

    pub fn unlabeled(dual: WeightedGraph) -> Result<Self> {
        Self::new(dual, &BTreeMap::new())
    }

    fn from_parts(dual: WeightedGraph, labels: &BTreeMap<String, String>) -> Self {
        let labels = dual
            .vertices()
            .iter()
            .map(|v| labels.get(&v.id).cloned().unwrap_or_default())
            .collect();
        CurveModel { dual, labels }
    }

    pub fn dual(&self) -> &WeightedGraph {
        &self.dual
    }

    pub fn label(&self, vertex: usize) -> &str {
        &self.labels[vertex]
    }

    pub fn labels(&self) -> BTreeMap<String, String> {
        self.dual
            .vertices()
            .iter()
            .zip(&self.labels)
            .map(|(v, l)| (v.id.clone(), l.clone()))
            .collect()
    }

    pub fn genus(&self) -> u32 {
        self.dual.genus()
    }

    fn with_dual(&self, dual: WeightedGraph) -> Self {
        CurveModel {
            dual,
            labels: self.labels.clone(),
        }
    }

    /// Isomorphism-invariant code respecting weights and labels.
    pub fn labeled_code(&self) -> CanonCode<(u32, String)> {
        self.dual
            .colored(|v| (self.dual.vertices()[v].weight, self.labels[v].clone()))
            .canonical()
            .code
    }

    fn require_bridgeless(&self) -> Result<()> {
        if !bridge_positions(&self.dual).is_empty() {
            return invalid("model has separating nodes; split it into blocks first");
        }
        Ok(())
    }
}

/// Connected components after deleting every bridge.
pub fn separating_blocks(x: &CurveModel) -> BlockDecomposition {
    let bridges = bridge_positions(&x.dual);
    let labels = x.labels();
    let mut blocks = Vec::new();
    for comp in x.dual.components_without(&bridges) {
        let edges: Vec<usize> = (0..x.dual.edge_count())
            .filter(|i| !bridges.contains(i) && comp.contains(&x.dual.edges()[*i].ends[0]))
            .collect();
        blocks.push(CurveModel::from_parts(x.dual.sub(&comp, &edges), &labels));
    }
    let positive_genus_blocks = blocks.iter().filter(|b| b.genus() > 0).cloned().collect();
    BlockDecomposition {
        blocks,
        bridge_count: bridges.len(),
        positive_genus_blocks,
    }
}

/// Smooths weight-0 vertices of valence 2 in id order. A cycle of rational
/// components ends as a single weight-0 vertex with one loop.
pub fn stabilize_block(b: &CurveModel) -> Result<CurveModel> {
    b.require_bridgeless()?;
    if b.genus() == 0 {
        return invalid("genus-0 block has no stable model");
    }
    let labels = b.labels();
    let mut g = b.dual.clone();
    loop {
        let mut order: Vec<usize> = (0..g.vertex_count()).collect();
        order.sort_by(|&x, &y| g.vertices()[x].id.cmp(&g.vertices()[y].id));
        let smoothable = order.into_iter().find(|&v| {
            g.vertices()[v].weight == 0
                && g.valence(v) == 2
                && g.edges().iter().all(|e| !(e.is_loop() && e.ends[0] == v))
        });
        let Some(v) = smoothable else {
            break;
        };
        let incident: Vec<usize> = (0..g.edge_count()).filter(|&i| g.edges()[i].ends.contains(&v)).collect();
        let (e, f) = (&g.edges()[incident[0]], &g.edges()[incident[1]]);
        let (u, w) = (e.other(v), f.other(v));
        let keep_id = e.id.clone().min(f.id.clone());
        let keep: Vec<usize> = (0..g.vertex_count()).filter(|&x| x != v).collect();
        let edges: Vec<usize> = (0..g.edge_count()).filter(|i| !incident.contains(i)).collect();
        let vertex_ids: Vec<String> = g.vertices().iter().map(|x| x.id.clone()).collect();
        let mut spec: Vec<(String, String, String)> = edges
            .iter()
            .map(|&i| {
                let x = &g.edges()[i];
                (x.id.clone(), vertex_ids[x.ends[0]].clone(), vertex_ids[x.ends[1]].clone())
            })
            .collect();
        spec.push((keep_id, vertex_ids[u].clone(), vertex_ids[w].clone()));
        g = WeightedGraph::new(
            keep.iter().map(|&x| (vertex_ids[x].clone(), g.vertices()[x].weight)).collect(),
            spec,
        )?;
    }
    Ok(CurveModel::from_parts(g, &labels))
}

/// The C1-sets are the coparallel classes of a bridgeless dual graph.
pub fn c1_sets(x: &CurveModel) -> Result<CoparallelPartition> {
    x.require_bridgeless()?;
    Ok(coparallel_classes(&x.dual))
}

/// Per C1-set: the multiset of endpoint vertices of its edges (two per edge).
fn half_edge_profile(g: &WeightedGraph, class: &[usize]) -> Vec<usize> {
    let mut v: Vec<usize> = class.iter().flat_map(|&i| g.edges()[i].ends).collect();
    v.sort_unstable();
    v
}

fn vertex_invariant(x: &CurveModel, classes: &[Vec<usize>], v: usize) -> (u32, String, Vec<(usize, usize)>) {
    let mut sig: Vec<(usize, usize)> = classes
        .iter()
        .map(|c| (c.len(), half_edge_profile(&x.dual, c).iter().filter(|&&u| u == v).count()))
        .filter(|&(_, k)| k > 0)
        .collect();
    sig.sort_unstable();
    (x.dual.vertices()[v].weight, x.labels[v].clone(), sig)
}

/// Label- and weight-preserving vertex bijection with a bijection of
/// C1-sets carrying each set's half-edge endpoint multiset onto its image's.
pub fn c1_equivalent(x1: &CurveModel, x2: &CurveModel) -> Result<Option<C1Witness>> {
    x1.require_bridgeless()?;
    x2.require_bridgeless()?;
    let (g1, g2) = (&x1.dual, &x2.dual);
    if g1.vertex_count() != g2.vertex_count() || g1.edge_count() != g2.edge_count() {
        return Ok(None);
    }
    let (_, c1) = coparallel_positions(g1);
    let (_, c2) = coparallel_positions(g2);
    if c1.len() != c2.len() {
        return Ok(None);
    }
    let n = g1.vertex_count();
    let inv1: Vec<_> = (0..n).map(|v| vertex_invariant(x1, &c1, v)).collect();
    let inv2: Vec<_> = (0..n).map(|v| vertex_invariant(x2, &c2, v)).collect();
    let profiles1: Vec<Vec<usize>> = c1.iter().map(|c| half_edge_profile(g1, c)).collect();
    let profiles2: Vec<Vec<usize>> = c2.iter().map(|c| half_edge_profile(g2, c)).collect();
    let mut target: Vec<&Vec<usize>> = profiles2.iter().collect();
    target.sort();
    let mut sigma = vec![usize::MAX; n];
    let mut used = vec![false; n];
    let mut found = None;
    assign(0, &inv1, &inv2, &mut sigma, &mut used, &mut |sigma| {
        let mut images: Vec<Vec<usize>> = profiles1
            .iter()
            .map(|p| {
                let mut q: Vec<usize> = p.iter().map(|&v| sigma[v]).collect();
                q.sort_unstable();
                q
            })
            .collect();
        let mut sorted: Vec<&Vec<usize>> = images.iter().collect();
        sorted.sort();
        if sorted != target {
            return false;
        }
        // Pair sets with equal images (order within equal profiles is free).
        let mut free: Vec<bool> = vec![true; c2.len()];
        let mut set_map = Vec::new();
        for (k, img) in images.iter_mut().enumerate() {
            let j = (0..c2.len()).find(|&j| free[j] && profiles2[j] == *img).expect("multisets agree");
            free[j] = false;
            let ids = |g: &WeightedGraph, c: &[usize]| c.iter().map(|&i| g.edges()[i].id.clone()).collect();
            set_map.push((ids(g1, &c1[k]), ids(g2, &c2[j])));
        }
        found = Some(C1Witness {
            vertex_map: (0..n)
                .map(|v| (g1.vertices()[v].id.clone(), g2.vertices()[sigma[v]].id.clone()))
                .collect(),
            set_map,
        });
        true
    });
    Ok(found)
}

fn assign<I: PartialEq>(
    v: usize,
    inv1: &[I],
    inv2: &[I],
    sigma: &mut Vec<usize>,
    used: &mut Vec<bool>,
    accept: &mut dyn FnMut(&[usize]) -> bool,
) -> bool {
    if v == inv1.len() {
        return accept(sigma);
    }
    for w in 0..inv2.len() {
        if used[w] || inv1[v] != inv2[w] {
            continue;
        }
        used[w] = true;
        sigma[v] = w;
        if assign(v + 1, inv1, inv2, sigma, used, accept) {
            return true;
        }
        used[w] = false;
    }
    sigma[v] = usize::MAX;
    false
}

/// Shortest twist sequence turning `x1` into a model isomorphic to `x2`
/// (respecting weights and labels), found by breadth-first search.
pub fn twist_equivalent(x1: &CurveModel, x2: &CurveModel) -> Result<Option<Vec<TwistSpec>>> {
    twist_equivalent_with(x1, x2, &Limits::default())
}

pub fn twist_equivalent_with(x1: &CurveModel, x2: &CurveModel, limits: &Limits) -> Result<Option<Vec<TwistSpec>>> {
    x1.require_bridgeless()?;
    x2.require_bridgeless()?;
    let goal = x2.labeled_code();
    let mut seen: HashSet<CanonCode<(u32, String)>> = HashSet::new();
    seen.insert(x1.labeled_code());
    let mut queue = VecDeque::from([(x1.clone(), Vec::<TwistSpec>::new())]);
    while let Some((x, moves)) = queue.pop_front() {
        if x.labeled_code() == goal {
            return Ok(Some(moves));
        }
        for spec in twist_specs(&x.dual) {
            let y = x.with_dual(twist(&x.dual, &spec)?);
            if seen.insert(y.labeled_code()) {
                if seen.len() > limits.orbit {
                    return Err(Error::Limit(format!("twist orbit exceeds {} states", limits.orbit)));
                }
                let mut m = moves.clone();
                m.push(spec);
                queue.push_back((y, m));
            }
        }
    }
    Ok(None)
}

/// Labeled models in the twist orbit of `x`, one per isomorphism class.
pub fn twist_orbit(x: &CurveModel, limits: &Limits) -> Result<Vec<CurveModel>> {
    x.require_bridgeless()?;
    let mut seen = HashSet::from([x.labeled_code()]);
    let mut out = vec![x.clone()];
    let mut k = 0;
    while k < out.len() {
        let cur = out[k].clone();
        k += 1;
        for spec in twist_specs(&cur.dual) {
            let y = cur.with_dual(twist(&cur.dual, &spec)?);
            if seen.insert(y.labeled_code()) {
                if seen.len() > limits.orbit {
                    return Err(Error::Limit(format!("twist orbit exceeds {} states", limits.orbit)));
                }
                out.push(y);
            }
        }
    }
    Ok(out)
}

/// Stabilized positive-genus blocks of both models matched as an unordered
/// multiset under C1-equivalence.
pub fn compactified_fiber_equal(x1: &CurveModel, x2: &CurveModel) -> Result<FiberComparison> {
    if x1.genus() != x2.genus() {
        return invalid("models of different genus");
    }
    let stab = |x: &CurveModel| -> Result<Vec<CurveModel>> {
        separating_blocks(x)
            .positive_genus_blocks
            .iter()
            .map(stabilize_block)
            .collect()
    };
    let (b1, b2) = (stab(x1)?, stab(x2)?);
    let mut matching = Vec::new();
    let equal = b1.len() == b2.len() && match_blocks(&b1, &b2, &mut vec![false; b2.len()], &mut matching)?;
    if !equal {
        matching.clear();
    }
    Ok(FiberComparison {
        equal,
        blocks: [b1, b2],
        matching,
    })
}

fn match_blocks(
    b1: &[CurveModel],
    b2: &[CurveModel],
    used: &mut Vec<bool>,
    out: &mut Vec<(usize, usize)>,
) -> Result<bool> {
    let i = out.len();
    if i == b1.len() {
        return Ok(true);
    }
    for j in 0..b2.len() {
        if used[j] || c1_equivalent(&b1[i], &b2[j])?.is_none() {
            continue;
        }
        used[j] = true;
        out.push((i, j));
        if match_blocks(b1, b2, used, out)? {
            return Ok(true);
        }
        out.pop();
        used[j] = false;
    }
    Ok(false)
}

/// Glue all nodes of each C1-set into one point.
pub fn canonical_image(x: &CurveModel) -> Result<CanonicalImage> {
    x.require_bridgeless()?;
    let (_, classes) = coparallel_positions(&x.dual);
    let points = classes
        .iter()
        .map(|c| {
            let mut branches = BTreeMap::new();
            for v in half_edge_profile(&x.dual, c) {
                *branches.entry(v).or_insert(0) += 1;
            }
            SingularPoint {
                multiplicity: 2 * c.len(),
                branches,
            }
        })
        .collect();
    Ok(CanonicalImage {
        components: (0..x.dual.vertex_count())
            .map(|v| (x.labels[v].clone(), x.dual.vertices()[v].weight))
            .collect(),
        points,
    })
}

type ImageColor = (u8, u32, String, usize);

impl CanonicalImage {
    fn incidence(&self) -> ColoredGraph<ImageColor> {
        let n = self.components.len();
        let colors = self
            .components
            .iter()
            .map(|(l, w)| (0, *w, l.clone(), 0))
            .chain(self.points.iter().map(|p| (1, 0, String::new(), p.multiplicity)))
            .collect();
        let mut g = ColoredGraph::new(colors);
        for (k, p) in self.points.iter().enumerate() {
            for (&v, &m) in &p.branches {
                g.add_edge(v, n + k, m as u32);
            }
        }
        g
    }

    /// Isomorphism-invariant code of the incidence structure.
    pub fn code(&self) -> CanonCode<ImageColor> {
        self.incidence().canonical().code
    }

    pub fn isomorphic(&self, other: &CanonicalImage) -> bool {
        self.code() == other.code()
    }
}
