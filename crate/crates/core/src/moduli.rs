//! Strata of the tropical moduli space, their images under the tropical
//! Torelli map, and the fiber and order checks tying the two together.
//!
//! Image-side classes are cyclic-equivalence classes of 3-edge-connected
//! graphs: two graph forms have equivalent Delaunay decompositions exactly
//! when those agree, so no Voronoi reduction is needed.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt::Debug;

use sha2::{Digest, Sha256};

use crate::connectivity::{matroid_canonical, three_edge_connectivization};
use crate::delaunay::{delaunay_of_graph_with, refines_with, verify_refinement};
use crate::error::{Limits, Result};
use crate::forms::{arithmetically_equivalent_with, verify_equivalence, QuadraticForm};
use crate::graph::{enumerate_stable_weighted_graphs_with, GraphCode, WeightedGraph};
use crate::tropical::{jacobian, tropical_3ec, TropicalCurve};

/// One stratum per stable weighted graph; `dimension` is its edge count.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Stratum {
    pub label: String,
    pub graph: WeightedGraph,
    pub dimension: usize,
}

/// Strata with the closure order: `(i, j)` in `relations` iff stratum `i`
/// dominates stratum `j` (reflexive pairs included).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StrataPoset {
    pub genus: u32,
    pub elements: Vec<Stratum>,
    pub relations: BTreeSet<(usize, usize)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiberClass {
    pub label: String,
    pub strata: Vec<String>,
    /// Unit-length curve of the first stratum, 3-edge-connectivized.
    pub representative: TropicalCurve,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TorelliFiberReport {
    pub genus: u32,
    pub classes: Vec<FiberClass>,
    /// Human-readable descriptions of every failed cross-check.
    pub violations: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrderReport {
    pub pairs_checked: usize,
    pub refinements_checked: usize,
    pub violations: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TorelliPoint {
    pub dimension: u32,
    pub form: QuadraticForm,
    pub label: String,
}

fn digest(x: &impl Debug) -> String {
    Sha256::digest(format!("{x:?}").as_bytes())
        .iter()
        .take(6)
        .map(|b| format!("{b:02x}"))
        .collect()
}

pub fn stratum_label(g: &WeightedGraph) -> String {
    format!("g{}.e{}.{}", g.genus(), g.edge_count(), digest(&g.canonical_code()))
}

/// Label of the Delaunay class of the graph form: the cyclic class of the
/// 3-edge-connectivization, lengths ignored.
pub fn delaunay_class_label(g: &WeightedGraph, limits: &Limits) -> Result<String> {
    let g3 = three_edge_connectivization(g);
    let code = matroid_canonical(&g3, |_| (), limits)?.code;
    Ok(format!("g{}.r{}.{}", g.genus(), g3.betti(), digest(&code)))
}

/// Fiber label of a tropical curve: cyclic class of its 3-edge-connected
/// model with edge lengths as colors.
pub fn fiber_label(c: &TropicalCurve, limits: &Limits) -> Result<String> {
    let c3 = tropical_3ec(c);
    let lengths = c3.length_vec().to_vec();
    let code = matroid_canonical(c3.graph(), |i| lengths[i].clone(), limits)?.code;
    Ok(format!("g{}.r{}.{}", c.genus(), c3.graph().betti(), digest(&code)))
}

pub fn build_mg_poset(genus: u32) -> Result<StrataPoset> {
    build_mg_poset_with(genus, &Limits::default())
}

pub fn build_mg_poset_with(genus: u32, limits: &Limits) -> Result<StrataPoset> {
    let graphs = enumerate_stable_weighted_graphs_with(genus, limits)?;
    let codes: Vec<GraphCode> = graphs.iter().map(|g| g.canonical_code()).collect();
    let index: HashMap<&GraphCode, usize> = codes.iter().enumerate().map(|(i, c)| (c, i)).collect();
    let mut relations = BTreeSet::new();
    for (i, g) in graphs.iter().enumerate() {
        for code in g.contraction_codes() {
            // Contractions of stable graphs stay stable of the same genus.
            relations.insert((i, index[&code]));
        }
    }
    let elements: Vec<Stratum> = graphs
        .into_iter()
        .map(|g| Stratum {
            label: stratum_label(&g),
            dimension: g.edge_count(),
            graph: g,
        })
        .collect();
    let distinct: BTreeSet<&String> = elements.iter().map(|s| &s.label).collect();
    assert_eq!(distinct.len(), elements.len(), "stratum label collision");
    Ok(StrataPoset {
        genus,
        elements,
        relations,
    })
}

impl StrataPoset {
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.elements.iter().position(|s| s.label == label)
    }

    pub fn geq(&self, i: usize, j: usize) -> bool {
        self.relations.contains(&(i, j))
    }

    /// Covering pairs of the strict order (its transitive reduction).
    pub fn covering(&self) -> Vec<(usize, usize)> {
        self.relations
            .iter()
            .copied()
            .filter(|&(i, j)| i != j)
            .filter(|&(i, j)| {
                !(0..self.len()).any(|k| k != i && k != j && self.geq(i, k) && self.geq(k, j))
            })
            .collect()
    }

    pub fn maximal(&self) -> Vec<usize> {
        (0..self.len())
            .filter(|&j| !(0..self.len()).any(|i| i != j && self.geq(i, j)))
            .collect()
    }

    pub fn minimal(&self) -> Vec<usize> {
        (0..self.len())
            .filter(|&i| !(0..self.len()).any(|j| i != j && self.geq(i, j)))
            .collect()
    }
}

/// Stratum label ↦ Delaunay class label of its image.
pub fn torelli_stratum_map(genus: u32) -> Result<BTreeMap<String, String>> {
    torelli_stratum_map_with(genus, &Limits::default())
}

pub fn torelli_stratum_map_with(genus: u32, limits: &Limits) -> Result<BTreeMap<String, String>> {
    enumerate_stable_weighted_graphs_with(genus, limits)?
        .iter()
        .map(|g| Ok((stratum_label(g), delaunay_class_label(g, limits)?)))
        .collect()
}

/// Partition of the unit-length strata by fiber label, cross-checked
/// against arithmetic equivalence of the Jacobians within and across
/// classes.
pub fn torelli_fibers(genus: u32) -> Result<TorelliFiberReport> {
    torelli_fibers_with(genus, &Limits::default())
}

pub fn torelli_fibers_with(genus: u32, limits: &Limits) -> Result<TorelliFiberReport> {
    let graphs = enumerate_stable_weighted_graphs_with(genus, limits)?;
    let mut classes: Vec<FiberClass> = Vec::new();
    let mut forms: Vec<QuadraticForm> = Vec::new();
    let mut violations = Vec::new();
    let mut by_label: BTreeMap<String, usize> = BTreeMap::new();
    for g in &graphs {
        let c = TropicalCurve::unit(g.clone())?;
        let label = fiber_label(&c, limits)?;
        let stratum = stratum_label(g);
        let form = jacobian(&c);
        match by_label.get(&label) {
            Some(&k) => {
                match arithmetically_equivalent_with(&forms[k], &form, limits)? {
                    Some(h) if verify_equivalence(&forms[k], &form, &h) => {}
                    _ => violations.push(format!(
                        "{stratum} shares fiber {label} with {} but the Jacobians are not equivalent",
                        classes[k].strata[0]
                    )),
                }
                classes[k].strata.push(stratum);
            }
            None => {
                by_label.insert(label.clone(), classes.len());
                classes.push(FiberClass {
                    label,
                    strata: vec![stratum],
                    representative: tropical_3ec(&c),
                });
                forms.push(form);
            }
        }
    }
    for a in 0..forms.len() {
        for b in a + 1..forms.len() {
            if arithmetically_equivalent_with(&forms[a], &forms[b], limits)?.is_some() {
                violations.push(format!(
                    "fibers {} and {} have equivalent Jacobians",
                    classes[a].label, classes[b].label
                ));
            }
        }
    }
    Ok(TorelliFiberReport {
        genus,
        classes,
        violations,
    })
}

/// Labels of the Delaunay classes reachable from `g` by contraction.
fn class_closure(g: &WeightedGraph, limits: &Limits) -> Result<BTreeSet<String>> {
    let g3 = three_edge_connectivization(g);
    let m = g3.edge_count();
    let mut out = BTreeSet::new();
    for mask in 0u64..1 << m {
        let s: Vec<usize> = (0..m).filter(|&i| mask >> i & 1 == 1).collect();
        out.insert(delaunay_class_label(&g3.contract_positions(&s), limits)?);
    }
    Ok(out)
}

/// For every dominance pair, the image classes must be ordered: the
/// dominated class is reachable by contracting a representative of the
/// dominating one, and where both ranks are at most `max_rank` the graph
/// Delaunay decomposition of the larger stratum refines the smaller.
pub fn check_order_preservation(genus: u32, max_rank: usize) -> Result<OrderReport> {
    check_order_preservation_with(genus, max_rank, &Limits::default())
}

pub fn check_order_preservation_with(genus: u32, max_rank: usize, limits: &Limits) -> Result<OrderReport> {
    let poset = build_mg_poset_with(genus, limits)?;
    let pairs: Vec<(usize, usize)> = poset.relations.iter().copied().collect();
    check_pairs(&poset, &pairs, max_rank, limits)
}

/// Order check restricted to the given dominance pairs of `poset`.
pub fn check_pairs(
    poset: &StrataPoset,
    pairs: &[(usize, usize)],
    max_rank: usize,
    limits: &Limits,
) -> Result<OrderReport> {
    let mut labels = Vec::new();
    let mut reps: BTreeMap<String, usize> = BTreeMap::new();
    for (i, s) in poset.elements.iter().enumerate() {
        let l = delaunay_class_label(&s.graph, limits)?;
        reps.entry(l.clone()).or_insert(i);
        labels.push(l);
    }
    let mut closures: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
    for (l, &i) in &reps {
        closures.insert(l.clone(), class_closure(&poset.elements[i].graph, limits)?);
    }
    let mut report = OrderReport {
        pairs_checked: 0,
        refinements_checked: 0,
        violations: Vec::new(),
    };
    let mut decomps = HashMap::new();
    for &(i, j) in pairs {
        if !poset.geq(i, j) {
            report.violations.push(format!(
                "{} does not dominate {}",
                poset.elements[i].label, poset.elements[j].label
            ));
            continue;
        }
        report.pairs_checked += 1;
        if !closures[&labels[i]].contains(&labels[j]) {
            report.violations.push(format!(
                "class {} of {} does not specialize to class {} of {}",
                labels[i], poset.elements[i].label, labels[j], poset.elements[j].label
            ));
        }
        let (gi, gj) = (&poset.elements[i].graph, &poset.elements[j].graph);
        if gi.betti() <= max_rank && gj.betti() <= max_rank {
            for k in [i, j] {
                if let std::collections::hash_map::Entry::Vacant(e) = decomps.entry(k) {
                    e.insert(delaunay_of_graph_with(&poset.elements[k].graph, limits)?);
                }
            }
            let (di, dj) = (&decomps[&i], &decomps[&j]);
            report.refinements_checked += 1;
            match refines_with(di, dj, limits)? {
                Some(rel) if verify_refinement(di, dj, &rel.witness) => {}
                _ => report.violations.push(format!(
                    "Delaunay decomposition of {} does not refine that of {}",
                    poset.elements[i].label, poset.elements[j].label
                )),
            }
        }
    }
    Ok(report)
}

/// Genus, Jacobian and fiber label of a tropical curve.
pub fn tropical_torelli(c: &TropicalCurve) -> Result<TorelliPoint> {
    tropical_torelli_with(c, &Limits::default())
}

pub fn tropical_torelli_with(c: &TropicalCurve, limits: &Limits) -> Result<TorelliPoint> {
    Ok(TorelliPoint {
        dimension: c.genus(),
        form: jacobian(c),
        label: fiber_label(c, limits)?,
    })
}
