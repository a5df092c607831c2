//! Reproducible invariant batteries behind `torelli check`.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;
use std::str::FromStr;

use num::BigInt;

use crate::connectivity::bridge_positions;
use crate::delaunay::{decompositions_equivalent_with, delaunay_of_graph_with, verify_equivalence};
use crate::error::{invalid, Error, Limits, Result};
use crate::graph::{enumerate_stable_weighted_graphs_with, WeightedGraph};
use crate::matrix::det;
use crate::rational::Rational;
use crate::moduli::{check_order_preservation_with, delaunay_class_label, stratum_label, torelli_fibers_with};
use crate::stable::{c1_equivalent, canonical_image, twist_orbit, CurveModel};
use crate::tropical::graph_form;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    MatrixTree,
    Fibers,
    Duality,
    C1Twist,
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "matrix-tree" => Ok(Suite::MatrixTree),
            "fibers" => Ok(Suite::Fibers),
            "duality" => Ok(Suite::Duality),
            "c1-twist" => Ok(Suite::C1Twist),
            _ => invalid(format!("unknown check suite {s:?}")),
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Suite::MatrixTree => "matrix-tree",
            Suite::Fibers => "fibers",
            Suite::Duality => "duality",
            Suite::C1Twist => "c1-twist",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SuiteReport {
    pub suite: Suite,
    pub genus: u32,
    /// Strata, dominance pairs or models covered, depending on the suite.
    pub checked: usize,
    pub violations: Vec<String>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Invariants shared by all three relations: genus, edge count, and the
/// sorted (weight, label) pairs.
type BucketKey = (u32, usize, Vec<(u32, String)>);

/// Largest cycle-space rank for which Delaunay decompositions are built.
pub const DELAUNAY_MAX_RANK: usize = 3;

/// Edge cap and label alphabet for the exhaustive C1/twist comparison.
pub const C1_MAX_EDGES: usize = 6;
pub const C1_LABELS: [&str; 3] = ["A", "B", "C"];

pub fn run(suite: Suite, genus: u32, limits: &Limits) -> Result<SuiteReport> {
    let (checked, violations) = match suite {
        Suite::MatrixTree => matrix_tree(genus, limits)?,
        Suite::Fibers => fibers(genus, limits)?,
        Suite::Duality => {
            let r = check_order_preservation_with(genus, DELAUNAY_MAX_RANK, limits)?;
            (r.pairs_checked, r.violations)
        }
        Suite::C1Twist => {
            let models = labeled_models(genus, C1_MAX_EDGES, &C1_LABELS, limits)?;
            c1_twist_agreement(&models, limits)?
        }
    };
    Ok(SuiteReport {
        suite,
        genus,
        checked,
        violations,
    })
}

/// Spanning trees by deletion–contraction on an edge list over `n` vertices.
pub fn spanning_tree_count(n: usize, edges: &[(usize, usize)]) -> BigInt {
    fn count(n: usize, edges: &[(usize, usize)]) -> BigInt {
        let Some(k) = edges.iter().position(|&(a, b)| a != b) else {
            return BigInt::from((n == 1) as u8);
        };
        let (a, b) = edges[k];
        let rest: Vec<(usize, usize)> = edges.iter().enumerate().filter(|&(i, _)| i != k).map(|(_, &e)| e).collect();
        // Contract b into a, renumbering the last vertex into b's slot.
        let relabel = |v: usize| {
            let v = if v == b { a } else { v };
            if v == n - 1 {
                b
            } else {
                v
            }
        };
        let contracted: Vec<(usize, usize)> = rest.iter().map(|&(x, y)| (relabel(x), relabel(y))).collect();
        let deleted = if connected(n, &rest) { count(n, &rest) } else { BigInt::from(0) };
        deleted + count(n - 1, &contracted)
    }
    fn connected(n: usize, edges: &[(usize, usize)]) -> bool {
        let mut seen = vec![false; n];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            for &(a, b) in edges {
                for (x, y) in [(a, b), (b, a)] {
                    if x == v && !seen[y] {
                        seen[y] = true;
                        stack.push(y);
                    }
                }
            }
        }
        seen.iter().all(|&s| s)
    }
    if n == 0 || !connected(n, edges) {
        return BigInt::from(0);
    }
    count(n, edges)
}

fn edge_pairs(g: &WeightedGraph) -> Vec<(usize, usize)> {
    g.edges().iter().map(|e| (e.ends[0], e.ends[1])).collect()
}

fn matrix_tree(genus: u32, limits: &Limits) -> Result<(usize, Vec<String>)> {
    let graphs = enumerate_stable_weighted_graphs_with(genus, limits)?;
    let mut violations = Vec::new();
    for g in &graphs {
        let b = g.betti();
        let gram = graph_form(g).gram().submatrix(0..b, 0..b);
        let d = det(&gram);
        let trees = spanning_tree_count(g.vertex_count(), &edge_pairs(g));
        if d != Rational::from_integer(trees.clone()) {
            violations.push(format!("{}: det {d} but {trees} spanning trees", stratum_label(g)));
        }
    }
    Ok((graphs.len(), violations))
}

fn fibers(genus: u32, limits: &Limits) -> Result<(usize, Vec<String>)> {
    let report = torelli_fibers_with(genus, limits)?;
    let mut violations = report.violations;
    // Image classes against Delaunay equivalence, one representative per class.
    let graphs = enumerate_stable_weighted_graphs_with(genus, limits)?;
    let mut reps: Vec<String> = Vec::new();
    let mut decomps = Vec::new();
    let mut checked = report.classes.iter().map(|c| c.strata.len()).sum::<usize>();
    for g in graphs.iter().filter(|g| g.betti() <= DELAUNAY_MAX_RANK) {
        let label = delaunay_class_label(g, limits)?;
        let d = delaunay_of_graph_with(g, limits)?;
        let mut matched = None;
        for (k, rl) in reps.iter().enumerate() {
            let eq = decompositions_equivalent_with(&decomps[k], &d, limits)?;
            if let Some(rel) = &eq {
                if !verify_equivalence(&decomps[k], &d, &rel.witness) {
                    violations.push(format!("unverified Delaunay witness for {}", stratum_label(g)));
                }
            }
            checked += 1;
            if eq.is_some() != (*rl == label) {
                violations.push(format!(
                    "{}: Delaunay equivalence with class {rl} is {} but image labels {}",
                    stratum_label(g),
                    eq.is_some(),
                    if *rl == label { "agree" } else { "differ" }
                ));
            }
            if eq.is_some() {
                matched = Some(k);
            }
        }
        if matched.is_none() {
            reps.push(label);
            decomps.push(d);
        }
    }
    Ok((checked, violations))
}

/// Every stable, bridge-free model of `genus` with at most `max_edges`
/// edges, labeled from `alphabet`, one per labeled isomorphism class.
pub fn labeled_models(genus: u32, max_edges: usize, alphabet: &[&str], limits: &Limits) -> Result<Vec<CurveModel>> {
    let mut out = Vec::new();
    for g in enumerate_stable_weighted_graphs_with(genus, limits)? {
        if g.edge_count() > max_edges || !bridge_positions(&g).is_empty() {
            continue;
        }
        let n = g.vertex_count() as u32;
        let k = alphabet.len();
        let total = k
            .checked_pow(n)
            .filter(|&t| t <= limits.orbit)
            .ok_or_else(|| Error::Limit(format!("{k}^{n} labelings exceed the orbit cap")))?;
        let mut seen = HashSet::new();
        for code in 0..total {
            let labels: BTreeMap<String, String> = g
                .vertices()
                .iter()
                .enumerate()
                .map(|(i, v)| (v.id.clone(), alphabet[code / k.pow(i as u32) % k].to_string()))
                .collect();
            let x = CurveModel::new(g.clone(), &labels)?;
            if seen.insert(x.labeled_code()) {
                out.push(x);
            }
        }
    }
    Ok(out)
}

/// Twist orbits, C1-equivalence and canonical-image isomorphism must induce
/// the same partition. Pairs are compared within buckets of equal genus,
/// edge count and (weight, label) multiset, which all three relations
/// preserve.
pub fn c1_twist_agreement(models: &[CurveModel], limits: &Limits) -> Result<(usize, Vec<String>)> {
    let index: HashMap<_, usize> = models.iter().enumerate().map(|(i, m)| (m.labeled_code(), i)).collect();
    let mut orbit = vec![usize::MAX; models.len()];
    let mut next = 0;
    for i in 0..models.len() {
        if orbit[i] != usize::MAX {
            continue;
        }
        for y in twist_orbit(&models[i], limits)? {
            let j = *index
                .get(&y.labeled_code())
                .ok_or_else(|| Error::Validation("twist left the model family".into()))?;
            orbit[j] = next;
        }
        next += 1;
    }
    let images = models
        .iter()
        .map(|m| Ok(canonical_image(m)?.code()))
        .collect::<Result<Vec<_>>>()?;
    let mut buckets: BTreeMap<BucketKey, Vec<usize>> = BTreeMap::new();
    for (i, m) in models.iter().enumerate() {
        let mut wl: Vec<(u32, String)> = (0..m.dual().vertex_count())
            .map(|v| (m.dual().vertices()[v].weight, m.label(v).to_string()))
            .collect();
        wl.sort();
        buckets.entry((m.genus(), m.dual().edge_count(), wl)).or_default().push(i);
    }
    let mut violations = Vec::new();
    let describe = |m: &CurveModel| format!("{} {:?}", stratum_label(m.dual()), m.labels());
    for bucket in buckets.values() {
        for (a, &i) in bucket.iter().enumerate() {
            for &j in &bucket[a + 1..] {
                let c1 = c1_equivalent(&models[i], &models[j])?.is_some();
                let tw = orbit[i] == orbit[j];
                let im = images[i] == images[j];
                if c1 != tw || c1 != im {
                    violations.push(format!(
                        "c1={c1} twist={tw} image={im} for {} vs {}",
                        describe(&models[i]),
                        describe(&models[j])
                    ));
                }
            }
        }
    }
    Ok((models.len(), violations))
}
