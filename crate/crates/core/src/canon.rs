//! Canonical labeling of vertex-colored graphs with edge multiplicities.
//!
//! Individualization–refinement: color refinement to an equitable
//! partition, then branch on every vertex of the first smallest
//! non-singleton cell. The canonical code is the lexicographically least
//! (colors, adjacency) encoding over all leaves. Every leaf is visited, so
//! the automorphism group falls out of the same traversal.

use std::collections::BTreeMap;

/// Refinement key of a vertex: its current cell and sorted neighbor counts.
type CellKey = (usize, Vec<(usize, u32)>);

/// Undirected graph with colored vertices and a symmetric multiplicity matrix.
/// Diagonal entries count loops.
#[derive(Debug, Clone)]
pub struct ColoredGraph<C> {
    colors: Vec<C>,
    adj: Vec<Vec<u32>>,
}

/// Canonical encoding; equal codes ⇔ isomorphic colored graphs.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CanonCode<C> {
    pub colors: Vec<C>,
    pub adjacency: Vec<u32>,
}

#[derive(Debug, Clone)]
pub struct Canonical<C> {
    pub code: CanonCode<C>,
    /// `order[k]` is the original vertex placed at canonical position `k`.
    pub order: Vec<usize>,
    /// Vertex automorphisms as images `p[v]`, identity included.
    pub automorphisms: Vec<Vec<usize>>,
}

impl<C: Ord + Clone> ColoredGraph<C> {
    pub fn new(colors: Vec<C>) -> Self {
        let n = colors.len();
        ColoredGraph {
            colors,
            adj: vec![vec![0; n]; n],
        }
    }

    pub fn len(&self) -> usize {
        self.colors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.colors.is_empty()
    }

    pub fn add_edge(&mut self, u: usize, v: usize, mult: u32) {
        self.adj[u][v] += mult;
        if u != v {
            self.adj[v][u] += mult;
        }
    }

    pub fn canonical(&self) -> Canonical<C> {
        let n = self.len();
        let palette: BTreeMap<&C, usize> = {
            let mut m = BTreeMap::new();
            for c in &self.colors {
                m.insert(c, 0);
            }
            for (i, v) in m.values_mut().enumerate() {
                *v = i;
            }
            m
        };
        let initial: Vec<usize> = self.colors.iter().map(|c| palette[c]).collect();
        let mut search = Search {
            graph: self,
            best: None,
            leaves: Vec::new(),
        };
        let part = search.refine(initial);
        search.descend(part);
        let (code, order) = search.best.expect("search visits at least one leaf");
        let automorphisms = aut_from_leaves(&code, &order, &search.leaves, n);
        Canonical {
            code,
            order,
            automorphisms,
        }
    }
}

struct Search<'a, C> {
    graph: &'a ColoredGraph<C>,
    best: Option<(CanonCode<C>, Vec<usize>)>,
    leaves: Vec<(CanonCode<C>, Vec<usize>)>,
}

impl<C: Ord + Clone> Search<'_, C> {
    /// Equitable refinement. Cell indices are assigned by sorting
    /// isomorphism-invariant keys, so the result is canonical.
    fn refine(&self, mut cell: Vec<usize>) -> Vec<usize> {
        let n = cell.len();
        let mut count = distinct(&cell);
        loop {
            let keys: Vec<CellKey> = (0..n)
                .map(|v| {
                    let mut nb: Vec<(usize, u32)> = (0..n)
                        .filter(|&u| self.graph.adj[v][u] > 0)
                        .map(|u| (cell[u], self.graph.adj[v][u]))
                        .collect();
                    nb.sort_unstable();
                    (cell[v], nb)
                })
                .collect();
            let mut sorted: Vec<&CellKey> = keys.iter().collect();
            sorted.sort();
            sorted.dedup();
            let index: BTreeMap<&CellKey, usize> =
                sorted.iter().enumerate().map(|(i, k)| (*k, i)).collect();
            cell = keys.iter().map(|k| index[k]).collect();
            let next = sorted.len();
            if next == count {
                return cell;
            }
            count = next;
        }
    }

    fn descend(&mut self, cell: Vec<usize>) {
        let n = cell.len();
        let mut sizes = vec![0usize; n];
        for &c in &cell {
            sizes[c] += 1;
        }
        let target = (0..n)
            .filter(|&c| sizes[c] > 1)
            .min_by_key(|&c| (sizes[c], c));
        let Some(target) = target else {
            self.leaf(&cell);
            return;
        };
        for v in (0..n).filter(|&v| cell[v] == target) {
            let split: Vec<usize> = (0..n)
                .map(|u| {
                    if u == v {
                        2 * target
                    } else if cell[u] == target {
                        2 * target + 1
                    } else {
                        2 * cell[u]
                    }
                })
                .collect();
            let refined = self.refine(compact(&split));
            self.descend(refined);
        }
    }

    fn leaf(&mut self, cell: &[usize]) {
        let n = cell.len();
        let mut order = vec![0; n];
        for (v, &c) in cell.iter().enumerate() {
            order[c] = v;
        }
        let colors = order.iter().map(|&v| self.graph.colors[v].clone()).collect();
        let mut adjacency = Vec::with_capacity(n * (n + 1) / 2);
        for i in 0..n {
            for j in i..n {
                adjacency.push(self.graph.adj[order[i]][order[j]]);
            }
        }
        let code = CanonCode { colors, adjacency };
        match &self.best {
            Some((b, _)) if *b <= code => {}
            _ => self.best = Some((code.clone(), order.clone())),
        }
        self.leaves.push((code, order));
    }
}

fn distinct(cell: &[usize]) -> usize {
    let mut v = cell.to_vec();
    v.sort_unstable();
    v.dedup();
    v.len()
}

fn compact(cell: &[usize]) -> Vec<usize> {
    let mut vals = cell.to_vec();
    vals.sort_unstable();
    vals.dedup();
    cell.iter()
        .map(|c| vals.binary_search(c).expect("value present"))
        .collect()
}

fn aut_from_leaves<C: Ord>(
    best: &CanonCode<C>,
    best_order: &[usize],
    leaves: &[(CanonCode<C>, Vec<usize>)],
    n: usize,
) -> Vec<Vec<usize>> {
    let mut auts: Vec<Vec<usize>> = leaves
        .iter()
        .filter(|(c, _)| c == best)
        .map(|(_, order)| {
            let mut p = vec![0; n];
            for k in 0..n {
                p[best_order[k]] = order[k];
            }
            p
        })
        .collect();
    auts.sort();
    auts.dedup();
    auts
}

/// Isomorphism `p` (with `p[v]` the image of `v`) from `a` to `b`, if any.
pub fn isomorphism<C: Ord + Clone>(a: &Canonical<C>, b: &Canonical<C>) -> Option<Vec<usize>> {
    if a.code != b.code {
        return None;
    }
    let n = a.order.len();
    let mut p = vec![0; n];
    for k in 0..n {
        p[a.order[k]] = b.order[k];
    }
    Some(p)
}
