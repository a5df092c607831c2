//! Small exact helpers for lattice polytopes given by their vertices:
//! facets, face lattices, containment and volume.

use std::collections::BTreeSet;

use num::{BigInt, BigRational};

use crate::rational::Rational;

pub type Point = Vec<i64>;

/// The halfspace `normal · x ≤ offset`, with `(normal, offset)` primitive.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Facet {
    pub normal: Vec<i64>,
    pub offset: i64,
}

impl Facet {
    pub fn value(&self, x: &[i64]) -> i128 {
        dot(&self.normal, x)
    }

    pub fn contains(&self, x: &[i64]) -> bool {
        self.value(x) <= self.offset as i128
    }
}

pub fn dot(a: &[i64], b: &[i64]) -> i128 {
    a.iter().zip(b).map(|(&x, &y)| x as i128 * y as i128).sum()
}

/// Determinant by fraction-free (Bareiss) elimination.
pub fn det_i128(m: &[Vec<i128>]) -> i128 {
    let n = m.len();
    if n == 0 {
        return 1;
    }
    let mut a = m.to_vec();
    let mut sign = 1;
    let mut prev = 1i128;
    for k in 0..n - 1 {
        if a[k][k] == 0 {
            let Some(p) = (k + 1..n).find(|&i| a[i][k] != 0) else {
                return 0;
            };
            a.swap(k, p);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev;
            }
        }
        prev = a[k][k];
    }
    sign * a[n - 1][n - 1]
}

/// Rank of a list of integer vectors.
pub fn rank_of(vectors: &[Vec<i128>]) -> usize {
    let Some(first) = vectors.first() else {
        return 0;
    };
    let cols = first.len();
    let mut a = vectors.to_vec();
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..a.len()).find(|&i| a[i][c] != 0) else {
            continue;
        };
        a.swap(r, p);
        for i in r + 1..a.len() {
            if a[i][c] != 0 {
                let (x, y) = (a[r][c], a[i][c]);
                let pivot = a[r].clone();
                for (v, p) in a[i].iter_mut().zip(&pivot).take(cols) {
                    *v = *v * x - p * y;
                }
                let g = a[i].iter().fold(0i128, |g, &v| gcd(g, v));
                if g > 1 {
                    for v in &mut a[i] {
                        *v /= g;
                    }
                }
            }
        }
        r += 1;
    }
    r
}

fn gcd(a: i128, b: i128) -> i128 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

fn diffs(points: &[&Point]) -> Vec<Vec<i128>> {
    points[1..]
        .iter()
        .map(|p| p.iter().zip(points[0]).map(|(&x, &y)| (x - y) as i128).collect())
        .collect()
}

/// Dimension of the affine hull (−1 for no points).
pub fn affine_dim(points: &[&Point]) -> isize {
    if points.is_empty() {
        return -1;
    }
    rank_of(&diffs(points)) as isize
}

/// Normal to `d − 1` vectors in `ℤᵈ` by cofactor expansion.
fn cross(vectors: &[Vec<i128>], d: usize) -> Vec<i128> {
    (0..d)
        .map(|i| {
            let minor: Vec<Vec<i128>> = vectors
                .iter()
                .map(|v| (0..d).filter(|&j| j != i).map(|j| v[j]).collect())
                .collect();
            let s = if i % 2 == 0 { 1 } else { -1 };
            s * det_i128(&minor)
        })
        .collect()
}

/// Facets of the convex hull of a full-dimensional point set in `ℤᵈ`.
pub fn facets(points: &[Point]) -> Vec<Facet> {
    let d = points[0].len();
    let mut out = BTreeSet::new();
    for subset in crate::graph::subsets_of_size(points.len(), d) {
        let chosen: Vec<&Point> = subset.iter().map(|&i| &points[i]).collect();
        let n = cross(&diffs(&chosen), d);
        if n.iter().all(|&x| x == 0) {
            continue;
        }
        let b: i128 = n.iter().zip(chosen[0]).map(|(&a, &x)| a * x as i128).sum();
        let values: Vec<i128> = points
            .iter()
            .map(|p| n.iter().zip(p).map(|(&a, &x)| a * x as i128).sum())
            .collect();
        let sign = if values.iter().all(|&v| v <= b) {
            1
        } else if values.iter().all(|&v| v >= b) {
            -1
        } else {
            continue;
        };
        let g = n.iter().fold(b.abs(), |g, &v| gcd(g, v));
        out.insert(Facet {
            normal: n.iter().map(|&v| (sign * v / g) as i64).collect(),
            offset: (sign * b / g) as i64,
        });
    }
    out.into_iter().collect()
}

/// All nonempty faces as sorted index sets, the polytope itself included,
/// sorted by dimension and then lexicographically.
pub fn faces(points: &[Point]) -> Vec<Vec<usize>> {
    let all: Vec<usize> = (0..points.len()).collect();
    let facet_sets: Vec<BTreeSet<usize>> = if points.len() == 1 {
        Vec::new()
    } else {
        facets(points)
            .iter()
            .map(|f| {
                all.iter()
                    .copied()
                    .filter(|&i| f.value(&points[i]) == f.offset as i128)
                    .collect()
            })
            .collect()
    };
    let mut found: BTreeSet<BTreeSet<usize>> = BTreeSet::new();
    found.insert(all.iter().copied().collect());
    let mut frontier: Vec<BTreeSet<usize>> = facet_sets.clone();
    while let Some(f) = frontier.pop() {
        if f.is_empty() || !found.insert(f.clone()) {
            continue;
        }
        for g in &facet_sets {
            let meet: BTreeSet<usize> = f.intersection(g).copied().collect();
            if !meet.is_empty() && !found.contains(&meet) {
                frontier.push(meet);
            }
        }
    }
    let mut out: Vec<Vec<usize>> = found.into_iter().map(|s| s.into_iter().collect()).collect();
    out.sort_by_key(|f| {
        let pts: Vec<&Point> = f.iter().map(|&i| &points[i]).collect();
        (affine_dim(&pts), f.clone())
    });
    out
}

/// `d`-dimensional volume of a full-dimensional lattice polytope, by a
/// pulling triangulation over the face lattice.
pub fn volume(points: &[Point]) -> Rational {
    let d = points[0].len();
    let lattice = faces(points);
    let dims: Vec<isize> = lattice
        .iter()
        .map(|f| affine_dim(&f.iter().map(|&i| &points[i]).collect::<Vec<_>>()))
        .collect();
    let top = lattice.len() - 1;
    let mut total: i128 = 0;
    for simplex in pull(top, &lattice, &dims) {
        let pts: Vec<&Point> = simplex.iter().map(|&i| &points[i]).collect();
        total += det_i128(&diffs(&pts)).abs();
    }
    let fact: i128 = (1..=d as i128).product();
    BigRational::new(BigInt::from(total), BigInt::from(fact))
}

fn pull(face: usize, lattice: &[Vec<usize>], dims: &[isize]) -> Vec<Vec<usize>> {
    let f = &lattice[face];
    if dims[face] == 0 {
        return vec![vec![f[0]]];
    }
    let apex = f[0];
    let mut out = Vec::new();
    for (g, sub) in lattice.iter().enumerate() {
        if dims[g] + 1 == dims[face] && !sub.contains(&apex) && sub.iter().all(|x| f.contains(x)) {
            for mut s in pull(g, lattice, dims) {
                s.push(apex);
                out.push(s);
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};

    fn pts(v: &[&[i64]]) -> Vec<Point> {
        v.iter().map(|p| p.to_vec()).collect()
    }

    #[test]
    fn square_faces_and_volume() {
        let sq = pts(&[&[0, 0], &[0, 1], &[1, 0], &[1, 1]]);
        assert_eq!(facets(&sq).len(), 4);
        assert_eq!(faces(&sq).len(), 9);
        assert_eq!(volume(&sq), int(1));
    }

    #[test]
    fn simplex_and_octahedron() {
        let t = pts(&[&[0, 0, 0], &[1, 0, 0], &[0, 1, 0], &[0, 0, 1]]);
        assert_eq!(volume(&t), rat(1, 6));
        assert_eq!(faces(&t).len(), 15);
        let o = pts(&[&[1, 0, 0], &[-1, 0, 0], &[0, 1, 0], &[0, -1, 0], &[0, 0, 1], &[0, 0, -1]]);
        assert_eq!(facets(&o).len(), 8);
        assert_eq!(volume(&o), rat(4, 3));
    }

    #[test]
    fn segment() {
        let s = pts(&[&[0], &[3]]);
        assert_eq!(facets(&s).len(), 2);
        assert_eq!(volume(&s), int(3));
        assert_eq!(det_i128(&[]), 1);
    }
}
