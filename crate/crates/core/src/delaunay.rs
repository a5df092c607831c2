//! Delaunay decompositions of positive semidefinite forms, their
//! equivalence and refinement.
//!
//! Only the star of the origin is materialized: every cell of the periodic
//! paving is a translate of a cell containing `0`. A full-dimensional cell
//! containing `0` is the zero set of `f_a(y) = Q(y) − aᵀy` for a linear
//! functional `a` with `f_a ≥ 0` on the lattice (an empty circumscribed
//! ellipsoid through `0`). Starting from `a = 0`, a face is grown by tilting
//! `a` along a normal of the current face until a new lattice point becomes
//! a zero; neighbors across facets through `0` are found the same way. The
//! next zero is always located by an exact ellipsoid enumeration, so the
//! star is certified without any box heuristics.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use num::{BigInt, One, Signed, Zero};

use crate::error::{invalid, Error, Limits, Result};
use crate::forms::{null_split, QuadraticForm};
use crate::graph::WeightedGraph;
use crate::lattice::points_in_ellipsoid;
use crate::matrix::{self, column_echelon, columns_generate_lattice, to_integer_matrix, IntMatrix, RatMatrix};
use crate::polytope::{self, Facet, Point};
use crate::rational::{lcm_of_denominators, Rational};
use crate::tropical::graph_form;

/// Vertices of a cell in `ℤʳ`, sorted.
pub type Cell = Vec<Point>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DelaunayDecomposition {
    ambient_dim: usize,
    rank: usize,
    /// `r × g`, the lattice projection `ℤᵍ → ℤʳ`.
    projection: IntMatrix,
    /// Unimodular `T` with `Tᵀ G T = diag(reduced, 0)`.
    basis: IntMatrix,
    /// Integer-scaled reduced Gram matrix the cells were computed for.
    form: RatMatrix,
    /// Every face containing the origin of a full-dimensional cell,
    /// sorted by dimension and vertices.
    star: Vec<Cell>,
    full: Vec<Cell>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RelationKind {
    Equivalence,
    Refinement,
}

/// `h·Δ₁` equals (equivalence) or refines (refinement) `h′·Δ₂`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PavingRelation {
    pub kind: RelationKind,
    pub witness: IntMatrix,
    pub second: IntMatrix,
}

struct Engine<'a> {
    a: &'a RatMatrix,
    a_inv: RatMatrix,
    r: usize,
    cap: usize,
}

fn ri(x: i64) -> Rational {
    Rational::from_integer(BigInt::from(x))
}

impl Engine<'_> {
    fn f(&self, a: &[Rational], y: &[i64]) -> Rational {
        let mut q = Rational::zero();
        for i in 0..self.r {
            if y[i] == 0 {
                continue;
            }
            for j in 0..self.r {
                q += &self.a[(i, j)] * ri(y[i] * y[j]);
            }
            q -= &a[i] * ri(y[i]);
        }
        q
    }

    /// Lattice points with `f_a ≤ 0`; for a valid `a`, exactly its zero set.
    fn below(&self, a: &[Rational]) -> Result<Vec<Point>> {
        let two = Rational::from_integer(BigInt::from(2));
        let c: Vec<Rational> = self.a_inv.mul_vec(a).into_iter().map(|x| x / &two).collect();
        let ac = self.a.mul_vec(&c);
        let radius = c.iter().zip(&ac).fold(Rational::zero(), |s, (x, y)| s + x * y);
        points_in_ellipsoid(self.a, &c, &radius, self.cap)
    }

    /// Tilts `a` along `n` until the first lattice point with `nᵀy > 0` hits zero.
    fn rotate(&self, a: &[Rational], n: &[Rational]) -> Result<Vec<Rational>> {
        let i = n.iter().position(|x| !x.is_zero()).expect("nonzero direction");
        let mut y0 = vec![0i64; self.r];
        y0[i] = if n[i].is_positive() { 1 } else { -1 };
        let ny = |y: &[i64]| n.iter().zip(y).fold(Rational::zero(), |s, (a, &b)| s + a * ri(b));
        let t0 = self.f(a, &y0) / ny(&y0);
        let probe: Vec<Rational> = a.iter().zip(n).map(|(x, d)| x + &t0 * d).collect();
        let mut best = t0;
        for y in self.below(&probe)? {
            let s = ny(&y);
            if s.is_positive() {
                let t = self.f(a, &y) / s;
                if t < best {
                    best = t;
                }
            }
        }
        Ok(a.iter().zip(n).map(|(x, d)| x + &best * d).collect())
    }
}

fn dim_of(cell: &[Point]) -> usize {
    polytope::affine_dim(&cell.iter().collect::<Vec<_>>()) as usize
}

/// Canonical translate: least vertex moved to the origin.
fn translate_canonical(cell: &[Point]) -> Cell {
    let base = cell.iter().min().expect("nonempty cell").clone();
    let mut out: Cell = cell
        .iter()
        .map(|p| p.iter().zip(&base).map(|(x, b)| x - b).collect())
        .collect();
    out.sort();
    out
}

pub fn delaunay(q: &QuadraticForm) -> Result<DelaunayDecomposition> {
    delaunay_with(q, &Limits::default())
}

pub fn delaunay_with(q: &QuadraticForm, limits: &Limits) -> Result<DelaunayDecomposition> {
    let split = null_split(q);
    let r = split.rank;
    let scale = Rational::from_integer(lcm_of_denominators(
        split.reduced.gram().to_rows().iter().flatten(),
    ));
    let form = split.reduced.gram().map(|x| x * &scale);
    let mut d = DelaunayDecomposition {
        ambient_dim: q.dim(),
        rank: r,
        projection: split.projection,
        basis: split.basis,
        form,
        star: Vec::new(),
        full: Vec::new(),
    };
    if r == 0 {
        d.star = vec![vec![vec![]]];
        d.full = d.star.clone();
        return Ok(d);
    }
    let engine = Engine {
        a: &d.form,
        a_inv: matrix::inverse(&d.form).expect("reduced form is definite"),
        r,
        cap: limits.lattice_points,
    };
    // Grow a face through the origin to a full-dimensional cell.
    let mut a = vec![Rational::zero(); r];
    let mut face = vec![vec![0i64; r]];
    while dim_of(&face) < r {
        let rows: Vec<Vec<Rational>> = face.iter().map(|p| p.iter().map(|&x| ri(x)).collect()).collect();
        let n = if rows.iter().all(|row| row.iter().all(Zero::is_zero)) {
            let mut e = vec![Rational::zero(); r];
            e[0] = Rational::one();
            e
        } else {
            matrix::kernel(&RatMatrix::from_rows(rows))
                .into_iter()
                .next()
                .expect("face is not full-dimensional")
        };
        a = engine.rotate(&a, &n)?;
        face = engine.below(&a)?;
    }
    let mut seen: BTreeSet<Cell> = BTreeSet::new();
    seen.insert(face.clone());
    let mut queue = VecDeque::from([(a, face)]);
    while let Some((a, cell)) = queue.pop_front() {
        for facet in polytope::facets(&cell) {
            if facet.offset != 0 {
                continue;
            }
            let n: Vec<Rational> = facet.normal.iter().map(|&x| ri(x)).collect();
            let a2 = engine.rotate(&a, &n)?;
            let next = engine.below(&a2)?;
            if seen.insert(next.clone()) {
                if seen.len() > limits.cells {
                    return Err(Error::Limit(format!("Delaunay star exceeds {} cells", limits.cells)));
                }
                queue.push_back((a2, next));
            }
        }
    }
    d.full = seen.into_iter().collect();
    d.star = star_faces(&d.full, r);
    Ok(d)
}

fn star_faces(full: &[Cell], r: usize) -> Vec<Cell> {
    let origin = vec![0i64; r];
    let mut star: BTreeSet<Cell> = BTreeSet::new();
    for cell in full {
        let o = cell.iter().position(|p| *p == origin).expect("star cells contain the origin");
        for f in polytope::faces(cell) {
            if f.contains(&o) {
                star.insert(f.iter().map(|&i| cell[i].clone()).collect());
            }
        }
    }
    let mut out: Vec<Cell> = star.into_iter().collect();
    out.sort_by_key(|c| (dim_of(c), c.clone()));
    out
}

pub fn delaunay_of_graph(g: &WeightedGraph) -> Result<DelaunayDecomposition> {
    delaunay(&graph_form(g))
}

pub fn delaunay_of_graph_with(g: &WeightedGraph, limits: &Limits) -> Result<DelaunayDecomposition> {
    delaunay_with(&graph_form(g), limits)
}

impl DelaunayDecomposition {
    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn projection(&self) -> &IntMatrix {
        &self.projection
    }

    pub fn star(&self) -> &[Cell] {
        &self.star
    }

    pub fn full_cells(&self) -> &[Cell] {
        &self.full
    }

    /// Number of cells of each dimension `0..=r` modulo translation.
    pub fn f_vector(&self) -> Vec<usize> {
        if self.rank == 0 {
            return vec![1];
        }
        let mut classes: Vec<BTreeSet<Cell>> = vec![BTreeSet::new(); self.rank + 1];
        for c in &self.star {
            classes[dim_of(c)].insert(translate_canonical(c));
        }
        classes.iter().map(BTreeSet::len).collect()
    }

    /// `Σ vol(σ)/#vertices(σ)` over full-dimensional star cells; equals `1`
    /// exactly when the translates tile space with a unit fundamental domain.
    pub fn star_volume(&self) -> Rational {
        if self.rank == 0 {
            return Rational::one();
        }
        self.full.iter().fold(Rational::zero(), |acc, c| {
            acc + polytope::volume(c) / Rational::from_integer(BigInt::from(c.len()))
        })
    }

    /// Independent check of the empty-ellipsoid property: for each full
    /// cell the circumcenter is solved from its vertices and the lattice
    /// points in the circumscribed ellipsoid must be exactly the vertices.
    pub fn certify(&self) -> Result<bool> {
        if self.rank == 0 {
            return Ok(true);
        }
        let r = self.rank;
        for cell in &self.full {
            // 2 vᵀ A c = Q(v) for every vertex v; pick r independent ones.
            let rows: Vec<Vec<Rational>> = cell
                .iter()
                .map(|v| {
                    let vr: Vec<Rational> = v.iter().map(|&x| ri(x)).collect();
                    let av = self.form.mul_vec(&vr);
                    let q = vr.iter().zip(&av).fold(Rational::zero(), |s, (x, y)| s + x * y);
                    let mut row: Vec<Rational> = av.iter().map(|x| x * Rational::from_integer(BigInt::from(2))).collect();
                    row.push(q);
                    row
                })
                .collect();
            let mut m = RatMatrix::from_rows(rows);
            let pivots = matrix::rref(&mut m);
            if pivots.len() != r || pivots.contains(&r) {
                return Ok(false);
            }
            let c: Vec<Rational> = (0..r).map(|i| m[(i, r)].clone()).collect();
            let ac = self.form.mul_vec(&c);
            let radius = c.iter().zip(&ac).fold(Rational::zero(), |s, (x, y)| s + x * y);
            let mut pts = points_in_ellipsoid(&self.form, &c, &radius, usize::MAX)?;
            pts.sort();
            if pts != *cell {
                return Ok(false);
            }
        }
        Ok(true)
    }

    fn edge_vectors(&self) -> Vec<Point> {
        let origin = vec![0i64; self.rank];
        self.star
            .iter()
            .filter(|c| c.len() == 2 && dim_of(c) == 1)
            .map(|c| c.iter().find(|p| **p != origin).expect("edge has a nonzero end").clone())
            .collect()
    }

    fn signature(&self, v: &Point) -> Vec<usize> {
        let mut s: Vec<usize> = self.full.iter().filter(|c| c.contains(v)).map(Vec::len).collect();
        s.sort_unstable();
        s
    }

    fn full_set(&self) -> BTreeSet<Cell> {
        self.full.iter().cloned().collect()
    }

    fn vertex_set(&self) -> BTreeSet<Point> {
        self.full.iter().flatten().cloned().collect()
    }

    /// `T2 · diag(K, I) · T1⁻¹`.
    fn lift(&self, other: &DelaunayDecomposition, k: &IntMatrix, r_from: usize) -> IntMatrix {
        let ident = IntMatrix::identity(self.ambient_dim - r_from);
        other
            .basis
            .mul(&k.block_diag(&ident))
            .mul(&self.basis.unimodular_inverse().expect("unimodular"))
    }

    /// `T2⁻¹ · h · T1`: the witness in split coordinates.
    fn split_coordinates(&self, other: &DelaunayDecomposition, h: &IntMatrix) -> IntMatrix {
        other
            .basis
            .unimodular_inverse()
            .expect("unimodular")
            .mul(h)
            .mul(&self.basis)
    }
}

fn apply(k: &IntMatrix, p: &[i64]) -> Point {
    (0..k.rows())
        .map(|i| {
            (0..k.cols())
                .map(|j| &k[(i, j)] * BigInt::from(p[j]))
                .fold(BigInt::zero(), |s, x| s + x)
                .try_into()
                .expect("cell coordinates fit in i64")
        })
        .collect()
}

fn map_cells(k: &IntMatrix, cells: &[Cell]) -> BTreeSet<Cell> {
    cells
        .iter()
        .map(|c| {
            let mut m: Cell = c.iter().map(|p| apply(k, p)).collect();
            m.sort();
            m
        })
        .collect()
}

/// `r` linearly independent edge vectors, greedily in sorted order.
fn independent_edges(d: &DelaunayDecomposition) -> Vec<Point> {
    let mut chosen: Vec<Point> = Vec::new();
    for v in d.edge_vectors() {
        let mut trial: Vec<Vec<i128>> = chosen.iter().map(|p| p.iter().map(|&x| x as i128).collect()).collect();
        trial.push(v.iter().map(|&x| x as i128).collect());
        if polytope::rank_of(&trial) == trial.len() {
            chosen.push(v);
            if chosen.len() == d.rank {
                break;
            }
        }
    }
    assert_eq!(chosen.len(), d.rank, "star edges span the lattice");
    chosen
}

/// `C · B⁻¹` if integral; columns of `B` and `C` are the given points.
fn transition(b: &[Point], c: &[Point]) -> Option<IntMatrix> {
    let r = b.len();
    let bm = RatMatrix::from_fn(r, r, |i, j| ri(b[j][i]));
    let cm = RatMatrix::from_fn(c[0].len(), r, |i, j| ri(c[j][i]));
    to_integer_matrix(&cm.mul(&matrix::inverse(&bm)?))
}

fn check_dims(d1: &DelaunayDecomposition, d2: &DelaunayDecomposition) -> Result<()> {
    if d1.ambient_dim != d2.ambient_dim {
        return invalid("decompositions live in different dimensions");
    }
    Ok(())
}

/// Unimodular `h` with `h·Δ₁ = Δ₂`, if one exists.
pub fn decompositions_equivalent(
    d1: &DelaunayDecomposition,
    d2: &DelaunayDecomposition,
) -> Result<Option<PavingRelation>> {
    decompositions_equivalent_with(d1, d2, &Limits::default())
}

pub fn decompositions_equivalent_with(
    d1: &DelaunayDecomposition,
    d2: &DelaunayDecomposition,
    limits: &Limits,
) -> Result<Option<PavingRelation>> {
    check_dims(d1, d2)?;
    if d1.rank != d2.rank || d1.f_vector() != d2.f_vector() || d1.full.len() != d2.full.len() {
        return Ok(None);
    }
    let r = d1.rank;
    let g = d1.ambient_dim;
    let relation = |k: &IntMatrix| PavingRelation {
        kind: RelationKind::Equivalence,
        witness: d1.lift(d2, k, r),
        second: IntMatrix::identity(g),
    };
    if r == 0 {
        return Ok(Some(relation(&IntMatrix::identity(0))));
    }
    let basis = independent_edges(d1);
    let edges2 = d2.edge_vectors();
    let edges1: BTreeSet<Point> = d1.edge_vectors().into_iter().collect();
    let edge_set2: BTreeSet<Point> = edges2.iter().cloned().collect();
    let candidates: Vec<Vec<Point>> = basis
        .iter()
        .map(|v| {
            let s = d1.signature(v);
            edges2.iter().filter(|w| d2.signature(w) == s).cloned().collect()
        })
        .collect();
    let target = d2.full_set();
    let mut budget = limits.witnesses;
    let mut found = None;
    search_tuples(&candidates, &mut Vec::new(), &mut budget, &mut |c| {
        let Some(k) = transition(&basis, c) else {
            return false;
        };
        if !k.is_unimodular() || !edges1.iter().all(|e| edge_set2.contains(&apply(&k, e))) {
            return false;
        }
        if map_cells(&k, &d1.full) == target {
            found = Some(k);
            return true;
        }
        false
    })?;
    Ok(found.map(|k| relation(&k)))
}

fn search_tuples(
    candidates: &[Vec<Point>],
    chosen: &mut Vec<Point>,
    budget: &mut usize,
    accept: &mut dyn FnMut(&[Point]) -> bool,
) -> Result<bool> {
    let i = chosen.len();
    if i == candidates.len() {
        return Ok(accept(chosen));
    }
    for p in &candidates[i] {
        if *budget == 0 {
            return Err(Error::Limit("witness search budget exhausted".into()));
        }
        *budget -= 1;
        chosen.push(p.clone());
        if search_tuples(candidates, chosen, budget, accept)? {
            return Ok(true);
        }
        chosen.pop();
    }
    Ok(false)
}

/// True iff `h` is unimodular and maps `Δ₁` onto `Δ₂`.
pub fn verify_equivalence(d1: &DelaunayDecomposition, d2: &DelaunayDecomposition, h: &IntMatrix) -> bool {
    if d1.ambient_dim != d2.ambient_dim || d1.rank != d2.rank || !h.is_unimodular() || h.rows() != d1.ambient_dim {
        return false;
    }
    let r = d1.rank;
    let m = d1.split_coordinates(d2, h);
    if (0..r).any(|i| (r..d1.ambient_dim).any(|j| !m[(i, j)].is_zero())) {
        return false;
    }
    let k = m.submatrix(0..r, 0..r);
    k.is_unimodular() && map_cells(&k, &d1.full) == d2.full_set()
}

/// Unimodular `h` such that every cell of `h·Δ₁` lies in a cell of `Δ₂`
/// (reported as the pair `(h, I)`), if one exists.
pub fn refines(d1: &DelaunayDecomposition, d2: &DelaunayDecomposition) -> Result<Option<PavingRelation>> {
    refines_with(d1, d2, &Limits::default())
}

pub fn refines_with(
    d1: &DelaunayDecomposition,
    d2: &DelaunayDecomposition,
    limits: &Limits,
) -> Result<Option<PavingRelation>> {
    check_dims(d1, d2)?;
    let (r1, r2, g) = (d1.rank, d2.rank, d1.ambient_dim);
    if r1 < r2 {
        return Ok(None);
    }
    let relation = |m: IntMatrix| PavingRelation {
        kind: RelationKind::Refinement,
        witness: m,
        second: IntMatrix::identity(g),
    };
    if r2 == 0 {
        return Ok(Some(relation(IntMatrix::identity(g))));
    }
    let basis = independent_edges(d1);
    let mut targets: Vec<Point> = d2.vertex_set().into_iter().collect();
    targets.sort_by_key(|p| p.iter().map(|x| x.abs()).sum::<i64>());
    let vertex_set = d2.vertex_set();
    let edges1 = d1.edge_vectors();
    let facets2: Vec<Vec<Facet>> = d2.full.iter().map(|c| polytope::facets(c)).collect();
    let candidates = vec![targets; r1];
    let mut budget = limits.witnesses;
    let mut found = None;
    search_tuples(&candidates, &mut Vec::new(), &mut budget, &mut |c| {
        let Some(a) = transition(&basis, c) else {
            return false;
        };
        if !columns_generate_lattice(&a) || !edges1.iter().all(|e| vertex_set.contains(&apply(&a, e))) {
            return false;
        }
        if cells_contained(&a, &d1.full, &facets2) {
            found = Some(a);
            return true;
        }
        false
    })?;
    let Some(a) = found else {
        return Ok(None);
    };
    // A·V = [L | 0] with L unimodular lower triangular; V' = V·diag(L⁻¹, I).
    let (h, v) = column_echelon(&a);
    let l_inv = h.submatrix(0..r2, 0..r2).unimodular_inverse().expect("surjective");
    let v = v.mul(&l_inv.block_diag(&IntMatrix::identity(r1 - r2)));
    let n = v.unimodular_inverse().expect("unimodular");
    Ok(Some(relation(d1.lift(d2, &n, r1))))
}

fn cells_contained(a: &IntMatrix, cells: &[Cell], facets2: &[Vec<Facet>]) -> bool {
    cells.iter().all(|c| {
        let image: Vec<Point> = c.iter().map(|p| apply(a, p)).collect();
        facets2
            .iter()
            .any(|fs| image.iter().all(|p| fs.iter().all(|f| f.contains(p))))
    })
}

/// True iff `h` is unimodular and every cell of `h·Δ₁` lies in a cell of `Δ₂`.
pub fn verify_refinement(d1: &DelaunayDecomposition, d2: &DelaunayDecomposition, h: &IntMatrix) -> bool {
    let (r1, r2, g) = (d1.rank, d2.rank, d1.ambient_dim);
    if d2.ambient_dim != g || r1 < r2 || !h.is_unimodular() || h.rows() != g {
        return false;
    }
    if r2 == 0 {
        return true;
    }
    let m = d1.split_coordinates(d2, h);
    if (0..r2).any(|i| (r1..g).any(|j| !m[(i, j)].is_zero())) {
        return false;
    }
    let a = m.submatrix(0..r2, 0..r1);
    let facets2: Vec<Vec<Facet>> = d2.full.iter().map(|c| polytope::facets(c)).collect();
    cells_contained(&a, &d1.full, &facets2)
}

/// Star cells grouped by dimension, for reporting.
pub fn cells_by_dimension(d: &DelaunayDecomposition) -> BTreeMap<usize, Vec<Cell>> {
    let mut m: BTreeMap<usize, Vec<Cell>> = BTreeMap::new();
    if d.rank == 0 {
        m.insert(0, d.star.clone());
        return m;
    }
    for c in &d.star {
        m.entry(dim_of(c)).or_default().push(c.clone());
    }
    m
}
