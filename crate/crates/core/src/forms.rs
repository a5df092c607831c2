//! Positive semidefinite rational quadratic forms, null-space splitting and
//! GL(ℤ) arithmetic equivalence.

use num::{BigInt, Signed, Zero};

use crate::error::{invalid, Error, Limits, Result};
use crate::lattice::points_in_ellipsoid;
use crate::matrix::{self, column_echelon, IntMatrix, RatMatrix};
use crate::rational::{lcm_of_denominators, Rational};

/// Symmetric positive semidefinite rational Gram matrix; `Q(x) = xᵀGx`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuadraticForm {
    gram: RatMatrix,
}

/// `Tᵀ·G·T = diag(reduced, 0)` with `T` unimodular; `projection` is the top
/// `rank` rows of `T⁻¹`, so that `Q(x) = reduced(projection·x)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SemidefiniteSplit {
    pub rank: usize,
    pub projection: IntMatrix,
    pub reduced: QuadraticForm,
    pub basis: IntMatrix,
}

impl QuadraticForm {
    pub fn new(gram: RatMatrix) -> Result<Self> {
        if !gram.is_square() {
            return invalid("Gram matrix must be square");
        }
        if !gram.is_symmetric() {
            return invalid("Gram matrix must be symmetric");
        }
        if !is_positive_semidefinite(&gram) {
            return invalid("quadratic form is not positive semidefinite");
        }
        Ok(QuadraticForm { gram })
    }

    pub fn from_integers(rows: Vec<Vec<i64>>) -> Result<Self> {
        Self::new(IntMatrix::from_i64(rows).to_rational())
    }

    pub fn zero(dim: usize) -> Self {
        QuadraticForm {
            gram: RatMatrix::zeros(dim, dim),
        }
    }

    pub fn dim(&self) -> usize {
        self.gram.rows()
    }

    pub fn gram(&self) -> &RatMatrix {
        &self.gram
    }

    pub fn rank(&self) -> usize {
        matrix::rank(&self.gram)
    }

    pub fn det(&self) -> Rational {
        matrix::det(&self.gram)
    }

    pub fn is_positive_definite(&self) -> bool {
        self.rank() == self.dim()
    }

    pub fn eval(&self, x: &[BigInt]) -> Rational {
        let v: Vec<Rational> = x.iter().cloned().map(Rational::from_integer).collect();
        let gv = self.gram.mul_vec(&v);
        v.iter().zip(&gv).fold(Rational::zero(), |acc, (a, b)| acc + a * b)
    }

    /// `h·G·hᵀ`.
    pub fn transform(&self, h: &IntMatrix) -> QuadraticForm {
        QuadraticForm {
            gram: h.to_rational().congruence(&self.gram),
        }
    }

    pub fn scale(&self, s: &Rational) -> QuadraticForm {
        QuadraticForm {
            gram: self.gram.map(|x| x * s),
        }
    }
}

/// Exact `LDLᵀ` with symmetric pivoting: pick any positive remaining diagonal
/// entry; a negative diagonal, or a zero diagonal with a nonzero row, refutes.
pub fn is_positive_semidefinite(m: &RatMatrix) -> bool {
    let mut a = m.clone();
    let n = a.rows();
    let mut alive: Vec<usize> = (0..n).collect();
    while !alive.is_empty() {
        if alive.iter().any(|&i| a[(i, i)].is_negative()) {
            return false;
        }
        let Some(k) = alive.iter().position(|&i| a[(i, i)].is_positive()) else {
            return alive
                .iter()
                .all(|&i| alive.iter().all(|&j| a[(i, j)].is_zero()));
        };
        let p = alive.remove(k);
        let piv = a[(p, p)].clone();
        for &i in &alive {
            let f = &a[(i, p)] / &piv;
            for &j in &alive {
                let t = &f * &a[(p, j)];
                a[(i, j)] -= t;
            }
        }
    }
    true
}

/// Splits off the null lattice unimodularly.
pub fn null_split(q: &QuadraticForm) -> SemidefiniteSplit {
    let g = q.dim();
    let mut echelon = q.gram.clone();
    let pivots = matrix::rref(&mut echelon);
    let r = pivots.len();
    // The nonzero rows of the rref span the row space; clear denominators.
    let rows: Vec<Vec<BigInt>> = (0..r)
        .map(|i| matrix::primitive_integer_vector(echelon.row(i)))
        .collect();
    let t = if r == 0 {
        IntMatrix::identity(g)
    } else {
        column_echelon(&IntMatrix::from_rows(rows)).1
    };
    let reduced_gram = {
        let full = t.transpose().to_rational().mul(&q.gram).mul(&t.to_rational());
        debug_assert!((0..g).all(|i| (r..g).all(|j| full[(i, j)].is_zero() && full[(j, i)].is_zero())));
        full.submatrix(0..r, 0..r)
    };
    let t_inv = t.unimodular_inverse().expect("echelon transform is unimodular");
    SemidefiniteSplit {
        rank: r,
        projection: t_inv.submatrix(0..r, 0..g),
        reduced: QuadraticForm { gram: reduced_gram },
        basis: t,
    }
}

/// All nonzero `v ∈ ℤᵍ` with `Q(v) ≤ bound`, sorted; `q` must be positive definite.
pub fn short_vectors(q: &QuadraticForm, bound: &Rational) -> Result<Vec<Vec<BigInt>>> {
    short_vectors_with(q, bound, &Limits::default())
}

pub fn short_vectors_with(q: &QuadraticForm, bound: &Rational, limits: &Limits) -> Result<Vec<Vec<BigInt>>> {
    if !q.is_positive_definite() {
        return invalid("short vectors need a positive definite form");
    }
    let center = vec![Rational::zero(); q.dim()];
    let pts = points_in_ellipsoid(&q.gram, &center, bound, limits.lattice_points)?;
    Ok(pts
        .into_iter()
        .filter(|p| p.iter().any(|&x| x != 0))
        .map(|p| p.into_iter().map(BigInt::from).collect())
        .collect())
}

/// Unimodular `h` with `h·q1·hᵀ = q2`, if one exists.
pub fn arithmetically_equivalent(q1: &QuadraticForm, q2: &QuadraticForm) -> Result<Option<IntMatrix>> {
    arithmetically_equivalent_with(q1, q2, &Limits::default())
}

pub fn arithmetically_equivalent_with(
    q1: &QuadraticForm,
    q2: &QuadraticForm,
    limits: &Limits,
) -> Result<Option<IntMatrix>> {
    if q1.dim() != q2.dim() {
        return invalid("forms of different dimension");
    }
    let (s1, s2) = (null_split(q1), null_split(q2));
    if s1.rank != s2.rank || s1.reduced.det() != s2.reduced.det() {
        return Ok(None);
    }
    let scale = Rational::from_integer(lcm_of_denominators(
        s1.reduced.gram.to_rows().iter().chain(s2.reduced.gram.to_rows().iter()).flatten(),
    ));
    let a1 = s1.reduced.scale(&scale);
    let a2 = s2.reduced.scale(&scale);
    let Some(hr) = definite_isometry(&a1, &a2, limits)? else {
        return Ok(None);
    };
    // h = T₂⁻ᵀ · diag(h_r, I) · T₁ᵀ
    let g = q1.dim();
    let ident = IntMatrix::identity(g - s1.rank);
    let t2_inv_t = s2
        .basis
        .unimodular_inverse()
        .expect("unimodular")
        .transpose();
    let h = t2_inv_t.mul(&hr.block_diag(&ident)).mul(&s1.basis.transpose());
    assert_eq!(q1.transform(&h), *q2, "arithmetic equivalence witness failed");
    Ok(Some(h))
}

/// Pairwise (Gauss-style) reduction: returns unimodular `R` whose columns
/// are a basis with no vector shortened by adding a multiple of another.
fn pairwise_reduce(a: &RatMatrix) -> IntMatrix {
    let n = a.rows();
    let mut r = IntMatrix::identity(n);
    let norm = |r: &IntMatrix, i: usize, j: usize| -> Rational {
        let mut s = Rational::zero();
        for x in 0..n {
            for y in 0..n {
                s += Rational::from_integer(&r[(x, i)] * &r[(y, j)]) * &a[(x, y)];
            }
        }
        s
    };
    loop {
        let mut changed = false;
        for i in 0..n {
            for j in 0..n {
                if i == j {
                    continue;
                }
                let nj = norm(&r, j, j);
                let k = (norm(&r, i, j) / nj).round().to_integer();
                if k.is_zero() {
                    continue;
                }
                let before = norm(&r, i, i);
                let mut trial = r.clone();
                for x in 0..n {
                    trial[(x, i)] = &r[(x, i)] - &k * &r[(x, j)];
                }
                if norm(&trial, i, i) < before {
                    r = trial;
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }
    // Shortest vectors first keeps the candidate lists small early on.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&i| norm(&r, i, i));
    IntMatrix::from_fn(n, n, |x, y| r[(x, order[y])].clone())
}

/// Unimodular `h` with `h·a1·hᵀ = a2` for positive definite forms.
fn definite_isometry(a1: &QuadraticForm, a2: &QuadraticForm, limits: &Limits) -> Result<Option<IntMatrix>> {
    let n = a1.dim();
    if n == 0 {
        return Ok(Some(IntMatrix::identity(0)));
    }
    let r = pairwise_reduce(&a1.gram);
    let target = r.transpose().to_rational().mul(&a1.gram).mul(&r.to_rational());
    let max_norm = (0..n).map(|i| target[(i, i)].clone()).max().expect("n > 0");
    let shorts = short_vectors_with(a2, &max_norm, limits)?;
    let vecs: Vec<Vec<Rational>> = shorts
        .iter()
        .map(|v| v.iter().cloned().map(Rational::from_integer).collect())
        .collect();
    let gv: Vec<Vec<Rational>> = vecs.iter().map(|v| a2.gram.mul_vec(v)).collect();
    let dot = |a: &[Rational], b: &[Rational]| a.iter().zip(b).fold(Rational::zero(), |s, (x, y)| s + x * y);
    let norms: Vec<Rational> = (0..vecs.len()).map(|k| dot(&vecs[k], &gv[k])).collect();
    let candidates: Vec<Vec<usize>> = (0..n)
        .map(|i| (0..vecs.len()).filter(|&k| norms[k] == target[(i, i)]).collect())
        .collect();
    let mut chosen = Vec::with_capacity(n);
    let mut budget = limits.witnesses;
    let found = backtrack(&candidates, &target, &vecs, &gv, &dot, &mut chosen, &mut budget)?;
    let Some(cols) = found else {
        return Ok(None);
    };
    // V' has the chosen vectors as columns: V'ᵀ a2 V' = target = Rᵀ a1 R.
    let vp = IntMatrix::from_fn(n, n, |x, y| shorts[cols[y]][x].clone());
    let v = vp.mul(&r.unimodular_inverse().expect("unimodular"));
    let h = v
        .unimodular_inverse()
        .expect("isometry between forms of equal determinant is unimodular")
        .transpose();
    Ok(Some(h))
}

fn backtrack(
    candidates: &[Vec<usize>],
    target: &RatMatrix,
    vecs: &[Vec<Rational>],
    gv: &[Vec<Rational>],
    dot: &dyn Fn(&[Rational], &[Rational]) -> Rational,
    chosen: &mut Vec<usize>,
    budget: &mut usize,
) -> Result<Option<Vec<usize>>> {
    let i = chosen.len();
    if i == candidates.len() {
        return Ok(Some(chosen.clone()));
    }
    for &k in &candidates[i] {
        if *budget == 0 {
            return Err(Error::Limit("isometry search exceeded its witness budget".into()));
        }
        *budget -= 1;
        let fits = chosen
            .iter()
            .enumerate()
            .all(|(j, &c)| dot(&vecs[k], &gv[c]) == target[(i, j)]);
        if !fits {
            continue;
        }
        chosen.push(k);
        if let Some(found) = backtrack(candidates, target, vecs, gv, dot, chosen, budget)? {
            return Ok(Some(found));
        }
        chosen.pop();
    }
    Ok(None)
}

/// True iff `h` is unimodular and `h·q1·hᵀ = q2` exactly.
pub fn verify_equivalence(q1: &QuadraticForm, q2: &QuadraticForm, h: &IntMatrix) -> bool {
    h.rows() == q1.dim() && h.is_unimodular() && q1.transform(h) == *q2
}
