//! Exact Fincke–Pohst enumeration of lattice points in ellipsoids.

use num::{BigInt, Signed, Zero};

use crate::error::{Error, Result};
use crate::matrix::RatMatrix;
use crate::rational::{floor_to_i64, Rational};

/// `A = Uᵀ·D·U` with `U` unit upper triangular, so that
/// `xᵀAx = Σ dᵢ (xᵢ + Σ_{j>i} uᵢⱼ xⱼ)²`. Requires `A` positive definite.
pub(crate) fn square_completion(a: &RatMatrix) -> (Vec<Rational>, RatMatrix) {
    let n = a.rows();
    let mut d = vec![Rational::zero(); n];
    let mut u = RatMatrix::identity(n);
    for i in 0..n {
        let mut di = a[(i, i)].clone();
        for k in 0..i {
            di -= &d[k] * &u[(k, i)] * &u[(k, i)];
        }
        assert!(di.is_positive(), "form is not positive definite");
        for j in i + 1..n {
            let mut s = a[(i, j)].clone();
            for k in 0..i {
                s -= &d[k] * &u[(k, i)] * &u[(k, j)];
            }
            u[(i, j)] = s / &di;
        }
        d[i] = di;
    }
    (d, u)
}

/// All `x ∈ ℤⁿ` with `(x − c)ᵀ A (x − c) ≤ radius`, sorted. `A` must be
/// positive definite; more than `cap` points is a limit error.
pub fn points_in_ellipsoid(
    a: &RatMatrix,
    center: &[Rational],
    radius: &Rational,
    cap: usize,
) -> Result<Vec<Vec<i64>>> {
    let n = a.rows();
    assert_eq!(center.len(), n);
    if radius.is_negative() {
        return Ok(Vec::new());
    }
    if n == 0 {
        return Ok(vec![Vec::new()]);
    }
    let (d, u) = square_completion(a);
    let mut out = Vec::new();
    let mut x = vec![0i64; n];
    descend(&d, &u, center, n - 1, radius.clone(), &mut x, &mut out, cap)?;
    out.sort();
    Ok(out)
}

#[allow(clippy::too_many_arguments)]
fn descend(
    d: &[Rational],
    u: &RatMatrix,
    c: &[Rational],
    i: usize,
    remaining: Rational,
    x: &mut Vec<i64>,
    out: &mut Vec<Vec<i64>>,
    cap: usize,
) -> Result<()> {
    let n = x.len();
    // Coordinate i is centered at m = cᵢ − Σ_{j>i} uᵢⱼ (xⱼ − cⱼ).
    let mut m = c[i].clone();
    for j in i + 1..n {
        m -= &u[(i, j)] * (Rational::from_integer(BigInt::from(x[j])) - &c[j]);
    }
    let cost = |v: i64| {
        let t = Rational::from_integer(BigInt::from(v)) - &m;
        &d[i] * &t * &t
    };
    let start = floor_to_i64(&m);
    let mut values = Vec::new();
    let mut v = start;
    while cost(v) <= remaining {
        values.push(v);
        v -= 1;
    }
    let mut v = start + 1;
    while cost(v) <= remaining {
        values.push(v);
        v += 1;
    }
    for v in values {
        x[i] = v;
        let rest = &remaining - cost(v);
        if i == 0 {
            out.push(x.clone());
            if out.len() > cap {
                return Err(Error::Limit(format!("more than {cap} lattice points in ellipsoid")));
            }
        } else {
            descend(d, u, c, i - 1, rest, x, out, cap)?;
        }
    }
    x[i] = 0;
    Ok(())
}
