//! Thin dense linear-algebra layer over `faer`.
//!
//! Everything in the crate stores matrices as `faer::Mat<C64>`; this module
//! keeps the handful of decompositions we need behind plain functions so the
//! physics modules never touch solver types directly.

use faer::linalg::solvers::{DenseSolveCore, Solve};
use faer::Mat;
use num_complex::Complex64 as C64;

use crate::error::{LadderError, Result};

pub type CMat = Mat<C64>;

pub const I: C64 = C64 { re: 0.0, im: 1.0 };
pub const ONE: C64 = C64 { re: 1.0, im: 0.0 };
pub const ZERO: C64 = C64 { re: 0.0, im: 0.0 };

#[inline]
pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

#[inline]
pub fn r(re: f64) -> C64 {
    C64::new(re, 0.0)
}

pub fn zeros(n: usize, m: usize) -> CMat {
    Mat::from_fn(n, m, |_, _| ZERO)
}

pub fn identity(n: usize) -> CMat {
    Mat::from_fn(n, n, |i, j| if i == j { ONE } else { ZERO })
}

/// Eigenvalues and right eigenvectors (columns), unsorted.
pub fn eig(m: &CMat) -> Result<(Vec<C64>, CMat)> {
    let e = m
        .eigen()
        .map_err(|e| LadderError::Eigensolver(format!("{e:?}")))?;
    let vals: Vec<C64> = e.S().column_vector().iter().copied().collect();
    let vecs = e.U().to_owned();
    Ok((vals, vecs))
}

pub fn eigenvalues(m: &CMat) -> Result<Vec<C64>> {
    m.eigenvalues()
        .map_err(|e| LadderError::Eigensolver(format!("{e:?}")))
}

/// Inverse via partial-pivot LU. Caller is responsible for conditioning.
pub fn inverse(m: &CMat) -> CMat {
    m.partial_piv_lu().inverse()
}

pub fn solve(m: &CMat, rhs: &[C64]) -> Vec<C64> {
    let mut b = Mat::from_fn(rhs.len(), 1, |i, _| rhs[i]);
    m.partial_piv_lu().solve_in_place(&mut b);
    (0..rhs.len()).map(|i| b[(i, 0)]).collect()
}

/// Singular values in nonincreasing order.
pub fn singular_values(m: &CMat) -> Result<Vec<f64>> {
    m.singular_values()
        .map_err(|e| LadderError::Eigensolver(format!("{e:?}")))
}

/// Numerical rank: singular values above `rel_tol * s_max`.
pub fn rank(m: &CMat, rel_tol: f64) -> Result<usize> {
    let s = singular_values(m)?;
    let smax = s.first().copied().unwrap_or(0.0);
    Ok(s.iter().filter(|&&x| x > rel_tol * smax).count())
}

/// Dimension of the numerical kernel with an absolute threshold on singular values.
pub fn kernel_dim(m: &CMat, abs_tol: f64) -> Result<usize> {
    let s = singular_values(m)?;
    Ok(s.iter().filter(|&&x| x <= abs_tol).count())
}

/// Roots of `c[0] x^d + c[1] x^{d-1} + ... + c[d]` from the companion matrix.
pub fn poly_roots(coeffs: &[C64]) -> Result<Vec<C64>> {
    let d = coeffs.len().saturating_sub(1);
    if d == 0 {
        return Ok(Vec::new());
    }
    let lead = coeffs[0];
    if lead.norm() == 0.0 {
        return Err(LadderError::RootDeficiency(0.0));
    }
    if d == 1 {
        return Ok(vec![-coeffs[1] / lead]);
    }
    let comp = Mat::from_fn(d, d, |i, j| {
        if i == 0 {
            -coeffs[j + 1] / lead
        } else if i == j + 1 {
            ONE
        } else {
            ZERO
        }
    });
    eigenvalues(&comp)
}

pub fn poly_eval(coeffs: &[C64], x: C64) -> C64 {
    coeffs.iter().fold(ZERO, |acc, &a| acc * x + a)
}

pub fn matvec(m: &CMat, v: &[C64]) -> Vec<C64> {
    let mut out = vec![ZERO; m.nrows()];
    for j in 0..m.ncols() {
        let vj = v[j];
        if vj == ZERO {
            continue;
        }
        for (i, o) in out.iter_mut().enumerate() {
            *o += m[(i, j)] * vj;
        }
    }
    out
}

pub fn matmul(a: &CMat, b: &CMat) -> CMat {
    a * b
}

pub fn adjoint(m: &CMat) -> CMat {
    Mat::from_fn(m.ncols(), m.nrows(), |i, j| m[(j, i)].conj())
}

pub fn conj(m: &CMat) -> CMat {
    Mat::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)].conj())
}

pub fn sub(a: &CMat, b: &CMat) -> CMat {
    Mat::from_fn(a.nrows(), a.ncols(), |i, j| a[(i, j)] - b[(i, j)])
}

pub fn scale(a: &CMat, s: C64) -> CMat {
    Mat::from_fn(a.nrows(), a.ncols(), |i, j| a[(i, j)] * s)
}

pub fn frob(m: &CMat) -> f64 {
    let mut s = 0.0;
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            s += m[(i, j)].norm_sqr();
        }
    }
    s.sqrt()
}

pub fn max_abs(m: &CMat) -> f64 {
    let mut s: f64 = 0.0;
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            s = s.max(m[(i, j)].norm());
        }
    }
    s
}

pub fn max_abs_diff(a: &CMat, b: &CMat) -> f64 {
    max_abs(&sub(a, b))
}

pub fn column(m: &CMat, j: usize) -> Vec<C64> {
    (0..m.nrows()).map(|i| m[(i, j)]).collect()
}

pub fn vnorm(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Conjugate-linear in the first argument.
pub fn vdot(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub fn normalize(v: &mut [C64]) {
    let n = vnorm(v);
    if n > 0.0 {
        v.iter_mut().for_each(|z| *z /= n);
    }
}

/// ‖M v − λ v‖ / ‖v‖.
pub fn eigen_residual(m: &CMat, v: &[C64], lambda: C64) -> f64 {
    let mv = matvec(m, v);
    let num: f64 = mv
        .iter()
        .zip(v)
        .map(|(a, b)| (a - lambda * b).norm_sqr())
        .sum::<f64>()
        .sqrt();
    num / vnorm(v)
}

/// Greedy matching of two complex multisets; returns the largest pair distance.
///
/// Good enough for the multiset comparisons in tests and sweeps: both sets are
/// sorted lexicographically and then each element of `a` takes the nearest
/// unused element of `b`.
pub fn multiset_distance(a: &[C64], b: &[C64]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    let mut used = vec![false; b.len()];
    let mut worst: f64 = 0.0;
    for x in a {
        let mut best = f64::INFINITY;
        let mut bi = usize::MAX;
        for (i, y) in b.iter().enumerate() {
            if used[i] {
                continue;
            }
            let d = (x - y).norm();
            if d < best {
                best = d;
                bi = i;
            }
        }
        used[bi] = true;
        worst = worst.max(best);
    }
    worst
}

pub fn sort_lex(v: &mut [C64]) {
    v.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
}

/// Principal-branch square root that stays exact on the real axis.
#[inline]
pub fn csqrt(z: C64) -> C64 {
    if z.im == 0.0 {
        if z.re >= 0.0 {
            r(z.re.sqrt())
        } else {
            c(0.0, (-z.re).sqrt())
        }
    } else {
        z.sqrt()
    }
}

/// Ordinary least squares for y ≈ a + b x; returns (a, b).
pub fn linear_fit(x: &[f64], y: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    for (a, b) in x.iter().zip(y) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
    }
    let slope = sxy / sxx;
    (my - slope * mx, slope)
}
