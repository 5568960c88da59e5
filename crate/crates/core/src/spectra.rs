//! Dispersions, dense diagonalization with biorthonormal eigenvectors,
//! exceptional points, the PT threshold, band overlap and the closed-form
//! open-boundary spectra.

use std::f64::consts::PI;

use faer::Mat;
use log::warn;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{LadderError, Result};
use crate::linalg::{self, c, csqrt, r, CMat, ONE, ZERO};
use crate::model::{build_bloch, LadderParams};

/// Default k-grid for threshold scans.
pub const THRESHOLD_GRID: usize = 2048;

/// Normalized ⟨L|R⟩ overlap below which a pair is treated as sitting at an EP.
pub const NEAR_EP_OVERLAP: f64 = 1e-6;

#[derive(Clone, Debug)]
pub struct ComplexSpectrum {
    /// Sorted lexicographically by (Re, Im).
    pub eigenvalues: Vec<C64>,
    /// Unit-norm right eigenvectors, one per column.
    pub right_vectors: CMat,
    /// Left eigenvectors with ⟨L_i|R_j⟩ = δ_ij.
    pub left_vectors: CMat,
    /// max |L†R − 1|.
    pub biorth_residual: f64,
    /// Indices whose normalized overlap |⟨L|R⟩|/(‖L‖‖R‖) fell below `NEAR_EP_OVERLAP`.
    pub near_ep: Vec<usize>,
}

impl ComplexSpectrum {
    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    pub fn right(&self, i: usize) -> Vec<C64> {
        linalg::column(&self.right_vectors, i)
    }

    pub fn left(&self, i: usize) -> Vec<C64> {
        linalg::column(&self.left_vectors, i)
    }
}

/// Full eigendecomposition. Left vectors are the conjugated rows of R⁻¹,
/// which makes the pairing exact by construction whenever R is invertible.
pub fn diagonalize(m: &CMat) -> Result<ComplexSpectrum> {
    let n = m.nrows();
    let (vals, vecs) = linalg::eig(m)?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| vals[a].re.total_cmp(&vals[b].re).then(vals[a].im.total_cmp(&vals[b].im)));

    let eigenvalues: Vec<C64> = order.iter().map(|&i| vals[i]).collect();
    let mut right: CMat = Mat::from_fn(n, n, |i, j| vecs[(i, order[j])]);
    for j in 0..n {
        let mut nrm = 0.0;
        for i in 0..n {
            nrm += right[(i, j)].norm_sqr();
        }
        let nrm = nrm.sqrt();
        if nrm > 0.0 {
            for i in 0..n {
                right[(i, j)] /= nrm;
            }
        }
    }
    let rinv = linalg::inverse(&right);
    let left = linalg::adjoint(&rinv);

    let gram = &linalg::adjoint(&left) * &right;
    let mut resid: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            let target = if i == j { ONE } else { ZERO };
            let d = (gram[(i, j)] - target).norm();
            resid = if d.is_finite() { resid.max(d) } else { f64::INFINITY };
        }
    }
    let mut near_ep = Vec::new();
    for j in 0..n {
        let lnorm: f64 = (0..n).map(|i| left[(i, j)].norm_sqr()).sum::<f64>().sqrt();
        let overlap = 1.0 / lnorm;
        if !overlap.is_finite() || overlap < NEAR_EP_OVERLAP {
            near_ep.push(j);
        }
    }
    if resid > 1e-6 {
        warn!("biorthogonality residual {resid:.2e}: spectrum close to an exceptional point");
    }
    Ok(ComplexSpectrum { eigenvalues, right_vectors: right, left_vectors: left, biorth_residual: resid, near_ep })
}

/// Eigenvalues only, sorted by (Re, Im).
pub fn eigenvalues(m: &CMat) -> Result<Vec<C64>> {
    let mut v = linalg::eigenvalues(m)?;
    linalg::sort_lex(&mut v);
    Ok(v)
}

/// (E₊, E₋) at momentum k. Closed forms in the P-symmetric and sublattice
/// regimes, eigenvalues of the Bloch matrix otherwise.
pub fn dispersion(p: &LadderParams, k: f64) -> (C64, C64) {
    let (s, co) = k.sin_cos();
    let (j, t0, eta, d) = (p.j_amp, p.t0, p.eta(), p.delta);
    if p.is_p_symmetric() {
        let rad = (t0 * t0 - t0 * t0 * d * d + j * j * eta * eta) * co * co + t0 * t0 * d * d - j * j * eta * eta;
        let root = 2.0 * csqrt(r(rad));
        let base = r(2.0 * j * co);
        (base + root, base - root)
    } else if p.is_sublattice() {
        let base = c(2.0 * j * co, 2.0 * eta * j * s);
        let w = r(2.0 * t0 * co.abs());
        (base + w, base - w)
    } else {
        build_bloch(p, k).energies()
    }
}

/// Both bands sampled on k_m = 2πm/N, m = 0..N.
pub fn pbc_energies(p: &LadderParams, n: usize) -> Vec<C64> {
    let mut out = Vec::with_capacity(2 * n);
    for m in 0..n {
        let (ep, em) = dispersion(p, 2.0 * PI * m as f64 / n as f64);
        out.push(ep);
        out.push(em);
    }
    linalg::sort_lex(&mut out);
    out
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EpSet {
    pub xi: f64,
    /// Sorted ascending.
    pub momenta: Vec<f64>,
}

/// ξ = (J²η² − t0²δ²) / [t0²(1 − δ²) + J²η²].
pub fn ep_xi(p: &LadderParams) -> f64 {
    let (j, t0, eta, d) = (p.j_amp, p.t0, p.eta(), p.delta);
    (j * j * eta * eta - t0 * t0 * d * d) / (t0 * t0 * (1.0 - d * d) + j * j * eta * eta)
}

pub fn exceptional_points(p: &LadderParams) -> Result<EpSet> {
    p.require_p_symmetric("exceptional_points")?;
    let xi = ep_xi(p);
    let gap = (p.j_amp * p.eta()).abs() - (p.t0 * p.delta).abs();
    let momenta = if gap.abs() <= 1e-12 {
        vec![-PI / 2.0, PI / 2.0]
    } else if gap < 0.0 {
        Vec::new()
    } else {
        let k1 = xi.sqrt().acos();
        let k2 = PI - k1;
        vec![-k2, -k1, k1, k2]
    };
    Ok(EpSet { xi, momenta })
}

/// max_k |Im E(k)| on a uniform grid k_m = −π + 2πm/grid (contains ±π/2 when
/// grid is a multiple of 4).
pub fn max_imag_pbc(p: &LadderParams, grid: usize) -> f64 {
    (0..grid)
        .map(|m| {
            let k = -PI + 2.0 * PI * m as f64 / grid as f64;
            let (a, b) = build_bloch(p, k).energies();
            a.im.abs().max(b.im.abs())
        })
        .fold(0.0, f64::max)
}

/// Gain-loss strength at which the PBC spectrum first turns complex, found by
/// bisection on `max_imag_pbc > tol` to a bracket width of 1e-9.
pub fn pt_threshold_gamma(p: &LadderParams, gamma_range: (f64, f64), tol: f64) -> Result<f64> {
    if !p.eta_antisymmetric() {
        return Err(LadderError::Regime("pt_threshold_gamma needs eta_a = -eta_b".into()));
    }
    let broken = |g: f64| max_imag_pbc(&p.with_gamma(g), THRESHOLD_GRID) > tol;
    if broken(0.0) {
        return Ok(0.0);
    }
    let (mut lo, mut hi) = gamma_range;
    let (blo, bhi) = (broken(lo), broken(hi));
    if blo == bhi {
        return Err(LadderError::NoTransition { lo, hi });
    }
    if blo {
        std::mem::swap(&mut lo, &mut hi);
    }
    for _ in 0..200 {
        if (hi - lo).abs() < 1e-9 {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if broken(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Closed form 2t0|δ| − 2|Jη| (clipped at zero); the radicand is concave in
/// sin k so its minimum sits at k = ±π/2.
pub fn pt_threshold_closed_form(p: &LadderParams) -> f64 {
    (2.0 * p.t0 * p.delta.abs() - 2.0 * (p.j_amp * p.eta()).abs()).max(0.0)
}

fn interval(a: f64, b: f64) -> (f64, f64) {
    (a.min(b), a.max(b))
}

/// Whether the real segments of the two PBC bands overlap.
pub fn band_overlap(p: &LadderParams) -> Result<bool> {
    p.require_p_symmetric("band_overlap")?;
    let broken = (p.j_amp * p.eta()).abs() > (p.t0 * p.delta).abs();
    let em = |k: f64| dispersion(p, k).1.re;
    let ep = |k: f64| dispersion(p, k).0.re;
    let (i1, i2) = if broken {
        let eps = exceptional_points(p)?;
        let k1 = eps.momenta[2];
        let k2 = eps.momenta[3];
        // at the EPs the radicand vanishes and both branches equal 2J cos k
        let e1 = 2.0 * p.j_amp * k1.cos();
        let e2 = 2.0 * p.j_amp * k2.cos();
        (interval(em(0.0), e1), interval(e2, ep(PI)))
    } else {
        (interval(em(PI), em(0.0)), interval(ep(PI), ep(0.0)))
    };
    Ok(i1.0 <= i2.1 && i2.0 <= i1.1)
}

/// d± = (J ± t0)² − (Jη)².
pub fn d_pm(p: &LadderParams) -> (f64, f64) {
    let (j, t0, eta) = (p.j_amp, p.t0, p.eta());
    ((j + t0).powi(2) - (j * eta).powi(2), (j - t0).powi(2) - (j * eta).powi(2))
}

/// Closed-form OBC spectrum in the sublattice regime: the (E₊ⱼ, E₋ⱼ) families,
/// E±ⱼ = 2√d± cos(jπ/(N+1)), j = 1..N.
pub fn exact_obc_sublattice(p: &LadderParams) -> Result<(Vec<C64>, Vec<C64>)> {
    p.require_sublattice("exact_obc_sublattice")?;
    let n = p.n_cells;
    let (dp, dm) = d_pm(p);
    let (sp, sm) = (csqrt(r(dp)), csqrt(r(dm)));
    let fam = |s: C64| -> Vec<C64> {
        (1..=n).map(|j| 2.0 * s * (j as f64 * PI / (n as f64 + 1.0)).cos()).collect()
    };
    Ok((fam(sp), fam(sm)))
}

/// Rung-coupled pair of Hatano–Nelson chains: 2J√(1−η²)cos(jπ/(N+1)) ± t0.
pub fn exact_obc_rung(j_amp: f64, eta: f64, t0: f64, n: usize) -> (Vec<C64>, Vec<C64>) {
    let w = 2.0 * j_amp * csqrt(r(1.0 - eta * eta));
    let fam = |s: f64| -> Vec<C64> {
        (1..=n).map(|j| w * (j as f64 * PI / (n as f64 + 1.0)).cos() + s * t0).collect()
    };
    (fam(1.0), fam(-1.0))
}

/// Outcome of the diagonal similarity transform that symmetrizes H_HN ± H_I.
#[derive(Clone, Debug)]
pub struct SimilarityCheck {
    /// S (H_HN ± H_I) S⁻¹ computed by dense products.
    pub transformed: CMat,
    /// Closed-form off-diagonal value; its square is d±.
    pub offdiag: C64,
    /// max entrywise deviation from the symmetric tridiagonal target.
    pub max_deviation: f64,
}

/// `sign = +1` or `-1` selects H_HN + H_I or H_HN − H_I in the sublattice regime.
pub fn similarity_transform(p: &LadderParams, sign: f64) -> Result<SimilarityCheck> {
    p.require_sublattice("similarity_transform")?;
    let n = p.n_cells;
    let (j, t0, eta) = (p.j_amp, p.t0, p.eta());
    let upper = j + sign * t0 + j * eta;
    let lower = j + sign * t0 - j * eta;
    let a: CMat = Mat::from_fn(n, n, |row, col| {
        if col == row + 1 {
            r(upper)
        } else if row == col + 1 {
            r(lower)
        } else {
            ZERO
        }
    });
    let ratio = r(upper / lower);
    let sdiag: Vec<C64> = (0..n)
        .map(|m| ratio.powf((2.0 * m as f64 + 1.0 - n as f64) / 4.0))
        .collect();
    let s: CMat = Mat::from_fn(n, n, |i, k| if i == k { sdiag[i] } else { ZERO });
    let sinv: CMat = Mat::from_fn(n, n, |i, k| if i == k { ONE / sdiag[i] } else { ZERO });
    let transformed = &(&s * &a) * &sinv;
    // same branch as the diagonal powers
    let offdiag = upper * ratio.powf(-0.5);
    let target: CMat = Mat::from_fn(n, n, |row, col| if row.abs_diff(col) == 1 { offdiag } else { ZERO });
    let max_deviation = linalg::max_abs_diff(&transformed, &target);
    Ok(SimilarityCheck { transformed, offdiag, max_deviation })
}
