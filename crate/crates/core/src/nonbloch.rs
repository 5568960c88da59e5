//! Non-Bloch analysis: A- and β-roots of the characteristic polynomial, GBZ
//! samples built from OBC spectra, amplitude ratios X, the boundary
//! determinant, the scale-free criterion, migration, profile fits and the
//! sublattice-regime mode-weight ratio.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{LadderError, Result};
use crate::linalg::{self, csqrt, r, I, ONE, ZERO};
use crate::model::{build_bloch, build_realspace, Boundary, LadderParams};
use crate::spectra::{d_pm, exact_obc_sublattice};

/// Relative modulus gap under which two β's count as lying on the same circle.
const MODULUS_TIE: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BetaRegime {
    PSymmetric,
    Sublattice,
    General,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BetaQuartet {
    pub energy: C64,
    /// A-roots (A₁, A₂); only set in the P-symmetric regime.
    pub a_roots: Option<(C64, C64)>,
    /// Ascending modulus, ties broken by ascending argument.
    pub betas: [C64; 4],
    pub regime: BetaRegime,
    /// Sublattice regime only: the (β₁, β₄) and (β₂, β₃) pairs in closed-form labeling.
    pub sublattice_pairs: Option<[(C64, C64); 2]>,
}

impl BetaQuartet {
    pub fn moduli(&self) -> [f64; 4] {
        self.betas.map(|b| b.norm())
    }
}

/// χ = t0²(1 − δ²) − J²(1 − η²).
pub fn chi(p: &LadderParams) -> f64 {
    let (j, t0, eta, d) = (p.j_amp, p.t0, p.eta(), p.delta);
    t0 * t0 * (1.0 - d * d) - j * j * (1.0 - eta * eta)
}

/// Quadratic in A whose roots are the A-roots: χA² + 2JEA − E² + 4(t0²δ² − J²η²).
pub fn a_quadratic(p: &LadderParams, e: C64, a: C64) -> C64 {
    let (j, t0, eta, d) = (p.j_amp, p.t0, p.eta(), p.delta);
    chi(p) * a * a + 2.0 * j * e * a - e * e + 4.0 * (t0 * t0 * d * d - j * j * eta * eta)
}

/// A_{1,2} = (−JE ∓ √F)/χ. With χ = 0 the quadratic drops to a linear
/// equation and a single root is returned.
pub fn a_roots(p: &LadderParams, e: C64) -> Result<Vec<C64>> {
    p.require_p_symmetric("a_roots")?;
    let (j, t0, eta, d) = (p.j_amp, p.t0, p.eta(), p.delta);
    let x = chi(p);
    let g = j * j * eta * eta - t0 * t0 * d * d;
    if x.abs() < 1e-14 {
        if (j * e).norm() == 0.0 {
            return Err(LadderError::Singular("A-equation is degenerate at E = 0 with chi = 0".into()));
        }
        return Ok(vec![(e * e + 4.0 * g) / (2.0 * j * e)]);
    }
    let f = (t0 * t0 * (1.0 - d * d) + j * j * eta * eta) * e * e + 4.0 * x * g;
    let s = csqrt(f);
    Ok(vec![(-j * e - s) / x, (-j * e + s) / x])
}

/// Coefficients (highest power first) of β²·det[H(β) − E].
pub fn quartic_coeffs(p: &LadderParams, e: C64) -> [C64; 5] {
    let g = I * p.gamma;
    let paa = [r(p.jp_a()), g - e, r(p.jm_a())];
    let pbb = [r(p.jp_b()), -g - e, r(p.jm_b())];
    let pab = [r(p.t2()), ZERO, r(p.t1())];
    let pba = [r(p.t1()), ZERO, r(p.t2())];
    let mut out = [ZERO; 5];
    for i in 0..3 {
        for k in 0..3 {
            out[i + k] += paa[i] * pbb[k] - pab[i] * pba[k];
        }
    }
    out
}

/// f(β, E) = det[H(β) − E] as a Laurent polynomial.
pub fn char_poly(p: &LadderParams, beta: C64, e: C64) -> C64 {
    linalg::poly_eval(&quartic_coeffs(p, e), beta) / (beta * beta)
}

fn sort_betas(mut v: Vec<C64>) -> [C64; 4] {
    v.sort_by(|a, b| a.norm().total_cmp(&b.norm()));
    // group near-equal moduli, then order each group by argument
    let mut i = 0;
    while i < v.len() {
        let mut k = i + 1;
        while k < v.len() && (v[k].norm() - v[i].norm()).abs() <= MODULUS_TIE * v[i].norm().max(1.0) {
            k += 1;
        }
        v[i..k].sort_by(|a, b| a.arg().total_cmp(&b.arg()));
        i = k;
    }
    [v[0], v[1], v[2], v[3]]
}

fn beta_pair(a: C64) -> (C64, C64) {
    let s = csqrt(a * a - 4.0);
    ((a + s) / 2.0, (a - s) / 2.0)
}

/// β-roots at energy E. Closed forms in the P-symmetric and sublattice
/// regimes, companion-matrix roots of the quartic otherwise.
pub fn beta_roots(p: &LadderParams, e: C64) -> Result<BetaQuartet> {
    let lead = quartic_coeffs(p, e)[0].norm();
    if lead < 1e-14 {
        return Err(LadderError::RootDeficiency(lead));
    }
    if p.is_p_symmetric() {
        let a = a_roots(p, e)?;
        let (a1, a2) = (a[0], a[1]);
        let (b1, b1i) = beta_pair(a1);
        let (b2, b2i) = beta_pair(a2);
        return Ok(BetaQuartet {
            energy: e,
            a_roots: Some((a1, a2)),
            betas: sort_betas(vec![b1, b1i, b2, b2i]),
            regime: BetaRegime::PSymmetric,
            sublattice_pairs: None,
        });
    }
    if p.is_sublattice() {
        let (dp, dm) = d_pm(p);
        let (j, t0, eta) = (p.j_amp, p.t0, p.eta());
        let sm = csqrt(e * e - 4.0 * dm);
        let sp = csqrt(e * e - 4.0 * dp);
        let den14 = 2.0 * (j - t0 + j * eta);
        let den23 = 2.0 * (j + t0 + j * eta);
        let b1 = (e + sm) / den14;
        let b4 = (e - sm) / den14;
        let b2 = (e + sp) / den23;
        let b3 = (e - sp) / den23;
        return Ok(BetaQuartet {
            energy: e,
            a_roots: None,
            betas: sort_betas(vec![b1, b2, b3, b4]),
            regime: BetaRegime::Sublattice,
            sublattice_pairs: Some([(b1, b4), (b2, b3)]),
        });
    }
    let roots = linalg::poly_roots(&quartic_coeffs(p, e))?;
    Ok(BetaQuartet {
        energy: e,
        a_roots: None,
        betas: sort_betas(roots),
        regime: BetaRegime::General,
        sublattice_pairs: None,
    })
}

/// max over the quartet of |f(β, E)| relative to the size of its terms.
pub fn quartet_residual(p: &LadderParams, q: &BetaQuartet) -> f64 {
    let c = quartic_coeffs(p, q.energy);
    q.betas
        .iter()
        .map(|&b| {
            let scale: f64 = c.iter().enumerate().map(|(i, a)| a.norm() * b.norm().powi(4 - i as i32)).sum();
            linalg::poly_eval(&c, b).norm() / scale.max(1e-300)
        })
        .fold(0.0, f64::max)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GbzSample {
    pub quartets: Vec<BetaQuartet>,
    /// |β₂| = second-smallest modulus per quartet.
    pub middle_moduli: Vec<f64>,
    /// Sublattice regime: modulus of the pair that dominates each eigenstate
    /// (β₂,₃ or β₁,₄ as selected by the mode-weight ratio).
    pub circle_moduli: Option<Vec<f64>>,
}

/// One quartet per OBC eigenvalue. In the sublattice regime the exact
/// closed-form energies are used so the circle radii come out exact.
pub fn gbz_from_obc(p: &LadderParams) -> Result<GbzSample> {
    let pp = LadderParams { boundary: Boundary::Open, ..*p };
    let energies: Vec<C64> = if pp.is_sublattice() {
        let (a, b) = exact_obc_sublattice(&pp)?;
        a.into_iter().chain(b).collect()
    } else {
        crate::spectra::eigenvalues(&build_realspace(&pp))?
    };
    let quartets: Vec<BetaQuartet> = energies
        .par_iter()
        .map(|&e| beta_roots(&pp, e))
        .collect::<Result<Vec<_>>>()?;
    let middle_moduli = quartets.iter().map(|q| q.betas[1].norm()).collect();
    let circle_moduli = if pp.is_sublattice() {
        let n = pp.n_cells;
        Some(
            quartets
                .iter()
                .map(|q| {
                    let pairs = q.sublattice_pairs.expect("sublattice quartet");
                    let w = mode_weight_ratio_from_pairs(&pairs, n);
                    if w.dominant == DominantPair::Pair23 {
                        pairs[1].0.norm()
                    } else {
                        pairs[0].0.norm()
                    }
                })
                .collect(),
        )
    } else {
        None
    };
    Ok(GbzSample { quartets, middle_moduli, circle_moduli })
}

/// √|(J − t0 − Jη)/(J − t0 + Jη)| and √|(J + t0 − Jη)/(J + t0 + Jη)|.
pub fn gbz_radii(p: &LadderParams) -> (f64, f64) {
    let (j, t0, eta) = (p.j_amp, p.t0, p.eta());
    (
        ((j - t0 - j * eta) / (j - t0 + j * eta)).abs().sqrt(),
        ((j + t0 - j * eta) / (j + t0 + j * eta)).abs().sqrt(),
    )
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AmplitudeRatios {
    /// [X^(+1), X^(−1), X^(+2), X^(−2)].
    pub x_ratios: [C64; 4],
    /// β₁ and the orientation of β₂ used for X^(±2).
    pub beta1: C64,
    pub beta2: C64,
    /// Λ = (X^(+1) − X^(+2)) / (X^(−2) − X^(+1)).
    pub lambda_coeff: C64,
    /// M = ln|(1 − X^(+1)X^(+2)) / (X^(+1) − X^(+2))|.
    pub migration: f64,
    /// |β₂| = 1 only: whether X^(+2) agrees with the Bloch eigenvector ratio at θ₂.
    pub unit_circle_consistent: Option<bool>,
}

fn x_of(p: &LadderParams, e: C64, beta: C64, sign: f64) -> Result<C64> {
    let a = beta + ONE / beta;
    let b = beta - ONE / beta;
    let (j, t0, eta, d) = (p.j_amp, p.t0, p.eta(), p.delta);
    let den = t0 * a + sign * t0 * d * b;
    if den.norm() < 1e-14 {
        return Err(LadderError::Singular(format!("X ratio denominator vanishes at beta = {beta}")));
    }
    Ok((e - j * a - sign * j * eta * b) / den)
}

/// X^(±i) = ν/μ for the plane wave β_i^{±j}. β₂'s orientation (β₂ or 1/β₂)
/// is chosen so that |(X₁ − X₂)/(1 − X₁X₂)| ≤ 1.
pub fn x_ratios(p: &LadderParams, energy: C64, quartet: &BetaQuartet) -> Result<AmplitudeRatios> {
    p.require_p_symmetric("x_ratios")?;
    let e = energy;
    let beta1 = quartet.betas[0];
    let mut beta2 = quartet.betas[1];
    let x1 = x_of(p, e, beta1, 1.0)?;
    let xm1 = x_of(p, e, beta1, -1.0)?;
    let mut x2 = x_of(p, e, beta2, 1.0)?;
    let mut xm2 = x_of(p, e, beta2, -1.0)?;
    let lim = |x2: C64| ((x1 - x2) / (ONE - x1 * x2)).norm();
    if lim(x2) > 1.0 && lim(xm2) <= lim(x2) {
        beta2 = ONE / beta2;
        std::mem::swap(&mut x2, &mut xm2);
    }
    let lambda_coeff = (x1 - x2) / (xm2 - x1);
    let migration = if (x1 - x2).norm() == 0.0 {
        f64::INFINITY
    } else {
        ((ONE - x1 * x2) / (x1 - x2)).norm().ln()
    };
    let unit_circle_consistent = if (beta2.norm() - 1.0).abs() < 1e-10 {
        let b = build_bloch(p, beta2.arg());
        let root = csqrt(b.radicand());
        let den = b.hx - I * b.hy;
        let cands = [(root - I * b.hz) / den, (-root - I * b.hz) / den];
        let tol = 1e-8 * (1.0 + x2.norm());
        Some(cands.iter().any(|c| (c - x2).norm() < tol))
    } else {
        None
    };
    Ok(AmplitudeRatios { x_ratios: [x1, xm1, x2, xm2], beta1, beta2, lambda_coeff, migration, unit_circle_consistent })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundaryResult {
    pub parity_sign: f64,
    /// det K.
    pub det_residual: C64,
    /// Frobenius norm of K, for scaling the residual.
    pub k_norm: f64,
    /// μ^(+1)/μ^(+2) from the leading-order estimate.
    pub weight_ratio: C64,
    /// ±(X₁ − X₂)/(1 − X₁X₂), the leading-order estimate of β₂^{N+1}.
    pub beta2_pow_estimate: C64,
}

/// Boundary matrix K of the two-wave ansatz for the given parity sign (±1).
pub fn boundary_system(
    p: &LadderParams,
    energy: C64,
    quartet: &BetaQuartet,
    n_cells: usize,
    parity_sign: f64,
) -> Result<BoundaryResult> {
    let rat = x_ratios(p, energy, quartet)?;
    let [x1, _, x2, xm2] = rat.x_ratios;
    let m = (n_cells + 1) as i32;
    let p1 = rat.beta1.powi(m);
    let p2 = rat.beta2.powi(m);
    let s = parity_sign;
    let k = [[ONE + s * p1 * x1, ONE + s * p2 * x2], [x1 + s * p1, x2 + s * p2]];
    let det = k[0][0] * k[1][1] - k[0][1] * k[1][0];
    let k_norm = k.iter().flatten().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    Ok(BoundaryResult {
        parity_sign: s,
        det_residual: det,
        k_norm,
        weight_ratio: (x2 - xm2) / (xm2 - x1),
        beta2_pow_estimate: s * (x1 - x2) / (ONE - x1 * x2),
    })
}

/// Both parity signs, returning the one with the smaller |det K|/‖K‖.
pub fn boundary_best(p: &LadderParams, energy: C64, quartet: &BetaQuartet, n_cells: usize) -> Result<BoundaryResult> {
    let a = boundary_system(p, energy, quartet, n_cells, 1.0)?;
    let b = boundary_system(p, energy, quartet, n_cells, -1.0)?;
    let score = |x: &BoundaryResult| x.det_residual.norm() / x.k_norm;
    Ok(if score(&a) <= score(&b) { a } else { b })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SfClass {
    Extended,
    ScaleFree,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SfReport {
    pub class: SfClass,
    /// |(X₁ − X₂)/(1 − X₁X₂)|, the large-N limit of |β₂|^N.
    pub limit_modulus: f64,
    /// N/(N+1)·M for the requested chain length.
    pub migration_at_n: f64,
}

pub const SF_TOL: f64 = 1e-3;

/// Scale-free iff the limit modulus sits below 1 − tol. A quartet lying
/// entirely on the unit circle is extended.
pub fn sf_classify(p: &LadderParams, energy: C64, n_cells: usize) -> Result<SfReport> {
    sf_classify_tol(p, energy, n_cells, SF_TOL)
}

pub fn sf_classify_tol(p: &LadderParams, energy: C64, n_cells: usize, tol: f64) -> Result<SfReport> {
    let q = beta_roots(p, energy)?;
    let rat = x_ratios(p, energy, &q)?;
    let nn = n_cells as f64;
    // all four roots on the unit circle: no decaying wave to pair with
    if q.betas.iter().all(|b| (b.norm() - 1.0).abs() < 1e-9) {
        return Ok(SfReport { class: SfClass::Extended, limit_modulus: 1.0, migration_at_n: 0.0 });
    }
    let [x1, _, x2, _] = rat.x_ratios;
    let limit_modulus = ((x1 - x2) / (ONE - x1 * x2)).norm();
    let class = if limit_modulus < 1.0 - tol { SfClass::ScaleFree } else { SfClass::Extended };
    Ok(SfReport { class, limit_modulus, migration_at_n: nn / (nn + 1.0) * rat.migration })
}

/// Extreme migration M(E) in the large-N limit.
pub fn migration(p: &LadderParams, energy: C64) -> Result<f64> {
    let q = beta_roots(p, energy)?;
    let rat = x_ratios(p, energy, &q)?;
    if !rat.migration.is_finite() {
        return Err(LadderError::Singular("X^(+1) = X^(+2): migration undefined".into()));
    }
    Ok(rat.migration)
}

/// Large-Jη asymptote of M at momentum k.
pub fn migration_asymptote(p: &LadderParams, k: f64) -> f64 {
    let eta = p.eta();
    let e2 = C64::from_polar(1.0, 2.0 * k);
    let e4 = e2 * e2;
    let a = (1.0 - eta).powi(2);
    let b = (1.0 + eta).powi(2);
    let num = (e2 - 1.0) * (e2 * a - b) * (p.j_amp * eta);
    let den = (e4 * a - b) * p.t0;
    (num / den).norm().ln()
}

/// ln|J(1 + η²)/t0|, the k = ±π/2 value of the asymptote.
pub fn migration_strong_coupling(p: &LadderParams) -> f64 {
    (p.j_amp * (1.0 + p.eta() * p.eta()) / p.t0).abs().ln()
}

/// −N ln|β₂| at a finite-N OBC eigenvalue, after polishing the eigenvalue as a
/// root of det K with a few secant steps.
pub fn finite_size_migration(p: &LadderParams, e_obc: C64, n_cells: usize) -> Result<(C64, f64)> {
    let e = refine_boundary_root(p, e_obc, n_cells).unwrap_or(e_obc);
    let q = beta_roots(p, e)?;
    Ok((e, -(n_cells as f64) * q.betas[1].norm().ln()))
}

fn boundary_det(p: &LadderParams, e: C64, n: usize, sign: f64) -> Result<C64> {
    let q = beta_roots(p, e)?;
    Ok(boundary_system(p, e, &q, n, sign)?.det_residual)
}

/// Secant iteration on det K(E) starting from an approximate eigenvalue.
pub fn refine_boundary_root(p: &LadderParams, e0: C64, n: usize) -> Result<C64> {
    let q = beta_roots(p, e0)?;
    let sign = boundary_best(p, e0, &q, n)?.parity_sign;
    let mut xa = e0;
    let mut xb = e0 + C64::new(1e-7, 1e-7) * (1.0 + e0.norm());
    let mut fa = boundary_det(p, xa, n, sign)?;
    let mut fb = boundary_det(p, xb, n, sign)?;
    let start = fa.norm();
    for _ in 0..40 {
        let den = fb - fa;
        if den.norm() == 0.0 {
            break;
        }
        let xc = xb - fb * (xb - xa) / den;
        xa = xb;
        fa = fb;
        xb = xc;
        fb = boundary_det(p, xb, n, sign)?;
        if (xb - xa).norm() < 1e-14 * (1.0 + xb.norm()) {
            break;
        }
    }
    if fb.norm().is_finite() && fb.norm() <= start && (xb - e0).norm() < 1e-3 * (1.0 + e0.norm()) {
        Ok(xb)
    } else {
        Ok(e0)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProfileFit {
    /// c₂/c₁ from fitting μ_j ≈ c₁β₂^j + c₂β₂^{−j}.
    pub lambda_fit: C64,
    /// Λ from the amplitude ratios.
    pub lambda_coeff: C64,
    /// Π(j) = |β₂|^{2j} + |β₂|^{−2j}|Λ|², j = 1..N.
    pub pi_profile: Vec<f64>,
    /// (l = j/N, e^{−2Ml} + e^{2Ml}|Λ|²).
    pub pi_rescaled: Vec<(f64, f64)>,
    /// ‖μ − fit‖/‖μ‖.
    pub fit_residual: f64,
}

/// Two-wave decomposition of the leg-a amplitudes of an eigenstate.
pub fn profile_decomposition(
    state: &[C64],
    quartet: &BetaQuartet,
    ratios: &AmplitudeRatios,
    n_cells: usize,
) -> Result<ProfileFit> {
    let _ = quartet;
    let n = n_cells;
    let mu = &state[..n];
    let b = ratios.beta2;
    let f1: Vec<C64> = (1..=n).map(|j| b.powi(j as i32)).collect();
    let f2: Vec<C64> = (1..=n).map(|j| b.powi(-(j as i32))).collect();
    let g11 = linalg::vdot(&f1, &f1);
    let g12 = linalg::vdot(&f1, &f2);
    let g22 = linalg::vdot(&f2, &f2);
    let r1 = linalg::vdot(&f1, mu);
    let r2 = linalg::vdot(&f2, mu);
    let det = g11 * g22 - g12 * g12.conj();
    if det.norm() < 1e-300 {
        return Err(LadderError::Decomposition(f64::INFINITY));
    }
    let c1 = (g22 * r1 - g12 * r2) / det;
    let c2 = (g11 * r2 - g12.conj() * r1) / det;
    let resid: Vec<C64> = (0..n).map(|i| mu[i] - c1 * f1[i] - c2 * f2[i]).collect();
    let fit_residual = linalg::vnorm(&resid) / linalg::vnorm(mu);
    if fit_residual > 0.1 {
        return Err(LadderError::Decomposition(fit_residual));
    }
    let lam = ratios.lambda_coeff;
    let rb = b.norm();
    let pi_profile = (1..=n)
        .map(|j| rb.powi(2 * j as i32) + rb.powi(-2 * (j as i32)) * lam.norm_sqr())
        .collect();
    let m = ratios.migration;
    let pi_rescaled = (1..=n)
        .map(|j| {
            let l = j as f64 / n as f64;
            (l, (-2.0 * m * l).exp() + (2.0 * m * l).exp() * lam.norm_sqr())
        })
        .collect();
    Ok(ProfileFit { lambda_fit: c2 / c1, lambda_coeff: lam, pi_profile, pi_rescaled, fit_residual })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DominantPair {
    /// μ^(4)/μ^(2) → 0: β₂,₃ carry the state.
    Pair23,
    /// μ^(2) = 0: β₁,₄ carry the state.
    Pair14,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SkinSide {
    Left,
    Right,
    Bloch,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModeWeight {
    /// |μ^(4)/μ^(2)|, possibly 0 or ∞.
    pub ratio: f64,
    /// ln of the ratio; ±∞ when exactly one pair meets the quantization condition.
    pub ln_ratio: f64,
    pub dominant: DominantPair,
    /// Modulus of the dominant pair.
    pub radius: f64,
    pub side: SkinSide,
}

/// (ln|big^m|, |1 − (small/big)^m|) for the pair (a, b), so that
/// ln|a^m − b^m| = first + ln(second) without forming the powers directly.
fn split_diff_pow(a: C64, b: C64, m: i32) -> (f64, f64) {
    let (big, small) = if a.norm() >= b.norm() { (a, b) } else { (b, a) };
    if big.norm() == 0.0 {
        return (f64::NEG_INFINITY, 0.0);
    }
    let ratio = (small / big).powi(m);
    (m as f64 * big.norm().ln(), (ONE - ratio).norm())
}

/// Relative size of |1 − (β_small/β_big)^{N+1}| below which a pair counts as
/// satisfying the open-boundary quantization exactly.
pub const QUANTIZED_TOL: f64 = 1e-9;

fn mode_weight_ratio_from_pairs(pairs: &[(C64, C64); 2], n: usize) -> ModeWeight {
    let m = (n + 1) as i32;
    let (b1, b4) = pairs[0];
    let (b2, b3) = pairs[1];
    let (lead_num, rel_num) = split_diff_pow(b3, b2, m);
    let (lead_den, rel_den) = split_diff_pow(b4, b1, m);
    // At an exact eigenvalue the quantized pair's difference vanishes; in
    // floating point it is roundoff times |β|^{N+1}, which can still exceed the
    // other pair's term when the radii differ a lot.
    let tol = QUANTIZED_TOL * m as f64;
    let ln_ratio = match (rel_num < tol, rel_den < tol) {
        (true, false) => f64::NEG_INFINITY,
        (false, true) => f64::INFINITY,
        _ => (lead_num + rel_num.ln()) - (lead_den + rel_den.ln()),
    };
    let ratio = ln_ratio.exp();
    let (dominant, radius) = if ln_ratio < 0.0 {
        (DominantPair::Pair23, b2.norm())
    } else {
        (DominantPair::Pair14, b1.norm())
    };
    let side = if (radius - 1.0).abs() < 1e-9 {
        SkinSide::Bloch
    } else if radius < 1.0 {
        SkinSide::Left
    } else {
        SkinSide::Right
    };
    ModeWeight { ratio, ln_ratio, dominant, radius, side }
}

/// |μ^(4)/μ^(2)| = |(β₃^{N+1} − β₂^{N+1}) / (β₄^{N+1} − β₁^{N+1})| in the
/// sublattice regime, evaluated in log scale.
pub fn mode_weight_ratio(p: &LadderParams, energy: C64, n_cells: usize) -> Result<ModeWeight> {
    p.require_sublattice("mode_weight_ratio")?;
    let q = beta_roots(p, energy)?;
    let pairs = q.sublattice_pairs.expect("sublattice quartet");
    Ok(mode_weight_ratio_from_pairs(&pairs, n_cells))
}

/// The dominant-pair β's of the j-th member (1-based) of the minus family at
/// J = t0: i·e^{±ijπ/(N+1)}.
pub fn bloch_line_betas(n_cells: usize, j: usize) -> (C64, C64) {
    let th = j as f64 * PI / (n_cells as f64 + 1.0);
    (I * C64::from_polar(1.0, th), I * C64::from_polar(1.0, -th))
}

/// Leg-a half of an eigenvector stored in `[a.., b..]` order.
pub fn leg_a(state: &[C64], n: usize) -> &[C64] {
    &state[..n]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectra::{diagonalize, dispersion};
    use approx::assert_abs_diff_eq;

    #[test]
    fn a_roots_satisfy_quadratic_and_real_band_case() {
        let p = LadderParams::p_symmetric(0.2, 0.6, 0.7);
        let (ep, _) = dispersion(&p, 0.7);
        assert!(ep.im.abs() < 1e-14);
        let a = a_roots(&p, ep).unwrap();
        for x in &a {
            assert!(a_quadratic(&p, ep, *x).norm() < 1e-10);
            assert!(x.im.abs() < 1e-12);
        }
        let inside = a.iter().filter(|x| x.re * x.re < 4.0).count();
        assert_eq!(inside, 1);
    }

    #[test]
    fn a_roots_at_zero_energy_are_symmetric() {
        let p = LadderParams::p_symmetric(1.3, 0.4, 0.2);
        let a = a_roots(&p, ZERO).unwrap();
        assert!((a[0] + a[1]).norm() < 1e-14);
        let want = csqrt(r(4.0 * (1.69 * 0.16 - 0.04) * chi(&p))) / chi(&p);
        assert!((a[1].norm() - want.norm()).abs() < 1e-12);
    }

    #[test]
    fn beta_quartet_satisfies_characteristic_polynomial() {
        let p = LadderParams::p_symmetric(1.0, 0.9, 0.1);
        let e = C64::new(0.3, -0.7);
        let q = beta_roots(&p, e).unwrap();
        assert!(quartet_residual(&p, &q) < 1e-12);
        // Vieta: product of roots = constant / leading coefficient
        let c = quartic_coeffs(&p, e);
        let prod: C64 = q.betas.iter().product();
        assert!((prod - c[4] / c[0]).norm() < 1e-10);
        // matches the general companion-matrix route
        let general = linalg::poly_roots(&c).unwrap();
        assert!(linalg::multiset_distance(&general, &q.betas) < 1e-9);
    }

    #[test]
    fn sublattice_pairs_and_radii() {
        let p = LadderParams::sublattice(0.3, 0.5).with_cells(40);
        let (fp, fm) = exact_obc_sublattice(&p).unwrap();
        let (r1, r2) = gbz_radii(&p);
        assert_abs_diff_eq!(r1, (17.0f64 / 11.0).sqrt(), epsilon = 1e-14);
        assert_abs_diff_eq!(r2, (23.0f64 / 29.0).sqrt(), epsilon = 1e-14);
        for &e in fp.iter().chain(&fm) {
            let q = beta_roots(&p, e).unwrap();
            let [(b1, b4), (b2, b3)] = q.sublattice_pairs.unwrap();
            assert!((b1 * b4 - r(17.0 / 11.0)).norm() < 1e-10);
            assert!((b2 * b3 - r(23.0 / 29.0)).norm() < 1e-10);
            assert!(quartet_residual(&p, &q) < 1e-12);
        }
        // plus family: β₂,₃ on the r2 circle, β₁,₄ real
        let q = beta_roots(&p, fp[0]).unwrap();
        let [(b1, b4), (b2, b3)] = q.sublattice_pairs.unwrap();
        assert_abs_diff_eq!(b2.norm(), r2, epsilon = 1e-12);
        assert_abs_diff_eq!(b3.norm(), r2, epsilon = 1e-12);
        assert!(b1.im.abs() < 1e-12 && b4.im.abs() < 1e-12);
        // minus family: β₁,₄ on the r1 circle
        let q = beta_roots(&p, fm[3]).unwrap();
        let [(b1, b4), _] = q.sublattice_pairs.unwrap();
        assert_abs_diff_eq!(b1.norm(), r1, epsilon = 1e-12);
        assert_abs_diff_eq!(b4.norm(), r1, epsilon = 1e-12);
    }

    #[test]
    fn beta2_on_unit_circle_in_real_band() {
        let p = LadderParams::p_symmetric(0.2, 0.6, 0.7);
        for k in [0.3, 1.1, 2.0, 2.9] {
            let (ep, em) = dispersion(&p, k);
            for e in [ep, em] {
                let q = beta_roots(&p, e).unwrap();
                assert_abs_diff_eq!(q.betas[1].norm(), 1.0, epsilon = 1e-10);
                let rat = x_ratios(&p, e, &q).unwrap();
                assert_abs_diff_eq!(rat.x_ratios[2].norm(), 1.0, epsilon = 1e-10);
                assert_eq!(rat.unit_circle_consistent, Some(true));
            }
        }
    }

    #[test]
    fn x_ratio_identities() {
        let p = LadderParams::p_symmetric(0.8, 0.5, 0.2);
        for e in [C64::new(0.4, 0.0), C64::new(-1.0, 0.6), C64::new(0.1, -0.9)] {
            let q = beta_roots(&p, e).unwrap();
            let x = x_ratios(&p, e, &q).unwrap().x_ratios;
            assert!((x[0] * x[1] - ONE).norm() < 1e-10);
            assert!((x[2] * x[3] - ONE).norm() < 1e-10);
        }
        // conjugate energy on the unit circle: X(E)^(±2)* = X(E*)^(∓2)
        let p = LadderParams::p_symmetric(0.2, 0.6, 0.7);
        let (e, _) = dispersion(&p, 1.0);
        let e = e + C64::new(0.0, 1e-13);
        let qa = beta_roots(&p, e).unwrap();
        let qb = beta_roots(&p, e.conj()).unwrap();
        let xa = x_ratios(&p, e, &qa).unwrap();
        let xb = x_ratios(&p, e.conj(), &qb).unwrap();
        let conj_a = [xa.x_ratios[2].conj(), xa.x_ratios[3].conj()];
        let b = [xb.x_ratios[3], xb.x_ratios[2]];
        let direct = (conj_a[0] - b[0]).norm() + (conj_a[1] - b[1]).norm();
        let swapped = (conj_a[0] - b[1]).norm() + (conj_a[1] - b[0]).norm();
        assert!(direct.min(swapped) < 1e-8);
    }

    #[test]
    fn migration_anchor_values() {
        let p = LadderParams::p_symmetric(1.0, 0.9, 0.1);
        let (_, e) = dispersion(&p, PI / 2.0);
        assert_abs_diff_eq!(migration(&p, e).unwrap(), 0.867, epsilon = 1e-2);
        let (_, e) = dispersion(&p, PI);
        assert_abs_diff_eq!(migration(&p, e).unwrap(), 0.0, epsilon = 1e-6);
        let strong = LadderParams::p_symmetric(10.0, 0.9, 0.1);
        let (_, e) = dispersion(&strong, PI / 2.0);
        let m = migration(&strong, e).unwrap();
        let s = migration_strong_coupling(&strong);
        assert!((m - s).abs() < 0.1 * s);
        assert_abs_diff_eq!(migration_asymptote(&strong, PI / 2.0), s, epsilon = 1e-12);
    }

    #[test]
    fn sf_classification_examples() {
        let p = LadderParams::p_symmetric(1.0, 0.9, 0.1);
        let (_, e) = dispersion(&p, PI);
        assert_eq!(sf_classify(&p, e, 100).unwrap().class, SfClass::Extended);
        let (_, e) = dispersion(&p, PI / 2.0);
        assert_eq!(sf_classify(&p, e, 100).unwrap().class, SfClass::ScaleFree);
        let p = LadderParams::p_symmetric(0.2, 0.6, 0.7);
        for k in [0.2, 1.0, 2.5] {
            let (e, _) = dispersion(&p, k);
            assert_eq!(sf_classify(&p, e, 40).unwrap().class, SfClass::Extended);
        }
    }

    #[test]
    fn boundary_determinant_vanishes_on_obc_eigenvalues() {
        let p = LadderParams::p_symmetric(1.0, 0.9, 0.1).with_cells(20);
        let s = diagonalize(&build_realspace(&p)).unwrap();
        let mut checked = 0;
        for &e in &s.eigenvalues {
            if e.norm() < 1e-6 {
                continue;
            }
            let q = beta_roots(&p, e).unwrap();
            let b = boundary_best(&p, e, &q, 20).unwrap();
            assert!(b.det_residual.norm() < 1e-6 * b.k_norm, "E = {e}: {}", b.det_residual.norm());
            checked += 1;
        }
        assert!(checked > 30);
        let far = C64::new(7.0, 3.0);
        let q = beta_roots(&p, far).unwrap();
        let b = boundary_best(&p, far, &q, 20).unwrap();
        assert!(b.det_residual.norm() > 1e-3);
    }

    #[test]
    fn mode_weight_classifies_families() {
        let p = LadderParams::sublattice(0.3, 0.5).with_cells(40);
        let (fp, fm) = exact_obc_sublattice(&p).unwrap();
        for e in fp {
            let w = mode_weight_ratio(&p, e, 40).unwrap();
            assert!(w.ratio < 1e-6);
            assert_eq!(w.side, SkinSide::Left);
        }
        for e in fm {
            let w = mode_weight_ratio(&p, e, 40).unwrap();
            assert_eq!(w.dominant, DominantPair::Pair14);
            assert_eq!(w.side, SkinSide::Right);
        }
        let p = LadderParams::sublattice(1.0, 0.5).with_cells(12);
        let (_, fm) = exact_obc_sublattice(&p).unwrap();
        for (j, e) in fm.into_iter().enumerate() {
            let w = mode_weight_ratio(&p, e, 12).unwrap();
            assert_eq!(w.side, SkinSide::Bloch);
            let q = beta_roots(&p, e).unwrap();
            let (b1, b4) = q.sublattice_pairs.unwrap()[0];
            let (x, y) = bloch_line_betas(12, j + 1);
            let d = ((b1 - x).norm() + (b4 - y).norm()).min((b1 - y).norm() + (b4 - x).norm());
            assert!(d < 1e-10, "j={j}: {b1} {b4} vs {x} {y}");
        }
    }
}
