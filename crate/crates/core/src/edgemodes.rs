//! Zero-energy physics in real space: the two-cell transfer matrix, exact
//! odd-N zero modes, even-N approximants, flat-band compact states, the
//! gain-loss-shifted pair and the pseudo-inversion variant.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{LadderError, Result};
use crate::linalg::{self, csqrt, r, CMat, ONE, ZERO};
use crate::model::{build_realspace, LadderParams};
use crate::topology::{z2_closed_form, z2_delta};

pub type R2 = [[f64; 2]; 2];

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TransferData {
    /// T = −P⁻¹Q, mapping ψ_{j−1} to ψ_{j+1} at zero energy.
    pub t_matrix: R2,
    /// (Z+, Z−).
    pub z_eigs: (C64, C64),
    /// (μ+, μ−): eigenvectors are [μ±, −1].
    pub mu_pair: (C64, C64),
    /// Δ = (J²η² − t0²δ²)/(J² − t0²). NaN outside the P-symmetric regime.
    pub delta_cap: f64,
}

fn hop_blocks(p: &LadderParams) -> (R2, R2) {
    let pm = [[p.jp_a(), p.t2()], [p.t1(), p.jp_b()]];
    let qm = [[p.jm_a(), p.t1()], [p.t2(), p.jm_b()]];
    (pm, qm)
}

fn det2(m: &R2) -> f64 {
    m[0][0] * m[1][1] - m[0][1] * m[1][0]
}

/// μ with T·[μ, −1] = z·[μ, −1].
fn mu_for(t: &R2, z: C64) -> C64 {
    if t[1][0].abs() > 1e-300 {
        (t[1][1] - z) / t[1][0]
    } else {
        r(t[0][1]) / (t[0][0] - z)
    }
}

fn safe_div(a: C64, b: C64) -> C64 {
    if b.norm() == 0.0 {
        r(f64::INFINITY)
    } else {
        a / b
    }
}

/// Transfer data. The P-symmetric regime uses the closed-form Z± branches
/// (J > t0 vs J < t0); elsewhere, and exactly at J = t0, Z± are the roots of
/// the characteristic polynomial of T.
pub fn transfer_data(p: &LadderParams) -> Result<TransferData> {
    if !p.no_gain_loss() {
        return Err(LadderError::Regime("transfer_data is the gamma = 0 recursion".into()));
    }
    let (pm, qm) = hop_blocks(p);
    let dp = det2(&pm);
    let scale = pm.iter().flatten().map(|x| x.abs()).fold(0.0, f64::max).max(1.0);
    if dp.abs() < 1e-12 * scale * scale {
        // det P = 0 is Δ = 1 off the flat band: T itself does not exist but the
        // closed-form Z± degenerate to 0 and ∞
        if p.is_p_symmetric() && (p.j_amp.abs() - p.t0).abs() > 1e-12 {
            let (zp, zm) = if p.j_amp.abs() > p.t0 { (r(f64::INFINITY), ZERO) } else { (ZERO, r(f64::INFINITY)) };
            return Ok(TransferData {
                t_matrix: [[f64::NAN; 2]; 2],
                z_eigs: (zp, zm),
                mu_pair: mu_closed_form(p),
                delta_cap: 1.0,
            });
        }
        return Err(LadderError::Singular(format!("P is rank deficient (det P = {dp:e}): flat band")));
    }
    let inv = [[pm[1][1] / dp, -pm[0][1] / dp], [-pm[1][0] / dp, pm[0][0] / dp]];
    let mut t = [[0.0; 2]; 2];
    for i in 0..2 {
        for k in 0..2 {
            t[i][k] = -(inv[i][0] * qm[0][k] + inv[i][1] * qm[1][k]);
        }
    }
    let (j, t0) = (p.j_amp, p.t0);
    let (z_plus, z_minus, delta_cap) = if p.is_p_symmetric() && (j.abs() - t0).abs() > 1e-12 {
        let d = z2_delta(p);
        let s = csqrt(r(d));
        let (zp, zm) = if j.abs() > t0 {
            (safe_div(s + 1.0, s - 1.0), safe_div(s - 1.0, s + 1.0))
        } else {
            (safe_div(s - 1.0, s + 1.0), safe_div(s + 1.0, s - 1.0))
        };
        (zp, zm, d)
    } else {
        let tr = t[0][0] + t[1][1];
        let dt = det2(&t);
        let disc = csqrt(r(tr * tr - 4.0 * dt));
        let d = if p.is_p_symmetric() { z2_delta(p) } else { f64::NAN };
        ((tr + disc) / 2.0, (tr - disc) / 2.0, d)
    };
    let mu_pair = (mu_for(&t, z_plus), mu_for(&t, z_minus));
    Ok(TransferData { t_matrix: t, z_eigs: (z_plus, z_minus), mu_pair, delta_cap })
}

/// μ± from the closed form, (t0²δ + J²η ∓ √((J² − t0²)(J²η² − t0²δ²)))/(J t0 (δ + η)).
pub fn mu_closed_form(p: &LadderParams) -> (C64, C64) {
    let (j, t0, eta, d) = (p.j_amp, p.t0, p.eta(), p.delta);
    let root = csqrt(r((j * j - t0 * t0) * (j * j * eta * eta - t0 * t0 * d * d)));
    let base = t0 * t0 * d + j * j * eta;
    let den = j * t0 * (d + eta);
    ((base - root) / den, (base + root) / den)
}

/// Z'+·Z'− = det Q'/det P' for the pseudo-inversion recursion.
pub fn pseudo_inversion_z_product(p: &LadderParams) -> f64 {
    let (j, t0, eta, d) = (p.j_amp, p.t0, p.eta(), p.delta);
    1.0 - 4.0 * eta * j * j / (t0 * t0 * (d * d - 1.0) + j * j * (1.0 + eta).powi(2))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModeKind {
    ZeroOdd,
    ZeroEven,
    CompactU1,
    CompactU2,
    GammaShifted,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EdgeMode {
    pub eigenvalue: C64,
    /// Unit norm, `[a_1..a_N, b_1..b_N]`.
    pub amplitudes: Vec<C64>,
    /// ‖Hψ − Eψ‖/‖ψ‖ on the OBC matrix.
    pub residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EdgeModeSet {
    pub kind: ModeKind,
    pub modes: Vec<EdgeMode>,
}

impl EdgeModeSet {
    pub fn len(&self) -> usize {
        self.modes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.modes.is_empty()
    }

    pub fn max_residual(&self) -> f64 {
        self.modes.iter().map(|m| m.residual).fold(0.0, f64::max)
    }
}

fn finish(h: &CMat, mut v: Vec<C64>, e: C64) -> EdgeMode {
    linalg::normalize(&mut v);
    let residual = linalg::eigen_residual(h, &v, e);
    EdgeMode { eigenvalue: e, amplitudes: v, residual }
}

/// Places Z^{exp(j)}·[μ, −1] on the cells selected by `keep` (1-based j).
/// Powers are taken relative to the largest one so nothing overflows.
fn staggered_mode(n: usize, z: C64, mu: C64, keep: impl Fn(usize) -> bool, exponent: impl Fn(usize) -> f64) -> Vec<C64> {
    let cells: Vec<usize> = (1..=n).filter(|&j| keep(j)).collect();
    let lz = z.ln();
    let logs: Vec<C64> = cells.iter().map(|&j| lz * exponent(j)).collect();
    let top = logs.iter().map(|l| l.re).fold(f64::NEG_INFINITY, f64::max);
    let mut v = vec![ZERO; 2 * n];
    for (&j, l) in cells.iter().zip(&logs) {
        let amp = (l - top).exp();
        v[j - 1] = amp * mu;
        v[n + j - 1] = -amp;
    }
    v
}

/// Zero modes in the P-symmetric regime: exact for odd N, refined
/// approximants for even N in the D = ±1 phases, empty otherwise.
pub fn build_zero_modes(p: &LadderParams, n_cells: usize) -> Result<EdgeModeSet> {
    p.require_p_symmetric("build_zero_modes")?;
    let td = transfer_data(p)?;
    let pp = p.with_cells(n_cells).open();
    let h = build_realspace(&pp);
    let (zp, zm) = td.z_eigs;
    let (mp, mm) = td.mu_pair;
    if n_cells % 2 == 1 {
        let modes = [(zp, mp), (zm, mm)]
            .into_iter()
            .map(|(z, mu)| {
                let v = staggered_mode(n_cells, z, mu, |j| j % 2 == 1, |j| (j as f64 - 1.0) / 2.0);
                finish(&h, v, ZERO)
            })
            .collect();
        return Ok(EdgeModeSet { kind: ModeKind::ZeroOdd, modes });
    }
    let d = z2_closed_form(p)?;
    if (d.abs() - 1.0).abs() > 1e-12 {
        return Ok(EdgeModeSet { kind: ModeKind::ZeroEven, modes: Vec::new() });
    }
    let approx = even_approximants(n_cells, &td);
    let refined = refine_pair(&h, &approx)?;
    let modes = refined.into_iter().map(|v| rayleigh_mode(&h, v)).collect();
    Ok(EdgeModeSet { kind: ModeKind::ZeroEven, modes })
}

/// The even-N approximants (R'+, R'−) before refinement.
pub fn even_approximants(n: usize, td: &TransferData) -> [Vec<C64>; 2] {
    let (zp, zm) = td.z_eigs;
    let (mp, mm) = td.mu_pair;
    if zm.norm() < 1.0 {
        [
            staggered_mode(n, zp, mp, |j| j % 2 == 0, |j| (j as f64 - 2.0) / 2.0),
            staggered_mode(n, zm, mm, |j| j % 2 == 1, |j| (j as f64 - 1.0) / 2.0),
        ]
    } else {
        [
            staggered_mode(n, zp, mp, |j| j % 2 == 1, |j| (j as f64 - 1.0) / 2.0),
            staggered_mode(n, zm, mm, |j| j % 2 == 0, |j| (j as f64 - 2.0) / 2.0),
        ]
    }
}

fn orthonormal_pair(a: &[C64], b: &[C64]) -> Result<[Vec<C64>; 2]> {
    let mut q0 = a.to_vec();
    linalg::normalize(&mut q0);
    let proj = linalg::vdot(&q0, b);
    let mut q1: Vec<C64> = b.iter().zip(&q0).map(|(x, y)| x - proj * y).collect();
    if linalg::vnorm(&q1) < 1e-14 * linalg::vnorm(b) {
        return Err(LadderError::Singular("refinement subspace collapsed".into()));
    }
    linalg::normalize(&mut q1);
    Ok([q0, q1])
}

/// Two steps of block inverse iteration at shift 0, then each approximant is
/// replaced by its orthogonal projection onto the refined 2D subspace, which
/// keeps the one-sided localization of the input.
fn refine_pair(h: &CMat, approx: &[Vec<C64>; 2]) -> Result<[Vec<C64>; 2]> {
    let mut basis = orthonormal_pair(&approx[0], &approx[1])?;
    for _ in 0..2 {
        let a = linalg::solve(h, &basis[0]);
        let b = linalg::solve(h, &basis[1]);
        basis = orthonormal_pair(&a, &b)?;
    }
    let project = |v: &[C64]| -> Vec<C64> {
        let c0 = linalg::vdot(&basis[0], v);
        let c1 = linalg::vdot(&basis[1], v);
        basis[0].iter().zip(&basis[1]).map(|(x, y)| c0 * x + c1 * y).collect()
    };
    Ok([project(&approx[0]), project(&approx[1])])
}

fn rayleigh_mode(h: &CMat, mut v: Vec<C64>) -> EdgeMode {
    linalg::normalize(&mut v);
    let e = linalg::vdot(&v, &linalg::matvec(h, &v));
    finish(h, v, e)
}

/// Compact localized zero modes at the flat-band triple point
/// (J = t0, |δ| = |η|, η_a = −η_b).
pub fn build_compact_modes(p: &LadderParams, n_cells: usize) -> Result<EdgeModeSet> {
    p.require_p_symmetric("build_compact_modes")?;
    let (j, t0, eta, d) = (p.j_amp, p.t0, p.eta(), p.delta);
    if (j - t0).abs() > 1e-10 || (d.abs() - eta.abs()).abs() > 1e-10 {
        return Err(LadderError::Regime("compact modes need J = t0 and |delta| = |eta|".into()));
    }
    let n = n_cells;
    let h = build_realspace(&p.with_cells(n).open());
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let cell = |v: &mut [C64], j: usize, a: f64, b: f64, w: f64| {
        v[j - 1] += r(w * a);
        v[n + j - 1] += r(w * b);
    };
    if (d - eta).abs() <= 1e-10 {
        let modes = (1..=n)
            .map(|jj| {
                let mut v = vec![ZERO; 2 * n];
                cell(&mut v, jj, s, -s, 1.0);
                finish(&h, v, ZERO)
            })
            .collect();
        return Ok(EdgeModeSet { kind: ModeKind::CompactU1, modes });
    }
    let norm = (2.0 * (1.0 + eta * eta)).sqrt();
    let phi1 = [(eta - 1.0) / norm, (eta + 1.0) / norm];
    let phi2 = [phi1[1], phi1[0]];
    let mut modes = Vec::with_capacity(n);
    let mut first = vec![ZERO; 2 * n];
    cell(&mut first, 1, phi2[0], phi2[1], 1.0);
    modes.push(finish(&h, first, ZERO));
    for jj in 2..n {
        let mut v = vec![ZERO; 2 * n];
        cell(&mut v, jj - 1, phi1[0], phi1[1], s);
        cell(&mut v, jj + 1, phi2[0], phi2[1], -s);
        modes.push(finish(&h, v, ZERO));
    }
    let mut last = vec![ZERO; 2 * n];
    cell(&mut last, n, phi1[0], phi1[1], 1.0);
    modes.push(finish(&h, last, ZERO));
    Ok(EdgeModeSet { kind: ModeKind::CompactU2, modes })
}

/// Shift-and-invert iteration with Rayleigh-quotient updates.
fn polish(h: &CMat, mut e: C64, mut v: Vec<C64>, iters: usize) -> (C64, Vec<C64>) {
    let n = h.nrows();
    for _ in 0..iters {
        let shifted = CMat::from_fn(n, n, |i, k| if i == k { h[(i, k)] - e } else { h[(i, k)] });
        let mut w = linalg::solve(&shifted, &v);
        if !w.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
            break;
        }
        linalg::normalize(&mut w);
        let e_new = linalg::vdot(&w, &linalg::matvec(h, &w));
        v = w;
        let done = (e_new - e).norm() < 1e-15 * (1.0 + e.norm());
        e = e_new;
        if done {
            break;
        }
    }
    (e, v)
}

/// The zero-mode pair pushed off zero energy by balanced gain and loss
/// (η_a = −η_b, γ ≠ 0). The pair is predicted by degenerate biorthogonal
/// perturbation theory in γσz on the γ = 0 zero modes and then polished on
/// the full OBC matrix. Even N in D ≠ ±1 yields an empty set.
pub fn gamma_shifted_modes(p: &LadderParams, n_cells: usize) -> Result<EdgeModeSet> {
    if !p.eta_antisymmetric() {
        return Err(LadderError::Regime("gamma_shifted_modes needs eta_a = -eta_b".into()));
    }
    let p0 = p.with_gamma(0.0);
    if p.no_gain_loss() {
        return build_zero_modes(&p0, n_cells);
    }
    let right = build_zero_modes(&p0, n_cells)?;
    if right.is_empty() {
        return Ok(EdgeModeSet { kind: ModeKind::GammaShifted, modes: Vec::new() });
    }
    // H0ᵀ is H0 with both η's negated, so its zero modes are the left modes of H0
    let flipped = LadderParams { eta_a: -p0.eta_a, eta_b: -p0.eta_b, ..p0 };
    let left = build_zero_modes(&flipped, n_cells)?;
    let n = n_cells;
    let gl = |v: &[C64]| -> Vec<C64> {
        v.iter().enumerate().map(|(i, z)| if i < n { z * p.gamma } else { -z * p.gamma } * linalg::I).collect()
    };
    let bil = |a: &[C64], b: &[C64]| -> C64 { a.iter().zip(b).map(|(x, y)| x * y).sum() };
    let xs: Vec<&Vec<C64>> = right.modes.iter().map(|m| &m.amplitudes).collect();
    let ys: Vec<&Vec<C64>> = left.modes.iter().map(|m| &m.amplitudes).collect();
    let mut s = [[ZERO; 2]; 2];
    let mut v = [[ZERO; 2]; 2];
    for i in 0..2 {
        for k in 0..2 {
            s[i][k] = bil(ys[i], xs[k]);
            v[i][k] = bil(ys[i], &gl(xs[k]));
        }
    }
    let ds = s[0][0] * s[1][1] - s[0][1] * s[1][0];
    if ds.norm() < 1e-14 {
        return Err(LadderError::Singular("left/right zero modes are not biorthogonal".into()));
    }
    let sinv = [[s[1][1] / ds, -s[0][1] / ds], [-s[1][0] / ds, s[0][0] / ds]];
    let mut m = [[ZERO; 2]; 2];
    for i in 0..2 {
        for k in 0..2 {
            m[i][k] = sinv[i][0] * v[0][k] + sinv[i][1] * v[1][k];
        }
    }
    let tr = m[0][0] + m[1][1];
    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    let disc = (tr * tr - 4.0 * det).sqrt();
    let h = build_realspace(&p.with_cells(n).open());
    let mut modes = Vec::with_capacity(2);
    for e in [(tr + disc) / 2.0, (tr - disc) / 2.0] {
        // eigenvector of the 2x2 block, mapped back onto the zero-mode pair
        let c = if m[0][1].norm() > 1e-300 {
            [m[0][1], e - m[0][0]]
        } else if m[1][0].norm() > 1e-300 {
            [e - m[1][1], m[1][0]]
        } else if (e - m[0][0]).norm() <= (e - m[1][1]).norm() {
            [ONE, ZERO]
        } else {
            [ZERO, ONE]
        };
        let guess: Vec<C64> = xs[0].iter().zip(xs[1]).map(|(a, b)| c[0] * a + c[1] * b).collect();
        let (e_ref, vec) = polish(&h, e, guess, 30);
        modes.push(finish(&h, vec, e_ref));
    }
    Ok(EdgeModeSet { kind: ModeKind::GammaShifted, modes })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Left,
    Right,
    Extended,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PseudoInversionModes {
    pub transfer: TransferData,
    pub modes: EdgeModeSet,
    pub sides: Vec<Side>,
    /// Set at |δ| = |η| = 1: centroids and sizes of the eigenvalue clusters
    /// near 0 and ±2t0.
    pub collapse: Option<Vec<(C64, usize)>>,
}

fn side_of(z: C64) -> Side {
    let m = z.norm();
    if (m - 1.0).abs() < 1e-9 {
        Side::Extended
    } else if m < 1.0 {
        Side::Left
    } else {
        Side::Right
    }
}

/// Clusters of OBC eigenvalues around 0 and ±2t0 with their centroids. A
/// high-order exceptional point spreads a cluster by ~ε^{1/k}, but its mean
/// stays accurate.
pub fn collapse_clusters(p: &LadderParams) -> Result<Vec<(C64, usize)>> {
    let ev = crate::spectra::eigenvalues(&build_realspace(&p.open()))?;
    let targets = [r(-2.0 * p.t0), ZERO, r(2.0 * p.t0)];
    let mut sums = [ZERO; 3];
    let mut counts = [0usize; 3];
    for e in ev {
        let (idx, _) = targets
            .iter()
            .enumerate()
            .map(|(i, t)| (i, (e - t).norm()))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .expect("three targets");
        sums[idx] += e;
        counts[idx] += 1;
    }
    Ok((0..3)
        .filter(|&i| counts[i] > 0)
        .map(|i| (sums[i] / counts[i] as f64, counts[i]))
        .collect())
}

/// Zero modes for η_a = η_b (any δ): odd N, each eigenvector of T' gives an
/// exact staggered mode; the side follows |Z'|.
pub fn pseudo_inversion_zero_modes(p: &LadderParams, n_cells: usize) -> Result<PseudoInversionModes> {
    if !p.is_pseudo_inversion() {
        return Err(LadderError::Regime("pseudo_inversion_zero_modes needs eta_a = eta_b and gamma = 0".into()));
    }
    let pp = p.with_cells(n_cells).open();
    let collapse = if (p.delta.abs() - 1.0).abs() < 1e-12 && (p.eta().abs() - 1.0).abs() < 1e-12 {
        Some(collapse_clusters(&pp)?)
    } else {
        None
    };
    if n_cells % 2 == 0 {
        return Err(LadderError::Regime("pseudo-inversion zero modes are built for odd N".into()));
    }
    let td = transfer_data(p)?;
    let h = build_realspace(&pp);
    let (zp, zm) = td.z_eigs;
    let (mp, mm) = td.mu_pair;
    let modes: Vec<EdgeMode> = [(zp, mp), (zm, mm)]
        .into_iter()
        .map(|(z, mu)| {
            let v = staggered_mode(n_cells, z, mu, |j| j % 2 == 1, |j| (j as f64 - 1.0) / 2.0);
            finish(&h, v, ZERO)
        })
        .collect();
    Ok(PseudoInversionModes {
        transfer: td,
        modes: EdgeModeSet { kind: ModeKind::ZeroOdd, modes },
        sides: vec![side_of(zp), side_of(zm)],
        collapse,
    })
}

/// Per-cell weight √(|a_j|² + |b_j|²).
pub fn cell_weights(v: &[C64], n: usize) -> Vec<f64> {
    (0..n).map(|j| (v[j].norm_sqr() + v[n + j].norm_sqr()).sqrt()).collect()
}

/// Slope of ln(cell weight) against the cell index over occupied cells
/// (weight above 1e-12 of the maximum). Per cell, not per two-cell step.
pub fn fit_decay(v: &[C64], n: usize) -> Option<f64> {
    let w = cell_weights(v, n);
    let top = w.iter().copied().fold(0.0, f64::max);
    let (xs, ys): (Vec<f64>, Vec<f64>) = w
        .iter()
        .enumerate()
        .filter(|(_, &x)| x > 1e-12 * top)
        .map(|(j, &x)| (j as f64, x.ln()))
        .unzip();
    if xs.len() < 2 {
        return None;
    }
    Some(linalg::linear_fit(&xs, &ys).1)
}

/// Center of mass of the per-cell weight, in [0, 1].
pub fn weight_center(v: &[C64], n: usize) -> f64 {
    let w = cell_weights(v, n);
    let tot: f64 = w.iter().map(|x| x * x).sum();
    w.iter().enumerate().map(|(j, x)| j as f64 * x * x).sum::<f64>() / tot / (n as f64 - 1.0)
}
