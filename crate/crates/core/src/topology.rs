//! Bulk invariants: W_φ of the Hermitian counterpart, the average winding Γ,
//! vortex charges at diabolic points, the Z2 invariant D and the hybrid
//! spectral winding W_s^±.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{LadderError, Result};
use crate::linalg::c;
use crate::model::{build_bloch, counterpart_of, rung_bloch, BlochMatrix, LadderParams};
use crate::spectra::{dispersion, exact_obc_sublattice, exceptional_points};

/// Counterpart gap below which a φ slice is treated as gapless.
pub const GAPLESS_TOL: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WindingResult {
    pub value: f64,
    pub grid_k: usize,
    pub grid_phi: usize,
    /// φ values whose counterpart closed its gap on the k grid.
    pub singular_slices: Vec<f64>,
    /// More than 1% of slices were singular.
    pub unreliable: bool,
}

/// Net phase accumulated by a closed sequence of complex points, in turns.
pub fn accumulated_turns(points: &[C64]) -> f64 {
    let n = points.len();
    let mut total = 0.0;
    for i in 0..n {
        let a = points[i];
        let b = points[(i + 1) % n];
        total += (b / a).arg();
    }
    total / (2.0 * PI)
}

fn kgrid(grid: usize) -> impl Iterator<Item = f64> {
    (0..grid).map(move |m| -PI + 2.0 * PI * m as f64 / grid as f64)
}

fn counterpart_loop(blochs: &[BlochMatrix], phi: f64) -> (Vec<C64>, f64) {
    let mut min_gap = f64::INFINITY;
    let pts: Vec<C64> = blochs
        .iter()
        .map(|b| {
            let h = counterpart_of(b, phi);
            let z = c(h.hx.re, h.hy.re);
            min_gap = min_gap.min(z.norm());
            z
        })
        .collect();
    (pts, min_gap)
}

fn check_counterpart(p: &LadderParams) -> Result<()> {
    if p.eta_antisymmetric() {
        Ok(())
    } else {
        Err(LadderError::Regime("winding of the Hermitian counterpart needs eta_a = -eta_b".into()))
    }
}

/// Winding of h'x + i h'y around the Brillouin zone at fixed φ.
/// A gapless slice returns `value = NaN` with φ listed in `singular_slices`.
pub fn winding_phi(p: &LadderParams, phi: f64, grid_k: usize) -> Result<WindingResult> {
    check_counterpart(p)?;
    if grid_k < 256 {
        return Err(LadderError::InvalidParams(format!("grid_k = {grid_k} < 256")));
    }
    let blochs: Vec<BlochMatrix> = kgrid(grid_k).map(|k| build_bloch(p, k)).collect();
    Ok(winding_slice(&blochs, phi, grid_k))
}

fn winding_slice(blochs: &[BlochMatrix], phi: f64, grid_k: usize) -> WindingResult {
    let (pts, gap) = counterpart_loop(blochs, phi);
    if gap <= GAPLESS_TOL {
        WindingResult { value: f64::NAN, grid_k, grid_phi: 1, singular_slices: vec![phi], unreliable: true }
    } else {
        WindingResult { value: accumulated_turns(&pts), grid_k, grid_phi: 1, singular_slices: Vec::new(), unreliable: false }
    }
}

/// Γ = (1/2π)∫W_φ dφ. W_φ is sampled on the midpoint grid
/// φ_i = −π + 2π(i + ½)/grid_phi; between neighbouring samples with different
/// windings the jump is located by bisection, so the piecewise-constant
/// integrand is integrated exactly rather than in steps of 2/grid_phi.
pub fn awn(p: &LadderParams, grid_k: usize, grid_phi: usize) -> Result<WindingResult> {
    check_counterpart(p)?;
    if grid_k < 256 {
        return Err(LadderError::InvalidParams(format!("grid_k = {grid_k} < 256")));
    }
    let blochs: Vec<BlochMatrix> = kgrid(grid_k).map(|k| build_bloch(p, k)).collect();
    let phis: Vec<f64> = (0..grid_phi).map(|i| -PI + 2.0 * PI * (i as f64 + 0.5) / grid_phi as f64).collect();
    let slices: Vec<WindingResult> = phis.par_iter().map(|&phi| winding_slice(&blochs, phi, grid_k)).collect();
    let ws: Vec<f64> = slices.iter().map(|s| s.value).collect();
    let mut out = reduce_slices(slices, grid_k, grid_phi);
    if out.value.is_finite() {
        out.value = integrate_windings(&blochs, grid_k, &phis, &ws);
    }
    Ok(out)
}

/// Exact integral of the piecewise-constant W_φ over one period, given
/// samples on a uniform cyclic grid. Intervals with one singular end take the
/// other end's value; intervals with both ends singular are dropped.
fn integrate_windings(blochs: &[BlochMatrix], grid_k: usize, phis: &[f64], ws: &[f64]) -> f64 {
    let n = phis.len();
    let h = 2.0 * PI / n as f64;
    let mut total = 0.0;
    let mut span = 0.0;
    for i in 0..n {
        let (a, wa) = (phis[i], ws[i]);
        let wb = ws[(i + 1) % n];
        let b = a + h;
        match (wa.is_nan(), wb.is_nan()) {
            (true, true) => continue,
            (false, true) => total += wa * h,
            (true, false) => total += wb * h,
            (false, false) if (wa - wb).abs() < 0.5 => total += 0.5 * (wa + wb) * h,
            (false, false) => {
                let (mut lo, mut hi) = (a, b);
                for _ in 0..48 {
                    let mid = 0.5 * (lo + hi);
                    let wm = winding_slice(blochs, mid, grid_k).value;
                    if wm.is_nan() {
                        lo = mid;
                        hi = mid;
                        break;
                    }
                    if (wm - wa).abs() < 0.5 {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                let cut = 0.5 * (lo + hi);
                total += wa * (cut - a) + wb * (b - cut);
            }
        }
        span += h;
    }
    if span > 0.0 {
        total / span
    } else {
        f64::NAN
    }
}

fn reduce_slices(slices: Vec<WindingResult>, grid_k: usize, grid_phi: usize) -> WindingResult {
    let mut sum = 0.0;
    let mut used = 0usize;
    let mut singular = Vec::new();
    for s in slices {
        if s.value.is_nan() {
            singular.extend(s.singular_slices);
        } else {
            sum += s.value;
            used += 1;
        }
    }
    let value = if used == 0 { f64::NAN } else { sum / used as f64 };
    let unreliable = singular.len() as f64 > 0.01 * grid_phi as f64;
    WindingResult { value, grid_k, grid_phi, singular_slices: singular, unreliable }
}

/// Γ for two Hatano–Nelson chains with rung coupling only (hx = t0, hy = 0,
/// η_b = −η), integrating along φ at each k instead of along k.
///
/// The φ-loop of h' is a circle of radius |hz| around (t0, 0); it encloses
/// the origin exactly where the PBC energies are complex. The sign is fixed
/// so that the broken phase yields Γ < 0 (the Berry-connection orientation).
pub fn awn_rung_phi_axis(j_amp: f64, eta: f64, t0: f64, grid_k: usize, grid_phi: usize) -> WindingResult {
    let phis: Vec<f64> = (0..grid_phi).map(|i| -PI + 2.0 * PI * i as f64 / grid_phi as f64).collect();
    let per_k: Vec<Option<f64>> = (0..grid_k)
        .into_par_iter()
        .map(|m| {
            let k = -PI + 2.0 * PI * (m as f64 + 0.5) / grid_k as f64;
            let b = rung_bloch(j_amp, eta, t0, true, k);
            let mut gap = f64::INFINITY;
            let pts: Vec<C64> = phis
                .iter()
                .map(|&phi| {
                    let h = counterpart_of(&b, phi);
                    let z = c(h.hx.re, h.hy.re);
                    gap = gap.min(z.norm());
                    z
                })
                .collect();
            if gap <= GAPLESS_TOL {
                None
            } else {
                Some(-accumulated_turns(&pts))
            }
        })
        .collect();
    let mut sum = 0.0;
    let mut used = 0;
    let mut singular = Vec::new();
    for (m, w) in per_k.iter().enumerate() {
        match w {
            Some(v) => {
                sum += v;
                used += 1;
            }
            None => singular.push(-PI + 2.0 * PI * (m as f64 + 0.5) / grid_k as f64),
        }
    }
    let value = if used == 0 { f64::NAN } else { sum / used as f64 };
    let unreliable = singular.len() as f64 > 0.01 * grid_k as f64;
    WindingResult { value, grid_k, grid_phi, singular_slices: singular, unreliable }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct VortexCharge {
    pub center: (f64, f64),
    pub radius: f64,
    pub charge: i32,
}

/// Diabolic points (k, φ) of the counterpart: one per EP momentum, with φ
/// fixed by (cos φ, sin φ) = (hx, hy)/hz.
pub fn diabolic_points(p: &LadderParams) -> Result<Vec<(f64, f64)>> {
    check_counterpart(p)?;
    let p0 = p.with_gamma(0.0);
    let ks = if p.no_gain_loss() {
        exceptional_points(&p0)?.momenta
    } else {
        return Err(LadderError::Regime("diabolic points are tabulated for gamma = 0".into()));
    };
    Ok(ks
        .into_iter()
        .map(|k| {
            let b = build_bloch(p, k);
            let hz = b.hz.re;
            (k, (b.hy.re / hz).atan2(b.hx.re / hz))
        })
        .collect())
}

/// Winding of the planar field F = (⟨σx⟩, ⟨σy⟩) of the lower counterpart band
/// around a circle in the (k, φ) plane.
pub fn vortex_charge(p: &LadderParams, center: (f64, f64), radius: f64, n_loop: usize) -> Result<VortexCharge> {
    check_counterpart(p)?;
    let mut min_gap = f64::INFINITY;
    let pts: Vec<C64> = (0..n_loop)
        .map(|i| {
            let th = 2.0 * PI * i as f64 / n_loop as f64;
            let k = center.0 + radius * th.cos();
            let phi = center.1 + radius * th.sin();
            let h = counterpart_of(&build_bloch(p, k), phi);
            let z = c(h.hx.re, h.hy.re);
            min_gap = min_gap.min(z.norm());
            // lower band: ⟨σ⟩ = −ĥ
            -z / z.norm()
        })
        .collect();
    if min_gap < 1e-6 {
        return Err(LadderError::GaplessLoop(min_gap));
    }
    let charge = accumulated_turns(&pts).round() as i32;
    Ok(VortexCharge { center, radius, charge })
}

/// D, the BZ average of sgn det H(k), from `grid_k` samples.
pub fn z2_invariant(p: &LadderParams, grid_k: usize) -> Result<f64> {
    p.require_p_symmetric("z2_invariant")?;
    // sgn of the piecewise-linear interpolant of det on the uniform grid,
    // integrated exactly; crossings inside a cell are located by the secant
    let n = grid_k.max(4);
    let dets: Vec<f64> = (0..n)
        .map(|m| build_bloch(p, -PI + 2.0 * PI * m as f64 / n as f64).det().re)
        .collect();
    let mut sum = 0.0;
    for m in 0..n {
        let (d0, d1) = (dets[m], dets[(m + 1) % n]);
        if d0 * d1 >= 0.0 {
            sum += if d0 != 0.0 { d0.signum() } else if d1 != 0.0 { d1.signum() } else { 0.0 };
        } else {
            let t = d0 / (d0 - d1);
            sum += d0.signum() * t + d1.signum() * (1.0 - t);
        }
    }
    Ok(sum / n as f64)
}

/// Δ = (J²η² − t0²δ²)/(J² − t0²).
pub fn z2_delta(p: &LadderParams) -> f64 {
    let (j, t0, eta, d) = (p.j_amp, p.t0, p.eta(), p.delta);
    (j * j * eta * eta - t0 * t0 * d * d) / (j * j - t0 * t0)
}

/// Exact value of the sgn-det average. det H(k) = 4[a cos²k + b sin²k] with
/// a = J² − t0², b = J²η² − t0²δ², so the average is ±1 when a and b share a
/// sign and (4/π)·arctan(1/√|Δ|) − 1 (up to the sign of a) otherwise.
pub fn z2_closed_form(p: &LadderParams) -> Result<f64> {
    p.require_p_symmetric("z2_closed_form")?;
    let (j, t0, eta, d) = (p.j_amp, p.t0, p.eta(), p.delta);
    let a = j * j - t0 * t0;
    let b = j * j * eta * eta - t0 * t0 * d * d;
    Ok(if a == 0.0 && b == 0.0 {
        0.0
    } else if a == 0.0 {
        b.signum()
    } else if b == 0.0 {
        a.signum()
    } else if a.signum() == b.signum() {
        b.signum()
    } else {
        let t = (a / b).abs().sqrt();
        a.signum() * (4.0 / PI * t.atan() - 1.0)
    })
}

/// (W_s^+, W_s^-). Each loop joins E^p_± on (−π/2, π/2) with E^p_∓ on
/// (π/2, 3π/2) and winds around the centroid of the matching OBC family.
/// A loop with zero enclosed area (Bloch line) returns 0.
pub fn hybrid_winding(p: &LadderParams, grid_k: usize) -> Result<(f64, f64)> {
    p.require_sublattice("hybrid_winding")?;
    let (fam_p, fam_m) = exact_obc_sublattice(p)?;
    let w = |sign: f64, fam: &[C64]| -> Result<f64> {
        let pts: Vec<C64> = (0..grid_k)
            .map(|m| {
                let k = -PI / 2.0 + 2.0 * PI * m as f64 / grid_k as f64;
                let (ep, em) = dispersion(p, k);
                let first = k < PI / 2.0;
                match (sign > 0.0, first) {
                    (true, true) | (false, false) => ep,
                    _ => em,
                }
            })
            .collect();
        let reference: C64 = fam.iter().sum::<C64>() / fam.len() as f64;
        let scale = pts.iter().map(|z| z.norm()).fold(0.0, f64::max).max(1.0);
        if shoelace_area(&pts).abs() < 1e-12 * scale * scale {
            return Ok(0.0);
        }
        let dist = min_distance_to_polyline(&pts, reference);
        if dist < 1e-9 {
            return Err(LadderError::ReferenceOnCurve(dist));
        }
        let shifted: Vec<C64> = pts.iter().map(|z| z - reference).collect();
        Ok(accumulated_turns(&shifted))
    };
    Ok((w(1.0, &fam_p)?, w(-1.0, &fam_m)?))
}

pub fn shoelace_area(pts: &[C64]) -> f64 {
    let n = pts.len();
    let mut s = 0.0;
    for i in 0..n {
        let a = pts[i];
        let b = pts[(i + 1) % n];
        s += a.re * b.im - b.re * a.im;
    }
    0.5 * s
}

fn min_distance_to_polyline(pts: &[C64], z: C64) -> f64 {
    let n = pts.len();
    let mut best = f64::INFINITY;
    for i in 0..n {
        let a = pts[i];
        let b = pts[(i + 1) % n];
        let ab = b - a;
        let t = if ab.norm_sqr() > 0.0 {
            (((z - a) * ab.conj()).re / ab.norm_sqr()).clamp(0.0, 1.0)
        } else {
            0.0
        };
        best = best.min((a + ab * t - z).norm());
    }
    best
}
