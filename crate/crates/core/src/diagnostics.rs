//! State- and spectrum-level diagnostics: total imbalance, IPR, symmetry
//! residuals and a localization classifier.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::edgemodes::{build_compact_modes, cell_weights};
use crate::error::Result;
use crate::linalg::{self, CMat};
use crate::model::{build_realspace, symmetry_operator, LadderParams, SymmetryKind};
use crate::nonbloch::{mode_weight_ratio, sf_classify, SfClass, SkinSide};
use crate::spectra::ComplexSpectrum;
use crate::topology::z2_closed_form;

/// Cells 1..=⌊N/2⌋ form the left half and ⌈N/2⌉+1..=N the right half; the
/// middle cell of an odd chain belongs to neither.
pub fn half_ranges(n: usize) -> (std::ops::Range<usize>, std::ops::Range<usize>) {
    (0..n / 2, n.div_ceil(2)..n)
}

/// One state's contribution: Σ over legs of |left − right| weight, over the
/// state's total weight.
pub fn state_imbalance(v: &[C64], n: usize) -> f64 {
    let (l, r) = half_ranges(n);
    let total: f64 = v.iter().map(|z| z.norm_sqr()).sum();
    let leg = |off: usize| -> f64 {
        let a: f64 = l.clone().map(|j| v[off + j].norm_sqr()).sum();
        let b: f64 = r.clone().map(|j| v[off + j].norm_sqr()).sum();
        (a - b).abs()
    };
    (leg(0) + leg(n)) / total
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TotalImbalance {
    /// Sum over all right eigenstates.
    pub raw: f64,
    /// `raw` divided by the number of states.
    pub per_state: f64,
    pub contributions: Vec<f64>,
}

pub fn total_imbalance(spectrum: &ComplexSpectrum, n_cells: usize) -> TotalImbalance {
    let contributions: Vec<f64> = (0..spectrum.len()).map(|i| state_imbalance(&spectrum.right(i), n_cells)).collect();
    let raw: f64 = contributions.iter().sum();
    TotalImbalance { raw, per_state: raw / contributions.len().max(1) as f64, contributions }
}

/// Σ|ψ_j|⁴ / (Σ|ψ_j|²)².
pub fn ipr(state: &[C64]) -> f64 {
    let s2: f64 = state.iter().map(|z| z.norm_sqr()).sum();
    let s4: f64 = state.iter().map(|z| z.norm_sqr().powi(2)).sum();
    s4 / (s2 * s2)
}

/// IPR of the scale-free modes of the unidirectional chain with boundary
/// coupling ζ ∈ [0, 1]; 1/N at ζ = 1.
pub fn ipr_closed_form(zeta: f64, n_sites: usize) -> f64 {
    let n = n_sites as f64;
    if (zeta - 1.0).abs() < 1e-15 {
        return 1.0 / n;
    }
    let z2n = zeta.powf(2.0 / n);
    (zeta * zeta + 1.0) * (z2n - 1.0) / ((zeta * zeta - 1.0) * (z2n + 1.0))
}

/// The N eigenstates [1, ζ^{1/N}e^{iθ}, …, ζ^{(N−1)/N}e^{i(N−1)θ}] with θ = 2πm/N.
pub fn unidirectional_modes(zeta: f64, n_sites: usize) -> Vec<Vec<C64>> {
    let n = n_sites as f64;
    (1..=n_sites)
        .map(|m| {
            let th = 2.0 * std::f64::consts::PI * m as f64 / n;
            (0..n_sites)
                .map(|j| {
                    let amp = if zeta == 0.0 && j > 0 { 0.0 } else { zeta.powf(j as f64 / n) };
                    C64::from_polar(amp, th * j as f64)
                })
                .collect()
        })
        .collect()
}

/// The unidirectional chain Σ|j⟩⟨j+1| + ζ|N⟩⟨1|.
pub fn unidirectional_chain(zeta: f64, n_sites: usize) -> CMat {
    CMat::from_fn(n_sites, n_sites, |i, k| {
        if k == i + 1 {
            linalg::ONE
        } else if i == n_sites - 1 && k == 0 {
            linalg::r(zeta)
        } else {
            linalg::ZERO
        }
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SymmetryResidual {
    pub kind: SymmetryKind,
    /// ‖S H S⁻¹ − target‖_F / ‖H‖_F.
    pub residual: f64,
    /// Human-readable target, e.g. "H", "-H", "H^dagger".
    pub target: String,
    /// Whether the parameters put this relation in force.
    pub expected: bool,
}

/// Residuals of every real-space relation on the OBC matrix. Reflection
/// plays the role of k → −k, so P and pseudo-inversion compare against H and
/// H† respectively; the hidden chiral operator against −H.
pub fn symmetry_report(p: &LadderParams) -> Vec<SymmetryResidual> {
    let h = build_realspace(p);
    let n = p.n_cells;
    let hn = linalg::frob(&h).max(1e-300);
    let no_gl = p.no_gain_loss();
    SymmetryKind::ALL
        .iter()
        .map(|&kind| {
            let op = symmetry_operator(kind, n);
            let lhs = op.conjugate(&h);
            let (target, label, expected) = match kind {
                SymmetryKind::ParityP => (h.clone(), "H", p.is_p_symmetric()),
                SymmetryKind::TimeReversalT => (h.clone(), "H", no_gl),
                SymmetryKind::CombinedPt => (h.clone(), "H", p.eta_antisymmetric()),
                SymmetryKind::Sublattice => (h.clone(), "H", p.is_sublattice()),
                SymmetryKind::PseudoInversion => (linalg::adjoint(&h), "H^dagger", p.is_pseudo_inversion()),
                SymmetryKind::HiddenChiralC => {
                    (linalg::scale(&h, -linalg::ONE), "-H", p.eta_antisymmetric() && no_gl)
                }
            };
            let residual = linalg::frob(&linalg::sub(&lhs, &target)) / hn;
            SymmetryResidual { kind, residual, target: label.to_string(), expected }
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StateClass {
    Extended,
    ScaleFree,
    ExpLeft,
    ExpRight,
    Compact,
}

impl StateClass {
    pub fn as_str(&self) -> &'static str {
        match self {
            StateClass::Extended => "extended",
            StateClass::ScaleFree => "scale_free",
            StateClass::ExpLeft => "exp_left",
            StateClass::ExpRight => "exp_right",
            StateClass::Compact => "compact",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StateReport {
    pub eigenvalue: C64,
    pub ipr: f64,
    /// (left − right)/(total) over both legs.
    pub half_chain_imbalance: f64,
    /// Fitted slope of ln(cell weight) per cell over the middle 60%.
    pub decay_rate: f64,
    pub class: StateClass,
    /// Distance of the deciding quantity from its threshold; small values flag
    /// ambiguous states.
    pub margin: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LocalizationReport {
    pub per_state: Vec<StateReport>,
    pub total_imbalance: f64,
}

/// (left − right)/total mass of a state over both legs.
pub fn signed_half_mass(v: &[C64], n: usize) -> f64 {
    let w = cell_weights(v, n);
    let (l, r) = half_ranges(n);
    let tot: f64 = w.iter().map(|x| x * x).sum();
    let a: f64 = l.map(|j| w[j] * w[j]).sum();
    let b: f64 = r.map(|j| w[j] * w[j]).sum();
    (a - b) / tot
}

/// Log-linear fit of the cell weights over the middle 60% of the chain.
pub fn middle_decay_rate(v: &[C64], n: usize) -> f64 {
    let w = cell_weights(v, n);
    let lo = (n as f64 * 0.2).floor() as usize;
    let hi = ((n as f64 * 0.8).ceil() as usize).min(n);
    let (xs, ys): (Vec<f64>, Vec<f64>) = (lo..hi)
        .filter(|&j| w[j] > 0.0)
        .map(|j| (j as f64, w[j].ln()))
        .unzip();
    if xs.len() < 2 {
        return 0.0;
    }
    linalg::linear_fit(&xs, &ys).1
}

/// Number of cells carrying amplitude above `floor` on a unit-norm state.
pub fn support_cells(v: &[C64], n: usize, floor: f64) -> usize {
    let nv = linalg::vnorm(v);
    cell_weights(v, n).iter().filter(|w| **w / nv > floor).count()
}

fn side_class(signed: f64) -> StateClass {
    if signed >= 0.0 {
        StateClass::ExpLeft
    } else {
        StateClass::ExpRight
    }
}

/// Tags every state of an OBC spectrum. Compact states are found by support
/// size, and at the flat-band triple point a degenerate zero-energy cluster
/// is tagged compact when the constructed compact basis has the same size.
/// Bulk states then use the regime's non-Bloch criterion (sublattice:
/// mode-weight ratio; P-symmetric: scale-free test) and fall back to the
/// fitted decay rate elsewhere.
pub fn classify_states(p: &LadderParams, spectrum: &ComplexSpectrum) -> Result<LocalizationReport> {
    let n = p.n_cells;
    let ti = total_imbalance(spectrum, n);
    let compact_count = if p.is_p_symmetric() {
        build_compact_modes(p, n).ok().filter(|s| s.max_residual() < 1e-10).map(|s| s.len())
    } else {
        None
    };
    let zero_cluster: Vec<usize> = (0..spectrum.len()).filter(|&i| spectrum.eigenvalues[i].norm() < 1e-8).collect();
    let flat_cluster = compact_count.is_some_and(|c| c == zero_cluster.len() && c > 0);
    let z2_edge = if p.is_p_symmetric() {
        z2_closed_form(p).map(|d| (d.abs() - 1.0).abs() < 1e-12).unwrap_or(false)
    } else {
        false
    };
    let mut per_state = Vec::with_capacity(spectrum.len());
    for i in 0..spectrum.len() {
        let e = spectrum.eigenvalues[i];
        let v = spectrum.right(i);
        let signed = signed_half_mass(&v, n);
        let rate = middle_decay_rate(&v, n);
        let mut margin = signed.abs();
        let class = if support_cells(&v, n, 1e-10) <= 2 || (flat_cluster && e.norm() < 1e-8) {
            margin = 1.0;
            StateClass::Compact
        } else if p.is_sublattice() {
            match mode_weight_ratio(p, e, n) {
                Ok(w) => {
                    margin = w.ln_ratio.abs();
                    match w.side {
                        SkinSide::Left => StateClass::ExpLeft,
                        SkinSide::Right => StateClass::ExpRight,
                        SkinSide::Bloch => StateClass::Extended,
                    }
                }
                Err(_) => rate_class(rate, n, signed, &mut margin),
            }
        } else if p.is_p_symmetric() {
            if z2_edge && e.norm() < 1e-6 {
                side_class(signed)
            } else {
                match sf_classify(p, e, n) {
                    Ok(sf) => {
                        margin = (1.0 - sf.limit_modulus).abs();
                        if sf.class == SfClass::ScaleFree {
                            StateClass::ScaleFree
                        } else {
                            StateClass::Extended
                        }
                    }
                    Err(_) => rate_class(rate, n, signed, &mut margin),
                }
            }
        } else {
            rate_class(rate, n, signed, &mut margin)
        };
        per_state.push(StateReport { eigenvalue: e, ipr: ipr(&v), half_chain_imbalance: signed, decay_rate: rate, class, margin });
    }
    Ok(LocalizationReport { per_state, total_imbalance: ti.raw })
}

/// Extended when the fitted envelope changes by less than e² across the chain.
fn rate_class(rate: f64, n: usize, signed: f64, margin: &mut f64) -> StateClass {
    let span = rate.abs() * n as f64;
    *margin = (span - 2.0).abs();
    if span < 2.0 {
        StateClass::Extended
    } else {
        side_class(signed)
    }
}
