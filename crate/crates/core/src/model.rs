//! Hamiltonians of the two-leg ladder: Bloch form, real-space matrices,
//! the Hermitian counterpart and the symmetry operators.
//!
//! Real-space site ordering is `[a_1 .. a_N, b_1 .. b_N]` everywhere in the
//! crate, so `a_j` lives at index `j - 1` and `b_j` at `N + j - 1`.

use std::f64::consts::PI;

use faer::Mat;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{LadderError, Result};
use crate::linalg::{c, r, CMat, I, ONE, ZERO};

/// Threshold used when deciding which coupling regime a parameter set is in.
pub const REGIME_TOL: f64 = 1e-14;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Boundary {
    #[default]
    Open,
    Periodic,
}

fn default_t0() -> f64 {
    1.0
}

fn default_cells() -> usize {
    40
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LadderParams {
    /// Leg hopping J.
    pub j_amp: f64,
    pub eta_a: f64,
    pub eta_b: f64,
    pub delta: f64,
    #[serde(default = "default_t0")]
    pub t0: f64,
    #[serde(default)]
    pub gamma: f64,
    #[serde(default = "default_cells")]
    pub n_cells: usize,
    #[serde(default)]
    pub boundary: Boundary,
}

impl Default for LadderParams {
    fn default() -> Self {
        Self {
            j_amp: 1.0,
            eta_a: 0.0,
            eta_b: 0.0,
            delta: 0.0,
            t0: 1.0,
            gamma: 0.0,
            n_cells: default_cells(),
            boundary: Boundary::Open,
        }
    }
}

impl LadderParams {
    /// Legs with opposite nonreciprocity, η_a = η, η_b = −η.
    pub fn p_symmetric(j_amp: f64, eta: f64, delta: f64) -> Self {
        Self { j_amp, eta_a: eta, eta_b: -eta, delta, ..Self::default() }
    }

    /// Legs with equal nonreciprocity, η_a = η_b = η, and δ = 0.
    pub fn sublattice(j_amp: f64, eta: f64) -> Self {
        Self { j_amp, eta_a: eta, eta_b: eta, delta: 0.0, ..Self::default() }
    }

    /// Equal nonreciprocity with arbitrary δ.
    pub fn pseudo_inversion(j_amp: f64, eta: f64, delta: f64) -> Self {
        Self { j_amp, eta_a: eta, eta_b: eta, delta, ..Self::default() }
    }

    pub fn with_cells(mut self, n: usize) -> Self {
        self.n_cells = n;
        self
    }

    pub fn with_gamma(mut self, gamma: f64) -> Self {
        self.gamma = gamma;
        self
    }

    pub fn with_t0(mut self, t0: f64) -> Self {
        self.t0 = t0;
        self
    }

    pub fn periodic(mut self) -> Self {
        self.boundary = Boundary::Periodic;
        self
    }

    pub fn open(mut self) -> Self {
        self.boundary = Boundary::Open;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [self.j_amp, self.eta_a, self.eta_b, self.delta, self.t0, self.gamma]
            .iter()
            .all(|x| x.is_finite());
        if !finite {
            return Err(LadderError::InvalidParams("non-finite coupling".into()));
        }
        for (name, v) in [("eta_a", self.eta_a), ("eta_b", self.eta_b), ("delta", self.delta)] {
            if v.abs() > 1.0 {
                return Err(LadderError::InvalidParams(format!("|{name}| = {} exceeds 1", v.abs())));
            }
        }
        if self.t0 <= 0.0 {
            return Err(LadderError::InvalidParams(format!("t0 = {} must be positive", self.t0)));
        }
        if self.n_cells < 2 {
            return Err(LadderError::InvalidParams(format!("n_cells = {} < 2", self.n_cells)));
        }
        Ok(())
    }

    pub fn t1(&self) -> f64 {
        self.t0 * (1.0 - self.delta)
    }

    pub fn t2(&self) -> f64 {
        self.t0 * (1.0 + self.delta)
    }

    pub fn jp_a(&self) -> f64 {
        self.j_amp * (1.0 + self.eta_a)
    }

    pub fn jm_a(&self) -> f64 {
        self.j_amp * (1.0 - self.eta_a)
    }

    pub fn jp_b(&self) -> f64 {
        self.j_amp * (1.0 + self.eta_b)
    }

    pub fn jm_b(&self) -> f64 {
        self.j_amp * (1.0 - self.eta_b)
    }

    /// η_a = −η_b (γ unrestricted).
    pub fn eta_antisymmetric(&self) -> bool {
        (self.eta_a + self.eta_b).abs() < REGIME_TOL
    }

    pub fn eta_symmetric(&self) -> bool {
        (self.eta_a - self.eta_b).abs() < REGIME_TOL
    }

    pub fn no_gain_loss(&self) -> bool {
        self.gamma.abs() < REGIME_TOL
    }

    /// η_a = −η_b and γ = 0: parity and time reversal both hold.
    pub fn is_p_symmetric(&self) -> bool {
        self.eta_antisymmetric() && self.no_gain_loss()
    }

    /// η_a = η_b, δ = 0, γ = 0.
    pub fn is_sublattice(&self) -> bool {
        self.eta_symmetric() && self.delta.abs() < REGIME_TOL && self.no_gain_loss()
    }

    /// η_a = η_b, γ = 0.
    pub fn is_pseudo_inversion(&self) -> bool {
        self.eta_symmetric() && self.no_gain_loss()
    }

    pub fn regime(&self) -> Regime {
        if self.is_p_symmetric() {
            Regime::PSymmetric
        } else if self.is_sublattice() {
            Regime::Sublattice
        } else {
            Regime::General
        }
    }

    pub fn require_p_symmetric(&self, what: &str) -> Result<()> {
        if self.is_p_symmetric() {
            Ok(())
        } else {
            Err(LadderError::Regime(format!("{what} needs eta_a = -eta_b and gamma = 0")))
        }
    }

    pub fn require_sublattice(&self, what: &str) -> Result<()> {
        if self.is_sublattice() {
            Ok(())
        } else {
            Err(LadderError::Regime(format!("{what} needs eta_a = eta_b, delta = 0, gamma = 0")))
        }
    }

    /// The common η in the P-symmetric and sublattice regimes.
    pub fn eta(&self) -> f64 {
        self.eta_a
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    PSymmetric,
    Sublattice,
    General,
}

/// Which closed-form Bloch components apply.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BlochVariant {
    /// η_a = −η_b, γ = 0: all four components real.
    Real,
    /// η_a = −η_b with gain and loss added to hz.
    GainLoss,
    /// η_a ≠ −η_b: complex h0 and hz ∝ (η_a − η_b).
    Asymmetric,
}

pub fn bloch_variant(p: &LadderParams) -> BlochVariant {
    if !p.eta_antisymmetric() {
        BlochVariant::Asymmetric
    } else if p.no_gain_loss() {
        BlochVariant::Real
    } else {
        BlochVariant::GainLoss
    }
}

pub type M2 = [[C64; 2]; 2];

/// H(k) = h0·1 + hx·σx + hy·σy + i·hz·σz.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlochMatrix {
    pub h0: C64,
    pub hx: C64,
    pub hy: C64,
    pub hz: C64,
    pub k: f64,
}

impl BlochMatrix {
    pub fn matrix(&self) -> M2 {
        [
            [self.h0 + I * self.hz, self.hx - I * self.hy],
            [self.hx + I * self.hy, self.h0 - I * self.hz],
        ]
    }

    pub fn det(&self) -> C64 {
        self.h0 * self.h0 + self.hz * self.hz - self.hx * self.hx - self.hy * self.hy
    }

    /// hx² + hy² − hz².
    pub fn radicand(&self) -> C64 {
        self.hx * self.hx + self.hy * self.hy - self.hz * self.hz
    }

    /// (E₊, E₋) with E± = h0 ± √(hx² + hy² − hz²), principal branch.
    pub fn energies(&self) -> (C64, C64) {
        let s = crate::linalg::csqrt(self.radicand());
        (self.h0 + s, self.h0 - s)
    }
}

/// Wrap k into [−π, π).
pub fn wrap_k(k: f64) -> f64 {
    let t = (k + PI).rem_euclid(2.0 * PI);
    t - PI
}

pub fn build_bloch(p: &LadderParams, k: f64) -> BlochMatrix {
    let (s, co) = k.sin_cos();
    let j = p.j_amp;
    let h0 = c(2.0 * j * co, j * (p.eta_a + p.eta_b) * s);
    let hx = r((p.t1() + p.t2()) * co);
    let hy = r((p.t1() - p.t2()) * s);
    let hz = r(j * (p.eta_a - p.eta_b) * s + p.gamma);
    BlochMatrix { h0, hx, hy, hz, k: wrap_k(k) }
}

/// Direct Fourier sum of the real-space hoppings at momentum k, with the
/// convention ψ_j ∝ e^{ikj}. Used as an independent check of `build_bloch`.
pub fn fourier_bloch(p: &LadderParams, k: f64) -> M2 {
    let e = C64::from_polar(1.0, k);
    let em = e.conj();
    [
        [p.jp_a() * e + p.jm_a() * em + I * p.gamma, p.t2() * e + p.t1() * em],
        [p.t1() * e + p.t2() * em, p.jp_b() * e + p.jm_b() * em - I * p.gamma],
    ]
}



/// Dense 2N×2N real-space Hamiltonian in the `[a.., b..]` layout.
pub fn build_realspace(p: &LadderParams) -> CMat {
    let n = p.n_cells;
    let mut m: CMat = Mat::from_fn(2 * n, 2 * n, |_, _| ZERO);
    let bonds = match p.boundary {
        Boundary::Open => n - 1,
        Boundary::Periodic => n,
    };
    let (t1, t2) = (r(p.t1()), r(p.t2()));
    for j in 0..bonds {
        let k = (j + 1) % n;
        let (aj, ak, bj, bk) = (j, k, n + j, n + k);
        m[(aj, ak)] += p.jp_a();
        m[(ak, aj)] += p.jm_a();
        m[(bj, bk)] += p.jp_b();
        m[(bk, bj)] += p.jm_b();
        m[(ak, bj)] += t1;
        m[(bj, ak)] += t1;
        m[(bk, aj)] += t2;
        m[(aj, bk)] += t2;
    }
    for j in 0..n {
        m[(j, j)] += I * p.gamma;
        m[(n + j, n + j)] -= I * p.gamma;
    }
    m
}

/// Two Hatano–Nelson chains coupled only by rungs of strength t0.
pub fn build_rung_realspace(j_amp: f64, eta: f64, t0: f64, n: usize) -> CMat {
    let mut m: CMat = Mat::from_fn(2 * n, 2 * n, |_, _| ZERO);
    for j in 0..n - 1 {
        for off in [0, n] {
            m[(off + j, off + j + 1)] = r(j_amp * (1.0 + eta));
            m[(off + j + 1, off + j)] = r(j_amp * (1.0 - eta));
        }
    }
    for j in 0..n {
        m[(j, n + j)] = r(t0);
        m[(n + j, j)] = r(t0);
    }
    m
}

/// Bloch form of the rung-coupled pair: hx = t0, hy = 0, with the leg
/// nonreciprocities η_a = η, η_b = ∓η chosen by `opposite`.
pub fn rung_bloch(j_amp: f64, eta: f64, t0: f64, opposite: bool, k: f64) -> BlochMatrix {
    let (s, co) = k.sin_cos();
    let eb = if opposite { -eta } else { eta };
    BlochMatrix {
        h0: c(2.0 * j_amp * co, j_amp * (eta + eb) * s),
        hx: r(t0),
        hy: ZERO,
        hz: r(j_amp * (eta - eb) * s),
        k: wrap_k(k),
    }
}

/// Hermitian counterpart h'x = hx − hz cos φ, h'y = hy − hz sin φ.
///
/// Needs η_a = −η_b so that hz is real; γ simply shifts hz.
pub fn build_hermitian_counterpart(p: &LadderParams, k: f64, phi: f64) -> Result<BlochMatrix> {
    if !p.eta_antisymmetric() {
        return Err(LadderError::Regime("Hermitian counterpart needs eta_a = -eta_b".into()));
    }
    let b = build_bloch(p, k);
    Ok(counterpart_of(&b, phi))
}

pub fn counterpart_of(b: &BlochMatrix, phi: f64) -> BlochMatrix {
    let (s, co) = phi.sin_cos();
    BlochMatrix {
        h0: ZERO,
        hx: r(b.hx.re - b.hz.re * co),
        hy: r(b.hy.re - b.hz.re * s),
        hz: ZERO,
        k: b.k,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SymmetryKind {
    ParityP,
    TimeReversalT,
    CombinedPt,
    Sublattice,
    PseudoInversion,
    HiddenChiralC,
}

impl SymmetryKind {
    pub const ALL: [SymmetryKind; 6] = [
        SymmetryKind::ParityP,
        SymmetryKind::TimeReversalT,
        SymmetryKind::CombinedPt,
        SymmetryKind::Sublattice,
        SymmetryKind::PseudoInversion,
        SymmetryKind::HiddenChiralC,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            SymmetryKind::ParityP => "parity_P",
            SymmetryKind::TimeReversalT => "time_reversal_T",
            SymmetryKind::CombinedPt => "combined_PT",
            SymmetryKind::Sublattice => "sublattice",
            SymmetryKind::PseudoInversion => "pseudo_inversion",
            SymmetryKind::HiddenChiralC => "hidden_chiral_C",
        }
    }
}

/// A unitary (or antiunitary, i.e. `matrix · K`) operator on the 2N sites.
#[derive(Clone, Debug)]
pub struct SymmetryOp {
    pub kind: SymmetryKind,
    pub matrix: CMat,
    pub antiunitary: bool,
}

impl SymmetryOp {
    /// S H S⁻¹, with complex conjugation applied first for antiunitary S.
    pub fn conjugate(&self, h: &CMat) -> CMat {
        let hh = if self.antiunitary { crate::linalg::conj(h) } else { h.clone() };
        let inv = crate::linalg::inverse(&self.matrix);
        &(&self.matrix * &hh) * &inv
    }

    /// Bloch-space action on 2×2 matrices where one exists (σx or identity).
    pub fn bloch_action(&self) -> Option<M2> {
        let sx = [[ZERO, ONE], [ONE, ZERO]];
        let id = [[ONE, ZERO], [ZERO, ONE]];
        match self.kind {
            SymmetryKind::ParityP
            | SymmetryKind::CombinedPt
            | SymmetryKind::Sublattice
            | SymmetryKind::PseudoInversion
            | SymmetryKind::HiddenChiralC => Some(sx),
            SymmetryKind::TimeReversalT => Some(id),
        }
    }
}

fn parity_matrix(n: usize) -> CMat {
    let mut m: CMat = Mat::from_fn(2 * n, 2 * n, |_, _| ZERO);
    for j in 0..n {
        let mirror = n - 1 - j;
        m[(n + mirror, j)] = ONE;
        m[(mirror, n + j)] = ONE;
    }
    m
}

pub fn symmetry_operator(kind: SymmetryKind, n: usize) -> SymmetryOp {
    let matrix = match kind {
        SymmetryKind::ParityP | SymmetryKind::CombinedPt | SymmetryKind::PseudoInversion => parity_matrix(n),
        SymmetryKind::TimeReversalT => crate::linalg::identity(2 * n),
        SymmetryKind::Sublattice => {
            let mut m: CMat = Mat::from_fn(2 * n, 2 * n, |_, _| ZERO);
            for j in 0..n {
                m[(j, n + j)] = ONE;
                m[(n + j, j)] = ONE;
            }
            m
        }
        SymmetryKind::HiddenChiralC => {
            // Υ_{n, N−n+1} = i^N (−1)^{n+1} with 1-based n.
            let phase = I.powu(n as u32);
            let mut m: CMat = Mat::from_fn(2 * n, 2 * n, |_, _| ZERO);
            for row in 0..n {
                let col = n - 1 - row;
                let v = if row % 2 == 0 { phase } else { -phase };
                m[(row, n + col)] = v;
                m[(n + row, col)] = v;
            }
            m
        }
    };
    let antiunitary = matches!(kind, SymmetryKind::TimeReversalT | SymmetryKind::CombinedPt);
    SymmetryOp { kind, matrix, antiunitary }
}

pub fn m2_mul(a: &M2, b: &M2) -> M2 {
    let mut o = [[ZERO; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            o[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    o
}

pub fn m2_sigma_x_conj(a: &M2) -> M2 {
    [[a[1][1], a[1][0]], [a[0][1], a[0][0]]]
}

pub fn m2_adjoint(a: &M2) -> M2 {
    [[a[0][0].conj(), a[1][0].conj()], [a[0][1].conj(), a[1][1].conj()]]
}

pub fn m2_conj(a: &M2) -> M2 {
    [[a[0][0].conj(), a[0][1].conj()], [a[1][0].conj(), a[1][1].conj()]]
}

pub fn m2_neg(a: &M2) -> M2 {
    [[-a[0][0], -a[0][1]], [-a[1][0], -a[1][1]]]
}

pub fn m2_max_diff(a: &M2, b: &M2) -> f64 {
    let mut m: f64 = 0.0;
    for i in 0..2 {
        for j in 0..2 {
            m = m.max((a[i][j] - b[i][j]).norm());
        }
    }
    m
}
