//! Numerical toolkit for the non-Hermitian Creutz ladder.
//!
//! * [`model`]: Bloch and real-space Hamiltonians, symmetry operators.
//! * [`spectra`]: dispersions, biorthogonal diagonalization, EPs, closed-form OBC spectra.
//! * [`topology`]: W_φ, the average winding Γ, vortex charges, the Z2 invariant D, hybrid spectral winding.
//! * [`nonbloch`]: β-roots, GBZ samples, amplitude ratios, scale-free criterion, migration.
//! * [`edgemodes`]: transfer matrix, exact zero modes, compact modes, gain-loss shifted modes.
//! * [`diagnostics`]: total imbalance, IPR, symmetry residuals, state classification.
//! * [`sweep`]: configs, parameter sweeps, figure recipes and CSV/JSON export.

pub mod diagnostics;
pub mod edgemodes;
pub mod error;
pub mod linalg;
pub mod model;
pub mod nonbloch;
pub mod spectra;
pub mod sweep;
pub mod topology;

pub use error::{LadderError, Result};
pub use linalg::CMat;
pub use model::{Boundary, LadderParams};
pub use num_complex::Complex64 as C64;
