//! Bloch components at a few momenta and the real-space symmetry residuals.
use creutz_ladder::diagnostics::symmetry_report;
use creutz_ladder::model::build_bloch;
use creutz_ladder::spectra::dispersion;
use creutz_ladder::LadderParams;
use std::f64::consts::PI;

fn main() {
    let p = LadderParams::p_symmetric(1.0, 0.3, 0.6).with_cells(12);
    println!("{:>7} {:>22} {:>22} {:>22}", "k", "hx", "hy", "E+");
    for i in 0..=8 {
        let k = -PI + 2.0 * PI * i as f64 / 8.0;
        let b = build_bloch(&p, k);
        let (_, ep) = dispersion(&p, k);
        println!("{k:>7.3} {:>22.6} {:>22.6} {:>22.6}", b.hx, b.hy, ep);
    }
    for r in symmetry_report(&p) {
        println!("{:<16} residual {:.2e}  expected {}", r.kind.name(), r.residual, r.expected);
    }
}
