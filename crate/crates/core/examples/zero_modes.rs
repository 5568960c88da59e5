//! Analytic zero modes and compact flat-band states, checked against H.
use creutz_ladder::edgemodes::{build_compact_modes, build_zero_modes, weight_center};
use creutz_ladder::LadderParams;

fn main() -> creutz_ladder::Result<()> {
    let p = LadderParams::p_symmetric(0.625, 0.0, 0.5).with_cells(43);
    let z = build_zero_modes(&p, 43)?;
    println!("{:?}: {} modes, max residual {:.2e}", z.kind, z.len(), z.max_residual());
    for m in &z.modes {
        println!("  E = {:.3e}  centre {:.2}", m.eigenvalue, weight_center(&m.amplitudes, 43));
    }

    let f = LadderParams::p_symmetric(1.0, 0.0, 0.0).with_cells(20);
    let c = build_compact_modes(&f, 20)?;
    println!("{:?}: {} modes, max residual {:.2e}", c.kind, c.len(), c.max_residual());
    Ok(())
}
