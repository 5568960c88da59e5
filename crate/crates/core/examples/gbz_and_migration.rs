//! Generalized Brillouin zone from the open spectrum and the migration
//! of OBC states as N grows.
use creutz_ladder::model::build_realspace;
use creutz_ladder::nonbloch::{finite_size_migration, gbz_from_obc, gbz_radii, migration};
use creutz_ladder::spectra::{dispersion, eigenvalues};
use creutz_ladder::LadderParams;
use std::f64::consts::FRAC_PI_2;

fn main() -> creutz_ladder::Result<()> {
    let s = LadderParams::sublattice(0.3, 0.5).with_cells(40);
    let (r1, r2) = gbz_radii(&s);
    println!("sublattice GBZ radii r1 = {r1:.6}, r2 = {r2:.6}");
    let g = gbz_from_obc(&s)?;
    let (lo, hi) = g.middle_moduli.iter().fold((f64::INFINITY, 0.0f64), |(a, b), &m| (a.min(m), b.max(m)));
    println!("|β2| over {} states spans [{lo:.6}, {hi:.6}]", g.quartets.len());

    let p = LadderParams::p_symmetric(1.0, 0.9, 0.1);
    let target = dispersion(&p, FRAC_PI_2).1;
    println!("large-N M at E(π/2) = {target:.5}: {:.5}", migration(&p, target)?);
    for n in [20, 50, 100, 200] {
        let pn = p.with_cells(n);
        let ev = eigenvalues(&build_realspace(&pn))?;
        let e = *ev.iter().min_by(|a, b| (*a - target).norm().total_cmp(&(*b - target).norm())).unwrap();
        let (_, m) = finite_size_migration(&pn, e, n)?;
        println!("N = {n:>3}  E = {e:.5}  M = {m:.5}");
    }
    Ok(())
}
