//! Periodic versus open spectra, and exceptional points of the Bloch bands.
use creutz_ladder::model::build_realspace;
use creutz_ladder::spectra::{eigenvalues, exceptional_points, pbc_energies};
use creutz_ladder::LadderParams;

fn main() -> creutz_ladder::Result<()> {
    let p = LadderParams::p_symmetric(1.0, 0.9, 0.1).with_cells(17);
    let eps = exceptional_points(&p)?;
    println!("EP momenta: {:?}", eps.momenta);

    let pbc = pbc_energies(&p, 64);
    let max_im = pbc.iter().map(|e| e.im.abs()).fold(0.0, f64::max);
    println!("PBC: {} energies, max |Im E| = {max_im:.4}", pbc.len());

    let mut obc = eigenvalues(&build_realspace(&p))?;
    obc.sort_by(|a, b| a.re.total_cmp(&b.re));
    for e in &obc {
        println!("OBC {:>10.5} {:>+10.5}i", e.re, e.im);
    }
    Ok(())
}
