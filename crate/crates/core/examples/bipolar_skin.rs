//! Sublattice regime: hybrid windings predict which end each family piles up on.
use creutz_ladder::nonbloch::mode_weight_ratio;
use creutz_ladder::spectra::exact_obc_sublattice;
use creutz_ladder::topology::hybrid_winding;
use creutz_ladder::LadderParams;

fn main() -> creutz_ladder::Result<()> {
    let n = 30;
    for j in [0.3, 1.0, 1.6] {
        let p = LadderParams::sublattice(j, 0.5).with_cells(n);
        let (wp, wm) = hybrid_winding(&p, 1024)?;
        let (fp, fm) = exact_obc_sublattice(&p)?;
        let side = |e| mode_weight_ratio(&p, e, n).map(|w| w.side);
        println!("J = {j}: W+ = {wp:+.0} -> {:?}, W- = {wm:+.0} -> {:?}", side(fp[0])?, side(fm[0])?);
    }
    Ok(())
}
