//! A coarse map of the averaged winding number over the (Jη, δ) plane,
//! plus the gain-loss threshold of one point.
use creutz_ladder::spectra::{pt_threshold_closed_form, pt_threshold_gamma};
use creutz_ladder::topology::awn;
use creutz_ladder::LadderParams;

fn main() -> creutz_ladder::Result<()> {
    let axis: Vec<f64> = (0..10).map(|i| -0.9 + 0.2 * i as f64).collect();
    print!("{:>8}", "δ \\ Jη");
    for je in &axis {
        print!("{je:>7.2}");
    }
    println!();
    for &d in axis.iter().rev() {
        print!("{d:>8.2}");
        for &je in &axis {
            let g = awn(&LadderParams::p_symmetric(1.0, je, d), 256, 32)?.value;
            print!("{g:>7.2}");
        }
        println!();
    }

    let p = LadderParams::p_symmetric(1.0, 0.0, 0.5);
    println!("γ_PT numeric {:.6}, closed form {:.6}", pt_threshold_gamma(&p, (0.0, 10.0), 1e-8)?, pt_threshold_closed_form(&p));
    Ok(())
}
