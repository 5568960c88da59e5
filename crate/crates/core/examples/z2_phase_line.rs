//! Z2 invariant along J at fixed η and δ, numeric against closed form.
use creutz_ladder::topology::{z2_closed_form, z2_invariant};
use creutz_ladder::LadderParams;

fn main() -> creutz_ladder::Result<()> {
    for i in 0..=14 {
        let j = 0.2 + 0.1 * i as f64;
        let p = LadderParams::p_symmetric(j, 0.8, 0.5);
        println!("J = {j:.2}  Z2 = {:.4}  closed form {:.4}", z2_invariant(&p, 4096)?, z2_closed_form(&p)?);
    }
    Ok(())
}
