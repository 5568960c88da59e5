//! Per-state localization classes, IPR and half-chain imbalance.
use creutz_ladder::diagnostics::classify_states;
use creutz_ladder::model::build_realspace;
use creutz_ladder::spectra::diagonalize;
use creutz_ladder::LadderParams;
use std::collections::BTreeMap;

fn main() -> creutz_ladder::Result<()> {
    let p = LadderParams::p_symmetric(0.2, 0.6, 0.7).with_cells(17);
    let s = diagonalize(&build_realspace(&p))?;
    let rep = classify_states(&p, &s)?;
    let mut counts = BTreeMap::new();
    for st in &rep.per_state {
        *counts.entry(st.class.as_str()).or_insert(0) += 1;
        println!(
            "{:>9.4} {:>+9.4}i  {:<10} ipr {:.4}  imbalance {:+.3}",
            st.eigenvalue.re,
            st.eigenvalue.im,
            st.class.as_str(),
            st.ipr,
            st.half_chain_imbalance
        );
    }
    println!("classes {counts:?}, total imbalance {:.4}, biorthogonality residual {:.1e}", rep.total_imbalance, s.biorth_residual);
    Ok(())
}
