use creutz_ladder::edgemodes::cell_weights;
use creutz_ladder::linalg::multiset_distance;
use creutz_ladder::model::build_realspace;
use creutz_ladder::nonbloch::{beta_roots, char_poly, mode_weight_ratio, SkinSide};
use creutz_ladder::spectra::{diagonalize, eigenvalues, exact_obc_sublattice, exceptional_points};
use creutz_ladder::sweep::{compute_grid, Axis, AxisName, Quantity, SweepConfig};
use creutz_ladder::topology::{awn, diabolic_points, hybrid_winding, vortex_charge, z2_closed_form, z2_invariant};
use creutz_ladder::{LadderParams, C64};
use proptest::prelude::*;

fn p_sym() -> impl Strategy<Value = LadderParams> {
    (0.1f64..3.0, -0.95f64..0.95, -0.95f64..0.95).prop_map(|(j, e, d)| LadderParams::p_symmetric(j, e, d))
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 1000, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn beta_pairing(p in p_sym(), er in -3.0f64..3.0, ei in -3.0f64..3.0) {
        let e = C64::new(er, ei);
        let q = beta_roots(&p, e).unwrap();
        for b in q.betas {
            let f = char_poly(&p, b, e);
            let g = char_poly(&p, 1.0 / b, e);
            let scale = 1.0 + b.norm().max(1.0 / b.norm()).powi(2);
            prop_assert!((f - g).norm() / scale < 1e-9);
            prop_assert!(f.norm() / scale < 1e-8, "root residual {}", f.norm());
        }
        // pairs multiply to 1
        let prods: Vec<C64> = q.betas.iter().map(|b| q.betas.iter().map(|c| (b * c - 1.0).norm()).fold(f64::INFINITY, f64::min)).map(|d| C64::new(d, 0.0)).collect();
        prop_assert!(prods.iter().all(|d| d.re < 1e-8));
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 200, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn spectrum_closed_under_negation_and_conjugation(p in p_sym(), n in 2usize..12) {
        let ev = eigenvalues(&build_realspace(&p.with_cells(n))).unwrap();
        let neg: Vec<C64> = ev.iter().map(|e| -e).collect();
        let cj: Vec<C64> = ev.iter().map(|e| e.conj()).collect();
        prop_assert!(multiset_distance(&ev, &neg) < 1e-10);
        prop_assert!(multiset_distance(&ev, &cj) < 1e-10);
    }

    #[test]
    fn gain_loss_keeps_conjugation(p in p_sym(), g in 0.0f64..1.5, n in 2usize..10) {
        let ev = eigenvalues(&build_realspace(&p.with_gamma(g).with_cells(n))).unwrap();
        let cj: Vec<C64> = ev.iter().map(|e| e.conj()).collect();
        prop_assert!(multiset_distance(&ev, &cj) < 1e-9);
    }

    #[test]
    fn biorthogonal_away_from_eps(p in p_sym(), n in 2usize..12) {
        let s = diagonalize(&build_realspace(&p.with_cells(n))).unwrap();
        prop_assume!(s.near_ep.is_empty());
        prop_assert!(s.biorth_residual < 1e-8, "{:.2e}", s.biorth_residual);
    }

    #[test]
    fn z2_numeric_matches_closed_form(p in p_sym()) {
        let d = z2_closed_form(&p).unwrap();
        let num = z2_invariant(&p, 4096).unwrap();
        prop_assert!((d - num).abs() <= 1.0 / 4096.0, "{d} vs {num}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 48, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn awn_grid_stable(je in -0.95f64..0.95, d in -0.95f64..0.95) {
        prop_assume!((je.abs() - d.abs()).abs() > 0.05);
        let p = LadderParams::p_symmetric(1.0, je, d);
        let a = awn(&p, 256, 64).unwrap().value;
        let b = awn(&p, 512, 128).unwrap().value;
        prop_assert!((a - b).abs() < 1e-3, "{a} vs {b}");
    }

    #[test]
    fn vortex_charges_cancel(je in 0.4f64..0.95, d in -0.35f64..0.35) {
        let p = LadderParams::p_symmetric(1.0, je, d);
        let pts = diabolic_points(&p).unwrap();
        prop_assume!(pts.len() == 4);
        let total: i32 = pts.iter().map(|&c| vortex_charge(&p, c, 0.05, 720).unwrap().charge).sum();
        prop_assert_eq!(total, 0);
        for c in pts {
            prop_assert_eq!(vortex_charge(&p, c, 0.05, 720).unwrap().charge.abs(), 1);
        }
    }

    #[test]
    fn hybrid_winding_predicts_skin_side(j in 0.1f64..0.9, eta in 0.1f64..0.9) {
        let n = 24;
        let p = LadderParams::sublattice(j, eta).with_cells(n);
        let (wp, wm) = hybrid_winding(&p, 1024).unwrap();
        let (fp, fm) = exact_obc_sublattice(&p).unwrap();
        for (w, fam) in [(wp, fp), (wm, fm)] {
            let want = if w > 0.5 { SkinSide::Left } else if w < -0.5 { SkinSide::Right } else { SkinSide::Bloch };
            for e in fam {
                prop_assert_eq!(mode_weight_ratio(&p, e, n).unwrap().side, want);
            }
        }
    }

    #[test]
    fn eta_flip_flips_hybrid_windings(j in 0.1f64..0.9, eta in 0.1f64..0.9) {
        let (a, b) = hybrid_winding(&LadderParams::sublattice(j, eta), 1024).unwrap();
        let (c, d) = hybrid_winding(&LadderParams::sublattice(j, -eta), 1024).unwrap();
        prop_assert!((a + c).abs() < 1e-9 && (b + d).abs() < 1e-9);
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 8, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn sweep_is_thread_count_independent(d in 0.1f64..0.9, threads in 2usize..6) {
        let cfg = SweepConfig::grid(
            LadderParams::p_symmetric(1.0, 0.5, d).with_cells(12),
            vec![Axis::new(AxisName::Eta, 0.0, 1.0, 6), Axis::new(AxisName::JAmp, 0.5, 1.5, 3)],
            Quantity::Ti,
            "ti.csv",
        );
        let run = |t: usize| {
            rayon::ThreadPoolBuilder::new().num_threads(t).build().unwrap().install(|| compute_grid(&cfg).unwrap().0)
        };
        let (a, b) = (run(1), run(threads));
        let bits = |g: &creutz_ladder::sweep::PhaseGrid| g.values.iter().flatten().map(|v| v.to_bits()).collect::<Vec<_>>();
        prop_assert_eq!(bits(&a), bits(&b));
    }
}

#[test]
fn sublattice_families_split_by_side() {
    let n = 30;
    let p = LadderParams::sublattice(0.3, 0.5).with_cells(n);
    let s = diagonalize(&build_realspace(&p)).unwrap();
    let mut sides = [0usize; 2];
    for i in 0..s.len() {
        let w = cell_weights(&s.right(i), n);
        let left: f64 = w[..n / 2].iter().map(|x| x * x).sum();
        let right: f64 = w[n / 2..].iter().map(|x| x * x).sum();
        sides[usize::from(right > left)] += 1;
    }
    assert_eq!(sides, [n, n]);
}

/// On the δ = 0 line Γ is exactly 0 in the broken phase, so integrality is
/// checked on the 20 × 20 grid of the phase plane, which avoids that line.
#[test]
fn awn_integer_iff_no_eps() {
    let axis: Vec<f64> = (0..20).map(|i| -0.95 + 0.1 * i as f64).collect();
    for &je in &axis {
        for &d in &axis {
            if (je.abs() - d.abs()).abs() < 0.02 {
                continue;
            }
            let p = LadderParams::p_symmetric(1.0, je, d);
            let g = awn(&p, 256, 64).unwrap().value;
            let integer = (g - g.round()).abs() < 1e-2;
            assert_eq!(integer, exceptional_points(&p).unwrap().momenta.is_empty(), "Jη = {je}, δ = {d}: Γ = {g}");
        }
    }
}
