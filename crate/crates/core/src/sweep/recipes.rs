//! Bundled figure recipes. Each recipe is a list of jobs plus a provenance
//! table tagging every parameter value as `[PAPER]` or `[DERIVED]`.

use std::f64::consts::PI;
use std::path::Path;

use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use super::{
    run_with_meta, spectrum_rows, write_metadata, write_pbc_csv, write_spectrum_csv, Axis, AxisName,
    Quantity, RunSummary, SweepConfig, PBC_COLUMNS, SPECTRUM_COLUMNS,
};
use crate::error::{LadderError, Result};
use crate::model::{build_bloch, build_realspace, LadderParams};
use crate::nonbloch::{finite_size_migration, migration};
use crate::spectra::{dispersion, eigenvalues};
use crate::topology::{diabolic_points, vortex_charge, winding_phi};

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "job", rename_all = "snake_case")]
pub enum Job {
    Sweep(SweepConfig),
    /// OBC spectrum (plus PBC bands) at each size, one file per size.
    Spectra { params: LadderParams, sizes: Vec<usize>, stem: String },
    /// −N ln|β₂| for the OBC eigenvalues nearest E^p_−(k) at each target k.
    Migration { params: LadderParams, sizes: Vec<usize>, target_k: Vec<f64>, stem: String },
    /// (hx, hy, hz) along the Brillouin zone.
    HVector { params: LadderParams, grid_k: usize, stem: String },
    /// W_φ versus φ and the charges of the diabolic points.
    Vortices { params: LadderParams, grid_k: usize, grid_phi: usize, stem: String },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Recipe {
    pub name: &'static str,
    pub description: &'static str,
    /// (parameter, value with provenance tag).
    pub provenance: Vec<(&'static str, &'static str)>,
    pub jobs: Vec<Job>,
}

impl Recipe {
    pub fn provenance_json(&self) -> serde_json::Value {
        let m: serde_json::Map<String, serde_json::Value> =
            self.provenance.iter().map(|(k, v)| (k.to_string(), json!(v))).collect();
        serde_json::Value::Object(m)
    }

    fn meta(&self) -> serde_json::Value {
        json!({
            "recipe": self.name,
            "description": self.description,
            "provenance": self.provenance_json(),
        })
    }
}

pub const RECIPE_NAMES: [&str; 19] = [
    "fig1b", "fig2", "fig3", "fig4a", "fig4b", "fig4c", "fig5a", "fig5b", "fig5c", "fig6a", "fig6b", "fig6c", "fig6d",
    "fig7a", "fig7b", "fig8a", "fig8b", "fig2b", "fig2c",
];

pub fn list_recipes() -> Vec<Recipe> {
    RECIPE_NAMES.iter().filter_map(|n| recipe(n)).collect()
}

fn ps(j: f64, eta: f64, delta: f64, n: usize) -> LadderParams {
    LadderParams::p_symmetric(j, eta, delta).with_cells(n)
}

fn sweep(p: LadderParams, axes: Vec<Axis>, q: Quantity, out: &str) -> Job {
    Job::Sweep(SweepConfig::grid(p, axes, q, out))
}

pub fn recipe(name: &str) -> Option<Recipe> {
    use AxisName::*;
    let r = match name {
        "fig1b" => Recipe {
            name: "fig1b",
            description: "h(k) loop around the cone hx^2 + hy^2 = hz^2 in the Gamma = -1 zone",
            provenance: vec![
                ("zone", "[PAPER] |J eta| < |t0 delta|, Gamma = -1"),
                ("J, eta, delta", "[DERIVED] 1, 0.3, 0.6: a point inside the zone"),
            ],
            jobs: vec![Job::HVector { params: ps(1.0, 0.3, 0.6, 40), grid_k: 512, stem: "fig1b_hvector".into() }],
        },
        "fig2" => Recipe {
            name: "fig2",
            description: "Gamma raster on the J eta x t0 delta plane (J = 1 so the eta axis is J eta)",
            provenance: vec![
                ("t0", "[PAPER] 1"),
                ("J", "[DERIVED] 1, so eta spans J eta"),
                ("grid", "[DERIVED] 40 x 40 cell centres on [-1, 1]^2"),
            ],
            jobs: vec![sweep(
                ps(1.0, 0.0, 0.0, 40),
                vec![Axis::new(Eta, -0.975, 0.975, 40), Axis::new(Delta, -0.975, 0.975, 40)],
                Quantity::Awn,
                "fig2_awn.csv",
            )],
        },
        "fig2b" => Recipe {
            name: "fig2b",
            description: "Gamma versus J eta at delta = 0.3 and 0.6",
            provenance: vec![("delta", "[PAPER] 0.3, 0.6"), ("t0", "[PAPER] 1"), ("J", "[DERIVED] 1")],
            jobs: [0.3, 0.6]
                .iter()
                .map(|&d| {
                    sweep(
                        ps(1.0, 0.0, d, 40),
                        vec![Axis::new(Eta, 0.0, 1.0, 201)],
                        Quantity::Awn,
                        &format!("fig2b_delta{d}.csv"),
                    )
                })
                .collect(),
        },
        "fig2c" => Recipe {
            name: "fig2c",
            description: "Gamma versus delta at J eta = 0.3 and 0.6",
            provenance: vec![("J eta", "[PAPER] 0.3, 0.6"), ("t0", "[PAPER] 1"), ("J", "[DERIVED] 1")],
            jobs: [0.3, 0.6]
                .iter()
                .map(|&e| {
                    sweep(
                        ps(1.0, e, 0.0, 40),
                        vec![Axis::new(Delta, 0.0, 1.0, 201)],
                        Quantity::Awn,
                        &format!("fig2c_jeta{e}.csv"),
                    )
                })
                .collect(),
        },
        "fig3" => Recipe {
            name: "fig3",
            description: "W_phi flipping between phi1 and phi2, and the vortex/anti-vortex pair",
            provenance: vec![
                ("J eta, delta", "[PAPER] 0.8, 0.3"),
                ("J", "[DERIVED] 1; the EP momenta depend on J eta only"),
            ],
            jobs: vec![Job::Vortices { params: ps(1.0, 0.8, 0.3, 40), grid_k: 512, grid_phi: 256, stem: "fig3".into() }],
        },
        "fig4a" => Recipe {
            name: "fig4a",
            description: "PBC bands and OBC spectrum in the PT-unbroken phase, N = 17",
            provenance: vec![("delta, J, eta", "[PAPER] 0.7, 0.2, 0.6"), ("N", "[PAPER] 17")],
            jobs: vec![Job::Spectra { params: ps(0.2, 0.6, 0.7, 17), sizes: vec![17], stem: "fig4a".into() }],
        },
        "fig4b" => Recipe {
            name: "fig4b",
            description: "OBC spectrum approaching the PBC bands with N for J >> t0 in the PT-broken phase",
            provenance: vec![
                ("N", "[PAPER] 8, 68, 568"),
                ("J, eta, delta", "[DERIVED] 3, 0.9, 0.1: J >> t0 with |J eta| > |t0 delta|"),
            ],
            jobs: vec![Job::Spectra { params: ps(3.0, 0.9, 0.1, 8), sizes: vec![8, 68, 568], stem: "fig4b".into() }],
        },
        "fig4c" => Recipe {
            name: "fig4c",
            description: "PBC and OBC spectra nearly coincide for small N at weak J; bands just merge",
            provenance: vec![
                ("N", "[PAPER] 17"),
                ("J, eta, delta", "[DERIVED] 1, 0.9, 0.1: reproduces E^p_-(pi/2) = -1.79i and E^p_-(pi) = -4"),
            ],
            jobs: vec![Job::Spectra { params: ps(1.0, 0.9, 0.1, 17), sizes: vec![17], stem: "fig4c".into() }],
        },
        "fig5a" => Recipe {
            name: "fig5a",
            description: "Migration -N ln|beta2| versus N for the states converging to E^p_-(pi/2) and E^p_-(pi)",
            provenance: vec![
                ("params", "[PAPER] same as fig4c"),
                ("J, eta, delta", "[DERIVED] 1, 0.9, 0.1"),
                ("N", "[DERIVED] 20..400 step 20"),
            ],
            jobs: vec![Job::Migration {
                params: ps(1.0, 0.9, 0.1, 40),
                sizes: (1..=20).map(|i| 20 * i).collect(),
                target_k: vec![PI / 2.0, PI],
                stem: "fig5a".into(),
            }],
        },
        "fig5b" => Recipe {
            name: "fig5b",
            description: "Total imbalance versus delta at eta = 0.5",
            provenance: vec![
                ("eta", "[PAPER] 0.5"),
                ("J, t0", "[PAPER] 1, 1"),
                ("N", "[DERIVED] 40"),
            ],
            jobs: vec![sweep(ps(1.0, 0.5, 0.0, 40), vec![Axis::new(Delta, 0.0, 1.0, 101)], Quantity::Ti, "fig5b_ti.csv")],
        },
        "fig5c" => Recipe {
            name: "fig5c",
            description: "Total imbalance versus eta at delta = 0.5",
            provenance: vec![
                ("delta", "[PAPER] 0.5"),
                ("J, t0", "[PAPER] 1, 1"),
                ("N", "[DERIVED] 40"),
            ],
            jobs: vec![sweep(ps(1.0, 0.0, 0.5, 40), vec![Axis::new(Eta, 0.0, 1.0, 101)], Quantity::Ti, "fig5c_ti.csv")],
        },
        "fig6a" => Recipe {
            name: "fig6a",
            description: "Z2 invariant D on the J x eta plane at delta = 0.5",
            provenance: vec![("delta, t0", "[PAPER] 0.5, 1"), ("grid", "[DERIVED] 161 x 161 on J in [0, 2], eta in [-1, 1]")],
            jobs: vec![Job::Sweep(
                SweepConfig::grid(
                    ps(1.0, 0.0, 0.5, 40),
                    vec![Axis::new(JAmp, 0.0, 2.0, 161), Axis::new(Eta, -1.0, 1.0, 161)],
                    Quantity::Z2,
                    "fig6a_z2.csv",
                )
                .with_grid(Some(512), None),
            )],
        },
        "fig6b" => Recipe {
            name: "fig6b",
            description: "Hermitian OBC spectrum at the transition J = 5/8",
            provenance: vec![("eta, J, N", "[PAPER] 0, 5/8, 43"), ("delta", "[PAPER] 0.5")],
            jobs: vec![Job::Spectra { params: ps(0.625, 0.0, 0.5, 43), sizes: vec![43], stem: "fig6b".into() }],
        },
        "fig6c" => Recipe {
            name: "fig6c",
            description: "OBC spectrum versus J along eta = 0.8",
            provenance: vec![
                ("eta, delta, N", "[PAPER] 0.8, 0.5, 43"),
                ("J range", "[DERIVED] 0.2..1.6, covering both transitions 5/8 and 1"),
            ],
            jobs: vec![sweep(ps(1.0, 0.8, 0.5, 43), vec![Axis::new(JAmp, 0.2, 1.6, 57)], Quantity::Spectrum, "fig6c_spectra.csv")],
        },
        "fig6d" => Recipe {
            name: "fig6d",
            description: "D versus J along eta = 0.8 (jumps at J = 5/8 and 1)",
            provenance: vec![
                ("eta, delta", "[PAPER] 0.8, 0.5"),
                ("J range", "[DERIVED] 0.2..1.6"),
            ],
            jobs: vec![sweep(ps(1.0, 0.8, 0.5, 43), vec![Axis::new(JAmp, 0.2, 1.6, 281)], Quantity::Z2, "fig6d_z2.csv")],
        },
        "fig7a" => Recipe {
            name: "fig7a",
            description: "Numerical GBZ and spectrum with gain-loss below the PT threshold",
            provenance: vec![
                ("delta, J, eta", "[PAPER] 0.7, 0.2, 0.6"),
                ("N", "[PAPER] 68"),
                ("gamma", "[DERIVED] 0.5, below gamma* = 1.16"),
            ],
            jobs: fig7_jobs(0.5, "fig7a"),
        },
        "fig7b" => Recipe {
            name: "fig7b",
            description: "Numerical GBZ and spectrum with gain-loss above the PT threshold",
            provenance: vec![
                ("delta, J, eta", "[PAPER] 0.7, 0.2, 0.6"),
                ("N", "[PAPER] 68"),
                ("gamma", "[DERIVED] 1.5, above gamma* = 1.16"),
            ],
            jobs: fig7_jobs(1.5, "fig7b"),
        },
        "fig8a" => Recipe {
            name: "fig8a",
            description: "Sublattice-regime spectra and exact GBZ circles r1 = sqrt(17/11), r2 = sqrt(23/29)",
            provenance: vec![
                ("N", "[PAPER] 40"),
                ("J, eta", "[DERIVED] 0.3, 0.5 from the quoted radii"),
            ],
            jobs: fig8_jobs(0.3, "fig8a"),
        },
        "fig8b" => Recipe {
            name: "fig8b",
            description: "Sublattice-regime spectra at J = t0 (r1 = 1, r2 = sqrt(3/5))",
            provenance: vec![
                ("N", "[PAPER] 40"),
                ("J, eta", "[DERIVED] 1, 0.5 from the quoted radii"),
            ],
            jobs: fig8_jobs(1.0, "fig8b"),
        },
        _ => return None,
    };
    Some(r)
}

fn fig7_jobs(gamma: f64, stem: &str) -> Vec<Job> {
    let p = ps(0.2, 0.6, 0.7, 68).with_gamma(gamma);
    vec![
        Job::Sweep(SweepConfig::point(p, Quantity::Gbz, &format!("{stem}_gbz.csv"))),
        Job::Spectra { params: p, sizes: vec![68], stem: stem.into() },
    ]
}

fn fig8_jobs(j: f64, stem: &str) -> Vec<Job> {
    let p = LadderParams::sublattice(j, 0.5).with_cells(40);
    vec![
        Job::Spectra { params: p, sizes: vec![40], stem: stem.into() },
        Job::Sweep(SweepConfig::point(p, Quantity::Gbz, &format!("{stem}_gbz.csv"))),
    ]
}

/// Runs every job of a named recipe into `out_dir`.
pub fn run_recipe(name: &str, out_dir: &Path) -> Result<RunSummary> {
    let r = recipe(name).ok_or_else(|| {
        LadderError::Config(format!("unknown recipe '{name}'; available: {}", RECIPE_NAMES.join(", ")))
    })?;
    let meta = r.meta();
    let mut summary = RunSummary::default();
    for job in &r.jobs {
        summary.merge(run_job(job, out_dir, &meta)?);
    }
    Ok(summary)
}

fn with_extra(mut base: serde_json::Value, extra: &serde_json::Value) -> serde_json::Value {
    if let (Some(m), Some(x)) = (base.as_object_mut(), extra.as_object()) {
        for (k, v) in x {
            m.insert(k.clone(), v.clone());
        }
    }
    base
}

fn emit(summary: &mut RunSummary, data: std::path::PathBuf, meta: serde_json::Value) -> Result<()> {
    let mp = write_metadata(&data, &meta)?;
    summary.files.push(data);
    summary.files.push(mp);
    Ok(())
}

pub fn run_job(job: &Job, out_dir: &Path, extra: &serde_json::Value) -> Result<RunSummary> {
    let mut s = RunSummary::default();
    match job {
        Job::Sweep(cfg) => return run_with_meta(cfg, out_dir, extra),
        Job::Spectra { params, sizes, stem } => {
            for &n in sizes {
                let p = params.with_cells(n);
                let rows = spectrum_rows(&p)?;
                let path = out_dir.join(format!("{stem}_n{n}.csv"));
                write_spectrum_csv(&path, &[(None, rows)])?;
                let meta = json!({ "quantity": "spectrum", "columns": SPECTRUM_COLUMNS, "params": p });
                emit(&mut s, path, with_extra(meta, extra))?;
            }
            let pbc = out_dir.join(format!("{stem}_pbc.csv"));
            write_pbc_csv(&pbc, params, 1024)?;
            let meta = json!({ "quantity": "pbc_bands", "columns": PBC_COLUMNS, "params": params });
            emit(&mut s, pbc, with_extra(meta, extra))?;
        }
        Job::Migration { params, sizes, target_k, stem } => {
            let path = out_dir.join(format!("{stem}_migration.csv"));
            let rows: Vec<Vec<String>> = sizes
                .par_iter()
                .map(|&n| migration_rows(params, n, target_k))
                .collect::<Vec<_>>()
                .into_iter()
                .flatten()
                .collect();
            let mut w = csv::Writer::from_path(ensure(&path)?)?;
            w.write_record(MIGRATION_COLUMNS)?;
            for r in rows {
                w.write_record(&r)?;
            }
            w.flush()?;
            let limits: Vec<serde_json::Value> = target_k
                .iter()
                .map(|&k| {
                    let e = dispersion(params, k).1;
                    json!({ "k": k, "re_E": e.re, "im_E": e.im, "migration_limit": migration(params, e).ok() })
                })
                .collect();
            let meta = json!({ "quantity": "migration", "columns": MIGRATION_COLUMNS, "params": params, "limits": limits });
            emit(&mut s, path, with_extra(meta, extra))?;
        }
        Job::HVector { params, grid_k, stem } => {
            let path = out_dir.join(format!("{stem}.csv"));
            let mut w = csv::Writer::from_path(ensure(&path)?)?;
            w.write_record(["k", "hx", "hy", "hz"])?;
            for m in 0..=*grid_k {
                let k = -PI + 2.0 * PI * m as f64 / *grid_k as f64;
                let b = build_bloch(params, k);
                w.write_record([k, b.hx.re, b.hy.re, b.hz.re].map(|x| format!("{x}")))?;
            }
            w.flush()?;
            let meta = json!({ "quantity": "h_vector", "columns": ["k", "hx", "hy", "hz"], "params": params });
            emit(&mut s, path, with_extra(meta, extra))?;
        }
        Job::Vortices { params, grid_k, grid_phi, stem } => {
            let path = out_dir.join(format!("{stem}_winding.csv"));
            let phis: Vec<f64> = (0..*grid_phi).map(|i| -PI + 2.0 * PI * (i as f64 + 0.5) / *grid_phi as f64).collect();
            let ws: Vec<f64> = phis
                .par_iter()
                .map(|&phi| winding_phi(params, phi, *grid_k).map(|w| w.value).unwrap_or(f64::NAN))
                .collect();
            let mut w = csv::Writer::from_path(ensure(&path)?)?;
            w.write_record(["phi", "w_phi"])?;
            for (phi, v) in phis.iter().zip(&ws) {
                w.write_record([format!("{phi}"), format!("{v}")])?;
            }
            w.flush()?;
            let meta = json!({ "quantity": "w_phi", "columns": ["phi", "w_phi"], "params": params });
            emit(&mut s, path, with_extra(meta, extra))?;

            let vpath = out_dir.join(format!("{stem}_vortices.csv"));
            let mut w = csv::Writer::from_path(ensure(&vpath)?)?;
            w.write_record(["k", "phi", "charge"])?;
            for c in diabolic_points(params)? {
                let v = vortex_charge(params, c, 0.1, 512)?;
                w.write_record([format!("{}", c.0), format!("{}", c.1), v.charge.to_string()])?;
            }
            w.flush()?;
            let meta = json!({ "quantity": "vortices", "columns": ["k", "phi", "charge"], "params": params });
            emit(&mut s, vpath, with_extra(meta, extra))?;
        }
    }
    Ok(s)
}

pub const MIGRATION_COLUMNS: [&str; 7] = ["n", "target_k", "re_E_obc", "im_E_obc", "re_E", "im_E", "migration"];

fn ensure(path: &Path) -> Result<&Path> {
    if let Some(d) = path.parent() {
        std::fs::create_dir_all(d)?;
    }
    Ok(path)
}

fn migration_rows(params: &LadderParams, n: usize, target_k: &[f64]) -> Vec<Vec<String>> {
    let p = params.with_cells(n).open();
    let ev = match eigenvalues(&build_realspace(&p)) {
        Ok(v) => v,
        Err(e) => {
            log::warn!("migration at N = {n}: {e}");
            return Vec::new();
        }
    };
    target_k
        .iter()
        .map(|&k| {
            let target = dispersion(&p, k).1;
            let e0 = nearest(&ev, target);
            let (e, m) = finite_size_migration(&p, e0, n).unwrap_or_else(|err| {
                log::warn!("migration at N = {n}, k = {k}: {err}");
                (e0, f64::NAN)
            });
            [n as f64, k, e0.re, e0.im, e.re, e.im, m].iter().enumerate().map(|(i, x)| {
                if i == 0 { format!("{n}") } else { format!("{x}") }
            }).collect()
        })
        .collect()
}

fn nearest(ev: &[C64], target: C64) -> C64 {
    ev.iter()
        .copied()
        .min_by(|a, b| (a - target).norm().total_cmp(&(b - target).norm()))
        .unwrap_or(target)
}
