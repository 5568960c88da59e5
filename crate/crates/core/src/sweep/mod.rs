//! Sweep configuration, parameter-grid runner and CSV/JSON export.
//!
//! A [`SweepConfig`] is read from TOML with unknown keys rejected. Grid
//! quantities (`awn`, `z2`, `ti`, `hybrid_winding`, `pt_threshold`) produce a
//! [`PhaseGrid`]; point quantities (`spectrum`, `gbz`, `zero_modes`) write
//! per-state tables. Every data file gets a sibling `.json` with the config echo.

use std::fs;
use std::path::{Path, PathBuf};

use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::diagnostics::{classify_states, state_imbalance};
use crate::edgemodes::{
    build_compact_modes, build_zero_modes, gamma_shifted_modes, pseudo_inversion_zero_modes, EdgeModeSet,
};
use crate::error::{LadderError, Result};
use crate::model::{build_realspace, LadderParams};
use crate::nonbloch::{beta_roots, gbz_from_obc};
use crate::spectra::{diagonalize, dispersion, pt_threshold_gamma};
use crate::topology::{awn, hybrid_winding, z2_invariant};

pub mod recipes;

pub use recipes::{list_recipes, recipe, run_recipe, Recipe};

pub const DEFAULT_GRID_K: usize = 256;
pub const DEFAULT_GRID_PHI: usize = 64;
pub const DEFAULT_Z2_GRID: usize = 4096;
pub const PT_GAMMA_MAX: f64 = 10.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AxisName {
    JAmp,
    Eta,
    Delta,
    Gamma,
}

impl AxisName {
    pub fn as_str(&self) -> &'static str {
        match self {
            AxisName::JAmp => "j_amp",
            AxisName::Eta => "eta",
            AxisName::Delta => "delta",
            AxisName::Gamma => "gamma",
        }
    }
}

/// How an `eta` axis value is written into (η_a, η_b).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EtaLock {
    #[default]
    Antisymmetric,
    Symmetric,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Axis {
    pub name: AxisName,
    pub min: f64,
    pub max: f64,
    pub steps: usize,
}

impl Axis {
    pub fn new(name: AxisName, min: f64, max: f64, steps: usize) -> Self {
        Self { name, min, max, steps }
    }

    /// Evenly spaced, endpoints included.
    pub fn values(&self) -> Vec<f64> {
        let n = self.steps;
        (0..n).map(|i| self.min + (self.max - self.min) * i as f64 / (n - 1) as f64).collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Quantity {
    Awn,
    Z2,
    Ti,
    HybridWinding,
    PtThreshold,
    Spectrum,
    Gbz,
    ZeroModes,
}

impl Quantity {
    pub fn as_str(&self) -> &'static str {
        match self {
            Quantity::Awn => "awn",
            Quantity::Z2 => "z2",
            Quantity::Ti => "ti",
            Quantity::HybridWinding => "hybrid_winding",
            Quantity::PtThreshold => "pt_threshold",
            Quantity::Spectrum => "spectrum",
            Quantity::Gbz => "gbz",
            Quantity::ZeroModes => "zero_modes",
        }
    }

    pub fn is_grid(&self) -> bool {
        matches!(self, Quantity::Awn | Quantity::Z2 | Quantity::Ti | Quantity::HybridWinding | Quantity::PtThreshold)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridOverrides {
    pub grid_k: Option<usize>,
    pub grid_phi: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub base_params: LadderParams,
    #[serde(default)]
    pub axes: Vec<Axis>,
    pub quantity: Quantity,
    pub output_path: String,
    #[serde(default)]
    pub grid_overrides: Option<GridOverrides>,
    #[serde(default)]
    pub eta_lock: EtaLock,
}

impl SweepConfig {
    pub fn point(base_params: LadderParams, quantity: Quantity, output_path: &str) -> Self {
        Self {
            base_params,
            axes: Vec::new(),
            quantity,
            output_path: output_path.to_string(),
            grid_overrides: None,
            eta_lock: EtaLock::Antisymmetric,
        }
    }

    pub fn grid(base_params: LadderParams, axes: Vec<Axis>, quantity: Quantity, output_path: &str) -> Self {
        Self { axes, ..Self::point(base_params, quantity, output_path) }
    }

    pub fn with_eta_lock(mut self, lock: EtaLock) -> Self {
        self.eta_lock = lock;
        self
    }

    pub fn with_grid(mut self, grid_k: Option<usize>, grid_phi: Option<usize>) -> Self {
        self.grid_overrides = Some(GridOverrides { grid_k, grid_phi });
        self
    }

    pub fn from_toml_str(s: &str) -> Result<Self> {
        let cfg: SweepConfig = toml::from_str(s).map_err(|e| LadderError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)
            .map_err(|e| LadderError::Config(format!("{}: {e}", path.display())))?;
        Self::from_toml_str(&text).map_err(|e| match e {
            LadderError::Config(m) => LadderError::Config(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| LadderError::Config(e.to_string()))
    }

    pub fn validate(&self) -> Result<()> {
        self.base_params
            .validate()
            .map_err(|e| LadderError::Config(format!("base_params: {e}")))?;
        if self.axes.len() > 2 {
            return Err(LadderError::Config(format!("axes: at most 2 allowed, got {}", self.axes.len())));
        }
        for (i, a) in self.axes.iter().enumerate() {
            if a.steps < 2 {
                return Err(LadderError::Config(format!("axes[{i}].steps: must be >= 2, got {}", a.steps)));
            }
            if !a.min.is_finite() || !a.max.is_finite() {
                return Err(LadderError::Config(format!("axes[{i}]: min/max must be finite")));
            }
        }
        if self.axes.len() == 2 && self.axes[0].name == self.axes[1].name {
            return Err(LadderError::Config(format!("axes: duplicate axis '{}'", self.axes[0].name.as_str())));
        }
        if !self.quantity.is_grid() {
            let allowed = if self.quantity == Quantity::Spectrum { 1 } else { 0 };
            if self.axes.len() > allowed {
                return Err(LadderError::Config(format!(
                    "axes: quantity '{}' accepts at most {allowed} axis",
                    self.quantity.as_str()
                )));
            }
        }
        if self.output_path.trim().is_empty() {
            return Err(LadderError::Config("output_path: empty".into()));
        }
        Ok(())
    }

    pub fn grid_k(&self) -> usize {
        self.grid_overrides.and_then(|g| g.grid_k).unwrap_or(match self.quantity {
            Quantity::Z2 => DEFAULT_Z2_GRID,
            _ => DEFAULT_GRID_K,
        })
    }

    pub fn grid_phi(&self) -> usize {
        self.grid_overrides.and_then(|g| g.grid_phi).unwrap_or(DEFAULT_GRID_PHI)
    }

    /// Base parameters with axis values substituted.
    pub fn params_at(&self, values: &[f64]) -> LadderParams {
        let mut p = self.base_params;
        for (a, &v) in self.axes.iter().zip(values) {
            match a.name {
                AxisName::JAmp => p.j_amp = v,
                AxisName::Delta => p.delta = v,
                AxisName::Gamma => p.gamma = v,
                AxisName::Eta => {
                    p.eta_a = v;
                    p.eta_b = match self.eta_lock {
                        EtaLock::Antisymmetric => -v,
                        EtaLock::Symmetric => v,
                    };
                }
            }
        }
        p
    }

    pub fn echo(&self) -> serde_json::Value {
        serde_json::to_value(self).unwrap_or(serde_json::Value::Null)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhaseGrid {
    pub axis_labels: Vec<String>,
    pub axis_values: Vec<Vec<f64>>,
    /// `values[i][j]` at axis1[i], axis2[j]; one column for a 1D sweep, one
    /// cell for a point.
    pub values: Vec<Vec<f64>>,
    pub quantity: String,
    pub metadata: serde_json::Value,
}

impl PhaseGrid {
    pub fn shape(&self) -> (usize, usize) {
        (self.values.len(), self.values.first().map_or(0, |r| r.len()))
    }

    pub fn nan_count(&self) -> usize {
        self.values.iter().flatten().filter(|v| v.is_nan()).count()
    }
}

/// (W⁺ grid, W⁻ grid) for `hybrid_winding`; other quantities fill only the first.
fn evaluate_cell(cfg: &SweepConfig, p: &LadderParams) -> Result<(f64, f64)> {
    match cfg.quantity {
        Quantity::Awn => Ok((awn(p, cfg.grid_k(), cfg.grid_phi())?.value, f64::NAN)),
        Quantity::Z2 => Ok((z2_invariant(p, cfg.grid_k())?, f64::NAN)),
        Quantity::Ti => {
            let s = diagonalize(&build_realspace(&p.open()))?;
            Ok((crate::diagnostics::total_imbalance(&s, p.n_cells).raw, f64::NAN))
        }
        Quantity::HybridWinding => hybrid_winding(p, cfg.grid_k()),
        Quantity::PtThreshold => match pt_threshold_gamma(p, (0.0, PT_GAMMA_MAX), 1e-9) {
            Ok(g) => Ok((g, f64::NAN)),
            Err(LadderError::NoTransition { .. }) => Ok((f64::INFINITY, f64::NAN)),
            Err(e) => Err(e),
        },
        _ => Err(LadderError::Config(format!("'{}' is not a grid quantity", cfg.quantity.as_str()))),
    }
}

fn axis_points(cfg: &SweepConfig) -> (Vec<f64>, Vec<f64>) {
    let a1 = cfg.axes.first().map(|a| a.values()).unwrap_or_else(|| vec![f64::NAN]);
    let a2 = cfg.axes.get(1).map(|a| a.values()).unwrap_or_else(|| vec![f64::NAN]);
    (a1, a2)
}

fn axis_labels(cfg: &SweepConfig) -> Vec<String> {
    cfg.axes.iter().map(|a| a.name.as_str().to_string()).collect()
}

/// Evaluates a grid quantity over the axes. Failed cells become NaN with a
/// warning; the result is independent of thread count.
pub fn compute_grid(cfg: &SweepConfig) -> Result<(PhaseGrid, Option<PhaseGrid>)> {
    cfg.validate()?;
    if !cfg.quantity.is_grid() {
        return Err(LadderError::Config(format!("quantity: '{}' is not a grid quantity", cfg.quantity.as_str())));
    }
    let (a1, a2) = axis_points(cfg);
    let cells: Vec<(usize, usize)> = (0..a1.len()).flat_map(|i| (0..a2.len()).map(move |j| (i, j))).collect();
    let out: Vec<(f64, f64)> = cells
        .par_iter()
        .map(|&(i, j)| {
            let vals: Vec<f64> = [a1[i], a2[j]].into_iter().take(cfg.axes.len()).collect();
            let p = cfg.params_at(&vals);
            evaluate_cell(cfg, &p).unwrap_or_else(|e| {
                log::warn!("{} at {:?}: {e}", cfg.quantity.as_str(), vals);
                (f64::NAN, f64::NAN)
            })
        })
        .collect();
    let reshape = |pick: fn(&(f64, f64)) -> f64| -> Vec<Vec<f64>> {
        out.chunks(a2.len()).map(|row| row.iter().map(pick).collect()).collect()
    };
    let axis_values: Vec<Vec<f64>> = cfg.axes.iter().map(|a| a.values()).collect();
    let first = PhaseGrid {
        axis_labels: axis_labels(cfg),
        axis_values: axis_values.clone(),
        values: reshape(|v| v.0),
        quantity: cfg.quantity.as_str().to_string(),
        metadata: cfg.echo(),
    };
    let second = (cfg.quantity == Quantity::HybridWinding).then(|| PhaseGrid {
        axis_labels: axis_labels(cfg),
        axis_values,
        values: reshape(|v| v.1),
        quantity: "hybrid_winding_minus".to_string(),
        metadata: cfg.echo(),
    });
    Ok((first, second))
}

/// One row of a spectrum table.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectrumRow {
    pub index: usize,
    pub energy: C64,
    pub class: String,
    pub ipr: f64,
    pub imbalance: f64,
    pub abs_betas: Option<[f64; 4]>,
}

/// OBC eigenvalues with per-state diagnostics and, when the quartic is
/// regular, the sorted β moduli.
pub fn spectrum_rows(p: &LadderParams) -> Result<Vec<SpectrumRow>> {
    let po = p.open();
    let s = diagonalize(&build_realspace(&po))?;
    let report = classify_states(&po, &s)?;
    Ok((0..s.len())
        .map(|i| {
            let e = s.eigenvalues[i];
            let v = s.right(i);
            SpectrumRow {
                index: i,
                energy: e,
                class: report.per_state[i].class.as_str().to_string(),
                ipr: report.per_state[i].ipr,
                imbalance: state_imbalance(&v, po.n_cells),
                abs_betas: beta_roots(&po, e).ok().map(|q| q.moduli()),
            }
        })
        .collect())
}

fn fmt(x: f64) -> String {
    format!("{x}")
}

fn beta_cells(b: &Option<[f64; 4]>) -> Vec<String> {
    match b {
        Some(m) => m.iter().map(|&x| fmt(x)).collect(),
        None => vec![String::new(); 4],
    }
}

pub const SPECTRUM_COLUMNS: [&str; 10] =
    ["index", "re_E", "im_E", "class", "ipr", "imbalance", "abs_beta1", "abs_beta2", "abs_beta3", "abs_beta4"];
pub const GRID_COLUMNS: [&str; 3] = ["axis1", "axis2", "value"];
pub const PBC_COLUMNS: [&str; 5] = ["k", "re_E_minus", "im_E_minus", "re_E_plus", "im_E_plus"];
pub const GBZ_COLUMNS: [&str; 12] = [
    "index", "re_E", "im_E", "re_beta1", "im_beta1", "re_beta2", "im_beta2", "re_beta3", "im_beta3", "re_beta4",
    "im_beta4", "abs_beta2",
];
pub const MODE_COLUMNS: [&str; 9] = ["mode", "kind", "re_E", "im_E", "cell", "leg", "re_psi", "im_psi", "abs2"];

fn ensure_parent(path: &Path) -> Result<()> {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            fs::create_dir_all(dir)?;
        }
    }
    Ok(())
}

fn writer(path: &Path) -> Result<csv::Writer<fs::File>> {
    ensure_parent(path)?;
    Ok(csv::Writer::from_path(path)?)
}

/// Spectrum table; with `axis` set, every row is prefixed by the axis value.
pub fn write_spectrum_csv(path: &Path, blocks: &[(Option<f64>, Vec<SpectrumRow>)]) -> Result<()> {
    let mut w = writer(path)?;
    let swept = blocks.iter().any(|b| b.0.is_some());
    let mut header: Vec<&str> = Vec::new();
    if swept {
        header.push("axis1");
    }
    header.extend(SPECTRUM_COLUMNS);
    w.write_record(&header)?;
    for (axis, rows) in blocks {
        for r in rows {
            let mut rec = Vec::with_capacity(11);
            if swept {
                rec.push(axis.map(fmt).unwrap_or_default());
            }
            rec.extend([
                r.index.to_string(),
                fmt(r.energy.re),
                fmt(r.energy.im),
                r.class.clone(),
                fmt(r.ipr),
                fmt(r.imbalance),
            ]);
            rec.extend(beta_cells(&r.abs_betas));
            w.write_record(&rec)?;
        }
    }
    w.flush()?;
    Ok(())
}

/// PBC bands E^p_∓(k) on k = −π + 2πm/grid.
pub fn write_pbc_csv(path: &Path, p: &LadderParams, grid: usize) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record(PBC_COLUMNS)?;
    for m in 0..=grid {
        let k = -std::f64::consts::PI + 2.0 * std::f64::consts::PI * m as f64 / grid as f64;
        let (ep, em) = dispersion(p, k);
        w.write_record([fmt(k), fmt(em.re), fmt(em.im), fmt(ep.re), fmt(ep.im)])?;
    }
    w.flush()?;
    Ok(())
}

/// Phase grid in long form; `axis2` is empty for 1D sweeps and both axes
/// are empty for a single point.
pub fn write_grid_csv(path: &Path, g: &PhaseGrid) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record(GRID_COLUMNS)?;
    let ax = |d: usize, i: usize| g.axis_values.get(d).map(|v| fmt(v[i])).unwrap_or_default();
    for (i, row) in g.values.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            w.write_record([ax(0, i), ax(1, j), fmt(*v)])?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn write_gbz_csv(path: &Path, p: &LadderParams) -> Result<()> {
    let g = gbz_from_obc(&p.open())?;
    let mut w = writer(path)?;
    w.write_record(GBZ_COLUMNS)?;
    for (i, (q, m)) in g.quartets.iter().zip(&g.middle_moduli).enumerate() {
        let mut rec = vec![i.to_string(), fmt(q.energy.re), fmt(q.energy.im)];
        for b in q.betas {
            rec.push(fmt(b.re));
            rec.push(fmt(b.im));
        }
        rec.push(fmt(*m));
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

/// Every analytic edge/compact mode family that applies to `p`.
pub fn mode_sets(p: &LadderParams) -> Result<Vec<EdgeModeSet>> {
    let n = p.n_cells;
    let mut sets = Vec::new();
    if p.is_p_symmetric() {
        if p.no_gain_loss() {
            if let Ok(s) = build_compact_modes(p, n) {
                sets.push(s);
            } else {
                sets.push(build_zero_modes(p, n)?);
            }
        } else {
            sets.push(gamma_shifted_modes(p, n)?);
        }
    } else if p.is_pseudo_inversion() {
        sets.push(pseudo_inversion_zero_modes(p, n)?.modes);
    } else {
        return Err(LadderError::Regime("no analytic mode family for these couplings".into()));
    }
    Ok(sets)
}

pub fn write_modes_csv(path: &Path, p: &LadderParams) -> Result<usize> {
    let n = p.n_cells;
    let sets = mode_sets(p)?;
    let mut w = writer(path)?;
    w.write_record(MODE_COLUMNS)?;
    let mut idx = 0;
    for set in &sets {
        let kind = serde_json::to_value(set.kind)?.as_str().unwrap_or_default().to_string();
        for m in &set.modes {
            for (site, z) in m.amplitudes.iter().enumerate() {
                let (cell, leg) = if site < n { (site + 1, "a") } else { (site - n + 1, "b") };
                w.write_record([
                    idx.to_string(),
                    kind.clone(),
                    fmt(m.eigenvalue.re),
                    fmt(m.eigenvalue.im),
                    cell.to_string(),
                    leg.to_string(),
                    fmt(z.re),
                    fmt(z.im),
                    fmt(z.norm_sqr()),
                ])?;
            }
            idx += 1;
        }
    }
    w.flush()?;
    Ok(idx)
}

/// Sidecar `<stem>.json` next to a data file.
pub fn metadata_path(data: &Path) -> PathBuf {
    data.with_extension("json")
}

pub fn write_metadata(data: &Path, meta: &serde_json::Value) -> Result<PathBuf> {
    let path = metadata_path(data);
    ensure_parent(&path)?;
    let mut text = serde_json::to_string_pretty(meta)?;
    text.push('\n');
    fs::write(&path, text)?;
    Ok(path)
}

fn base_meta(cfg: &SweepConfig, columns: &[&str]) -> serde_json::Value {
    json!({
        "quantity": cfg.quantity.as_str(),
        "columns": columns,
        "config": cfg.echo(),
        "crate_version": env!("CARGO_PKG_VERSION"),
    })
}

/// Files written by a run plus the number of grid cells that failed.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct RunSummary {
    pub files: Vec<PathBuf>,
    pub failed_cells: usize,
}

impl RunSummary {
    pub fn merge(&mut self, other: RunSummary) {
        self.files.extend(other.files);
        self.failed_cells += other.failed_cells;
    }
}

/// Resolves `output_path` against `out_dir` unless it is absolute.
pub fn resolve_output(cfg: &SweepConfig, out_dir: &Path) -> PathBuf {
    let p = Path::new(&cfg.output_path);
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        out_dir.join(p)
    }
}

fn sibling(path: &Path, suffix: &str) -> PathBuf {
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("out");
    path.with_file_name(format!("{stem}{suffix}.csv"))
}

/// Runs a config and writes its data files and metadata sidecars.
pub fn run(cfg: &SweepConfig, out_dir: &Path) -> Result<RunSummary> {
    run_with_meta(cfg, out_dir, &serde_json::Value::Null)
}

/// As [`run`], merging `extra` (e.g. recipe provenance) into every sidecar.
pub fn run_with_meta(cfg: &SweepConfig, out_dir: &Path, extra: &serde_json::Value) -> Result<RunSummary> {
    cfg.validate()?;
    let path = resolve_output(cfg, out_dir);
    let mut summary = RunSummary::default();
    let emit = |data: PathBuf, mut meta: serde_json::Value, s: &mut RunSummary| -> Result<()> {
        if let (Some(m), Some(x)) = (meta.as_object_mut(), extra.as_object()) {
            for (k, v) in x {
                m.insert(k.clone(), v.clone());
            }
        }
        let mp = write_metadata(&data, &meta)?;
        s.files.push(data);
        s.files.push(mp);
        Ok(())
    };
    match cfg.quantity {
        q if q.is_grid() => {
            let (g, g2) = compute_grid(cfg)?;
            summary.failed_cells = g.nan_count();
            write_grid_csv(&path, &g)?;
            let mut meta = base_meta(cfg, &GRID_COLUMNS);
            meta["axis_labels"] = json!(g.axis_labels);
            meta["shape"] = json!([g.shape().0, g.shape().1]);
            if q == Quantity::HybridWinding {
                meta["value"] = json!("W_plus");
            }
            emit(path.clone(), meta.clone(), &mut summary)?;
            if let Some(g2) = g2 {
                let p2 = sibling(&path, "_minus");
                write_grid_csv(&p2, &g2)?;
                meta["value"] = json!("W_minus");
                emit(p2, meta, &mut summary)?;
            }
        }
        Quantity::Spectrum => {
            let blocks: Vec<(Option<f64>, Vec<SpectrumRow>)> = if let Some(axis) = cfg.axes.first() {
                let pts: Vec<Result<(Option<f64>, Vec<SpectrumRow>)>> = axis
                    .values()
                    .into_par_iter()
                    .map(|v| Ok((Some(v), spectrum_rows(&cfg.params_at(&[v]))?)))
                    .collect();
                pts.into_iter().collect::<Result<_>>()?
            } else {
                vec![(None, spectrum_rows(&cfg.base_params)?)]
            };
            write_spectrum_csv(&path, &blocks)?;
            let mut cols: Vec<&str> = Vec::new();
            if !cfg.axes.is_empty() {
                cols.push("axis1");
            }
            cols.extend(SPECTRUM_COLUMNS);
            let mut meta = base_meta(cfg, &cols);
            meta["axis_labels"] = json!(axis_labels(cfg));
            emit(path.clone(), meta, &mut summary)?;
            if cfg.axes.is_empty() {
                let pbc = sibling(&path, "_pbc");
                write_pbc_csv(&pbc, &cfg.base_params, 2 * cfg.grid_k())?;
                emit(pbc, base_meta(cfg, &PBC_COLUMNS), &mut summary)?;
            }
        }
        Quantity::Gbz => {
            write_gbz_csv(&path, &cfg.base_params)?;
            let mut meta = base_meta(cfg, &GBZ_COLUMNS);
            if cfg.base_params.is_sublattice() {
                let (r1, r2) = crate::nonbloch::gbz_radii(&cfg.base_params);
                meta["radii"] = json!({ "r1": r1, "r2": r2 });
            }
            emit(path.clone(), meta, &mut summary)?;
        }
        Quantity::ZeroModes => {
            let count = write_modes_csv(&path, &cfg.base_params)?;
            let mut meta = base_meta(cfg, &MODE_COLUMNS);
            meta["mode_count"] = json!(count);
            emit(path.clone(), meta, &mut summary)?;
        }
        _ => unreachable!(),
    }
    Ok(summary)
}
