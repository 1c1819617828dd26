//! Grid sweeps over noise levels, weighting factor and delay.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{emit, run_trial, BerReport, Format, HarnessError, TrialConfig};
use crate::rng::trial_seed;

/// Values to sweep. An empty axis keeps the base configuration's value.
/// A `kappa` entry selects the finite weighting mode.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepGrid {
    pub sigma_common: Vec<f64>,
    pub sigma_additive: Vec<f64>,
    pub kappa: Vec<f64>,
    pub delay_offset: Vec<i64>,
}

/// A trial configuration plus the grid to sweep around it.
///
/// On disk this is a trial configuration object with one extra `grid` key.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SweepConfig {
    pub trial: TrialConfig,
    pub grid: SweepGrid,
}

impl SweepConfig {
    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        let mut value: serde_json::Value = serde_json::from_str(text)?;
        let grid = match value.as_object_mut().and_then(|o| o.remove("grid")) {
            Some(g) => serde_json::from_value(g)?,
            None => SweepGrid::default(),
        };
        Ok(Self { trial: serde_json::from_value(value)?, grid })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    pub index: usize,
    pub config: TrialConfig,
    pub result: Result<BerReport, String>,
    /// Loaded from an earlier run instead of being recomputed.
    pub resumed: bool,
}

fn axis<T: Copy>(values: &[T], base: T) -> Vec<T> {
    if values.is_empty() {
        vec![base]
    } else {
        values.to_vec()
    }
}

/// Configurations of every grid point in a fixed order (sigma_common
/// outermost, delay_offset innermost). Point `i` gets seed `base ^ i`.
pub fn grid_points(base: &TrialConfig, grid: &SweepGrid) -> Vec<TrialConfig> {
    let mut out = Vec::new();
    let kappas: Vec<Option<f64>> = if grid.kappa.is_empty() { vec![None] } else { grid.kappa.iter().map(|&k| Some(k)).collect() };
    for sc in axis(&grid.sigma_common, base.channel.sigma_common) {
        for sa in axis(&grid.sigma_additive, base.channel.sigma_additive) {
            for &kappa in &kappas {
                for d in axis(&grid.delay_offset, base.channel.delay_offset) {
                    let mut cfg = base.clone();
                    cfg.channel.sigma_common = sc;
                    cfg.channel.sigma_additive = sa;
                    cfg.channel.delay_offset = d;
                    if let Some(k) = kappa {
                        cfg.estimator.kappa = k;
                        cfg.estimator.kappa_infinite = false;
                    }
                    cfg.channel.seed = trial_seed(base.channel.seed, out.len() as u64);
                    out.push(cfg);
                }
            }
        }
    }
    out
}

/// Runs every grid point not already present in `completed`, in parallel.
/// Failures are recorded per point and do not stop the sweep.
pub fn run_sweep(base: &TrialConfig, grid: &SweepGrid, completed: &BTreeMap<usize, BerReport>) -> Vec<SweepPoint> {
    grid_points(base, grid)
        .into_par_iter()
        .enumerate()
        .map(|(index, config)| match completed.get(&index) {
            Some(done) if done.config == config => {
                SweepPoint { index, config, result: Ok(done.clone()), resumed: true }
            }
            _ => {
                let result = run_trial(&config).map_err(|e| e.to_string());
                SweepPoint { index, config, result, resumed: false }
            }
        })
        .collect()
}

fn point_path(dir: &Path, index: usize) -> std::path::PathBuf {
    dir.join(format!("point_{index:04}.json"))
}

/// Sweep that keeps one JSON file per finished point in `dir`, skips points
/// whose file already matches, and writes `sweep.csv` over all successful
/// points.
pub fn run_sweep_in_dir(base: &TrialConfig, grid: &SweepGrid, dir: &Path) -> Result<Vec<SweepPoint>, HarnessError> {
    let io_err = |path: &Path| {
        let path = path.display().to_string();
        move |source| HarnessError::Io { path, source }
    };
    fs::create_dir_all(dir).map_err(io_err(dir))?;

    let mut completed = BTreeMap::new();
    for index in 0..grid_points(base, grid).len() {
        let path = point_path(dir, index);
        if let Ok(text) = fs::read_to_string(&path) {
            if let Ok(mut reports) = serde_json::from_str::<Vec<BerReport>>(&text) {
                if let Some(r) = reports.pop() {
                    completed.insert(index, r);
                }
            }
        }
    }

    let points = run_sweep(base, grid, &completed);
    for p in &points {
        if let (Ok(report), false) = (&p.result, p.resumed) {
            emit(std::slice::from_ref(report), Format::Json, &point_path(dir, p.index))?;
        }
    }
    let reports: Vec<BerReport> = points.iter().filter_map(|p| p.result.as_ref().ok().cloned()).collect();
    emit(&reports, Format::Csv, &dir.join("sweep.csv"))?;
    Ok(points)
}
