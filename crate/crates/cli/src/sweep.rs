//! Parameter sweeps: one spectrum per grid point, computed in parallel.

use rayon::prelude::*;
use xxz_pin::solver::{lowest_eigenvalues, sector_resolved_spectrum, SolverConfig};
use xxz_pin::{ModelSpec, SpinParams};

use crate::error::{CliError, CliResult};
use crate::svg::Plot;
use crate::table::{Cell, Table};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SweepParam {
    B1,
    B2,
    B3,
    Delta,
}

impl SweepParam {
    pub fn name(self) -> &'static str {
        match self {
            SweepParam::B1 => "b1",
            SweepParam::B2 => "b2",
            SweepParam::B3 => "b3",
            SweepParam::Delta => "delta",
        }
    }

    pub fn parse(s: &str) -> CliResult<Self> {
        Ok(match s.to_ascii_lowercase().as_str() {
            "b1" => SweepParam::B1,
            "b2" => SweepParam::B2,
            "b3" => SweepParam::B3,
            "delta" => SweepParam::Delta,
            other => {
                return Err(CliError::Usage(format!(
                    "unknown sweep parameter '{other}' (b1, b2, b3, delta)"
                )))
            }
        })
    }
}

/// What each grid point computes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PointJob {
    /// The `k` lowest eigenvalues of the full chain.
    Lowest(usize),
    /// The lowest `k` eigenvalues of every S3 sector, labeled by `n`.
    PerSector(usize),
    /// The `k` lowest eigenvalues overall, each labeled by its sector `n`.
    LowestLabeled(usize),
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepSpec {
    pub template: ModelSpec,
    pub param: SweepParam,
    pub start: f64,
    pub stop: f64,
    pub steps: usize,
    pub job: PointJob,
}

/// One computed eigenvalue: value and, for per-sector jobs, the sector `n`.
pub type Level = (f64, Option<usize>);

#[derive(Clone, Debug, PartialEq)]
pub struct SweepPoint {
    pub value: f64,
    pub outcome: Result<Vec<Level>, String>,
}

impl SweepSpec {
    pub fn validate(&self) -> CliResult<()> {
        if self.steps < 2 {
            return Err(CliError::Usage(format!("sweep needs at least 2 steps, got {}", self.steps)));
        }
        if !self.start.is_finite() || !self.stop.is_finite() {
            return Err(CliError::Usage("sweep range must be finite".into()));
        }
        let k = match self.job {
            PointJob::Lowest(k) | PointJob::PerSector(k) | PointJob::LowestLabeled(k) => k,
        };
        if k == 0 {
            return Err(CliError::Usage("k must be positive".into()));
        }
        if self.param == SweepParam::Delta && self.start.min(self.stop) <= 1.0 {
            return Err(CliError::Usage("delta sweep must stay above 1".into()));
        }
        Ok(())
    }

    /// Grid values, endpoints included.
    pub fn values(&self) -> Vec<f64> {
        let n = self.steps - 1;
        (0..self.steps)
            .map(|i| {
                if i == n {
                    self.stop
                } else {
                    self.start + (self.stop - self.start) * i as f64 / n as f64
                }
            })
            .collect()
    }

    pub fn spec_at(&self, v: f64) -> xxz_pin::Result<ModelSpec> {
        let mut s = self.template;
        let (mut b, y) = s.field.map(|f| (f.b, f.site)).unwrap_or(([0.0; 3], 1));
        match self.param {
            SweepParam::B1 => b[0] = v,
            SweepParam::B2 => b[1] = v,
            SweepParam::B3 => b[2] = v,
            SweepParam::Delta => s.params = SpinParams::new(s.spin(), v)?,
        }
        if self.param != SweepParam::Delta || s.field.is_some() {
            s = s.with_field(b, y)?;
        }
        Ok(s)
    }

    fn point(&self, v: f64, cfg: &SolverConfig) -> xxz_pin::Result<Vec<Level>> {
        let spec = self.spec_at(v)?;
        match self.job {
            PointJob::Lowest(k) => {
                let dim = spec.full_dim().unwrap_or(u64::MAX);
                let k = (k as u64).min(dim) as usize;
                Ok(lowest_eigenvalues(&spec, k, cfg)?
                    .eigenvalues
                    .into_iter()
                    .map(|e| (e, None))
                    .collect())
            }
            PointJob::PerSector(k) => {
                let s = sector_resolved_spectrum(&spec, Some(k), cfg)?;
                let labels = s.sector_labels.unwrap_or_default();
                let mut out: Vec<Level> = s
                    .eigenvalues
                    .into_iter()
                    .zip(labels)
                    .map(|(e, n)| (e, Some(n)))
                    .collect();
                // Sector-major order: by n, then by energy.
                out.sort_by(|a, b| a.1.cmp(&b.1).then(a.0.total_cmp(&b.0)));
                Ok(out)
            }
            PointJob::LowestLabeled(k) => {
                let s = sector_resolved_spectrum(&spec, Some(k), cfg)?;
                let labels = s.sector_labels.unwrap_or_default();
                Ok(s.eigenvalues
                    .into_iter()
                    .zip(labels)
                    .take(k)
                    .map(|(e, n)| (e, Some(n)))
                    .collect())
            }
        }
    }
}

/// Runs every grid point independently; results come back in grid order.
pub fn run_sweep(spec: &SweepSpec, cfg: &SolverConfig) -> CliResult<Vec<SweepPoint>> {
    spec.validate()?;
    Ok(spec
        .values()
        .into_par_iter()
        .map(|v| SweepPoint {
            value: v,
            outcome: spec.point(v, cfg).map_err(|e| e.to_string()),
        })
        .collect())
}

fn per_sector(spec: &SweepSpec) -> bool {
    matches!(spec.job, PointJob::PerSector(_))
}

fn labeled(spec: &SweepSpec) -> bool {
    !matches!(spec.job, PointJob::Lowest(_))
}

/// One row per grid point per eigenvalue; a failed point gets a single row
/// with empty values and the error in `status`.
pub fn sweep_table(spec: &SweepSpec, points: &[SweepPoint]) -> Table {
    let sectors = per_sector(spec);
    let labels = labeled(spec);
    let mut header = vec!["point", spec.param.name(), "index", "eigenvalue"];
    if labels {
        header.push("sector_n");
    }
    header.push("status");
    let mut t = Table::new(header);
    for (p, pt) in points.iter().enumerate() {
        match &pt.outcome {
            Ok(levels) => {
                let mut last = None;
                let mut idx = 0usize;
                for (i, &(e, n)) in levels.iter().enumerate() {
                    // Within a sector the index restarts at 0.
                    if sectors {
                        if last != n {
                            idx = 0;
                            last = n;
                        }
                    } else {
                        idx = i;
                    }
                    let mut row = vec![p.into(), pt.value.into(), idx.into(), e.into()];
                    if labels {
                        row.push(n.map_or(Cell::Empty, Cell::from));
                    }
                    row.push("ok".into());
                    t.push(row);
                    idx += 1;
                }
            }
            Err(msg) => {
                let mut row = vec![p.into(), pt.value.into(), Cell::Empty, Cell::Empty];
                if labels {
                    row.push(Cell::Empty);
                }
                row.push(format!("error: {msg}").into());
                t.push(row);
            }
        }
    }
    t
}

/// Eigenvalue branches against the swept value. Branch `i` is the i-th
/// lowest value, except for per-sector sweeps which give one branch per
/// `(n, level)`. Failed points are skipped.
pub fn sweep_branches(spec: &SweepSpec, points: &[SweepPoint]) -> Vec<Vec<(f64, f64)>> {
    let sectors = per_sector(spec);
    let mut keys: Vec<(Option<usize>, usize)> = Vec::new();
    let mut branches: Vec<Vec<(f64, f64)>> = Vec::new();
    for pt in points {
        let Ok(levels) = &pt.outcome else { continue };
        let mut last = None;
        let mut idx = 0usize;
        for &(e, n) in levels {
            if sectors && last != n {
                idx = 0;
                last = n;
            }
            let key = (if sectors { n } else { None }, idx);
            let b = match keys.iter().position(|k| *k == key) {
                Some(b) => b,
                None => {
                    keys.push(key);
                    branches.push(Vec::new());
                    keys.len() - 1
                }
            };
            branches[b].push((pt.value, e));
            idx += 1;
        }
    }
    branches
}

pub fn sweep_plot(spec: &SweepSpec, points: &[SweepPoint], title: &str) -> Plot {
    Plot {
        title: title.to_string(),
        x_label: spec.param.name().to_string(),
        y_label: "energy".into(),
        branches: sweep_branches(spec, points),
        y_range: None,
    }
}
