//! Fixed parameter sets for the figure data.
//!
//! Field sites: fig2 and fig2_5 use the center `y = 7`. In fig3 the number
//! of levels starting at `-B3/2` is `y` with site 1 on the up side of the
//! kink, so `y = 6` gives six descending branches (`y = 8` counted from the
//! other end). fig4 uses the center `y = 6` and the droplet figures use the
//! center `y = 7`.

use xxz_pin::solver::{sector_resolved_spectrum, SolverConfig};
use xxz_pin::spin::params_from_delta;
use xxz_pin::{BoundaryCondition, ModelSpec, Spin};

use crate::error::{CliError, CliResult};
use crate::spectra::{sector_plot, spectrum_table};
use crate::svg::Plot;
use crate::sweep::{run_sweep, sweep_plot, sweep_table, PointJob, SweepParam, SweepSpec};
use crate::table::Table;

pub const FIG_DELTA: f64 = 2.25;

pub const FIG3_SITE: usize = 6;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FigureId {
    Fig1,
    Fig2,
    Fig2_5,
    Fig3,
    Fig4,
    Fig5,
    Fig6,
    Fig7,
}

impl FigureId {
    pub const ALL: [FigureId; 8] = [
        FigureId::Fig1,
        FigureId::Fig2,
        FigureId::Fig2_5,
        FigureId::Fig3,
        FigureId::Fig4,
        FigureId::Fig5,
        FigureId::Fig6,
        FigureId::Fig7,
    ];

    pub fn name(self) -> &'static str {
        match self {
            FigureId::Fig1 => "fig1",
            FigureId::Fig2 => "fig2",
            FigureId::Fig2_5 => "fig2_5",
            FigureId::Fig3 => "fig3",
            FigureId::Fig4 => "fig4",
            FigureId::Fig5 => "fig5",
            FigureId::Fig6 => "fig6",
            FigureId::Fig7 => "fig7",
        }
    }

    pub fn parse(s: &str) -> CliResult<Self> {
        let s = s.to_ascii_lowercase().replace('.', "_");
        FigureId::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| CliError::Usage(format!("unknown figure '{s}'")))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum FigureJob {
    /// Spin-1/2 droplet energies in an axial field, in closed form:
    /// all up `jB`, all down `4j^2 A - jB`, droplets `2j^2 A`.
    ClosedForm { delta: f64, b_max: f64, points: usize },
    Sweep(SweepSpec),
    /// One axial spectrum resolved by sector; `per_sector = None` is the
    /// full spectrum.
    Sectors {
        spec: ModelSpec,
        per_sector: Option<usize>,
        y_range: Option<(f64, f64)>,
    },
}

#[derive(Clone, Debug, PartialEq)]
pub struct FigurePreset {
    pub id: FigureId,
    pub title: &'static str,
    pub job: FigureJob,
}

fn chain(sites: usize, bc: BoundaryCondition, b: [f64; 3], y: usize) -> ModelSpec {
    ModelSpec::chain(sites, Spin::HALF, FIG_DELTA, bc)
        .and_then(|s| s.with_field(b, y))
        .expect("preset parameters are valid")
}

fn a() -> f64 {
    params_from_delta(FIG_DELTA).expect("delta > 1").a
}

fn kink_sweep(b3: f64, y: usize, k: usize) -> FigureJob {
    FigureJob::Sweep(SweepSpec {
        template: chain(13, BoundaryCondition::PlusMinus, [0.0, 0.0, b3], y),
        param: SweepParam::B1,
        start: -1.2,
        stop: 1.2,
        steps: 49,
        job: PointJob::Lowest(k),
    })
}

pub fn preset(id: FigureId) -> FigurePreset {
    let (title, job) = match id {
        FigureId::Fig1 => (
            "droplet ground energy, axial field",
            FigureJob::ClosedForm { delta: FIG_DELTA, b_max: 2.0 * a(), points: 81 },
        ),
        FigureId::Fig2 => ("kink, field (B,0,0), b=13", kink_sweep(0.0, 7, 16)),
        FigureId::Fig2_5 => ("kink, field (B,0,A/6), b=13", kink_sweep(a() / 6.0, 7, 16)),
        FigureId::Fig3 => ("kink, field (B,0,3), b=13", kink_sweep(3.0, FIG3_SITE, 20)),
        FigureId::Fig4 => (
            "kink, field (0,0,1.5), b=11",
            FigureJob::Sectors {
                spec: chain(11, BoundaryCondition::PlusMinus, [0.0, 0.0, 1.5], 6),
                per_sector: Some(10),
                y_range: None,
            },
        ),
        FigureId::Fig5 => (
            "droplet, field (0,0,B), b=13",
            FigureJob::Sweep(SweepSpec {
                template: chain(13, BoundaryCondition::PlusPlus, [0.0; 3], 7),
                param: SweepParam::B3,
                start: 0.0,
                stop: 2.0 * a(),
                steps: 21,
                job: PointJob::LowestLabeled(5),
            }),
        ),
        FigureId::Fig6 => (
            "droplet, field (0,0,1.5A), b=13, full spectrum",
            FigureJob::Sectors {
                spec: chain(13, BoundaryCondition::PlusPlus, [0.0, 0.0, 1.5 * a()], 7),
                per_sector: None,
                y_range: None,
            },
        ),
        FigureId::Fig7 => (
            "droplet, field (0,0,1.5A), b=13, low energies",
            FigureJob::Sectors {
                spec: chain(13, BoundaryCondition::PlusPlus, [0.0, 0.0, 1.5 * a()], 7),
                per_sector: Some(6),
                y_range: Some((-0.5, 2.5)),
            },
        ),
    };
    FigurePreset { id, title, job }
}

pub struct FigureOutput {
    pub table: Table,
    pub plot: Plot,
}

fn closed_form(title: &str, delta: f64, b_max: f64, points: usize) -> CliResult<FigureOutput> {
    let a = params_from_delta(delta)?.a;
    let j = 0.5;
    let mut t = Table::new(["b3", "all_up", "all_down", "droplet", "ground"]);
    let mut lines = vec![Vec::new(); 4];
    for i in 0..points {
        let b = b_max * i as f64 / (points - 1) as f64;
        let up = j * b;
        let down = 4.0 * j * j * a - j * b;
        let drop = 2.0 * j * j * a;
        let ground = up.min(down);
        t.push(vec![b.into(), up.into(), down.into(), drop.into(), ground.into()]);
        for (l, v) in lines.iter_mut().zip([up, down, drop, ground]) {
            l.push((b, v));
        }
    }
    Ok(FigureOutput {
        table: t,
        plot: Plot {
            title: title.to_string(),
            x_label: "b3".into(),
            y_label: "energy".into(),
            branches: lines,
            y_range: None,
        },
    })
}

pub fn render(p: &FigurePreset, cfg: &SolverConfig) -> CliResult<FigureOutput> {
    match &p.job {
        FigureJob::ClosedForm { delta, b_max, points } => closed_form(p.title, *delta, *b_max, *points),
        FigureJob::Sweep(s) => {
            let pts = run_sweep(s, cfg)?;
            Ok(FigureOutput { table: sweep_table(s, &pts), plot: sweep_plot(s, &pts, p.title) })
        }
        FigureJob::Sectors { spec, per_sector, y_range } => {
            let s = sector_resolved_spectrum(spec, *per_sector, cfg)?;
            Ok(FigureOutput {
                table: spectrum_table(spec, &s),
                plot: sector_plot(&s, p.title, *y_range),
            })
        }
    }
}
