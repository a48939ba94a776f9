//! Argument parsing and the subcommands.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use xxz_pin::gap::certify_gap;
use xxz_pin::solver::{lowest_spectrum, sector_resolved_spectrum, SolverConfig};
use xxz_pin::verify::{self, Suite};
use xxz_pin::{BoundaryCondition, ModelSpec, Spin};

use crate::config::expand_config_args;
use crate::error::{CliError, CliResult};
use crate::presets::{preset, render, FigureId};
use crate::spectra::{index_plot, sector_plot, spectrum_table};
use crate::sweep::{run_sweep, sweep_plot, sweep_table, PointJob, SweepParam, SweepSpec};

#[derive(Debug, Parser)]
#[command(name = "xxzpin", version, about = "Spectra and gap certificates for the pinned XXZ chain")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Lowest eigenvalues of one chain.
    #[command(args_override_self = true)]
    Spectrum(SpectrumArgs),
    /// Lowest eigenvalues over a grid of one parameter.
    #[command(args_override_self = true)]
    Sweep(SweepArgs),
    /// Lower bound on the spectral gap.
    #[command(args_override_self = true)]
    GapCertify(GapArgs),
    /// Identity and closed-form checks.
    #[command(args_override_self = true)]
    Verify(VerifyArgs),
    /// Data and plot for one of the preset figures.
    #[command(args_override_self = true)]
    Figure(FigureArgs),
}

/// Parses `Bx,By,Bz`.
pub fn parse_field(s: &str) -> Result<[f64; 3], String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != 3 {
        return Err(format!("expected Bx,By,Bz, got '{s}'"));
    }
    let mut b = [0.0; 3];
    for (slot, p) in b.iter_mut().zip(&parts) {
        *slot = p
            .parse::<f64>()
            .ok()
            .filter(|v| v.is_finite())
            .ok_or_else(|| format!("bad field component '{p}'"))?;
    }
    Ok(b)
}

#[derive(Debug, Args, Clone)]
pub struct ModelArgs {
    /// bare, kink, antikink, droplet or antidroplet.
    #[arg(long, default_value = "kink")]
    pub bc: String,
    #[arg(long)]
    pub sites: usize,
    #[arg(long, default_value_t = 0.5)]
    pub spin: f64,
    #[arg(long)]
    pub delta: f64,
    #[arg(long, value_parser = parse_field, default_value = "0,0,0", allow_hyphen_values = true)]
    pub field: [f64; 3],
    /// Field site, 1-based; defaults to the center.
    #[arg(long)]
    pub site: Option<usize>,
    /// Seed of the iterative solver's start vectors.
    #[arg(long)]
    pub seed: Option<u64>,
}

impl ModelArgs {
    pub fn spec(&self) -> CliResult<ModelSpec> {
        let bc = BoundaryCondition::parse(&self.bc)?;
        let spin = Spin::new(self.spin)?;
        let y = self.site.unwrap_or(self.sites.div_ceil(2).max(1));
        Ok(ModelSpec::chain(self.sites, spin, self.delta, bc)?.with_field(self.field, y)?)
    }

    pub fn solver(&self) -> SolverConfig {
        solver_config(self.seed)
    }
}

fn solver_config(seed: Option<u64>) -> SolverConfig {
    let mut cfg = SolverConfig::default();
    if let Some(s) = seed {
        cfg.lanczos.seed = s;
    }
    cfg
}

#[derive(Debug, Args)]
pub struct SpectrumArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long, default_value_t = 16)]
    pub k: usize,
    /// CSV destination; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub svg: Option<PathBuf>,
    /// Label eigenvalues by S3 sector (axial fields only).
    #[arg(long)]
    pub sector_resolved: bool,
    /// With --sector-resolved: this many values from every sector instead
    /// of the k lowest overall.
    #[arg(long, requires = "sector_resolved")]
    pub per_sector: Option<usize>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// b1, b2, b3 or delta.
    #[arg(long)]
    pub vary: String,
    #[arg(long, allow_hyphen_values = true)]
    pub from: f64,
    #[arg(long, allow_hyphen_values = true)]
    pub to: f64,
    #[arg(long)]
    pub steps: usize,
    #[arg(long, default_value_t = 16)]
    pub k: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub svg: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct GapArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// Also compute the exact gap and compare.
    #[arg(long)]
    pub check: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Suite name or `all`.
    #[arg(long, default_value = "all")]
    pub suite: String,
    #[arg(long)]
    pub quick: bool,
}

#[derive(Debug, Args)]
pub struct FigureArgs {
    /// fig1, fig2, fig2_5, fig3, fig4, fig5, fig6 or fig7.
    pub id: String,
    #[arg(long, default_value = ".")]
    pub out_dir: PathBuf,
    #[arg(long)]
    pub seed: Option<u64>,
}

fn write_file(path: &Path, text: &str) -> CliResult<()> {
    std::fs::write(path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn emit(out: &mut dyn Write, path: Option<&Path>, text: &str) -> CliResult<()> {
    match path {
        Some(p) => write_file(p, text),
        None => Ok(out.write_all(text.as_bytes())?),
    }
}

fn cmd_spectrum(a: &SpectrumArgs, out: &mut dyn Write) -> CliResult<()> {
    let spec = a.model.spec()?;
    let cfg = a.model.solver();
    if a.k == 0 {
        return Err(CliError::Usage("k must be positive".into()));
    }
    if a.sector_resolved {
        if !spec.is_axial() {
            return Err(CliError::Usage(
                "--sector-resolved needs an axial field (Bx = By = 0)".into(),
            ));
        }
        let mut s = sector_resolved_spectrum(&spec, Some(a.per_sector.unwrap_or(a.k)), &cfg)?;
        if a.per_sector.is_none() {
            s.truncate(a.k);
        }
        emit(out, a.out.as_deref(), &spectrum_table(&spec, &s).to_csv())?;
        if let Some(p) = &a.svg {
            write_file(p, &sector_plot(&s, "spectrum by sector", None).to_svg())?;
        }
    } else {
        let dim = spec.full_dim().unwrap_or(u64::MAX);
        let k = (a.k as u64).min(dim) as usize;
        let mut s = lowest_spectrum(&spec, k, &cfg)?;
        s.eigenvectors = None;
        emit(out, a.out.as_deref(), &spectrum_table(&spec, &s).to_csv())?;
        if let Some(p) = &a.svg {
            write_file(p, &index_plot(&s, "spectrum").to_svg())?;
        }
    }
    Ok(())
}

fn cmd_sweep(a: &SweepArgs, out: &mut dyn Write) -> CliResult<()> {
    let spec = SweepSpec {
        template: a.model.spec()?,
        param: SweepParam::parse(&a.vary)?,
        start: a.from,
        stop: a.to,
        steps: a.steps,
        job: PointJob::Lowest(a.k),
    };
    let pts = run_sweep(&spec, &a.model.solver())?;
    emit(out, a.out.as_deref(), &sweep_table(&spec, &pts).to_csv())?;
    if let Some(p) = &a.svg {
        write_file(p, &sweep_plot(&spec, &pts, "sweep").to_svg())?;
    }
    Ok(())
}

fn cmd_gap(a: &GapArgs, out: &mut dyn Write) -> CliResult<()> {
    let spec = a.model.spec()?;
    let cert = certify_gap(&spec, a.check, &a.model.solver())?;
    let mut text = cert.to_record();
    if !text.ends_with('\n') {
        text.push('\n');
    }
    emit(out, a.out.as_deref(), &text)?;
    if let Some(ok) = cert.check() {
        writeln!(out, "bound ≤ exact: {}", if ok { "PASS" } else { "FAIL" })?;
        if !ok {
            return Err(CliError::Numerical(format!(
                "bound {} exceeds the exact gap {:?}",
                cert.bound, cert.exact_gap
            )));
        }
    }
    Ok(())
}

fn cmd_verify(a: &VerifyArgs, out: &mut dyn Write) -> CliResult<()> {
    let suites: Vec<Suite> = Suite::parse(&a.suite)?;
    let report = verify::run(&suites, a.quick);
    out.write_all(report.render().as_bytes())?;
    let failed = report.failures();
    if failed > 0 {
        return Err(CliError::Numerical(format!("{failed} check(s) failed")));
    }
    Ok(())
}

fn cmd_figure(a: &FigureArgs, out: &mut dyn Write) -> CliResult<()> {
    let id = FigureId::parse(&a.id)?;
    let fig = render(&preset(id), &solver_config(a.seed))?;
    std::fs::create_dir_all(&a.out_dir)
        .map_err(|e| CliError::Io(format!("{}: {e}", a.out_dir.display())))?;
    let csv = a.out_dir.join(format!("{}.csv", id.name()));
    let svg = a.out_dir.join(format!("{}.svg", id.name()));
    write_file(&csv, &fig.table.to_csv())?;
    write_file(&svg, &fig.plot.to_svg())?;
    writeln!(out, "wrote {} ({} rows) and {}", csv.display(), fig.table.rows.len(), svg.display())?;
    Ok(())
}

pub fn execute(cli: &Cli, out: &mut dyn Write) -> CliResult<()> {
    match &cli.command {
        Command::Spectrum(a) => cmd_spectrum(a, out),
        Command::Sweep(a) => cmd_sweep(a, out),
        Command::GapCertify(a) => cmd_gap(a, out),
        Command::Verify(a) => cmd_verify(a, out),
        Command::Figure(a) => cmd_figure(a, out),
    }
}

/// Parses `args` (program name first), runs the command and returns the
/// process exit code. Diagnostics go to `err`.
pub fn run<I, S>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<String>,
{
    let args: Vec<String> = args.into_iter().map(Into::into).collect();
    let args = match expand_config_args(args) {
        Ok(a) => a,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return e.exit_code();
        }
    };
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = write!(err, "{}", e.render());
            // Help and version requests are not failures.
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match execute(&cli, out) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}
