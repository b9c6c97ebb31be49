//! `raman-witness`: closed-form witness sweeps, figure data, oracle
//! validation and coefficient dumps.
//!
//! Exit codes: 0 on success, 1 for configuration and usage errors, 2 when
//! the oracle fails numerically (non-convergence or truncation breach).

use std::f64::consts::PI;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use raman_witness::coefficients::{eval_coefficients, CoefficientSet};
use raman_witness::config::{load_config, LoadedConfig, ValidationPlan};
use raman_witness::model::nondimensionalize;
use raman_witness::sweeps::{
    figure_data_on, run_sweep, series_table, sign_pattern, sign_pattern_csv, sweep_plot_script, Figure,
    Scenario, SweepPlan, Table, TimeGrid,
};
use raman_witness::{Preset, WitnessSpec};

const THREADS_ENV: &str = "RAMAN_THREADS";

#[derive(Debug, Parser)]
#[command(name = "raman-witness", version, about = "Entanglement witnesses for Raman scattering")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Common {
    /// TOML configuration file; command-line flags take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory, created if missing.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Replace existing output files.
    #[arg(long, global = true)]
    force: bool,
    /// Seed for randomly drawn sample points.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

impl Format {
    fn ext(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Closed-form witness series over a time grid and pump phases.
    Sweep(SweepArgs),
    /// Data files and plot script of one figure.
    Figure(FigureArgs),
    /// Compare closed forms with exact truncated-Fock evolution.
    OracleValidate(OracleArgs),
    /// Every perturbative coefficient over a time grid.
    CoeffDump(CoeffArgs),
}

#[derive(Debug, Args)]
struct SweepArgs {
    /// stimulated, spontaneous or partial-spontaneous.
    #[arg(long)]
    preset: Option<Preset>,
    /// Time grid in units of 1/g, as start:stop:points.
    #[arg(long)]
    grid: Option<TimeGrid>,
    /// Comma-separated pump phases: numbers or forms such as pi, pi/2, 3pi/4.
    #[arg(long)]
    phi: Option<String>,
    /// Witness specs such as `hz1:ab:2,1;three:abc`. Separate with `;`,
    /// whitespace or commas, or repeat the flag.
    #[arg(long)]
    spec: Vec<String>,
}

#[derive(Debug, Args)]
struct FigureArgs {
    /// fig2, fig3, fig4 or fig5.
    #[arg(long)]
    id: Figure,
    #[arg(long)]
    grid: Option<TimeGrid>,
}

#[derive(Debug, Args)]
struct OracleArgs {
    /// Named validation point; replaces the `[oracle]` section of a config.
    #[arg(long)]
    preset: Option<String>,
}

#[derive(Debug, Args)]
struct CoeffArgs {
    #[arg(long)]
    preset: Option<Preset>,
    #[arg(long)]
    grid: Option<TimeGrid>,
    /// Draw this many random times from the grid range instead of the grid.
    #[arg(long)]
    samples: Option<usize>,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            let numerical = e
                .chain()
                .any(|c| c.downcast_ref::<raman_witness::Error>().is_some_and(|e| e.is_numerical()));
            ExitCode::from(if numerical { 2 } else { 1 })
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<()> {
    configure_threads()?;
    let config = match &cli.common.config {
        Some(path) => load_config(path)?,
        None => LoadedConfig::default(),
    };
    let out = Output::new(&cli.common);
    match cli.command {
        Command::Sweep(args) => sweep(args, config.sweep, &out),
        Command::Figure(args) => figure(args, &out),
        Command::OracleValidate(args) => oracle_validate(args, config.validation, &out),
        Command::CoeffDump(args) => coeff_dump(args, config.sweep, cli.common.seed, &out),
    }
}

fn configure_threads() -> anyhow::Result<()> {
    let Ok(value) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let threads: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| anyhow!("configuration error in `{THREADS_ENV}`: expected a positive integer, got `{value}`"))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .context("configuring the thread pool")
}

/// Destination directory with atomic, overwrite-checked writes.
struct Output {
    dir: PathBuf,
    format: Format,
    force: bool,
}

impl Output {
    fn new(common: &Common) -> Self {
        Self {
            dir: common.out.clone(),
            format: common.format,
            force: common.force,
        }
    }

    /// Fails before any work is done if a target exists and `--force` is off.
    fn check(&self, names: &[String]) -> anyhow::Result<()> {
        if self.force {
            return Ok(());
        }
        for name in names {
            let path = self.dir.join(name);
            if path.exists() {
                bail!(
                    "configuration error in `--force`: {} already exists; pass --force to overwrite",
                    path.display()
                );
            }
        }
        Ok(())
    }

    fn write(&self, name: &str, bytes: &[u8]) -> anyhow::Result<PathBuf> {
        std::fs::create_dir_all(&self.dir)
            .with_context(|| format!("creating output directory {}", self.dir.display()))?;
        let path = self.dir.join(name);
        let mut tmp = tempfile::NamedTempFile::new_in(&self.dir)
            .with_context(|| format!("creating a temporary file in {}", self.dir.display()))?;
        tmp.write_all(bytes)?;
        tmp.as_file().sync_all()?;
        if self.force {
            tmp.persist(&path)
        } else {
            tmp.persist_noclobber(&path)
        }
        .map_err(|e| anyhow!("writing {}: {}", path.display(), e.error))?;
        log::info!("wrote {}", path.display());
        Ok(path)
    }

    fn table(&self, stem: &str, table: &Table) -> anyhow::Result<PathBuf> {
        let mut buf = Vec::new();
        match self.format {
            Format::Csv => table.write_csv(&mut buf)?,
            Format::Json => table.write_json(&mut buf)?,
        }
        self.write(&format!("{stem}.{}", self.format.ext()), &buf)
    }

    fn path_of(&self, stem: &str) -> String {
        format!("{stem}.{}", self.format.ext())
    }
}

/// Parses a phase such as `0.3`, `pi`, `-pi/2` or `3pi/4`.
fn parse_phase(text: &str) -> anyhow::Result<f64> {
    let s = text.trim();
    let bad = || anyhow!("configuration error in `--phi`: cannot read `{s}` as a phase");
    if let Some(idx) = s.find("pi") {
        let (coef, rest) = (&s[..idx], &s[idx + 2..]);
        let k = match coef.trim_end_matches('*') {
            "" | "+" => 1.0,
            "-" => -1.0,
            c => c.parse::<f64>().map_err(|_| bad())?,
        };
        let d = match rest {
            "" => 1.0,
            r => r.strip_prefix('/').ok_or_else(bad)?.parse::<f64>().map_err(|_| bad())?,
        };
        let phi = k * PI / d;
        return if phi.is_finite() { Ok(phi) } else { Err(bad()) };
    }
    s.parse::<f64>().ok().filter(|p| p.is_finite()).ok_or_else(bad)
}

fn parse_phases(list: &str) -> anyhow::Result<Vec<f64>> {
    list.split(',').filter(|s| !s.trim().is_empty()).map(parse_phase).collect()
}

/// Splits spec lists. Commas separate specs unless they sit between the two
/// orders of a pairwise spec.
fn parse_specs(args: &[String]) -> anyhow::Result<Vec<WitnessSpec>> {
    let mut tokens: Vec<String> = Vec::new();
    for arg in args {
        for piece in arg.split(|c: char| c == ';' || c.is_whitespace()) {
            for part in piece.split(',').filter(|p| !p.is_empty()) {
                match tokens.last_mut() {
                    Some(last) if !part.contains(':') && last.matches(':').count() == 2 && !last.contains(',') => {
                        last.push(',');
                        last.push_str(part);
                    }
                    _ => tokens.push(part.to_string()),
                }
            }
        }
    }
    tokens
        .iter()
        .map(|t| t.parse::<WitnessSpec>().map_err(|e| anyhow!("configuration error in `--spec`: {e}")))
        .collect()
}

fn sweep(args: SweepArgs, mut plan: SweepPlan, out: &Output) -> anyhow::Result<()> {
    if let Some(preset) = args.preset {
        plan.scenario = Scenario {
            preset,
            overrides: plan.scenario.overrides,
        };
    }
    if let Some(grid) = args.grid {
        plan.grid = grid;
    }
    if let Some(phi) = &args.phi {
        plan.phases = parse_phases(phi)?;
    }
    if !args.spec.is_empty() {
        plan.specs = parse_specs(&args.spec)?;
        let specs = plan.specs.clone();
        plan.plot_multipliers.retain(|s, _| specs.contains(s));
    }
    plan.validate()?;

    let mut names = vec![out.path_of("sweep"), out.path_of("sign_pattern")];
    if out.format == Format::Csv {
        names.push("sweep.plot".into());
    }
    out.check(&names)?;

    let series = run_sweep(&plan)?;
    let table = series_table(&series)?;
    let summaries = sign_pattern(&series);
    out.table("sweep", &table)?;
    match out.format {
        Format::Csv => {
            out.write("sign_pattern.csv", sign_pattern_csv(&summaries)?.as_bytes())?;
            out.write("sweep.plot", sweep_plot_script(&plan, &series, "sweep.csv").as_bytes())?;
        }
        Format::Json => {
            out.write("sign_pattern.json", &serde_json::to_vec_pretty(&summaries)?)?;
        }
    }
    for s in summaries.iter().filter(|s| s.negative) {
        println!("{} {} phi={:.6}: negative, min {:e} at gt={}", s.scenario, s.spec, s.phi, s.min, s.argmin);
    }
    println!("{} series on {} points written to {}", series.len(), plan.grid.points, out.dir.display());
    Ok(())
}

fn figure(args: FigureArgs, out: &Output) -> anyhow::Result<()> {
    let grid = args.grid.unwrap_or_default();
    let data = figure_data_on(args.id, &grid)?;
    let mut names: Vec<String> = data.panels.iter().map(|p| out.path_of(&p.name)).collect();
    let script = format!("{}.plot", data.figure);
    names.push(script.clone());
    out.check(&names)?;
    for panel in &data.panels {
        out.table(&panel.name, &panel.table)?;
    }
    out.write(&script, data.script.as_bytes())?;
    println!("{} panels of {} written to {}", data.panels.len(), data.figure, out.dir.display());
    Ok(())
}

fn oracle_validate(args: OracleArgs, plan: ValidationPlan, out: &Output) -> anyhow::Result<()> {
    let plan = match args.preset.as_deref() {
        Some(name) => ValidationPlan::preset(name)?,
        None => plan,
    };
    let names = [out.path_of("oracle_validation"), out.path_of("oracle_diagnostics")];
    out.check(&names)?;
    let (rows, diagnostics) = plan.run()?;

    match out.format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["spec", "t", "closed_form", "oracle", "abs_diff", "order"])?;
            for r in &rows {
                w.write_record([
                    r.spec.to_string(),
                    r.t.to_string(),
                    r.closed_form.to_string(),
                    r.oracle.to_string(),
                    r.abs_diff.to_string(),
                    r.order.map(|o| o.to_string()).unwrap_or_default(),
                ])?;
            }
            out.write(&names[0], &w.into_inner()?)?;
            let mut w = csv::Writer::from_writer(Vec::new());
            for d in &diagnostics {
                w.serialize(d)?;
            }
            out.write(&names[1], &w.into_inner()?)?;
        }
        Format::Json => {
            out.write(&names[0], &serde_json::to_vec_pretty(&rows)?)?;
            out.write(&names[1], &serde_json::to_vec_pretty(&diagnostics)?)?;
        }
    }
    for r in rows.iter().filter(|r| r.order.is_some()) {
        println!(
            "{} gt={}: |diff| {:.3e}, order {:.3}",
            r.spec,
            r.t,
            r.abs_diff,
            r.order.unwrap_or(f64::NAN)
        );
    }
    Ok(())
}

fn coeff_dump(args: CoeffArgs, mut plan: SweepPlan, seed: u64, out: &Output) -> anyhow::Result<()> {
    if let Some(preset) = args.preset {
        plan.scenario = Scenario {
            preset,
            overrides: plan.scenario.overrides,
        };
    }
    if let Some(grid) = args.grid {
        plan.grid = grid;
    }
    plan.grid.validate()?;
    let (params, _) = plan.scenario.build()?;
    let scaled = nondimensionalize(&params)?.to_params();
    let times = match args.samples {
        Some(0) => bail!("configuration error in `--samples`: at least one sample is required"),
        Some(k) => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let (lo, hi) = (plan.grid.start, plan.grid.stop);
            let mut ts: Vec<f64> = (0..k).map(|_| lo + (hi - lo) * rng.gen::<f64>()).collect();
            ts.sort_by(f64::total_cmp);
            ts
        }
        None => plan.grid.times(),
    };
    out.check(&[out.path_of("coefficients")])?;
    let table = Table {
        columns: CoefficientSet::<f64>::column_names(),
        rows: times.iter().map(|&t| eval_coefficients(&scaled, t).row()).collect(),
    };
    let path = out.table("coefficients", &table)?;
    println!("{} rows written to {}", table.rows.len(), path.display());
    Ok(())
}
