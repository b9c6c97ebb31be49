//! Time sweeps of closed-form witnesses, sign-pattern summaries and the
//! data tables behind each figure.

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;
use std::io::Write;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::coefficients::{eval_coefficients, CoefficientSet};
use crate::error::{Error, Result};
use crate::model::{
    make_scenario, nondimensionalize, CoherentAmplitudes, Criterion, Pair, Preset, RamanParams,
    ScenarioOverrides, WitnessSeries, WitnessSpec,
};
use crate::witnesses::closed_form_witness;

/// Default end of the `gt` grid.
pub const DEFAULT_GRID_STOP: f64 = 0.1;
/// Default number of grid points (step `5e-6`). The narrowest negative
/// dip of the stimulated preset is about `1e-4` wide, and this step keeps
/// its sampled minimum stable under refinement.
pub const DEFAULT_GRID_POINTS: usize = 20_001;
/// Pump phases scanned by every figure.
pub const DEFAULT_PHASES: [f64; 3] = [0.0, FRAC_PI_2, PI];
/// `(n, m)` orders plotted in the pairwise figures.
pub const FIGURE_ORDERS: [(u32, u32); 3] = [(1, 1), (2, 1), (3, 1)];

/// Uniform grid of dimensionless times `gt`, always starting at zero.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TimeGrid {
    pub start: f64,
    pub stop: f64,
    pub points: usize,
}

impl Default for TimeGrid {
    fn default() -> Self {
        Self {
            start: 0.0,
            stop: DEFAULT_GRID_STOP,
            points: DEFAULT_GRID_POINTS,
        }
    }
}

impl TimeGrid {
    pub fn new(start: f64, stop: f64, points: usize) -> Result<Self> {
        let g = Self { start, stop, points };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        if self.start != 0.0 {
            return Err(Error::config("grid.start", format!("must be 0, got {}", self.start)));
        }
        if !(self.stop.is_finite() && self.stop > self.start) {
            return Err(Error::config("grid.stop", format!("must be finite and > 0, got {}", self.stop)));
        }
        if self.points < 2 {
            return Err(Error::config("grid.points", format!("must be >= 2, got {}", self.points)));
        }
        Ok(())
    }

    /// Grid times; the last one equals `stop` exactly.
    pub fn times(&self) -> Vec<f64> {
        let n = self.points - 1;
        (0..=n)
            .map(|k| {
                if k == n {
                    self.stop
                } else {
                    self.start + (self.stop - self.start) * k as f64 / n as f64
                }
            })
            .collect()
    }

    /// The same interval with twice as many intervals.
    pub fn refined(&self) -> Self {
        Self {
            points: 2 * self.points - 1,
            ..*self
        }
    }
}

impl fmt::Display for TimeGrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.start, self.stop, self.points)
    }
}

impl FromStr for TimeGrid {
    type Err = Error;

    /// Parses `start:stop:points`.
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        let bad = |m: &str| Error::config("grid", format!("`{s}`: {m} (expected start:stop:points)"));
        if parts.len() != 3 {
            return Err(bad("wrong number of fields"));
        }
        let start = parts[0].trim().parse::<f64>().map_err(|_| bad("start is not a number"))?;
        let stop = parts[1].trim().parse::<f64>().map_err(|_| bad("stop is not a number"))?;
        let points = parts[2]
            .trim()
            .parse::<usize>()
            .map_err(|_| bad("points is not a nonnegative integer"))?;
        Self::new(start, stop, points)
    }
}

/// A preset with optional overrides.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub preset: Preset,
    #[serde(default)]
    pub overrides: ScenarioOverrides,
}

impl Default for Scenario {
    fn default() -> Self {
        Self::from(Preset::Stimulated)
    }
}

impl From<Preset> for Scenario {
    fn from(preset: Preset) -> Self {
        Self {
            preset,
            overrides: ScenarioOverrides::default(),
        }
    }
}

impl Scenario {
    /// Label used in output headers.
    pub fn label(&self) -> String {
        if self.overrides == ScenarioOverrides::default() {
            self.preset.name().to_string()
        } else {
            format!("{}+overrides", self.preset.name())
        }
    }

    pub fn build(&self) -> Result<(RamanParams<f64>, CoherentAmplitudes<f64>)> {
        make_scenario(self.preset, &self.overrides)
    }
}

/// Everything a closed-form sweep needs.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepPlan {
    pub scenario: Scenario,
    pub grid: TimeGrid,
    pub phases: Vec<f64>,
    pub specs: Vec<WitnessSpec>,
    /// Gains applied to traces in emitted plot scripts only.
    pub plot_multipliers: BTreeMap<WitnessSpec, f64>,
}

impl Default for SweepPlan {
    fn default() -> Self {
        Self {
            scenario: Scenario::default(),
            grid: TimeGrid::default(),
            phases: DEFAULT_PHASES.to_vec(),
            specs: default_specs(),
            plot_multipliers: BTreeMap::new(),
        }
    }
}

/// Every HZ-1 pair at orders `(1,1)`, `(2,1)` and `(3,1)`.
pub fn default_specs() -> Vec<WitnessSpec> {
    WitnessSpec::all_pairs(Criterion::Hz1, &FIGURE_ORDERS).expect("figure orders are valid")
}

impl SweepPlan {
    pub fn validate(&self) -> Result<()> {
        self.grid.validate()?;
        self.scenario.build()?;
        if self.phases.is_empty() {
            return Err(Error::config("sweep.phases", "at least one phase is required"));
        }
        if let Some(p) = self.phases.iter().find(|p| !p.is_finite()) {
            return Err(Error::config("sweep.phases", format!("phase {p} is not finite")));
        }
        if self.specs.is_empty() {
            return Err(Error::config("sweep.specs", "at least one spec is required"));
        }
        for (spec, gain) in &self.plot_multipliers {
            if !self.specs.contains(spec) {
                return Err(Error::config(
                    format!("plot_multipliers.{spec}"),
                    "spec is not part of the sweep",
                ));
            }
            if !(gain.is_finite() && *gain != 0.0) {
                return Err(Error::config(
                    format!("plot_multipliers.{spec}"),
                    format!("gain must be finite and nonzero, got {gain}"),
                ));
            }
        }
        Ok(())
    }

    pub fn multiplier(&self, spec: &WitnessSpec) -> f64 {
        self.plot_multipliers.get(spec).copied().unwrap_or(1.0)
    }
}

/// Coefficients at every grid time for the parameters in units of `g`.
fn coefficient_grid(params: &RamanParams<f64>, times: &[f64]) -> Result<Vec<CoefficientSet<f64>>> {
    let scaled = nondimensionalize(params)?.to_params();
    if let Some(&t) = times.last() {
        scaled.warn_if_strong(t);
    }
    Ok(times.par_iter().map(|&t| eval_coefficients(&scaled, t)).collect())
}

/// Closed-form series for every `(φ, spec)` of the plan, φ-major.
pub fn run_sweep(plan: &SweepPlan) -> Result<Vec<WitnessSeries>> {
    plan.validate()?;
    let (params, amps) = plan.scenario.build()?;
    let times = plan.grid.times();
    let coeffs = coefficient_grid(&params, &times)?;
    let label = plan.scenario.label();
    let jobs: Vec<(f64, WitnessSpec)> = plan
        .phases
        .iter()
        .flat_map(|&phi| plan.specs.iter().map(move |s| (phi, *s)))
        .collect();
    jobs.par_iter()
        .map(|&(phi, spec)| {
            let a = amps.with_phi(phi);
            let values = coeffs
                .iter()
                .map(|cs| closed_form_witness(&spec, cs, &a).map(|w| w.value))
                .collect::<Result<Vec<_>>>()?;
            WitnessSeries::new(spec, label.clone(), phi, times.clone(), values)
        })
        .collect()
}

/// Sign summary of one series.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SignSummary {
    pub scenario: String,
    pub spec: WitnessSpec,
    pub phi: f64,
    pub negative: bool,
    pub min: f64,
    pub argmin: f64,
}

/// Relative threshold below which a minimum counts as a negative region.
pub const NEGATIVE_THRESHOLD_EPS: f64 = 10.0 * f64::EPSILON;

/// Presence of a negative region in each series: the minimum lies below
/// `−10 ε · max |value|`.
pub fn sign_pattern(series: &[WitnessSeries]) -> Vec<SignSummary> {
    series
        .iter()
        .filter_map(|s| {
            let (min, argmin) = s.min()?;
            let scale = s.values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            Some(SignSummary {
                scenario: s.scenario.clone(),
                spec: s.spec,
                phi: s.phi,
                negative: min < -NEGATIVE_THRESHOLD_EPS * scale,
                min,
                argmin,
            })
        })
        .collect()
}

/// Figures whose data this crate regenerates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Figure {
    /// Pairwise HZ-1 witnesses, stimulated process.
    Fig2,
    /// Pairwise HZ-2 witnesses, stimulated process.
    Fig3,
    /// Three-mode witness, stimulated and spontaneous.
    Fig4,
    /// Four-mode witness, stimulated and partially spontaneous.
    Fig5,
}

impl Figure {
    pub const ALL: [Figure; 4] = [Figure::Fig2, Figure::Fig3, Figure::Fig4, Figure::Fig5];

    pub fn id(self) -> &'static str {
        match self {
            Figure::Fig2 => "fig2",
            Figure::Fig3 => "fig3",
            Figure::Fig4 => "fig4",
            Figure::Fig5 => "fig5",
        }
    }
}

impl fmt::Display for Figure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for Figure {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Figure::ALL
            .into_iter()
            .find(|f| f.id().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::config("id", format!("unknown figure `{s}` (expected fig2, fig3, fig4 or fig5)")))
    }
}

/// Rectangular numeric table with named columns.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(&self.columns)?;
        for row in &self.rows {
            // Negative zero prints as `0`.
            out.write_record(row.iter().map(|&v| if v == 0.0 { "0".into() } else { v.to_string() }))?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn write_json<W: Write>(&self, w: W) -> Result<()> {
        serde_json::to_writer_pretty(w, self).map_err(|e| Error::Io(e.into()))
    }

    pub fn to_csv_string(&self) -> Result<String> {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)?;
        Ok(String::from_utf8(buf).expect("csv output is utf-8"))
    }
}

/// Short phase label for headers: `0`, `pi/2`, `pi` or the decimal value.
pub fn phase_label(phi: f64) -> String {
    if phi == 0.0 {
        "0".into()
    } else if phi == FRAC_PI_2 {
        "pi/2".into()
    } else if phi == PI {
        "pi".into()
    } else {
        format!("{phi}")
    }
}

/// Column name of a series in wide tables.
pub fn series_column(scenario: &str, spec: &WitnessSpec, phi: f64) -> String {
    format!("{scenario}/{spec}/phi={}", phase_label(phi))
}

/// Wide table with one `gt` column and one column per series.
/// All series must share the same time grid.
pub fn series_table(series: &[WitnessSeries]) -> Result<Table> {
    let times = series
        .first()
        .map(|s| s.times.clone())
        .ok_or_else(|| Error::IncompleteInput("series for a table".into()))?;
    if series.iter().any(|s| s.times != times) {
        return Err(Error::config("grid", "series in one table must share a time grid"));
    }
    let mut columns = vec!["gt".to_string()];
    columns.extend(series.iter().map(|s| series_column(&s.scenario, &s.spec, s.phi)));
    let rows = times
        .iter()
        .enumerate()
        .map(|(k, &t)| std::iter::once(t).chain(series.iter().map(|s| s.values[k])).collect())
        .collect();
    Ok(Table { columns, rows })
}

/// Sign summaries as a CSV document.
pub fn sign_pattern_csv(summaries: &[SignSummary]) -> Result<String> {
    let mut out = csv::Writer::from_writer(Vec::new());
    out.write_record(["scenario", "spec", "phi", "negative", "min", "argmin_gt"])?;
    for s in summaries {
        out.write_record([
            s.scenario.clone(),
            s.spec.to_string(),
            phase_label(s.phi),
            s.negative.to_string(),
            s.min.to_string(),
            s.argmin.to_string(),
        ])?;
    }
    let bytes = out.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

/// One figure panel: a CSV file and the trace gains already applied to it.
#[derive(Debug, Clone, PartialEq)]
pub struct Panel {
    /// File stem, for example `fig2_ab`.
    pub name: String,
    pub title: String,
    pub table: Table,
}

/// Data files and plot script of one figure.
#[derive(Debug, Clone, PartialEq)]
pub struct FigureData {
    pub figure: Figure,
    pub panels: Vec<Panel>,
    /// Gnuplot script reading the panel CSVs by relative path.
    pub script: String,
}

/// Gain of the `n` trace in a pairwise panel.
pub fn pairwise_gain(pair: Pair, n: u32) -> f64 {
    match (pair, n) {
        (Pair::Cd, 2) => 1e3,
        (Pair::Cd, 3) => 1e6,
        (Pair::Cd, _) => 1.0,
        (_, 1) => 1500.0,
        (_, 2) => 50.0,
        _ => 1.0,
    }
}

fn gain_suffix(gain: f64) -> String {
    if gain == 1.0 {
        String::new()
    } else {
        format!(" x{gain}")
    }
}

/// Data of `figure` on the default grid.
pub fn figure_data(figure: Figure) -> Result<FigureData> {
    figure_data_on(figure, &TimeGrid::default())
}

/// Data of `figure` on a custom grid.
pub fn figure_data_on(figure: Figure, grid: &TimeGrid) -> Result<FigureData> {
    grid.validate()?;
    let panels = match figure {
        Figure::Fig2 | Figure::Fig3 => {
            let criterion = if figure == Figure::Fig2 { Criterion::Hz1 } else { Criterion::Hz2 };
            Pair::ALL
                .iter()
                .map(|&pair| {
                    let specs: Vec<WitnessSpec> = FIGURE_ORDERS
                        .iter()
                        .map(|&(n, m)| WitnessSpec::pairwise(criterion, pair, n, m))
                        .collect::<Result<_>>()?;
                    let plan = SweepPlan {
                        scenario: Scenario::from(Preset::Stimulated),
                        grid: *grid,
                        phases: DEFAULT_PHASES.to_vec(),
                        plot_multipliers: specs.iter().map(|s| (*s, pairwise_gain(pair, s.n()))).collect(),
                        specs,
                    };
                    panel(
                        format!("{figure}_{}", pair.label()),
                        format!("{} {}", criterion.token().to_uppercase(), pair.label()),
                        &plan,
                    )
                })
                .collect::<Result<Vec<_>>>()?
        }
        Figure::Fig4 | Figure::Fig5 => {
            let (spec, second) = if figure == Figure::Fig4 {
                (WitnessSpec::three_mode(), Preset::Spontaneous)
            } else {
                (WitnessSpec::four_mode(), Preset::PartialSpontaneous)
            };
            [Preset::Stimulated, second]
                .iter()
                .map(|&preset| {
                    let plan = SweepPlan {
                        scenario: Scenario::from(preset),
                        grid: *grid,
                        phases: DEFAULT_PHASES.to_vec(),
                        specs: vec![spec],
                        plot_multipliers: BTreeMap::new(),
                    };
                    panel(
                        format!("{figure}_{}", preset.name().replace('-', "_")),
                        format!("{spec} {preset}"),
                        &plan,
                    )
                })
                .collect::<Result<Vec<_>>>()?
        }
    };
    let script = plot_script(&format!("{figure}.png"), &panels);
    Ok(FigureData {
        figure,
        panels,
        script,
    })
}

/// Runs `plan` and tabulates each trace with its plot gain applied.
fn panel(name: String, title: String, plan: &SweepPlan) -> Result<Panel> {
    let series = run_sweep(plan)?;
    let mut columns = vec!["gt".to_string()];
    columns.extend(series.iter().map(|s| {
        format!(
            "n={},m={} phi={}{}",
            s.spec.n(),
            s.spec.m(),
            phase_label(s.phi),
            gain_suffix(plan.multiplier(&s.spec))
        )
    }));
    let gains: Vec<f64> = series.iter().map(|s| plan.multiplier(&s.spec)).collect();
    let rows = plan
        .grid
        .times()
        .iter()
        .enumerate()
        .map(|(k, &t)| {
            std::iter::once(t)
                .chain(series.iter().zip(&gains).map(|(s, g)| s.values[k] * g))
                .collect()
        })
        .collect();
    Ok(Panel {
        name,
        title,
        table: Table { columns, rows },
    })
}

/// Gnuplot script drawing every panel from its CSV file.
pub fn plot_script(output: &str, panels: &[Panel]) -> String {
    let cols = if panels.len() > 2 { 3 } else { panels.len() };
    let rows = panels.len().div_ceil(cols);
    let mut s = String::new();
    s.push_str("set datafile separator ','\n");
    s.push_str("set terminal pngcairo size 1500,900\n");
    s.push_str(&format!("set output '{output}'\n"));
    s.push_str("set key autotitle columnheader\n");
    s.push_str("set xlabel 'gt'\n");
    s.push_str(&format!("set multiplot layout {rows},{cols}\n"));
    for p in panels {
        let ncols = p.table.columns.len();
        s.push_str(&format!("set title '{}'\n", p.title));
        s.push_str(&format!(
            "plot for [k=2:{ncols}] '{}.csv' using 1:k with lines\n",
            p.name
        ));
    }
    s.push_str("unset multiplot\n");
    s
}

/// Gnuplot script for a sweep table, applying the plan's gains.
pub fn sweep_plot_script(plan: &SweepPlan, series: &[WitnessSeries], csv_name: &str) -> String {
    let mut s = String::new();
    s.push_str("set datafile separator ','\n");
    s.push_str("set terminal pngcairo size 1200,800\n");
    s.push_str("set output 'sweep.png'\n");
    s.push_str("set xlabel 'gt'\n");
    let traces: Vec<String> = series
        .iter()
        .enumerate()
        .map(|(k, ser)| {
            let gain = plan.multiplier(&ser.spec);
            format!(
                "'{csv_name}' using 1:(${}*{gain}) with lines title '{}{}'",
                k + 2,
                series_column(&ser.scenario, &ser.spec, ser.phi),
                gain_suffix(gain)
            )
        })
        .collect();
    s.push_str("plot ");
    s.push_str(&traces.join(", \\\n     "));
    s.push('\n');
    s
}
