//! TOML run configuration: sweep plan and oracle validation plan.
//!
//! Every section is optional and every unknown key is rejected. An empty
//! file gives the default sweep (stimulated preset, default grid, all HZ-1
//! pairs at orders `(1,1)`, `(2,1)`, `(3,1)`) and the desk validation plan.

use std::collections::BTreeMap;
use std::f64::consts::FRAC_PI_2;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{CoherentAmplitudes, Pair, RamanParams, WitnessSpec};
use crate::oracle::{
    validate_closed_forms, ComparisonRow, FockConfig, OracleDiagnostics, DEFAULT_EVOLVE_TOL, DEFAULT_LEAK_TOL,
    DEFAULT_MAX_DIM,
};
use crate::sweeps::{default_specs, Scenario, SweepPlan, TimeGrid, DEFAULT_PHASES};

/// `[sweep]` section.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepSection {
    pub phases: Vec<f64>,
    pub specs: Vec<WitnessSpec>,
}

impl Default for SweepSection {
    fn default() -> Self {
        Self {
            phases: DEFAULT_PHASES.to_vec(),
            specs: default_specs(),
        }
    }
}

/// Closed-form against oracle comparison at a desk-scale point, in units
/// of `g` (`[oracle]` section).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ValidationPlan {
    /// `χ / g`.
    pub chi: f64,
    /// `Δω₁ / g`.
    pub dw1: f64,
    /// `Δω₂ / g`.
    pub dw2: f64,
    /// Magnitudes `(|α1|, α2, α3, α4)`; the pump carries the phase `phi`.
    pub alpha: [f64; 4],
    pub phi: f64,
    /// Comparison times `gt`, ascending and positive.
    pub times: Vec<f64>,
    pub specs: Vec<WitnessSpec>,
    pub cutoffs: [usize; 4],
    pub leak_tol: f64,
    pub max_dim: usize,
    pub evolve_tol: f64,
}

/// Specs compared against the oracle by default.
pub fn validation_specs() -> Vec<WitnessSpec> {
    vec![
        WitnessSpec::hz1(Pair::Ab, 1, 1).expect("valid"),
        WitnessSpec::hz1(Pair::Ab, 2, 1).expect("valid"),
        WitnessSpec::hz1(Pair::Bc, 1, 1).expect("valid"),
        WitnessSpec::hz2(Pair::Bc, 1, 1).expect("valid"),
        WitnessSpec::three_mode(),
        WitnessSpec::four_mode(),
    ]
}

impl Default for ValidationPlan {
    fn default() -> Self {
        Self::desk()
    }
}

impl ValidationPlan {
    /// Desk-scale point with cutoffs chosen so that the top-level monitor
    /// stays below its default tolerance throughout.
    pub fn desk() -> Self {
        Self {
            chi: 1.0,
            dw1: 10.0,
            dw2: 19.0,
            alpha: [0.5, 0.3, 0.2, 0.1],
            phi: FRAC_PI_2,
            times: vec![0.0125, 0.025, 0.05],
            specs: validation_specs(),
            cutoffs: [8, 7, 6, 5],
            leak_tol: DEFAULT_LEAK_TOL,
            max_dim: DEFAULT_MAX_DIM,
            evolve_tol: DEFAULT_EVOLVE_TOL,
        }
    }

    /// Looks up a named validation preset.
    pub fn preset(name: &str) -> Result<Self> {
        match name {
            "desk" => Ok(Self::desk()),
            other => Err(Error::config(
                "preset",
                format!("unknown validation preset `{other}` (expected desk)"),
            )),
        }
    }

    pub fn params(&self) -> Result<RamanParams<f64>> {
        RamanParams::new(1.0, self.chi, self.dw1, self.dw2)
    }

    pub fn amplitudes(&self) -> CoherentAmplitudes<f64> {
        let [a1, a2, a3, a4] = self.alpha;
        CoherentAmplitudes::from_pump_phase(a1, self.phi, a2, a3, a4)
    }

    pub fn fock(&self) -> FockConfig {
        FockConfig {
            cutoffs: self.cutoffs,
            leak_tol: self.leak_tol,
            max_dim: self.max_dim,
            evolve_tol: self.evolve_tol,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.params()?;
        self.fock().validate()?;
        if self.alpha.iter().any(|a| !a.is_finite()) || !self.phi.is_finite() {
            return Err(Error::config("oracle.alpha", "amplitudes and phase must be finite"));
        }
        if self.times.is_empty() {
            return Err(Error::config("oracle.times", "at least one time is required"));
        }
        if self.times.iter().any(|t| !(t.is_finite() && *t > 0.0))
            || self.times.windows(2).any(|w| !(w[1] > w[0]))
        {
            return Err(Error::config("oracle.times", "times must be positive and strictly increasing"));
        }
        if self.specs.is_empty() {
            return Err(Error::config("oracle.specs", "at least one spec is required"));
        }
        Ok(())
    }

    /// Validates the plan and runs the monitored comparison.
    pub fn run(&self) -> Result<(Vec<ComparisonRow>, Vec<OracleDiagnostics>)> {
        self.validate()?;
        validate_closed_forms(&self.params()?, &self.amplitudes(), &self.fock(), &self.times, &self.specs)
    }
}

/// On-disk layout of a configuration file.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ConfigFile {
    pub scenario: Scenario,
    pub grid: TimeGrid,
    pub sweep: SweepSection,
    pub plot_multipliers: BTreeMap<WitnessSpec, f64>,
    pub oracle: ValidationPlan,
}

/// Validated contents of a configuration file.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct LoadedConfig {
    pub sweep: SweepPlan,
    pub validation: ValidationPlan,
}

impl LoadedConfig {
    /// Parses and validates TOML text.
    pub fn from_toml(text: &str) -> Result<Self> {
        let file: ConfigFile = toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        let sweep = SweepPlan {
            scenario: file.scenario,
            grid: file.grid,
            phases: file.sweep.phases,
            specs: file.sweep.specs,
            plot_multipliers: file.plot_multipliers,
        };
        sweep.validate()?;
        file.oracle.validate()?;
        Ok(Self {
            sweep,
            validation: file.oracle,
        })
    }

    /// TOML text that loads back into an identical configuration.
    pub fn to_toml(&self) -> Result<String> {
        let file = ConfigFile {
            scenario: self.sweep.scenario.clone(),
            grid: self.sweep.grid,
            sweep: SweepSection {
                phases: self.sweep.phases.clone(),
                specs: self.sweep.specs.clone(),
            },
            plot_multipliers: self.sweep.plot_multipliers.clone(),
            oracle: self.validation.clone(),
        };
        toml::to_string(&file).map_err(|e| Error::Parse(e.to_string()))
    }
}

/// Reads and validates a configuration file.
pub fn load_config(path: impl AsRef<Path>) -> Result<LoadedConfig> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)?;
    LoadedConfig::from_toml(&text).map_err(|e| match e {
        Error::Parse(m) => Error::Parse(format!("{}: {m}", path.display())),
        other => other,
    })
}
