//! Exact evolution of the Raman Hamiltonian in a truncated Fock space.
//!
//! Everything here works in units of the Stokes coupling: the Hamiltonian
//! is divided by `g` and times are the dimensionless `gt`. States start
//! as coherent product states, evolve under `e^{−iHt}` through a Lanczos
//! propagator, and moments are read off by applying lowering operators.

mod basis;
mod hamiltonian;
mod krylov;

use std::collections::BTreeSet;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub use basis::FockBasis;
pub use hamiltonian::SparseHamiltonian;
pub use krylov::{expm_apply, KrylovOptions, KrylovStats};

use crate::coefficients::eval_coefficients;
use crate::error::{Error, Result};
use crate::model::{nondimensionalize, CoherentAmplitudes, Mode, RamanParams, WitnessSeries, WitnessSpec};
use crate::moments::{required_moments, MomentKey, MomentTable};
use crate::witnesses::{closed_form_witness, witness_from_moments};

/// Default bound on the probability allowed on truncated levels.
pub const DEFAULT_LEAK_TOL: f64 = 1e-8;
/// Default hard cap on the basis dimension.
pub const DEFAULT_MAX_DIM: usize = 1 << 20;
/// Default per-substep error tolerance of the propagator.
pub const DEFAULT_EVOLVE_TOL: f64 = 1e-10;
/// Bound on the `t = 0` value of oracle witness series. A truncated
/// coherent state is separable but only approximately a ladder eigenstate.
pub const ORACLE_INITIAL_TOL: f64 = 1e-6;

/// Truncation of the four-mode Fock space.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FockConfig {
    /// Largest occupation kept per mode `(a, b, c, d)`, inclusive.
    pub cutoffs: [usize; 4],
    /// Allowed probability on truncated or top levels.
    pub leak_tol: f64,
    /// Hard cap on the basis dimension.
    pub max_dim: usize,
    /// Per-substep error tolerance of the propagator.
    pub evolve_tol: f64,
}

impl Default for FockConfig {
    fn default() -> Self {
        Self {
            cutoffs: [7, 5, 5, 5],
            leak_tol: DEFAULT_LEAK_TOL,
            max_dim: DEFAULT_MAX_DIM,
            evolve_tol: DEFAULT_EVOLVE_TOL,
        }
    }
}

impl FockConfig {
    pub fn new(cutoffs: [usize; 4]) -> Result<Self> {
        let c = Self {
            cutoffs,
            ..Self::default()
        };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(x) = self.cutoffs.iter().position(|&c| c < 1) {
            return Err(Error::config(
                "oracle.cutoffs",
                format!("cutoff of mode {} must be >= 1", Mode::ALL[x]),
            ));
        }
        if !(self.leak_tol > 0.0 && self.leak_tol < 1.0) {
            return Err(Error::config("oracle.leak_tol", "must lie in (0, 1)"));
        }
        if !(self.evolve_tol > 0.0) {
            return Err(Error::config("oracle.evolve_tol", "must be > 0"));
        }
        if self.max_dim == 0 {
            return Err(Error::config("oracle.max_dim", "must be >= 1"));
        }
        Ok(())
    }

    /// Basis dimension `Π (cutoff + 1)`.
    pub fn dimension(&self) -> usize {
        self.cutoffs
            .iter()
            .try_fold(1usize, |acc, &c| acc.checked_mul(c + 1))
            .unwrap_or(usize::MAX)
    }
}

/// Hamiltonian in units of `g`, together with its basis.
#[derive(Debug, Clone)]
pub struct OracleHamiltonian {
    basis: Arc<FockBasis>,
    matrix: SparseHamiltonian,
    /// Bare frequencies over `g`.
    omega: [f64; 4],
    /// Anti-Stokes coupling in the same units.
    chi: f64,
}

impl OracleHamiltonian {
    pub fn basis(&self) -> &Arc<FockBasis> {
        &self.basis
    }

    pub fn matrix(&self) -> &SparseHamiltonian {
        &self.matrix
    }

    pub fn omega(&self) -> [f64; 4] {
        self.omega
    }

    pub fn chi(&self) -> f64 {
        self.chi
    }
}

/// Bare frequencies over `g` used by the oracle. Supplied frequencies are
/// kept; otherwise `ω_b = ω_c = 1` and `ω_a`, `ω_d` follow from the
/// detunings.
pub fn oracle_frequencies(params: &RamanParams<f64>) -> Result<[f64; 4]> {
    let scaled = nondimensionalize(params)?;
    Ok(scaled.omega_over_g.unwrap_or_else(|| {
        let (wb, wc) = (1.0, 1.0);
        let wa = wb + wc - scaled.dw1_over_g;
        let wd = wa + wc - scaled.dw2_over_g;
        [wa, wb, wc, wd]
    }))
}

/// Matrix of `H / g` in the truncated basis.
pub fn build_hamiltonian(params: &RamanParams<f64>, config: &FockConfig) -> Result<OracleHamiltonian> {
    params.validate()?;
    let omega = oracle_frequencies(params)?;
    build_hamiltonian_explicit(config, omega, 1.0, params.chi / params.g)
}

/// Hamiltonian with explicit bare frequencies and couplings, in whatever
/// units the caller uses for time. Unlike [`build_hamiltonian`] this
/// accepts `g = 0`.
pub fn build_hamiltonian_explicit(
    config: &FockConfig,
    omega: [f64; 4],
    g: f64,
    chi: f64,
) -> Result<OracleHamiltonian> {
    config.validate()?;
    if !omega.iter().chain([&g, &chi]).all(|x| x.is_finite()) {
        return Err(Error::config("params", "frequencies and couplings must be finite"));
    }
    let basis = Arc::new(FockBasis::new(config.cutoffs, config.max_dim)?);
    let matrix = SparseHamiltonian::build(&basis, omega, g, chi);
    Ok(OracleHamiltonian {
        basis,
        matrix,
        omega,
        chi,
    })
}

/// A state vector over a truncated basis at dimensionless time `gt`.
#[derive(Debug, Clone)]
pub struct OracleState {
    basis: Arc<FockBasis>,
    amplitudes: Vec<Complex64>,
    t: f64,
}

impl OracleState {
    pub fn basis(&self) -> &Arc<FockBasis> {
        &self.basis
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Probability on basis states with some mode at its cutoff.
    pub fn top_level_probability(&self) -> f64 {
        self.basis.top_level_probability(&self.amplitudes)
    }

    /// `⟨Σ_x w_x N_x⟩` for integer weights.
    pub fn number_combination(&self, weights: [f64; 4]) -> f64 {
        self.amplitudes
            .iter()
            .enumerate()
            .map(|(idx, a)| {
                let occ = self.basis.occupation(idx);
                let n: f64 = (0..4).map(|x| weights[x] * occ[x] as f64).sum();
                n * a.norm_sqr()
            })
            .sum()
    }
}

/// Probability mass of a coherent state `|α⟩` above occupation `cutoff`.
pub fn coherent_tail_mass(alpha_abs: f64, cutoff: usize) -> f64 {
    let x = alpha_abs * alpha_abs;
    // Summing the tail directly keeps tiny masses accurate where 1 − Σ would cancel.
    let mut p = (-x).exp();
    let mut below = 0.0;
    for n in 0..=cutoff {
        if n > 0 {
            p *= x / n as f64;
        }
        below += p;
    }
    let mut tail = 0.0;
    let mut term = p;
    let mut n = cutoff;
    loop {
        n += 1;
        term *= x / n as f64;
        tail += term;
        if term <= tail * 1e-17 || n > cutoff + 10_000 {
            break;
        }
    }
    if tail > 0.0 {
        tail
    } else {
        (1.0 - below).max(0.0)
    }
}

/// Smallest cutoff whose tail mass stays below `leak_tol`.
pub fn required_cutoff(alpha_abs: f64, leak_tol: f64) -> usize {
    (0..).find(|&c| coherent_tail_mass(alpha_abs, c) < leak_tol).unwrap_or(usize::MAX)
}

/// Normalized truncated coherent product state at `t = 0`.
pub fn coherent_product_state(
    amps: &CoherentAmplitudes<f64>,
    config: &FockConfig,
) -> Result<OracleState> {
    config.validate()?;
    let alpha = amps.as_array();
    for (x, a) in alpha.iter().enumerate() {
        let tail = coherent_tail_mass(a.norm(), config.cutoffs[x]);
        if tail >= config.leak_tol {
            return Err(Error::CutoffTooSmall {
                mode: Mode::ALL[x].label(),
                cutoff: config.cutoffs[x],
                required: required_cutoff(a.norm(), config.leak_tol),
                tail,
            });
        }
    }
    let basis = Arc::new(FockBasis::new(config.cutoffs, config.max_dim)?);
    let ladders: Vec<Vec<Complex64>> = (0..4)
        .map(|x| {
            let a = alpha[x];
            let mut coef = Vec::with_capacity(config.cutoffs[x] + 1);
            let mut c = Complex64::new((-0.5 * a.norm_sqr()).exp(), 0.0);
            for n in 0..=config.cutoffs[x] {
                if n > 0 {
                    c *= a / (n as f64).sqrt();
                }
                coef.push(c);
            }
            coef
        })
        .collect();
    let mut amplitudes: Vec<Complex64> = (0..basis.dim())
        .map(|idx| {
            let occ = basis.occupation(idx);
            (0..4).map(|x| ladders[x][occ[x]]).product()
        })
        .collect();
    let norm = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    for a in &mut amplitudes {
        *a /= norm;
    }
    Ok(OracleState {
        basis,
        amplitudes,
        t: 0.0,
    })
}

/// Evolves `state` to time `t` under `H`.
///
/// The vector is never renormalized; the norm drift of the step is logged.
pub fn evolve(state: &OracleState, h: &OracleHamiltonian, t: f64, tol: f64) -> Result<OracleState> {
    if !(t >= state.t) {
        return Err(Error::config(
            "t",
            format!("target time {t} precedes the state time {}", state.t),
        ));
    }
    if !Arc::ptr_eq(&state.basis, &h.basis) && *state.basis != *h.basis {
        return Err(Error::config("oracle.cutoffs", "state and Hamiltonian use different bases"));
    }
    let before = state.norm();
    let (amplitudes, stats) =
        expm_apply(&h.matrix, &state.amplitudes, t - state.t, tol, KrylovOptions::default())?;
    let out = OracleState {
        basis: Arc::clone(&state.basis),
        amplitudes,
        t,
    };
    log::debug!(
        "evolved {:.4e} -> {t:.4e} in {} substeps, norm drift {:.3e}, max error estimate {:.3e}",
        state.t,
        stats.steps,
        out.norm() - before,
        stats.max_error_estimate
    );
    Ok(out)
}

/// `⟨ψ| Π_x (x†)^{p_x} x^{q_x} |ψ⟩`, computed as the overlap of
/// `Π x^{p_x} ψ` with `Π x^{q_x} ψ`.
pub fn normal_ordered_moment(state: &OracleState, key: &MomentKey) -> Result<Complex64> {
    let apply = |select: fn((u32, u32)) -> u32| -> Result<Vec<Complex64>> {
        let mut v = state.amplitudes.clone();
        for mode in Mode::ALL {
            let k = select(key.powers[mode.index()]);
            if k > 0 {
                v = state.basis.lower(mode, k, &v)?;
            }
        }
        Ok(v)
    };
    let left = apply(|(p, _)| p)?;
    let right = apply(|(_, q)| q)?;
    Ok(left.iter().zip(&right).map(|(l, r)| l.conj() * r).sum())
}

/// Moments needed by every spec in `specs`, evaluated on `state`.
pub fn moment_table(state: &OracleState, specs: &[WitnessSpec]) -> Result<MomentTable<f64>> {
    let keys: BTreeSet<MomentKey> = specs.iter().flat_map(required_moments).collect();
    keys.into_iter()
        .map(|k| normal_ordered_moment(state, &k).map(|v| (k, v)))
        .collect()
}

/// Health of one evolved state, measured against the initial state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OracleDiagnostics {
    pub t: f64,
    /// `|‖ψ(t)‖ − 1|`.
    pub norm_drift: f64,
    /// Relative drift of `⟨N_a + N_b + N_d⟩`.
    pub stokes_number_drift: f64,
    /// Relative drift of `⟨N_a + N_c + 2N_d⟩`.
    pub anti_stokes_number_drift: f64,
    /// Relative drift of `⟨H⟩`.
    pub energy_drift: f64,
    /// Probability on states with some mode at its cutoff.
    pub top_level_probability: f64,
}

impl OracleDiagnostics {
    pub fn max_conservation_drift(&self) -> f64 {
        self.stokes_number_drift
            .max(self.anti_stokes_number_drift)
            .max(self.energy_drift)
    }
}

/// Conserved quantities `(⟨N_a+N_b+N_d⟩, ⟨N_a+N_c+2N_d⟩, ⟨H⟩)`.
fn invariants(state: &OracleState, h: &OracleHamiltonian) -> [f64; 3] {
    [
        state.number_combination([1.0, 1.0, 0.0, 1.0]),
        state.number_combination([1.0, 0.0, 1.0, 2.0]),
        h.matrix.expectation(&state.amplitudes).re,
    ]
}

fn relative(now: f64, initial: f64) -> f64 {
    let d = (now - initial).abs();
    if initial != 0.0 {
        d / initial.abs()
    } else {
        d
    }
}

/// Witness values and diagnostics of an unchecked oracle run.
#[derive(Debug, Clone)]
pub struct OracleRun {
    pub times: Vec<f64>,
    /// `values[s][k]` is spec `s` at `times[k]`.
    pub values: Vec<Vec<f64>>,
    pub diagnostics: Vec<OracleDiagnostics>,
}

impl OracleRun {
    /// Largest top-level probability over the run.
    pub fn max_top_level_probability(&self) -> f64 {
        self.diagnostics
            .iter()
            .map(|d| d.top_level_probability)
            .fold(0.0, f64::max)
    }
}

/// Evolves once through `times` (in `gt`, ascending) and evaluates every
/// spec at each time from the same state. The truncation monitor is
/// recorded in the diagnostics but not enforced.
pub fn oracle_run(
    params: &RamanParams<f64>,
    amps: &CoherentAmplitudes<f64>,
    config: &FockConfig,
    times: &[f64],
    specs: &[WitnessSpec],
) -> Result<OracleRun> {
    if times.windows(2).any(|w| !(w[1] >= w[0])) || times.first().is_some_and(|&t| t < 0.0) {
        return Err(Error::config("grid", "oracle times must be nonnegative and ascending"));
    }
    let h = build_hamiltonian(params, config)?;
    let mut state = coherent_product_state(amps, config)?;
    let initial = invariants(&state, &h);
    let mut values = vec![Vec::with_capacity(times.len()); specs.len()];
    let mut diagnostics = Vec::with_capacity(times.len());
    for &t in times {
        state = evolve(&state, &h, t, config.evolve_tol)?;
        let table = moment_table(&state, specs)?;
        for (s, spec) in specs.iter().enumerate() {
            values[s].push(witness_from_moments(spec, &table, t)?.value);
        }
        let now = invariants(&state, &h);
        diagnostics.push(OracleDiagnostics {
            t,
            norm_drift: (state.norm() - 1.0).abs(),
            stokes_number_drift: relative(now[0], initial[0]),
            anti_stokes_number_drift: relative(now[1], initial[1]),
            energy_drift: relative(now[2], initial[2]),
            top_level_probability: state.top_level_probability(),
        });
    }
    Ok(OracleRun {
        times: times.to_vec(),
        values,
        diagnostics,
    })
}

/// Oracle witness series for each spec over `times`.
///
/// Fails with [`Error::TruncationBreach`] as soon as the top-level
/// probability reaches `leak_tol`, so no series from an invalid truncation
/// is ever returned.
pub fn oracle_witness_sweep(
    params: &RamanParams<f64>,
    amps: &CoherentAmplitudes<f64>,
    config: &FockConfig,
    times: &[f64],
    specs: &[WitnessSpec],
) -> Result<(Vec<WitnessSeries>, Vec<OracleDiagnostics>)> {
    let run = oracle_run(params, amps, config, times, specs)?;
    if let Some(d) = run
        .diagnostics
        .iter()
        .find(|d| d.top_level_probability >= config.leak_tol)
    {
        return Err(Error::TruncationBreach {
            time: d.t,
            probability: d.top_level_probability,
            tolerance: config.leak_tol,
        });
    }
    let series = specs
        .iter()
        .zip(run.values)
        .map(|(spec, values)| {
            WitnessSeries::with_initial_tolerance(
                *spec,
                "oracle",
                amps.phi,
                times.to_vec(),
                values,
                ORACLE_INITIAL_TOL,
            )
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((series, run.diagnostics))
}

/// One row of a closed-form against oracle comparison.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ComparisonRow {
    pub spec: WitnessSpec,
    pub t: f64,
    pub closed_form: f64,
    pub oracle: f64,
    pub abs_diff: f64,
    /// `log(Δ_k / Δ_{k−1}) / log(t_k / t_{k−1})` against the previous
    /// positive time of the same spec.
    pub order: Option<f64>,
}

/// Closed forms evaluated at the oracle's parameters next to oracle values.
pub fn compare_with_closed_form(
    params: &RamanParams<f64>,
    amps: &CoherentAmplitudes<f64>,
    times: &[f64],
    specs: &[WitnessSpec],
    run: &OracleRun,
) -> Result<Vec<ComparisonRow>> {
    let scaled = nondimensionalize(params)?.to_params();
    let mut rows = Vec::with_capacity(times.len() * specs.len());
    for (s, spec) in specs.iter().enumerate() {
        let mut prev: Option<(f64, f64)> = None;
        for (k, &t) in times.iter().enumerate() {
            let cs = eval_coefficients(&scaled, t);
            let closed = closed_form_witness(spec, &cs, amps)?.value;
            let oracle = run.values[s][k];
            let abs_diff = (closed - oracle).abs();
            let order = prev
                .filter(|&(t0, d0)| t0 > 0.0 && d0 > 0.0 && abs_diff > 0.0)
                .map(|(t0, d0)| (abs_diff / d0).ln() / (t / t0).ln());
            if t > 0.0 {
                prev = Some((t, abs_diff));
            }
            rows.push(ComparisonRow {
                spec: *spec,
                t,
                closed_form: closed,
                oracle,
                abs_diff,
                order,
            });
        }
    }
    Ok(rows)
}

/// Compares closed forms with the oracle at `times` with the truncation
/// monitor enforced on the initial state and at every comparison time.
pub fn validate_closed_forms(
    params: &RamanParams<f64>,
    amps: &CoherentAmplitudes<f64>,
    config: &FockConfig,
    times: &[f64],
    specs: &[WitnessSpec],
) -> Result<(Vec<ComparisonRow>, Vec<OracleDiagnostics>)> {
    let mut all_times = vec![0.0];
    all_times.extend(times.iter().copied().filter(|&t| t > 0.0));
    let run = oracle_run(params, amps, config, &all_times, specs)?;
    if let Some(d) = run
        .diagnostics
        .iter()
        .find(|d| d.top_level_probability >= config.leak_tol)
    {
        return Err(Error::TruncationBreach {
            time: d.t,
            probability: d.top_level_probability,
            tolerance: config.leak_tol,
        });
    }
    let rows = compare_with_closed_form(params, amps, &all_times, specs, &run)?
        .into_iter()
        .filter(|r| r.t > 0.0)
        .collect();
    Ok((rows, run.diagnostics))
}

