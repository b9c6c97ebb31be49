//! Domain types shared by every layer: modes, initial amplitudes, couplings,
//! scenario presets and witness specifications.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{c, cis, re, Cplx, Real};

/// One of the four bosonic modes of the Raman Hamiltonian.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Mode {
    /// Pump.
    A,
    /// Stokes.
    B,
    /// Vibrational phonon.
    C,
    /// Anti-Stokes.
    D,
}

impl Mode {
    /// All modes in canonical order.
    pub const ALL: [Mode; 4] = [Mode::A, Mode::B, Mode::C, Mode::D];

    /// Position of the mode in `[a, b, c, d]`.
    pub fn index(self) -> usize {
        self as usize
    }

    /// Single-letter label.
    pub fn label(self) -> char {
        match self {
            Mode::A => 'a',
            Mode::B => 'b',
            Mode::C => 'c',
            Mode::D => 'd',
        }
    }

    /// Parses a single-letter label.
    pub fn from_label(ch: char) -> Option<Mode> {
        match ch {
            'a' => Some(Mode::A),
            'b' => Some(Mode::B),
            'c' => Some(Mode::C),
            'd' => Some(Mode::D),
            _ => None,
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.label())
    }
}

/// Coherent amplitudes of the initial product state `|α1⟩|α2⟩|α3⟩|α4⟩`.
///
/// The pump amplitude follows `α1 = |α1| e^{-iφ}`; `φ` is stored alongside so
/// that phase scans do not need to re-derive it from `alpha1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoherentAmplitudes<T: Real> {
    pub alpha1: Cplx<T>,
    pub alpha2: Cplx<T>,
    pub alpha3: Cplx<T>,
    pub alpha4: Cplx<T>,
    pub phi: T,
}

impl<T: Real> CoherentAmplitudes<T> {
    /// Pump magnitude and phase with real amplitudes for the other three
    /// modes.
    pub fn from_pump_phase(alpha1_abs: T, phi: T, alpha2: T, alpha3: T, alpha4: T) -> Self {
        Self {
            alpha1: cis(-phi) * alpha1_abs,
            alpha2: re(alpha2),
            alpha3: re(alpha3),
            alpha4: re(alpha4),
            phi,
        }
    }

    /// Builds from four arbitrary complex amplitudes; `phi` is taken as
    /// `-arg(α1)`.
    pub fn from_complex(alpha: [Cplx<T>; 4]) -> Self {
        Self {
            alpha1: alpha[0],
            alpha2: alpha[1],
            alpha3: alpha[2],
            alpha4: alpha[3],
            phi: -alpha[0].arg(),
        }
    }

    /// Vacuum in every mode.
    pub fn vacuum() -> Self {
        let z = c(T::zero(), T::zero());
        Self {
            alpha1: z,
            alpha2: z,
            alpha3: z,
            alpha4: z,
            phi: T::zero(),
        }
    }

    /// Same magnitudes with the pump phase replaced by `phi`.
    pub fn with_phi(&self, phi: T) -> Self {
        Self {
            alpha1: cis(-phi) * self.alpha1.norm(),
            phi,
            ..*self
        }
    }

    /// Amplitudes as `[α1, α2, α3, α4]`.
    pub fn as_array(&self) -> [Cplx<T>; 4] {
        [self.alpha1, self.alpha2, self.alpha3, self.alpha4]
    }

    /// Amplitude of one mode.
    pub fn alpha(&self, mode: Mode) -> Cplx<T> {
        self.as_array()[mode.index()]
    }

    /// Converts to double precision.
    pub fn to_f64(&self) -> CoherentAmplitudes<f64> {
        let cv = |z: Cplx<T>| c(z.re.to_f64_lossy(), z.im.to_f64_lossy());
        CoherentAmplitudes {
            alpha1: cv(self.alpha1),
            alpha2: cv(self.alpha2),
            alpha3: cv(self.alpha3),
            alpha4: cv(self.alpha4),
            phi: self.phi.to_f64_lossy(),
        }
    }
}

/// Couplings and detunings of the Raman Hamiltonian (angular frequencies,
/// ħ = 1).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RamanParams<T: Real> {
    /// Stokes coupling.
    pub g: T,
    /// Anti-Stokes coupling.
    pub chi: T,
    /// Stokes detuning `ω_b + ω_c − ω_a`.
    pub dw1: T,
    /// Anti-Stokes detuning `ω_a + ω_c − ω_d`.
    pub dw2: T,
    /// Optional bare frequencies `(ω_a, ω_b, ω_c, ω_d)`; zero when absent.
    pub omega: Option<[T; 4]>,
}

/// Above this value of `g·t` or `χ·t` the perturbative solution is outside
/// its regime of validity and a warning is logged.
pub const WEAK_COUPLING_WARN: f64 = 0.5;

impl<T: Real> RamanParams<T> {
    /// Validated constructor without bare frequencies.
    pub fn new(g: T, chi: T, dw1: T, dw2: T) -> Result<Self> {
        let p = Self {
            g,
            chi,
            dw1,
            dw2,
            omega: None,
        };
        p.validate()?;
        Ok(p)
    }

    /// Attaches bare frequencies; they must reproduce both detunings.
    pub fn with_omega(self, omega: [T; 4]) -> Result<Self> {
        let p = Self {
            omega: Some(omega),
            ..self
        };
        p.validate()?;
        Ok(p)
    }

    /// Checks every invariant of the type.
    pub fn validate(&self) -> Result<()> {
        let finite = [self.g, self.chi, self.dw1, self.dw2]
            .iter()
            .all(|x| x.is_finite());
        if !finite {
            return Err(Error::config("params", "all couplings and detunings must be finite"));
        }
        if self.g <= T::zero() {
            return Err(Error::config("g", format!("must be > 0, got {}", self.g)));
        }
        if self.chi < T::zero() {
            return Err(Error::config("chi", format!("must be >= 0, got {}", self.chi)));
        }
        if let Some([wa, wb, wc, wd]) = self.omega {
            let tol = T::lit(1e-12);
            let check = |name: &str, given: T, implied: T| {
                let scale = given.abs().max(implied.abs()).max(T::one());
                if (given - implied).abs() > tol * scale {
                    Err(Error::config(
                        name,
                        format!("detuning {given} disagrees with bare frequencies (implied {implied})"),
                    ))
                } else {
                    Ok(())
                }
            };
            check("dw1", self.dw1, wb + wc - wa)?;
            check("dw2", self.dw2, wa + wc - wd)?;
        }
        Ok(())
    }

    /// Bare frequencies, zero when not supplied.
    pub fn free_frequencies(&self) -> [T; 4] {
        self.omega.unwrap_or([T::zero(); 4])
    }

    /// Logs a warning when `g·t` or `χ·t` leaves the weak-coupling regime.
    pub fn warn_if_strong(&self, t: T) {
        let gt = (self.g * t).to_f64_lossy();
        let ct = (self.chi * t).to_f64_lossy();
        if gt > WEAK_COUPLING_WARN || ct > WEAK_COUPLING_WARN {
            log::warn!(
                "g*t = {gt:.3}, chi*t = {ct:.3}: outside the weak-coupling regime of the perturbative solution"
            );
        }
    }

    /// Converts to double precision.
    pub fn to_f64(&self) -> RamanParams<f64> {
        RamanParams {
            g: self.g.to_f64_lossy(),
            chi: self.chi.to_f64_lossy(),
            dw1: self.dw1.to_f64_lossy(),
            dw2: self.dw2.to_f64_lossy(),
            omega: self.omega.map(|w| w.map(|x| x.to_f64_lossy())),
        }
    }
}

/// Parameters expressed in units of the Stokes coupling `g`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaledParams<T: Real> {
    pub chi_over_g: T,
    pub dw1_over_g: T,
    pub dw2_over_g: T,
    /// Bare frequencies divided by `g`, if supplied.
    pub omega_over_g: Option<[T; 4]>,
    /// Multiply a dimensionless `gt` by this to obtain a physical time.
    pub time_per_gt: T,
}

impl<T: Real> ScaledParams<T> {
    /// The equivalent parameter set with `g = 1`.
    pub fn to_params(&self) -> RamanParams<T> {
        RamanParams {
            g: T::one(),
            chi: self.chi_over_g,
            dw1: self.dw1_over_g,
            dw2: self.dw2_over_g,
            omega: self.omega_over_g,
        }
    }
}

/// Divides every frequency by `g`.
pub fn nondimensionalize<T: Real>(params: &RamanParams<T>) -> Result<ScaledParams<T>> {
    if params.g == T::zero() {
        return Err(Error::DegenerateScale(
            "g = 0 cannot set the time scale".to_string(),
        ));
    }
    let g = params.g;
    Ok(ScaledParams {
        chi_over_g: params.chi / g,
        dw1_over_g: params.dw1 / g,
        dw2_over_g: params.dw2 / g,
        omega_over_g: params.omega.map(|w| w.map(|x| x / g)),
        time_per_gt: T::one() / g,
    })
}

/// Named initial-state and coupling parameter sets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Preset {
    /// All four modes initially coherent.
    Stimulated,
    /// Only the pump is populated.
    Spontaneous,
    /// Pump and anti-Stokes populated, Stokes and phonon empty.
    PartialSpontaneous,
}

impl Preset {
    /// All presets in a fixed order.
    pub const ALL: [Preset; 3] = [
        Preset::Stimulated,
        Preset::Spontaneous,
        Preset::PartialSpontaneous,
    ];

    /// Kebab-case name used in configuration files and the CLI.
    pub fn name(self) -> &'static str {
        match self {
            Preset::Stimulated => "stimulated",
            Preset::Spontaneous => "spontaneous",
            Preset::PartialSpontaneous => "partial-spontaneous",
        }
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "stimulated" => Ok(Preset::Stimulated),
            "spontaneous" => Ok(Preset::Spontaneous),
            "partial-spontaneous" | "partial_spontaneous" => Ok(Preset::PartialSpontaneous),
            other => Err(Error::config(
                "preset",
                format!(
                    "unknown preset `{other}` (expected stimulated, spontaneous or partial-spontaneous)"
                ),
            )),
        }
    }
}

/// Optional replacements for individual preset values.
///
/// `alpha1` is the pump magnitude; `alpha2..alpha4` are the real amplitudes
/// of the other modes. Supplying `omega` fixes the bare frequencies, and the
/// detunings are then derived from them unless given explicitly.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioOverrides {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub g: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub chi: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dw1: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dw2: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega: Option<[f64; 4]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha1: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha2: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha3: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha4: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phi: Option<f64>,
}

impl ScenarioOverrides {
    /// Names accepted by [`ScenarioOverrides::set`].
    pub const SCALAR_KEYS: [&'static str; 9] = [
        "g", "chi", "dw1", "dw2", "alpha1", "alpha2", "alpha3", "alpha4", "phi",
    ];

    /// Sets one scalar override by name.
    pub fn set(&mut self, key: &str, value: f64) -> Result<()> {
        let slot = match key {
            "g" => &mut self.g,
            "chi" => &mut self.chi,
            "dw1" => &mut self.dw1,
            "dw2" => &mut self.dw2,
            "alpha1" => &mut self.alpha1,
            "alpha2" => &mut self.alpha2,
            "alpha3" => &mut self.alpha3,
            "alpha4" => &mut self.alpha4,
            "phi" => &mut self.phi,
            other => {
                return Err(Error::config(
                    other,
                    format!(
                        "unknown override field (expected one of {}, omega)",
                        Self::SCALAR_KEYS.join(", ")
                    ),
                ))
            }
        };
        *slot = Some(value);
        Ok(())
    }

    /// Builds overrides from `(key, value)` pairs.
    pub fn from_pairs<'a>(pairs: impl IntoIterator<Item = (&'a str, f64)>) -> Result<Self> {
        let mut out = Self::default();
        for (k, v) in pairs {
            out.set(k, v)?;
        }
        Ok(out)
    }
}

/// Default Stokes coupling (Hz, treated as angular).
pub const DEFAULT_G: f64 = 1e4;
/// Default anti-Stokes coupling.
pub const DEFAULT_CHI: f64 = 1e4;
/// Stokes detuning magnitude; the sign defaults to positive.
pub const DEFAULT_DW1: f64 = 1e5;
/// Anti-Stokes detuning magnitude; the sign defaults to positive.
pub const DEFAULT_DW2: f64 = 1.9e5;
/// Stimulated-process amplitude magnitudes `(|α1|, |α2|, |α3|, |α4|)`.
pub const DEFAULT_AMPLITUDES: [f64; 4] = [10.0, 8.0, 0.01, 1.0];

/// Builds the parameters and initial amplitudes of a named scenario.
pub fn make_scenario<T: Real>(
    preset: Preset,
    overrides: &ScenarioOverrides,
) -> Result<(RamanParams<T>, CoherentAmplitudes<T>)> {
    let [a1, a2, a3, a4] = DEFAULT_AMPLITUDES;
    let (a2, a3, a4) = match preset {
        Preset::Stimulated => (a2, a3, a4),
        Preset::Spontaneous => (0.0, 0.0, 0.0),
        Preset::PartialSpontaneous => (0.0, 0.0, a4),
    };
    let o = overrides;
    let amps = CoherentAmplitudes::from_pump_phase(
        T::lit(o.alpha1.unwrap_or(a1)),
        T::lit(o.phi.unwrap_or(0.0)),
        T::lit(o.alpha2.unwrap_or(a2)),
        T::lit(o.alpha3.unwrap_or(a3)),
        T::lit(o.alpha4.unwrap_or(a4)),
    );
    if amps.alpha1.norm() == T::zero() && preset == Preset::Spontaneous {
        return Err(Error::config("alpha1", "spontaneous scenario needs a nonzero pump"));
    }

    let g = o.g.unwrap_or(DEFAULT_G);
    let chi = o.chi.unwrap_or(DEFAULT_CHI);
    let (dw1, dw2) = match o.omega {
        Some([wa, wb, wc, wd]) => (
            o.dw1.unwrap_or(wb + wc - wa),
            o.dw2.unwrap_or(wa + wc - wd),
        ),
        None => (o.dw1.unwrap_or(DEFAULT_DW1), o.dw2.unwrap_or(DEFAULT_DW2)),
    };
    let mut params = RamanParams::new(T::lit(g), T::lit(chi), T::lit(dw1), T::lit(dw2))?;
    if let Some(w) = o.omega {
        params = params.with_omega(w.map(T::lit))?;
    }
    Ok((params, amps))
}

/// Which moment-based criterion a witness evaluates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Criterion {
    /// `⟨i†ⁿiⁿ j†ᵐjᵐ⟩ − |⟨iⁿ j†ᵐ⟩|²`.
    Hz1,
    /// `⟨i†ⁿiⁿ⟩⟨j†ᵐjᵐ⟩ − |⟨iⁿ jᵐ⟩|²`.
    Hz2,
    /// `⟨N_a⟩⟨N_b⟩⟨N_c⟩ − |⟨abc⟩|²`.
    ThreeMode,
    /// `⟨N_a⟩⟨N_b⟩⟨N_c⟩⟨N_d⟩ − |⟨abcd⟩|²`.
    FourMode,
}

impl Criterion {
    /// Token used in the spec mini-language.
    pub fn token(self) -> &'static str {
        match self {
            Criterion::Hz1 => "hz1",
            Criterion::Hz2 => "hz2",
            Criterion::ThreeMode => "three",
            Criterion::FourMode => "four",
        }
    }
}

/// Mode pairs with a closed-form witness, in canonical order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Pair {
    Ab,
    Bc,
    Ac,
    Ad,
    Cd,
    Bd,
}

impl Pair {
    /// The six pairs in the order the closed forms are listed.
    pub const ALL: [Pair; 6] = [Pair::Ab, Pair::Bc, Pair::Ac, Pair::Ad, Pair::Cd, Pair::Bd];

    /// The two modes `(i, j)`; `n` belongs to `i`, `m` to `j`.
    pub fn modes(self) -> &'static [Mode] {
        match self {
            Pair::Ab => &[Mode::A, Mode::B],
            Pair::Bc => &[Mode::B, Mode::C],
            Pair::Ac => &[Mode::A, Mode::C],
            Pair::Ad => &[Mode::A, Mode::D],
            Pair::Cd => &[Mode::C, Mode::D],
            Pair::Bd => &[Mode::B, Mode::D],
        }
    }

    /// Two-letter label such as `"ab"`.
    pub fn label(self) -> &'static str {
        match self {
            Pair::Ab => "ab",
            Pair::Bc => "bc",
            Pair::Ac => "ac",
            Pair::Ad => "ad",
            Pair::Cd => "cd",
            Pair::Bd => "bd",
        }
    }

    /// Looks up the pair for two modes given in canonical order.
    pub fn from_modes(i: Mode, j: Mode) -> Option<Pair> {
        Pair::ALL.into_iter().find(|p| p.modes() == [i, j])
    }
}

/// A witness to evaluate: criterion, mode tuple and (for pairs) orders.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct WitnessSpec {
    criterion: Criterion,
    pair: Option<Pair>,
    n: u32,
    m: u32,
}

/// Largest order accepted for `n` or `m`.
pub const MAX_ORDER: u32 = 64;

impl WitnessSpec {
    /// Pairwise HZ-1 or HZ-2 witness of order `(n, m)`.
    pub fn pairwise(criterion: Criterion, pair: Pair, n: u32, m: u32) -> Result<Self> {
        let spec = Self {
            criterion,
            pair: Some(pair),
            n,
            m,
        };
        if !matches!(criterion, Criterion::Hz1 | Criterion::Hz2) {
            return Err(Error::spec(
                spec.to_string(),
                "pairwise witnesses use the hz1 or hz2 criterion",
            ));
        }
        if n == 0 || m == 0 || n > MAX_ORDER || m > MAX_ORDER {
            return Err(Error::spec(
                spec.to_string(),
                format!("orders must satisfy 1 <= n, m <= {MAX_ORDER}"),
            ));
        }
        Ok(spec)
    }

    /// Shorthand for an HZ-1 witness.
    pub fn hz1(pair: Pair, n: u32, m: u32) -> Result<Self> {
        Self::pairwise(Criterion::Hz1, pair, n, m)
    }

    /// Shorthand for an HZ-2 witness.
    pub fn hz2(pair: Pair, n: u32, m: u32) -> Result<Self> {
        Self::pairwise(Criterion::Hz2, pair, n, m)
    }

    /// Three-mode witness over `(a, b, c)`.
    pub fn three_mode() -> Self {
        Self {
            criterion: Criterion::ThreeMode,
            pair: None,
            n: 1,
            m: 1,
        }
    }

    /// Four-mode witness over `(a, b, c, d)`.
    pub fn four_mode() -> Self {
        Self {
            criterion: Criterion::FourMode,
            pair: None,
            n: 1,
            m: 1,
        }
    }

    /// Builds a spec from an explicit mode tuple, enforcing distinct modes
    /// and the canonical ordering.
    pub fn from_modes(criterion: Criterion, modes: &[Mode], n: u32, m: u32) -> Result<Self> {
        let label: String = modes.iter().map(|m| m.label()).collect();
        let display = format!("{}:{label}", criterion.token());
        for (k, x) in modes.iter().enumerate() {
            if modes[..k].contains(x) {
                return Err(Error::spec(display, format!("mode {x} appears twice")));
            }
        }
        match criterion {
            Criterion::Hz1 | Criterion::Hz2 => {
                if modes.len() != 2 {
                    return Err(Error::spec(display, "pairwise criteria take exactly two modes"));
                }
                match Pair::from_modes(modes[0], modes[1]) {
                    Some(pair) => Self::pairwise(criterion, pair, n, m),
                    None => {
                        let canon = Pair::from_modes(modes[1], modes[0])
                            .map(Pair::label)
                            .unwrap_or("?");
                        Err(Error::spec(
                            display,
                            format!("canonical order is \"{canon}\" (swap n and m accordingly)"),
                        ))
                    }
                }
            }
            Criterion::ThreeMode => {
                if modes == [Mode::A, Mode::B, Mode::C] {
                    Ok(Self::three_mode())
                } else {
                    Err(Error::spec(display, "the three-mode witness is defined only for \"abc\""))
                }
            }
            Criterion::FourMode => {
                if modes == Mode::ALL {
                    Ok(Self::four_mode())
                } else {
                    Err(Error::spec(display, "the four-mode witness is defined only for \"abcd\""))
                }
            }
        }
    }

    pub fn criterion(&self) -> Criterion {
        self.criterion
    }

    /// The pair for pairwise specs.
    pub fn pair(&self) -> Option<Pair> {
        self.pair
    }

    /// Mode tuple in canonical order.
    pub fn modes(&self) -> &'static [Mode] {
        match (self.criterion, self.pair) {
            (_, Some(p)) => p.modes(),
            (Criterion::ThreeMode, None) => &[Mode::A, Mode::B, Mode::C],
            _ => &Mode::ALL,
        }
    }

    /// Order on the first mode (1 for multi-mode witnesses).
    pub fn n(&self) -> u32 {
        self.n
    }

    /// Order on the second mode (1 for multi-mode witnesses).
    pub fn m(&self) -> u32 {
        self.m
    }

    /// True when the witness probes correlations of order `n + m ≥ 3` or
    /// more than two modes.
    pub fn is_higher_order(&self) -> bool {
        self.pair.is_none() || self.n + self.m >= 3
    }

    /// Every pairwise spec for the given criterion and orders, followed by
    /// nothing else; convenient for building sweep plans.
    pub fn all_pairs(criterion: Criterion, orders: &[(u32, u32)]) -> Result<Vec<Self>> {
        let mut out = Vec::with_capacity(Pair::ALL.len() * orders.len());
        for pair in Pair::ALL {
            for &(n, m) in orders {
                out.push(Self::pairwise(criterion, pair, n, m)?);
            }
        }
        Ok(out)
    }
}

impl fmt::Display for WitnessSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.pair {
            Some(p) => write!(f, "{}:{}:{},{}", self.criterion.token(), p.label(), self.n, self.m),
            None => {
                let modes: String = self.modes().iter().map(|m| m.label()).collect();
                write!(f, "{}:{modes}", self.criterion.token())
            }
        }
    }
}

/// Parses the mini-language `criterion:modes[:n,m]`.
///
/// `criterion` is one of `hz1`, `hz2`, `three`, `four`; `modes` is a string
/// of mode letters in canonical order; `n,m` is required for `hz1`/`hz2` and
/// must be absent otherwise.
impl FromStr for WitnessSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let text = s.trim();
        let parts: Vec<&str> = text.split(':').collect();
        let bad = |msg: &str| Error::spec(text, msg);
        let criterion = match parts.first().copied() {
            Some("hz1") => Criterion::Hz1,
            Some("hz2") => Criterion::Hz2,
            Some("three") => Criterion::ThreeMode,
            Some("four") => Criterion::FourMode,
            _ => return Err(bad("criterion must be hz1, hz2, three or four")),
        };
        let modes_str = parts.get(1).ok_or_else(|| bad("missing mode list"))?;
        let modes = modes_str
            .chars()
            .map(|ch| Mode::from_label(ch).ok_or_else(|| bad("modes must be letters from a, b, c, d")))
            .collect::<Result<Vec<_>>>()?;
        let (n, m) = match (criterion, parts.len()) {
            (Criterion::Hz1 | Criterion::Hz2, 3) => {
                let (n, m) = parts[2]
                    .split_once(',')
                    .ok_or_else(|| bad("orders must be written as n,m"))?;
                let parse = |x: &str| {
                    x.trim()
                        .parse::<u32>()
                        .map_err(|_| bad("orders must be positive integers"))
                };
                (parse(n)?, parse(m)?)
            }
            (Criterion::Hz1 | Criterion::Hz2, _) => {
                return Err(bad("pairwise specs take the form hz1:ab:n,m"))
            }
            (_, 2) => (1, 1),
            _ => return Err(bad("multi-mode specs take no orders (three:abc, four:abcd)")),
        };
        Self::from_modes(criterion, &modes, n, m).map_err(|e| match e {
            Error::Spec { message, .. } => Error::spec(text, message),
            other => other,
        })
    }
}

impl Serialize for WitnessSpec {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for WitnessSpec {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Tolerance on the `t = 0` value of a closed-form series.
pub const INITIAL_VALUE_TOL: f64 = 1e-12;

/// Time trace of one witness for one scenario and pump phase.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WitnessSeries {
    pub spec: WitnessSpec,
    pub scenario: String,
    pub phi: f64,
    /// Dimensionless times `gt`.
    pub times: Vec<f64>,
    pub values: Vec<f64>,
}

impl WitnessSeries {
    /// Validated constructor. When the grid starts at `t = 0` the first value
    /// must vanish within [`INITIAL_VALUE_TOL`].
    pub fn new(
        spec: WitnessSpec,
        scenario: impl Into<String>,
        phi: f64,
        times: Vec<f64>,
        values: Vec<f64>,
    ) -> Result<Self> {
        Self::with_initial_tolerance(spec, scenario, phi, times, values, INITIAL_VALUE_TOL)
    }

    /// Like [`WitnessSeries::new`] with a custom bound on the `t = 0` value.
    /// Truncated coherent states are separable but are only approximate
    /// ladder eigenstates, so oracle series use a looser bound.
    pub fn with_initial_tolerance(
        spec: WitnessSpec,
        scenario: impl Into<String>,
        phi: f64,
        times: Vec<f64>,
        values: Vec<f64>,
        initial_tol: f64,
    ) -> Result<Self> {
        let label = spec.to_string();
        if times.len() != values.len() {
            return Err(Error::config(
                label,
                format!("{} times but {} values", times.len(), values.len()),
            ));
        }
        if times.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::config(label, "times must be strictly increasing"));
        }
        if let (Some(&t0), Some(&v0)) = (times.first(), values.first()) {
            if t0 == 0.0 && v0.abs() > initial_tol {
                return Err(Error::config(
                    label,
                    format!("value at t = 0 is {v0:e}, expected 0 for a separable initial state"),
                ));
            }
        }
        Ok(Self {
            spec,
            scenario: scenario.into(),
            phi,
            times,
            values,
        })
    }

    /// Smallest value and the time at which it occurs.
    pub fn min(&self) -> Option<(f64, f64)> {
        self.values
            .iter()
            .zip(&self.times)
            .fold(None, |acc: Option<(f64, f64)>, (&v, &t)| match acc {
                Some((best, _)) if best <= v => acc,
                _ => Some((v, t)),
            })
    }
}
