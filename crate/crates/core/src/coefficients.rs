//! Time-dependent coefficients of the second-order operator solution.
//!
//! Every coefficient is a (possibly nested) time integral of detuning
//! phases. The first-order ones reduce to [`phase_integral`]; the
//! second-order ones are double integrals
//! `∫₀ᵗ e^{ips} ∫₀ˢ e^{iqs'} ds' ds`, which equal `t²` times the second
//! divided difference of `exp` at `{0, ipt, i(p+q)t}`. Divided differences
//! are evaluated by a Taylor series when the nodes are close and by the
//! recurrence over the widest node pair otherwise, so no denominator such as
//! `Δω₁ − Δω₂` or `Δω₁ + Δω₂` is ever formed directly.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{CoherentAmplitudes, Mode, RamanParams};
use crate::moments::{MomentKey, MomentTable};
use crate::scalar::{abs2, c, cis, re, Cplx, Real};

/// Below this value of `|Δ·t|` the phase integral switches to its Taylor
/// series.
///
/// The closed form `(e^{iσΔt} − 1)/Δ` is evaluated through
/// `−2 sin²(x/2) + i sin x`, which has no subtractive cancellation, so the
/// switch is not needed for accuracy of the closed form itself. The series
/// through `(Δt)³` has truncation error `≈ (Δt)⁴/120 ≈ 1e−18` relative at the
/// switch point, far below the continuity bound of `1e−14`.
pub const EPS_SERIES: f64 = 1e-4;

/// `(e^{ix} − 1)/(ix)` for real `x`.
fn exprel_i<T: Real>(x: T) -> Cplx<T> {
    if x.abs() <= T::lit(EPS_SERIES) {
        let x2 = x * x;
        c(
            T::one() - x2 / T::lit(6.0),
            x / T::lit(2.0) - x2 * x / T::lit(24.0),
        )
    } else {
        let half = x / T::lit(2.0);
        let s = half.sin();
        c(x.sin() / x, T::lit(2.0) * s * s / x)
    }
}

/// `(e^{iσΔt} − 1)/Δ`, with its `Δ → 0` limit `iσt`.
///
/// `sign` is interpreted by its sign only; zero counts as positive.
pub fn phase_integral<T: Real>(delta: T, t: T, sign: i8) -> Cplx<T> {
    let s = if sign < 0 { -T::one() } else { T::one() };
    let x = s * delta * t;
    if x.abs() <= T::lit(EPS_SERIES) {
        // iσt − σ²Δt²/2 − iσ³Δ²t³/6 + σ⁴Δ³t⁴/24
        let dt = delta * t;
        c(
            -dt * t / T::lit(2.0) + dt * dt * dt * t / T::lit(24.0),
            s * t - s * dt * dt * t / T::lit(6.0),
        )
    } else {
        let half = x / T::lit(2.0);
        let sh = half.sin();
        c(-T::lit(2.0) * sh * sh, x.sin()) / delta
    }
}

/// `∫₀ᵗ e^{ixs} ds`.
fn first_integral<T: Real>(x: T, t: T) -> Cplx<T> {
    exprel_i(x * t) * t
}

/// First divided difference of `exp` at the imaginary nodes `ix`, `iy`.
fn divided_difference_1<T: Real>(x: T, y: T) -> Cplx<T> {
    cis(x) * exprel_i(y - x)
}

/// Second divided difference of `exp` at the imaginary nodes
/// `ix0`, `ix1`, `ix2`.
fn divided_difference_2<T: Real>(x0: T, x1: T, x2: T) -> Cplx<T> {
    let mut nodes = [x0, x1, x2];
    nodes.sort_by(|a, b| a.partial_cmp(b).expect("finite nodes"));
    let [lo, mid, hi] = nodes;
    let spread = hi - lo;
    if spread <= T::one() {
        // exp[z0,z1,z2] = e^{z0} Σ_k h_k(0, z1−z0, z2−z0)/(k+2)!
        // with h_k the complete homogeneous polynomial.
        let y1 = c(T::zero(), mid - lo);
        let y2 = c(T::zero(), spread);
        let mut h = re(T::one());
        let mut y2k = re(T::one());
        let mut fact = T::lit(2.0);
        let mut sum = h / fact;
        let eps = T::epsilon() * T::lit(0.25);
        for k in 1..60u32 {
            y2k = y2k * y2;
            h = y2k + y1 * h;
            fact = fact * T::int(k + 2);
            let term = h / fact;
            sum = sum + term;
            if term.norm() <= eps * sum.norm() {
                break;
            }
        }
        cis(lo) * sum
    } else {
        (divided_difference_1(mid, hi) - divided_difference_1(lo, mid)) / c(T::zero(), spread)
    }
}

/// `∫₀ᵗ e^{ips} ∫₀ˢ e^{iqs'} ds' ds`.
pub fn nested_phase_integral<T: Real>(p: T, q: T, t: T) -> Cplx<T> {
    divided_difference_2(T::zero(), p * t, (p + q) * t) * (t * t)
}

/// The 28 coefficients `f1..f8`, `g1..g6`, `h1..h8`, `l1..l6` at time `t`.
///
/// Indices are 1-based through the accessor methods, matching the usual
/// naming. `f6 = f5`, `f8 = −f7`, `g6 = −g5`, `h6 = −h5`, `h8 = −h7` and
/// `l6 = l5` hold exactly by construction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CoefficientSet<T: Real> {
    pub f: [Cplx<T>; 8],
    pub gc: [Cplx<T>; 6],
    pub h: [Cplx<T>; 8],
    pub l: [Cplx<T>; 6],
    pub t: T,
}

impl<T: Real> CoefficientSet<T> {
    /// `f_k`, 1-based.
    #[inline]
    pub fn f(&self, k: usize) -> Cplx<T> {
        self.f[k - 1]
    }

    /// `g_k`, 1-based.
    #[inline]
    pub fn g(&self, k: usize) -> Cplx<T> {
        self.gc[k - 1]
    }

    /// `h_k`, 1-based.
    #[inline]
    pub fn h(&self, k: usize) -> Cplx<T> {
        self.h[k - 1]
    }

    /// `l_k`, 1-based.
    #[inline]
    pub fn l(&self, k: usize) -> Cplx<T> {
        self.l[k - 1]
    }

    /// Column names for tabular dumps: `t`, then `re`/`im` of every
    /// coefficient in the order f, g, h, l.
    pub fn column_names() -> Vec<String> {
        let mut names = vec!["t".to_string()];
        for (prefix, count) in [("f", 8), ("g", 6), ("h", 8), ("l", 6)] {
            for k in 1..=count {
                names.push(format!("{prefix}{k}_re"));
                names.push(format!("{prefix}{k}_im"));
            }
        }
        names
    }

    /// Row of values matching [`CoefficientSet::column_names`].
    pub fn row(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(57);
        out.push(self.t.to_f64_lossy());
        for z in self.f.iter().chain(&self.gc).chain(&self.h).chain(&self.l) {
            out.push(z.re.to_f64_lossy());
            out.push(z.im.to_f64_lossy());
        }
        out
    }
}

/// Evaluates every coefficient at time `t`.
///
/// Coefficients of mode `x` carry the free phase `e^{−iω_x t}`; the bare
/// frequencies default to zero.
pub fn eval_coefficients<T: Real>(params: &RamanParams<T>, t: T) -> CoefficientSet<T> {
    let g = params.g;
    let chi = params.chi;
    let d1 = params.dw1;
    let d2 = params.dw2;
    let gchi = g * chi;
    let g2 = g * g;
    let chi2 = chi * chi;
    let mi = c(T::zero(), -T::one());
    let e = |x: T| first_integral(x, t);
    let k = |p: T, q: T| nested_phase_integral(p, q, t);
    let one = re(T::one());
    let zero = re(T::zero());

    let f5 = k(-d1, d1) * (-g2);
    let f7 = k(d2, -d2) * (-chi2);
    let f = [
        one,
        mi * e(-d1) * g,
        mi * e(d2) * chi,
        (k(d2, -d1) - k(-d1, d2)) * gchi,
        f5,
        f5,
        f7,
        -f7,
    ];

    let g5 = k(d1, -d1) * (-g2);
    let gc = [
        one,
        mi * e(d1) * g,
        k(d1, -d2) * gchi,
        k(d1, d2) * (-gchi),
        g5,
        -g5,
    ];

    let h5 = k(d1, -d1) * g2;
    let h7 = k(d2, -d2) * chi2;
    let h = [
        one,
        mi * e(d1) * g,
        mi * e(d2) * chi,
        (k(d2, d1) - k(d1, d2)) * gchi,
        h5,
        -h5,
        h7,
        -h7,
    ];

    let l5 = k(-d2, d2) * (-chi2);
    let l = [
        one,
        mi * e(-d2) * chi,
        k(-d2, d1) * (-gchi),
        k(-d2, -d1) * (-gchi),
        l5,
        l5,
    ];

    let mut set = CoefficientSet {
        f,
        gc,
        h,
        l,
        t,
    };
    if t == T::zero() {
        // Exact initial conditions regardless of rounding in the integrals.
        for z in set.f.iter_mut().chain(&mut set.gc).chain(&mut set.h).chain(&mut set.l) {
            *z = zero;
        }
        set.f[0] = one;
        set.gc[0] = one;
        set.h[0] = one;
        set.l[0] = one;
        return set;
    }
    if let Some([wa, wb, wc, wd]) = params.omega {
        let rotate = |w: T, zs: &mut [Cplx<T>]| {
            let ph = cis(-w * t);
            zs.iter_mut().for_each(|z| *z = *z * ph);
        };
        rotate(wa, &mut set.f);
        rotate(wb, &mut set.gc);
        rotate(wc, &mut set.h);
        rotate(wd, &mut set.l);
    }
    set
}

/// First moments `⟨a⟩, ⟨b⟩, ⟨c⟩, ⟨d⟩` implied by the second-order operator
/// solution acting on a coherent product state.
///
/// Each operator product is normal ordered before taking the expectation,
/// so `a b b†` contributes `α1(|α2|² + 1)`.
pub fn perturbative_first_moments<T: Real>(
    cs: &CoefficientSet<T>,
    amps: &CoherentAmplitudes<T>,
) -> [Cplx<T>; 4] {
    let [a1, a2, a3, a4] = amps.as_array();
    let (n1, n2, n3, n4) = (abs2(a1), abs2(a2), abs2(a3), abs2(a4));
    let one = T::one();
    let a = cs.f(1) * a1
        + cs.f(2) * a2 * a3
        + cs.f(3) * a3.conj() * a4
        + cs.f(4) * a1.conj() * a2 * a4
        + cs.f(5) * a1 * (n2 + one)
        + (cs.f(6) + cs.f(7)) * a1 * n3
        + cs.f(8) * a1 * n4;
    let b = cs.g(1) * a2
        + cs.g(2) * a1 * a3.conj()
        + cs.g(3) * a1 * a1 * a4.conj()
        + cs.g(4) * a3.conj() * a3.conj() * a4
        + cs.g(5) * a2 * (n3 + one)
        + cs.g(6) * a2 * (n1 + one);
    let cc = cs.h(1) * a3
        + cs.h(2) * a1 * a2.conj()
        + cs.h(3) * a1.conj() * a4
        + cs.h(4) * a2.conj() * a3.conj() * a4
        + cs.h(5) * a3 * (n1 + one)
        + cs.h(6) * a3 * (n2 + one)
        + cs.h(7) * a3 * n4
        + cs.h(8) * a3 * n1;
    let d = cs.l(1) * a4
        + cs.l(2) * a1 * a3
        + cs.l(3) * a1 * a1 * a2.conj()
        + cs.l(4) * a2 * a3 * a3
        + cs.l(5) * n3 * a4
        + cs.l(6) * (n1 + one) * a4;
    [a, b, cc, d]
}

/// Per-mode discrepancy between perturbative and reference first moments.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ResidualReport {
    pub t: f64,
    /// `|⟨x⟩_pert − ⟨x⟩_ref|` for `x = a, b, c, d`.
    pub residuals: [f64; 4],
    pub perturbative: [Cplx<f64>; 4],
    pub reference: [Cplx<f64>; 4],
}

impl ResidualReport {
    /// Largest of the four residuals.
    pub fn max(&self) -> f64 {
        self.residuals.iter().copied().fold(0.0, f64::max)
    }
}

/// Compares the perturbative first moments with externally supplied ones,
/// typically from the Fock-space oracle.
pub fn verify_order2_consistency(
    params: &RamanParams<f64>,
    amps: &CoherentAmplitudes<f64>,
    t: f64,
    oracle_moments: &MomentTable<f64>,
) -> Result<ResidualReport> {
    let mut reference = [Cplx::new(0.0, 0.0); 4];
    for mode in Mode::ALL {
        let key = MomentKey::annihilation(mode, 1);
        reference[mode.index()] = oracle_moments
            .get(&key)
            .ok_or_else(|| Error::IncompleteInput(format!("moment {key}")))?;
    }
    let cs = eval_coefficients(params, t);
    let perturbative = perturbative_first_moments(&cs, amps);
    let mut residuals = [0.0; 4];
    for k in 0..4 {
        residuals[k] = (perturbative[k] - reference[k]).norm();
    }
    Ok(ResidualReport {
        t,
        residuals,
        perturbative,
        reference,
    })
}
