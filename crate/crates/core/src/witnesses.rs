//! Closed-form entanglement witnesses and their moment-level definitions.
//!
//! All closed forms are second order in the couplings and are evaluated in
//! complex arithmetic. Conjugate-paired terms are added as `X + X̄` and the
//! imaginary part of the total is reported as `residual_imag` rather than
//! silently dropped.
//!
//! Notation inside this module: `A_k = |α_k|²`; `s = +1` for HZ-1 and
//! `s = −1` for HZ-2; `n` belongs to the first mode of the pair and `m` to
//! the second.

use serde::Serialize;

use crate::coefficients::CoefficientSet;
use crate::error::{Error, Result};
use crate::model::{CoherentAmplitudes, Criterion, Pair, WitnessSpec};
use crate::moments::{required_moments, MomentTable};
use crate::scalar::{abs2, re, Cplx, Real};

/// Result of one witness evaluation. Negative `value` witnesses
/// entanglement.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WitnessValue<T: Real> {
    pub spec: WitnessSpec,
    pub t: T,
    pub value: T,
    /// Magnitude of the imaginary part discarded when reporting `value`.
    pub residual_imag: T,
}

/// Relative bound on `residual_imag`; larger residues signal a bug.
pub const REALNESS_TOL: f64 = 1e-9;

impl<T: Real> WitnessValue<T> {
    fn from_complex(spec: WitnessSpec, t: T, z: Cplx<T>) -> Self {
        Self {
            spec,
            t,
            value: z.re,
            residual_imag: z.im.abs(),
        }
    }

    /// True when the discarded imaginary part is within [`REALNESS_TOL`].
    pub fn is_real(&self) -> bool {
        self.residual_imag < T::lit(REALNESS_TOL) * self.value.abs().max(T::one())
    }
}

/// `x^k` for `k ≥ 0` and zero for `k < 0`.
///
/// Negative powers only appear in the closed forms multiplied by a factor
/// such as `(n − 1)` that vanishes for exactly those orders.
#[inline]
fn pw<T: Real>(x: T, k: i64) -> T {
    if k < 0 {
        T::zero()
    } else {
        x.powi(k as i32)
    }
}

/// `X + X̄`.
#[inline]
fn plus_cc<T: Real>(x: Cplx<T>) -> Cplx<T> {
    x + x.conj()
}

/// `z z̄` kept complex so that it joins the imaginary-residue bookkeeping.
#[inline]
fn modsq<T: Real>(z: Cplx<T>) -> Cplx<T> {
    z * z.conj()
}

struct Inputs<T: Real> {
    a: [Cplx<T>; 4],
    p: [T; 4],
}

impl<T: Real> Inputs<T> {
    fn new(amps: &CoherentAmplitudes<T>) -> Self {
        let a = amps.as_array();
        Self {
            a,
            p: a.map(abs2),
        }
    }
}

/// Closed-form HZ-1 or HZ-2 witness of a mode pair.
pub fn pairwise_witness<T: Real>(
    spec: &WitnessSpec,
    cs: &CoefficientSet<T>,
    amps: &CoherentAmplitudes<T>,
) -> Result<WitnessValue<T>> {
    let pair = spec
        .pair()
        .ok_or_else(|| Error::spec(spec.to_string(), "not a pairwise witness"))?;
    let s = match spec.criterion() {
        Criterion::Hz1 => T::one(),
        _ => -T::one(),
    };
    let z = pairwise_complex(pair, s, spec.n(), spec.m(), cs, &Inputs::new(amps));
    Ok(WitnessValue::from_complex(*spec, cs.t, z))
}

fn pairwise_complex<T: Real>(
    pair: Pair,
    s: T,
    n: u32,
    m: u32,
    cs: &CoefficientSet<T>,
    x: &Inputs<T>,
) -> Cplx<T> {
    let [a1, a2, a3, a4] = x.a;
    let [p1, p2, p3, p4] = x.p;
    let (ni, mi) = (i64::from(n), i64::from(m));
    let (n, m) = (T::int(n), T::int(m));
    let one = T::one();
    let two = T::lit(2.0);
    let half = T::lit(0.5);
    let (nm1, mm1) = (n - one, m - one);
    match pair {
        Pair::Ab => {
            let t1 = m * (m * pw(p1, ni + 1) * pw(p2, mi - 1) - s * n * pw(p1, ni) * pw(p2, mi));
            let t2 = n * n * pw(p1, ni - 1) * pw(p2, mi) * p4;
            modsq(cs.f(2)) * t1 + modsq(cs.f(3)) * t2
        }
        Pair::Bc => {
            let (g1, g2, g4) = (cs.g(1), cs.g(2), cs.g(4));
            let (h1, h2, h3) = (cs.h(1), cs.h(2), cs.h(3));
            let brace = n * n * (one + two * s * m) * p1 * p3
                + m * m * (one + two * s * n) * p1 * p2
                + s * m * m * n * n * p1
                - s * m * n * p2 * p3;
            let tg = modsq(g2) * (pw(p2, ni - 1) * pw(p3, mi - 1) * brace);
            let th = modsq(h3) * (m * m * pw(p2, ni) * pw(p3, mi - 1) * p4);
            let nested = half * mm1 * nm1 * pw(p2, ni - 2) * pw(p3, mi - 2)
                + mm1 * pw(p2, ni - 1) * pw(p3, mi - 2)
                + nm1 * pw(p2, ni - 2) * pw(p3, mi - 1);
            let x = g1 * g2.conj() * (m * n * pw(p2, ni - 1) * pw(p3, mi - 1))
                * a1.conj() * a2 * a3
                + g1 * g1 * g2.conj() * g2.conj() * (m * n * nested)
                    * a1.conj().powu(2) * a2.powu(2) * a3.powu(2)
                + h2 * h3.conj() * (m * m * n * pw(p2, ni - 1) * pw(p3, mi - 1))
                    * a1.powu(2) * a2.conj() * a4.conj()
                + g1 * g4.conj()
                    * (m * n * pw(p2, ni - 1) * (two * pw(p3, mi - 1) + mm1 * pw(p3, mi - 2)))
                    * a2 * a3.powu(2) * a4.conj()
                + h1.conj() * h1.conj() * h2 * h3
                    * (m * n * mm1 * p1 * pw(p2, ni - 1) * pw(p3, mi - 2))
                    * a2.conj() * a3.conj().powu(2) * a4;
            tg + th + plus_cc(x) * s
        }
        Pair::Ac => {
            let (f1, f2, f3) = (cs.f(1), cs.f(2), cs.f(3));
            let (h1, h2, h3) = (cs.h(1), cs.h(2), cs.h(3));
            let tf2 = modsq(f2) * (m * pw(p1, ni) * pw(p3, mi - 1) * (m * p1 - s * n * p3));
            let brace = m * m * (one + two * s * n) * p1 * p4
                + n * n * (one + two * s * m) * p3 * p4
                - s * m * n * p1 * p3
                + s * m * m * n * n * p4;
            let tf3 = modsq(f3) * (pw(p1, ni - 1) * pw(p3, mi - 1) * brace);
            let nested = nm1 * pw(p1, ni - 2) * pw(p3, mi - 1)
                + mm1 * pw(p1, ni - 1) * pw(p3, mi - 2)
                + half * mm1 * nm1 * pw(p1, ni - 2) * pw(p3, mi - 2);
            let x = f1 * f3.conj() * (m * n * pw(p1, ni - 1) * pw(p3, mi - 1)) * a1 * a3 * a4.conj()
                + h2.conj() * h3 * (m * m * n * pw(p1, ni - 1) * pw(p3, mi - 1))
                    * a1.conj().powu(2) * a2 * a4
                + f2 * f3.conj() * (m * n * n * pw(p1, ni - 1) * pw(p3, mi - 1))
                    * a2 * a3.powu(2) * a4.conj()
                + f1.conj() * f1.conj() * f3 * f3 * (m * n * nested)
                    * a1.conj().powu(2) * a3.conj().powu(2) * a4.powu(2)
                + f1.conj() * f2 * h1.conj() * h3 * (m * n * nm1 * pw(p1, ni - 2) * pw(p3, mi))
                    * a1.conj().powu(2) * a2 * a4
                + f1 * f3.conj() * h1 * h2.conj() * (m * n * mm1 * pw(p1, ni) * pw(p3, mi - 2))
                    * a2 * a3.powu(2) * a4.conj();
            tf2 + tf3 + plus_cc(x) * s
        }
        Pair::Ad => modsq(cs.f(3)) * (n * pw(p1, ni - 1) * pw(p4, mi) * (n * p4 - s * m * p1)),
        Pair::Cd => {
            modsq(cs.h(2)) * (n * n * p1 * pw(p3, ni - 1) * pw(p4, mi))
                + modsq(cs.l(2)) * (pw(p3, ni - 1) * pw(p4, mi) * (n * n * p4 - s * m * n * p3))
        }
        Pair::Bd => {
            let x = cs.l(1).conj() * cs.l(3) * (m * n * pw(p2, ni - 1) * pw(p4, mi - 1))
                * a1.powu(2) * a2.conj() * a4.conj();
            modsq(cs.g(2)) * (n * n * p1 * pw(p2, ni - 1) * pw(p4, mi)) + plus_cc(x) * s
        }
    }
}

/// Three-mode witness `⟨N_a⟩⟨N_b⟩⟨N_c⟩ − |⟨abc⟩|²` to second order.
///
/// For `α2 = α3 = α4 = 0` it reduces to `−|f2|²|α1|⁴`.
pub fn three_mode_witness<T: Real>(
    cs: &CoefficientSet<T>,
    amps: &CoherentAmplitudes<T>,
) -> WitnessValue<T> {
    let Inputs {
        a: [a1, a2, a3, a4],
        p: [p1, p2, p3, p4],
    } = Inputs::new(amps);
    let one = T::one();
    let two = T::lit(2.0);
    let three = T::lit(3.0);
    let five = T::lit(5.0);
    let (f1, f2, f3) = (cs.f(1), cs.f(2), cs.f(3));
    let (g1, g2) = (cs.g(1), cs.g(2));
    let (h1, h2, h3, h4) = (cs.h(1), cs.h(2), cs.h(3), cs.h(4));
    let (l1, l2) = (cs.l(1), cs.l(2));

    let diag = modsq(f2) * (five * p1 * p2 * p3 - p1 * p1 * p3 - p1 * p1 - p1 * p1 * p2)
        + modsq(f3) * (p1 * p2 * p3 - p1 * p2 * p4 - p2 * p3 * p4 - p2 * p4);
    let y = h1 * h2.conj() * p1 * a1.conj() * a2 * a3
        + f1 * f3.conj() * p2 * a1 * a3 * a4.conj()
        + h2 * h3.conj() * (one + p1 + p2 + two * p3) * a1.powu(2) * a2.conj() * a4.conj()
        + (h1.conj() * h4 + g1.conj() * g2 * h1.conj() * h3 * three)
            * p1
            * a2.conj()
            * a3.conj().powu(2)
            * a4
        + h1 * h2.conj() * l1.conj() * l2 * p2 * a2 * a3.powu(2) * a4.conj()
        + f1 * f2.conj() * h1.conj() * h2 * a1.powu(2) * a2.conj().powu(2) * a3.conj().powu(2);
    WitnessValue::from_complex(WitnessSpec::three_mode(), cs.t, diag - plus_cc(y))
}

/// Four-mode witness `⟨N_a⟩⟨N_b⟩⟨N_c⟩⟨N_d⟩ − |⟨abcd⟩|²` to second order.
///
/// With `α2 = α3 = 0` it reduces to `−|f2|²|α1|⁴|α4|²`.
pub fn four_mode_witness<T: Real>(
    cs: &CoefficientSet<T>,
    amps: &CoherentAmplitudes<T>,
) -> WitnessValue<T> {
    let Inputs {
        a: [a1, a2, a3, a4],
        p: [p1, p2, p3, p4],
    } = Inputs::new(amps);
    let one = T::one();
    let two = T::lit(2.0);
    let three = T::lit(3.0);
    let five = T::lit(5.0);
    let (f1, f2, f3) = (cs.f(1), cs.f(2), cs.f(3));
    let (g1, g2) = (cs.g(1), cs.g(2));
    let (h1, h2, h3, h4) = (cs.h(1), cs.h(2), cs.h(3), cs.h(4));
    let (l1, l2, l3) = (cs.l(1), cs.l(2), cs.l(3));

    let all = p1 * p2 * p3 * p4;
    let diag = modsq(f2) * (five * all - p1 * p1 * p2 * p4 - p1 * p1 * p3 * p4 - p1 * p1 * p4)
        + modsq(f3) * (five * all - p1 * p2 * p4 * p4 - p2 * p3 * p4 * p4 - p2 * p4 * p4);
    let stokes_anti = h2 * h3.conj() * (p4 * (one + p1 + p2 + two * p3) - p1 * p3)
        + l1.conj() * l3 * (p1 * p3);
    let y = h1 * h2.conj() * (p1 * p4) * a1.conj() * a2 * a3
        + f1 * f3.conj() * (p2 * p4) * a1 * a3 * a4.conj()
        + stokes_anti * a1.powu(2) * a2.conj() * a4.conj()
        + (h1.conj() * h4 + g1.conj() * g2 * h1.conj() * h3 * three)
            * (p1 * p4)
            * a2.conj()
            * a3.conj().powu(2)
            * a4
        + h1 * h2.conj() * l1.conj() * l2 * (p1 * p1 + p2 * p4) * a2 * a3.powu(2) * a4.conj()
        + f1 * f2.conj() * h1.conj() * h2 * p4 * a1.powu(2) * a2.conj().powu(2) * a3.conj().powu(2)
        + f1 * f3.conj() * l1.conj() * l2 * p2 * a1.powu(2) * a3.powu(2) * a4.conj().powu(2);
    WitnessValue::from_complex(WitnessSpec::four_mode(), cs.t, diag - plus_cc(y))
}

/// Dispatches to the closed form matching `spec`.
pub fn closed_form_witness<T: Real>(
    spec: &WitnessSpec,
    cs: &CoefficientSet<T>,
    amps: &CoherentAmplitudes<T>,
) -> Result<WitnessValue<T>> {
    match spec.criterion() {
        Criterion::Hz1 | Criterion::Hz2 => pairwise_witness(spec, cs, amps),
        Criterion::ThreeMode => Ok(three_mode_witness(cs, amps)),
        Criterion::FourMode => Ok(four_mode_witness(cs, amps)),
    }
}

/// Evaluates the witness definition directly from moments at time `t`.
pub fn witness_from_moments<T: Real>(
    spec: &WitnessSpec,
    moments: &MomentTable<T>,
    t: T,
) -> Result<WitnessValue<T>> {
    let keys = required_moments(spec);
    let vals = keys
        .iter()
        .map(|k| {
            moments
                .get(k)
                .ok_or_else(|| Error::IncompleteInput(format!("moment {k} for {spec}")))
        })
        .collect::<Result<Vec<_>>>()?;
    let z = match spec.criterion() {
        Criterion::Hz1 => vals[0] - re(abs2(vals[1])),
        Criterion::Hz2 => vals[0] * vals[1] - re(abs2(vals[2])),
        Criterion::ThreeMode | Criterion::FourMode => {
            let (last, numbers) = vals.split_last().expect("nonempty moment list");
            numbers.iter().fold(re(T::one()), |acc, v| acc * *v) - re(abs2(*last))
        }
    };
    Ok(WitnessValue::from_complex(*spec, t, z))
}

/// Reduced three- and four-mode expressions that drop several
/// second-order terms, kept for comparison. They agree with the
/// second-order expansion only in special cases (for example the spontaneous limit of
/// the three-mode form); use [`three_mode_witness`] and
/// [`four_mode_witness`] for results.
pub mod reduced {
    use super::*;

    /// Reduced three-mode expression.
    pub fn three_mode<T: Real>(cs: &CoefficientSet<T>, amps: &CoherentAmplitudes<T>) -> WitnessValue<T> {
        let Inputs {
            a: [a1, a2, a3, a4],
            p: [p1, p2, p3, p4],
        } = Inputs::new(amps);
        let two = T::lit(2.0);
        let (f1, f2, f3) = (cs.f(1), cs.f(2), cs.f(3));
        let (h1, h2, h3) = (cs.h(1), cs.h(2), cs.h(3));
        let diag = modsq(f2) * (T::lit(5.0) * p1 * p2 * p3 - p1 * p1 * p3 - p1 * p1 - p1 * p1 * p2)
            + modsq(f3)
                * (p1 * p2 * p3 - T::lit(4.0) * p2 * p4 - T::lit(3.0) * p2 * p3 * p4
                    - T::lit(3.0) * p1 * p2 * p4);
        let y = h1 * h2.conj() * p1 * a1.conj() * a2 * a3
            + f1 * f3.conj() * (two * p2) * a1 * a3 * a4.conj()
            + h2 * h3.conj() * (two + p1 + two * p2) * a1.powu(2) * a2.conj() * a4.conj();
        WitnessValue::from_complex(WitnessSpec::three_mode(), cs.t, diag - plus_cc(y))
    }

    /// Reduced four-mode expression.
    pub fn four_mode<T: Real>(cs: &CoefficientSet<T>, amps: &CoherentAmplitudes<T>) -> WitnessValue<T> {
        let Inputs {
            a: [a1, a2, a3, a4],
            p: [p1, p2, p3, p4],
        } = Inputs::new(amps);
        let two = T::lit(2.0);
        let three = T::lit(3.0);
        let (f1, f2, f3) = (cs.f(1), cs.f(2), cs.f(3));
        let (g1, g2) = (cs.g(1), cs.g(2));
        let (h1, h2, h3, h4) = (cs.h(1), cs.h(2), cs.h(3), cs.h(4));
        let (l1, l2, l3) = (cs.l(1), cs.l(2), cs.l(3));
        let diag = modsq(f2) * (p1 * (T::lit(5.0) * p2 * p3 * p4 - p1 * p3 * p4 - p1 * p4))
            + modsq(f3)
                * (p2 * p4
                    * (T::lit(7.0) * p1 * p3 - T::lit(4.0) * p4 - three * p1 * p4 - three * p3 * p4));
        let y = h1.conj() * h2 * p1 * a1 * a2.conj() * a3.conj() * p4
            + f1.conj() * f3 * two * a1.conj() * p2 * a3.conj() * p4 * a4
            + f2 * f3.conj() * p2 * a2 * a3.powu(2) * a4.conj() * p4
            + (l1.conj() * l3 - h2 * h3.conj()) * p1 * a1.powu(2) * a2.conj() * p3 * a4.conj()
            + h2 * h3.conj()
                * (two * p4 + p1 * p4 + two * p2 * p4 + three * p3 * p4)
                * a1.powu(2)
                * a2.conj()
                * a4.conj()
            + f1 * f2.conj() * h1.conj() * h2 * a1.powu(2) * a2.conj().powu(2) * a3.conj().powu(2) * p4
            + h1.conj() * h2 * l1 * l2.conj() * (p1 * p1 + p2 * p4) * a2.conj() * a3.conj().powu(2) * a4
            + f1.conj() * f3 * l1 * l2.conj() * two * a1.conj().powu(2) * p2 * a3.conj().powu(2) * a4.powu(2)
            + (h1.conj() * h4 + g1.conj() * g2 * h1.conj() * h3 * three)
                * p1
                * a2.conj()
                * a3.conj().powu(2)
                * p4
                * a4;
        WitnessValue::from_complex(WitnessSpec::four_mode(), cs.t, diag - plus_cc(y))
    }
}
