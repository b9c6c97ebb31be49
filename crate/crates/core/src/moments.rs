//! Normal-ordered moment keys and tables.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use crate::model::{Criterion, Mode, WitnessSpec};
use crate::scalar::{Cplx, Real};

/// The normal-ordered product `Π_x (x†)^{p_x} x^{q_x}` over the four modes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct MomentKey {
    /// `(creation power, annihilation power)` for modes `a, b, c, d`.
    pub powers: [(u32, u32); 4],
}

impl MomentKey {
    /// The identity operator.
    pub const IDENTITY: MomentKey = MomentKey {
        powers: [(0, 0); 4],
    };

    /// Builds a key from per-mode powers.
    pub fn new(powers: [(u32, u32); 4]) -> Self {
        Self { powers }
    }

    /// `x^q` on a single mode.
    pub fn annihilation(mode: Mode, q: u32) -> Self {
        Self::IDENTITY.with(mode, 0, q)
    }

    /// `(x†)^n x^n` on a single mode.
    pub fn number_power(mode: Mode, n: u32) -> Self {
        Self::IDENTITY.with(mode, n, n)
    }

    /// Returns a copy with the powers of `mode` replaced.
    pub fn with(mut self, mode: Mode, p: u32, q: u32) -> Self {
        self.powers[mode.index()] = (p, q);
        self
    }

    /// Adds powers on `mode` (products of distinct modes commute, so this
    /// keeps the key normal ordered).
    pub fn times(mut self, mode: Mode, p: u32, q: u32) -> Self {
        let slot = &mut self.powers[mode.index()];
        slot.0 += p;
        slot.1 += q;
        self
    }
}

impl fmt::Display for MomentKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        for mode in Mode::ALL {
            let (p, q) = self.powers[mode.index()];
            let x = mode.label();
            match p {
                0 => {}
                1 => parts.push(format!("{x}†")),
                _ => parts.push(format!("{x}†^{p}")),
            }
            match q {
                0 => {}
                1 => parts.push(format!("{x}")),
                _ => parts.push(format!("{x}^{q}")),
            }
        }
        if parts.is_empty() {
            write!(f, "⟨1⟩")
        } else {
            write!(f, "⟨{}⟩", parts.join(" "))
        }
    }
}

/// Moments a witness definition needs, in a fixed order.
///
/// HZ-1 on `(i, j)`: `⟨i†ⁿiⁿ j†ᵐjᵐ⟩`, `⟨iⁿ j†ᵐ⟩`.
/// HZ-2 on `(i, j)`: `⟨i†ⁿiⁿ⟩`, `⟨j†ᵐjᵐ⟩`, `⟨iⁿ jᵐ⟩`.
/// Multi-mode: one `⟨N_x⟩` per mode, then `⟨Π x⟩`.
pub fn required_moments(spec: &WitnessSpec) -> Vec<MomentKey> {
    let modes = spec.modes();
    let (n, m) = (spec.n(), spec.m());
    match spec.criterion() {
        Criterion::Hz1 => {
            let (i, j) = (modes[0], modes[1]);
            vec![
                MomentKey::number_power(i, n).with(j, m, m),
                MomentKey::annihilation(i, n).with(j, m, 0),
            ]
        }
        Criterion::Hz2 => {
            let (i, j) = (modes[0], modes[1]);
            vec![
                MomentKey::number_power(i, n),
                MomentKey::number_power(j, m),
                MomentKey::annihilation(i, n).with(j, 0, m),
            ]
        }
        Criterion::ThreeMode | Criterion::FourMode => {
            let mut keys: Vec<MomentKey> =
                modes.iter().map(|&x| MomentKey::number_power(x, 1)).collect();
            let product = modes
                .iter()
                .fold(MomentKey::IDENTITY, |k, &x| k.times(x, 0, 1));
            keys.push(product);
            keys
        }
    }
}

/// Map from normal-ordered products to their expectation values.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct MomentTable<T: Real> {
    entries: BTreeMap<MomentKey, Cplx<T>>,
}

impl<T: Real> MomentTable<T> {
    pub fn new() -> Self {
        Self {
            entries: BTreeMap::new(),
        }
    }

    pub fn insert(&mut self, key: MomentKey, value: Cplx<T>) {
        self.entries.insert(key, value);
    }

    pub fn get(&self, key: &MomentKey) -> Option<Cplx<T>> {
        self.entries.get(key).copied()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&MomentKey, &Cplx<T>)> {
        self.entries.iter()
    }

    /// Table of a coherent product state, where every normal-ordered moment
    /// factorizes into `Π α_x*^{p_x} α_x^{q_x}`.
    pub fn coherent(alpha: [Cplx<T>; 4], keys: &[MomentKey]) -> Self {
        let mut table = Self::new();
        for key in keys {
            let mut v = Cplx::new(T::one(), T::zero());
            for (x, &(p, q)) in key.powers.iter().enumerate() {
                v = v * alpha[x].conj().powu(p) * alpha[x].powu(q);
            }
            table.insert(*key, v);
        }
        table
    }
}

impl<T: Real> FromIterator<(MomentKey, Cplx<T>)> for MomentTable<T> {
    fn from_iter<I: IntoIterator<Item = (MomentKey, Cplx<T>)>>(iter: I) -> Self {
        Self {
            entries: iter.into_iter().collect(),
        }
    }
}
