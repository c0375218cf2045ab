//! Small numeric helpers: compensated summation, per-draw seed derivation,
//! norms, and full-precision float formatting.

use ndarray::{ArrayView1, ArrayView2};

/// Compensated accumulator (Kahan–Babuška / Neumaier variant, which also
/// survives terms larger than the running sum). Used wherever a sum feeds a
/// tolerance-sensitive comparison so that accumulation order cannot move the
/// result beyond ~1 ulp per term.
#[derive(Debug, Clone, Copy, Default)]
pub struct KahanSum {
    sum: f64,
    carry: f64,
}

impl KahanSum {
    #[must_use]
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    #[must_use]
    pub fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

/// Compensated sum of a slice.
#[must_use]
pub fn kahan_sum(xs: &[f64]) -> f64 {
    let mut acc = KahanSum::new();
    for &x in xs {
        acc.add(x);
    }
    acc.value()
}

/// Derives an independent 64-bit stream seed for draw `index` under a master
/// `seed` (the SplitMix64 output sequence). Every Monte-Carlo driver seeds
/// draw `i` with `derive_seed(seed, i)`, so results cannot depend on the
/// order in which draws are evaluated.
#[must_use]
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed.wrapping_add(index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Clamps a reported bound into [0, 1] for presentation; raw values are kept
/// unclipped everywhere else so formula regressions stay visible.
#[must_use]
pub fn clip_unit(x: f64) -> f64 {
    x.clamp(0.0, 1.0)
}

/// Euclidean norm with compensated accumulation.
#[must_use]
pub fn l2_norm(v: ArrayView1<'_, f64>) -> f64 {
    let mut acc = KahanSum::new();
    for &x in v {
        acc.add(x * x);
    }
    acc.value().sqrt()
}

/// Frobenius norm with compensated accumulation.
#[must_use]
pub fn frobenius_norm(a: ArrayView2<'_, f64>) -> f64 {
    let mut acc = KahanSum::new();
    for &x in a {
        acc.add(x * x);
    }
    acc.value().sqrt()
}

/// Formats a float with 17 significant digits (`d.dddddddddddddddde±e`),
/// enough for bit-exact round-trips through text.
#[must_use]
pub fn format_g17(x: f64) -> String {
    format!("{x:.16e}")
}
