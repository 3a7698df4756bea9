//! Seeded random inputs for the verification suites.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::quadrature::StateSpace;

/// Default seed of every suite.
pub const DEFAULT_SEED: u64 = 0xA11CE;

pub type SuiteRng = ChaCha8Rng;

pub fn suite_rng(seed: u64) -> SuiteRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `e^{2 pi i u}` on the circle, `U[-1, 1]` on the line, `U[0, 1]` on the interval.
pub fn random_state<R: Rng>(rng: &mut R, kind: StateSpace) -> Complex64 {
    match kind {
        StateSpace::UnitCircle => Complex64::from_polar(1.0, 2.0 * PI * rng.gen::<f64>()),
        StateSpace::RealLine => Complex64::new(rng.gen_range(-1.0..=1.0), 0.0),
        StateSpace::UnitInterval => Complex64::new(rng.gen::<f64>(), 0.0),
    }
}

pub fn random_states<R: Rng, const N: usize>(rng: &mut R, kind: StateSpace) -> [Complex64; N] {
    std::array::from_fn(|_| random_state(rng, kind))
}
