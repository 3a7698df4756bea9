//! Fixed inputs shared by the benchmarks.

use num_complex::Complex64;
use tetraweight::identities::{PentagonExternals, PentagonInstance};
use tetraweight::sampling::suite_rng;
use tetraweight::shapes::reference_pentagon_angles;
use tetraweight::weights::{EdgeStates, TetWeight};
use tetraweight::{AngleTriple, StateSpace, TetrahedralWeight};

pub fn angles() -> AngleTriple {
    AngleTriple::from_outer(0.7, 0.9).expect("valid triple")
}

/// Generic edge states for `w`: unit-modulus phases or small reals.
pub fn states(w: &TetWeight) -> EdgeStates {
    match w.state_space() {
        StateSpace::UnitCircle => {
            let p = |t: f64| Complex64::from_polar(1.0, t);
            EdgeStates::new([p(0.3), p(1.1), p(-2.0)], [p(2.5), p(-0.7), p(0.9)])
        }
        _ => {
            let r = |x: f64| Complex64::new(x, 0.0);
            EdgeStates::new([r(0.3), r(-0.4), r(0.1)], [r(0.2), r(-0.15), r(0.5)])
        }
    }
}

pub fn pentagon_instance(w: &TetWeight) -> PentagonInstance {
    let mut rng = suite_rng(1);
    PentagonInstance {
        angles: reference_pentagon_angles(),
        externals: PentagonExternals::random(&mut rng, w.state_space()),
        c: Complex64::new(1.0, 0.0),
    }
}
