//! Tetrahedral weights `T(alpha; x1, x2, x3 | x'1, x'2, x'3)` and the IRC
//! cube weight built from them.
//!
//! Two models are provided:
//!
//! * the meromorphic 3D index on the unit circle,
//!   `T = (q;q)^2 / (q^2;q^2) * prod_v G_q((-q)^{a_v/pi} x_{v-1} x'_{v-1} / (x_{v+1} x'_{v+1}))`;
//! * the KLV model on the real line,
//!   `T = prod_v Psi_b(x_{v+1} + x'_{v+1} - x_{v-1} - x'_{v-1} + i Q (1/2 - a_v/pi))`.
//!
//! Further models plug in through [`TetrahedralWeight`].

use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::quadrature::{ContourConfig, StateSpace};
use crate::shapes::{alpha_from_rho, AngleTriple, ShapeError};
use crate::specfun::{g_q, q_pochhammer, BParam, FaddeevDilog, QParam, SpecfunError, TruncationPolicy};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Tolerance for `|x| = 1` on the circle.
pub const STATE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum WeightError {
    #[error("factor {factor} of the weight failed: {source}")]
    Evaluation {
        factor: usize,
        #[source]
        source: SpecfunError,
    },
    #[error(transparent)]
    Shape(#[from] ShapeError),
    #[error("state {value} is not in the state space {space:?}")]
    StateOutside { value: Complex64, space: StateSpace },
    #[error("invalid model parameters: {0}")]
    Params(#[from] SpecfunError),
}

/// State variables on the six edges: `x[v]` on edge `0v`, `xp[v]` on the
/// opposite edge (`v = 1, 2, 3` stored at indices 0, 1, 2).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EdgeStates {
    pub x: [Complex64; 3],
    pub xp: [Complex64; 3],
}

impl EdgeStates {
    pub fn new(x: [Complex64; 3], xp: [Complex64; 3]) -> Self {
        EdgeStates { x, xp }
    }

    /// Every state set to `v`.
    pub fn uniform(v: Complex64) -> Self {
        EdgeStates { x: [v; 3], xp: [v; 3] }
    }

    pub fn check(&self, space: StateSpace) -> Result<(), WeightError> {
        for &v in self.x.iter().chain(&self.xp) {
            let ok = match space {
                StateSpace::UnitCircle => (v.norm() - 1.0).abs() <= STATE_TOL,
                StateSpace::RealLine => v.re.is_finite() && v.im == 0.0,
                StateSpace::UnitInterval => v.im == 0.0 && (0.0..=1.0).contains(&v.re),
            };
            if !ok {
                return Err(WeightError::StateOutside { value: v, space });
            }
        }
        Ok(())
    }

    pub fn conj(&self) -> Self {
        EdgeStates { x: self.x.map(|v| v.conj()), xp: self.xp.map(|v| v.conj()) }
    }

    /// `x <-> x'`.
    pub fn transposed(&self) -> Self {
        EdgeStates { x: self.xp, xp: self.x }
    }
}

/// The eight corner states of an IRC cube.
///
/// With the cube spanning `(l -+ 1/2, m -+ 1/2, n -+ 1/2)`:
/// `a = (-,-,-)`, `b = (+,-,-)`, `c = (-,+,-)`, `d = (-,-,+)`,
/// `e = (+,+,+)`, `f = (-,+,+)`, `g = (+,-,+)`, `h = (+,+,-)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IrcCorners {
    pub a: Complex64,
    pub b: Complex64,
    pub c: Complex64,
    pub d: Complex64,
    pub e: Complex64,
    pub f: Complex64,
    pub g: Complex64,
    pub h: Complex64,
}

impl IrcCorners {
    pub fn new(v: [Complex64; 8]) -> Self {
        let [a, b, c, d, e, f, g, h] = v;
        IrcCorners { a, b, c, d, e, f, g, h }
    }

    /// The tetrahedron slots read by the cube weight: `(f, a, h | b, e, d)`.
    pub fn slots(&self) -> EdgeStates {
        EdgeStates::new([self.f, self.a, self.h], [self.b, self.e, self.d])
    }
}

/// A tetrahedral weight `T: A x S^6 -> C`.
pub trait TetrahedralWeight: Send + Sync {
    fn state_space(&self) -> StateSpace;

    fn eval(&self, alpha: &AngleTriple, x: &EdgeStates) -> Result<Complex64, WeightError>;

    /// Short model label used in reports.
    fn label(&self) -> String;
}

/// Serialized model description, e.g. `{"model": "3dindex", "q": 0.3}` or
/// `{"model": "klv", "b": 1.0}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", deny_unknown_fields)]
pub enum ModelParams {
    #[serde(rename = "3dindex")]
    ThreeDIndex {
        #[serde(with = "q_json")]
        q: Complex64,
    },
    #[serde(rename = "klv")]
    Klv { b: f64 },
}

mod q_json {
    use num_complex::Complex64;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Serialize, Deserialize)]
    #[serde(untagged)]
    enum Q {
        Real(f64),
        Complex([f64; 2]),
    }

    pub fn serialize<S: Serializer>(q: &Complex64, s: S) -> Result<S::Ok, S::Error> {
        if q.im == 0.0 {
            Q::Real(q.re).serialize(s)
        } else {
            Q::Complex([q.re, q.im]).serialize(s)
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Complex64, D::Error> {
        Ok(match Q::deserialize(d)? {
            Q::Real(r) => Complex64::new(r, 0.0),
            Q::Complex([r, i]) => Complex64::new(r, i),
        })
    }
}

impl fmt::Display for ModelParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModelParams::ThreeDIndex { q } if q.im == 0.0 => write!(f, "3dindex(q={})", q.re),
            ModelParams::ThreeDIndex { q } => write!(f, "3dindex(q={q})"),
            ModelParams::Klv { b } => write!(f, "klv(b={b})"),
        }
    }
}

/// The meromorphic 3D index weight.
#[derive(Debug, Clone)]
pub struct ThreeDIndex {
    q: QParam,
    log_q: Complex64,
    prefactor: Complex64,
    policy: TruncationPolicy,
}

impl ThreeDIndex {
    pub fn new(q: QParam) -> Result<Self, WeightError> {
        Self::with_policy(q, TruncationPolicy::default())
    }

    pub fn with_policy(q: QParam, policy: TruncationPolicy) -> Result<Self, WeightError> {
        policy.validate()?;
        let qv = q.value();
        if qv.norm() == 0.0 {
            return Err(SpecfunError::InvalidQ(0.0).into());
        }
        let qq = q_pochhammer(qv, q, policy)?.value;
        let q2 = QParam::new(qv * qv)?;
        let q2q2 = q_pochhammer(qv * qv, q2, policy)?.value;
        Ok(ThreeDIndex { q, log_q: qv.ln(), prefactor: qq * qq / q2q2, policy })
    }

    pub fn q(&self) -> QParam {
        self.q
    }

    /// `(q;q)^2 / (q^2;q^2)`.
    pub fn prefactor(&self) -> Complex64 {
        self.prefactor
    }

    /// `(-q)^{a/pi} = exp((a/pi)(log q + i pi))`.
    pub fn minus_q_power(&self, a: f64) -> Complex64 {
        ((a / PI) * (self.log_q + I * PI)).exp()
    }

    /// The three arguments of `G_q`.
    pub fn g_arguments(&self, alpha: &AngleTriple, s: &EdgeStates) -> [Complex64; 3] {
        let a = alpha.as_array();
        let p = [s.x[0] * s.xp[0], s.x[1] * s.xp[1], s.x[2] * s.xp[2]];
        std::array::from_fn(|v| self.minus_q_power(a[v]) * p[(v + 2) % 3] / p[(v + 1) % 3])
    }
}

impl TetrahedralWeight for ThreeDIndex {
    fn state_space(&self) -> StateSpace {
        StateSpace::UnitCircle
    }

    fn eval(&self, alpha: &AngleTriple, x: &EdgeStates) -> Result<Complex64, WeightError> {
        let mut acc = self.prefactor;
        for (factor, z) in self.g_arguments(alpha, x).into_iter().enumerate() {
            acc *= g_q(z, self.q, self.policy).map_err(|source| WeightError::Evaluation { factor, source })?.value;
        }
        Ok(acc)
    }

    fn label(&self) -> String {
        ModelParams::ThreeDIndex { q: self.q.value() }.to_string()
    }
}

/// The Kashaev-Luo-Vartanov weight.
#[derive(Debug, Clone)]
pub struct Klv {
    dilog: FaddeevDilog,
}

impl Klv {
    pub fn new(b: BParam) -> Result<Self, WeightError> {
        Self::with_contour(b, ContourConfig::default())
    }

    pub fn with_contour(b: BParam, contour: ContourConfig) -> Result<Self, WeightError> {
        Ok(Klv { dilog: FaddeevDilog::new(b, contour)? })
    }

    pub fn b(&self) -> f64 {
        self.dilog.b()
    }

    pub fn dilog(&self) -> &FaddeevDilog {
        &self.dilog
    }

    /// The three arguments of `Psi_b`.
    pub fn psi_arguments(&self, alpha: &AngleTriple, s: &EdgeStates) -> [Complex64; 3] {
        let q_sum = 2.0 * self.dilog.strip_half_width();
        let a = alpha.as_array();
        let p = [s.x[0] + s.xp[0], s.x[1] + s.xp[1], s.x[2] + s.xp[2]];
        std::array::from_fn(|v| p[(v + 1) % 3] - p[(v + 2) % 3] + I * q_sum * (0.5 - a[v] / PI))
    }
}

impl TetrahedralWeight for Klv {
    fn state_space(&self) -> StateSpace {
        StateSpace::RealLine
    }

    fn eval(&self, alpha: &AngleTriple, x: &EdgeStates) -> Result<Complex64, WeightError> {
        let mut log = Complex64::new(0.0, 0.0);
        for (factor, z) in self.psi_arguments(alpha, x).into_iter().enumerate() {
            log += self.dilog.log_psi(z).map_err(|source| WeightError::Evaluation { factor, source })?;
        }
        Ok(log.exp())
    }

    fn label(&self) -> String {
        ModelParams::Klv { b: self.b() }.to_string()
    }
}

/// One of the in-scope models.
#[derive(Debug, Clone)]
pub enum TetWeight {
    ThreeDIndex(ThreeDIndex),
    Klv(Klv),
}

impl TetWeight {
    pub fn from_params(p: &ModelParams) -> Result<Self, WeightError> {
        Ok(match *p {
            ModelParams::ThreeDIndex { q } => TetWeight::ThreeDIndex(ThreeDIndex::new(QParam::new(q)?)?),
            ModelParams::Klv { b } => TetWeight::Klv(Klv::new(BParam::new(b)?)?),
        })
    }

    pub fn three_d_index(q: f64) -> Result<Self, WeightError> {
        Self::from_params(&ModelParams::ThreeDIndex { q: Complex64::new(q, 0.0) })
    }

    pub fn klv(b: f64) -> Result<Self, WeightError> {
        Self::from_params(&ModelParams::Klv { b })
    }

    pub fn params(&self) -> ModelParams {
        match self {
            TetWeight::ThreeDIndex(w) => ModelParams::ThreeDIndex { q: w.q().value() },
            TetWeight::Klv(w) => ModelParams::Klv { b: w.b() },
        }
    }

    fn inner(&self) -> &dyn TetrahedralWeight {
        match self {
            TetWeight::ThreeDIndex(w) => w,
            TetWeight::Klv(w) => w,
        }
    }
}

impl TetrahedralWeight for TetWeight {
    fn state_space(&self) -> StateSpace {
        self.inner().state_space()
    }

    fn eval(&self, alpha: &AngleTriple, x: &EdgeStates) -> Result<Complex64, WeightError> {
        self.inner().eval(alpha, x)
    }

    fn label(&self) -> String {
        self.inner().label()
    }
}

/// `T(alpha; x | x')` after checking the states lie in the model's space.
pub fn eval_t<W: TetrahedralWeight + ?Sized>(
    w: &W,
    alpha: &AngleTriple,
    x: &EdgeStates,
) -> Result<Complex64, WeightError> {
    x.check(w.state_space())?;
    w.eval(alpha, x)
}

/// The negative-tetrahedron weight, taken as `conj(T(alpha; conj x))`.
pub fn eval_t_bar<W: TetrahedralWeight + ?Sized>(
    w: &W,
    alpha: &AngleTriple,
    x: &EdgeStates,
) -> Result<Complex64, WeightError> {
    Ok(eval_t(w, alpha, &x.conj())?.conj())
}

/// `T(alpha; x' | x)`.
pub fn transpose_t<W: TetrahedralWeight + ?Sized>(
    w: &W,
    alpha: &AngleTriple,
    x: &EdgeStates,
) -> Result<Complex64, WeightError> {
    eval_t(w, alpha, &x.transposed())
}

/// `(x1, x2, x3 | x'1, x'2, x'3) -> (x1, x'2, x'3 | x'1, x2, x3)`.
pub fn rotate_z2(x: &EdgeStates) -> EdgeStates {
    EdgeStates::new([x.x[0], x.xp[1], x.xp[2]], [x.xp[0], x.x[1], x.x[2]])
}

/// Cyclic shift of angles and both state triples by one step.
pub fn rotate_z3(alpha: &AngleTriple, x: &EdgeStates) -> (AngleTriple, EdgeStates) {
    let r = |t: [Complex64; 3]| [t[1], t[2], t[0]];
    (alpha.rotated(), EdgeStates::new(r(x.x), r(x.xp)))
}

/// The cube weight `W_{rho_ij, rho_ik, rho_jk}(a, ..., h) = T(alpha(rho); f, a, h | b, e, d)`.
pub fn irc_weight<W: TetrahedralWeight + ?Sized>(
    w: &W,
    rho_ij: f64,
    rho_ik: f64,
    rho_jk: f64,
    c: &IrcCorners,
) -> Result<Complex64, WeightError> {
    let alpha = alpha_from_rho(rho_ij, rho_ik, rho_jk)?;
    eval_t(w, &alpha, &c.slots())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::{random_states, suite_rng};
    use crate::shapes::{alpha_spectral, rho_from_spectral, SpectralQuad};
    use rand::Rng;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn naive_pochhammer(z: Complex64, q: Complex64, n: usize) -> Complex64 {
        let mut acc = c(1.0);
        let mut qi = c(1.0);
        for _ in 0..n {
            acc *= 1.0 - qi * z;
            qi *= q;
        }
        acc
    }

    fn random_alpha<R: Rng>(rng: &mut R, margin: f64) -> AngleTriple {
        loop {
            let a1 = rng.gen_range(margin..PI - 2.0 * margin);
            let a3 = rng.gen_range(margin..PI - 2.0 * margin);
            if PI - a1 - a3 > margin {
                return AngleTriple::from_outer(a1, a3).unwrap();
            }
        }
    }

    fn models() -> Vec<TetWeight> {
        vec![TetWeight::three_d_index(0.3).unwrap(), TetWeight::klv(1.0).unwrap(), TetWeight::klv(0.8).unwrap()]
    }

    fn states<R: Rng>(rng: &mut R, w: &TetWeight) -> EdgeStates {
        let v: [Complex64; 6] = random_states(rng, w.state_space());
        EdgeStates::new([v[0], v[1], v[2]], [v[3], v[4], v[5]])
    }

    #[test]
    fn three_d_index_all_equal_states() {
        let TetWeight::ThreeDIndex(w) = TetWeight::three_d_index(0.3).unwrap() else { unreachable!() };
        let alpha = AngleTriple::from_outer(0.5, 0.6).unwrap();
        let got = eval_t(&w, &alpha, &EdgeStates::uniform(c(1.0))).unwrap();
        let q = QParam::new(0.3).unwrap();
        let mut want = w.prefactor();
        for a in alpha.as_array() {
            want *= g_q(w.minus_q_power(a), q, TruncationPolicy::default()).unwrap().value;
        }
        assert!((got - want).norm() < 1e-15 * want.norm());
    }

    #[test]
    fn three_d_index_matches_long_product_oracle() {
        let w = TetWeight::three_d_index(0.3).unwrap();
        let q = c(0.3);
        let alpha = AngleTriple::from_outer(0.5, 0.6).unwrap();
        let mut rng = suite_rng(0xA11CE);
        for _ in 0..10 {
            let s = states(&mut rng, &w);
            let got = eval_t(&w, &alpha, &s).unwrap();
            let pre = naive_pochhammer(q, q, 400).powi(2) / naive_pochhammer(q * q, q * q, 400);
            let mut want = pre;
            let a = alpha.as_array();
            let p: Vec<Complex64> = (0..3).map(|v| s.x[v] * s.xp[v]).collect();
            for v in 0..3 {
                let z = ((a[v] / PI) * (q.ln() + I * PI)).exp() * p[(v + 2) % 3] / p[(v + 1) % 3];
                want *= naive_pochhammer(-q / z, q, 400) / naive_pochhammer(z, q, 400);
            }
            assert!((got - want).norm() < 1e-11 * want.norm());
        }
    }

    #[test]
    fn klv_symmetric_point() {
        let TetWeight::Klv(w) = TetWeight::klv(1.0).unwrap() else { unreachable!() };
        let got = eval_t(&w, &AngleTriple::equilateral(), &EdgeStates::uniform(c(0.0))).unwrap();
        let psi = w.dilog().psi(I * 2.0 / 6.0).unwrap().value;
        assert!((got - psi * psi * psi).norm() < 1e-13 * got.norm());
    }

    #[test]
    fn conjugate_weight() {
        let mut rng = suite_rng(11);
        let alpha = AngleTriple::from_outer(0.7, 0.9).unwrap();
        let w = TetWeight::three_d_index(0.3).unwrap();
        for _ in 0..5 {
            // states at +-1 are their own conjugates
            let v: [f64; 6] = std::array::from_fn(|_| if rng.gen::<bool>() { 1.0 } else { -1.0 });
            let s = EdgeStates::new([c(v[0]), c(v[1]), c(v[2])], [c(v[3]), c(v[4]), c(v[5])]);
            let t = eval_t(&w, &alpha, &s).unwrap();
            let tb = eval_t_bar(&w, &alpha, &s).unwrap();
            assert!((tb - t.conj()).norm() < 1e-13 * t.norm());
        }
        // all-equal states: (-q)^{a/pi} is not real, so neither is T
        let one = EdgeStates::uniform(c(1.0));
        let t = eval_t(&w, &alpha, &one).unwrap();
        assert!(t.im.abs() > 1e-3 * t.norm());
        assert_eq!(eval_t_bar(&w, &alpha, &one).unwrap(), t.conj());

        let k = TetWeight::klv(1.0).unwrap();
        let zero = EdgeStates::uniform(c(0.0));
        let eq = AngleTriple::equilateral();
        let (t, tb) = (eval_t(&k, &eq, &zero).unwrap(), eval_t_bar(&k, &eq, &zero).unwrap());
        assert!((t.norm() - tb.norm()).abs() < 1e-15 * t.norm());
    }

    #[test]
    fn symmetries_hold_on_seeded_samples() {
        let mut rng = suite_rng(0xA11CE);
        for w in models() {
            for _ in 0..30 {
                let alpha = random_alpha(&mut rng, 0.05);
                let s = states(&mut rng, &w);
                let t = eval_t(&w, &alpha, &s).unwrap();
                let tol = 1e-12 * t.norm();
                assert!((eval_t(&w, &alpha, &rotate_z2(&s)).unwrap() - t).norm() < tol, "{} z2", w.label());
                let (a3, s3) = rotate_z3(&alpha, &s);
                assert!((eval_t(&w, &a3, &s3).unwrap() - t).norm() < tol, "{} z3", w.label());
                assert!((transpose_t(&w, &alpha, &s).unwrap() - t).norm() < tol, "{} transpose", w.label());
            }
        }
    }

    #[test]
    fn transforms_are_involutions() {
        let mut rng = suite_rng(3);
        let w = TetWeight::three_d_index(0.3).unwrap();
        let s = states(&mut rng, &w);
        assert_eq!(s.transposed().transposed(), s);
        assert_eq!(rotate_z2(&rotate_z2(&s)), s);
        let alpha = AngleTriple::from_outer(0.4, 1.1).unwrap();
        let (a, x) = rotate_z3(&alpha, &s);
        let (a, x) = rotate_z3(&a, &x);
        let (a, x) = rotate_z3(&a, &x);
        assert_eq!((a, x), (alpha, s));
        let once = transpose_t(&w, &alpha, &s).unwrap();
        assert_eq!(once, eval_t(&w, &alpha, &s.transposed()).unwrap());
        assert_eq!(transpose_t(&w, &alpha, &s.transposed()).unwrap(), eval_t(&w, &alpha, &s).unwrap());
    }

    #[test]
    fn analyticity_and_strip_guards() {
        let mut rng = suite_rng(5);
        let TetWeight::ThreeDIndex(w3) = TetWeight::three_d_index(0.3).unwrap() else { unreachable!() };
        let TetWeight::Klv(wk) = TetWeight::klv(1.3).unwrap() else { unreachable!() };
        let half = wk.dilog().strip_half_width();
        for _ in 0..100 {
            let alpha = random_alpha(&mut rng, 1e-3);
            let s: [Complex64; 6] = random_states(&mut rng, StateSpace::UnitCircle);
            let s = EdgeStates::new([s[0], s[1], s[2]], [s[3], s[4], s[5]]);
            for z in w3.g_arguments(&alpha, &s) {
                assert!(z.norm() < 1.0);
            }
            let s: [Complex64; 6] = random_states(&mut rng, StateSpace::RealLine);
            let s = EdgeStates::new([s[0], s[1], s[2]], [s[3], s[4], s[5]]);
            for z in wk.psi_arguments(&alpha, &s) {
                assert!(z.im.abs() < half);
            }
        }
    }

    #[test]
    fn pole_surfaces_with_factor_index() {
        let TetWeight::ThreeDIndex(w) = TetWeight::three_d_index(0.5).unwrap() else { unreachable!() };
        // a zero angle is outside A, so hit the pole directly through the trait
        let alpha = AngleTriple::from_outer(1e-14, 1.0).unwrap();
        let err = w.eval(&alpha, &EdgeStates::uniform(c(1.0))).unwrap_err();
        assert!(matches!(err, WeightError::Evaluation { factor: 0, source: SpecfunError::PoleHit { .. } }));
    }

    #[test]
    fn states_outside_space_are_rejected() {
        let w = TetWeight::three_d_index(0.3).unwrap();
        let alpha = AngleTriple::equilateral();
        assert!(matches!(eval_t(&w, &alpha, &EdgeStates::uniform(c(0.5))), Err(WeightError::StateOutside { .. })));
        let k = TetWeight::klv(1.0).unwrap();
        assert!(matches!(eval_t(&k, &alpha, &EdgeStates::uniform(I)), Err(WeightError::StateOutside { .. })));
    }

    #[test]
    fn irc_weight_slot_map() {
        let mut rng = suite_rng(9);
        let w = TetWeight::three_d_index(0.3).unwrap();
        let one = IrcCorners::new([c(1.0); 8]);
        let (ri, rj, rk) = (0.0, 0.4, 1.1);
        let alpha = alpha_from_rho(ri, rj, rk).unwrap();
        assert_eq!(
            irc_weight(&w, ri, rj, rk, &one).unwrap(),
            eval_t(&w, &alpha, &EdgeStates::uniform(c(1.0))).unwrap()
        );

        let v: [Complex64; 8] = random_states(&mut rng, StateSpace::UnitCircle);
        let corners = IrcCorners::new(v);
        let base = irc_weight(&w, ri, rj, rk, &corners).unwrap();
        let moved = IrcCorners { g: Complex64::from_polar(1.0, 2.2), c: Complex64::from_polar(1.0, -0.3), ..corners };
        assert_eq!(irc_weight(&w, ri, rj, rk, &moved).unwrap(), base);
        let direct = eval_t(&w, &alpha, &EdgeStates::new([v[5], v[0], v[7]], [v[1], v[4], v[3]])).unwrap();
        assert_eq!(base, direct);

        // spectral form
        let r = SpectralQuad::new(0.0, 0.3, 0.7, 1.5);
        let rho = rho_from_spectral(&r);
        let via_rho = irc_weight(&w, rho.rho12, rho.rho13, rho.rho23, &corners).unwrap();
        let via_r = eval_t(&w, &alpha_spectral(r.r1, r.r2, r.r3).unwrap(), &corners.slots()).unwrap();
        assert!((via_rho - via_r).norm() < 1e-13 * via_r.norm());
        assert!(matches!(irc_weight(&w, 0.0, 0.0, 0.0, &corners), Err(WeightError::Shape(_))));
    }

    #[test]
    fn model_json() {
        let p: ModelParams = serde_json::from_str(r#"{"model":"3dindex","q":0.3}"#).unwrap();
        assert_eq!(p, ModelParams::ThreeDIndex { q: c(0.3) });
        let p: ModelParams = serde_json::from_str(r#"{"model":"klv","b":1.0}"#).unwrap();
        assert_eq!(p, ModelParams::Klv { b: 1.0 });
        assert_eq!(serde_json::to_string(&p).unwrap(), r#"{"model":"klv","b":1.0}"#);
        assert!(serde_json::from_str::<ModelParams>(r#"{"model":"teichmuller","b":1.0}"#).is_err());
        assert!(TetWeight::from_params(&ModelParams::ThreeDIndex { q: c(1.2) }).is_err());
        assert!(TetWeight::from_params(&ModelParams::Klv { b: 7.0 }).is_err());
        assert_eq!(TetWeight::three_d_index(0.3).unwrap().label(), "3dindex(q=0.3)");
    }
}
