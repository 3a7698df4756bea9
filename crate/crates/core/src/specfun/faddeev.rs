//! Faddeev's quantum dilogarithm for real `b`,
//!
//! ```text
//! Phi_b(z) = exp( \int_{R + i0} e^{-2ixz} / (4 sinh(xb) sinh(x/b)) dx/x ),
//! ```
//!
//! on the strip `|Im z| < Q/2`, `Q = b + 1/b`. The contour runs along the
//! real axis with the triple pole at the origin bypassed by the upper
//! semicircle of radius `r0`. The two real rays are folded onto `[r0, X]`.
//!
//! Two exact relations keep the quadrature well conditioned:
//!
//! * for `|Re z|` beyond a cutoff, `Phi_b(z)` equals `1` (left) or
//!   `Phi_b(0)^2 e^{i pi z^2}` (right) up to `O(e^{-2 pi |Re z| / B})`,
//!   `B = max(b, 1/b)`;
//! * near the strip boundary the functional equation
//!   `Phi_b(z - iB/2) = (1 + e^{2 pi B z}) Phi_b(z + iB/2)` moves the
//!   argument to `|Im z| <= B/2`, where the integrand decays at least like
//!   `e^{-|x|/B}`.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::{BParam, Estimate, SpecfunError};
use crate::quadrature::{composite_gauss_legendre, ContourConfig};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Decay exponent required of the truncated tail, `e^{-TAIL_EXPONENT}`.
const TAIL_EXPONENT: f64 = 40.0;

/// `|Re z| / B` beyond which the asymptotic form is exact to double precision.
const ASYMPTOTIC_CUT: f64 = 6.5;

const SUPPORTED_B: (f64, f64) = (0.25, 4.0);

#[derive(Debug, Clone)]
struct ContourRule {
    /// Folded real rays: `(x, w / (x (1 - e^{-2bx}) (1 - e^{-2x/b})))`.
    ray: Vec<(f64, f64)>,
    /// Semicircle: `(x, -i w / (4 sinh(bx) sinh(x/b)))`.
    arc: Vec<(Complex64, Complex64)>,
    x_max: f64,
}

impl ContourRule {
    fn build(b: f64, r0: f64, x_max: f64, panels: usize, order: usize, arc_panels: usize) -> Self {
        let mut ray = Vec::new();
        // geometric panels on [r0, 1] resolve the 1/x^3 growth near the origin
        let graded = arc_panels / 2;
        let ratio = (1.0 / r0).powf(1.0 / graded as f64);
        let mut lo = r0;
        let push_panel = |a: f64, c: f64, ray: &mut Vec<(f64, f64)>| {
            let (x, w) = composite_gauss_legendre(a, c, 1, order);
            for (x, w) in x.into_iter().zip(w) {
                let denom = x * (-(2.0 * b * x)).exp_m1() * (-(2.0 * x / b)).exp_m1();
                ray.push((x, w / denom));
            }
        };
        for k in 0..graded {
            let hi = if k + 1 == graded { 1.0 } else { lo * ratio };
            push_panel(lo, hi, &mut ray);
            lo = hi;
        }
        let h = (x_max - 1.0) / panels as f64;
        for p in 0..panels {
            push_panel(1.0 + h * p as f64, 1.0 + h * (p + 1) as f64, &mut ray);
        }

        let (theta, wt) = composite_gauss_legendre(0.0, PI, arc_panels, order);
        let arc = theta
            .into_iter()
            .zip(wt)
            .map(|(t, w)| {
                let x = Complex64::from_polar(r0, t);
                let s = (x * b).sinh() * (x / b).sinh();
                (x, -I * w / (4.0 * s))
            })
            .collect();
        ContourRule { ray, arc, x_max }
    }

    /// `log Phi_b(z)` by direct quadrature; `z` must satisfy `|Im z| < Q/2`.
    fn log_phi(&self, z: Complex64, q_sum: f64) -> Complex64 {
        let (zr, zi) = (z.re, z.im);
        let mut acc = Complex64::new(0.0, 0.0);
        for &(x, coef) in &self.ray {
            // e^{-2ixz - Qx} - e^{2ixz - Qx}
            let a = (x * (2.0 * zi - q_sum)).exp();
            let bb = (-x * (2.0 * zi + q_sum)).exp();
            let (s, c) = (2.0 * x * zr).sin_cos();
            acc += Complex64::new((a - bb) * c, -(a + bb) * s) * coef;
        }
        for &(x, coef) in &self.arc {
            acc += (-2.0 * I * x * z).exp() * coef;
        }
        acc
    }

    fn tail_bound(&self, im: f64, q_sum: f64) -> f64 {
        let rate = q_sum - 2.0 * im.abs();
        (-rate * self.x_max).exp() / (rate * self.x_max)
    }
}

/// Evaluator for `Phi_b` / `Psi_b` at fixed `b` with a precomputed contour rule.
///
/// Construction does all the node work; evaluation is read-only, so a shared
/// reference can be used from any number of threads.
#[derive(Debug, Clone)]
pub struct FaddeevDilog {
    b: f64,
    big_b: f64,
    q_sum: f64,
    fine: ContourRule,
    coarse: ContourRule,
    log_phi0: Complex64,
    config: ContourConfig,
}

impl FaddeevDilog {
    pub fn new(b: BParam, config: ContourConfig) -> Result<Self, SpecfunError> {
        config.validate()?;
        let bv = b.value();
        if !(SUPPORTED_B.0..=SUPPORTED_B.1).contains(&bv) {
            return Err(SpecfunError::UnsupportedB(bv));
        }
        let big_b = bv.max(1.0 / bv);
        let x_max = config.x_max.unwrap_or(TAIL_EXPONENT * big_b);
        let panels = if config.panels == 0 {
            // panel width ~ 1/(2B) keeps a few nodes per oscillation up to the cutoff
            ((2.0 * big_b * (x_max - 1.0)).ceil() as usize).max(2)
        } else {
            config.panels
        };
        let arc_panels = 8;
        let fine = ContourRule::build(bv, config.r0, x_max, panels, config.order, arc_panels);
        let coarse = ContourRule::build(bv, config.r0, x_max, panels.div_ceil(2), config.order, arc_panels / 2);
        let mut this = FaddeevDilog {
            b: bv,
            big_b,
            q_sum: b.q_sum(),
            fine,
            coarse,
            log_phi0: Complex64::new(0.0, 0.0),
            config: ContourConfig { x_max: Some(x_max), panels, ..config },
        };
        this.log_phi0 = this.fine.log_phi(Complex64::new(0.0, 0.0), this.q_sum);
        Ok(this)
    }

    /// Default contour for `b`.
    pub fn with_b(b: f64) -> Result<Self, SpecfunError> {
        Self::new(BParam::new(b)?, ContourConfig::default())
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    /// `(b + 1/b) / 2`, the half-width of the strip.
    pub fn strip_half_width(&self) -> f64 {
        0.5 * self.q_sum
    }

    /// The resolved contour (adaptive `X` and panel count filled in).
    pub fn config(&self) -> ContourConfig {
        self.config
    }

    /// The same evaluator with every panel count doubled.
    pub fn doubled(&self) -> Result<Self, SpecfunError> {
        let cfg = self.config.doubled(self.config.panels);
        Self::new(BParam(self.b), cfg)
    }

    /// `log Phi_b(0)`, computed numerically at construction.
    pub fn log_phi0(&self) -> Complex64 {
        self.log_phi0
    }

    fn check_strip(&self, z: Complex64) -> Result<(), SpecfunError> {
        let half = self.strip_half_width();
        if !(z.im.abs() < half) || !z.re.is_finite() {
            return Err(SpecfunError::OutOfStrip { im: z.im, half_width: half });
        }
        Ok(())
    }

    fn log_phi_with(&self, rule: &ContourRule, z: Complex64) -> Result<Complex64, SpecfunError> {
        self.check_strip(z)?;
        let cut = ASYMPTOTIC_CUT * self.big_b;
        if z.re < -cut {
            return Ok(Complex64::new(0.0, 0.0));
        }
        if z.re > cut {
            return Ok(2.0 * self.log_phi0 + I * PI * z * z);
        }
        let big_b = self.big_b;
        let (w, correction) = if z.im > 0.5 * big_b {
            // Phi(z) = Phi(z - iB) / (1 + e^{2 pi B (z - iB/2)})
            (z - I * big_b, -log1p_exp(2.0 * PI * big_b * (z - 0.5 * I * big_b)))
        } else if z.im < -0.5 * big_b {
            // Phi(z) = Phi(z + iB) (1 + e^{2 pi B (z + iB/2)})
            (z + I * big_b, log1p_exp(2.0 * PI * big_b * (z + 0.5 * I * big_b)))
        } else {
            (z, Complex64::new(0.0, 0.0))
        };
        let tail = rule.tail_bound(w.im, self.q_sum);
        if tail > 1e-15 {
            return Err(SpecfunError::QuadratureFailure { tail });
        }
        Ok(rule.log_phi(w, self.q_sum) + correction)
    }

    /// `log Phi_b(z)` (branch unspecified; only its exponential is meaningful).
    pub fn log_phi(&self, z: Complex64) -> Result<Complex64, SpecfunError> {
        self.log_phi_with(&self.fine, z)
    }

    /// `Phi_b(z)` with a half-resolution error estimate.
    pub fn phi(&self, z: Complex64) -> Result<Estimate, SpecfunError> {
        let fine = self.log_phi_with(&self.fine, z)?.exp();
        let coarse = self.log_phi_with(&self.coarse, z)?.exp();
        let err = (fine - coarse).norm() + self.asymptotic_error(z) * fine.norm();
        Ok(Estimate { value: fine, err })
    }

    fn asymptotic_error(&self, z: Complex64) -> f64 {
        let cut = ASYMPTOTIC_CUT * self.big_b;
        if z.re.abs() > cut {
            (-2.0 * PI * z.re.abs() / self.big_b).exp() * (1.0 + 2.0 * PI * z.norm())
        } else {
            0.0
        }
    }

    /// `log Psi_b(x) = -i pi x^2 / 2 + log Phi_b(x) - log Phi_b(0)`.
    pub fn log_psi(&self, x: Complex64) -> Result<Complex64, SpecfunError> {
        Ok(-0.5 * I * PI * x * x + self.log_phi(x)? - self.log_phi0)
    }

    /// `Psi_b(x)` without error estimate; the fast path used by the weights.
    pub fn psi_value(&self, x: Complex64) -> Result<Complex64, SpecfunError> {
        Ok(self.log_psi(x)?.exp())
    }

    /// `Psi_b(x) = e^{-i pi x^2 / 2} Phi_b(x) / Phi_b(0)` with error estimate.
    pub fn psi(&self, x: Complex64) -> Result<Estimate, SpecfunError> {
        let phi = self.phi(x)?;
        let scale = (-0.5 * I * PI * x * x - self.log_phi0).exp();
        Ok(Estimate { value: phi.value * scale, err: phi.err * scale.norm() })
    }
}

/// `log(1 + e^u)` without overflow.
fn log1p_exp(u: Complex64) -> Complex64 {
    if u.re > 0.0 {
        u + (1.0 + (-u).exp()).ln()
    } else {
        (1.0 + u.exp()).ln()
    }
}

/// `Phi_b(z)` on the contour described by `quad`.
///
/// Builds a fresh [`FaddeevDilog`]; hold on to one instead when evaluating
/// repeatedly.
pub fn phi_b(z: Complex64, b: BParam, quad: ContourConfig) -> Result<Estimate, SpecfunError> {
    FaddeevDilog::new(b, quad)?.phi(z)
}

/// `Psi_b(x)`; see [`phi_b`].
pub fn psi_b(x: Complex64, b: BParam, quad: ContourConfig) -> Result<Estimate, SpecfunError> {
    FaddeevDilog::new(b, quad)?.psi(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn dilog(b: f64) -> FaddeevDilog {
        FaddeevDilog::with_b(b).unwrap()
    }

    #[test]
    fn b_inversion_symmetry() {
        let z = c(0.2, 0.0);
        let a = dilog(1.3).phi(z).unwrap().value;
        let b = dilog(1.0 / 1.3).phi(z).unwrap().value;
        assert!((a - b).norm() < 1e-12, "{a} vs {b}");
        for z in [c(0.7, 0.3), c(-1.5, -0.6), c(3.0, 0.8)] {
            let a = dilog(1.3).phi(z).unwrap().value;
            let b = dilog(1.0 / 1.3).phi(z).unwrap().value;
            assert!((a - b).norm() < 1e-10, "z = {z}: {a} vs {b}");
        }
    }

    #[test]
    fn phi_at_zero_matches_closed_form() {
        // Phi_b(0) = exp(i pi (b^2 + b^-2) / 24), used only as an oracle here
        for b in [0.5, 0.8, 1.0, 1.3, 2.0] {
            let got = dilog(b).phi(c(0.0, 0.0)).unwrap().value;
            let want = (I * PI * (b * b + 1.0 / (b * b)) / 24.0).exp();
            assert!((got - want).norm() < 1e-13, "b = {b}: {got} vs {want}");
        }
    }

    #[test]
    fn real_arguments_are_unimodular() {
        let f = dilog(0.8);
        for x in [-4.0, -1.1, 0.3, 2.5, 5.0] {
            assert!((f.phi(c(x, 0.0)).unwrap().value.norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn self_convergence_under_doubling() {
        let f = dilog(1.0);
        let g = f.doubled().unwrap();
        let a = f.phi(c(0.25, 0.0)).unwrap();
        let b = g.phi(c(0.25, 0.0)).unwrap();
        assert!((a.value - b.value).norm() < 1e-10);
        let f = dilog(0.9);
        let g = f.doubled().unwrap();
        let z = c(0.5, 0.2);
        let a = f.psi(z).unwrap();
        let b = g.psi(z).unwrap();
        assert!((a.value - b.value).norm() < 1e-10);
    }

    #[test]
    fn doubling_change_is_within_reported_error() {
        for b in [0.8, 1.0, 1.3] {
            let f = dilog(b);
            let g = f.doubled().unwrap();
            for z in [c(0.1, 0.0), c(-2.0, 0.5), c(1.5, -0.7), c(4.0, 0.2)] {
                let a = f.phi(z).unwrap();
                let d = (a.value - g.phi(z).unwrap().value).norm();
                assert!(d < 10.0 * a.err.max(1e-15), "b = {b}, z = {z}: delta {d:e} vs err {:e}", a.err);
            }
        }
    }

    #[test]
    fn phi_reflection_modulus() {
        // Phi(z) Phi(-z) e^{-i pi z^2} is constant in z
        let f = dilog(1.0);
        let r = |z: f64| {
            let z = c(z, 0.0);
            f.phi(z).unwrap().value * f.phi(-z).unwrap().value * (-I * PI * z * z).exp()
        };
        let base = r(0.1);
        for z in [0.2, 0.3] {
            assert!((r(z) - base).norm() < 1e-10);
        }
    }

    #[test]
    fn psi_inversion() {
        let f = dilog(1.0);
        assert!((f.psi(c(0.0, 0.0)).unwrap().value - 1.0).norm() < 1e-15);
        let x = c(0.7, 0.0);
        let p = f.psi(x).unwrap().value * f.psi(-x).unwrap().value;
        assert!((p - 1.0).norm() < 1e-10);
    }

    #[test]
    fn functional_equation() {
        for b in [0.8, 1.0, 1.3] {
            let f = dilog(b);
            let w = c(0.2, 0.1);
            // only arguments whose shifts stay inside the strip
            for shift in [b, 1.0 / b] {
                if 0.1 + shift / 2.0 >= f.strip_half_width() {
                    continue;
                }
                let lhs = f.phi(w - 0.5 * I * shift).unwrap().value;
                let rhs = (1.0 + (2.0 * PI * shift * w).exp()) * f.phi(w + 0.5 * I * shift).unwrap().value;
                assert!((lhs - rhs).norm() < 1e-11 * lhs.norm(), "b = {b}, shift {shift}");
            }
        }
    }

    #[test]
    fn asymptotic_form_matches_quadrature_past_the_cut() {
        for b in [0.8, 1.0, 1.3] {
            let f = dilog(b);
            let cut = ASYMPTOTIC_CUT * f.big_b;
            for im in [-0.4, 0.0, 0.3] {
                for side in [-1.0, 1.0] {
                    let z = c(side * (cut + 1e-6), im);
                    let a = f.log_phi(z).unwrap().exp();
                    let direct = f.fine.log_phi(z, f.q_sum).exp();
                    let rel = (a - direct).norm() / a.norm();
                    assert!(rel < 1e-12, "b = {b}, side {side}, im {im}: {rel:e}");
                }
            }
        }
    }

    #[test]
    fn near_boundary_arguments_agree_with_unreduced_integral() {
        // Im z = 0.9 (Q/2 = 1): with X = 200 the raw integral still converges
        let f = dilog(1.0);
        let raw = FaddeevDilog::new(
            BParam::new(1.0).unwrap(),
            ContourConfig { x_max: Some(200.0), panels: 800, ..Default::default() },
        )
        .unwrap();
        let z = c(0.3, 0.9);
        let direct = raw.fine.log_phi(z, raw.q_sum).exp();
        let reduced = f.phi(z).unwrap().value;
        assert!((direct - reduced).norm() < 1e-10 * direct.norm(), "{direct} vs {reduced}");
    }

    #[test]
    fn strip_and_parameter_checks() {
        let f = dilog(1.0);
        assert!(matches!(f.phi(c(0.0, 1.0)), Err(SpecfunError::OutOfStrip { .. })));
        assert!(matches!(f.phi(c(0.0, -1.2)), Err(SpecfunError::OutOfStrip { .. })));
        assert!(matches!(FaddeevDilog::with_b(5.0), Err(SpecfunError::UnsupportedB(_))));
        assert!(matches!(FaddeevDilog::with_b(-1.0), Err(SpecfunError::InvalidB(_))));
        let short =
            FaddeevDilog::new(BParam::new(1.0).unwrap(), ContourConfig { x_max: Some(3.0), ..Default::default() })
                .unwrap();
        assert!(matches!(short.phi(c(0.0, 0.4)), Err(SpecfunError::QuadratureFailure { .. })));
    }

    #[test]
    fn free_functions_match_evaluator() {
        let b = BParam::new(1.3).unwrap();
        let z = c(0.4, -0.2);
        let a = phi_b(z, b, ContourConfig::default()).unwrap().value;
        assert_eq!(a, dilog(1.3).phi(z).unwrap().value);
        let p = psi_b(z, b, ContourConfig::default()).unwrap().value;
        assert!((p - dilog(1.3).psi_value(z).unwrap()).norm() < 1e-15);
    }
}
