//! Numerical checks of the shaped pentagon identity and of the tetrahedron
//! equation for the cube weight `W_{rho_ij, rho_ik, rho_jk}`.

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};
use serde_json::json;
use thiserror::Error;

use crate::quadrature::{Grid, GridMeta, Integral, LineTruncation, QuadratureError, StateSpace};
use crate::sampling::{random_state, random_states, suite_rng};
use crate::shapes::{
    alpha_from_rho, in_domain_d, rho_pentagon_angles, rho_regularized, AngleTriple, PentagonAngles, RhoSix, ShapeError,
    SpectralQuad,
};
use crate::weights::{
    eval_t, eval_t_bar, transpose_t, EdgeStates, ModelParams, TetWeight, TetrahedralWeight, WeightError,
};

/// Instances whose two sides both fall below this are resampled.
pub const UNDERFLOW: f64 = 1e-300;

/// Redraws allowed per instance before giving up on a degenerate suite.
const MAX_REDRAWS: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Lhs,
    Rhs,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum IdentityError {
    #[error("{side:?} factor {factor}: {source}")]
    Weight {
        side: Side,
        factor: usize,
        #[source]
        source: WeightError,
    },
    #[error(transparent)]
    Shape(#[from] ShapeError),
    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
    #[error("grid on {grid:?} cannot integrate a model on {model:?}")]
    GridMismatch { grid: StateSpace, model: StateSpace },
    #[error("regularization needs eps > delta > 0 (eps = {eps}, delta = {delta})")]
    BadRegularization { eps: f64, delta: f64 },
    #[error("{0} consecutive degenerate instances (both sides below 1e-300)")]
    Degenerate(usize),
}

/// How integrals over the state space are discretized.
#[derive(Debug, Clone, PartialEq)]
pub enum Quadrature {
    Fixed(Grid),
    /// Real-line grid whose half-width is chosen from the integrand's decay.
    AdaptiveLine(LineTruncation),
}

impl From<Grid> for Quadrature {
    fn from(g: Grid) -> Self {
        Quadrature::Fixed(g)
    }
}

impl Quadrature {
    /// `Fixed` for a given grid, `AdaptiveLine` with default settings otherwise.
    pub fn for_model(w: &TetWeight, circle_nodes: usize) -> Result<Self, QuadratureError> {
        Ok(match w.state_space() {
            StateSpace::UnitCircle => Quadrature::Fixed(crate::quadrature::circle_grid(circle_nodes)?),
            _ => Quadrature::AdaptiveLine(LineTruncation::default()),
        })
    }
}

/// Outcome of one identity check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualReport {
    pub identity: String,
    pub model: ModelParams,
    pub lhs: Complex64,
    pub rhs: Complex64,
    /// Quadrature error estimates of the two sides (0 for closed forms,
    /// infinite when no estimate is available).
    #[serde(with = "unbounded")]
    pub lhs_err: f64,
    #[serde(with = "unbounded")]
    pub rhs_err: f64,
    pub abs_residual: f64,
    pub rel_residual: f64,
    pub grid: GridMeta,
    pub seed: Option<u64>,
    /// Everything else needed to rerun the instance.
    pub params: serde_json::Value,
}

impl ResidualReport {
    #[allow(clippy::too_many_arguments)]
    fn new(
        identity: &str,
        model: ModelParams,
        lhs: Integral,
        rhs: Integral,
        grid: GridMeta,
        params: serde_json::Value,
    ) -> Self {
        let abs_residual = (lhs.value - rhs.value).norm();
        let scale = lhs.value.norm() + rhs.value.norm();
        let rel_residual = if abs_residual == 0.0 { 0.0 } else { abs_residual / scale };
        ResidualReport {
            identity: identity.to_string(),
            model,
            lhs: lhs.value,
            rhs: rhs.value,
            lhs_err: lhs.err_est,
            rhs_err: rhs.err_est,
            abs_residual,
            rel_residual,
            grid,
            seed: None,
            params,
        }
    }

    fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    fn degenerate(&self) -> bool {
        self.lhs.norm() < UNDERFLOW && self.rhs.norm() < UNDERFLOW
    }

    /// First 16 hex digits of the SHA-256 of the model and instance record.
    pub fn param_digest(&self) -> String {
        crate::report::digest(&json!({ "identity": self.identity, "model": self.model, "params": self.params }))
    }
}

/// Infinite values as JSON `null`.
mod unbounded {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_finite() {
            s.serialize_f64(*v)
        } else {
            s.serialize_none()
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::INFINITY))
    }
}

fn closed(value: Complex64) -> Integral {
    Integral { value, err_est: 0.0 }
}

/// Integrates `N` integrands on a common grid. Each integrand is sampled once
/// per node; adaptive line grids accept `X` only when every integrand has
/// decayed at both ends.
fn integrate_many<const N: usize, F>(
    quad: &Quadrature,
    space: StateSpace,
    mut f: F,
) -> Result<([Integral; N], GridMeta), IdentityError>
where
    F: FnMut(Complex64) -> Result<[Complex64; N], IdentityError>,
{
    let sample = |g: &Grid, f: &mut F| g.nodes().iter().map(|&x| f(x)).collect::<Result<Vec<_>, _>>();
    let (grid, samples) = match quad {
        Quadrature::Fixed(g) => {
            if g.kind() != space {
                return Err(IdentityError::GridMismatch { grid: g.kind(), model: space });
            }
            (g.clone(), sample(g, &mut f)?)
        }
        Quadrature::AdaptiveLine(t) => {
            if space != StateSpace::RealLine {
                return Err(IdentityError::GridMismatch { grid: StateSpace::RealLine, model: space });
            }
            let mut last = Vec::new();
            let grid = t.select(|g| {
                let s = sample(g, &mut f)?;
                let mut peak = [0.0_f64; N];
                for row in &s {
                    for (p, v) in peak.iter_mut().zip(row) {
                        *p = p.max(v.norm());
                    }
                }
                let mags = s
                    .iter()
                    .map(|row| {
                        row.iter()
                            .zip(&peak)
                            .map(|(v, p)| if *p > 0.0 { v.norm() / p } else { 0.0 })
                            .fold(0.0, f64::max)
                    })
                    .collect();
                last = s;
                Ok::<_, IdentityError>(mags)
            })?;
            (grid, last)
        }
    };
    let sum = |g: &Grid, s: &[[Complex64; N]]| -> [Complex64; N] {
        let mut acc = [Complex64::new(0.0, 0.0); N];
        for (row, w) in s.iter().zip(g.weights()) {
            for (a, v) in acc.iter_mut().zip(row) {
                *a += v * w;
            }
        }
        acc
    };
    let fine = sum(&grid, &samples);
    let coarse: Option<[Complex64; N]> = match grid.meta() {
        GridMeta::Circle { nodes } if nodes >= 4 && nodes % 2 == 0 => {
            let half: Vec<_> = samples.iter().step_by(2).copied().collect();
            let mut acc = [Complex64::new(0.0, 0.0); N];
            for row in &half {
                for (a, v) in acc.iter_mut().zip(row) {
                    *a += v;
                }
            }
            Some(acc.map(|a| a / half.len() as f64))
        }
        _ => match grid.coarsened() {
            Some(c) => Some(sum(&c, &sample(&c, &mut f)?)),
            None => None,
        },
    };
    let out = std::array::from_fn(|i| Integral {
        value: fine[i],
        err_est: coarse.map_or(f64::INFINITY, |c| (fine[i] - c[i]).norm()),
    });
    Ok((out, grid.meta()))
}

// ---------------------------------------------------------------------------
// Pentagon

/// The nine external states of a 2-3 move (`x13` is integrated).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PentagonExternals {
    pub x01: Complex64,
    pub x02: Complex64,
    pub x03: Complex64,
    pub x04: Complex64,
    pub x12: Complex64,
    pub x14: Complex64,
    pub x23: Complex64,
    pub x24: Complex64,
    pub x34: Complex64,
}

impl PentagonExternals {
    pub fn random<R: Rng>(rng: &mut R, space: StateSpace) -> Self {
        let [x01, x02, x03, x04, x12, x14, x23, x24, x34] = random_states(rng, space);
        PentagonExternals { x01, x02, x03, x04, x12, x14, x23, x24, x34 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PentagonInstance {
    pub angles: PentagonAngles,
    pub externals: PentagonExternals,
    /// Coefficient on the right-hand side.
    pub c: Complex64,
}

/// Which weight enters the pentagon.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PentagonVariant {
    Standard,
    /// Every `T` replaced by its transpose.
    Transpose,
    /// Every `T` replaced by the negative-tetrahedron weight.
    Negative,
}

impl PentagonVariant {
    fn name(self) -> &'static str {
        match self {
            PentagonVariant::Standard => "pentagon",
            PentagonVariant::Transpose => "pentagon-transpose",
            PentagonVariant::Negative => "pentagon-negative",
        }
    }
}

fn pentagon_raw(
    w: &TetWeight,
    angles: &[AngleTriple; 5],
    e: &PentagonExternals,
    c: Complex64,
    quad: &Quadrature,
    variant: PentagonVariant,
) -> Result<ResidualReport, IdentityError> {
    let t = |side: Side, factor: usize, alpha: &AngleTriple, x: [Complex64; 3], xp: [Complex64; 3]| {
        let s = EdgeStates::new(x, xp);
        match variant {
            PentagonVariant::Standard => eval_t(w, alpha, &s),
            PentagonVariant::Transpose => transpose_t(w, alpha, &s),
            PentagonVariant::Negative => eval_t_bar(w, alpha, &s),
        }
        .map_err(|source| IdentityError::Weight { side, factor, source })
    };
    let [a0, a1, a2, a3, a4] = angles;
    let lhs = t(Side::Lhs, 0, a1, [e.x02, e.x03, e.x04], [e.x34, e.x24, e.x23])?
        * t(Side::Lhs, 1, a3, [e.x01, e.x02, e.x04], [e.x24, e.x14, e.x12])?;
    let ([rhs], grid) = integrate_many(quad, w.state_space(), |x13| {
        let v = t(Side::Rhs, 0, a0, [e.x12, x13, e.x14], [e.x34, e.x24, e.x23])?
            * t(Side::Rhs, 1, a2, [e.x01, e.x03, e.x04], [e.x34, e.x14, x13])?
            * t(Side::Rhs, 2, a4, [e.x01, e.x02, e.x03], [e.x23, x13, e.x12])?;
        Ok([v])
    })?;
    let rhs = Integral { value: c * rhs.value, err_est: c.norm() * rhs.err_est };
    let params = json!({ "angles": angles, "externals": e, "c": c, "variant": variant });
    Ok(ResidualReport::new(variant.name(), w.params(), closed(lhs), rhs, grid, params))
}

/// The shaped pentagon identity
/// `T(a1; x02,x03,x04 | x34,x24,x23) T(a3; x01,x02,x04 | x24,x14,x12)
///  = C int dmu(x13) T(a0; x12,x13,x14 | x34,x24,x23) T(a2; x01,x03,x04 | x34,x14,x13) T(a4; x01,x02,x03 | x23,x13,x12)`.
pub fn verify_pentagon(
    w: &TetWeight,
    inst: &PentagonInstance,
    quad: &Quadrature,
    variant: PentagonVariant,
) -> Result<ResidualReport, IdentityError> {
    pentagon_raw(w, &inst.angles.as_array(), &inst.externals, inst.c, quad, variant)
}

/// [`verify_pentagon`] with every weight transposed.
pub fn verify_pentagon_transpose(
    w: &TetWeight,
    inst: &PentagonInstance,
    quad: &Quadrature,
) -> Result<ResidualReport, IdentityError> {
    verify_pentagon(w, inst, quad, PentagonVariant::Transpose)
}

/// `n` seeded pentagon instances with `C = 1`; externals are redrawn when
/// both sides underflow.
pub fn pentagon_suite(
    w: &TetWeight,
    angles: &PentagonAngles,
    quad: &Quadrature,
    variant: PentagonVariant,
    n: usize,
    seed: u64,
) -> Result<Vec<ResidualReport>, IdentityError> {
    let mut rng = suite_rng(seed);
    let mut out = Vec::with_capacity(n);
    for _ in 0..n {
        let mut redraws = 0;
        loop {
            let externals = PentagonExternals::random(&mut rng, w.state_space());
            let inst = PentagonInstance { angles: *angles, externals, c: Complex64::new(1.0, 0.0) };
            let r = verify_pentagon(w, &inst, quad, variant)?;
            if !r.degenerate() {
                out.push(r.with_seed(seed));
                break;
            }
            redraws += 1;
            if redraws > MAX_REDRAWS {
                return Err(IdentityError::Degenerate(redraws));
            }
        }
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Tetrahedron equation

/// External corner states `a1..a4`, `b1..b4`, `c1..c6` (stored zero-based).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Te6Externals {
    pub a: [Complex64; 4],
    pub b: [Complex64; 4],
    pub c: [Complex64; 6],
}

impl Te6Externals {
    pub fn random<R: Rng>(rng: &mut R, space: StateSpace) -> Self {
        Te6Externals { a: random_states(rng, space), b: random_states(rng, space), c: random_states(rng, space) }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Te6Instance {
    pub rho: RhoSix,
    pub externals: Te6Externals,
}

/// The angles `alpha(rho)` of the four cube weights, keyed by
/// `(12,13,23)`, `(12,14,24)`, `(13,14,34)`, `(23,24,34)`.
fn cube_angles(rho: &RhoSix) -> Result<[AngleTriple; 4], ShapeError> {
    let r = rho;
    Ok([
        alpha_from_rho(r.rho12, r.rho13, r.rho23)?,
        alpha_from_rho(r.rho12, r.rho14, r.rho24)?,
        alpha_from_rho(r.rho13, r.rho14, r.rho34)?,
        alpha_from_rho(r.rho23, r.rho24, r.rho34)?,
    ])
}

/// `W(a, b, c, d, e, f, g, h) = T(alpha; f, a, h | b, e, d)`.
fn cube(
    w: &TetWeight,
    side: Side,
    factor: usize,
    alpha: &AngleTriple,
    [a, b, _c, d, e, f, _g, h]: [Complex64; 8],
) -> Result<Complex64, IdentityError> {
    eval_t(w, alpha, &EdgeStates::new([f, a, h], [b, e, d])).map_err(|source| IdentityError::Weight {
        side,
        factor,
        source,
    })
}

/// Both sides of the six-parameter tetrahedron equation, with the LHS weights
/// built from `rho_lhs` and the RHS weights from `rho_rhs`.
fn te6_raw(
    w: &TetWeight,
    rho_lhs: &RhoSix,
    rho_rhs: &RhoSix,
    x: &Te6Externals,
    quad: &Quadrature,
) -> Result<(Integral, Integral, GridMeta), IdentityError> {
    let [l123, l124, l134, l234] = cube_angles(rho_lhs)?;
    let [r123, r124, r134, r234] = cube_angles(rho_rhs)?;
    let [a1, a2, a3, a4] = x.a;
    let [b1, b2, b3, b4] = x.b;
    let [c1, c2, c3, c4, c5, c6] = x.c;
    let ([lhs, rhs], grid) = integrate_many(quad, w.state_space(), |d| {
        let l = cube(w, Side::Lhs, 0, &l123, [a4, c2, c3, c1, d, b1, b2, b3])?
            * cube(w, Side::Lhs, 1, &l124, [c1, b2, b1, a3, b4, c4, c6, d])?
            * cube(w, Side::Lhs, 2, &l134, [b1, d, c3, c4, c5, a2, b4, b3])?
            * cube(w, Side::Lhs, 3, &l234, [d, b2, b3, b4, a1, c5, c6, c2])?;
        let r = cube(w, Side::Rhs, 0, &r234, [b1, c1, c3, c4, d, a2, a3, a4])?
            * cube(w, Side::Rhs, 1, &r134, [c1, b2, a4, a3, a1, d, c6, c2])?
            * cube(w, Side::Rhs, 2, &r124, [a4, c2, c3, d, c5, a2, a1, b3])?
            * cube(w, Side::Rhs, 3, &r123, [d, a1, a2, a3, b4, c4, c6, c5])?;
        Ok([l, r])
    })?;
    Ok((lhs, rhs, grid))
}

/// The six-parameter tetrahedron equation for
/// `W_{rho_ij, rho_ik, rho_jk}(a..h) = T(alpha(rho_ij, rho_ik, rho_jk); f, a, h | b, e, d)`.
pub fn verify_te6(w: &TetWeight, inst: &Te6Instance, quad: &Quadrature) -> Result<ResidualReport, IdentityError> {
    if !in_domain_d(&inst.rho) {
        return Err(ShapeError::NotInDomain.into());
    }
    let (lhs, rhs, grid) = te6_raw(w, &inst.rho, &inst.rho, &inst.externals, quad)?;
    let params = json!({ "rho": inst.rho, "externals": inst.externals });
    Ok(ResidualReport::new("te6", w.params(), lhs, rhs, grid, params))
}

/// `n` seeded external configurations at fixed `rho`.
pub fn te6_suite(
    w: &TetWeight,
    rho: &RhoSix,
    quad: &Quadrature,
    n: usize,
    seed: u64,
) -> Result<Vec<ResidualReport>, IdentityError> {
    let mut rng = suite_rng(seed);
    let mut out = Vec::with_capacity(n);
    for _ in 0..n {
        let mut redraws = 0;
        loop {
            let inst = Te6Instance { rho: *rho, externals: Te6Externals::random(&mut rng, w.state_space()) };
            let r = verify_te6(w, &inst, quad)?;
            if !r.degenerate() {
                out.push(r.with_seed(seed));
                break;
            }
            redraws += 1;
            if redraws > MAX_REDRAWS {
                return Err(IdentityError::Degenerate(redraws));
            }
        }
    }
    Ok(out)
}

/// Cross-check through the intermediate double integral obtained by one
/// pentagon move on the left-hand side,
///
/// ```text
/// int dmu(d) T(a2; c4,c1,d | b2,b4,a3) T(a4; c5,d,c2 | b2,a1,b4)
///   * C int dmu(e) T(a0; c4,e,c5 | c2,d,c1) T(a2; a2,a4,b3 | c2,c5,e) T(a4; a2,b1,a4 | c1,e,c4),
/// ```
///
/// evaluated as a tensor-product sum on `grid`. Returns the double integral
/// against the left side and against the right side of the equation.
pub fn verify_te6_intermediate(
    w: &TetWeight,
    inst: &Te6Instance,
    grid: &Grid,
) -> Result<(ResidualReport, ResidualReport), IdentityError> {
    let p = rho_pentagon_angles(&inst.rho)?;
    if grid.kind() != w.state_space() {
        return Err(IdentityError::GridMismatch { grid: grid.kind(), model: w.state_space() });
    }
    let [a1, a2, a3, _] = inst.externals.a;
    let [b1, b2, b3, b4] = inst.externals.b;
    let [c1, c2, c4, c5] = [inst.externals.c[0], inst.externals.c[1], inst.externals.c[3], inst.externals.c[4]];
    let a4 = inst.externals.a[3];
    let t = |factor: usize, alpha: &AngleTriple, x: [Complex64; 3], xp: [Complex64; 3]| {
        eval_t(w, alpha, &EdgeStates::new(x, xp)).map_err(|source| IdentityError::Weight {
            side: Side::Lhs,
            factor,
            source,
        })
    };
    let nodes = grid.nodes();
    let outer: Vec<Complex64> = nodes
        .iter()
        .map(|&d| Ok(t(0, &p.alpha2, [c4, c1, d], [b2, b4, a3])? * t(1, &p.alpha4, [c5, d, c2], [b2, a1, b4])?))
        .collect::<Result<_, IdentityError>>()?;
    let inner: Vec<Complex64> = nodes
        .iter()
        .map(|&e| Ok(t(3, &p.alpha2, [a2, a4, b3], [c2, c5, e])? * t(4, &p.alpha4, [a2, b1, a4], [c1, e, c4])?))
        .collect::<Result<_, IdentityError>>()?;
    let mut total = Complex64::new(0.0, 0.0);
    for ((&d, &wd), od) in nodes.iter().zip(grid.weights()).zip(&outer) {
        let mut acc = Complex64::new(0.0, 0.0);
        for ((&e, &we), ie) in nodes.iter().zip(grid.weights()).zip(&inner) {
            acc += t(2, &p.alpha0, [c4, e, c5], [c2, d, c1])? * ie * we;
        }
        total += acc * od * wd;
    }
    let quad = Quadrature::Fixed(grid.clone());
    let (lhs, rhs, meta) = te6_raw(w, &inst.rho, &inst.rho, &inst.externals, &quad)?;
    let middle = Integral { value: total, err_est: f64::INFINITY };
    let params = json!({ "rho": inst.rho, "externals": inst.externals });
    Ok((
        ResidualReport::new("te6-intermediate-lhs", w.params(), lhs, middle, meta, params.clone()),
        ResidualReport::new("te6-intermediate-rhs", w.params(), middle, rhs, meta, params),
    ))
}

/// The tetrahedron equation for four spectral parameters, through the
/// regularized parameters `rho12 = r1 + r2 - eps`, `rho13 = r1 + r3 - delta`.
pub fn verify_te4(
    w: &TetWeight,
    r: &SpectralQuad,
    externals: &Te6Externals,
    quad: &Quadrature,
    eps: f64,
    delta: f64,
) -> Result<ResidualReport, IdentityError> {
    if !(eps > delta && delta > 0.0) {
        return Err(IdentityError::BadRegularization { eps, delta });
    }
    if !r.is_ordered(eps) {
        return Err(ShapeError::OrderingViolated { eps }.into());
    }
    let rho = rho_regularized(r, eps, delta);
    let mut report = verify_te6(w, &Te6Instance { rho, externals: *externals }, quad)?;
    report.identity = "te4".into();
    report.params = json!({ "r": r, "eps": eps, "delta": delta, "rho": rho, "externals": externals });
    Ok(report)
}

/// One point of the flat-limit sweep: the worst residual over the suite.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub eps: f64,
    pub delta: f64,
    pub max_rel_residual: f64,
}

/// `verify_te4` along `eps = 2 delta` for each `delta`, with `n` seeded
/// external configurations shared by every point.
pub fn sweep_eps(
    w: &TetWeight,
    r: &SpectralQuad,
    quad: &Quadrature,
    deltas: &[f64],
    n: usize,
    seed: u64,
) -> Result<(Vec<SweepPoint>, Vec<ResidualReport>), IdentityError> {
    let mut rng = suite_rng(seed);
    let externals: Vec<Te6Externals> = (0..n).map(|_| Te6Externals::random(&mut rng, w.state_space())).collect();
    let mut points = Vec::new();
    let mut reports = Vec::new();
    for &delta in deltas {
        let eps = 2.0 * delta;
        let mut worst = 0.0_f64;
        for x in &externals {
            let rep = verify_te4(w, r, x, quad, eps, delta)?.with_seed(seed);
            worst = worst.max(rep.rel_residual);
            reports.push(rep);
        }
        points.push(SweepPoint { eps, delta, max_rel_residual: worst });
    }
    Ok((points, reports))
}

/// `true` when the residuals grow at every step and end at least tenfold
/// above where they started (and above the rounding floor).
pub fn blows_up(points: &[SweepPoint]) -> bool {
    let r: Vec<f64> = points.iter().map(|p| p.max_rel_residual).collect();
    if r.len() < 2 {
        return false;
    }
    let increasing = r.windows(2).all(|w| w[1] > w[0]);
    let last = r[r.len() - 1];
    increasing && last >= 10.0 * r[0] && last >= 1e-12
}

// ---------------------------------------------------------------------------
// Falsification

/// A single angle of a pentagon quintuple: triple `0..5`, outer entry 1 or 3.
/// The middle entry absorbs the shift so the triple still sums to pi.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AngleSlot {
    pub triple: usize,
    pub entry: usize,
}

/// What to knock off the compatibility manifold.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Probe {
    Pentagon {
        instance: PentagonInstance,
        slot: AngleSlot,
    },
    /// `rho_index` into `[rho12, rho13, rho14, rho23, rho24, rho34]`; the
    /// shifted value enters the left-hand weights only.
    Te6 {
        instance: Te6Instance,
        rho_index: usize,
    },
}

fn detuned_triple(t: &AngleTriple, entry: usize, p: f64) -> Result<AngleTriple, ShapeError> {
    match entry {
        1 => AngleTriple::from_outer(t.a1() + p, t.a3()),
        3 => AngleTriple::from_outer(t.a1(), t.a3() + p),
        _ => Err(ShapeError::Incompatible(format!("angle entry {entry} is not an outer entry"))),
    }
}

/// Reruns a check with one parameter shifted by `perturbation` (or by its
/// negative if the positive shift leaves `A`). A zero shift reproduces the
/// on-manifold report.
pub fn falsification_probe(
    w: &TetWeight,
    probe: &Probe,
    quad: &Quadrature,
    perturbation: f64,
) -> Result<ResidualReport, IdentityError> {
    match probe {
        Probe::Pentagon { instance, slot } => {
            let mut angles = instance.angles.as_array();
            let t = angles
                .get(slot.triple)
                .ok_or_else(|| ShapeError::Incompatible(format!("pentagon has no triple {}", slot.triple)))?;
            angles[slot.triple] = detuned_triple(t, slot.entry, perturbation)
                .or_else(|_| detuned_triple(t, slot.entry, -perturbation))?;
            let mut r = pentagon_raw(w, &angles, &instance.externals, instance.c, quad, PentagonVariant::Standard)?;
            r.identity = "pentagon-detuned".into();
            r.params["slot"] = json!(slot);
            r.params["perturbation"] = json!(perturbation);
            Ok(r)
        }
        Probe::Te6 { instance, rho_index } => {
            if !in_domain_d(&instance.rho) {
                return Err(ShapeError::NotInDomain.into());
            }
            let shifted = |p: f64| {
                let mut v = instance.rho.as_array();
                v[*rho_index] += p;
                let rho = RhoSix::new(v);
                cube_angles(&rho).map(|_| rho)
            };
            if *rho_index >= 6 {
                return Err(ShapeError::Incompatible(format!("no rho parameter {rho_index}")).into());
            }
            let rho_lhs = shifted(perturbation).or_else(|_| shifted(-perturbation))?;
            let (lhs, rhs, grid) = te6_raw(w, &rho_lhs, &instance.rho, &instance.externals, quad)?;
            let params = json!({
                "rho": instance.rho,
                "rho_lhs": rho_lhs,
                "externals": instance.externals,
                "perturbation": perturbation,
            });
            Ok(ResidualReport::new("te6-detuned", w.params(), lhs, rhs, grid, params))
        }
    }
}

/// A random pentagon instance (for probes and examples).
pub fn random_pentagon_instance<R: Rng>(rng: &mut R, w: &TetWeight, angles: PentagonAngles) -> PentagonInstance {
    PentagonInstance { angles, externals: PentagonExternals::random(rng, w.state_space()), c: Complex64::new(1.0, 0.0) }
}

/// A random state from the model's space.
pub fn random_model_state<R: Rng>(rng: &mut R, w: &TetWeight) -> Complex64 {
    random_state(rng, w.state_space())
}
