//! Dihedral angles and the parameter maps that produce them.
//!
//! An [`AngleTriple`] is a point of the shape domain
//! `A = {(a1, a2, a3) : a_i > 0, a1 + a2 + a3 = pi}`. The middle entry is
//! always stored as `pi - a1 - a3`, so the sum is exact up to one rounding.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Absolute tolerance for angle relations.
pub const ANGLE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ShapeError {
    #[error("angles ({0}, {1}, {2}) are not in A")]
    NotInA(f64, f64, f64),
    #[error("angles ({a1}, {a2}, {a3}) do not sum to pi (off by {off:e})")]
    BadSum { a1: f64, a2: f64, a3: f64, off: f64 },
    #[error("rho parameters are outside the domain D")]
    NotInDomain,
    #[error("incompatible pentagon angles: {0}")]
    Incompatible(String),
    #[error("spectral parameters violate r1 < r2 < r3 < r4 < pi + r1 - eps (eps = {eps})")]
    OrderingViolated { eps: f64 },
    #[error("gauge field has no entry at vertex ({0}, {1}, {2})")]
    MissingEdge(i64, i64, i64),
    #[error("no sample accepted after {0} draws")]
    SamplingExhausted(usize),
}

/// Dihedral angles `(a1, a2, a3)` of an ideal tetrahedron.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AngleTriple {
    a1: f64,
    a2: f64,
    a3: f64,
}

impl AngleTriple {
    /// Validates positivity and the sum rule; the stored middle entry is
    /// recomputed from the outer two.
    pub fn new(a1: f64, a2: f64, a3: f64) -> Result<Self, ShapeError> {
        let off = a1 + a2 + a3 - PI;
        if !(off.abs() <= ANGLE_TOL) {
            return Err(ShapeError::BadSum { a1, a2, a3, off });
        }
        Self::from_outer(a1, a3)
    }

    /// `(a1, pi - a1 - a3, a3)`.
    pub fn from_outer(a1: f64, a3: f64) -> Result<Self, ShapeError> {
        let a2 = PI - a1 - a3;
        if !(a1 > 0.0 && a2 > 0.0 && a3 > 0.0) {
            return Err(ShapeError::NotInA(a1, a2, a3));
        }
        Ok(AngleTriple { a1, a2, a3 })
    }

    /// `(pi/3, pi/3, pi/3)`.
    pub fn equilateral() -> Self {
        AngleTriple::from_outer(PI / 3.0, PI / 3.0).unwrap()
    }

    pub fn a1(&self) -> f64 {
        self.a1
    }
    pub fn a2(&self) -> f64 {
        self.a2
    }
    pub fn a3(&self) -> f64 {
        self.a3
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.a1, self.a2, self.a3]
    }

    /// Smallest entry.
    pub fn min_angle(&self) -> f64 {
        self.a1.min(self.a2).min(self.a3)
    }

    /// `(a2, a3, a1)`.
    pub fn rotated(&self) -> Self {
        AngleTriple { a1: self.a2, a2: self.a3, a3: self.a1 }
    }
}

impl fmt::Display for AngleTriple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.a1, self.a2, self.a3)
    }
}

impl<'de> Deserialize<'de> for AngleTriple {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            a1: f64,
            a2: f64,
            a3: f64,
        }
        let r = Raw::deserialize(d)?;
        AngleTriple::new(r.a1, r.a2, r.a3).map_err(serde::de::Error::custom)
    }
}

/// The six parameters `rho_ij`, `1 <= i < j <= 4`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RhoSix {
    pub rho12: f64,
    pub rho13: f64,
    pub rho14: f64,
    pub rho23: f64,
    pub rho24: f64,
    pub rho34: f64,
}

impl RhoSix {
    pub fn new(values: [f64; 6]) -> Self {
        let [rho12, rho13, rho14, rho23, rho24, rho34] = values;
        RhoSix { rho12, rho13, rho14, rho23, rho24, rho34 }
    }

    /// `[rho12, rho13, rho14, rho23, rho24, rho34]`.
    pub fn as_array(&self) -> [f64; 6] {
        [self.rho12, self.rho13, self.rho14, self.rho23, self.rho24, self.rho34]
    }

    pub fn in_domain_d(&self) -> bool {
        in_domain_d(self)
    }
}

/// Four spectral parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralQuad {
    pub r1: f64,
    pub r2: f64,
    pub r3: f64,
    pub r4: f64,
}

impl SpectralQuad {
    pub fn new(r1: f64, r2: f64, r3: f64, r4: f64) -> Self {
        SpectralQuad { r1, r2, r3, r4 }
    }

    /// `r1 < r2 < r3 < r4 < pi + r1 - eps`.
    pub fn is_ordered(&self, eps: f64) -> bool {
        self.r1 < self.r2 && self.r2 < self.r3 && self.r3 < self.r4 && self.r4 < PI + self.r1 - eps
    }

    pub fn shifted(&self, c: f64) -> Self {
        SpectralQuad::new(self.r1 + c, self.r2 + c, self.r3 + c, self.r4 + c)
    }
}

/// The five angle triples of a shaped 2-3 move.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PentagonAngles {
    pub alpha0: AngleTriple,
    pub alpha1: AngleTriple,
    pub alpha2: AngleTriple,
    pub alpha3: AngleTriple,
    pub alpha4: AngleTriple,
}

impl PentagonAngles {
    /// Checks the five compatibility relations.
    pub fn new(
        alpha0: AngleTriple,
        alpha1: AngleTriple,
        alpha2: AngleTriple,
        alpha3: AngleTriple,
        alpha4: AngleTriple,
    ) -> Result<Self, ShapeError> {
        let p = PentagonAngles { alpha0, alpha1, alpha2, alpha3, alpha4 };
        let worst = p.relation_defects().into_iter().fold(0.0_f64, |m, d| m.max(d.abs()));
        if worst > ANGLE_TOL {
            return Err(ShapeError::Incompatible(format!("relation defect {worst:e}")));
        }
        Ok(p)
    }

    /// Signed defects of the five relations, in the order
    /// `a1_1 = a0_1 + a2_1`, `a1_3 = a0_3 + a4_1`, `a3_1 = a2_1 + a4_1`,
    /// `a3_3 = a0_1 + a4_3`, `a2_3 = a1_3 + a3_3`.
    pub fn relation_defects(&self) -> [f64; 5] {
        let (a0, a1, a2, a3, a4) = (&self.alpha0, &self.alpha1, &self.alpha2, &self.alpha3, &self.alpha4);
        [
            a1.a1 - (a0.a1 + a2.a1),
            a1.a3 - (a0.a3 + a4.a1),
            a3.a1 - (a2.a1 + a4.a1),
            a3.a3 - (a0.a1 + a4.a3),
            a2.a3 - (a1.a3 + a3.a3),
        ]
    }

    pub fn as_array(&self) -> [AngleTriple; 5] {
        [self.alpha0, self.alpha1, self.alpha2, self.alpha3, self.alpha4]
    }
}

impl<'de> Deserialize<'de> for PentagonAngles {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            alpha0: AngleTriple,
            alpha1: AngleTriple,
            alpha2: AngleTriple,
            alpha3: AngleTriple,
            alpha4: AngleTriple,
        }
        let r = Raw::deserialize(d)?;
        PentagonAngles::new(r.alpha0, r.alpha1, r.alpha2, r.alpha3, r.alpha4).map_err(serde::de::Error::custom)
    }
}

/// `(rho_jk - rho_ik, pi + rho_ij - rho_jk, rho_ik - rho_ij)`.
pub fn alpha_from_rho(rij: f64, rik: f64, rjk: f64) -> Result<AngleTriple, ShapeError> {
    AngleTriple::from_outer(rjk - rik, rik - rij)
}

/// `(r_j - r_i, pi + r_i - r_k, r_k - r_j)`, the angles of the weight with
/// spectral parameters `r_i, r_j, r_k`.
pub fn alpha_spectral(ri: f64, rj: f64, rk: f64) -> Result<AngleTriple, ShapeError> {
    AngleTriple::from_outer(rj - ri, rk - rj)
}

pub fn in_domain_d(rho: &RhoSix) -> bool {
    let RhoSix { rho12, rho13, rho14, rho23, rho24, rho34 } = *rho;
    let lo = rho14.min(rho23);
    let hi = rho14.max(rho23);
    rho12 < rho13
        && rho13 < lo
        && hi < rho24
        && rho24 < rho34
        && rho24 < PI + rho12
        && rho34 < PI + rho13
        && rho12 + rho34 < rho13 + rho24
        && rho13 + rho24 < rho14 + rho23
}

/// The angles of the fifth tetrahedron in the decomposition used for the
/// six-parameter tetrahedron equation.
pub fn alpha0_from_rho(rho: &RhoSix) -> Result<AngleTriple, ShapeError> {
    if !in_domain_d(rho) {
        return Err(ShapeError::NotInDomain);
    }
    let RhoSix { rho12, rho13, rho14, rho23, rho24, rho34 } = *rho;
    AngleTriple::from_outer(rho14 + rho23 - rho13 - rho24, rho13 + rho24 - rho12 - rho34)
}

/// All five angle triples attached to `rho`:
/// `alpha1 = alpha(rho12, rho13, rho23)`, `alpha2 = alpha(rho12, rho14, rho24)`,
/// `alpha3 = alpha(rho13, rho14, rho34)`, `alpha4 = alpha(rho23, rho24, rho34)`.
pub fn rho_pentagon_angles(rho: &RhoSix) -> Result<PentagonAngles, ShapeError> {
    let alpha0 = alpha0_from_rho(rho)?;
    let r = rho;
    PentagonAngles::new(
        alpha0,
        alpha_from_rho(r.rho12, r.rho13, r.rho23)?,
        alpha_from_rho(r.rho12, r.rho14, r.rho24)?,
        alpha_from_rho(r.rho13, r.rho14, r.rho34)?,
        alpha_from_rho(r.rho23, r.rho24, r.rho34)?,
    )
}

/// Completes `(alpha0, alpha4, alpha2_1)` to a compatible quintuple.
///
/// Relations four and five force `alpha2_3 = 2 pi - alpha0_2 - alpha4_2`,
/// so `alpha0_2 + alpha4_2 > pi` is needed.
pub fn pentagon_angles(alpha0: AngleTriple, alpha4: AngleTriple, alpha2_1: f64) -> Result<PentagonAngles, ShapeError> {
    let incompatible = |what: &str, e: ShapeError| ShapeError::Incompatible(format!("{what}: {e}"));
    let alpha1 =
        AngleTriple::from_outer(alpha0.a1 + alpha2_1, alpha0.a3 + alpha4.a1).map_err(|e| incompatible("alpha1", e))?;
    let alpha3 =
        AngleTriple::from_outer(alpha2_1 + alpha4.a1, alpha0.a1 + alpha4.a3).map_err(|e| incompatible("alpha3", e))?;
    let alpha2 = AngleTriple::from_outer(alpha2_1, alpha1.a3 + alpha3.a3).map_err(|e| incompatible("alpha2", e))?;
    PentagonAngles::new(alpha0, alpha1, alpha2, alpha3, alpha4)
}

/// The quintuple used by the pinned pentagon checks:
/// `alpha0 = alpha4 = (pi/6, 2pi/3, pi/6)`, `alpha2_1 = pi/6`.
pub fn reference_pentagon_angles() -> PentagonAngles {
    let outer = AngleTriple::from_outer(PI / 6.0, PI / 6.0).unwrap();
    pentagon_angles(outer, outer, PI / 6.0).unwrap()
}

/// `rho_ij = r_i + r_j`.
pub fn rho_from_spectral(r: &SpectralQuad) -> RhoSix {
    rho_regularized(r, 0.0, 0.0)
}

/// `rho_from_spectral` with `rho12` lowered by `eps` and `rho13` by `delta`.
pub fn rho_regularized(r: &SpectralQuad, eps: f64, delta: f64) -> RhoSix {
    RhoSix {
        rho12: r.r1 + r.r2 - eps,
        rho13: r.r1 + r.r3 - delta,
        rho14: r.r1 + r.r4,
        rho23: r.r2 + r.r3,
        rho24: r.r2 + r.r4,
        rho34: r.r3 + r.r4,
    }
}

/// Rejection sampling of a point of `D` with `rho12 = 0` (the domain and all
/// angle maps depend on differences only).
pub fn sample_domain_d<R: Rng>(rng: &mut R, max_draws: usize) -> Result<RhoSix, ShapeError> {
    for _ in 0..max_draws {
        let mut v = [0.0; 6];
        for x in v.iter_mut().skip(1) {
            *x = rng.gen_range(0.0..PI);
        }
        let rho = RhoSix::new(v);
        if in_domain_d(&rho) {
            return Ok(rho);
        }
    }
    Err(ShapeError::SamplingExhausted(max_draws))
}

/// Gauge parameters `theta` attached to lattice vertices.
///
/// Vertex `[i, j, k]` is the point `(i + 1/2, j + 1/2, k + 1/2)`. With
/// `periodic` set, indices are reduced modulo the lattice size.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(into = "GaugeFieldJson", try_from = "GaugeFieldJson")]
pub struct GaugeField {
    periodic: Option<[usize; 3]>,
    theta: BTreeMap<[i64; 3], f64>,
}

#[derive(Serialize, Deserialize)]
struct GaugeFieldJson {
    #[serde(default)]
    periodic: Option<[usize; 3]>,
    /// `[i, j, k, theta]` rows.
    entries: Vec<[f64; 4]>,
}

impl From<GaugeField> for GaugeFieldJson {
    fn from(g: GaugeField) -> Self {
        GaugeFieldJson {
            periodic: g.periodic,
            entries: g.theta.iter().map(|(k, &t)| [k[0] as f64, k[1] as f64, k[2] as f64, t]).collect(),
        }
    }
}

impl TryFrom<GaugeFieldJson> for GaugeField {
    type Error = String;
    fn try_from(j: GaugeFieldJson) -> Result<Self, String> {
        let mut theta = BTreeMap::new();
        for row in j.entries {
            let idx = [row[0], row[1], row[2]];
            if idx.iter().any(|x| x.fract() != 0.0) || !row[3].is_finite() {
                return Err(format!("bad gauge entry {row:?}"));
            }
            theta.insert(idx.map(|x| x as i64), row[3]);
        }
        if matches!(j.periodic, Some(d) if d.contains(&0)) {
            return Err("periodic lattice sizes must be positive".into());
        }
        Ok(GaugeField { periodic: j.periodic, theta })
    }
}

impl GaugeField {
    /// An empty, non-periodic field.
    pub fn new() -> Self {
        GaugeField { periodic: None, theta: BTreeMap::new() }
    }

    /// A field on the `l x m x n` torus with `f(i, j, k)` at each vertex.
    pub fn periodic(dims: [usize; 3], mut f: impl FnMut(usize, usize, usize) -> f64) -> Self {
        let mut theta = BTreeMap::new();
        for i in 0..dims[0] {
            for j in 0..dims[1] {
                for k in 0..dims[2] {
                    theta.insert([i as i64, j as i64, k as i64], f(i, j, k));
                }
            }
        }
        GaugeField { periodic: Some(dims), theta }
    }

    pub fn set(&mut self, vertex: [i64; 3], value: f64) {
        self.theta.insert(vertex, value);
    }

    pub fn dims(&self) -> Option<[usize; 3]> {
        self.periodic
    }

    /// `theta` at the point `(x, y, z) = (2x/2, ...)` given in doubled
    /// coordinates, all of which must be odd.
    fn at_doubled(&self, p: [i64; 3]) -> Result<f64, ShapeError> {
        let mut v = p.map(|c| (c - 1).div_euclid(2));
        if let Some(d) = self.periodic {
            for (x, n) in v.iter_mut().zip(d) {
                *x = x.rem_euclid(n as i64);
            }
        }
        self.theta.get(&v).copied().ok_or(ShapeError::MissingEdge(v[0], v[1], v[2]))
    }
}

impl Default for GaugeField {
    fn default() -> Self {
        Self::new()
    }
}

/// Change of the angles of cube `(l, m, n)` under the gauge field `theta`:
/// the sum over `sigma = +-1`, `eta = +-1/2` of
/// `sigma (theta[l-eta, m-eta, n+sigma eta], theta[l-eta, m+sigma eta, n+eta], theta[l+sigma eta, m+eta, n+eta])`.
pub fn gauge_delta_alpha(theta: &GaugeField, cube: (i64, i64, i64)) -> Result<[f64; 3], ShapeError> {
    let (l, m, n) = (2 * cube.0, 2 * cube.1, 2 * cube.2);
    let mut d = [0.0; 3];
    for sigma in [1_i64, -1] {
        for eta in [1_i64, -1] {
            let s = sigma as f64;
            d[0] += s * theta.at_doubled([l - eta, m - eta, n + sigma * eta])?;
            d[1] += s * theta.at_doubled([l - eta, m + sigma * eta, n + eta])?;
            d[2] += s * theta.at_doubled([l + sigma * eta, m + eta, n + eta])?;
        }
    }
    Ok(d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    const PINNED: [f64; 6] = [0.0, 0.1, 0.2, 0.6, 0.65, 0.7];

    #[test]
    fn alpha_map_examples() {
        let a = alpha_from_rho(0.0, 0.1, 0.2).unwrap();
        assert!((a.a1() - 0.1).abs() < 1e-15 && (a.a2() - (PI - 0.2)).abs() < 1e-15 && (a.a3() - 0.1).abs() < 1e-15);
        assert!(matches!(alpha_from_rho(0.0, 0.0, 0.0), Err(ShapeError::NotInA(..))));
        let a = alpha_from_rho(0.0, 0.1, 0.6).unwrap();
        assert!((a.a1() + a.a2() + a.a3() - PI).abs() < 1e-15);
    }

    #[test]
    fn angle_triple_validation() {
        assert!(AngleTriple::new(1.0, 1.0, PI - 2.0).is_ok());
        assert!(matches!(AngleTriple::new(1.0, 1.0, 1.0), Err(ShapeError::BadSum { .. })));
        assert!(matches!(AngleTriple::new(0.0, PI, 0.0), Err(ShapeError::NotInA(..))));
        let t = AngleTriple::from_outer(0.3, 0.9).unwrap();
        assert_eq!(t.rotated().rotated().rotated(), t);
    }

    #[test]
    fn domain_examples() {
        let rho = RhoSix::new(PINNED);
        assert!(in_domain_d(&rho));
        // brute-force oracle: all five triples attached to rho strictly positive
        let a0 = alpha0_from_rho(&rho).unwrap();
        assert!((a0.a1() - 0.05).abs() < 1e-15);
        assert!((a0.a2() - (PI - 0.1)).abs() < 1e-15);
        assert!((a0.a3() - 0.05).abs() < 1e-15);

        // rho13 + rho24 = rho14 + rho23 sits on the boundary
        let edge = RhoSix::new([0.0, 0.125, 0.25, 0.625, 0.75, 0.8125]);
        assert_eq!(edge.rho13 + edge.rho24, edge.rho14 + edge.rho23);
        assert!(!in_domain_d(&edge));
        assert!(matches!(alpha0_from_rho(&edge), Err(ShapeError::NotInDomain)));

        let spectral = rho_from_spectral(&SpectralQuad::new(0.0, 0.1, 0.3, 0.6));
        assert!(!in_domain_d(&spectral));
    }

    #[test]
    fn spectral_examples() {
        let r = SpectralQuad::new(0.0, 0.1, 0.3, 0.6);
        let rho = rho_from_spectral(&r).as_array();
        let want = [0.1, 0.3, 0.6, 0.4, 0.7, 0.9];
        for (a, b) in rho.iter().zip(want) {
            assert!((a - b).abs() < 1e-15);
        }
        assert!(r.is_ordered(0.0));
        assert!(!SpectralQuad::new(0.0, 0.3, 0.1, 0.6).is_ordered(0.0));
        assert!(!SpectralQuad::new(0.0, 0.1, 0.3, 3.2).is_ordered(0.0));

        let shifted = rho_from_spectral(&r.shifted(0.37)).as_array();
        for i in 0..6 {
            for j in 0..6 {
                assert!(((rho[i] - rho[j]) - (shifted[i] - shifted[j])).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn regularization() {
        let r = SpectralQuad::new(0.0, 0.1, 0.3, 0.6);
        assert_eq!(rho_regularized(&r, 0.0, 0.0), rho_from_spectral(&r));
        assert!(in_domain_d(&rho_regularized(&r, 0.02, 0.01)));
        // flat limit
        let mut last = f64::INFINITY;
        for k in 1..8 {
            let delta = 0.04 / f64::from(1 << k);
            let a0 = alpha0_from_rho(&rho_regularized(&r, 2.0 * delta, delta)).unwrap();
            let dist = a0.a1().max(a0.a3()).max(PI - a0.a2());
            assert!(dist < last);
            last = dist;
        }
        assert!(last < 1e-3);
    }

    #[test]
    fn pentagon_angles_reference() {
        let p = reference_pentagon_angles();
        assert!(p.relation_defects().iter().all(|d| d.abs() < 1e-15));
        // independent substitution
        assert!((p.alpha1.a1() - PI / 3.0).abs() < 1e-15);
        assert!((p.alpha1.a3() - PI / 3.0).abs() < 1e-15);
        assert!((p.alpha3.a1() - PI / 3.0).abs() < 1e-15);
        assert!((p.alpha2.a3() - 2.0 * PI / 3.0).abs() < 1e-15);
        assert!((p.alpha2.a2() - PI / 6.0).abs() < 1e-15);
    }

    #[test]
    fn pentagon_angles_rejects_flat_alpha2() {
        // alpha0_2 + alpha4_2 <= pi leaves no room for alpha2_3
        let eq = AngleTriple::equilateral();
        assert!(matches!(pentagon_angles(eq, eq, PI / 4.0), Err(ShapeError::Incompatible(_))));
        let wide = AngleTriple::from_outer(0.2, 0.2).unwrap();
        assert!(pentagon_angles(wide, wide, 0.3).is_ok());
        assert!(matches!(pentagon_angles(wide, wide, 3.0), Err(ShapeError::Incompatible(_))));
    }

    #[test]
    fn random_domain_points_give_compatible_angles() {
        let mut rng = ChaCha8Rng::seed_from_u64(0xA11CE);
        for _ in 0..200 {
            let rho = sample_domain_d(&mut rng, 1_000_000).unwrap();
            let p = rho_pentagon_angles(&rho).unwrap();
            assert!(p.relation_defects().iter().all(|d| d.abs() < ANGLE_TOL));
        }
    }

    #[test]
    fn gauge_delta_examples() {
        let zero = GaugeField::periodic([2, 2, 2], |_, _, _| 0.0);
        assert_eq!(gauge_delta_alpha(&zero, (0, 0, 0)).unwrap(), [0.0; 3]);
        let constant = GaugeField::periodic([2, 2, 2], |_, _, _| 0.83);
        assert_eq!(gauge_delta_alpha(&constant, (1, 0, 1)).unwrap(), [0.0; 3]);
        assert!(matches!(gauge_delta_alpha(&GaugeField::new(), (0, 0, 0)), Err(ShapeError::MissingEdge(..))));
    }

    #[test]
    fn gauge_layer_sums_vanish() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for dims in [[2, 2, 2], [3, 2, 4]] {
            let theta = GaugeField::periodic(dims, |_, _, _| rng.gen_range(-1.0..1.0));
            let [l_n, m_n, n_n] = dims.map(|x| x as i64);
            let d = |l, m, n| gauge_delta_alpha(&theta, (l, m, n)).unwrap();
            for l in 0..l_n {
                for m in 0..m_n {
                    assert!((0..n_n).map(|n| d(l, m, n)[0]).sum::<f64>().abs() < 1e-12);
                }
            }
            for l in 0..l_n {
                for n in 0..n_n {
                    assert!((0..m_n).map(|m| d(l, m, n)[1]).sum::<f64>().abs() < 1e-12);
                }
            }
            for m in 0..m_n {
                for n in 0..n_n {
                    assert!((0..l_n).map(|l| d(l, m, n)[2]).sum::<f64>().abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn json_round_trips() {
        let rho = RhoSix::new(PINNED);
        let s = serde_json::to_string(&rho).unwrap();
        assert!(s.contains("\"rho12\""));
        assert_eq!(serde_json::from_str::<RhoSix>(&s).unwrap(), rho);
        let r: SpectralQuad = serde_json::from_str(r#"{"r1":0,"r2":0.1,"r3":0.3,"r4":0.6}"#).unwrap();
        assert_eq!(r, SpectralQuad::new(0.0, 0.1, 0.3, 0.6));
        assert!(serde_json::from_str::<AngleTriple>(r#"{"a1":1,"a2":1,"a3":1}"#).is_err());
        let p = reference_pentagon_angles();
        assert_eq!(serde_json::from_str::<PentagonAngles>(&serde_json::to_string(&p).unwrap()).unwrap(), p);
        let g = GaugeField::periodic([1, 2, 1], |_, j, _| j as f64 * 0.5);
        assert_eq!(serde_json::from_str::<GaugeField>(&serde_json::to_string(&g).unwrap()).unwrap(), g);
    }
}
