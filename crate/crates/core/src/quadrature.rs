//! Deterministic node/weight grids for the state-space measures and a small
//! integration driver with a coarse-grid error estimate.
//!
//! Three measures occur:
//!
//! * [`StateSpace::UnitCircle`] with `dz / (2 pi i z)`, discretized by the
//!   trapezoid rule on `M` uniform angles (weights `1/M`);
//! * [`StateSpace::RealLine`] with `dx`, discretized by composite
//!   Gauss-Legendre on `[-X, X]`;
//! * [`StateSpace::UnitInterval`] with `dx`, composite Gauss-Legendre on `[0, 1]`.

use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QuadratureError {
    #[error("circle grid needs at least 2 nodes, got {0}")]
    TooFewNodes(usize),
    #[error("invalid line grid: X = {x_max}, panels = {panels}, order = {order}")]
    InvalidLine { x_max: f64, panels: usize, order: usize },
    #[error("invalid contour configuration: {0}")]
    InvalidContour(String),
    #[error(
        "integrand has not decayed at X = {x_max} after {retries} retries \
         (boundary/peak ratio {ratio:e})"
    )]
    NoDecay { x_max: f64, retries: usize, ratio: f64 },
}

/// The set `S` of state variables together with its measure.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StateSpace {
    /// `|z| = 1` with `dz / (2 pi i z)`.
    UnitCircle,
    /// `R` with `dx`.
    RealLine,
    /// `[0, 1]` with `dx`.
    UnitInterval,
}

impl StateSpace {
    /// Whether `x` is an admissible state, to `1e-12`.
    pub fn contains(self, x: Complex64) -> bool {
        if !(x.re.is_finite() && x.im.is_finite()) {
            return false;
        }
        match self {
            StateSpace::UnitCircle => (x.norm() - 1.0).abs() < 1e-12,
            StateSpace::RealLine => x.im == 0.0,
            StateSpace::UnitInterval => x.im == 0.0 && (-1e-12..=1.0 + 1e-12).contains(&x.re),
        }
    }
}

/// Construction parameters of a [`Grid`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GridMeta {
    Circle { nodes: usize },
    Line { x_max: f64, panels: usize, order: usize },
    Interval { panels: usize, order: usize },
}

impl fmt::Display for GridMeta {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            GridMeta::Circle { nodes } => write!(f, "circle:M={nodes}"),
            GridMeta::Line { x_max, panels, order } => {
                write!(f, "line:X={x_max}:panels={panels}:order={order}")
            }
            GridMeta::Interval { panels, order } => {
                write!(f, "interval:panels={panels}:order={order}")
            }
        }
    }
}

/// Immutable quadrature grid on a state space.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    kind: StateSpace,
    nodes: Vec<Complex64>,
    weights: Vec<f64>,
    meta: GridMeta,
}

impl Grid {
    pub fn kind(&self) -> StateSpace {
        self.kind
    }

    pub fn nodes(&self) -> &[Complex64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn meta(&self) -> GridMeta {
        self.meta
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Sum of the weights, i.e. the discrete measure of `S`.
    pub fn total_weight(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// The same construction at twice the resolution.
    pub fn refined(&self) -> Grid {
        match self.meta {
            GridMeta::Circle { nodes } => circle_grid(2 * nodes).expect("refinement of a valid grid"),
            GridMeta::Line { x_max, panels, order } => {
                line_grid(x_max, 2 * panels, order).expect("refinement of a valid grid")
            }
            GridMeta::Interval { panels, order } => {
                interval_grid(2 * panels, order).expect("refinement of a valid grid")
            }
        }
    }

    /// The half-resolution companion used for error estimation, if one exists.
    pub fn coarsened(&self) -> Option<Grid> {
        match self.meta {
            GridMeta::Circle { nodes } if nodes >= 4 => circle_grid(nodes / 2).ok(),
            GridMeta::Line { x_max, panels, order } if panels >= 2 => line_grid(x_max, panels / 2, order).ok(),
            GridMeta::Line { x_max, panels, order } if order >= 2 => line_grid(x_max, panels, order / 2).ok(),
            GridMeta::Interval { panels, order } if panels >= 2 => interval_grid(panels / 2, order).ok(),
            _ => None,
        }
    }
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`, by Newton iteration on
/// the Legendre recurrence.
pub fn gauss_legendre(order: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(order >= 1, "Gauss-Legendre order must be positive");
    let n = order;
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Composite Gauss-Legendre rule on `[a, b]` with `panels` equal panels.
pub fn composite_gauss_legendre(a: f64, b: f64, panels: usize, order: usize) -> (Vec<f64>, Vec<f64>) {
    let (x, w) = gauss_legendre(order);
    let h = (b - a) / panels as f64;
    let mut nodes = Vec::with_capacity(panels * order);
    let mut weights = Vec::with_capacity(panels * order);
    for p in 0..panels {
        let lo = a + h * p as f64;
        let mid = lo + 0.5 * h;
        for (xi, wi) in x.iter().zip(&w) {
            nodes.push(mid + 0.5 * h * xi);
            weights.push(0.5 * h * wi);
        }
    }
    (nodes, weights)
}

/// Trapezoid rule on the unit circle: `z_k = exp(2 pi i k / M)`, weights `1/M`.
pub fn circle_grid(m: usize) -> Result<Grid, QuadratureError> {
    if m < 2 {
        return Err(QuadratureError::TooFewNodes(m));
    }
    let nodes = (0..m).map(|k| Complex64::from_polar(1.0, 2.0 * PI * k as f64 / m as f64)).collect();
    Ok(Grid {
        kind: StateSpace::UnitCircle,
        nodes,
        weights: vec![1.0 / m as f64; m],
        meta: GridMeta::Circle { nodes: m },
    })
}

/// Composite Gauss-Legendre on `[-X, X]`.
pub fn line_grid(x_max: f64, panels: usize, order: usize) -> Result<Grid, QuadratureError> {
    if !(x_max > 0.0 && x_max.is_finite()) || panels == 0 || order == 0 || panels * order < 2 {
        return Err(QuadratureError::InvalidLine { x_max, panels, order });
    }
    let (x, w) = composite_gauss_legendre(-x_max, x_max, panels, order);
    Ok(Grid {
        kind: StateSpace::RealLine,
        nodes: x.into_iter().map(Complex64::from).collect(),
        weights: w,
        meta: GridMeta::Line { x_max, panels, order },
    })
}

/// Composite Gauss-Legendre on `[0, 1]`.
pub fn interval_grid(panels: usize, order: usize) -> Result<Grid, QuadratureError> {
    if panels == 0 || order == 0 || panels * order < 2 {
        return Err(QuadratureError::InvalidLine { x_max: 1.0, panels, order });
    }
    let (x, w) = composite_gauss_legendre(0.0, 1.0, panels, order);
    Ok(Grid {
        kind: StateSpace::UnitInterval,
        nodes: x.into_iter().map(Complex64::from).collect(),
        weights: w,
        meta: GridMeta::Interval { panels, order },
    })
}

/// Result of [`integrate`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Integral {
    pub value: Complex64,
    /// `|value - value on the half-resolution grid|`; infinite when the grid
    /// has no coarser companion.
    pub err_est: f64,
}

/// Weighted sum of `f` over the grid, in node order.
pub fn integrate_value<F, E>(grid: &Grid, mut f: F) -> Result<Complex64, E>
where
    F: FnMut(Complex64) -> Result<Complex64, E>,
{
    let mut acc = Complex64::new(0.0, 0.0);
    for (x, w) in grid.nodes.iter().zip(&grid.weights) {
        acc += f(*x)? * *w;
    }
    Ok(acc)
}

/// Integrates `f` and estimates the error against the coarsened grid.
///
/// For even circle grids the coarse rule reuses every other sample, so no
/// extra evaluations are made.
pub fn integrate<F, E>(grid: &Grid, mut f: F) -> Result<Integral, E>
where
    F: FnMut(Complex64) -> Result<Complex64, E>,
{
    match grid.meta {
        GridMeta::Circle { nodes: m } if m >= 4 && m % 2 == 0 => {
            let mut fine = Complex64::new(0.0, 0.0);
            let mut coarse = Complex64::new(0.0, 0.0);
            for (k, x) in grid.nodes.iter().enumerate() {
                let v = f(*x)?;
                fine += v;
                if k % 2 == 0 {
                    coarse += v;
                }
            }
            let value = fine / m as f64;
            let coarse = coarse / (m / 2) as f64;
            Ok(Integral { value, err_est: (value - coarse).norm() })
        }
        _ => {
            let value = integrate_value(grid, &mut f)?;
            let err_est = match grid.coarsened() {
                Some(c) => (value - integrate_value(&c, &mut f)?).norm(),
                None => f64::INFINITY,
            };
            Ok(Integral { value, err_est })
        }
    }
}

/// Truncation policy for real-line integrals whose integrand decays
/// exponentially: start from `x_start`, and enlarge `X` by `growth` while the
/// integrand at the outermost nodes exceeds `boundary_ratio` times its peak.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LineTruncation {
    pub x_start: f64,
    /// Panels per unit length; the panel count scales with `X`.
    pub panels_per_unit: f64,
    pub order: usize,
    pub boundary_ratio: f64,
    pub max_retries: usize,
    pub growth: f64,
}

impl Default for LineTruncation {
    fn default() -> Self {
        LineTruncation {
            x_start: 8.0,
            panels_per_unit: 10.0,
            order: 16,
            boundary_ratio: 1e-12,
            max_retries: 3,
            growth: 1.5,
        }
    }
}

impl LineTruncation {
    pub fn grid_for(&self, x_max: f64) -> Result<Grid, QuadratureError> {
        // even panel count keeps x = 0 on a panel boundary
        let panels = ((2.0 * x_max * self.panels_per_unit / 2.0).ceil() as usize).max(1) * 2;
        line_grid(x_max, panels, self.order)
    }

    /// Picks the smallest `X` in the retry sequence for which `probe` (the
    /// integrand magnitudes at the grid nodes) shows decay at both ends.
    /// Returns the accepted grid.
    pub fn select<F, E>(&self, mut magnitudes: F) -> Result<Grid, E>
    where
        F: FnMut(&Grid) -> Result<Vec<f64>, E>,
        E: From<QuadratureError>,
    {
        let mut x_max = self.x_start;
        let mut last_ratio = f64::INFINITY;
        for _ in 0..=self.max_retries {
            let grid = self.grid_for(x_max)?;
            let mags = magnitudes(&grid)?;
            let peak = mags.iter().cloned().fold(0.0, f64::max);
            let edge = mags[0].max(mags[mags.len() - 1]);
            last_ratio = if peak > 0.0 { edge / peak } else { 0.0 };
            if last_ratio < self.boundary_ratio {
                return Ok(grid);
            }
            x_max *= self.growth;
        }
        Err(QuadratureError::NoDecay { x_max: x_max / self.growth, retries: self.max_retries, ratio: last_ratio }
            .into())
    }
}

/// Parameters of the contour used for Faddeev's quantum dilogarithm: the
/// real axis with `(-r0, r0)` replaced by the upper semicircle of radius
/// `r0`, truncated at `|x| = X`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContourConfig {
    pub r0: f64,
    /// `None` selects `X` from the decay rate of the integrand.
    pub x_max: Option<f64>,
    /// Uniform panels on `[1, X]`.
    pub panels: usize,
    /// Gauss-Legendre order per panel.
    pub order: usize,
}

impl Default for ContourConfig {
    fn default() -> Self {
        ContourConfig { r0: 0.25, x_max: None, panels: 0, order: 16 }
    }
}

impl ContourConfig {
    pub fn validate(&self) -> Result<(), QuadratureError> {
        if !(self.r0 > 0.0 && self.r0 < 1.0) {
            return Err(QuadratureError::InvalidContour(format!("r0 = {} not in (0, 1)", self.r0)));
        }
        if let Some(x) = self.x_max {
            if !(x > 1.0 && x.is_finite()) {
                return Err(QuadratureError::InvalidContour(format!("X = {x} must exceed 1")));
            }
        }
        // panels == 0 means "derive from X"
        if self.panels == 1 {
            return Err(QuadratureError::InvalidContour("panels must be >= 2".into()));
        }
        if self.order < 4 {
            return Err(QuadratureError::InvalidContour(format!("order {} < 4", self.order)));
        }
        Ok(())
    }

    /// Same contour at twice the number of panels everywhere.
    pub fn doubled(&self, resolved_panels: usize) -> ContourConfig {
        ContourConfig { panels: 2 * resolved_panels, ..*self }
    }
}
