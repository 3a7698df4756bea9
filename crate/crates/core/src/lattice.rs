//! Layer transfer matrices and partition functions of the IRC model
//! `W^{(l,m,n)} = T((t_m - s_l, pi + s_l - u_n, u_n - t_m); f, a, h | b, e, d)`
//! on an `L x M x N` torus.
//!
//! Vertex `(i, j, k)` sits at `(i + 1/2, j + 1/2, k + 1/2)`, so cube
//! `(l, m, n)` has its lower corners on vertex indices `l - 1`, `m - 1`,
//! `n - 1` and its upper corners on `l`, `m`, `n` (all periodic). A slice
//! state assigns one grid node to each of the `L M` vertices of a horizontal
//! layer, with site `(i, j)` stored as digit `i M + j` (most significant
//! first).

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::quadrature::Grid;
use crate::shapes::{alpha_spectral, AngleTriple};
use crate::weights::{EdgeStates, TetrahedralWeight, WeightError};

/// Largest transfer-matrix dimension `nodes^{LM}`.
pub const MAX_DIM: usize = 4096;

/// Largest configuration count `nodes^{LMN}` for the direct sum.
pub const MAX_CONFIGS: u64 = 10_000_000;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LatticeError {
    #[error("invalid lattice: {0}")]
    InvalidSpec(String),
    #[error("dimension {nodes}^{sites} exceeds {limit}")]
    TooLarge { nodes: usize, sites: usize, limit: u64 },
    #[error("angles at (l, m) = ({l}, {m}) leave A: need s_l < t_m < u < pi + s_l (s = {s}, t = {t}, u = {u})")]
    AngleDomainViolated { l: usize, m: usize, s: f64, t: f64, u: f64 },
    #[error("matrix dimensions differ: {0} vs {1}")]
    DimMismatch(usize, usize),
    #[error("weight at cube ({l}, {m}): {source}")]
    Weight {
        l: usize,
        m: usize,
        #[source]
        source: WeightError,
    },
}

/// Torus size and spectral parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LatticeSpec {
    pub l: usize,
    pub m: usize,
    pub n: usize,
    pub s: Vec<f64>,
    pub t: Vec<f64>,
    pub u: Vec<f64>,
}

impl LatticeSpec {
    pub fn new(s: Vec<f64>, t: Vec<f64>, u: Vec<f64>) -> Result<Self, LatticeError> {
        let spec = LatticeSpec { l: s.len(), m: t.len(), n: u.len(), s, t, u };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<(), LatticeError> {
        if self.l == 0 || self.m == 0 || self.n == 0 {
            return Err(LatticeError::InvalidSpec("L, M, N must be positive".into()));
        }
        if self.s.len() != self.l || self.t.len() != self.m || self.u.len() != self.n {
            return Err(LatticeError::InvalidSpec(format!(
                "need {} s, {} t and {} u values, got {}, {}, {}",
                self.l,
                self.m,
                self.n,
                self.s.len(),
                self.t.len(),
                self.u.len()
            )));
        }
        if self.s.iter().chain(&self.t).chain(&self.u).any(|x| !x.is_finite()) {
            return Err(LatticeError::InvalidSpec("spectral parameters must be finite".into()));
        }
        Ok(())
    }

    /// Every spectral parameter shifted by `c`.
    pub fn shifted(&self, c: f64) -> Self {
        let sh = |v: &[f64]| v.iter().map(|x| x + c).collect();
        LatticeSpec { s: sh(&self.s), t: sh(&self.t), u: sh(&self.u), ..*self }
    }

    /// Layers cyclically relabelled, `u_n -> u_{n + k mod N}`.
    pub fn rotated_layers(&self, k: usize) -> Self {
        let mut u = self.u.clone();
        u.rotate_left(k % self.n);
        LatticeSpec { u, ..self.clone() }
    }

    fn sites(&self) -> usize {
        self.l * self.m
    }

    /// Angles of cube `(l, m)` in a layer with parameter `u`.
    pub fn cube_angles(&self, u: f64) -> Result<Vec<AngleTriple>, LatticeError> {
        let mut out = Vec::with_capacity(self.sites());
        for (l, &s) in self.s.iter().enumerate() {
            for (m, &t) in self.t.iter().enumerate() {
                out.push(alpha_spectral(s, t, u).map_err(|_| LatticeError::AngleDomainViolated { l, m, s, t, u })?);
            }
        }
        Ok(out)
    }
}

/// Dense row-major complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    n: usize,
    data: Vec<Complex64>,
}

impl CMatrix {
    pub fn zeros(n: usize) -> Self {
        CMatrix { n, data: vec![Complex64::new(0.0, 0.0); n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn mul(&self, other: &CMatrix) -> Result<CMatrix, LatticeError> {
        if self.n != other.n {
            return Err(LatticeError::DimMismatch(self.n, other.n));
        }
        let n = self.n;
        let mut out = CMatrix::zeros(n);
        for i in 0..n {
            let row = &mut out.data[i * n..(i + 1) * n];
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for (o, b) in row.iter_mut().zip(&other.data[k * n..(k + 1) * n]) {
                    *o += a * b;
                }
            }
        }
        Ok(out)
    }

    pub fn sub(&self, other: &CMatrix) -> Result<CMatrix, LatticeError> {
        if self.n != other.n {
            return Err(LatticeError::DimMismatch(self.n, other.n));
        }
        Ok(CMatrix { n: self.n, data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect() })
    }

    pub fn frobenius(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.n).map(|i| self.data[i * self.n + i]).sum()
    }
}

impl std::ops::Index<(usize, usize)> for CMatrix {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.n + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.n + j]
    }
}

/// `tau(u)` with rows indexed by the upper slice and columns by the lower
/// one; `sqrt(mu)` of both slices is folded into each entry so that plain
/// matrix products and traces carry the full measure.
#[derive(Debug, Clone, PartialEq)]
pub struct TransferMatrix {
    pub entries: CMatrix,
    pub nodes: usize,
    pub sites: usize,
    pub layer_u: f64,
}

impl TransferMatrix {
    pub fn dim(&self) -> usize {
        self.entries.dim()
    }
}

impl fmt::Display for TransferMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "tau(u={}) [{}^{} = {}]", self.layer_u, self.nodes, self.sites, self.dim())
    }
}

fn checked_pow(nodes: usize, sites: usize, limit: u64) -> Result<u64, LatticeError> {
    let mut acc: u64 = 1;
    for _ in 0..sites {
        acc = acc.checked_mul(nodes as u64).filter(|&v| v <= limit).ok_or(LatticeError::TooLarge {
            nodes,
            sites,
            limit,
        })?;
    }
    Ok(acc)
}

/// Splits a slice index into per-site node indices.
fn digits(mut k: usize, nodes: usize, sites: usize, out: &mut [usize]) {
    for slot in out[..sites].iter_mut().rev() {
        *slot = k % nodes;
        k /= nodes;
    }
}

/// Product of the cube weights of one layer between two slice states.
fn layer_weight<W: TetrahedralWeight + ?Sized>(
    w: &W,
    spec: &LatticeSpec,
    alphas: &[AngleTriple],
    bottom: &[Complex64],
    top: &[Complex64],
) -> Result<Complex64, LatticeError> {
    let (lx, my) = (spec.l, spec.m);
    let at = |i: usize, j: usize| i * my + j;
    let mut acc = Complex64::new(1.0, 0.0);
    for l in 0..lx {
        let lm = (l + lx - 1) % lx;
        for m in 0..my {
            let mm = (m + my - 1) % my;
            let a = bottom[at(lm, mm)];
            let b = bottom[at(l, mm)];
            let h = bottom[at(l, m)];
            let d = top[at(lm, mm)];
            let e = top[at(l, m)];
            let f = top[at(lm, m)];
            let x = EdgeStates::new([f, a, h], [b, e, d]);
            acc *= w.eval(&alphas[at(l, m)], &x).map_err(|source| LatticeError::Weight { l, m, source })?;
        }
    }
    Ok(acc)
}

fn slice_states(grid: &Grid, sites: usize, dim: usize) -> (Vec<Vec<Complex64>>, Vec<f64>) {
    let nodes = grid.len();
    let mut idx = vec![0; sites];
    let mut states = Vec::with_capacity(dim);
    let mut mu = Vec::with_capacity(dim);
    for k in 0..dim {
        digits(k, nodes, sites, &mut idx);
        states.push(idx.iter().map(|&i| grid.nodes()[i]).collect());
        mu.push(idx.iter().map(|&i| grid.weights()[i]).product());
    }
    (states, mu)
}

/// The layer transfer matrix `tau(u)` on `grid`.
pub fn build_layer_transfer<W: TetrahedralWeight + ?Sized>(
    w: &W,
    spec: &LatticeSpec,
    layer_u: f64,
    grid: &Grid,
) -> Result<TransferMatrix, LatticeError> {
    spec.validate()?;
    let sites = spec.sites();
    let nodes = grid.len();
    let dim = checked_pow(nodes, sites, MAX_DIM as u64)? as usize;
    let alphas = spec.cube_angles(layer_u)?;
    let (states, mu) = slice_states(grid, sites, dim);
    let sqrt_mu: Vec<f64> = mu.iter().map(|m| m.sqrt()).collect();
    let mut entries = CMatrix::zeros(dim);
    for (top, (ts, tm)) in states.iter().zip(&sqrt_mu).enumerate() {
        for (bottom, (bs, bm)) in states.iter().zip(&sqrt_mu).enumerate() {
            entries[(top, bottom)] = layer_weight(w, spec, &alphas, bs, ts)? * (tm * bm);
        }
    }
    Ok(TransferMatrix { entries, nodes, sites, layer_u })
}

/// `||t1 t2 - t2 t1||_F / (||t1||_F ||t2||_F)`.
pub fn commutator_norm(t1: &TransferMatrix, t2: &TransferMatrix) -> Result<f64, LatticeError> {
    if t1.dim() != t2.dim() || t1.nodes != t2.nodes {
        return Err(LatticeError::DimMismatch(t1.dim(), t2.dim()));
    }
    let ab = t1.entries.mul(&t2.entries)?;
    let ba = t2.entries.mul(&t1.entries)?;
    Ok(ab.sub(&ba)?.frobenius() / (t1.entries.frobenius() * t2.entries.frobenius()))
}

/// `Z = Tr(tau(u_N) ... tau(u_1))`.
pub fn partition_trace<W: TetrahedralWeight + ?Sized>(
    w: &W,
    spec: &LatticeSpec,
    grid: &Grid,
) -> Result<Complex64, LatticeError> {
    spec.validate()?;
    let mut acc: Option<CMatrix> = None;
    for &u in &spec.u {
        let tau = build_layer_transfer(w, spec, u, grid)?.entries;
        acc = Some(match acc {
            None => tau,
            Some(p) => tau.mul(&p)?,
        });
    }
    Ok(acc.expect("N >= 1").trace())
}

/// `Z` as the direct sum over all `nodes^{LMN}` configurations of the product
/// of every cube weight and every vertex measure.
pub fn partition_bruteforce<W: TetrahedralWeight + ?Sized>(
    w: &W,
    spec: &LatticeSpec,
    grid: &Grid,
) -> Result<Complex64, LatticeError> {
    spec.validate()?;
    let sites = spec.sites();
    let nodes = grid.len();
    let layers = spec.n;
    let total = checked_pow(nodes, sites * layers, MAX_CONFIGS)?;
    let alphas: Vec<Vec<AngleTriple>> = spec.u.iter().map(|&u| spec.cube_angles(u)).collect::<Result<_, _>>()?;
    let mut idx = vec![0; sites * layers];
    let mut slices: Vec<Vec<Complex64>> = vec![vec![Complex64::new(0.0, 0.0); sites]; layers];
    let mut z = Complex64::new(0.0, 0.0);
    for k in 0..total as usize {
        digits(k, nodes, sites * layers, &mut idx);
        let mut mu = 1.0;
        for (n, slice) in slices.iter_mut().enumerate() {
            for (site, v) in slice.iter_mut().enumerate() {
                let i = idx[n * sites + site];
                *v = grid.nodes()[i];
                mu *= grid.weights()[i];
            }
        }
        let mut weight = Complex64::new(mu, 0.0);
        for n in 0..layers {
            // cube layer n sits between slices n - 1 and n
            let below = &slices[(n + layers - 1) % layers];
            weight *= layer_weight(w, spec, &alphas[n], below, &slices[n])?;
        }
        z += weight;
    }
    Ok(z)
}

/// `(Z(r), Z(r + c))`: the partition function before and after shifting
/// every spectral parameter by `c`.
pub fn gauge_probe<W: TetrahedralWeight + ?Sized>(
    w: &W,
    spec: &LatticeSpec,
    grid: &Grid,
    c: f64,
) -> Result<(Complex64, Complex64), LatticeError> {
    Ok((partition_trace(w, spec, grid)?, partition_trace(w, &spec.shifted(c), grid)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::{circle_grid, StateSpace};
    use crate::weights::{eval_t, TetWeight};
    use std::f64::consts::PI;

    struct Unit;

    impl TetrahedralWeight for Unit {
        fn state_space(&self) -> StateSpace {
            StateSpace::UnitCircle
        }
        fn eval(&self, _: &AngleTriple, _: &EdgeStates) -> Result<Complex64, WeightError> {
            Ok(Complex64::new(1.0, 0.0))
        }
        fn label(&self) -> String {
            "unit".into()
        }
    }

    fn spec(s: &[f64], t: &[f64], u: &[f64]) -> LatticeSpec {
        LatticeSpec::new(s.to_vec(), t.to_vec(), u.to_vec()).unwrap()
    }

    #[test]
    fn constant_weight_gives_measure_matrix() {
        let g = circle_grid(4).unwrap();
        let sp = spec(&[0.0], &[0.5, 0.6], &[1.0, 1.2]);
        let tau = build_layer_transfer(&Unit, &sp, 1.0, &g).unwrap();
        assert_eq!(tau.dim(), 16);
        for i in 0..16 {
            for j in 0..16 {
                assert!((tau.entries[(i, j)] - 1.0 / 16.0).norm() < 1e-16);
            }
        }
        // sum of mu over one vertex is 1, so Z = 1 on any torus
        assert!((partition_trace(&Unit, &sp, &g).unwrap() - 1.0).norm() < 1e-14);
        assert!((partition_bruteforce(&Unit, &sp, &g).unwrap() - 1.0).norm() < 1e-14);
    }

    #[test]
    fn single_site_entries_match_direct_weights() {
        let w = TetWeight::three_d_index(0.3).unwrap();
        let g = circle_grid(16).unwrap();
        let sp = spec(&[0.0], &[0.7], &[1.9]);
        let tau = build_layer_transfer(&w, &sp, 1.9, &g).unwrap();
        let alpha = alpha_spectral(0.0, 0.7, 1.9).unwrap();
        for (i, &y) in g.nodes().iter().enumerate() {
            for (j, &x) in g.nodes().iter().enumerate() {
                // L = M = 1: a, b, c, h are the lower vertex and d, e, f, g the upper one
                let want = eval_t(&w, &alpha, &EdgeStates::new([y, x, x], [x, y, y])).unwrap() / 16.0;
                assert!((tau.entries[(i, j)] - want).norm() < 1e-15 * want.norm());
            }
        }
    }

    #[test]
    fn one_by_one_by_one_trace() {
        let w = TetWeight::three_d_index(0.3).unwrap();
        let g = circle_grid(8).unwrap();
        let sp = spec(&[0.0], &[0.7], &[1.9]);
        let alpha = alpha_spectral(0.0, 0.7, 1.9).unwrap();
        let want: Complex64 =
            g.nodes().iter().map(|&a| eval_t(&w, &alpha, &EdgeStates::uniform(a)).unwrap() / 8.0).sum();
        let z = partition_trace(&w, &sp, &g).unwrap();
        let zb = partition_bruteforce(&w, &sp, &g).unwrap();
        assert!((z - want).norm() < 1e-14 * want.norm());
        assert!((zb - want).norm() < 1e-14 * want.norm());
    }

    #[test]
    fn trace_matches_bruteforce() {
        let w = TetWeight::three_d_index(0.3).unwrap();
        let g = circle_grid(6).unwrap();
        for sp in [
            spec(&[0.0], &[0.7], &[1.9, 2.3]),
            spec(&[0.0], &[0.5, 0.8], &[1.9, 2.3]),
            spec(&[0.1, 0.0], &[0.6], &[1.5]),
        ] {
            let z = partition_trace(&w, &sp, &g).unwrap();
            let zb = partition_bruteforce(&w, &sp, &g).unwrap();
            assert!((z - zb).norm() < 1e-10 * z.norm(), "{sp:?}: {z} vs {zb}");
        }
    }

    #[test]
    fn trace_is_cyclic_in_layers() {
        let w = TetWeight::three_d_index(0.3).unwrap();
        let g = circle_grid(4).unwrap();
        let sp = spec(&[0.0], &[0.5, 0.8], &[1.9, 2.3, 2.0]);
        let z = partition_trace(&w, &sp, &g).unwrap();
        for k in 1..3 {
            let zk = partition_trace(&w, &sp.rotated_layers(k), &g).unwrap();
            assert!((z - zk).norm() < 1e-13 * z.norm());
        }
    }

    #[test]
    fn commutator_basics() {
        let w = TetWeight::three_d_index(0.3).unwrap();
        let g = circle_grid(8).unwrap();
        let sp = spec(&[0.0], &[0.5, 0.8], &[1.9]);
        let a = build_layer_transfer(&w, &sp, 1.9, &g).unwrap();
        assert_eq!(commutator_norm(&a, &a).unwrap(), 0.0);
        let c1 = build_layer_transfer(&Unit, &sp, 1.9, &g).unwrap();
        let c2 = build_layer_transfer(&Unit, &sp, 2.3, &g).unwrap();
        assert!(commutator_norm(&c1, &c2).unwrap() < 1e-15);
        let small = build_layer_transfer(&w, &spec(&[0.0], &[0.5], &[1.9]), 1.9, &g).unwrap();
        assert!(matches!(commutator_norm(&a, &small), Err(LatticeError::DimMismatch(..))));
    }

    #[test]
    fn guards() {
        let w = TetWeight::three_d_index(0.3).unwrap();
        let g = circle_grid(8).unwrap();
        let sp = spec(&[0.0], &[0.5], &[1.9]);
        assert!(matches!(
            build_layer_transfer(&w, &sp, 0.3, &g),
            Err(LatticeError::AngleDomainViolated { l: 0, m: 0, .. })
        ));
        assert!(matches!(build_layer_transfer(&w, &sp, PI + 0.1, &g), Err(LatticeError::AngleDomainViolated { .. })));
        let big = circle_grid(65).unwrap();
        assert!(matches!(
            build_layer_transfer(&w, &spec(&[0.0], &[0.5, 0.6], &[1.9]), 1.9, &big),
            Err(LatticeError::TooLarge { .. })
        ));
        let g = circle_grid(60).unwrap();
        assert!(matches!(
            partition_bruteforce(&w, &spec(&[0.0], &[0.5, 0.6], &[1.9, 2.0]), &g),
            Err(LatticeError::TooLarge { .. })
        ));
        assert!(LatticeSpec::new(vec![], vec![0.5], vec![1.0]).is_err());
        assert!(LatticeSpec { l: 2, m: 1, n: 1, s: vec![0.0], t: vec![0.5], u: vec![1.0] }.validate().is_err());
    }

    #[test]
    fn spectral_shift_invariance() {
        let w = TetWeight::three_d_index(0.3).unwrap();
        let g = circle_grid(8).unwrap();
        let sp = spec(&[0.0], &[0.7], &[1.9, 2.3]);
        let (z0, z0b) = gauge_probe(&w, &sp, &g, 0.0).unwrap();
        assert_eq!(z0, z0b);
        let (z, zc) = gauge_probe(&w, &sp, &g, 0.17).unwrap();
        assert!((z - zc).norm() < 1e-12 * z.norm());
        for &u in &sp.u {
            let a = sp.cube_angles(u).unwrap();
            let b = sp.shifted(0.17).cube_angles(u + 0.17).unwrap();
            for (x, y) in a.iter().zip(&b) {
                for (p, q) in x.as_array().iter().zip(y.as_array()) {
                    assert!((p - q).abs() < 1e-15);
                }
            }
        }
    }

    #[test]
    fn spec_json() {
        let sp: LatticeSpec =
            serde_json::from_str(r#"{"l":1,"m":2,"n":2,"s":[0.0],"t":[0.5,0.6],"u":[1.0,1.1]}"#).unwrap();
        assert!(sp.validate().is_ok());
        assert_eq!(sp.rotated_layers(1).u, vec![1.1, 1.0]);
    }
}
