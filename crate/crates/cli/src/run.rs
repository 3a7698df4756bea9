//! Executes validated plans into report records.

use std::time::Instant;

use serde_json::json;
use thiserror::Error;

use tetraweight::identities::{
    blows_up, pentagon_suite, sweep_eps, te6_suite, verify_te4, IdentityError, PentagonVariant, Quadrature,
    ResidualReport, Te6Externals,
};
use tetraweight::lattice::{
    build_layer_transfer, commutator_norm, gauge_probe, partition_bruteforce, partition_trace, LatticeError,
};
use tetraweight::quadrature::{circle_grid, Grid};
use tetraweight::report::Record;
use tetraweight::sampling::{random_state, suite_rng};
use tetraweight::shapes::reference_pentagon_angles;
use tetraweight::specfun::{g_q, FaddeevDilog, QParam, SpecfunError, TruncationPolicy};
use tetraweight::weights::{eval_t, rotate_z2, rotate_z3, transpose_t, EdgeStates, TetWeight};
use tetraweight::{AngleTriple, Complex64, LatticeSpec, RhoSix, TetrahedralWeight};

use crate::job::{Plan, Task};

#[derive(Debug, Error)]
pub enum RunError {
    #[error(transparent)]
    Identity(#[from] IdentityError),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Specfun(#[from] SpecfunError),
    #[error("{0}")]
    Other(String),
}

fn rel(a: Complex64, b: Complex64) -> f64 {
    let d = (a - b).norm();
    if d == 0.0 {
        0.0
    } else {
        d / (a.norm() + b.norm())
    }
}

fn z_json(z: Complex64) -> serde_json::Value {
    json!([z.re, z.im])
}

fn residual_rows(command: &str, reports: &[ResidualReport]) -> Vec<Record> {
    reports.iter().map(|r| Record::from_residual(command, r)).collect()
}

fn lattice_grid(plan: &Plan) -> Result<&Grid, RunError> {
    plan.grid.as_ref().ok_or_else(|| RunError::Other("lattice command without a grid".into()))
}

fn lattice_row(
    plan: &Plan,
    rel_residual: f64,
    abs_residual: f64,
    detail: serde_json::Value,
) -> Result<Record, RunError> {
    Ok(Record::new(
        plan.command.name(),
        plan.weight.params().to_string(),
        rel_residual,
        abs_residual,
        lattice_grid(plan)?.meta().to_string(),
        None,
        detail,
    ))
}

/// Runs `plan`; `timings` fills `wall_ms`.
pub fn execute(plan: &Plan, timings: bool) -> Result<Vec<Record>, RunError> {
    let t0 = Instant::now();
    let cmd = plan.command.name();
    let w = &plan.weight;
    let mut rows = match &plan.task {
        Task::Pentagon { angles, variant } => {
            residual_rows(cmd, &pentagon_suite(w, angles, &plan.quad, *variant, plan.instances, plan.seed)?)
        }
        Task::Te6 { rho } => residual_rows(cmd, &te6_suite(w, rho, &plan.quad, plan.instances, plan.seed)?),
        Task::Te4 { r, eps, delta } => {
            let mut rng = suite_rng(plan.seed);
            let mut rows = Vec::new();
            for _ in 0..plan.instances {
                let x = Te6Externals::random(&mut rng, w.state_space());
                let mut rep = verify_te4(w, r, &x, &plan.quad, *eps, *delta)?;
                rep.seed = Some(plan.seed);
                rows.push(Record::from_residual(cmd, &rep));
            }
            rows
        }
        Task::Sweep { r, deltas } => {
            let (points, reports) = sweep_eps(w, r, &plan.quad, deltas, plan.instances, plan.seed)?;
            let mut rows = residual_rows(cmd, &reports);
            let worst = points.iter().map(|p| p.max_rel_residual).fold(0.0, f64::max);
            let grid = reports.first().map(|r| r.grid.to_string()).unwrap_or_default();
            rows.push(Record::new(
                "sweep-eps-trend",
                w.params().to_string(),
                worst,
                0.0,
                grid,
                Some(plan.seed),
                json!({ "r": r, "points": points, "blows_up": blows_up(&points) }),
            ));
            rows
        }
        Task::Commute { spec } => {
            let grid = lattice_grid(plan)?;
            let taus = spec.u.iter().map(|&u| build_layer_transfer(w, spec, u, grid)).collect::<Result<Vec<_>, _>>()?;
            let mut rows = Vec::new();
            for i in 0..taus.len() {
                for j in i + 1..taus.len() {
                    let norm = commutator_norm(&taus[i], &taus[j])?;
                    let detail = json!({ "lattice": spec, "u": [spec.u[i], spec.u[j]], "dim": taus[i].dim() });
                    rows.push(lattice_row(plan, norm, norm, detail)?);
                }
            }
            rows
        }
        Task::Partition { spec } => {
            let grid = lattice_grid(plan)?;
            let z = partition_trace(w, spec, grid)?;
            let zb = partition_bruteforce(w, spec, grid)?;
            let detail = json!({ "lattice": spec, "z_trace": z_json(z), "z_bruteforce": z_json(zb) });
            vec![lattice_row(plan, rel(z, zb), (z - zb).norm(), detail)?]
        }
        Task::Gauge { spec, shift } => {
            let grid = lattice_grid(plan)?;
            let (z, zc) = gauge_probe(w, spec, grid, *shift)?;
            let detail = json!({ "lattice": spec, "shift": shift, "z": z_json(z), "z_shifted": z_json(zc) });
            vec![lattice_row(plan, rel(z, zc), (z - zc).norm(), detail)?]
        }
        Task::Selftest => selftest(plan.seed)?,
    };
    if timings {
        let ms = t0.elapsed().as_millis() as u64;
        for r in &mut rows {
            r.wall_ms = ms;
        }
    }
    Ok(rows)
}

fn check_row(name: &str, model: &str, rel_residual: f64, grid: String, seed: u64, detail: serde_json::Value) -> Record {
    let mut detail = detail;
    detail["check"] = json!(name);
    Record::new("selftest", model.to_string(), rel_residual, rel_residual, grid, Some(seed), detail)
}

/// A quick pass over the pinned invariants: inversion relations, weight
/// symmetries, pentagon and tetrahedron identities for the 3D index, one
/// KLV pentagon, trace against brute force, and the spectral shift.
fn selftest(seed: u64) -> Result<Vec<Record>, RunError> {
    let mut rows = Vec::new();
    let mut rng = suite_rng(seed);
    let idx = TetWeight::three_d_index(0.3).map_err(|e| RunError::Other(e.to_string()))?;
    let klv = TetWeight::klv(1.0).map_err(|e| RunError::Other(e.to_string()))?;

    let f = FaddeevDilog::with_b(1.0)?;
    let mut worst = 0.0_f64;
    for k in 0..20 {
        let x = Complex64::new(-3.0 + 0.3 * k as f64 + 0.01, 0.0);
        worst = worst.max((f.psi_value(x)? * f.psi_value(-x)? - 1.0).norm());
    }
    rows.push(check_row("psi-inversion", "klv(b=1)", worst, "contour".into(), seed, json!({})));

    let q = QParam::new(0.3)?;
    let mut worst = 0.0_f64;
    for k in 0..20 {
        let z = Complex64::from_polar(0.7, 0.3 + 0.29 * k as f64);
        let v = g_q(z, q, TruncationPolicy::default())?.value * g_q(-0.3 / z, q, TruncationPolicy::default())?.value;
        worst = worst.max((v - 1.0).norm());
    }
    rows.push(check_row("g-inversion", "3dindex(q=0.3)", worst, "series".into(), seed, json!({})));

    for w in [&idx, &klv] {
        let space = w.state_space();
        let mut worst = 0.0_f64;
        for _ in 0..20 {
            let alpha = AngleTriple::from_outer(0.4, 0.9).map_err(|e| RunError::Other(e.to_string()))?;
            let s = |r: &mut _| random_state(r, space);
            let x = EdgeStates::new([s(&mut rng), s(&mut rng), s(&mut rng)], [s(&mut rng), s(&mut rng), s(&mut rng)]);
            let e = |a: &AngleTriple, x: &EdgeStates| eval_t(w, a, x).map_err(|e| RunError::Other(e.to_string()));
            let t = e(&alpha, &x)?;
            let (a3, x3) = rotate_z3(&alpha, &x);
            let tr = transpose_t(w, &alpha, &x).map_err(|e| RunError::Other(e.to_string()))?;
            for v in [e(&alpha, &rotate_z2(&x))?, e(&a3, &x3)?, tr] {
                worst = worst.max((v - t).norm() / t.norm());
            }
        }
        rows.push(check_row("symmetries", &w.params().to_string(), worst, "none".into(), seed, json!({})));
    }

    let angles = reference_pentagon_angles();
    let quad = Quadrature::Fixed(circle_grid(256).map_err(|e| RunError::Other(e.to_string()))?);
    rows.extend(residual_rows("selftest", &pentagon_suite(&idx, &angles, &quad, PentagonVariant::Standard, 3, seed)?));
    let kquad = Quadrature::for_model(&klv, 0).map_err(|e| RunError::Other(e.to_string()))?;
    rows.extend(residual_rows("selftest", &pentagon_suite(&klv, &angles, &kquad, PentagonVariant::Standard, 1, seed)?));
    let rho = RhoSix::new([0.0, 0.1, 0.2, 0.6, 0.65, 0.7]);
    let quad = Quadrature::Fixed(circle_grid(2048).map_err(|e| RunError::Other(e.to_string()))?);
    rows.extend(residual_rows("selftest", &te6_suite(&idx, &rho, &quad, 2, seed)?));

    let spec = LatticeSpec::new(vec![0.0], vec![0.7], vec![1.9, 2.3])?;
    let g = circle_grid(16).map_err(|e| RunError::Other(e.to_string()))?;
    let z = partition_trace(&idx, &spec, &g)?;
    let zb = partition_bruteforce(&idx, &spec, &g)?;
    rows.push(check_row("trace-bruteforce", "3dindex(q=0.3)", rel(z, zb), g.meta().to_string(), seed, json!({})));
    let (z, zc) = gauge_probe(&idx, &spec, &g, 0.17)?;
    rows.push(check_row("spectral-shift", "3dindex(q=0.3)", rel(z, zc), g.meta().to_string(), seed, json!({})));
    let a = build_layer_transfer(&idx, &spec, 1.9, &g)?;
    let b = build_layer_transfer(&idx, &spec, 2.3, &g)?;
    rows.push(check_row(
        "commutator",
        "3dindex(q=0.3)",
        commutator_norm(&a, &b)?,
        g.meta().to_string(),
        seed,
        json!({}),
    ));
    Ok(rows)
}
