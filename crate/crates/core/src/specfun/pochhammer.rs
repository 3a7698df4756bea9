use num_complex::Complex64;

use super::{Estimate, QParam, SpecfunError, TruncationPolicy, POLE_GUARD};

/// `(z; q)_inf = prod_{i >= 0} (1 - q^i z)`, truncated once the tail bound
/// `|P_n| (exp(|q^n z| / (1 - |q|)) - 1)` drops below `policy.tol`.
pub fn q_pochhammer(z: Complex64, q: QParam, policy: TruncationPolicy) -> Result<Estimate, SpecfunError> {
    policy.validate()?;
    product(z, q, policy, None)
}

fn product(z: Complex64, q: QParam, policy: TruncationPolicy, guard: Option<f64>) -> Result<Estimate, SpecfunError> {
    let q = q.value();
    let tail_scale = 1.0 / (1.0 - q.norm());
    let mut acc = Complex64::new(1.0, 0.0);
    let mut term = z;
    for n in 0..=policy.max_terms {
        let tail = (term.norm() * tail_scale).exp_m1() * acc.norm();
        if tail < policy.tol {
            return Ok(Estimate { value: acc, err: tail });
        }
        if n == policy.max_terms {
            break;
        }
        let factor = 1.0 - term;
        if let Some(g) = guard {
            if factor.norm() < g {
                return Err(SpecfunError::PoleHit { z, index: n, guard: g });
            }
        }
        acc *= factor;
        term *= q;
    }
    Err(SpecfunError::NonConvergent { max_terms: policy.max_terms })
}

/// `G_q(z) = (-q/z; q)_inf / (z; q)_inf`.
pub fn g_q(z: Complex64, q: QParam, policy: TruncationPolicy) -> Result<Estimate, SpecfunError> {
    policy.validate()?;
    if z == Complex64::new(0.0, 0.0) {
        return Err(SpecfunError::ZeroArgument);
    }
    let den = product(z, q, policy, Some(POLE_GUARD))?;
    let num = product(-q.value() / z, q, policy, None)?;
    let value = num.value / den.value;
    let err = if num.value.norm() > 0.0 {
        value.norm() * (num.err / num.value.norm() + den.err / den.value.norm())
    } else {
        num.err / den.value.norm()
    };
    Ok(Estimate { value, err })
}
