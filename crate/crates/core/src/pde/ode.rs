use crate::classes::WeingartenPair;
use crate::error::{GeomError, Result};
use crate::grid::{Grid2, GridSpec};

use super::GridField;

/// Output of the natural ODE: a v-independent ν field plus exact ν_u per row.
#[derive(Debug, Clone)]
pub struct OdeSolution {
    pub field: GridField,
    pub nu_u: Vec<f64>,
}

/// ν″ from 𝔞²e^{2I}(J_uu + I_uJ_u − J_u²) + fg = 0 with J_uu = J″ν′² + J′ν″.
pub fn ode38_rhs(pair: &WeingartenPair, pot_i: f64, a_const: f64, nu: f64, p: f64) -> f64 {
    let j = pair.jet(nu);
    let (di, dj, d2j) = (j.di(), j.dj(), j.d2j());
    (-j.f * j.g * (-2.0 * pot_i).exp() / (a_const * a_const) - (d2j + di * dj - dj * dj) * p * p) / dj
}

/// RK4 integration of the natural ODE along u, `substeps` per grid step.
pub fn solve_ode_38(
    pair: &WeingartenPair,
    nu_at_u0: f64,
    dnu_at_u0: f64,
    spec: &GridSpec,
    a_const: f64,
    b_const: f64,
    substeps: usize,
) -> Result<OdeSolution> {
    spec.validate()?;
    if dnu_at_u0 == 0.0 || !dnu_at_u0.is_finite() {
        return Err(GeomError::pre("nu_u must be nonzero at u0 (strong regularity)"));
    }
    pair.check_sample(nu_at_u0)?;
    let pot = pair.potentials();
    let rhs = |nu: f64, p: f64| -> Result<f64> {
        pair.check_sample(nu).map_err(|_| {
            GeomError::num(format!("solution left the pair domain (nu={nu})"))
        })?;
        let (i, _) = pot.eval(nu)?;
        Ok(ode38_rhs(pair, i, a_const, nu, p))
    };
    let m = substeps.max(1);
    let h = spec.du / m as f64;
    let mut nu = nu_at_u0;
    let mut p = dnu_at_u0;
    let mut vals = vec![nu];
    let mut ders = vec![p];
    for row in 1..spec.rows {
        for _ in 0..m {
            let k1 = (p, rhs(nu, p)?);
            let k2 = (p + 0.5 * h * k1.1, rhs(nu + 0.5 * h * k1.0, p + 0.5 * h * k1.1)?);
            let k3 = (p + 0.5 * h * k2.1, rhs(nu + 0.5 * h * k2.0, p + 0.5 * h * k2.1)?);
            let k4 = (p + h * k3.1, rhs(nu + h * k3.0, p + h * k3.1)?);
            let np = p + h / 6.0 * (k1.1 + 2.0 * k2.1 + 2.0 * k3.1 + k4.1);
            nu += h / 6.0 * (k1.0 + 2.0 * k2.0 + 2.0 * k3.0 + k4.0);
            if np.signum() != p.signum() || np == 0.0 {
                return Err(GeomError::num(format!(
                    "nu_u reached 0 near u={} (strong regularity lost)",
                    spec.u(row)
                )));
            }
            p = np;
        }
        pair.check_sample(nu)
            .map_err(|_| GeomError::num(format!("solution left the pair domain at u={}", spec.u(row))))?;
        vals.push(nu);
        ders.push(p);
    }
    let values = Grid2::from_fn(spec.rows, spec.cols, |i, _| vals[i]);
    let mut field = GridField::new(*spec, values, pair.nu0, a_const, b_const)?;
    field.class_tag = pair.label();
    Ok(OdeSolution { field, nu_u: ders })
}
