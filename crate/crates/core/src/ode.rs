//! Deterministic integration of the fluid limit `x' = F(x)` and of small
//! linear systems `z' = A z`.
//!
//! Two explicit schemes are available: classical fixed-step RK4 and the
//! Dormand–Prince 5(4) embedded pair with step-size control. Both record the
//! derivative at every accepted point, so the returned [`Trajectory`] has
//! cubic Hermite dense output.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{vector_field_into, LoopSpec};
use crate::trajectory::{Trajectory, TrajectoryKind, TrajectoryMeta};

pub const DEFAULT_RK4_STEP: f64 = 1e-3;
pub const DEFAULT_RTOL: f64 = 1e-8;
pub const DEFAULT_ATOL: f64 = 1e-10;

/// Transient discarded before an asymptotic orbit is measured.
pub const T_BURN: f64 = 200.0;
/// Window over which asymptotic extrema are recorded.
pub const T_OBS: f64 = 100.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "lowercase")]
pub enum IntegratorSettings {
    Rk4 { step: f64 },
    Rk45 { rtol: f64, atol: f64 },
}

impl Default for IntegratorSettings {
    fn default() -> Self {
        Self::rk45()
    }
}

impl IntegratorSettings {
    pub fn rk4() -> Self {
        Self::Rk4 {
            step: DEFAULT_RK4_STEP,
        }
    }

    pub fn rk45() -> Self {
        Self::Rk45 {
            rtol: DEFAULT_RTOL,
            atol: DEFAULT_ATOL,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            Self::Rk4 { step } if !(step.is_finite() && step > 0.0) => Err(Error::param(
                "step",
                format!("must be positive, got {step}"),
            )),
            Self::Rk45 { rtol, atol }
                if !(rtol.is_finite() && atol.is_finite() && rtol > 0.0 && atol >= 0.0) =>
            {
                Err(Error::param(
                    "rtol",
                    format!("invalid tolerances rtol={rtol}, atol={atol}"),
                ))
            }
            _ => Ok(()),
        }
    }
}

/// Solves `x' = F(x)` for the loop on `[0, t_end]`.
pub fn integrate(
    spec: &LoopSpec,
    x0: &[f64],
    t_end: f64,
    settings: IntegratorSettings,
) -> Result<Trajectory> {
    if x0.len() != spec.k() {
        return Err(Error::DimensionMismatch {
            expected: spec.k(),
            got: x0.len(),
        });
    }
    if let Some(v) = x0
        .iter()
        .find(|v| !v.is_finite() || !(0.0..=1.0).contains(*v))
    {
        return Err(Error::InvalidState(format!(
            "initial density {v} outside [0, 1]"
        )));
    }
    integrate_field(
        |x, out| vector_field_into(spec, x, out),
        x0,
        t_end,
        settings,
    )
}

/// Solves `z' = A z` on `[0, t_end]`.
pub fn integrate_linear(
    a: &DMatrix<f64>,
    z0: &[f64],
    t_end: f64,
    settings: IntegratorSettings,
) -> Result<Trajectory> {
    if !a.is_square() || a.nrows() != z0.len() {
        return Err(Error::DimensionMismatch {
            expected: a.nrows(),
            got: z0.len(),
        });
    }
    let n = z0.len();
    integrate_field(
        |z, out| {
            for (i, o) in out.iter_mut().enumerate() {
                *o = (0..n).map(|j| a[(i, j)] * z[j]).sum();
            }
        },
        z0,
        t_end,
        settings,
    )
}

/// Integrates an autonomous field `f(x, out)` from `x0` over `[0, t_end]`.
pub fn integrate_field<F>(
    mut field: F,
    x0: &[f64],
    t_end: f64,
    settings: IntegratorSettings,
) -> Result<Trajectory>
where
    F: FnMut(&[f64], &mut [f64]),
{
    settings.validate()?;
    if !t_end.is_finite() || t_end < 0.0 {
        return Err(Error::param(
            "t_end",
            format!("must be finite and >= 0, got {t_end}"),
        ));
    }
    if x0.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFiniteState { time: 0.0 });
    }
    let mut traj = Trajectory::new(
        x0.len(),
        TrajectoryKind::Deterministic,
        TrajectoryMeta::Ode { settings },
    )
    .with_slopes();
    let mut f0 = vec![0.0; x0.len()];
    field(x0, &mut f0);
    traj.push_with_slope(0.0, x0, &f0);
    if t_end == 0.0 {
        return Ok(traj);
    }
    match settings {
        IntegratorSettings::Rk4 { step } => rk4(&mut field, x0, f0, t_end, step, &mut traj)?,
        IntegratorSettings::Rk45 { rtol, atol } => {
            dopri5(&mut field, x0, f0, t_end, rtol, atol, &mut traj)?
        }
    }
    Ok(traj)
}

fn check_finite(x: &[f64], t: f64) -> Result<()> {
    if x.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFiniteState { time: t })
    }
}

fn rk4<F>(
    field: &mut F,
    x0: &[f64],
    f0: Vec<f64>,
    t_end: f64,
    step: f64,
    traj: &mut Trajectory,
) -> Result<()>
where
    F: FnMut(&[f64], &mut [f64]),
{
    let n = x0.len();
    let mut x = x0.to_vec();
    let mut k1 = f0;
    let (mut k2, mut k3, mut k4) = (vec![0.0; n], vec![0.0; n], vec![0.0; n]);
    let mut tmp = vec![0.0; n];
    let steps = (t_end / step).ceil().max(1.0) as u64;
    let mut t = 0.0;
    for s in 1..=steps {
        // Step boundaries are i*h so the grid does not drift.
        let t_next = if s == steps { t_end } else { s as f64 * step };
        let h = t_next - t;
        for i in 0..n {
            tmp[i] = x[i] + 0.5 * h * k1[i];
        }
        field(&tmp, &mut k2);
        for i in 0..n {
            tmp[i] = x[i] + 0.5 * h * k2[i];
        }
        field(&tmp, &mut k3);
        for i in 0..n {
            tmp[i] = x[i] + h * k3[i];
        }
        field(&tmp, &mut k4);
        for i in 0..n {
            x[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        t = t_next;
        check_finite(&x, t)?;
        field(&x, &mut k1);
        traj.push_with_slope(t, &x, &k1);
    }
    Ok(())
}

// Dormand–Prince 5(4) tableau.
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
// b - b_hat
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

fn dopri5<F>(
    field: &mut F,
    x0: &[f64],
    f0: Vec<f64>,
    t_end: f64,
    rtol: f64,
    atol: f64,
    traj: &mut Trajectory,
) -> Result<()>
where
    F: FnMut(&[f64], &mut [f64]),
{
    let n = x0.len();
    let mut x = x0.to_vec();
    let mut k1 = f0;
    let mut k: Vec<Vec<f64>> = vec![vec![0.0; n]; 6];
    let mut tmp = vec![0.0; n];
    let mut x_new = vec![0.0; n];

    let scale = |a: f64, b: f64| atol + rtol * a.abs().max(b.abs());
    let rms = |v: &[f64]| (v.iter().map(|e| e * e).sum::<f64>() / n as f64).sqrt();

    // Starting step from the local scale of x and x'.
    let d0 = rms(&x.iter().map(|v| v / scale(*v, *v)).collect::<Vec<_>>());
    let d1 = rms(&x
        .iter()
        .zip(&k1)
        .map(|(v, f)| f / scale(*v, *v))
        .collect::<Vec<_>>());
    let mut h = if d0 < 1e-5 || d1 < 1e-5 {
        1e-6
    } else {
        0.01 * d0 / d1
    };
    h = h.min(t_end);

    let mut t = 0.0;
    while t < t_end {
        if t + h > t_end {
            h = t_end - t;
        }
        if h < 1e-14 * t.abs().max(1.0) {
            return Err(Error::StepSizeUnderflow { time: t, step: h });
        }
        for i in 0..n {
            tmp[i] = x[i] + h * A21 * k1[i];
        }
        field(&tmp, &mut k[0]);
        for i in 0..n {
            tmp[i] = x[i] + h * (A31 * k1[i] + A32 * k[0][i]);
        }
        field(&tmp, &mut k[1]);
        for i in 0..n {
            tmp[i] = x[i] + h * (A41 * k1[i] + A42 * k[0][i] + A43 * k[1][i]);
        }
        field(&tmp, &mut k[2]);
        for i in 0..n {
            tmp[i] = x[i] + h * (A51 * k1[i] + A52 * k[0][i] + A53 * k[1][i] + A54 * k[2][i]);
        }
        field(&tmp, &mut k[3]);
        for i in 0..n {
            tmp[i] = x[i]
                + h * (A61 * k1[i] + A62 * k[0][i] + A63 * k[1][i] + A64 * k[2][i] + A65 * k[3][i]);
        }
        field(&tmp, &mut k[4]);
        for i in 0..n {
            x_new[i] =
                x[i] + h * (B1 * k1[i] + B3 * k[1][i] + B4 * k[2][i] + B5 * k[3][i] + B6 * k[4][i]);
        }
        field(&x_new, &mut k[5]);

        let mut err = 0.0;
        for i in 0..n {
            let e = h
                * (E1 * k1[i]
                    + E3 * k[1][i]
                    + E4 * k[2][i]
                    + E5 * k[3][i]
                    + E6 * k[4][i]
                    + E7 * k[5][i]);
            let s = e / scale(x[i], x_new[i]);
            err += s * s;
        }
        let err = (err / n as f64).sqrt();
        if !err.is_finite() {
            check_finite(&x_new, t + h)?;
            h *= 0.2;
            continue;
        }

        let factor = if err == 0.0 {
            5.0
        } else {
            (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
        };
        if err <= 1.0 {
            t = if t + h >= t_end { t_end } else { t + h };
            std::mem::swap(&mut x, &mut x_new);
            check_finite(&x, t)?;
            k1.copy_from_slice(&k[5]);
            traj.push_with_slope(t, &x, &k1);
            h *= factor;
        } else {
            h *= factor.min(1.0);
        }
    }
    Ok(())
}
