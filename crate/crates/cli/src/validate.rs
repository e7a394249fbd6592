//! Built-in consistency checks with measured residuals.

use nalgebra::{DMatrix, Matrix3};
use rand::Rng;
use tdsim_core::analysis::{
    closed_form_spectrum, numerical_spectrum, rotation_matrix, spectrum_distance, z_system,
    z_system_closed_form, CENTER, SPECTRUM_TOL, Z_SYSTEM_TOL,
};
use tdsim_core::jump::density_generator;
use tdsim_core::micro::{lumped_generator, reversibility_residual, ENUMERATION_LIMIT};
use tdsim_core::model::{jacobian, vector_field};
use tdsim_core::ode::{integrate_linear, IntegratorSettings};
use tdsim_core::rng::stream_rng;
use tdsim_core::LoopSpec;

use crate::config::RunConfig;
use crate::dataset::{Cell, Dataset};
use crate::error::CliError;

pub const CHECK_COLUMNS: [&str; 5] = ["check", "status", "residual", "tolerance", "detail"];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
    Skip,
    Info,
}

impl Status {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Pass => "pass",
            Self::Fail => "fail",
            Self::Skip => "skip",
            Self::Info => "info",
        }
    }
}

struct Check {
    name: &'static str,
    status: Status,
    residual: Option<f64>,
    tolerance: Option<f64>,
    detail: String,
}

fn measured(name: &'static str, residual: f64, tolerance: f64, detail: impl Into<String>) -> Check {
    Check {
        name,
        status: if residual <= tolerance {
            Status::Pass
        } else {
            Status::Fail
        },
        residual: Some(residual),
        tolerance: Some(tolerance),
        detail: detail.into(),
    }
}

fn skipped(name: &'static str, detail: impl Into<String>) -> Check {
    Check {
        name,
        status: Status::Skip,
        residual: None,
        tolerance: None,
        detail: detail.into(),
    }
}

fn small_enough(spec: &LoopSpec) -> Result<(), String> {
    if spec.k() != 3 {
        Err(format!("needs k = 3; got k = {}", spec.k()))
    } else if spec.k() * spec.capacity() > ENUMERATION_LIMIT {
        Err(format!(
            "k*N = {} exceeds the enumeration limit {ENUMERATION_LIMIT}",
            spec.k() * spec.capacity()
        ))
    } else {
        Ok(())
    }
}

fn generator_check(spec: &LoopSpec) -> Result<Check, CliError> {
    const NAME: &str = "micro_macro_generator";
    if let Err(why) = small_enough(spec) {
        return Ok(skipped(NAME, why));
    }
    let lumped = lumped_generator(spec)?;
    let q = density_generator(spec)?;
    let residual = (lumped.matrix - q).amax().max(lumped.lumpability_defect);
    Ok(measured(
        NAME,
        residual,
        1e-12,
        "lumped spin generator vs density generator",
    ))
}

fn reversibility_check(spec: &LoopSpec) -> Result<Check, CliError> {
    const NAME: &str = "reversibility_residual";
    if let Err(why) = small_enough(spec) {
        return Ok(skipped(NAME, why));
    }
    let r = reversibility_residual(spec)?;
    if spec.coupling() == 0.0 && spec.kappa().iter().all(|&v| v == 0.0) {
        Ok(measured(NAME, r, 1e-12, "uncoupled loop is reversible"))
    } else {
        Ok(Check {
            name: NAME,
            status: Status::Info,
            residual: Some(r),
            tolerance: None,
            detail: "largest detailed-balance violation against the Gibbs measure".into(),
        })
    }
}

fn jacobian_check(spec: &LoopSpec, seed: u64) -> Check {
    let mut rng = stream_rng(seed, 0);
    let k = spec.k();
    let h = 1e-5;
    let mut worst: f64 = 0.0;
    for _ in 0..50 {
        let x: Vec<f64> = (0..k).map(|_| rng.random_range(0.0..=1.0)).collect();
        let a = jacobian(spec, &x);
        for c in 0..k {
            let (mut plus, mut minus) = (x.clone(), x.clone());
            plus[c] += h;
            minus[c] -= h;
            let (fp, fm) = (vector_field(spec, &plus), vector_field(spec, &minus));
            for r in 0..k {
                worst = worst.max((a[(r, c)] - (fp[r] - fm[r]) / (2.0 * h)).abs());
            }
        }
    }
    measured(
        "jacobian_finite_difference",
        worst,
        1e-6,
        "50 random points, central differences",
    )
}

fn rotation_check() -> Check {
    let r = rotation_matrix();
    let residual = (r.transpose() * r - Matrix3::identity()).amax();
    measured("rotation_orthonormal", residual, 1e-14, "R^T R = I")
}

fn z_system_check(spec: &LoopSpec) -> Result<Check, CliError> {
    if spec.k() != 3 {
        return Ok(skipped("z_system_closed_form", "needs k = 3"));
    }
    let (j, d) = (spec.coupling(), spec.delta());
    let residual = (z_system(j, d)? - z_system_closed_form(j, d)).amax();
    Ok(measured(
        "z_system_closed_form",
        residual,
        Z_SYSTEM_TOL,
        "R^T A R against the closed form",
    ))
}

fn spectrum_check(spec: &LoopSpec) -> Result<Check, CliError> {
    if spec.k() != 3 {
        return Ok(skipped("center_spectrum", "needs k = 3"));
    }
    let (j, d) = (spec.coupling(), spec.delta());
    let clock = LoopSpec::clock(j, d, 1)?;
    let num = numerical_spectrum(&jacobian(&clock, &CENTER));
    let residual = spectrum_distance(&num, &closed_form_spectrum(j, d).eigenvalues);
    Ok(measured(
        "center_spectrum",
        residual,
        SPECTRUM_TOL,
        "eigenvalues at the symmetric point",
    ))
}

fn polar_check(delta: f64) -> Result<Check, CliError> {
    let a = z_system(2.0, delta)?;
    let a = DMatrix::from_column_slice(3, 3, a.as_slice());
    let z0 = [0.3, -0.1, 0.2];
    let r0 = z0[0] * z0[0] + z0[1] * z0[1];
    let settings = IntegratorSettings::Rk45 {
        rtol: 1e-12,
        atol: 1e-14,
    };
    let traj = integrate_linear(&a, &z0, 10.0, settings)?;
    let drift = traj
        .states()
        .map(|s| ((s[0] * s[0] + s[1] * s[1]) - r0).abs() / r0)
        .fold(0.0, f64::max);
    Ok(measured(
        "polar_conservation",
        drift,
        1e-6,
        "z1^2 + z2^2 along the linear flow at J = 2",
    ))
}

/// Runs every check for the configured loop; failing checks make the
/// command exit with status 1 after the report is written.
pub fn run_checks(cfg: &RunConfig) -> Result<Dataset, CliError> {
    let spec = cfg.spec(cfg.capacities[0])?;
    let seed = cfg.seed.expect("validate runs with a resolved seed");
    let checks = vec![
        generator_check(&spec)?,
        reversibility_check(&spec)?,
        jacobian_check(&spec, seed),
        rotation_check(),
        z_system_check(&spec)?,
        spectrum_check(&spec)?,
        polar_check(cfg.delta)?,
    ];
    let mut data = Dataset::new(cfg.clone(), &CHECK_COLUMNS);
    let mut failed = 0;
    for c in checks {
        if c.status == Status::Fail {
            failed += 1;
        }
        data.push(vec![
            Cell::from(c.name),
            Cell::from(c.status.as_str()),
            c.residual.into(),
            c.tolerance.into(),
            Cell::Text(c.detail),
        ]);
    }
    data.summary.insert("failed".into(), Cell::Int(failed));
    Ok(data)
}
