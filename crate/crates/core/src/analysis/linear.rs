use nalgebra::{DMatrix, Matrix3};

use super::CENTER;
use crate::error::{Error, Result};
use crate::model::{jacobian, LoopSpec};

pub const Z_SYSTEM_TOL: f64 = 1e-10;

/// Orthonormal change of basis `z = R^T y` (`y = x - 1/2`). The third
/// column is the diagonal direction, so `z_3` measures motion along
/// `(1, 1, 1)` and `(z_1, z_2)` spans the plane orthogonal to it.
#[rustfmt::skip]
pub fn rotation_matrix() -> Matrix3<f64> {
    let s6 = 6f64.sqrt();
    let s2 = 2f64.sqrt();
    let s3 = 3f64.sqrt();
    Matrix3::new(
        1.0 / s6, -1.0 / s2, 1.0 / s3,
        1.0 / s6, 1.0 / s2, 1.0 / s3,
        -2.0 / s6, 0.0, 1.0 / s3,
    )
}

/// Linearisation at the symmetric point in rotated coordinates.
#[rustfmt::skip]
pub fn z_system_closed_form(coupling: f64, delta: f64) -> Matrix3<f64> {
    let w = 3f64.sqrt() * coupling * (2.0 * delta - 1.0);
    let r = coupling - 2.0;
    Matrix3::new(
        r, w, 0.0,
        -w, r, 0.0,
        0.0, 0.0, -(2.0 * coupling + 2.0),
    )
}

/// `R^T DF(1/2, 1/2, 1/2) R`, verified against [`z_system_closed_form`].
pub fn z_system(coupling: f64, delta: f64) -> Result<Matrix3<f64>> {
    let spec = LoopSpec::clock(coupling, delta, 1)?;
    let jac: DMatrix<f64> = jacobian(&spec, &CENTER);
    let a = Matrix3::from_iterator(jac.iter().copied());
    let r = rotation_matrix();
    let rotated = r.transpose() * a * r;
    let residual = (rotated - z_system_closed_form(coupling, delta)).amax();
    if residual > Z_SYSTEM_TOL {
        return Err(Error::ConsistencyCheck {
            residual,
            tolerance: Z_SYSTEM_TOL,
        });
    }
    Ok(rotated)
}

/// Polar form of the planar part: `r' = (J - 2) r`, `theta' = -sqrt(3) J (2 delta - 1)`.
/// Returns `(radial rate, angular rate)`.
pub fn polar_rates(coupling: f64, delta: f64) -> (f64, f64) {
    (
        coupling - 2.0,
        -(3f64.sqrt()) * coupling * (2.0 * delta - 1.0),
    )
}
