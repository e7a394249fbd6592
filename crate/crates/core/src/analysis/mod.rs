//! Analysis of the three-type clock module with `kappa_i = J / 2`.
//!
//! The symmetric point `(1/2, 1/2, 1/2)` is fixed for every `(J, delta)`. Its
//! linearisation is circulant, which gives the spectrum in closed form:
//! one real mode along the diagonal with eigenvalue `-2(J + 1)` and a
//! rotating pair `(J - 2) +- i sqrt(3) J (1 - 2 delta)`. The diagonal mode
//! crosses zero at `J = -1` (pitchfork: two stable points appear on the
//! diagonal), the pair crosses the imaginary axis at `J = 2` (Hopf: a stable
//! orbit appears) unless `delta = 1/2`, where the pair is real.

mod bifurcation;
mod convergence;
mod linear;
mod spectrum;

pub use bifurcation::{
    branch_residual, classify, classify_with, diagonal_axis_value, fixed_point_branch,
    orbit_extrema, scan, scan_with, BifurcationRecord, Classification, ClassifyOptions, FixedPoint,
    OrbitExtrema, Stability, EPS_AMPLITUDE, EPS_LAMBDA,
};
pub use convergence::{convergence_experiment, quantile, ConvergenceRow, ConvergenceTable};
pub use linear::{polar_rates, rotation_matrix, z_system, z_system_closed_form, Z_SYSTEM_TOL};
pub use spectrum::{
    closed_form_spectrum, numerical_spectrum, spectrum_distance, symmetric_spectrum, Spectrum,
    SPECTRUM_TOL,
};

/// The symmetric fixed point.
pub const CENTER: [f64; 3] = [0.5, 0.5, 0.5];
