use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::cmp::Ordering;

use super::CENTER;
use crate::error::{Error, Result};
use crate::model::{jacobian, LoopSpec};

/// Agreement required between the closed-form and numerical spectra.
pub const SPECTRUM_TOL: f64 = 1e-8;

/// Three eigenvalues ordered by real part, then imaginary part, descending.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    pub eigenvalues: [Complex64; 3],
}

fn descending(a: &Complex64, b: &Complex64) -> Ordering {
    b.re.partial_cmp(&a.re)
        .unwrap_or(Ordering::Equal)
        .then(b.im.partial_cmp(&a.im).unwrap_or(Ordering::Equal))
}

impl Spectrum {
    pub fn new(mut eigenvalues: [Complex64; 3]) -> Self {
        eigenvalues.sort_by(descending);
        Self { eigenvalues }
    }

    pub fn conj(&self) -> Self {
        Self::new(self.eigenvalues.map(|z| z.conj()))
    }

    pub fn max_real(&self) -> f64 {
        self.eigenvalues[0].re
    }
}

/// Eigenvalues at the symmetric point:
/// `-2(J+1)` and `(J-2) +- i sqrt(3) J (1 - 2 delta)`.
pub fn closed_form_spectrum(coupling: f64, delta: f64) -> Spectrum {
    let re = coupling - 2.0;
    let im = 3f64.sqrt() * coupling * (1.0 - 2.0 * delta);
    Spectrum::new([
        Complex64::new(-2.0 * (coupling + 1.0), 0.0),
        Complex64::new(re, im),
        Complex64::new(re, -im),
    ])
}

/// Eigenvalues of a square real matrix via the real Schur form, sorted descending.
pub fn numerical_spectrum(m: &DMatrix<f64>) -> Vec<Complex64> {
    let mut eig: Vec<Complex64> = m.clone().complex_eigenvalues().iter().copied().collect();
    eig.sort_by(descending);
    eig
}

/// Smallest max-abs distance between the two spectra over all pairings.
pub fn spectrum_distance(a: &[Complex64], b: &[Complex64]) -> f64 {
    assert_eq!(a.len(), b.len());
    let n = a.len();
    let mut best = f64::INFINITY;
    let mut perm: Vec<usize> = (0..n).collect();
    permutations(&mut perm, 0, &mut |p| {
        let d = p
            .iter()
            .enumerate()
            .map(|(i, &j)| (a[i] - b[j]).norm())
            .fold(0.0, f64::max);
        best = best.min(d);
    });
    best
}

fn permutations(p: &mut Vec<usize>, start: usize, visit: &mut impl FnMut(&[usize])) {
    if start == p.len() {
        visit(p);
        return;
    }
    for i in start..p.len() {
        p.swap(start, i);
        permutations(p, start + 1, visit);
        p.swap(start, i);
    }
}

/// Closed-form spectrum at `(1/2, 1/2, 1/2)`, cross-checked against the
/// eigenvalues of the analytic Jacobian.
pub fn symmetric_spectrum(coupling: f64, delta: f64) -> Result<Spectrum> {
    let spec = LoopSpec::clock(coupling, delta, 1)?;
    let closed = closed_form_spectrum(coupling, delta);
    let numeric = numerical_spectrum(&jacobian(&spec, &CENTER));
    let residual = spectrum_distance(&closed.eigenvalues, &numeric);
    if residual > SPECTRUM_TOL {
        return Err(Error::ConsistencyCheck {
            residual,
            tolerance: SPECTRUM_TOL,
        });
    }
    Ok(closed)
}
