//! Degrees of freedom of a line-of-sight aperture pair.
//!
//! The coupling between two linear apertures reduces, under the paraxial
//! approximation, to the sinc-kernel integral operator on `[-1, 1]`
//!
//! ```text
//! v psi(x) = integral_{-1}^{1} sin(c (x - y)) / (pi (x - y)) psi(y) dy
//! ```
//!
//! whose eigenfunctions are the prolate spheroidal wave functions. The
//! eigenvalues stay close to one up to roughly `2c/pi` and then collapse,
//! which is what the DoF estimate measures. The operator is discretised with
//! a Nyström scheme on Gauss-Legendre nodes and symmetrised as
//! `W^{1/2} K W^{1/2}` before a dense symmetric eigensolve.

use std::f64::consts::PI;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::geometry::LinkGeometry;
use crate::quadrature::GaussLegendre;

pub const DEFAULT_QUADRATURE_ORDER: usize = 512;

/// Eigenvalue ties closer than this are not treated as a violation of strict
/// decrease.
pub const DEGENERACY_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct PswfSpectrum {
    c_y: f64,
    eigenvalues: Vec<f64>,
    quadrature_order: usize,
    trace: f64,
}

impl PswfSpectrum {
    pub fn c_y(&self) -> f64 {
        self.c_y
    }

    /// Leading eigenvalues, largest first, clamped to `[0, 1]`.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn quadrature_order(&self) -> usize {
        self.quadrature_order
    }

    /// Sum of every eigenvalue of the discretised operator, including the
    /// ones not returned.
    pub fn nystrom_trace(&self) -> f64 {
        self.trace
    }

    /// `2 c / pi`, the continuous trace of the kernel.
    pub fn dof(&self) -> f64 {
        2.0 * self.c_y / PI
    }

    /// First index whose eigenvalue is below `level`, or the number of
    /// eigenvalues if none is.
    pub fn first_index_below(&self, level: f64) -> usize {
        self.eigenvalues
            .iter()
            .position(|&v| v < level)
            .unwrap_or(self.eigenvalues.len())
    }

    /// Strict decrease for every pair above `floor`, up to
    /// [`DEGENERACY_TOLERANCE`].
    pub fn is_strictly_decreasing_above(&self, floor: f64) -> bool {
        self.eigenvalues
            .windows(2)
            .take_while(|w| w[1] > floor)
            .all(|w| w[0] - w[1] > -DEGENERACY_TOLERANCE)
    }

    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }
}

/// `c_y = pi (Nt-1)(Nr-1) d_t d_r cos(theta) cos(phi) / (2 lambda r)`.
pub fn bandwidth_parameter(link: &LinkGeometry) -> f64 {
    let (tx, rx) = (link.tx(), link.rx());
    PI * tx.aperture() * rx.aperture() * tx.tilt().cos() * rx.tilt().cos()
        / (2.0 * link.wavelength() * link.distance())
}

/// DoF estimate `2 c_y / pi`.
pub fn dof_estimate(link: &LinkGeometry) -> f64 {
    2.0 * bandwidth_parameter(link) / PI
}

fn sinc_kernel(c_y: f64, x: f64, y: f64) -> f64 {
    let t = x - y;
    if t.abs() < 1e-8 {
        // sin(c t) / (pi t) = c/pi (1 - (c t)^2 / 6 + ...)
        c_y / PI * (1.0 - (c_y * t).powi(2) / 6.0)
    } else {
        (c_y * t).sin() / (PI * t)
    }
}

/// Top `count` eigenvalues of the sinc-kernel operator with bandwidth `c_y`.
pub fn pswf_eigenvalues(c_y: f64, count: usize, quadrature_order: usize) -> Result<PswfSpectrum> {
    if !(c_y > 0.0 && c_y.is_finite()) {
        return Err(Error::EmptySpectrum(c_y));
    }
    if quadrature_order == 0 || count == 0 || count > quadrature_order {
        return Err(Error::InvalidParameter(format!(
            "need 0 < count <= quadrature_order, got count {count}, order {quadrature_order}"
        )));
    }
    let rule = GaussLegendre::new(quadrature_order);
    let sqrt_w: Vec<f64> = rule.weights.iter().map(|w| w.sqrt()).collect();
    let n = quadrature_order;
    let a = DMatrix::from_fn(n, n, |i, j| {
        sqrt_w[i] * sinc_kernel(c_y, rule.nodes[i], rule.nodes[j]) * sqrt_w[j]
    });
    let trace = a.trace();
    let mut values: Vec<f64> = a.symmetric_eigenvalues().iter().copied().collect();
    values.sort_by(|x, y| y.total_cmp(x));
    values.truncate(count);
    for v in &mut values {
        *v = v.clamp(0.0, 1.0);
    }
    Ok(PswfSpectrum {
        c_y,
        eigenvalues: values,
        quadrature_order,
        trace,
    })
}
