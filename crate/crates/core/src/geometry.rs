//! Uniform linear array geometry and line-of-sight channel synthesis.
//!
//! Arrays live in the x-y plane. The transmitter is centred at the origin and
//! the receiver at `(distance, 0, 0)`, so the line of centres is the x axis.
//! An array with tilt `t` lies along `(-sin t, cos t, 0)`; zero tilt gives a
//! pair of parallel, broadside arrays.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, CVector};

pub type Point = [f64; 3];

#[derive(Debug, Clone, PartialEq)]
pub struct ArrayGeometry {
    num_elements: usize,
    spacing: f64,
    tilt: f64,
    center: Point,
}

impl ArrayGeometry {
    pub fn new(num_elements: usize, spacing: f64, tilt: f64, center: Point) -> Result<Self> {
        if num_elements == 0 {
            return Err(Error::InvalidParameter("array needs at least one element".into()));
        }
        if !(spacing > 0.0 && spacing.is_finite()) {
            return Err(Error::InvalidParameter(format!("spacing must be positive, got {spacing}")));
        }
        if tilt.is_nan() || tilt.abs() >= PI / 2.0 {
            return Err(Error::InvalidParameter(format!("|tilt| must be below pi/2, got {tilt}")));
        }
        if center.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidParameter("array center must be finite".into()));
        }
        Ok(Self { num_elements, spacing, tilt, center })
    }

    /// Untilted array centred at the origin.
    pub fn ula(num_elements: usize, spacing: f64) -> Result<Self> {
        Self::new(num_elements, spacing, 0.0, [0.0; 3])
    }

    pub fn num_elements(&self) -> usize {
        self.num_elements
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn tilt(&self) -> f64 {
        self.tilt
    }

    pub fn center(&self) -> Point {
        self.center
    }

    /// Physical length `(N - 1) d`.
    pub fn aperture(&self) -> f64 {
        (self.num_elements - 1) as f64 * self.spacing
    }

    pub fn axis(&self) -> Point {
        [-self.tilt.sin(), self.tilt.cos(), 0.0]
    }

    fn with_center(&self, center: Point) -> Self {
        Self { center, ..self.clone() }
    }
}

/// Element positions, ordered along the array axis, with the centroid at the
/// array center.
pub fn element_positions(array: &ArrayGeometry) -> Vec<Point> {
    let axis = array.axis();
    let mid = (array.num_elements as f64 - 1.0) / 2.0;
    (0..array.num_elements)
        .map(|k| {
            let offset = (k as f64 - mid) * array.spacing;
            [
                array.center[0] + offset * axis[0],
                array.center[1] + offset * axis[1],
                array.center[2] + offset * axis[2],
            ]
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinkGeometry {
    tx: ArrayGeometry,
    rx: ArrayGeometry,
    distance: f64,
    wavelength: f64,
}

impl LinkGeometry {
    /// Places `tx` at the origin and `rx` at `(distance, 0, 0)`; any centers
    /// carried by the inputs are replaced.
    pub fn new(tx: ArrayGeometry, rx: ArrayGeometry, distance: f64, wavelength: f64) -> Result<Self> {
        if !(distance > 0.0 && distance.is_finite()) {
            return Err(Error::InvalidParameter(format!("distance must be positive, got {distance}")));
        }
        if !(wavelength > 0.0 && wavelength.is_finite()) {
            return Err(Error::InvalidParameter(format!("wavelength must be positive, got {wavelength}")));
        }
        Ok(Self {
            tx: tx.with_center([0.0; 3]),
            rx: rx.with_center([distance, 0.0, 0.0]),
            distance,
            wavelength,
        })
    }

    /// Parallel pair of identical-spacing ULAs.
    pub fn parallel(num_tx: usize, num_rx: usize, spacing: f64, distance: f64, wavelength: f64) -> Result<Self> {
        Self::new(
            ArrayGeometry::ula(num_tx, spacing)?,
            ArrayGeometry::ula(num_rx, spacing)?,
            distance,
            wavelength,
        )
    }

    pub fn tx(&self) -> &ArrayGeometry {
        &self.tx
    }

    pub fn rx(&self) -> &ArrayGeometry {
        &self.rx
    }

    pub fn distance(&self) -> f64 {
        self.distance
    }

    pub fn wavelength(&self) -> f64 {
        self.wavelength
    }

    /// Same arrays and wavelength at another separation.
    pub fn at_distance(&self, distance: f64) -> Result<Self> {
        Self::new(self.tx.clone(), self.rx.clone(), distance, self.wavelength)
    }

    /// Link with the roles of the two arrays exchanged.
    pub fn reversed(&self) -> Self {
        // Mirroring the plane about x = distance/2 maps a tilt t to -t.
        let flip = |a: &ArrayGeometry| ArrayGeometry { tilt: -a.tilt, ..a.clone() };
        Self::new(flip(&self.rx), flip(&self.tx), self.distance, self.wavelength)
            .expect("validated link stays valid when reversed")
    }

    /// Departure and arrival angles of the center-to-center ray, measured
    /// from each array's normal.
    pub fn center_angles(&self) -> (f64, f64) {
        (self.tx.tilt, self.rx.tilt)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChannelModel {
    NearField,
    FarField,
}

/// `Nr x Nt` narrowband channel.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelMatrix {
    entries: CMatrix,
    wavelength: f64,
    model: ChannelModel,
}

impl ChannelMatrix {
    pub fn new(entries: CMatrix, wavelength: f64, model: ChannelModel) -> Result<Self> {
        if entries.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidParameter("channel entries must be finite".into()));
        }
        if entries.nrows() == 0 || entries.ncols() == 0 {
            return Err(Error::InvalidParameter("channel must be non-empty".into()));
        }
        Ok(Self { entries, wavelength, model })
    }

    pub fn entries(&self) -> &CMatrix {
        &self.entries
    }

    pub fn into_entries(self) -> CMatrix {
        self.entries
    }

    pub fn wavelength(&self) -> f64 {
        self.wavelength
    }

    pub fn model(&self) -> ChannelModel {
        self.model
    }

    pub fn num_rx(&self) -> usize {
        self.entries.nrows()
    }

    pub fn num_tx(&self) -> usize {
        self.entries.ncols()
    }

    pub fn power(&self) -> f64 {
        linalg::frobenius_norm_sqr(&self.entries)
    }

    /// Copy rescaled so that `||H||_F^2 == channel_power`.
    pub fn normalized_to(&self, channel_power: f64) -> Result<Self> {
        if channel_power.is_nan() || channel_power <= 0.0 {
            return Err(Error::InvalidParameter(format!("channel power must be positive, got {channel_power}")));
        }
        let scale = (channel_power / self.power()).sqrt();
        Ok(Self {
            entries: self.entries.map(|z| z * scale),
            ..self.clone()
        })
    }
}

fn distance(a: &Point, b: &Point) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2)).sqrt()
}

/// Spherical-wavefront LoS channel with unit path gains:
/// `H[p, q] = exp(-j 2 pi r_pq / lambda)`.
pub fn near_field_channel(link: &LinkGeometry) -> Result<ChannelMatrix> {
    let tx = element_positions(&link.tx);
    let rx = element_positions(&link.rx);
    let k = 2.0 * PI / link.wavelength;
    let mut h = CMatrix::zeros(rx.len(), tx.len());
    for (p, rp) in rx.iter().enumerate() {
        for (q, tq) in tx.iter().enumerate() {
            let r = distance(rp, tq);
            if r <= 1e-9 * link.wavelength {
                return Err(Error::DegenerateGeometry { rx: p, tx: q });
            }
            // reduce the path length modulo lambda before forming the phase
            let phase = -k * (r % link.wavelength);
            h[(p, q)] = Complex64::from_polar(1.0, phase);
        }
    }
    ChannelMatrix::new(h, link.wavelength, ChannelModel::NearField)
}

/// Far-field ULA response `(1/sqrt N) [exp(j 2 pi d k sin(angle) / lambda)]_k`.
pub fn array_response(num_elements: usize, spacing: f64, wavelength: f64, angle: f64) -> CVector {
    let norm = 1.0 / (num_elements as f64).sqrt();
    let step = 2.0 * PI * spacing * angle.sin() / wavelength;
    CVector::from_fn(num_elements, |k, _| Complex64::from_polar(norm, step * k as f64))
}

/// Rank-one planar-wavefront LoS channel `sqrt(Nt Nr) a_r(aoa) a_t(aod)^H`,
/// scaled so every entry has unit magnitude like the near-field model.
pub fn far_field_channel(link: &LinkGeometry, aod: f64, aoa: f64) -> Result<ChannelMatrix> {
    let (nt, nr) = (link.tx.num_elements, link.rx.num_elements);
    let a_t = array_response(nt, link.tx.spacing, link.wavelength, aod);
    let a_r = array_response(nr, link.rx.spacing, link.wavelength, aoa);
    let gain = ((nt * nr) as f64).sqrt();
    let h = (a_r * a_t.adjoint()).map(|z| z * gain);
    ChannelMatrix::new(h, link.wavelength, ChannelModel::FarField)
}

/// Classical `2 D^2 / lambda` boundary of the radiating near field.
pub fn rayleigh_distance(aperture: f64, wavelength: f64) -> f64 {
    2.0 * aperture * aperture / wavelength
}

/// `|<A, B>| / (||A|| ||B||)` over the Frobenius inner product.
pub fn channel_correlation(a: &ChannelMatrix, b: &ChannelMatrix) -> f64 {
    let inner: Complex64 = a
        .entries
        .iter()
        .zip(b.entries.iter())
        .map(|(x, y)| x.conj() * y)
        .sum();
    inner.norm() / (a.power() * b.power()).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    const LAMBDA: f64 = 3e-3;

    fn gap(a: &Point, b: &Point) -> f64 {
        distance(a, b)
    }

    #[test]
    fn single_element_sits_at_center() {
        let a = ArrayGeometry::new(1, 1.0, 0.0, [0.0; 3]).unwrap();
        assert_eq!(element_positions(&a), vec![[0.0, 0.0, 0.0]]);
    }

    #[test]
    fn two_elements_straddle_center() {
        let a = ArrayGeometry::ula(2, 1.0).unwrap();
        let p = element_positions(&a);
        assert_relative_eq!(p[0][1], -0.5);
        assert_relative_eq!(p[1][1], 0.5);
        assert_eq!(p[0][0], 0.0);
    }

    #[test]
    fn consecutive_gaps_equal_spacing() {
        let a = ArrayGeometry::new(3, 2.0, 0.4, [1.0, -2.0, 0.5]).unwrap();
        let p = element_positions(&a);
        assert_relative_eq!(gap(&p[0], &p[1]), 2.0, epsilon = 1e-12);
        assert_relative_eq!(gap(&p[1], &p[2]), 2.0, epsilon = 1e-12);
        assert_relative_eq!(p[1][0], 1.0, epsilon = 1e-12);
        assert_relative_eq!(p[1][1], -2.0, epsilon = 1e-12);
    }

    #[test]
    fn rejects_invalid_arrays() {
        assert!(ArrayGeometry::ula(0, 1.0).is_err());
        assert!(ArrayGeometry::ula(4, 0.0).is_err());
        assert!(ArrayGeometry::new(4, 1.0, PI / 2.0, [0.0; 3]).is_err());
        assert!(LinkGeometry::parallel(2, 2, 1.0, 0.0, 1.0).is_err());
        assert!(LinkGeometry::parallel(2, 2, 1.0, 1.0, -1.0).is_err());
    }

    #[test]
    fn full_wavelength_wraps_to_unity() {
        let link = LinkGeometry::parallel(1, 1, LAMBDA / 2.0, LAMBDA, LAMBDA).unwrap();
        let h = near_field_channel(&link).unwrap();
        assert_relative_eq!(h.entries()[(0, 0)].re, 1.0, epsilon = 1e-12);
        assert!(h.entries()[(0, 0)].im.abs() < 1e-12);
    }

    #[test]
    fn two_by_two_matches_pairwise_distances() {
        let d = LAMBDA / 2.0;
        let r = 10.0 * LAMBDA;
        let link = LinkGeometry::parallel(2, 2, d, r, LAMBDA).unwrap();
        let h = near_field_channel(&link).unwrap();
        // Independent placement: tx at (0, +-d/2), rx at (r, +-d/2).
        let ys = [-d / 2.0, d / 2.0];
        for p in 0..2 {
            for q in 0..2 {
                let rpq = (r * r + (ys[p] - ys[q]).powi(2)).sqrt();
                let want = Complex64::from_polar(1.0, -2.0 * PI * rpq / LAMBDA);
                assert!((h.entries()[(p, q)] - want).norm() < 1e-9, "entry ({p},{q})");
            }
        }
    }

    #[test]
    fn large_array_power_is_nt_nr() {
        let link = LinkGeometry::parallel(256, 256, LAMBDA / 2.0, 5.0, LAMBDA).unwrap();
        let h = near_field_channel(&link).unwrap();
        assert_relative_eq!(h.power(), 65536.0, max_relative = 1e-12);
        assert!(h.entries().iter().all(|z| (z.norm() - 1.0).abs() < 1e-12));
    }

    #[test]
    fn coincident_elements_are_rejected() {
        // Mirror-tilted arrays one meter apart share an element position.
        let tx = ArrayGeometry::new(3, 1.0, -PI / 6.0, [0.0; 3]).unwrap();
        let rx = ArrayGeometry::new(3, 1.0, PI / 6.0, [0.0; 3]).unwrap();
        let link = LinkGeometry::new(tx, rx, 1.0, 0.1).unwrap();
        assert!(matches!(
            near_field_channel(&link),
            Err(Error::DegenerateGeometry { rx: 2, tx: 2 })
        ));
    }

    #[test]
    fn far_field_response_edge_cases() {
        let a = array_response(1, 1.0, 1.0, 0.3);
        assert_relative_eq!(a[0].re, 1.0);
        let a = array_response(4, 0.5, 1.0, 0.0);
        assert!(a.iter().all(|z| (z - Complex64::new(0.5, 0.0)).norm() < 1e-15));
    }

    #[test]
    fn far_field_channel_is_rank_one() {
        let link = LinkGeometry::parallel(16, 12, LAMBDA / 2.0, 50.0, LAMBDA).unwrap();
        let h = far_field_channel(&link, 0.3, -0.2).unwrap();
        let sv = linalg::singular_values(h.entries());
        assert!(sv[1] < 1e-10 * sv[0]);
        assert_relative_eq!(h.power(), 192.0, max_relative = 1e-12);
    }

    #[test]
    fn rayleigh_distance_values() {
        assert_relative_eq!(rayleigh_distance(1.0, 2.0), 1.0);
        let d = 999.0 * 0.5e-3;
        assert!((rayleigh_distance(d, 1e-3) - 499.0).abs() < 0.5);
        let d = 255.0 * 1.5e-3;
        assert!((rayleigh_distance(d, 3e-3) - 97.5).abs() < 0.1);
    }

    #[test]
    fn reciprocity_is_transpose() {
        let tx = ArrayGeometry::new(5, LAMBDA / 2.0, 0.2, [0.0; 3]).unwrap();
        let rx = ArrayGeometry::new(7, LAMBDA / 2.0, -0.35, [0.0; 3]).unwrap();
        let link = LinkGeometry::new(tx, rx, 0.2, LAMBDA).unwrap();
        let h = near_field_channel(&link).unwrap();
        let g = near_field_channel(&link.reversed()).unwrap();
        assert!((h.entries().transpose() - g.entries()).norm() < 1e-9);
    }
}
