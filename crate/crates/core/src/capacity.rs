//! Channel capacity: exact SVD water-filling and the DoF-based estimates.

use std::f64::consts::LN_2;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{ChannelMatrix, LinkGeometry};
use crate::linalg;
use crate::pswf::{self, PswfSpectrum};
use crate::waterfill::{water_fill, PowerAllocation};

/// Squared singular values below this fraction of the largest are treated as
/// numerically zero.
pub const NEGLIGIBLE_GAIN: f64 = 1e-14;

/// Coefficient in `N* ~ sqrt(0.255 P P_H / noise)`.
pub const OPTIMAL_DOF_COEFFICIENT: f64 = 0.255;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CapacityMethod {
    ExactSvd,
    PswfWaterfill,
    EqualPowerDof,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CapacityReport {
    pub capacity_bits: f64,
    /// All singular values, largest first.
    pub singular_values: Vec<f64>,
    /// Allocation over the usable (non-negligible) leading subchannels.
    pub allocation: PowerAllocation,
    pub method: CapacityMethod,
}

/// Drops trailing squared singular values that are numerically zero.
pub(crate) fn usable_gains(singular_values: &[f64]) -> Vec<f64> {
    let top = singular_values.first().map_or(0.0, |s| s * s);
    singular_values
        .iter()
        .map(|s| s * s)
        .take_while(|g| *g > NEGLIGIBLE_GAIN * top && *g > 0.0)
        .collect()
}

fn report_from_singular_values(
    singular_values: Vec<f64>,
    total_power: f64,
    noise_power: f64,
    method: CapacityMethod,
) -> Result<CapacityReport> {
    let gains = usable_gains(&singular_values);
    let allocation = water_fill(&gains, total_power, noise_power)?;
    Ok(CapacityReport {
        capacity_bits: allocation.rate(&gains),
        singular_values,
        allocation,
        method,
    })
}

/// `sum log2(1 + p_i s_i^2 / noise)` with water-filled `p_i` over the SVD of `h`.
pub fn exact_capacity(h: &ChannelMatrix, total_power: f64, noise_power: f64) -> Result<CapacityReport> {
    let sv = linalg::singular_values(h.entries());
    report_from_singular_values(sv, total_power, noise_power, CapacityMethod::ExactSvd)
}

/// Capacity estimate with squared singular values replaced by the PSWF
/// eigenvalues rescaled to the channel power:
/// `s_n^2 = v_n P_H / sum(v)`.
pub fn pswf_capacity_estimate(
    spectrum: &PswfSpectrum,
    channel_power: f64,
    total_power: f64,
    noise_power: f64,
) -> Result<CapacityReport> {
    let gains = pswf_gains(spectrum, channel_power)?;
    let sv = gains.iter().map(|g| g.sqrt()).collect();
    report_from_singular_values(sv, total_power, noise_power, CapacityMethod::PswfWaterfill)
}

/// Subchannel power gains predicted by a PSWF spectrum for a channel of
/// Frobenius power `channel_power`.
pub fn pswf_gains(spectrum: &PswfSpectrum, channel_power: f64) -> Result<Vec<f64>> {
    if spectrum.is_empty() {
        return Err(Error::NoUsableSubchannel);
    }
    let total: f64 = spectrum.eigenvalues().iter().sum();
    if total.is_nan() || total <= 0.0 {
        return Err(Error::NoUsableSubchannel);
    }
    Ok(spectrum.eigenvalues().iter().map(|v| v * channel_power / total).collect())
}

/// `N log2(1 + P P_H / (noise N^2))` with `N = 2 c_y / pi`.
pub fn equal_power_capacity_approx(
    link: &LinkGeometry,
    channel_power: f64,
    total_power: f64,
    noise_power: f64,
) -> f64 {
    equal_power_capacity(pswf::dof_estimate(link), channel_power, total_power, noise_power)
}

/// Equal-power capacity for a given DoF count; tends to zero with the DoF.
pub fn equal_power_capacity(dof: f64, channel_power: f64, total_power: f64, noise_power: f64) -> f64 {
    if dof <= 0.0 {
        return 0.0;
    }
    let snr = total_power * channel_power / noise_power;
    dof * (snr / (dof * dof)).ln_1p() / LN_2
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimalDof {
    /// Root of the stationarity condition of the equal-power capacity.
    pub root: f64,
    /// `sqrt(0.255 P P_H / noise)`.
    pub approximation: f64,
}

impl OptimalDof {
    /// `N*^2 noise / (P P_H)` at the root.
    pub fn implied_coefficient(&self, total_power: f64, channel_power: f64, noise_power: f64) -> f64 {
        self.root * self.root * noise_power / (total_power * channel_power)
    }
}

/// DoF count maximising the equal-power capacity, i.e. the root of
/// `(N^2 noise / (P P_H) + 1) log2(1 + P P_H / (N^2 noise)) = 2 / ln 2`.
pub fn optimal_dof(total_power: f64, channel_power: f64, noise_power: f64) -> Result<OptimalDof> {
    for (name, v) in [("total power", total_power), ("channel power", channel_power), ("noise power", noise_power)] {
        if !(v > 0.0 && v.is_finite()) {
            return Err(Error::InvalidParameter(format!("{name} must be positive, got {v}")));
        }
    }
    let a = total_power * channel_power / noise_power;
    // Decreasing in n: +inf as n -> 0, (1 - 2) / ln 2 as n -> inf.
    let stationarity = |n: f64| {
        let inv = n * n / a;
        (inv + 1.0) * (1.0 / inv).ln_1p() / LN_2 - 2.0 / LN_2
    };
    let (mut lo, mut hi) = (a.sqrt() * 1e-3, a.sqrt() * 1e3);
    debug_assert!(stationarity(lo) > 0.0 && stationarity(hi) < 0.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if stationarity(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-15 * hi {
            break;
        }
    }
    Ok(OptimalDof {
        root: 0.5 * (lo + hi),
        approximation: (OPTIMAL_DOF_COEFFICIENT * a).sqrt(),
    })
}
