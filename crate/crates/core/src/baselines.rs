//! Reference precoding architectures.
//!
//! The hybrid baselines are deliberately simple, deterministic stand-ins:
//!
//! * fully connected: every RF chain drives every antenna; the analog matrix
//!   holds the entrywise phases of the leading right singular vectors of `H`
//!   and the digital stage water-fills over the whitened effective channel;
//! * static sub-connected: contiguous equal blocks of antennas, one per RF
//!   chain, each phased towards its dominant direction.

use crate::capacity::{exact_capacity, usable_gains};
use crate::dap::{design_for_partition, spectral_efficiency_of, PrecoderTriple, SubarrayPartition};
use crate::error::{Error, Result};
use crate::geometry::ChannelMatrix;
use crate::linalg::{self, CMatrix};
use crate::waterfill::water_fill;
use num_complex::Complex64;

/// Spectral efficiency of unconstrained digital precoding, which is the
/// channel capacity.
pub fn fully_digital_precoder(h: &ChannelMatrix, total_power: f64, noise_power: f64) -> Result<f64> {
    Ok(exact_capacity(h, total_power, noise_power)?.capacity_bits)
}

#[derive(Debug, Clone)]
pub struct FullyConnectedDesign {
    /// `Nt x N_RF` constant-modulus analog matrix.
    pub analog: CMatrix,
    /// `N_RF x N_RF` digital precoder.
    pub digital: CMatrix,
    pub spectral_efficiency: f64,
}

impl FullyConnectedDesign {
    pub fn combined(&self) -> CMatrix {
        &self.analog * &self.digital
    }
}

fn check_chains(h: &ChannelMatrix, rf_chains: usize) -> Result<()> {
    if rf_chains == 0 || rf_chains > h.num_tx() {
        return Err(Error::InvalidParameter(format!(
            "rf chains must be in 1..={}, got {rf_chains}",
            h.num_tx()
        )));
    }
    Ok(())
}

pub fn fully_connected_design(
    h: &ChannelMatrix,
    rf_chains: usize,
    total_power: f64,
    noise_power: f64,
) -> Result<FullyConnectedDesign> {
    check_chains(h, rf_chains)?;
    let (_, v) = linalg::right_singular_pairs(h.entries());
    let nt = h.num_tx();
    let one = Complex64::new(1.0, 0.0);
    let analog = CMatrix::from_fn(nt, rf_chains, |a, k| {
        // columns past the channel rank are padded with the all-ones beam
        if k < v.ncols() {
            let z = v[(a, k)];
            if z.norm() > 0.0 { z / z.norm() } else { one }
        } else {
            one
        }
    });

    // Orthonormal basis of span(analog): analog * U * Lambda^{-1/2}.
    let (vals, u) = linalg::hermitian_eigen(&(analog.adjoint() * &analog));
    let top = vals[0];
    let keep = vals.iter().take_while(|&&l| l > 1e-12 * top).count();
    let mut whitening = CMatrix::zeros(rf_chains, keep);
    for k in 0..keep {
        let s = 1.0 / vals[k].sqrt();
        for r in 0..rf_chains {
            whitening[(r, k)] = u[(r, k)] * s;
        }
    }
    let effective = h.entries() * &analog * &whitening;
    let (sv, ve) = linalg::right_singular_pairs(&effective);
    let gains = usable_gains(&sv);
    let alloc = water_fill(&gains, total_power, noise_power)?;

    let mut gamma = CMatrix::zeros(ve.nrows(), rf_chains);
    for (k, p) in alloc.per_stream_power.iter().enumerate() {
        let amp = p.sqrt();
        for r in 0..ve.nrows() {
            gamma[(r, k)] = ve[(r, k)] * amp;
        }
    }
    let digital = whitening * gamma;
    let spectral_efficiency = spectral_efficiency_of(h, &(&analog * &digital), noise_power)?;
    Ok(FullyConnectedDesign {
        analog,
        digital,
        spectral_efficiency,
    })
}

pub fn fully_connected_baseline(
    h: &ChannelMatrix,
    rf_chains: usize,
    total_power: f64,
    noise_power: f64,
) -> Result<f64> {
    Ok(fully_connected_design(h, rf_chains, total_power, noise_power)?.spectral_efficiency)
}

/// Static sub-connected precoder over contiguous blocks.
pub fn sub_connected_static_design(
    h: &ChannelMatrix,
    rf_chains: usize,
    total_power: f64,
    noise_power: f64,
) -> Result<(PrecoderTriple, f64)> {
    check_chains(h, rf_chains)?;
    let partition = SubarrayPartition::contiguous(h.num_tx(), rf_chains)?;
    let triple = design_for_partition(h, &partition, total_power, noise_power)?;
    let se = spectral_efficiency_of(h, &triple.combined(), noise_power)?;
    Ok((triple, se))
}

pub fn sub_connected_static_baseline(
    h: &ChannelMatrix,
    rf_chains: usize,
    total_power: f64,
    noise_power: f64,
) -> Result<f64> {
    Ok(sub_connected_static_design(h, rf_chains, total_power, noise_power)?.1)
}
