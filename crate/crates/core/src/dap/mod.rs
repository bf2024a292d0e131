//! Distance-aware precoding (DAP).
//!
//! The pipeline picks the number of active RF chains from the PSWF
//! eigenvalue staircase, partitions the transmit array into that many
//! subarrays, phases each subarray towards its dominant direction, and
//! water-fills a baseband precoder over the resulting effective channel.

pub mod partition;
pub mod precoder;

pub use partition::{
    correlation_magnitudes, minkowski_surrogate, partition_objective, partition_subarrays, partition_with_correlation,
    permutation_matrix, SubarrayPartition,
};
pub use precoder::{
    build_analog, build_digital, build_selection, design_for_partition, spectral_efficiency_of,
    spectrum_efficiency, AnalogPrecoder, ConstraintCheck, DigitalPrecoder, PrecoderTriple, SelectionMatrix,
};

use crate::capacity::pswf_gains;
use crate::error::Result;
use crate::geometry::{near_field_channel, ChannelMatrix, LinkGeometry};
use crate::pswf::{self, PswfSpectrum, DEFAULT_QUADRATURE_ORDER};
use crate::waterfill::water_fill;

pub const DEFAULT_BOUND_SLACK: usize = 2;

/// Number of PSWF subchannels that receive power when `total_power` is
/// water-filled over the spectrum rescaled to `channel_power`; at least one.
pub fn select_stream_count(
    spectrum: &PswfSpectrum,
    channel_power: f64,
    total_power: f64,
    noise_power: f64,
) -> Result<usize> {
    let gains = pswf_gains(spectrum, channel_power)?;
    let alloc = water_fill(&gains, total_power, noise_power)?;
    Ok(alloc.active_streams().max(1))
}

/// Subarray size bound `ceil(Nt / Ns) + slack`.
pub fn default_bound(num_antennas: usize, streams: usize, slack: usize) -> usize {
    num_antennas.div_ceil(streams) + slack
}

#[derive(Debug, Clone, PartialEq)]
pub struct DapConfig {
    pub bound_slack: usize,
    pub quadrature_order: usize,
    /// Fixed stream count instead of the PSWF water-filling choice.
    pub streams: Option<usize>,
}

impl Default for DapConfig {
    fn default() -> Self {
        Self {
            bound_slack: DEFAULT_BOUND_SLACK,
            quadrature_order: DEFAULT_QUADRATURE_ORDER,
            streams: None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct DapOutcome {
    pub triple: PrecoderTriple,
    pub partition: SubarrayPartition,
    pub spectral_efficiency: f64,
    /// Stream count suggested by the PSWF spectrum, before any override.
    pub dof_streams: usize,
}

impl DapOutcome {
    pub fn streams(&self) -> usize {
        self.triple.streams()
    }
}

/// Stream count the PSWF spectrum of `link` supports for a channel of power
/// `channel_power`.
pub fn dof_stream_count(
    link: &LinkGeometry,
    channel_power: f64,
    total_power: f64,
    noise_power: f64,
    quadrature_order: usize,
) -> Result<usize> {
    let count = link.tx().num_elements().min(link.rx().num_elements()).min(quadrature_order);
    let spectrum = pswf::pswf_eigenvalues(pswf::bandwidth_parameter(link), count, quadrature_order)?;
    select_stream_count(&spectrum, channel_power, total_power, noise_power)
}

/// Runs the full DAP design on channel `h` of link `link`.
pub fn run_dap(
    h: &ChannelMatrix,
    link: &LinkGeometry,
    total_power: f64,
    noise_power: f64,
    config: &DapConfig,
) -> Result<DapOutcome> {
    let dof_streams = dof_stream_count(link, h.power(), total_power, noise_power, config.quadrature_order)?;
    let nt = h.num_tx();
    let streams = config.streams.unwrap_or(dof_streams).clamp(1, nt);
    let bound = default_bound(nt, streams, config.bound_slack).min(nt);
    let partition = partition_subarrays(h, streams, bound)?;
    let triple = design_for_partition(h, &partition, total_power, noise_power)?;
    let spectral_efficiency = spectrum_efficiency(h, &triple, noise_power)?;
    Ok(DapOutcome {
        triple,
        partition,
        spectral_efficiency,
        dof_streams,
    })
}

/// DAP on the unit-gain near-field channel of `link`.
pub fn dap_pipeline(
    link: &LinkGeometry,
    total_power: f64,
    noise_power: f64,
    bound_slack: usize,
) -> Result<(PrecoderTriple, f64)> {
    let h = near_field_channel(link)?;
    let config = DapConfig { bound_slack, ..DapConfig::default() };
    let out = run_dap(&h, link, total_power, noise_power, &config)?;
    Ok((out.triple, out.spectral_efficiency))
}
