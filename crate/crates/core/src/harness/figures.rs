use std::collections::BTreeSet;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::config::{log_grid, SweepArchitecture, SweepConfig};
use super::sweep::{evaluate_sweep, ResultRecord};
use crate::capacity::{equal_power_capacity_approx, exact_capacity, pswf_capacity_estimate};
use crate::energy::ArchitectureKind;
use crate::error::{Error, Result};
use crate::geometry::near_field_channel;
use crate::linalg::singular_values;
use crate::pswf::{bandwidth_parameter, pswf_eigenvalues};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FigureId {
    Fig2,
    Fig3,
    Fig5,
    Fig6,
    Fig7,
    Fig8,
}

impl FigureId {
    pub const ALL: [FigureId; 6] = [Self::Fig2, Self::Fig3, Self::Fig5, Self::Fig6, Self::Fig7, Self::Fig8];

    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Fig2 => "fig2",
            Self::Fig3 => "fig3",
            Self::Fig5 => "fig5",
            Self::Fig6 => "fig6",
            Self::Fig7 => "fig7",
            Self::Fig8 => "fig8",
        }
    }

    /// Reference setup for the figure, on top of `SweepConfig::default()`.
    pub fn default_config(&self) -> SweepConfig {
        use ArchitectureKind::*;
        let base = SweepConfig::default();
        match self {
            Self::Fig2 => SweepConfig {
                distances: vec![5.0, 10.0, 20.0],
                ..base
            },
            Self::Fig3 => SweepConfig {
                distances: log_grid(1.0, 100.0, 41),
                snrs_db: vec![15.0],
                ..base
            },
            Self::Fig5 | Self::Fig7 => base,
            Self::Fig6 => SweepConfig {
                distances: vec![2.0],
                snrs_db: vec![20.0, 22.0, 24.0, 26.0, 28.0, 30.0],
                ..base
            },
            Self::Fig8 => {
                let mut architectures = vec![SweepArchitecture::auto(FullyDigital)];
                for kind in [Dap, FullyConnected] {
                    for k in [4, 8, 12] {
                        architectures.push(SweepArchitecture::fixed(kind, k));
                    }
                    architectures.push(SweepArchitecture::auto(kind));
                }
                SweepConfig {
                    distances: vec![2.0],
                    snrs_db: vec![30.0, 32.0, 34.0, 36.0, 38.0, 40.0],
                    architectures,
                    ..base
                }
            }
        }
    }
}

impl std::fmt::Display for FigureId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for FigureId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|f| f.as_str() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown figure {s:?}")))
    }
}

/// Singular-value staircase against the PSWF eigenvalues, both divided by
/// their largest value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumRow {
    pub distance: f64,
    pub index: usize,
    /// `s_n^2 / s_1^2`.
    pub sv_calculated: f64,
    /// `lambda_n / lambda_1`.
    pub sv_estimated: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CapacityRow {
    pub r: f64,
    pub capacity_exact: f64,
    pub capacity_pswf: f64,
    pub capacity_dof: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub series: String,
    pub architecture: ArchitectureKind,
    pub rf_chains: usize,
    pub r: f64,
    pub snr_db: f64,
    pub se_bits: f64,
    pub ee_bits_per_watt: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum FigureRecords {
    Spectrum(Vec<SpectrumRow>),
    Capacity(Vec<CapacityRow>),
    Sweep(Vec<ResultRecord>),
}

impl FigureRecords {
    pub fn len(&self) -> usize {
        match self {
            Self::Spectrum(v) => v.len(),
            Self::Capacity(v) => v.len(),
            Self::Sweep(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

pub fn spectrum_rows(config: &SweepConfig) -> Result<Vec<SpectrumRow>> {
    config.validate()?;
    let mut rows = Vec::new();
    for &distance in &config.distances {
        let link = config.link(distance)?;
        let h = near_field_channel(&link)?;
        let sv = singular_values(h.entries());
        let count = config.num_tx.min(config.num_rx).min(config.quadrature_order);
        let spec = pswf_eigenvalues(bandwidth_parameter(&link), count, config.quadrature_order)?;
        let top_sv = sv[0] * sv[0];
        let top_ev = spec.eigenvalues()[0];
        for (index, (s, v)) in sv.iter().zip(spec.eigenvalues()).enumerate() {
            rows.push(SpectrumRow {
                distance,
                index,
                sv_calculated: s * s / top_sv,
                sv_estimated: if top_ev > 0.0 { v / top_ev } else { 0.0 },
            });
        }
    }
    Ok(rows)
}

/// Capacity curves at the first SNR of the config.
pub fn capacity_rows(config: &SweepConfig) -> Result<Vec<CapacityRow>> {
    config.validate()?;
    let noise = config.noise_power(config.snrs_db[0]);
    let p = config.total_power;
    config
        .distances
        .iter()
        .map(|&r| {
            let link = config.link(r)?;
            let h = near_field_channel(&link)?.normalized_to(config.channel_power)?;
            let count = config.num_tx.min(config.num_rx).min(config.quadrature_order);
            let spec = pswf_eigenvalues(bandwidth_parameter(&link), count, config.quadrature_order)?;
            Ok(CapacityRow {
                r,
                capacity_exact: exact_capacity(&h, p, noise)?.capacity_bits,
                capacity_pswf: pswf_capacity_estimate(&spec, h.power(), p, noise)?.capacity_bits,
                capacity_dof: equal_power_capacity_approx(&link, h.power(), p, noise),
            })
        })
        .collect()
}

/// Computes whatever `figure` needs from `config`.
pub fn collect_figure_records(config: &SweepConfig, figure: FigureId) -> Result<FigureRecords> {
    Ok(match figure {
        FigureId::Fig2 => FigureRecords::Spectrum(spectrum_rows(config)?),
        FigureId::Fig3 => FigureRecords::Capacity(capacity_rows(config)?),
        _ => FigureRecords::Sweep(evaluate_sweep(config)?),
    })
}

fn distinct(values: impl Iterator<Item = f64>) -> usize {
    values.map(f64::to_bits).collect::<BTreeSet<_>>().len()
}

fn require(count: usize, axis: &str) -> Result<()> {
    if count < 2 {
        return Err(Error::MissingAxis(format!("{axis} needs at least two values, found {count}")));
    }
    Ok(())
}

/// Long-format comparison rows for the sweep figures, failed records dropped.
pub fn comparison_rows(records: &[ResultRecord], figure: FigureId) -> Result<Vec<ComparisonRow>> {
    if records.is_empty() {
        return Err(Error::NoRecords);
    }
    match figure {
        FigureId::Fig5 | FigureId::Fig7 => require(distinct(records.iter().map(|r| r.distance)), "distance")?,
        FigureId::Fig6 => require(distinct(records.iter().map(|r| r.snr_db)), "snr_db")?,
        FigureId::Fig8 => {
            let chains: BTreeSet<_> = records.iter().map(|r| r.rf_chains_requested).collect();
            require(chains.len(), "rf_chains")?
        }
        FigureId::Fig2 | FigureId::Fig3 => {
            return Err(Error::InvalidParameter(format!("{figure} is not built from sweep records")))
        }
    }
    let by_distance = matches!(figure, FigureId::Fig5 | FigureId::Fig7);
    let mut ok: Vec<&ResultRecord> = records.iter().filter(|r| r.is_ok()).collect();
    ok.sort_by(|a, b| {
        let (x, y) = if by_distance { (a.distance, b.distance) } else { (a.snr_db, b.snr_db) };
        let (u, v) = if by_distance { (a.snr_db, b.snr_db) } else { (a.distance, b.distance) };
        a.sweep_architecture()
            .cmp(&b.sweep_architecture())
            .then(x.total_cmp(&y))
            .then(u.total_cmp(&v))
    });
    let rows = ok
        .into_iter()
        .map(|r| ComparisonRow {
            series: r.sweep_architecture().label(),
            architecture: r.architecture,
            rf_chains: r.ns_chosen.unwrap_or_default(),
            r: r.distance,
            snr_db: r.snr_db,
            se_bits: r.se_bits.unwrap_or_default(),
            ee_bits_per_watt: r.ee.unwrap_or_default(),
        })
        .collect();
    Ok(rows)
}

fn write_rows<T: Serialize>(rows: &[T], path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_writer(super::create_file(path)?);
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

/// Writes the CSV of `figure` to `path` and returns the row count. Nothing
/// is written when the records are empty or lack a required axis.
pub fn emit_figure_data(records: &FigureRecords, figure: FigureId, path: &Path) -> Result<usize> {
    if records.is_empty() {
        return Err(Error::NoRecords);
    }
    let mismatch = || Error::InvalidParameter(format!("records do not match {figure}"));
    match (figure, records) {
        (FigureId::Fig2, FigureRecords::Spectrum(rows)) => {
            write_rows(rows, path)?;
            Ok(rows.len())
        }
        (FigureId::Fig3, FigureRecords::Capacity(rows)) => {
            require(distinct(rows.iter().map(|r| r.r)), "distance")?;
            write_rows(rows, path)?;
            Ok(rows.len())
        }
        (FigureId::Fig2 | FigureId::Fig3, _) => Err(mismatch()),
        (_, FigureRecords::Sweep(records)) => {
            let rows = comparison_rows(records, figure)?;
            write_rows(&rows, path)?;
            Ok(rows.len())
        }
        _ => Err(mismatch()),
    }
}
