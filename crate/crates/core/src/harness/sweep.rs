use std::cmp::Ordering;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{SweepArchitecture, SweepConfig};
use crate::baselines::{fully_connected_baseline, fully_digital_precoder, sub_connected_static_baseline};
use crate::dap::{dof_stream_count, run_dap, DapConfig};
use crate::energy::{energy_efficiency, ArchitectureKind, ArchitectureSpec};
use crate::error::{Error, Result};
use crate::geometry::{near_field_channel, ChannelMatrix, LinkGeometry};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RecordStatus {
    Ok,
    Failed,
}

/// One evaluated (distance, SNR, architecture) point.
///
/// `runtime_ms` is not part of the result CSV, which must not depend on
/// timing; it goes to the timing sidecar instead.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRecord {
    pub scenario_id: String,
    pub distance: f64,
    pub snr_db: f64,
    pub architecture: ArchitectureKind,
    /// Requested chain count, empty for the automatic choice.
    pub rf_chains_requested: Option<usize>,
    pub ns_chosen: Option<usize>,
    pub se_bits: Option<f64>,
    #[serde(rename = "ee_bits_per_watt")]
    pub ee: Option<f64>,
    pub status: RecordStatus,
    pub reason: String,
    #[serde(skip)]
    pub runtime_ms: f64,
}

impl ResultRecord {
    pub fn is_ok(&self) -> bool {
        self.status == RecordStatus::Ok
    }

    pub fn sweep_architecture(&self) -> SweepArchitecture {
        SweepArchitecture {
            kind: self.architecture,
            rf_chains: self.rf_chains_requested,
        }
    }
}

fn scenario_id(distance: f64, snr_db: f64, arch: &SweepArchitecture) -> String {
    format!("r={distance};snr={snr_db};{}", arch.label())
}

/// Shared per-point state: the channel and the PSWF stream count.
struct Point {
    link: LinkGeometry,
    h: ChannelMatrix,
    noise: f64,
    dof_streams: usize,
}

impl Point {
    fn new(config: &SweepConfig, distance: f64, snr_db: f64) -> Result<Self> {
        let link = config.link(distance)?;
        let h = near_field_channel(&link)?.normalized_to(config.channel_power)?;
        let noise = config.noise_power(snr_db);
        let dof_streams = dof_stream_count(&link, h.power(), config.total_power, noise, config.quadrature_order)?;
        Ok(Self { link, h, noise, dof_streams })
    }
}

fn evaluate(config: &SweepConfig, point: &Point, arch: &SweepArchitecture) -> Result<(usize, f64, f64)> {
    let nt = config.num_tx;
    let p = config.total_power;
    let (chains, se) = match arch.kind {
        ArchitectureKind::FullyDigital => {
            let chains = arch.rf_chains.unwrap_or(nt);
            // validated below, before spending time on the capacity
            ArchitectureSpec::new(arch.kind, chains, nt)?;
            (chains, fully_digital_precoder(&point.h, p, point.noise)?)
        }
        ArchitectureKind::Dap => {
            let dap_config = DapConfig {
                bound_slack: config.bound_slack,
                quadrature_order: config.quadrature_order,
                streams: Some(arch.rf_chains.unwrap_or(point.dof_streams)),
            };
            if let Some(k) = arch.rf_chains {
                ArchitectureSpec::new(arch.kind, k, nt)?;
            }
            let out = run_dap(&point.h, &point.link, p, point.noise, &dap_config)?;
            (out.streams(), out.spectral_efficiency)
        }
        ArchitectureKind::FullyConnected => {
            let k = arch.rf_chains.unwrap_or(point.dof_streams);
            (k, fully_connected_baseline(&point.h, k, p, point.noise)?)
        }
        ArchitectureKind::SubConnectedStatic => {
            let k = arch.rf_chains.unwrap_or(point.dof_streams);
            (k, sub_connected_static_baseline(&point.h, k, p, point.noise)?)
        }
    };
    let spec = ArchitectureSpec::new(arch.kind, chains, nt)?;
    let ee = energy_efficiency(se, &spec, &config.power_model)?;
    Ok((chains, se, ee))
}

fn evaluate_point(config: &SweepConfig, distance: f64, snr_db: f64) -> Vec<ResultRecord> {
    let started = Instant::now();
    let point = Point::new(config, distance, snr_db);
    let setup_ms = started.elapsed().as_secs_f64() * 1e3;
    config
        .architectures
        .iter()
        .map(|arch| {
            let t = Instant::now();
            let outcome = point.as_ref().map_err(|e| e.to_string()).and_then(|pt| {
                evaluate(config, pt, arch).map_err(|e| e.to_string())
            });
            let runtime_ms = setup_ms + t.elapsed().as_secs_f64() * 1e3;
            let (ns_chosen, se_bits, ee, status, reason) = match outcome {
                Ok((ns, se, ee)) => (Some(ns), Some(se), Some(ee), RecordStatus::Ok, String::new()),
                Err(reason) => (None, None, None, RecordStatus::Failed, reason),
            };
            ResultRecord {
                scenario_id: scenario_id(distance, snr_db, arch),
                distance,
                snr_db,
                architecture: arch.kind,
                rf_chains_requested: arch.rf_chains,
                ns_chosen,
                se_bits,
                ee,
                status,
                reason,
                runtime_ms,
            }
        })
        .collect()
}

fn record_order(a: &ResultRecord, b: &ResultRecord) -> Ordering {
    a.distance
        .total_cmp(&b.distance)
        .then(a.snr_db.total_cmp(&b.snr_db))
        .then(a.sweep_architecture().cmp(&b.sweep_architecture()))
}

/// Evaluates every (distance, SNR, architecture) point without touching the
/// file system. Output is sorted by distance, SNR, then architecture.
pub fn evaluate_sweep(config: &SweepConfig) -> Result<Vec<ResultRecord>> {
    config.validate()?;
    let points: Vec<(f64, f64)> = config
        .distances
        .iter()
        .flat_map(|&d| config.snrs_db.iter().map(move |&s| (d, s)))
        .collect();
    let mut records: Vec<ResultRecord> = points
        .par_iter()
        .flat_map_iter(|&(d, s)| evaluate_point(config, d, s))
        .collect();
    records.sort_by(record_order);
    Ok(records)
}

/// Runs the sweep and, when the config names an output path, writes the
/// result CSV there plus a `<stem>.timing.csv` sidecar with per-record run
/// times.
pub fn run_sweep(config: &SweepConfig) -> Result<Vec<ResultRecord>> {
    config.validate()?;
    // fail on an unwritable path before doing any work
    let file = config.output_path.as_deref().map(super::create_file).transpose()?;
    let records = evaluate_sweep(config)?;
    if let (Some(file), Some(path)) = (file, config.output_path.as_deref()) {
        write_records_to(file, &records)?;
        write_timings(&records, &timing_path(path))?;
    }
    Ok(records)
}

pub fn timing_path(path: &Path) -> PathBuf {
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    path.with_file_name(format!("{stem}.timing.csv"))
}

fn write_records_to<W: std::io::Write>(out: W, records: &[ResultRecord]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in records {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_records(records: &[ResultRecord], path: &Path) -> Result<()> {
    write_records_to(super::create_file(path)?, records)
}

pub fn records_to_csv_string(records: &[ResultRecord]) -> Result<String> {
    let mut buf = Vec::new();
    write_records_to(&mut buf, records)?;
    String::from_utf8(buf).map_err(|e| Error::Config(e.to_string()))
}

pub fn read_records(path: &Path) -> Result<Vec<ResultRecord>> {
    let mut r = csv::Reader::from_path(path)?;
    Ok(r.deserialize().collect::<std::result::Result<_, _>>()?)
}

pub fn write_timings(records: &[ResultRecord], path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_writer(super::create_file(path)?);
    w.write_record(["scenario_id", "runtime_ms"])?;
    for r in records {
        w.write_record([r.scenario_id.clone(), r.runtime_ms.to_string()])?;
    }
    w.flush()?;
    Ok(())
}
