use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use nearfield_dap::capacity::{equal_power_capacity_approx, exact_capacity, pswf_capacity_estimate};
use nearfield_dap::dap::{run_dap, DapConfig};
use nearfield_dap::geometry::near_field_channel;
use nearfield_dap::harness::{
    collect_figure_records, create_file, emit_figure_data, evaluate_sweep, parse_axis, run_sweep, write_records,
    FigureId, SweepArchitecture, SweepConfig,
};
use nearfield_dap::pswf::{bandwidth_parameter, pswf_eigenvalues};
use nearfield_dap::{Error, Result};

/// Near-field XL-MIMO capacity analysis and distance-aware precoding.
#[derive(Parser)]
#[command(name = "nfdap", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Default)]
struct Common {
    /// TOML sweep configuration; flags below override its fields.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output file; stdout when absent (figure defaults to <figure>.csv).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Distances in meters: `1,2,5`, `log:1:100:21` or `lin:1:3:5`.
    #[arg(long, global = true)]
    distances: Option<String>,
    /// SNRs in dB, same syntax as --distances.
    #[arg(long, global = true)]
    snrs: Option<String>,
    #[arg(long, global = true)]
    quadrature_order: Option<usize>,
    /// Comma separated `kind[:chains]`, e.g. `dap,sub_connected_static:8`.
    #[arg(long, global = true)]
    architectures: Option<String>,
    /// Frobenius power of the channel after normalization.
    #[arg(long, global = true)]
    channel_power: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// PSWF eigenvalue staircase per distance.
    Dof {
        #[command(flatten)]
        common: Common,
    },
    /// Exact, PSWF and equal-power capacity per distance and SNR.
    Capacity {
        #[command(flatten)]
        common: Common,
    },
    /// DAP design at the first distance and SNR.
    Precode {
        #[command(flatten)]
        common: Common,
        /// Fixed stream count instead of the PSWF choice.
        #[arg(long)]
        streams: Option<usize>,
        #[arg(long)]
        bound_slack: Option<usize>,
    },
    /// SE and EE of each architecture per distance and SNR.
    Compare {
        #[command(flatten)]
        common: Common,
    },
    /// Full sweep, written as result records.
    Sweep {
        #[command(flatten)]
        common: Common,
    },
    /// Data behind one of the reference figures.
    Figure {
        #[command(flatten)]
        common: Common,
        /// fig2, fig3, fig5, fig6, fig7 or fig8.
        #[arg(long)]
        figure: String,
    },
}

fn load_config(common: &Common, base: SweepConfig) -> Result<SweepConfig> {
    let mut config = match &common.config {
        Some(path) => SweepConfig::from_file(path)?,
        None => base,
    };
    if let Some(d) = &common.distances {
        config.distances = parse_axis(d)?;
    }
    if let Some(s) = &common.snrs {
        config.snrs_db = parse_axis(s)?;
    }
    if let Some(q) = common.quadrature_order {
        config.quadrature_order = q;
    }
    if let Some(a) = &common.architectures {
        config.architectures = a
            .split(',')
            .filter(|s| !s.trim().is_empty())
            .map(SweepArchitecture::parse)
            .collect::<Result<_>>()?;
    }
    if let Some(p) = common.channel_power {
        config.channel_power = p;
    }
    if let Some(out) = &common.out {
        config.output_path = Some(out.clone());
    }
    config.validate()?;
    Ok(config)
}

fn open_output(path: Option<&PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(create_file(p)?),
        None => Box::new(std::io::stdout().lock()),
    })
}

fn write_csv<T: Serialize>(rows: &[T], path: Option<&PathBuf>) -> Result<()> {
    let mut w = csv::Writer::from_writer(open_output(path)?);
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct DofRow {
    r: f64,
    index: usize,
    eigenvalue: f64,
}

#[derive(Serialize)]
struct CapacityCliRow {
    r: f64,
    snr_db: f64,
    exact_bits: f64,
    pswf_estimate_bits: f64,
    equal_power_bits: f64,
}

#[derive(Serialize)]
struct CompareRow {
    architecture: String,
    rf_chains: Option<usize>,
    r: f64,
    snr_db: f64,
    se_bits: Option<f64>,
    ee_bits_per_watt: Option<f64>,
}

fn dof(common: &Common) -> Result<()> {
    let config = load_config(common, FigureId::Fig2.default_config())?;
    let mut rows = Vec::new();
    for &r in &config.distances {
        let link = config.link(r)?;
        let count = config.num_tx.min(config.num_rx).min(config.quadrature_order);
        let spec = pswf_eigenvalues(bandwidth_parameter(&link), count, config.quadrature_order)?;
        rows.extend(spec.eigenvalues().iter().enumerate().map(|(index, &eigenvalue)| DofRow { r, index, eigenvalue }));
    }
    write_csv(&rows, common.out.as_ref())
}

fn capacity(common: &Common) -> Result<()> {
    let config = load_config(common, FigureId::Fig3.default_config())?;
    let mut rows = Vec::new();
    for &r in &config.distances {
        let link = config.link(r)?;
        let h = near_field_channel(&link)?.normalized_to(config.channel_power)?;
        let count = config.num_tx.min(config.num_rx).min(config.quadrature_order);
        let spec = pswf_eigenvalues(bandwidth_parameter(&link), count, config.quadrature_order)?;
        for &snr_db in &config.snrs_db {
            let noise = config.noise_power(snr_db);
            let p = config.total_power;
            rows.push(CapacityCliRow {
                r,
                snr_db,
                exact_bits: exact_capacity(&h, p, noise)?.capacity_bits,
                pswf_estimate_bits: pswf_capacity_estimate(&spec, h.power(), p, noise)?.capacity_bits,
                equal_power_bits: equal_power_capacity_approx(&link, h.power(), p, noise),
            });
        }
    }
    write_csv(&rows, common.out.as_ref())
}

fn join<T: ToString>(values: impl IntoIterator<Item = T>) -> String {
    values.into_iter().map(|v| v.to_string()).collect::<Vec<_>>().join(";")
}

fn precode(common: &Common, streams: Option<usize>, bound_slack: Option<usize>) -> Result<()> {
    let base = SweepConfig {
        distances: vec![2.0],
        ..SweepConfig::default()
    };
    let config = load_config(common, base)?;
    let r = config.distances[0];
    let snr_db = config.snrs_db[0];
    let link = config.link(r)?;
    let h = near_field_channel(&link)?.normalized_to(config.channel_power)?;
    let dap_config = DapConfig {
        bound_slack: bound_slack.unwrap_or(config.bound_slack),
        quadrature_order: config.quadrature_order,
        streams,
    };
    let noise = config.noise_power(snr_db);
    let out = run_dap(&h, &link, config.total_power, noise, &dap_config)?;
    let fields = [
        ("r", r.to_string()),
        ("snr_db", snr_db.to_string()),
        ("ns", out.streams().to_string()),
        ("dof_streams", out.dof_streams.to_string()),
        ("bound", out.partition.bound().to_string()),
        ("partition_sizes", join(out.partition.sizes())),
        ("spectral_efficiency_bits", out.spectral_efficiency.to_string()),
        ("per_stream_power", join(out.triple.digital.stream_powers.iter())),
        ("transmit_power", out.triple.transmit_power().to_string()),
    ];
    let mut w = csv::Writer::from_writer(open_output(common.out.as_ref())?);
    w.write_record(["field", "value"])?;
    for (k, v) in fields {
        w.write_record([k, v.as_str()])?;
    }
    w.flush()?;
    Ok(())
}

fn compare(common: &Common) -> Result<()> {
    let mut config = load_config(common, SweepConfig::default())?;
    config.output_path = None;
    let rows: Vec<CompareRow> = evaluate_sweep(&config)?
        .into_iter()
        .map(|r| CompareRow {
            architecture: r.sweep_architecture().label(),
            rf_chains: r.ns_chosen,
            r: r.distance,
            snr_db: r.snr_db,
            se_bits: r.se_bits,
            ee_bits_per_watt: r.ee,
        })
        .collect();
    write_csv(&rows, common.out.as_ref())
}

fn sweep(common: &Common) -> Result<()> {
    let config = load_config(common, SweepConfig::default())?;
    let records = run_sweep(&config)?;
    let failed = records.iter().filter(|r| !r.is_ok()).count();
    if config.output_path.is_none() {
        let mut w = csv::Writer::from_writer(std::io::stdout().lock());
        for r in &records {
            w.serialize(r)?;
        }
        w.flush()?;
    }
    if failed > 0 {
        eprintln!("warning: {failed} of {} records failed", records.len());
    }
    Ok(())
}

fn figure(common: &Common, name: &str) -> Result<()> {
    let id: FigureId = name.parse()?;
    let mut config = load_config(common, id.default_config())?;
    let out = config.output_path.take().unwrap_or_else(|| PathBuf::from(format!("{id}.csv")));
    let records = collect_figure_records(&config, id)?;
    let rows = emit_figure_data(&records, id, &out)?;
    if let nearfield_dap::harness::FigureRecords::Sweep(records) = &records {
        if records.iter().any(|r| !r.is_ok()) {
            let failed = out.with_extension("failed.csv");
            let bad: Vec<_> = records.iter().filter(|r| !r.is_ok()).cloned().collect();
            write_records(&bad, &failed)?;
            eprintln!("warning: {} failed records written to {}", bad.len(), failed.display());
        }
    }
    eprintln!("{id}: {rows} rows written to {}", out.display());
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Dof { common } => dof(&common),
        Command::Capacity { common } => capacity(&common),
        Command::Precode {
            common,
            streams,
            bound_slack,
        } => precode(&common, streams, bound_slack),
        Command::Compare { common } => compare(&common),
        Command::Sweep { common } => sweep(&common),
        Command::Figure { common, figure: name } => figure(&common, &name),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            if matches!(e, Error::Io(_)) {
                ExitCode::from(74)
            } else {
                ExitCode::FAILURE
            }
        }
    }
}
