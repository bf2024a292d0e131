//! Sweep configuration, execution and figure-data emission.

pub mod config;
pub mod figures;
pub mod sweep;

pub use config::{log_grid, parse_axis, SweepArchitecture, SweepConfig, SPEED_OF_LIGHT};
pub use figures::{
    capacity_rows, collect_figure_records, comparison_rows, emit_figure_data, spectrum_rows, CapacityRow,
    ComparisonRow, FigureId, FigureRecords, SpectrumRow,
};
pub use sweep::{
    evaluate_sweep, read_records, records_to_csv_string, run_sweep, timing_path, write_records, write_timings,
    RecordStatus, ResultRecord,
};

/// `File::create` with the path in the error message.
pub fn create_file(path: &std::path::Path) -> crate::Result<std::fs::File> {
    std::fs::File::create(path)
        .map_err(|e| std::io::Error::new(e.kind(), format!("cannot create {}: {e}", path.display())).into())
}
