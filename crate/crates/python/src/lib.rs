//! Python bindings for the near-field DAP library.

use num_complex::Complex64;
use pyo3::exceptions::{PyIOError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use nearfield_dap::baselines;
use nearfield_dap::capacity;
use nearfield_dap::dap::{self, DapConfig};
use nearfield_dap::energy::{self, ArchitectureKind, ArchitectureSpec, PowerModel};
use nearfield_dap::geometry::{self, ArrayGeometry, ChannelMatrix, LinkGeometry};
use nearfield_dap::harness::{self, SweepConfig};
use nearfield_dap::pswf::{self, DEFAULT_QUADRATURE_ORDER};
use nearfield_dap::waterfill;
use nearfield_dap::Error;

fn py_err(e: Error) -> PyErr {
    match e {
        Error::Io(_) | Error::Csv(_) => PyIOError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn rows(m: &nearfield_dap::linalg::CMatrix) -> Vec<Vec<Complex64>> {
    (0..m.nrows()).map(|i| m.row(i).iter().copied().collect()).collect()
}

/// Pair of ULAs facing each other across `distance` meters.
#[pyclass(name = "Link", module = "nearfield_dap_py", frozen)]
#[derive(Clone)]
struct PyLink {
    inner: LinkGeometry,
}

#[pymethods]
impl PyLink {
    #[new]
    #[pyo3(signature = (num_tx, num_rx, spacing, distance, wavelength, tx_tilt=0.0, rx_tilt=0.0))]
    fn new(
        num_tx: usize,
        num_rx: usize,
        spacing: f64,
        distance: f64,
        wavelength: f64,
        tx_tilt: f64,
        rx_tilt: f64,
    ) -> PyResult<Self> {
        let tx = ArrayGeometry::new(num_tx, spacing, tx_tilt, [0.0; 3]).map_err(py_err)?;
        let rx = ArrayGeometry::new(num_rx, spacing, rx_tilt, [0.0; 3]).map_err(py_err)?;
        let inner = LinkGeometry::new(tx, rx, distance, wavelength).map_err(py_err)?;
        Ok(Self { inner })
    }

    #[getter]
    fn distance(&self) -> f64 {
        self.inner.distance()
    }

    #[getter]
    fn wavelength(&self) -> f64 {
        self.inner.wavelength()
    }

    fn bandwidth_parameter(&self) -> f64 {
        pswf::bandwidth_parameter(&self.inner)
    }

    fn dof_estimate(&self) -> f64 {
        pswf::dof_estimate(&self.inner)
    }

    fn rayleigh_distance(&self) -> f64 {
        geometry::rayleigh_distance(self.inner.tx().aperture(), self.inner.wavelength())
    }

    /// Unit-gain spherical-wave channel, optionally rescaled to a Frobenius
    /// power.
    #[pyo3(signature = (channel_power=None))]
    fn near_field_channel(&self, channel_power: Option<f64>) -> PyResult<PyChannel> {
        let h = geometry::near_field_channel(&self.inner).map_err(py_err)?;
        let inner = match channel_power {
            Some(p) => h.normalized_to(p).map_err(py_err)?,
            None => h,
        };
        Ok(PyChannel { inner })
    }

    fn far_field_channel(&self, aod: f64, aoa: f64) -> PyResult<PyChannel> {
        let inner = geometry::far_field_channel(&self.inner, aod, aoa).map_err(py_err)?;
        Ok(PyChannel { inner })
    }

    fn __repr__(&self) -> String {
        format!(
            "Link(num_tx={}, num_rx={}, distance={}, wavelength={})",
            self.inner.tx().num_elements(),
            self.inner.rx().num_elements(),
            self.inner.distance(),
            self.inner.wavelength()
        )
    }
}

#[pyclass(name = "Channel", module = "nearfield_dap_py", frozen)]
#[derive(Clone)]
struct PyChannel {
    inner: ChannelMatrix,
}

#[pymethods]
impl PyChannel {
    #[getter]
    fn shape(&self) -> (usize, usize) {
        (self.inner.num_rx(), self.inner.num_tx())
    }

    /// Squared Frobenius norm.
    #[getter]
    fn power(&self) -> f64 {
        self.inner.power()
    }

    fn entries(&self) -> Vec<Vec<Complex64>> {
        rows(self.inner.entries())
    }

    fn normalized_to(&self, channel_power: f64) -> PyResult<Self> {
        Ok(Self { inner: self.inner.normalized_to(channel_power).map_err(py_err)? })
    }

    fn singular_values(&self) -> Vec<f64> {
        nearfield_dap::linalg::singular_values(self.inner.entries())
    }

    fn capacity(&self, total_power: f64, noise_power: f64) -> PyResult<f64> {
        Ok(capacity::exact_capacity(&self.inner, total_power, noise_power).map_err(py_err)?.capacity_bits)
    }

    fn correlation(&self, other: &PyChannel) -> f64 {
        geometry::channel_correlation(&self.inner, &other.inner)
    }
}

/// Top `count` eigenvalues of the sinc kernel with bandwidth `c_y`.
#[pyfunction]
#[pyo3(signature = (c_y, count, quadrature_order=DEFAULT_QUADRATURE_ORDER))]
fn pswf_eigenvalues(c_y: f64, count: usize, quadrature_order: usize) -> PyResult<Vec<f64>> {
    let spec = pswf::pswf_eigenvalues(c_y, count, quadrature_order).map_err(py_err)?;
    Ok(spec.eigenvalues().to_vec())
}

/// Per-stream powers and the water level.
#[pyfunction]
fn water_fill(gains: Vec<f64>, total_power: f64, noise_power: f64) -> PyResult<(Vec<f64>, f64)> {
    let a = waterfill::water_fill(&gains, total_power, noise_power).map_err(py_err)?;
    Ok((a.per_stream_power, a.water_level))
}

/// PSWF capacity estimate for `link` with channel power `channel_power`.
#[pyfunction]
#[pyo3(signature = (link, channel_power, total_power, noise_power, quadrature_order=DEFAULT_QUADRATURE_ORDER))]
fn pswf_capacity(
    link: &PyLink,
    channel_power: f64,
    total_power: f64,
    noise_power: f64,
    quadrature_order: usize,
) -> PyResult<f64> {
    let l = &link.inner;
    let count = l.tx().num_elements().min(l.rx().num_elements()).min(quadrature_order);
    let spec = pswf::pswf_eigenvalues(pswf::bandwidth_parameter(l), count, quadrature_order).map_err(py_err)?;
    let report = capacity::pswf_capacity_estimate(&spec, channel_power, total_power, noise_power).map_err(py_err)?;
    Ok(report.capacity_bits)
}

#[pyfunction]
fn equal_power_capacity(link: &PyLink, channel_power: f64, total_power: f64, noise_power: f64) -> f64 {
    capacity::equal_power_capacity_approx(&link.inner, channel_power, total_power, noise_power)
}

/// `(root, sqrt(0.255 P P_H / noise))`.
#[pyfunction]
fn optimal_dof(total_power: f64, channel_power: f64, noise_power: f64) -> PyResult<(f64, f64)> {
    let o = capacity::optimal_dof(total_power, channel_power, noise_power).map_err(py_err)?;
    Ok((o.root, o.approximation))
}

/// Result of a DAP design.
#[pyclass(name = "DapResult", module = "nearfield_dap_py", frozen, get_all)]
struct PyDapResult {
    spectral_efficiency: f64,
    streams: usize,
    dof_streams: usize,
    bound: usize,
    partition: Vec<Vec<usize>>,
    analog_phases: Vec<Complex64>,
    digital: Vec<Vec<Complex64>>,
    stream_powers: Vec<f64>,
    transmit_power: f64,
}

#[pymethods]
impl PyDapResult {
    fn __repr__(&self) -> String {
        format!(
            "DapResult(streams={}, spectral_efficiency={:.4}, bound={})",
            self.streams, self.spectral_efficiency, self.bound
        )
    }
}

#[pyfunction]
#[pyo3(signature = (channel, link, total_power, noise_power, bound_slack=dap::DEFAULT_BOUND_SLACK, streams=None))]
fn run_dap(
    channel: &PyChannel,
    link: &PyLink,
    total_power: f64,
    noise_power: f64,
    bound_slack: usize,
    streams: Option<usize>,
) -> PyResult<PyDapResult> {
    let config = DapConfig { bound_slack, streams, ..DapConfig::default() };
    let out = dap::run_dap(&channel.inner, &link.inner, total_power, noise_power, &config).map_err(py_err)?;
    Ok(PyDapResult {
        spectral_efficiency: out.spectral_efficiency,
        streams: out.streams(),
        dof_streams: out.dof_streams,
        bound: out.partition.bound(),
        partition: out.partition.sets().to_vec(),
        analog_phases: out.triple.analog.phases().to_vec(),
        digital: rows(&out.triple.digital.matrix),
        stream_powers: out.triple.digital.stream_powers.clone(),
        transmit_power: out.triple.transmit_power(),
    })
}

#[pyfunction]
fn fully_digital(channel: &PyChannel, total_power: f64, noise_power: f64) -> PyResult<f64> {
    baselines::fully_digital_precoder(&channel.inner, total_power, noise_power).map_err(py_err)
}

#[pyfunction]
fn fully_connected(channel: &PyChannel, rf_chains: usize, total_power: f64, noise_power: f64) -> PyResult<f64> {
    baselines::fully_connected_baseline(&channel.inner, rf_chains, total_power, noise_power).map_err(py_err)
}

#[pyfunction]
fn sub_connected_static(channel: &PyChannel, rf_chains: usize, total_power: f64, noise_power: f64) -> PyResult<f64> {
    baselines::sub_connected_static_baseline(&channel.inner, rf_chains, total_power, noise_power).map_err(py_err)
}

/// Bits/s/Hz/W. `power_model` may override any of p_static, p_rf_chain,
/// p_phase_shifter, p_switch, p_power_amp (mW).
#[pyfunction]
#[pyo3(signature = (spectral_efficiency, architecture, rf_chains, antennas, power_model=None))]
fn energy_efficiency(
    spectral_efficiency: f64,
    architecture: &str,
    rf_chains: usize,
    antennas: usize,
    power_model: Option<&Bound<'_, PyDict>>,
) -> PyResult<f64> {
    let kind: ArchitectureKind = architecture.parse().map_err(py_err)?;
    let spec = ArchitectureSpec::new(kind, rf_chains, antennas).map_err(py_err)?;
    let mut model = PowerModel::REFERENCE;
    if let Some(d) = power_model {
        for (k, v) in d.iter() {
            let key: String = k.extract()?;
            let v: f64 = v.extract()?;
            let slot = match key.as_str() {
                "p_static" => &mut model.p_static,
                "p_rf_chain" => &mut model.p_rf_chain,
                "p_phase_shifter" => &mut model.p_phase_shifter,
                "p_switch" => &mut model.p_switch,
                "p_power_amp" => &mut model.p_power_amp,
                other => return Err(PyValueError::new_err(format!("unknown power model key {other:?}"))),
            };
            *slot = v;
        }
    }
    energy::energy_efficiency(spectral_efficiency, &spec, &model).map_err(py_err)
}

/// Evaluates a TOML sweep config and returns one dict per record.
#[pyfunction]
fn sweep<'py>(py: Python<'py>, config_toml: &str) -> PyResult<Vec<Bound<'py, PyDict>>> {
    let config = SweepConfig::from_toml_str(config_toml).map_err(py_err)?;
    let records = harness::evaluate_sweep(&config).map_err(py_err)?;
    records
        .into_iter()
        .map(|r| {
            let d = PyDict::new(py);
            d.set_item("scenario_id", &r.scenario_id)?;
            d.set_item("distance", r.distance)?;
            d.set_item("snr_db", r.snr_db)?;
            d.set_item("architecture", r.architecture.as_str())?;
            d.set_item("rf_chains_requested", r.rf_chains_requested)?;
            d.set_item("ns_chosen", r.ns_chosen)?;
            d.set_item("se_bits", r.se_bits)?;
            d.set_item("ee_bits_per_watt", r.ee)?;
            d.set_item("ok", r.is_ok())?;
            d.set_item("reason", &r.reason)?;
            Ok(d)
        })
        .collect()
}

#[pymodule]
fn nearfield_dap_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyLink>()?;
    m.add_class::<PyChannel>()?;
    m.add_class::<PyDapResult>()?;
    m.add_function(wrap_pyfunction!(pswf_eigenvalues, m)?)?;
    m.add_function(wrap_pyfunction!(water_fill, m)?)?;
    m.add_function(wrap_pyfunction!(pswf_capacity, m)?)?;
    m.add_function(wrap_pyfunction!(equal_power_capacity, m)?)?;
    m.add_function(wrap_pyfunction!(optimal_dof, m)?)?;
    m.add_function(wrap_pyfunction!(run_dap, m)?)?;
    m.add_function(wrap_pyfunction!(fully_digital, m)?)?;
    m.add_function(wrap_pyfunction!(fully_connected, m)?)?;
    m.add_function(wrap_pyfunction!(sub_connected_static, m)?)?;
    m.add_function(wrap_pyfunction!(energy_efficiency, m)?)?;
    m.add_function(wrap_pyfunction!(sweep, m)?)?;
    Ok(())
}
