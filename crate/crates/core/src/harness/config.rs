use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::dap::DEFAULT_BOUND_SLACK;
use crate::energy::{ArchitectureKind, PowerModel};
use crate::error::{Error, Result};
use crate::geometry::LinkGeometry;
use crate::pswf::DEFAULT_QUADRATURE_ORDER;

pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// One architecture column of a sweep. Without `rf_chains` the hybrid
/// architectures use the stream count suggested by the PSWF spectrum and
/// the fully digital one uses every antenna.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepArchitecture {
    pub kind: ArchitectureKind,
    #[serde(default)]
    pub rf_chains: Option<usize>,
}

impl SweepArchitecture {
    pub fn auto(kind: ArchitectureKind) -> Self {
        Self { kind, rf_chains: None }
    }

    pub fn fixed(kind: ArchitectureKind, rf_chains: usize) -> Self {
        Self { kind, rf_chains: Some(rf_chains) }
    }

    /// `dap`, `dap:8`, `fully_connected:auto`, ...
    pub fn parse(s: &str) -> Result<Self> {
        let (kind, chains) = match s.split_once(':') {
            Some((k, c)) => (k, Some(c)),
            None => (s, None),
        };
        let kind = kind.trim().parse()?;
        let rf_chains = match chains.map(str::trim) {
            None | Some("auto") => None,
            Some(c) => Some(
                c.parse()
                    .map_err(|_| Error::Config(format!("bad rf chain count {c:?} in {s:?}")))?,
            ),
        };
        Ok(Self { kind, rf_chains })
    }

    pub fn label(&self) -> String {
        match self.rf_chains {
            Some(k) => format!("{}:{k}", self.kind),
            None => format!("{}:auto", self.kind),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepConfig {
    /// Hz.
    pub carrier_frequency: f64,
    pub num_tx: usize,
    pub num_rx: usize,
    pub spacing_over_wavelength: f64,
    /// Meters.
    pub distances: Vec<f64>,
    pub snrs_db: Vec<f64>,
    pub architectures: Vec<SweepArchitecture>,
    pub bound_slack: usize,
    pub quadrature_order: usize,
    /// Frobenius power the unit-gain channel is rescaled to before use.
    pub channel_power: f64,
    pub total_power: f64,
    pub power_model: PowerModel,
    pub output_path: Option<PathBuf>,
}

impl Default for SweepConfig {
    /// 256 x 256 half-wavelength ULAs at 100 GHz.
    fn default() -> Self {
        Self {
            carrier_frequency: 100e9,
            num_tx: 256,
            num_rx: 256,
            spacing_over_wavelength: 0.5,
            distances: log_grid(1.0, 100.0, 21),
            snrs_db: vec![30.0],
            architectures: vec![
                SweepArchitecture::auto(ArchitectureKind::FullyDigital),
                SweepArchitecture::auto(ArchitectureKind::Dap),
                SweepArchitecture::fixed(ArchitectureKind::FullyConnected, 8),
                SweepArchitecture::fixed(ArchitectureKind::FullyConnected, 4),
                SweepArchitecture::fixed(ArchitectureKind::SubConnectedStatic, 8),
                SweepArchitecture::fixed(ArchitectureKind::SubConnectedStatic, 4),
            ],
            bound_slack: DEFAULT_BOUND_SLACK,
            quadrature_order: DEFAULT_QUADRATURE_ORDER,
            channel_power: 1.0,
            total_power: 1.0,
            power_model: PowerModel::REFERENCE,
            output_path: None,
        }
    }
}

impl SweepConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let config: Self = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        Self::from_toml_str(&std::fs::read_to_string(path)?)
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn wavelength(&self) -> f64 {
        SPEED_OF_LIGHT / self.carrier_frequency
    }

    pub fn spacing(&self) -> f64 {
        self.spacing_over_wavelength * self.wavelength()
    }

    pub fn link(&self, distance: f64) -> Result<LinkGeometry> {
        LinkGeometry::parallel(self.num_tx, self.num_rx, self.spacing(), distance, self.wavelength())
    }

    /// Noise power for an SNR of `P_tot / noise` in dB.
    pub fn noise_power(&self, snr_db: f64) -> f64 {
        self.total_power / 10f64.powf(snr_db / 10.0)
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("carrier_frequency", self.carrier_frequency),
            ("spacing_over_wavelength", self.spacing_over_wavelength),
            ("channel_power", self.channel_power),
            ("total_power", self.total_power),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Config(format!("{name} must be positive, got {v}")));
            }
        }
        if self.num_tx == 0 || self.num_rx == 0 {
            return Err(Error::Config("array sizes must be positive".into()));
        }
        if self.quadrature_order == 0 {
            return Err(Error::Config("quadrature_order must be positive".into()));
        }
        if self.distances.is_empty() {
            return Err(Error::Config("distances must be nonempty".into()));
        }
        if let Some(d) = self.distances.iter().find(|d| !(**d > 0.0 && d.is_finite())) {
            return Err(Error::Config(format!("distances must be positive, got {d}")));
        }
        if self.snrs_db.is_empty() {
            return Err(Error::Config("snrs_db must be nonempty".into()));
        }
        if let Some(s) = self.snrs_db.iter().find(|s| !s.is_finite()) {
            return Err(Error::Config(format!("snrs_db must be finite, got {s}")));
        }
        if self.architectures.is_empty() {
            return Err(Error::Config("architectures must be nonempty".into()));
        }
        self.power_model.validate()
    }
}

/// `points` values spaced evenly in log scale over `[start, stop]`.
pub fn log_grid(start: f64, stop: f64, points: usize) -> Vec<f64> {
    match points {
        0 => Vec::new(),
        1 => vec![start],
        _ => {
            let (a, b) = (start.ln(), stop.ln());
            (0..points)
                .map(|i| {
                    if i + 1 == points {
                        stop
                    } else {
                        (a + (b - a) * i as f64 / (points - 1) as f64).exp()
                    }
                })
                .collect()
        }
    }
}

/// Parses `1,2,5` or `log:1:100:21` or `lin:30:40:6`.
pub fn parse_axis(spec: &str) -> Result<Vec<f64>> {
    let bad = || Error::Config(format!("cannot parse axis {spec:?}"));
    let num = |s: &str| s.trim().parse::<f64>().map_err(|_| bad());
    if let Some(rest) = spec.strip_prefix("log:").or_else(|| spec.strip_prefix("lin:")) {
        let parts: Vec<&str> = rest.split(':').collect();
        if parts.len() != 3 {
            return Err(bad());
        }
        let (a, b) = (num(parts[0])?, num(parts[1])?);
        let n: usize = parts[2].trim().parse().map_err(|_| bad())?;
        if spec.starts_with("log:") {
            if !(a > 0.0 && b > 0.0) {
                return Err(bad());
            }
            return Ok(log_grid(a, b, n));
        }
        return Ok(match n {
            0 => Vec::new(),
            1 => vec![a],
            _ => (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect(),
        });
    }
    spec.split(',').filter(|s| !s.trim().is_empty()).map(num).collect()
}
