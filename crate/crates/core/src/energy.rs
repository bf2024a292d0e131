//! Downlink power consumption and energy efficiency of precoding
//! architectures.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Component power draws in milliwatts.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerModel {
    pub p_static: f64,
    pub p_rf_chain: f64,
    pub p_phase_shifter: f64,
    pub p_switch: f64,
    pub p_power_amp: f64,
}

impl PowerModel {
    /// 2500 mW static, 160 mW per RF chain, 10 mW per phase shifter and per
    /// switch, 30 mW per power amplifier.
    pub const REFERENCE: PowerModel = PowerModel {
        p_static: 2500.0,
        p_rf_chain: 160.0,
        p_phase_shifter: 10.0,
        p_switch: 10.0,
        p_power_amp: 30.0,
    };

    pub fn validate(&self) -> Result<()> {
        let all = [self.p_static, self.p_rf_chain, self.p_phase_shifter, self.p_switch, self.p_power_amp];
        if all.iter().any(|p| !(p.is_finite() && *p >= 0.0)) {
            return Err(Error::InvalidParameter("power model entries must be nonnegative".into()));
        }
        Ok(())
    }
}

impl Default for PowerModel {
    fn default() -> Self {
        Self::REFERENCE
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ArchitectureKind {
    FullyDigital,
    FullyConnected,
    SubConnectedStatic,
    Dap,
}

impl ArchitectureKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::FullyDigital => "fully_digital",
            Self::FullyConnected => "fully_connected",
            Self::SubConnectedStatic => "sub_connected_static",
            Self::Dap => "dap",
        }
    }
}

impl std::fmt::Display for ArchitectureKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for ArchitectureKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fully_digital" => Ok(Self::FullyDigital),
            "fully_connected" => Ok(Self::FullyConnected),
            "sub_connected_static" => Ok(Self::SubConnectedStatic),
            "dap" => Ok(Self::Dap),
            other => Err(Error::InvalidParameter(format!("unknown architecture {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ArchitectureSpec {
    kind: ArchitectureKind,
    rf_chains: usize,
    antennas: usize,
}

impl ArchitectureSpec {
    pub fn new(kind: ArchitectureKind, rf_chains: usize, antennas: usize) -> Result<Self> {
        if rf_chains == 0 || antennas == 0 || rf_chains > antennas {
            return Err(Error::InvalidParameter(format!(
                "need 1 <= rf_chains <= antennas, got {rf_chains} and {antennas}"
            )));
        }
        if kind == ArchitectureKind::FullyDigital && rf_chains != antennas {
            return Err(Error::InvalidParameter("fully digital needs one RF chain per antenna".into()));
        }
        Ok(Self { kind, rf_chains, antennas })
    }

    pub fn fully_digital(antennas: usize) -> Self {
        Self { kind: ArchitectureKind::FullyDigital, rf_chains: antennas, antennas }
    }

    pub fn kind(&self) -> ArchitectureKind {
        self.kind
    }

    pub fn rf_chains(&self) -> usize {
        self.rf_chains
    }

    pub fn antennas(&self) -> usize {
        self.antennas
    }

    pub fn phase_shifters(&self) -> usize {
        match self.kind {
            ArchitectureKind::FullyDigital => 0,
            ArchitectureKind::FullyConnected => self.antennas * self.rf_chains,
            ArchitectureKind::SubConnectedStatic | ArchitectureKind::Dap => self.antennas,
        }
    }

    /// Only the DAP selection network has switches, counted one per active
    /// RF chain.
    pub fn switches(&self) -> usize {
        match self.kind {
            ArchitectureKind::Dap => self.rf_chains,
            _ => 0,
        }
    }

    /// Total consumed power in milliwatts.
    pub fn consumed_power_mw(&self, model: &PowerModel) -> f64 {
        model.p_static
            + self.rf_chains as f64 * model.p_rf_chain
            + self.phase_shifters() as f64 * model.p_phase_shifter
            + self.switches() as f64 * model.p_switch
            + self.antennas as f64 * model.p_power_amp
    }
}

/// Spectral efficiency per consumed watt, in bits/s/Hz/W.
pub fn energy_efficiency(spectral_efficiency: f64, arch: &ArchitectureSpec, model: &PowerModel) -> Result<f64> {
    if spectral_efficiency.is_nan() || spectral_efficiency < 0.0 {
        return Err(Error::InvalidParameter(format!(
            "spectral efficiency must be nonnegative, got {spectral_efficiency}"
        )));
    }
    model.validate()?;
    let watts = arch.consumed_power_mw(model) / 1000.0;
    Ok(spectral_efficiency / watts)
}
