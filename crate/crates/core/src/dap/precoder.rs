//! Sub-connected hybrid precoder `F_A F_S F_D` and its spectral efficiency.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::capacity::usable_gains;
use crate::dap::partition::SubarrayPartition;
use crate::error::{Error, Result};
use crate::geometry::ChannelMatrix;
use crate::linalg::{self, CMatrix};
use crate::waterfill::water_fill;

/// Binary `Nt x Ns` antenna-to-RF-chain map, one 1 per row.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SelectionMatrix {
    entries: DMatrix<u8>,
}

impl SelectionMatrix {
    pub fn entries(&self) -> &DMatrix<u8> {
        &self.entries
    }

    pub fn num_antennas(&self) -> usize {
        self.entries.nrows()
    }

    pub fn num_chains(&self) -> usize {
        self.entries.ncols()
    }

    /// RF chain of antenna `a`.
    pub fn chain_of(&self, a: usize) -> usize {
        (0..self.num_chains())
            .find(|&i| self.entries[(a, i)] == 1)
            .expect("every row holds exactly one 1")
    }

    pub fn column_sums(&self) -> Vec<usize> {
        (0..self.num_chains())
            .map(|i| self.entries.column(i).iter().map(|&x| x as usize).sum())
            .collect()
    }

    pub fn to_complex(&self) -> CMatrix {
        self.entries.map(|x| Complex64::new(x as f64, 0.0))
    }
}

/// Diagonal of `F_A`: one unit-modulus phase per antenna.
#[derive(Debug, Clone, PartialEq)]
pub struct AnalogPrecoder {
    phases: Vec<Complex64>,
}

impl AnalogPrecoder {
    pub fn new(phases: Vec<Complex64>) -> Result<Self> {
        if phases.iter().any(|z| (z.norm() - 1.0).abs() > 1e-9) {
            return Err(Error::InvalidParameter("analog phases must have unit modulus".into()));
        }
        Ok(Self { phases })
    }

    pub fn phases(&self) -> &[Complex64] {
        &self.phases
    }

    pub fn to_matrix(&self) -> CMatrix {
        CMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(&self.phases))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DigitalPrecoder {
    /// `Ns x Ns` baseband precoder.
    pub matrix: CMatrix,
    /// Water-filled power per effective stream, strongest first.
    pub stream_powers: Vec<f64>,
    /// Squared singular values of the column-normalised effective channel.
    pub effective_gains: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PrecoderTriple {
    pub analog: AnalogPrecoder,
    pub selection: SelectionMatrix,
    pub digital: DigitalPrecoder,
}

impl PrecoderTriple {
    pub fn streams(&self) -> usize {
        self.selection.num_chains()
    }

    /// `F_A F_S F_D` as an `Nt x Ns` matrix.
    pub fn combined(&self) -> CMatrix {
        let (nt, ns) = (self.selection.num_antennas(), self.streams());
        let fd = &self.digital.matrix;
        CMatrix::from_fn(nt, ns, |a, k| self.analog.phases[a] * fd[(self.selection.chain_of(a), k)])
    }

    pub fn transmit_power(&self) -> f64 {
        linalg::frobenius_norm_sqr(&self.combined())
    }

    /// Checks the four structural constraints of the precoder design problem.
    pub fn check_constraints(&self, total_power: f64) -> ConstraintCheck {
        let power = self.transmit_power();
        let sel = self.selection.entries();
        ConstraintCheck {
            power_residual: (power - total_power).abs() / total_power,
            unit_modulus: self.analog.phases.iter().all(|z| (z.norm() - 1.0).abs() <= 1e-9),
            binary_selection: sel.iter().all(|&x| x <= 1),
            one_chain_per_antenna: (0..sel.nrows()).all(|a| sel.row(a).iter().map(|&x| x as usize).sum::<usize>() == 1),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstraintCheck {
    /// `| ||F_A F_S F_D||_F^2 - P | / P`.
    pub power_residual: f64,
    pub unit_modulus: bool,
    pub binary_selection: bool,
    pub one_chain_per_antenna: bool,
}

impl ConstraintCheck {
    /// All constraints hold, with the power budget met to `tol` relative.
    pub fn satisfied(&self, tol: f64) -> bool {
        self.power_residual <= tol && self.unit_modulus && self.binary_selection && self.one_chain_per_antenna
    }
}

/// `[F_S]_{j,i} = 1` iff antenna `j` belongs to set `i`.
pub fn build_selection(partition: &SubarrayPartition) -> SelectionMatrix {
    let mut entries = DMatrix::<u8>::zeros(partition.num_antennas(), partition.num_sets());
    for (i, set) in partition.sets().iter().enumerate() {
        for &j in set {
            entries[(j, i)] = 1;
        }
    }
    SelectionMatrix { entries }
}

/// Per-subarray phases of the dominant right singular vector of the column
/// submatrix `H_S`, each vector rotated so its lowest-index entry is real
/// positive before the magnitudes are dropped.
pub fn build_analog(h: &ChannelMatrix, partition: &SubarrayPartition) -> AnalogPrecoder {
    let mut phases = vec![Complex64::new(1.0, 0.0); h.num_tx()];
    for set in partition.sets() {
        let sub = h.entries().select_columns(set.iter());
        let gram = sub.adjoint() * &sub;
        let v = linalg::dominant_eigenvector(&gram);
        for (k, &a) in set.iter().enumerate() {
            let mag = v[k].norm();
            if mag > 0.0 {
                phases[a] = v[k] / mag;
            }
        }
    }
    AnalogPrecoder { phases }
}

/// Water-filling digital precoder for a fixed analog stage.
///
/// With disjoint unit-modulus columns, `(F_A F_S)^H (F_A F_S) = diag(|S_i|)`.
/// The SVD is taken of `H F_A F_S D^{-1/2}` so that `F_A F_S D^{-1/2}` is an
/// isometry; `D^{-1/2}` is folded back into `F_D`, and the transmit power then
/// equals the water-filled budget exactly. Streams whose effective gain is
/// numerically zero get no power.
pub fn build_digital(
    h: &ChannelMatrix,
    analog: &AnalogPrecoder,
    selection: &SelectionMatrix,
    total_power: f64,
    noise_power: f64,
) -> Result<DigitalPrecoder> {
    let (nt, ns) = (selection.num_antennas(), selection.num_chains());
    if nt != h.num_tx() || analog.phases.len() != nt {
        return Err(Error::DimensionMismatch(format!(
            "channel has {} tx antennas, analog {} and selection {}",
            h.num_tx(),
            analog.phases.len(),
            nt
        )));
    }
    let sizes = selection.column_sums();
    if sizes.contains(&0) {
        return Err(Error::EmptySet);
    }
    let inv_sqrt: Vec<f64> = sizes.iter().map(|&s| 1.0 / (s as f64).sqrt()).collect();

    let mut isometry = CMatrix::zeros(nt, ns);
    for a in 0..nt {
        let chain = selection.chain_of(a);
        isometry[(a, chain)] = analog.phases[a] * inv_sqrt[chain];
    }
    let effective = h.entries() * &isometry;
    let (sv, v) = linalg::right_singular_pairs(&effective);
    let gains = usable_gains(&sv);
    let alloc = water_fill(&gains, total_power, noise_power)?;

    let mut gamma_v = CMatrix::zeros(ns, ns);
    for (k, p) in alloc.per_stream_power.iter().enumerate() {
        let amp = p.sqrt();
        for row in 0..ns {
            gamma_v[(row, k)] = v[(row, k)] * amp * inv_sqrt[row];
        }
    }
    let mut stream_powers = alloc.per_stream_power.clone();
    stream_powers.resize(ns, 0.0);
    Ok(DigitalPrecoder {
        matrix: gamma_v,
        stream_powers,
        effective_gains: sv.iter().map(|s| s * s).collect(),
    })
}

/// `log2 det(I + H F F^H H^H / noise)` for an arbitrary `Nt x k` precoder.
pub fn spectral_efficiency_of(h: &ChannelMatrix, precoder: &CMatrix, noise_power: f64) -> Result<f64> {
    if precoder.nrows() != h.num_tx() {
        return Err(Error::DimensionMismatch(format!(
            "precoder has {} rows, channel {} tx antennas",
            precoder.nrows(),
            h.num_tx()
        )));
    }
    let hf = h.entries() * precoder;
    let gram = hf.adjoint() * hf;
    Ok(linalg::log2_det_identity_plus(&gram, noise_power))
}

/// Spectral efficiency of a hybrid triple.
pub fn spectrum_efficiency(h: &ChannelMatrix, triple: &PrecoderTriple, noise_power: f64) -> Result<f64> {
    spectral_efficiency_of(h, &triple.combined(), noise_power)
}

/// Analog + selection + digital design for a given partition.
pub fn design_for_partition(
    h: &ChannelMatrix,
    partition: &SubarrayPartition,
    total_power: f64,
    noise_power: f64,
) -> Result<PrecoderTriple> {
    let selection = build_selection(partition);
    let analog = build_analog(h, partition);
    let digital = build_digital(h, &analog, &selection, total_power, noise_power)?;
    Ok(PrecoderTriple { analog, selection, digital })
}
