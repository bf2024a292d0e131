#![allow(dead_code)]

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use nearfield_dap::geometry::{near_field_channel, ArrayGeometry, ChannelMatrix, ChannelModel, LinkGeometry};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Small tilted near-field link with `nt` transmit elements, one wavelength
/// equal to one meter.
pub fn random_near_field(rng: &mut ChaCha8Rng, nt: usize) -> ChannelMatrix {
    let nr = rng.random_range(2..=6);
    let tx = ArrayGeometry::new(nt, rng.random_range(0.3..1.0), rng.random_range(-0.5..0.5), [0.0; 3]).unwrap();
    let rx = ArrayGeometry::new(nr, rng.random_range(0.3..1.0), rng.random_range(-0.5..0.5), [0.0; 3]).unwrap();
    let link = LinkGeometry::new(tx, rx, rng.random_range(1.0..8.0), 1.0).unwrap();
    near_field_channel(&link).unwrap()
}

/// Entries with independent uniform phases and magnitudes in [0.5, 1.5).
pub fn random_channel(rng: &mut ChaCha8Rng, nr: usize, nt: usize) -> ChannelMatrix {
    let m = DMatrix::from_fn(nr, nt, |_, _| {
        Complex64::from_polar(rng.random_range(0.5..1.5), rng.random_range(0.0..std::f64::consts::TAU))
    });
    ChannelMatrix::new(m, 1.0, ChannelModel::NearField).unwrap()
}

/// `a b^H` with random unit-modulus `a` and `b`.
pub fn rank_one_channel(rng: &mut ChaCha8Rng, nr: usize, nt: usize) -> (ChannelMatrix, Vec<Complex64>) {
    let a: Vec<Complex64> = (0..nr).map(|_| Complex64::from_polar(1.0, rng.random_range(0.0..6.3))).collect();
    let b: Vec<Complex64> = (0..nt).map(|_| Complex64::from_polar(1.0, rng.random_range(0.0..6.3))).collect();
    let m = DMatrix::from_fn(nr, nt, |p, q| a[p] * b[q].conj());
    (ChannelMatrix::new(m, 1.0, ChannelModel::NearField).unwrap(), b)
}
