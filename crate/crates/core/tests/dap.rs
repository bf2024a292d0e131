mod common;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use proptest::prelude::*;

use nearfield_dap::capacity::exact_capacity;
use nearfield_dap::dap::{
    build_analog, build_digital, build_selection, correlation_magnitudes, default_bound, design_for_partition,
    minkowski_surrogate, partition_objective, partition_subarrays, partition_with_correlation, permutation_matrix,
    run_dap, spectrum_efficiency, DapConfig, SubarrayPartition,
};
use nearfield_dap::geometry::{near_field_channel, LinkGeometry};
use nearfield_dap::linalg::{frobenius_norm_sqr, CMatrix};
use nearfield_dap::Error;

use common::{random_channel, random_near_field, rank_one_channel, rng};

#[test]
fn surrogate_examples() {
    let ones = DMatrix::from_element(3, 3, 1.0);
    assert!((minkowski_surrogate(&ones, &[0, 1, 2]).unwrap() - 3.0).abs() < 1e-15);
    let r = DMatrix::from_fn(4, 4, |i, j| (i * 4 + j) as f64 * 0.1 + 0.2);
    assert_eq!(minkowski_surrogate(&r, &[2]).unwrap(), r[(2, 2)]);
    let oracle = (r[(0, 0)] + r[(0, 1)] + r[(1, 0)] + r[(1, 1)]) / 2.0;
    assert!((minkowski_surrogate(&r, &[0, 1]).unwrap() - oracle).abs() < 1e-15);
    assert!(matches!(minkowski_surrogate(&r, &[]), Err(Error::EmptySet)));
}

#[test]
fn surrogate_never_exceeds_the_perron_eigenvalue() {
    let mut g = rng(3);
    for _ in 0..30 {
        let h = random_near_field(&mut g, 7);
        let r = correlation_magnitudes(&h);
        for set in [vec![0, 1, 2], vec![1, 3, 5, 6], (0..7).collect()] {
            let sub = r.select_rows(set.iter()).select_columns(set.iter());
            let top = sub.symmetric_eigenvalues().max();
            assert!(minkowski_surrogate(&r, &set).unwrap() <= top * (1.0 + 1e-12));
        }
    }
}

#[test]
fn one_antenna_per_stream_gives_singletons() {
    let mut g = rng(5);
    let h = random_near_field(&mut g, 6);
    let p = partition_subarrays(&h, 6, 1).unwrap();
    assert_eq!(p.sizes(), vec![1; 6]);
}

#[test]
fn rank_one_channel_splits_evenly() {
    let mut g = rng(8);
    let (h, _) = rank_one_channel(&mut g, 3, 4);
    let p = partition_subarrays(&h, 2, 2).unwrap();
    assert_eq!(p.sizes(), vec![2, 2]);
    let r = correlation_magnitudes(&h);
    assert!((partition_objective(&r, &p) - 2.0 * 3.0 * 2.0).abs() < 1e-9);
}

#[test]
fn infeasible_bound_is_rejected() {
    let mut g = rng(1);
    let h = random_near_field(&mut g, 9);
    assert!(matches!(
        partition_subarrays(&h, 2, 4),
        Err(Error::InfeasiblePartition { antennas: 9, streams: 2, bound: 4 })
    ));
}

#[test]
fn selection_examples() {
    let p = SubarrayPartition::new(vec![vec![0], vec![1]], 1, 2).unwrap();
    let s = build_selection(&p);
    assert_eq!(s.entries(), &DMatrix::<u8>::identity(2, 2));
    let p = SubarrayPartition::new(vec![vec![0, 2], vec![1]], 2, 3).unwrap();
    let s = build_selection(&p);
    assert_eq!(s.entries(), &DMatrix::from_row_slice(3, 2, &[1, 0, 0, 1, 1, 0]));
    assert_eq!(s.column_sums(), vec![2, 1]);
}

#[test]
fn analog_phases_follow_rank_one_direction() {
    let mut g = rng(21);
    let (h, b) = rank_one_channel(&mut g, 4, 9);
    let p = SubarrayPartition::new(vec![vec![0, 3, 4, 8], vec![1, 2], vec![5, 6, 7]], 4, 9).unwrap();
    let analog = build_analog(&h, &p);
    for set in p.sets() {
        let reference = analog.phases()[set[0]] * b[set[0]].conj();
        for &j in set {
            let z = analog.phases()[j];
            assert!((z.norm() - 1.0).abs() < 1e-12);
            assert!((z * b[j].conj() - reference).norm() < 1e-9);
        }
    }
}

#[test]
fn objective_is_sum_of_subarray_gains() {
    let mut g = rng(4);
    let h = random_near_field(&mut g, 8);
    let p = partition_subarrays(&h, 3, default_bound(8, 3, 2)).unwrap();
    let analog = build_analog(&h, &p);
    let sel = build_selection(&p);
    let fa = CMatrix::from_diagonal(&DVector::from_vec(analog.phases().to_vec()));
    let whole = frobenius_norm_sqr(&(h.entries() * fa * sel.to_complex()));
    let by_set: f64 = p
        .sets()
        .iter()
        .map(|set| {
            let f = DVector::from_iterator(set.len(), set.iter().map(|&a| analog.phases()[a]));
            (h.entries().select_columns(set.iter()) * f).norm_squared()
        })
        .sum();
    assert!((whole - by_set).abs() <= 1e-9 * whole);
}

#[test]
fn contiguous_layout_through_permutation() {
    let mut g = rng(6);
    let h = random_near_field(&mut g, 9);
    let p = partition_subarrays(&h, 3, default_bound(9, 3, 2)).unwrap();
    let perm = permutation_matrix(&p.permutation()).map(|x| Complex64::new(x, 0.0));
    // P^T F_S is block diagonal: rows of each set are contiguous
    let laid_out = perm.transpose() * build_selection(&p).to_complex();
    let mut row = 0;
    for (i, size) in p.sizes().into_iter().enumerate() {
        for _ in 0..size {
            for k in 0..p.num_sets() {
                let want = if k == i { 1.0 } else { 0.0 };
                assert_eq!(laid_out[(row, k)], Complex64::new(want, 0.0));
            }
            row += 1;
        }
    }
    // P^T F_A P stays diagonal
    let analog = build_analog(&h, &p);
    let fa = CMatrix::from_diagonal(&DVector::from_vec(analog.phases().to_vec()));
    let moved = perm.transpose() * &fa * &perm;
    for i in 0..9 {
        for j in 0..9 {
            if i != j {
                assert_eq!(moved[(i, j)], Complex64::new(0.0, 0.0));
            }
        }
    }
}

#[test]
fn single_stream_reduces_to_beamforming() {
    let mut g = rng(12);
    let h = random_near_field(&mut g, 6);
    let p = SubarrayPartition::new(vec![(0..6).collect()], 6, 6).unwrap();
    let t = design_for_partition(&h, &p, 2.0, 0.3).unwrap();
    let f = t.combined();
    let gain = (h.entries() * &f).norm_squared();
    let se = spectrum_efficiency(&h, &t, 0.3).unwrap();
    assert!((se - (1.0 + gain / 0.3).log2()).abs() < 1e-10);
    assert!((t.transmit_power() - 2.0).abs() < 1e-10);
}

#[test]
fn zero_digital_stage_gives_zero_rate() {
    let mut g = rng(13);
    let h = random_near_field(&mut g, 5);
    let p = partition_subarrays(&h, 2, 4).unwrap();
    let mut t = design_for_partition(&h, &p, 1.0, 0.1).unwrap();
    t.digital.matrix.fill(Complex64::new(0.0, 0.0));
    assert_eq!(spectrum_efficiency(&h, &t, 0.1).unwrap(), 0.0);
}

#[test]
fn digital_stage_on_diagonal_effective_channel() {
    // columns of H on disjoint singleton sets: H_e = diag(2, 1) up to phases
    let h = nearfield_dap::geometry::ChannelMatrix::new(
        DMatrix::from_row_slice(2, 2, &[
            Complex64::new(2.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(1.0, 0.0),
        ]),
        1.0,
        nearfield_dap::geometry::ChannelModel::NearField,
    )
    .unwrap();
    let p = SubarrayPartition::new(vec![vec![0], vec![1]], 1, 2).unwrap();
    let analog = build_analog(&h, &p);
    let d = build_digital(&h, &analog, &build_selection(&p), 1.0, 0.1).unwrap();
    // gains 4 and 1: level (1 + 0.025 + 0.1) / 2
    let mu = (1.0 + 0.1 / 4.0 + 0.1) / 2.0;
    assert!((d.stream_powers[0] - (mu - 0.025)).abs() < 1e-12);
    assert!((d.stream_powers[1] - (mu - 0.1)).abs() < 1e-12);
}

#[test]
fn far_field_link_collapses_to_one_stream() {
    let link = LinkGeometry::parallel(16, 16, 0.5, 1e4, 1.0).unwrap();
    let h = near_field_channel(&link).unwrap().normalized_to(1.0).unwrap();
    let noise = 1e-2;
    let out = run_dap(&h, &link, 1.0, noise, &DapConfig::default()).unwrap();
    assert_eq!(out.streams(), 1);
    let cap = exact_capacity(&h, 1.0, noise).unwrap().capacity_bits;
    let half_snr = ((2f64.powf(cap) - 1.0) / 2.0).ln_1p() / std::f64::consts::LN_2;
    assert!(out.spectral_efficiency >= half_snr, "{} vs {half_snr}", out.spectral_efficiency);
}

#[test]
fn design_is_deterministic() {
    let mut g = rng(30);
    let h = random_channel(&mut g, 5, 10);
    let a = partition_subarrays(&h, 3, 6).unwrap();
    let b = partition_subarrays(&h, 3, 6).unwrap();
    assert_eq!(a, b);
    let r = correlation_magnitudes(&h);
    assert_eq!(partition_with_correlation(&r, 3, 6).unwrap(), a);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn design_meets_every_constraint(seed in 0u64..10_000, nt in 3usize..12, ns_raw in 1usize..6, slack in 0usize..3) {
        let mut g = rng(seed);
        let h = random_near_field(&mut g, nt);
        let ns = ns_raw.min(nt);
        let bound = default_bound(nt, ns, slack).min(nt);
        let p = partition_subarrays(&h, ns, bound).unwrap();
        prop_assert_eq!(p.num_sets(), ns);
        prop_assert!(p.sizes().iter().all(|&s| s >= 1 && s <= bound));
        let mut owners = p.permutation();
        owners.sort_unstable();
        prop_assert_eq!(owners, (0..nt).collect::<Vec<_>>());

        let noise = 0.05;
        let t = design_for_partition(&h, &p, 1.0, noise).unwrap();
        prop_assert!(t.check_constraints(1.0).satisfied(1e-9));
        let se = spectrum_efficiency(&h, &t, noise).unwrap();
        let cap = exact_capacity(&h, 1.0, noise).unwrap().capacity_bits;
        prop_assert!(se <= cap * (1.0 + 1e-9));
    }
}
