use std::f64::consts::PI;

use approx::assert_relative_eq;
use num_complex::Complex64;

use nearfield_dap::geometry::{
    array_response, channel_correlation, element_positions, far_field_channel, near_field_channel, rayleigh_distance,
    ArrayGeometry, LinkGeometry,
};
use nearfield_dap::linalg::singular_values;
use nearfield_dap::Error;

const LAMBDA: f64 = 3e-3;

fn dist(a: [f64; 3], b: [f64; 3]) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2)).sqrt()
}

#[test]
fn positions_are_centred_and_evenly_spaced() {
    let a = ArrayGeometry::new(5, 0.7, 0.3, [1.0, -2.0, 0.5]).unwrap();
    let pts = element_positions(&a);
    assert_eq!(pts.len(), 5);
    for w in pts.windows(2) {
        assert_relative_eq!(dist(w[0], w[1]), 0.7, epsilon = 1e-12);
    }
    for k in 0..3 {
        let mean = pts.iter().map(|p| p[k]).sum::<f64>() / 5.0;
        assert_relative_eq!(mean, a.center()[k], epsilon = 1e-12);
    }
}

#[test]
fn single_element_sits_at_center() {
    let a = ArrayGeometry::ula(1, 1.0).unwrap();
    assert_eq!(element_positions(&a), vec![[0.0, 0.0, 0.0]]);
}

#[test]
fn two_by_two_matches_brute_force_distances() {
    let d = LAMBDA / 2.0;
    let r = 10.0 * LAMBDA;
    let link = LinkGeometry::parallel(2, 2, d, r, LAMBDA).unwrap();
    let h = near_field_channel(&link).unwrap();
    // broadside pair: elements at y = +-d/2, x = 0 and x = r
    let ys = [-d / 2.0, d / 2.0];
    for p in 0..2 {
        for q in 0..2 {
            let rpq = (r * r + (ys[p] - ys[q]).powi(2)).sqrt();
            let expected = Complex64::from_polar(1.0, -2.0 * PI * rpq / LAMBDA);
            assert!((h.entries()[(p, q)] - expected).norm() < 1e-9, "entry ({p},{q})");
        }
    }
}

#[test]
fn full_wavelength_wraps_to_one() {
    let link = LinkGeometry::parallel(1, 1, 1.0, LAMBDA, LAMBDA).unwrap();
    let h = near_field_channel(&link).unwrap();
    assert!((h.entries()[(0, 0)] - Complex64::new(1.0, 0.0)).norm() < 1e-12);
}

#[test]
fn unit_gain_power_is_element_count_product() {
    let link = LinkGeometry::parallel(256, 256, LAMBDA / 2.0, 5.0, LAMBDA).unwrap();
    let h = near_field_channel(&link).unwrap();
    assert!(h.entries().iter().all(|z| (z.norm() - 1.0).abs() < 1e-12));
    assert_relative_eq!(h.power(), 65536.0, max_relative = 1e-12);
}

#[test]
fn normalization_rescales_power_only() {
    let link = LinkGeometry::parallel(8, 6, LAMBDA / 2.0, 0.2, LAMBDA).unwrap();
    let h = near_field_channel(&link).unwrap();
    let n = h.normalized_to(2.5).unwrap();
    assert_relative_eq!(n.power(), 2.5, max_relative = 1e-12);
    assert_relative_eq!(channel_correlation(&h, &n), 1.0, epsilon = 1e-12);
}

#[test]
fn reversed_link_gives_transposed_channel() {
    let tx = ArrayGeometry::new(5, 0.002, 0.4, [0.0; 3]).unwrap();
    let rx = ArrayGeometry::new(3, 0.0015, -0.2, [0.0; 3]).unwrap();
    let link = LinkGeometry::new(tx, rx, 0.3, LAMBDA).unwrap();
    let h = near_field_channel(&link).unwrap();
    let g = near_field_channel(&link.reversed()).unwrap();
    assert!((h.entries().transpose() - g.entries()).norm() < 1e-9);
}

#[test]
fn coincident_elements_are_rejected() {
    // tx element 2 sits at (0, 1/sqrt2) and so does rx element 2 of the tilted array
    let s = 1.0 / 2f64.sqrt();
    let tx = ArrayGeometry::ula(3, s).unwrap();
    let rx = ArrayGeometry::new(3, 1.0, PI / 4.0, [0.0; 3]).unwrap();
    let link = LinkGeometry::new(tx, rx, s, 1.0).unwrap();
    assert!(matches!(near_field_channel(&link), Err(Error::DegenerateGeometry { rx: 2, tx: 2 })));
}

#[test]
fn steering_vector_examples() {
    let a = array_response(1, 0.5, 1.0, 0.7);
    assert!((a[0] - Complex64::new(1.0, 0.0)).norm() < 1e-15);
    let a = array_response(4, 0.5, 1.0, 0.0);
    assert!(a.iter().all(|z| (z - Complex64::new(0.5, 0.0)).norm() < 1e-15));
}

#[test]
fn far_field_channel_has_rank_one() {
    let link = LinkGeometry::parallel(16, 12, 0.5, 100.0, 1.0).unwrap();
    let h = far_field_channel(&link, 0.3, -0.1).unwrap();
    let s = singular_values(h.entries());
    assert!(s[1] < 1e-10 * s[0]);
    assert_relative_eq!(h.power(), 192.0, max_relative = 1e-12);
}

#[test]
fn rayleigh_distances() {
    assert_relative_eq!(rayleigh_distance(1.0, 2.0), 1.0);
    let big = ArrayGeometry::ula(1000, 0.5e-3).unwrap();
    assert_relative_eq!(rayleigh_distance(big.aperture(), 1e-3), 499.0, max_relative = 1e-3);
    let ours = ArrayGeometry::ula(256, LAMBDA / 2.0).unwrap();
    assert_relative_eq!(rayleigh_distance(ours.aperture(), LAMBDA), 97.5, max_relative = 2e-3);
}

#[test]
fn near_field_approaches_far_field_with_distance() {
    let n = 16;
    let d = LAMBDA / 2.0;
    let aperture = (n - 1) as f64 * d;
    let rd = rayleigh_distance(aperture, LAMBDA);
    let mut last = 0.0;
    for factor in [0.05, 1.0, 100.0] {
        let link = LinkGeometry::parallel(n, n, d, factor * rd, LAMBDA).unwrap();
        let near = near_field_channel(&link).unwrap();
        let far = far_field_channel(&link, 0.0, 0.0).unwrap();
        let c = channel_correlation(&near, &far);
        assert!(c >= last - 1e-12, "correlation fell at {factor} x Rayleigh");
        last = c;
    }
    assert!(last >= 0.99, "correlation {last}");
}
