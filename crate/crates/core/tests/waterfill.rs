use proptest::prelude::*;

use nearfield_dap::waterfill::{rate, water_fill};

fn bisection_level(gains: &[f64], total: f64, noise: f64) -> f64 {
    let used = |mu: f64| gains.iter().map(|g| (mu - noise / g).max(0.0)).sum::<f64>();
    let (mut lo, mut hi) = (0.0, total + gains.iter().map(|g| noise / g).fold(0.0, f64::max));
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if used(mid) < total {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

#[test]
fn two_channel_example_against_bisection() {
    let a = water_fill(&[1.0, 0.25], 1.0, 0.1).unwrap();
    let mu = bisection_level(&[1.0, 0.25], 1.0, 0.1);
    assert!((a.water_level - mu).abs() < 1e-12);
    assert!((a.per_stream_power[0] - 0.65).abs() < 1e-12);
    assert!((a.per_stream_power[1] - 0.35).abs() < 1e-12);
}

proptest! {
    #[test]
    fn level_matches_bisection(
        gains in prop::collection::vec(1e-3f64..1e2, 1..7),
        total in 1e-2f64..1e2,
        noise in 1e-3f64..1.0,
    ) {
        let a = water_fill(&gains, total, noise).unwrap();
        let mu = bisection_level(&gains, total, noise);
        prop_assert!((a.water_level - mu).abs() <= 1e-9 * mu);
    }

    #[test]
    fn beats_any_feasible_allocation(
        gains in prop::collection::vec(1e-3f64..1e2, 1..7),
        weights in prop::collection::vec(0.0f64..1.0, 7),
        total in 1e-2f64..1e2,
        noise in 1e-3f64..1.0,
    ) {
        let best = water_fill(&gains, total, noise).unwrap().rate(&gains);
        let w = &weights[..gains.len()];
        let sum: f64 = w.iter().sum();
        prop_assume!(sum > 0.0);
        let powers: Vec<f64> = w.iter().map(|x| x / sum * total).collect();
        prop_assert!(rate(&gains, &powers, noise) <= best + 1e-9 * best.max(1.0));
    }

    #[test]
    fn scaling_gains_and_noise_together_changes_nothing(
        gains in prop::collection::vec(1e-3f64..1e2, 1..7),
        scale in 1e-2f64..1e2,
    ) {
        let a = water_fill(&gains, 1.0, 0.1).unwrap();
        let scaled: Vec<f64> = gains.iter().map(|g| g * scale).collect();
        let b = water_fill(&scaled, 1.0, 0.1 * scale).unwrap();
        for (p, q) in a.per_stream_power.iter().zip(&b.per_stream_power) {
            prop_assert!((p - q).abs() <= 1e-9);
        }
    }
}
