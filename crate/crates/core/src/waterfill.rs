//! Water-filling power allocation over parallel Gaussian subchannels.

use crate::error::{Error, Result};

/// Result of water-filling: `p_i = (level - noise / g_i)^+` with
/// `sum p_i = total_power`.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerAllocation {
    /// Power per subchannel, in the order the gains were supplied.
    pub per_stream_power: Vec<f64>,
    /// Water level `1 / mu`.
    pub water_level: f64,
    pub total_power: f64,
    pub noise_power: f64,
}

impl PowerAllocation {
    /// Number of subchannels that received power.
    pub fn active_streams(&self) -> usize {
        self.per_stream_power.iter().filter(|&&p| p > 0.0).count()
    }

    /// `sum log2(1 + p_i g_i / noise)` for the gains this allocation was
    /// computed from.
    pub fn rate(&self, gains: &[f64]) -> f64 {
        rate(gains, &self.per_stream_power, self.noise_power)
    }
}

/// Sum rate in bits/s/Hz of an arbitrary allocation.
pub fn rate(gains: &[f64], powers: &[f64], noise_power: f64) -> f64 {
    gains
        .iter()
        .zip(powers)
        .map(|(g, p)| (1.0 + p * g / noise_power).log2())
        .sum()
}

/// Capacity-optimal allocation of `total_power` across subchannels with
/// power gains `gains` (squared singular values).
///
/// The level is bracketed and bisected, then recomputed in closed form on the
/// resulting active set so the budget is met to rounding.
pub fn water_fill(gains: &[f64], total_power: f64, noise_power: f64) -> Result<PowerAllocation> {
    if !(total_power > 0.0 && total_power.is_finite()) {
        return Err(Error::InvalidParameter(format!("total power must be positive, got {total_power}")));
    }
    if !(noise_power > 0.0 && noise_power.is_finite()) {
        return Err(Error::InvalidParameter(format!("noise power must be positive, got {noise_power}")));
    }
    if gains.iter().any(|g| !(g.is_finite() && *g >= 0.0)) {
        return Err(Error::InvalidParameter("gains must be finite and nonnegative".into()));
    }

    // floors in descending-gain order, ties by index
    let mut order: Vec<usize> = (0..gains.len()).filter(|&i| gains[i] > 0.0).collect();
    if order.is_empty() {
        return Err(Error::NoUsableSubchannel);
    }
    order.sort_by(|&a, &b| gains[b].total_cmp(&gains[a]).then(a.cmp(&b)));
    let floors: Vec<f64> = order.iter().map(|&i| noise_power / gains[i]).collect();

    let poured = |level: f64| -> f64 { floors.iter().map(|f| (level - f).max(0.0)).sum() };
    let (mut lo, mut hi) = (floors[0], floors[0] + total_power);
    let tol = 1e-12 * total_power;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let residual = poured(mid) - total_power;
        if residual.abs() <= tol || hi - lo <= f64::EPSILON * hi {
            lo = mid;
            hi = mid;
            break;
        }
        if residual > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let mut level = 0.5 * (lo + hi);

    // Closed-form level on the active set; repeat until the set is stable.
    let mut active = floors.iter().take_while(|&&f| f < level).count().max(1);
    for _ in 0..=floors.len() {
        level = (total_power + floors[..active].iter().sum::<f64>()) / active as f64;
        let next = floors.iter().take_while(|&&f| f < level).count().max(1);
        if next == active {
            break;
        }
        active = next;
    }

    let mut per_stream_power = vec![0.0; gains.len()];
    for (rank, &i) in order.iter().enumerate().take(active) {
        per_stream_power[i] = (level - floors[rank]).max(0.0);
    }
    Ok(PowerAllocation {
        per_stream_power,
        water_level: level,
        total_power,
        noise_power,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn single_channel_takes_everything() {
        let a = water_fill(&[1.0], 1.0, 1.0).unwrap();
        assert_eq!(a.per_stream_power, vec![1.0]);
        assert_relative_eq!(a.rate(&[1.0]), 1.0);
    }

    #[test]
    fn two_channel_closed_form() {
        // floors 0.1 and 0.4 are both under the level (1 + 0.5) / 2 = 0.75
        let a = water_fill(&[1.0, 0.25], 1.0, 0.1).unwrap();
        assert_relative_eq!(a.water_level, 0.75, epsilon = 1e-12);
        assert_relative_eq!(a.per_stream_power[0], 0.65, epsilon = 1e-12);
        assert_relative_eq!(a.per_stream_power[1], 0.35, epsilon = 1e-12);
    }

    #[test]
    fn weak_channel_gets_nothing() {
        let a = water_fill(&[1.0, 1e-3], 1.0, 0.1).unwrap();
        assert_eq!(a.per_stream_power[1], 0.0);
        assert_relative_eq!(a.per_stream_power[0], 1.0, epsilon = 1e-12);
        assert_eq!(a.active_streams(), 1);
    }

    #[test]
    fn equal_gains_split_evenly() {
        let a = water_fill(&[0.3; 5], 2.0, 0.7).unwrap();
        for p in &a.per_stream_power {
            assert_relative_eq!(*p, 0.4, epsilon = 1e-12);
        }
    }

    #[test]
    fn allocation_follows_input_order() {
        let a = water_fill(&[0.25, 1.0], 1.0, 0.1).unwrap();
        assert_relative_eq!(a.per_stream_power[0], 0.35, epsilon = 1e-12);
        assert_relative_eq!(a.per_stream_power[1], 0.65, epsilon = 1e-12);
    }

    #[test]
    fn zero_gains_are_skipped_and_all_zero_is_an_error() {
        let a = water_fill(&[0.0, 2.0], 1.0, 1.0).unwrap();
        assert_eq!(a.per_stream_power, vec![0.0, 1.0]);
        assert!(matches!(water_fill(&[0.0, 0.0], 1.0, 1.0), Err(Error::NoUsableSubchannel)));
        assert!(matches!(water_fill(&[], 1.0, 1.0), Err(Error::NoUsableSubchannel)));
        assert!(water_fill(&[1.0], 0.0, 1.0).is_err());
        assert!(water_fill(&[-1.0], 1.0, 1.0).is_err());
    }

    proptest! {
        #[test]
        fn kkt_conditions_hold(
            gains in prop::collection::vec(1e-4f64..1e3, 1..12),
            total in 1e-3f64..1e3,
            noise in 1e-4f64..10.0,
        ) {
            let a = water_fill(&gains, total, noise).unwrap();
            let sum: f64 = a.per_stream_power.iter().sum();
            prop_assert!((sum - total).abs() <= 1e-9 * total);
            for (g, p) in gains.iter().zip(&a.per_stream_power) {
                prop_assert!(*p >= 0.0);
                let floor = noise / g;
                if *p > 0.0 {
                    prop_assert!((p + floor - a.water_level).abs() <= 1e-9 * a.water_level);
                } else {
                    prop_assert!(floor >= a.water_level * (1.0 - 1e-9));
                }
            }
        }

        #[test]
        fn rate_grows_with_power(
            gains in prop::collection::vec(1e-3f64..10.0, 1..8),
            total in 1e-2f64..10.0,
        ) {
            let lo = water_fill(&gains, total, 1.0).unwrap();
            let hi = water_fill(&gains, 2.0 * total, 1.0).unwrap();
            prop_assert!(hi.rate(&gains) >= lo.rate(&gains));
        }
    }
}
