//! Greedy near-field subarray partitioning.
//!
//! Antennas are grown into `Ns` balanced sets so that the sum over sets of the
//! averaged Minkowski l1 norm `(1/|S|) sum_{i,j in S} |R_ij|`, `R = H^H H`, is
//! large. That quantity stands in for the dominant eigenvalue of each
//! subarray's Gram matrix, which is the beamforming gain the subarray can
//! collect with a constant-modulus phase profile.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::geometry::ChannelMatrix;

/// Index sets `S_1..S_Ns` over antennas `0..Nt`, each sorted ascending.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubarrayPartition {
    sets: Vec<Vec<usize>>,
    bound: usize,
}

impl SubarrayPartition {
    /// Validates disjointness, coverage of `0..num_antennas`, non-emptiness
    /// and the size bound.
    pub fn new(mut sets: Vec<Vec<usize>>, bound: usize, num_antennas: usize) -> Result<Self> {
        if sets.is_empty() || bound == 0 {
            return Err(Error::InvalidParameter("partition needs at least one set and a positive bound".into()));
        }
        let mut seen = vec![false; num_antennas];
        for set in &mut sets {
            if set.is_empty() {
                return Err(Error::EmptySet);
            }
            if set.len() > bound {
                return Err(Error::InvalidParameter(format!("set of size {} exceeds bound {bound}", set.len())));
            }
            set.sort_unstable();
            for &a in set.iter() {
                if a >= num_antennas || seen[a] {
                    return Err(Error::InvalidParameter(format!("antenna {a} is out of range or repeated")));
                }
                seen[a] = true;
            }
        }
        if seen.iter().any(|s| !s) {
            return Err(Error::InvalidParameter("partition does not cover every antenna".into()));
        }
        Ok(Self { sets, bound })
    }

    pub fn sets(&self) -> &[Vec<usize>] {
        &self.sets
    }

    pub fn bound(&self) -> usize {
        self.bound
    }

    pub fn num_sets(&self) -> usize {
        self.sets.len()
    }

    pub fn num_antennas(&self) -> usize {
        self.sets.iter().map(Vec::len).sum()
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.sets.iter().map(Vec::len).collect()
    }

    /// RF chain serving each antenna.
    pub fn owners(&self) -> Vec<usize> {
        let mut owner = vec![0; self.num_antennas()];
        for (s, set) in self.sets.iter().enumerate() {
            for &a in set {
                owner[a] = s;
            }
        }
        owner
    }

    /// Antennas listed set by set. Position `k` of the result is the antenna
    /// placed at slot `k` when the sets are laid out contiguously.
    pub fn permutation(&self) -> Vec<usize> {
        self.sets.iter().flatten().copied().collect()
    }
}

/// Permutation matrix `P` with `P[perm[k], k] = 1`, so `P^T x` lists `x` in
/// the order `perm`.
pub fn permutation_matrix(perm: &[usize]) -> DMatrix<f64> {
    let mut p = DMatrix::zeros(perm.len(), perm.len());
    for (k, &a) in perm.iter().enumerate() {
        p[(a, k)] = 1.0;
    }
    p
}

impl SubarrayPartition {

    /// Contiguous blocks of `Nt / Ns` antennas, the last block absorbing the
    /// remainder.
    pub fn contiguous(num_antennas: usize, num_sets: usize) -> Result<Self> {
        if num_sets == 0 || num_sets > num_antennas {
            return Err(Error::InvalidParameter(format!(
                "cannot split {num_antennas} antennas into {num_sets} blocks"
            )));
        }
        let block = num_antennas / num_sets;
        let sets: Vec<Vec<usize>> = (0..num_sets)
            .map(|s| {
                let end = if s + 1 == num_sets { num_antennas } else { (s + 1) * block };
                (s * block..end).collect()
            })
            .collect();
        let bound = sets.iter().map(Vec::len).max().unwrap_or(1);
        Self::new(sets, bound, num_antennas)
    }
}

/// Entrywise magnitudes `|R_ij|` of `R = H^H H`.
pub fn correlation_magnitudes(h: &ChannelMatrix) -> DMatrix<f64> {
    let r = h.entries().adjoint() * h.entries();
    r.map(|z| z.norm())
}

/// `(1/|S|) sum_{i in S} sum_{j in S} |R_ij|`.
pub fn minkowski_surrogate(r: &DMatrix<f64>, set: &[usize]) -> Result<f64> {
    if set.is_empty() {
        return Err(Error::EmptySet);
    }
    let total: f64 = set
        .iter()
        .map(|&i| set.iter().map(|&j| r[(i, j)].abs()).sum::<f64>())
        .sum();
    Ok(total / set.len() as f64)
}

/// Sum of the surrogate over every set of `partition`.
pub fn partition_objective(r: &DMatrix<f64>, partition: &SubarrayPartition) -> f64 {
    partition
        .sets()
        .iter()
        .map(|s| minkowski_surrogate(r, s).expect("partition sets are nonempty"))
        .sum()
}

/// Incremental bookkeeping for the greedy search: per-set inner sums
/// `sum_{i,j in S}|R_ij|` and per-antenna links `sum_{n in S}|R_an|`.
struct GreedyState<'a> {
    r: &'a DMatrix<f64>,
    sets: Vec<Vec<usize>>,
    inner: Vec<f64>,
    links: Vec<Vec<f64>>,
}

impl<'a> GreedyState<'a> {
    fn new(r: &'a DMatrix<f64>, num_sets: usize) -> Self {
        let n = r.nrows();
        Self {
            r,
            sets: vec![Vec::new(); num_sets],
            inner: vec![0.0; num_sets],
            links: vec![vec![0.0; n]; num_sets],
        }
    }

    fn add(&mut self, a: usize, s: usize) {
        self.inner[s] += 2.0 * self.links[s][a] + self.r[(a, a)];
        for (n, l) in self.links[s].iter_mut().enumerate() {
            *l += self.r[(a, n)];
        }
        self.sets[s].push(a);
    }

    fn remove(&mut self, a: usize, s: usize) {
        for (n, l) in self.links[s].iter_mut().enumerate() {
            *l -= self.r[(a, n)];
        }
        self.inner[s] -= 2.0 * self.links[s][a] + self.r[(a, a)];
        self.sets[s].retain(|&x| x != a);
    }

    /// Disjoint, nonempty, within `bound` (after any eviction has run).
    fn is_consistent(&self, bound: usize) -> bool {
        let mut seen = vec![false; self.r.nrows()];
        self.sets.iter().all(|set| {
            !set.is_empty()
                && set.len() <= bound
                && set.iter().all(|&a| !std::mem::replace(&mut seen[a], true))
        })
    }

    fn surrogate(&self, s: usize) -> f64 {
        match self.sets[s].len() {
            0 => 0.0,
            len => self.inner[s] / len as f64,
        }
    }

    /// Surrogate improvement from adding `a` to set `s`. When `a` already
    /// belongs to `s` this is the loss from taking it out.
    fn gain(&self, a: usize, s: usize) -> f64 {
        let len = self.sets[s].len();
        if self.sets[s].contains(&a) {
            let without = self.inner[s] - 2.0 * self.links[s][a] + self.r[(a, a)];
            let rest = if len > 1 { without / (len - 1) as f64 } else { 0.0 };
            self.surrogate(s) - rest
        } else {
            (self.inner[s] + 2.0 * self.links[s][a] + self.r[(a, a)]) / (len + 1) as f64 - self.surrogate(s)
        }
    }

    /// Member of set `s` with the weakest link to the rest of the set.
    fn least_contributor(&self, s: usize) -> usize {
        let mut best = self.sets[s][0];
        for &m in &self.sets[s] {
            let (lm, lb) = (self.links[s][m], self.links[s][best]);
            if lm < lb || (lm == lb && m < best) {
                best = m;
            }
        }
        best
    }

    /// Set with the largest gain for `a` among `candidates`, ties to the
    /// lowest set index.
    fn best_target(&self, a: usize, candidates: impl Iterator<Item = usize>) -> Option<usize> {
        let mut best: Option<(usize, f64)> = None;
        for s in candidates {
            let g = self.gain(a, s);
            if best.is_none_or(|(_, bg)| g > bg) {
                best = Some((s, g));
            }
        }
        best.map(|(s, _)| s)
    }
}

/// Splits the `Nt` transmit antennas of `h` into `streams` subarrays of at
/// most `bound` antennas each.
pub fn partition_subarrays(h: &ChannelMatrix, streams: usize, bound: usize) -> Result<SubarrayPartition> {
    let r = correlation_magnitudes(h);
    partition_with_correlation(&r, streams, bound)
}

/// Same as [`partition_subarrays`] for a precomputed `|H^H H|`.
pub fn partition_with_correlation(r: &DMatrix<f64>, streams: usize, bound: usize) -> Result<SubarrayPartition> {
    let nt = r.nrows();
    if streams == 0 || streams > nt {
        return Err(Error::InvalidParameter(format!("need 1 <= streams <= {nt}, got {streams}")));
    }
    if bound.saturating_mul(streams) < nt {
        return Err(Error::InfeasiblePartition { antennas: nt, streams, bound });
    }

    let mut state = GreedyState::new(r, streams);
    let mut selected = vec![false; nt];
    // strongest link from any selected antenna, per antenna
    let mut reach = vec![f64::NEG_INFINITY; nt];
    let select = |a: usize, selected: &mut Vec<bool>, reach: &mut Vec<f64>| {
        selected[a] = true;
        for (j, best) in reach.iter_mut().enumerate() {
            *best = best.max(r[(a, j)]);
        }
    };

    let group = nt / streams;
    for s in 0..streams {
        let seed = (s + 1) * group - 1;
        state.add(seed, s);
        select(seed, &mut selected, &mut reach);
    }

    for _ in 0..nt - streams {
        let mut next: Option<usize> = None;
        for j in (0..nt).filter(|&j| !selected[j]) {
            if next.is_none_or(|b| reach[j] > reach[b]) {
                next = Some(j);
            }
        }
        let j = next.expect("unselected antennas remain inside the loop");
        let target = state.best_target(j, 0..streams).expect("at least one set");
        state.add(j, target);
        select(j, &mut selected, &mut reach);

        if state.sets[target].len() >= bound {
            let evict = state.least_contributor(target);
            let room = (0..streams).filter(|&s| s != target && state.sets[s].len() < bound);
            if let Some(dest) = state.best_target(evict, room.collect::<Vec<_>>().into_iter()) {
                state.remove(evict, target);
                state.add(evict, dest);
            }
        }
        debug_assert!(state.is_consistent(bound));
    }

    // Re-home the weakest member of each set once the seeds have had their
    // influence.
    for l in 0..streams {
        if state.sets[l].len() < 2 {
            continue;
        }
        let m = state.least_contributor(l);
        let room: Vec<usize> = (0..streams)
            .filter(|&s| s == l || state.sets[s].len() < bound)
            .collect();
        if let Some(dest) = state.best_target(m, room.into_iter()) {
            if dest != l {
                state.remove(m, l);
                state.add(m, dest);
            }
        }
        debug_assert!(state.is_consistent(bound));
    }

    SubarrayPartition::new(state.sets, bound, nt)
}
