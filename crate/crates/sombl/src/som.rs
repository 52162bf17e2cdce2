//! Self-organising map training and the assignment of stored instances to
//! map units.
//!
//! Units live on a rectangular grid and carry weight vectors in the
//! encoding space. Training presents every input once per epoch in a
//! seeded shuffled order, moves the winning unit and its grid
//! neighbourhood towards the input, and shrinks the neighbourhood radius
//! on a fixed step schedule. After training, each stored instance is
//! attached to its winning unit and unitless areas of the map are dropped.

use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::corpus::ChunkClass;
use crate::encoding::{encode_window, Encoder};
use crate::error::Error;
use crate::math;
use crate::mbl::MemoryBase;

/// One map unit: its grid position, weight vector, optional class label
/// (used by the label-constrained variant) and the indices of the stored
/// instances assigned to it.
#[derive(Debug, Clone, PartialEq)]
pub struct SomUnit {
    pub row: usize,
    pub col: usize,
    pub weights: Vec<f64>,
    pub label: Option<ChunkClass>,
    pub items: Vec<usize>,
}

/// A map: grid shape plus its units. After pruning, `units` holds only the
/// occupied subset, each still carrying its original grid position.
#[derive(Debug, Clone, PartialEq)]
pub struct SomMap {
    rows: usize,
    cols: usize,
    units: Vec<SomUnit>,
}

/// Training schedule: epoch count, initial neighbourhood radius, how many
/// epochs pass between radius decrements, and the learning rate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Schedule {
    pub epochs: usize,
    pub initial_radius: usize,
    pub radius_step: usize,
    pub learning_rate: f64,
}

impl Schedule {
    /// The neighbourhood radius in force at `epoch`: the initial radius
    /// drops by one every `radius_step` epochs, floored at zero.
    pub fn radius_at(&self, epoch: usize) -> usize {
        self.initial_radius.saturating_sub(epoch / self.radius_step.max(1))
    }
}

/// The stock schedule for a map of `units` units: long training with a
/// wide neighbourhood for large maps, shorter and narrower for small ones.
pub fn default_schedule(units: usize) -> Schedule {
    if units >= 100 {
        Schedule { epochs: 250, initial_radius: 4, radius_step: 50, learning_rate: 0.1 }
    } else if units >= 11 {
        Schedule { epochs: 150, initial_radius: 2, radius_step: 50, learning_rate: 0.1 }
    } else {
        Schedule { epochs: 90, initial_radius: 2, radius_step: 30, learning_rate: 0.1 }
    }
}

fn isqrt(n: usize) -> usize {
    if n == 0 {
        return 0;
    }
    let mut r = math::sqrt(n as f64) as usize;
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    while r * r > n {
        r -= 1;
    }
    r
}

/// The grid for `n` units: the most nearly square factorisation, rows being
/// the largest divisor of `n` not exceeding its square root. Primes give a
/// single row.
pub fn grid_shape(n: usize) -> (usize, usize) {
    if n == 0 {
        return (0, 0);
    }
    let mut rows = isqrt(n);
    while !n.is_multiple_of(rows) {
        rows -= 1;
    }
    (rows, n / rows)
}

/// Per-dimension `(min, max)` over a set of vectors.
pub fn data_bounds(vectors: &[Vec<f64>]) -> Vec<(f64, f64)> {
    let Some(first) = vectors.first() else {
        return Vec::new();
    };
    let mut bounds: Vec<(f64, f64)> = first.iter().map(|&v| (v, v)).collect();
    for v in &vectors[1..] {
        debug_assert_eq!(v.len(), bounds.len());
        for (b, &x) in bounds.iter_mut().zip(v) {
            b.0 = b.0.min(x);
            b.1 = b.1.max(x);
        }
    }
    bounds
}

impl SomMap {
    /// A fresh map of about `target_units` units (exactly that many when
    /// the grid factorisation allows), with unit weights drawn uniformly
    /// within the given per-dimension bounds.
    pub fn new(target_units: usize, bounds: &[(f64, f64)], seed: u64) -> SomMap {
        let (rows, cols) = grid_shape(target_units);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut units = Vec::with_capacity(rows * cols);
        for row in 0..rows {
            for col in 0..cols {
                let weights = bounds
                    .iter()
                    .map(|&(lo, hi)| if hi > lo { rng.gen_range(lo..hi) } else { lo })
                    .collect();
                units.push(SomUnit { row, col, weights, label: None, items: Vec::new() });
            }
        }
        SomMap { rows, cols, units }
    }

    /// Assembles a map from explicit units (deserialization, tests).
    pub fn from_units(rows: usize, cols: usize, units: Vec<SomUnit>) -> SomMap {
        SomMap { rows, cols, units }
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    /// Number of units currently on the map.
    pub fn len(&self) -> usize {
        self.units.len()
    }

    pub fn is_empty(&self) -> bool {
        self.units.is_empty()
    }

    pub fn units(&self) -> &[SomUnit] {
        &self.units
    }

    pub fn units_mut(&mut self) -> &mut [SomUnit] {
        &mut self.units
    }

    /// Drops every unit with an empty item list. Survivors keep their
    /// grid positions.
    pub fn prune_empty(&mut self) {
        self.units.retain(|u| !u.items.is_empty());
    }

    /// Largest number of items attached to any single unit.
    pub fn max_items(&self) -> usize {
        self.units.iter().map(|u| u.items.len()).max().unwrap_or(0)
    }

    /// Units per label, in canonical class order, plus the unlabelled count.
    pub fn label_census(&self) -> ([usize; 3], usize) {
        let mut counts = [0usize; 3];
        let mut unlabelled = 0usize;
        for unit in &self.units {
            match unit.label {
                Some(class) => counts[class.index()] += 1,
                None => unlabelled += 1,
            }
        }
        (counts, unlabelled)
    }
}

/// The unit nearest to `x` by Euclidean distance, as an index into
/// `map.units()`. Ties keep the earliest unit in storage order. The map
/// must be non-empty.
pub fn winner(map: &SomMap, x: &[f64]) -> usize {
    debug_assert!(!map.is_empty());
    let mut best = 0usize;
    let mut best_d = f64::INFINITY;
    for (idx, unit) in map.units.iter().enumerate() {
        let d = math::dist_sq(&unit.weights, x);
        if d < best_d {
            best = idx;
            best_d = d;
        }
    }
    best
}

pub(crate) fn update_filtered<F>(
    map: &mut SomMap,
    winner_idx: usize,
    x: &[f64],
    learning_rate: f64,
    radius: usize,
    keep: F,
) where
    F: Fn(&SomUnit) -> bool,
{
    let (wr, wc) = {
        let w = &map.units[winner_idx];
        (w.row, w.col)
    };
    for unit in &mut map.units {
        let dr = unit.row.abs_diff(wr);
        let dc = unit.col.abs_diff(wc);
        if dr.max(dc) > radius || !keep(unit) {
            continue;
        }
        debug_assert_eq!(unit.weights.len(), x.len());
        for (w, &xi) in unit.weights.iter_mut().zip(x) {
            *w += learning_rate * (xi - *w);
        }
    }
}

/// Moves the winning unit and every unit within Chebyshev grid distance
/// `radius` of it towards `x` by `learning_rate` times the difference.
pub fn update(map: &mut SomMap, winner_idx: usize, x: &[f64], learning_rate: f64, radius: usize) {
    update_filtered(map, winner_idx, x, learning_rate, radius, |_| true);
}

/// Trains the map: each epoch presents every vector once in an order
/// reshuffled from a generator seeded with `seed`, using the radius the
/// schedule assigns to that epoch.
pub fn train(map: &mut SomMap, vectors: &[Vec<f64>], schedule: &Schedule, seed: u64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order: Vec<usize> = (0..vectors.len()).collect();
    for epoch in 0..schedule.epochs {
        let radius = schedule.radius_at(epoch);
        order.shuffle(&mut rng);
        for &vi in &order {
            let w = winner(map, &vectors[vi]);
            update(map, w, &vectors[vi], schedule.learning_rate, radius);
        }
    }
}

/// Attaches every stored instance to its winning unit (instances in base
/// order, so item lists are sorted) and drops units that received nothing.
/// Surviving units keep their grid positions.
pub fn assign_and_prune(mut map: SomMap, base: &MemoryBase, enc: &Encoder) -> Result<SomMap, Error> {
    for unit in &mut map.units {
        unit.items.clear();
    }
    for (idx, inst) in base.instances().iter().enumerate() {
        let v = encode_window(&inst.tags, enc)?;
        let w = winner(&map, &v);
        map.units[w].items.push(idx);
    }
    map.prune_empty();
    Ok(map)
}

/// Encodes every stored instance, in base order.
pub fn encode_base(base: &MemoryBase, enc: &Encoder) -> Result<Vec<Vec<f64>>, Error> {
    base.instances()
        .iter()
        .map(|inst| encode_window(&inst.tags, enc))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{ClassFreqs, Instance, Tag, WindowSpec};
    use crate::encoding::build_orthogonal;
    use alloc::vec;

    fn flat_map(weights: Vec<Vec<f64>>, cols: usize) -> SomMap {
        let rows = weights.len().div_ceil(cols);
        let units = weights
            .into_iter()
            .enumerate()
            .map(|(i, w)| SomUnit {
                row: i / cols,
                col: i % cols,
                weights: w,
                label: None,
                items: Vec::new(),
            })
            .collect();
        SomMap::from_units(rows, cols, units)
    }

    #[test]
    fn grid_shapes_are_nearly_square_divisors() {
        assert_eq!(grid_shape(100), (10, 10));
        assert_eq!(grid_shape(30), (5, 6));
        assert_eq!(grid_shape(10), (2, 5));
        assert_eq!(grid_shape(200), (10, 20));
        assert_eq!(grid_shape(44), (4, 11));
        assert_eq!(grid_shape(1), (1, 1));
        assert_eq!(grid_shape(7), (1, 7));
        assert_eq!(grid_shape(36), (6, 6));
        assert_eq!(grid_shape(0), (0, 0));
        for n in 1..300 {
            let (r, c) = grid_shape(n);
            assert_eq!(r * c, n);
            assert!(r <= c);
            assert!(r * r <= n);
        }
    }

    #[test]
    fn schedule_thresholds() {
        assert_eq!(
            default_schedule(100),
            Schedule { epochs: 250, initial_radius: 4, radius_step: 50, learning_rate: 0.1 }
        );
        assert_eq!(default_schedule(250).epochs, 250);
        assert_eq!(
            default_schedule(99),
            Schedule { epochs: 150, initial_radius: 2, radius_step: 50, learning_rate: 0.1 }
        );
        assert_eq!(default_schedule(11).epochs, 150);
        assert_eq!(
            default_schedule(10),
            Schedule { epochs: 90, initial_radius: 2, radius_step: 30, learning_rate: 0.1 }
        );
        assert_eq!(default_schedule(1).epochs, 90);
    }

    #[test]
    fn radius_decreases_stepwise_to_zero() {
        let s = default_schedule(150);
        assert_eq!(s.radius_at(0), 4);
        assert_eq!(s.radius_at(49), 4);
        assert_eq!(s.radius_at(50), 3);
        assert_eq!(s.radius_at(199), 1);
        assert_eq!(s.radius_at(200), 0);
        assert_eq!(s.radius_at(249), 0);
        for sched in [default_schedule(150), default_schedule(50), default_schedule(5)] {
            let mut prev = sched.radius_at(0);
            assert_eq!(prev, sched.initial_radius);
            for e in 1..sched.epochs {
                let r = sched.radius_at(e);
                assert!(r <= prev);
                prev = r;
            }
            assert_eq!(sched.radius_at(sched.epochs - 1), 0);
        }
    }

    #[test]
    fn new_map_is_seeded_and_within_bounds() {
        let bounds = vec![(0.0, 1.0), (-2.0, 2.0), (5.0, 5.0)];
        let a = SomMap::new(30, &bounds, 7);
        let b = SomMap::new(30, &bounds, 7);
        let c = SomMap::new(30, &bounds, 8);
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert_eq!(a.shape(), (5, 6));
        assert_eq!(a.len(), 30);
        for unit in a.units() {
            assert!(unit.weights[0] >= 0.0 && unit.weights[0] < 1.0);
            assert!(unit.weights[1] >= -2.0 && unit.weights[1] < 2.0);
            assert_eq!(unit.weights[2], 5.0);
            assert_eq!(unit.label, None);
            assert!(unit.items.is_empty());
        }
    }

    #[test]
    fn winner_is_strictly_nearest_first_on_ties() {
        let map = flat_map(
            vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0], vec![1.0, 1.0]],
            2,
        );
        assert_eq!(winner(&map, &[0.9, 0.9]), 3);
        assert_eq!(winner(&map, &[0.1, -0.2]), 0);
        // Equidistant from all four corners: the first wins.
        assert_eq!(winner(&map, &[0.5, 0.5]), 0);
        let map = flat_map(vec![vec![1.0], vec![1.0], vec![0.0]], 3);
        assert_eq!(winner(&map, &[1.0]), 0);
    }

    #[test]
    fn update_scales_distance_by_one_minus_lr() {
        let mut map = flat_map(vec![vec![0.25, -1.5], vec![8.0, 8.0]], 2);
        let x = [1.0, 2.5];
        let before: Vec<f64> = map.units()[0].weights.clone();
        update(&mut map, 0, &x, 0.1, 0);
        for ((w_new, w_old), xi) in map.units()[0].weights.iter().zip(&before).zip(&x) {
            let expected = xi - 0.9 * (xi - w_old);
            assert!((w_new - expected).abs() < 1e-9);
        }
        // Radius 0: the other unit is untouched.
        assert_eq!(map.units()[1].weights, vec![8.0, 8.0]);
    }

    #[test]
    fn update_moves_chebyshev_neighbourhood_only() {
        // 3x3 grid, all weights zero; winner at centre, radius 1 moves all
        // nine... use 5x5 to get untouched outer ring.
        let weights = vec![vec![0.0]; 25];
        let mut map = flat_map(weights, 5);
        let centre = 12; // row 2, col 2
        update(&mut map, centre, &[1.0], 0.5, 1);
        for unit in map.units() {
            let dr = unit.row.abs_diff(2);
            let dc = unit.col.abs_diff(2);
            if dr.max(dc) <= 1 {
                assert_eq!(unit.weights[0], 0.5);
            } else {
                assert_eq!(unit.weights[0], 0.0);
            }
        }
    }

    #[test]
    fn train_is_deterministic_per_seed() {
        let vectors: Vec<Vec<f64>> = (0..20)
            .map(|i| vec![(i % 4) as f64, (i % 5) as f64])
            .collect();
        let bounds = data_bounds(&vectors);
        let schedule = default_schedule(10);
        let mut a = SomMap::new(10, &bounds, 3);
        let mut b = SomMap::new(10, &bounds, 3);
        train(&mut a, &vectors, &schedule, 11);
        train(&mut b, &vectors, &schedule, 11);
        assert_eq!(a, b);
        let mut c = SomMap::new(10, &bounds, 3);
        train(&mut c, &vectors, &schedule, 12);
        assert_ne!(a, c);
    }

    #[test]
    fn training_pulls_units_towards_data() {
        let vectors = vec![vec![4.0, -3.0]; 8];
        let mut map = SomMap::new(6, &[(0.0, 1.0), (0.0, 1.0)], 5);
        train(&mut map, &vectors, &default_schedule(6), 9);
        let w = winner(&map, &vectors[0]);
        let d = math::dist_sq(&map.units()[w].weights, &vectors[0]);
        assert!(d < 1e-6, "winner still {d} away");
    }

    #[test]
    fn data_bounds_cover_all_vectors() {
        let vectors = vec![vec![1.0, -2.0], vec![0.5, 7.0], vec![3.0, 0.0]];
        assert_eq!(data_bounds(&vectors), vec![(0.5, 3.0), (-2.0, 7.0)]);
        assert!(data_bounds(&[]).is_empty());
    }

    #[test]
    fn assignment_partitions_base_and_prunes_empties() {
        let tags: alloc::collections::BTreeSet<Tag> =
            ["A", "B", "C"].iter().map(|t| Tag::sym(t)).collect();
        let enc = build_orthogonal(&tags).unwrap();
        let instances = vec![
            Instance { tags: vec![Tag::sym("A")], freqs: ClassFreqs::new(1, 0, 0) },
            Instance { tags: vec![Tag::sym("B")], freqs: ClassFreqs::new(0, 2, 0) },
            Instance { tags: vec![Tag::sym("C")], freqs: ClassFreqs::new(0, 0, 3) },
        ];
        let base = MemoryBase::new(WindowSpec::new(0, 0), instances).unwrap();
        // Units sitting exactly on A and B; C lands on whichever is closer.
        let map = flat_map(vec![vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0], vec![9.0, 9.0, 9.0]], 3);
        let map = assign_and_prune(map, &base, &enc).unwrap();
        assert_eq!(map.len(), 2);
        let mut seen: Vec<usize> = map.units().iter().flat_map(|u| u.items.clone()).collect();
        seen.sort_unstable();
        assert_eq!(seen, vec![0, 1, 2]);
        for unit in map.units() {
            assert!(!unit.items.is_empty());
            // Grid positions survive pruning.
            assert!(unit.col < 3);
        }
        assert_eq!(map.max_items(), 2);
    }
}
