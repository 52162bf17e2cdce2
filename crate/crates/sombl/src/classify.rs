//! Map-edited classification: queries consult the map first and then scan
//! only the instances held by a few winning units.
//!
//! With `C` classes, `N` retained units and `I` stored instances, a query
//! costs about `C` winner searches over the units plus the scan of the
//! winners' item lists, instead of the full `I`-instance scan. The cost
//! model makes that precise: the average case is `C * (N + I/N)`, which is
//! minimised at `N = sqrt(I)` where it reaches `2 * C * sqrt(I)`, and the
//! worst case is bounded by `C * (N + X)` for `X` the largest item list.

use alloc::vec::Vec;

use crate::corpus::{ChunkClass, Tag};
use crate::encoding::{encode_window_lenient, Encoder};
use crate::error::Error;
use crate::math;
use crate::mbl::{nearest_in, MemoryBase, Metric};
use crate::som::SomMap;

/// Default number of winning units scanned by [`sommbl_classify`].
pub const DEFAULT_WINNERS: usize = 3;

/// Average query cost `C * (N + I/N)`. Infinite for a unitless map.
pub fn cost_avg(categories: usize, units: usize, items: usize) -> f64 {
    if units == 0 {
        return f64::INFINITY;
    }
    categories as f64 * (units as f64 + items as f64 / units as f64)
}

/// The average cost at its optimum `N = sqrt(I)`: `2 * C * sqrt(I)`.
pub fn cost_min(categories: usize, items: usize) -> f64 {
    2.0 * categories as f64 * math::sqrt(items as f64)
}

/// Worst-case query cost `C * (N + X)` for `X` the largest item list.
pub fn cost_max(categories: usize, units: usize, max_items: usize) -> usize {
    categories * (units + max_items)
}

/// The sizes the cost formulas run on, read off a pruned map and its base.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CostModel {
    pub categories: usize,
    pub units: usize,
    pub items: usize,
    pub max_items_per_unit: usize,
}

impl CostModel {
    pub fn of(map: &SomMap, base: &MemoryBase) -> CostModel {
        CostModel {
            categories: base.present_classes().len(),
            units: map.len(),
            items: base.len(),
            max_items_per_unit: map.max_items(),
        }
    }

    pub fn avg(&self) -> f64 {
        cost_avg(self.categories, self.units, self.items)
    }

    pub fn min(&self) -> f64 {
        cost_min(self.categories, self.items)
    }

    pub fn max(&self) -> usize {
        cost_max(self.categories, self.units, self.max_items_per_unit)
    }

    /// Worst-case cost as a percentage of the full-scan cost `I`.
    pub fn max_percent_of_items(&self) -> f64 {
        if self.items == 0 {
            return 0.0;
        }
        100.0 * self.max() as f64 / self.items as f64
    }
}

/// What one edited query did: units compared, candidate items compared,
/// candidate set size, and the prediction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QueryTrace {
    pub units_scanned: usize,
    pub items_scanned: usize,
    pub candidates: usize,
    pub predicted: ChunkClass,
}

impl QueryTrace {
    /// Total comparisons charged to the query.
    pub fn total(&self) -> usize {
        self.units_scanned + self.items_scanned
    }
}

fn finish<'a>(
    base: &'a MemoryBase,
    enc: &Encoder,
    query: &[Tag],
    candidate_indices: Vec<usize>,
    units_scanned: usize,
) -> Result<(ChunkClass, QueryTrace), Error> {
    if candidate_indices.is_empty() {
        return Err(Error::EmptyCandidates);
    }
    debug_assert!(candidate_indices.iter().all(|&i| i < base.len()));
    let candidates: Vec<&'a crate::corpus::Instance> = candidate_indices
        .iter()
        .map(|&i| &base.instances()[i])
        .collect();
    let (nearest, _) = nearest_in(&candidates, query, &Metric::Euclidean(enc))?;
    let predicted = nearest.modal_class()?;
    Ok((
        predicted,
        QueryTrace {
            units_scanned,
            items_scanned: candidates.len(),
            candidates: candidates.len(),
            predicted,
        },
    ))
}

/// Label-constrained edited query: one winning unit per class present in
/// the base, then an exact scan of the union of their item lists. Errors
/// when a present class has no labelled unit.
pub fn lsommbl_classify(
    map: &SomMap,
    base: &MemoryBase,
    enc: &Encoder,
    query: &[Tag],
) -> Result<(ChunkClass, QueryTrace), Error> {
    let qv = encode_window_lenient(query, enc);
    let mut units_scanned = 0usize;
    let mut candidate_indices: Vec<usize> = Vec::new();
    for class in base.present_classes() {
        let mut best: Option<(usize, f64)> = None;
        for (idx, unit) in map.units().iter().enumerate() {
            if unit.label != Some(class) {
                continue;
            }
            units_scanned += 1;
            let d = math::dist_sq(&unit.weights, &qv);
            if best.is_none_or(|(_, bd)| d < bd) {
                best = Some((idx, d));
            }
        }
        let (idx, _) = best.ok_or(Error::MissingLabel(class))?;
        candidate_indices.extend_from_slice(&map.units()[idx].items);
    }
    finish(base, enc, query, candidate_indices, units_scanned)
}

/// Plain edited query: every unit is compared, the `winners` nearest are
/// kept (distance ties by unit order), and the union of their item lists
/// is scanned exactly. `winners` is clamped to the map size and raised to
/// at least one.
pub fn sommbl_classify(
    map: &SomMap,
    base: &MemoryBase,
    enc: &Encoder,
    query: &[Tag],
    winners: usize,
) -> Result<(ChunkClass, QueryTrace), Error> {
    if map.is_empty() {
        return Err(Error::EmptyCandidates);
    }
    let qv = encode_window_lenient(query, enc);
    let mut scored: Vec<(f64, usize)> = map
        .units()
        .iter()
        .enumerate()
        .map(|(idx, unit)| (math::dist_sq(&unit.weights, &qv), idx))
        .collect();
    scored.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    let keep = winners.max(1).min(scored.len());
    let mut candidate_indices: Vec<usize> = Vec::new();
    for &(_, idx) in &scored[..keep] {
        candidate_indices.extend_from_slice(&map.units()[idx].items);
    }
    finish(base, enc, query, candidate_indices, map.len())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{ClassFreqs, Instance, WindowSpec};
    use crate::encoding::build_orthogonal;
    use crate::som::SomUnit;
    use alloc::collections::BTreeSet;
    use alloc::vec;

    #[test]
    fn cost_formula_spot_values() {
        assert_eq!(cost_max(3, 100, 582), 2046);
        assert_eq!(cost_max(3, 200, 671), 2613);
        assert_eq!(cost_max(3, 100, 235), 1005);
        assert_eq!(cost_max(3, 30, 57), 261);
        assert!((cost_avg(3, 100, 10042) - 601.26).abs() < 1e-9);
        assert!((cost_min(3, 10042) - 6.0 * (10042.0f64).sqrt()).abs() < 1e-12);
        assert_eq!(cost_avg(3, 0, 10), f64::INFINITY);
    }

    #[test]
    fn avg_equals_min_at_the_square_root() {
        for k in [2usize, 7, 31, 100] {
            let i = k * k;
            assert_eq!(cost_avg(3, k, i), cost_min(3, i));
        }
    }

    fn setup() -> (SomMap, MemoryBase, Encoder) {
        let tags: BTreeSet<Tag> = ["A", "B", "C", "D"].iter().map(|t| Tag::sym(t)).collect();
        let enc = build_orthogonal(&tags).unwrap();
        // Orthogonal axes: A=e0, B=e1, C=e2, D=e3.
        let instances = vec![
            Instance { tags: vec![Tag::sym("A")], freqs: ClassFreqs::new(2, 0, 0) }, // 0: B
            Instance { tags: vec![Tag::sym("B")], freqs: ClassFreqs::new(0, 3, 0) }, // 1: I
            Instance { tags: vec![Tag::sym("C")], freqs: ClassFreqs::new(0, 1, 0) }, // 2: I
            Instance { tags: vec![Tag::sym("D")], freqs: ClassFreqs::new(0, 0, 4) }, // 3: O
        ];
        let base = MemoryBase::new(WindowSpec::new(0, 0), instances).unwrap();
        let unit = |row, col, weights: Vec<f64>, label, items: Vec<usize>| SomUnit {
            row,
            col,
            weights,
            label: Some(label),
            items,
        };
        let map = SomMap::from_units(
            2,
            2,
            vec![
                unit(0, 0, vec![1.0, 0.0, 0.0, 0.0], ChunkClass::B, vec![0]),
                unit(0, 1, vec![0.0, 1.0, 0.0, 0.0], ChunkClass::I, vec![1]),
                unit(1, 0, vec![0.0, 0.0, 1.0, 0.0], ChunkClass::I, vec![2]),
                unit(1, 1, vec![0.0, 0.0, 0.0, 1.0], ChunkClass::O, vec![3]),
            ],
        );
        (map, base, enc)
    }

    #[test]
    fn cost_model_reads_map_and_base() {
        let (map, base, _) = setup();
        let cm = CostModel::of(&map, &base);
        assert_eq!(
            cm,
            CostModel { categories: 3, units: 4, items: 4, max_items_per_unit: 1 }
        );
        assert_eq!(cm.max(), 15);
        assert!((cm.max_percent_of_items() - 100.0 * 15.0 / 4.0).abs() < 1e-12);
    }

    #[test]
    fn label_constrained_query_takes_one_winner_per_class() {
        let (map, base, enc) = setup();
        // Query B: candidates are item 0 (class-B winner), the nearer of
        // the two I units (unit holding item 1), and item 3 (O winner).
        let (class, trace) = lsommbl_classify(&map, &base, &enc, &[Tag::sym("B")]).unwrap();
        assert_eq!(class, ChunkClass::I);
        assert_eq!(trace.units_scanned, 4); // 1 B unit + 2 I units + 1 O unit
        assert_eq!(trace.candidates, 3);
        assert_eq!(trace.items_scanned, 3);
        assert_eq!(trace.total(), 7);
        assert_eq!(trace.predicted, ChunkClass::I);

        let (class, _) = lsommbl_classify(&map, &base, &enc, &[Tag::sym("D")]).unwrap();
        assert_eq!(class, ChunkClass::O);
        let (class, _) = lsommbl_classify(&map, &base, &enc, &[Tag::sym("A")]).unwrap();
        assert_eq!(class, ChunkClass::B);
    }

    #[test]
    fn label_constrained_query_needs_every_present_class() {
        let (map, base, enc) = setup();
        let mut broken = map.clone();
        for unit in broken.units_mut() {
            if unit.label == Some(ChunkClass::O) {
                unit.label = Some(ChunkClass::I);
            }
        }
        assert_eq!(
            lsommbl_classify(&broken, &base, &enc, &[Tag::sym("B")]),
            Err(Error::MissingLabel(ChunkClass::O))
        );
    }

    #[test]
    fn plain_query_scans_top_winners() {
        let (map, base, enc) = setup();
        // Query C: nearest units are the C unit (distance 0), then the
        // three others tie at sq distance 2 and unit order keeps the first
        // two of them.
        let (class, trace) = sommbl_classify(&map, &base, &enc, &[Tag::sym("C")], 3).unwrap();
        assert_eq!(class, ChunkClass::I);
        assert_eq!(trace.units_scanned, 4);
        assert_eq!(trace.candidates, 3); // items 2, 0, 1
        let (_, trace_all) = sommbl_classify(&map, &base, &enc, &[Tag::sym("C")], 99).unwrap();
        assert_eq!(trace_all.candidates, 4);
        let (_, trace_one) = sommbl_classify(&map, &base, &enc, &[Tag::sym("C")], 0).unwrap();
        assert_eq!(trace_one.candidates, 1);
        assert_eq!(trace_one.predicted, ChunkClass::I);
    }

    #[test]
    fn empty_maps_and_empty_candidates_error() {
        let (map, base, enc) = setup();
        let empty = SomMap::from_units(0, 0, vec![]);
        assert_eq!(
            sommbl_classify(&empty, &base, &enc, &[Tag::sym("A")], 3),
            Err(Error::EmptyCandidates)
        );
        // A map whose winning units hold no items cannot answer.
        let mut hollow = map;
        for unit in hollow.units_mut() {
            unit.items.clear();
        }
        assert_eq!(
            sommbl_classify(&hollow, &base, &enc, &[Tag::sym("A")], 2),
            Err(Error::EmptyCandidates)
        );
        assert_eq!(
            lsommbl_classify(&hollow, &base, &enc, &[Tag::sym("A")]),
            Err(Error::EmptyCandidates)
        );
    }

    #[test]
    fn unknown_query_tags_are_treated_as_padding() {
        let (map, base, enc) = setup();
        // Unknown tag encodes to zeros: all units tie at distance 1; unit
        // order decides winners. Should not error.
        let (_, trace) = sommbl_classify(&map, &base, &enc, &[Tag::sym("ZZ")], 2).unwrap();
        assert_eq!(trace.candidates, 2);
        assert!(lsommbl_classify(&map, &base, &enc, &[Tag::sym("ZZ")]).is_ok());
    }
}
