//! The label-constrained map variant.
//!
//! Training items carry the modal class of the instance they encode. A
//! unit is eligible to win an item only if it carries the same label or no
//! label yet; an unlabelled winner acquires the item's label and keeps it
//! for good. Neighbourhood updates likewise touch only units whose label
//! matches or is unset, and never change any label, so every class keeps a
//! region of the map to itself.

use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::corpus::ChunkClass;
use crate::encoding::{encode_window, Encoder};
use crate::error::Error;
use crate::math;
use crate::mbl::MemoryBase;
use crate::som::{update_filtered, Schedule, SomMap};

/// One training item: an encoded window and its instance's modal class.
#[derive(Debug, Clone, PartialEq)]
pub struct LabelledItem {
    pub vector: Vec<f64>,
    pub label: ChunkClass,
}

/// Encodes every stored instance with its modal class, in base order.
pub fn labelled_items(base: &MemoryBase, enc: &Encoder) -> Result<Vec<LabelledItem>, Error> {
    base.instances()
        .iter()
        .map(|inst| {
            Ok(LabelledItem {
                vector: encode_window(&inst.tags, enc)?,
                label: inst.modal_class()?,
            })
        })
        .collect()
}

fn accepts(label: Option<ChunkClass>, item_label: ChunkClass) -> bool {
    label.is_none_or(|l| l == item_label)
}

/// The nearest unit eligible for an item with this label: same label or
/// still unlabelled. An unlabelled winner acquires the label. Errors when
/// every unit carries some other label.
pub fn winner(map: &mut SomMap, x: &[f64], label: ChunkClass) -> Result<usize, Error> {
    let mut best: Option<(usize, f64)> = None;
    for (idx, unit) in map.units().iter().enumerate() {
        if !accepts(unit.label, label) {
            continue;
        }
        let d = math::dist_sq(&unit.weights, x);
        if best.is_none_or(|(_, bd)| d < bd) {
            best = Some((idx, d));
        }
    }
    let (idx, _) = best.ok_or(Error::LabelStarved(label))?;
    let unit = &mut map.units_mut()[idx];
    if unit.label.is_none() {
        unit.label = Some(label);
    }
    Ok(idx)
}

/// Moves the winner's neighbourhood towards `x`, skipping units whose
/// label differs from the item's. Labels themselves are left untouched:
/// only winning acquires one.
pub fn update(
    map: &mut SomMap,
    winner_idx: usize,
    x: &[f64],
    learning_rate: f64,
    radius: usize,
    label: ChunkClass,
) {
    update_filtered(map, winner_idx, x, learning_rate, radius, |unit| {
        accepts(unit.label, label)
    });
}

/// Label-constrained training: same presentation regime as the plain map,
/// with eligibility-restricted winners and label-gated updates.
pub fn train(
    map: &mut SomMap,
    items: &[LabelledItem],
    schedule: &Schedule,
    seed: u64,
) -> Result<(), Error> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order: Vec<usize> = (0..items.len()).collect();
    for epoch in 0..schedule.epochs {
        let radius = schedule.radius_at(epoch);
        order.shuffle(&mut rng);
        for &i in &order {
            let item = &items[i];
            let w = winner(map, &item.vector, item.label)?;
            update(map, w, &item.vector, schedule.learning_rate, radius, item.label);
        }
    }
    Ok(())
}

/// Attaches every stored instance to the nearest unit carrying exactly its
/// modal class's label; no label is acquired here. Errors when a class in
/// the base has no labelled unit left. Unused units are dropped; survivors
/// keep their grid positions.
pub fn assign_and_prune(mut map: SomMap, base: &MemoryBase, enc: &Encoder) -> Result<SomMap, Error> {
    for unit in map.units_mut() {
        unit.items.clear();
    }
    for (idx, inst) in base.instances().iter().enumerate() {
        let label = inst.modal_class()?;
        let v = encode_window(&inst.tags, enc)?;
        let mut best: Option<(usize, f64)> = None;
        for (uidx, unit) in map.units().iter().enumerate() {
            if unit.label != Some(label) {
                continue;
            }
            let d = math::dist_sq(&unit.weights, &v);
            if best.is_none_or(|(_, bd)| d < bd) {
                best = Some((uidx, d));
            }
        }
        let (uidx, _) = best.ok_or(Error::MissingLabel(label))?;
        map.units_mut()[uidx].items.push(idx);
    }
    map.prune_empty();
    Ok(map)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{ClassFreqs, Instance, Tag, WindowSpec};
    use crate::encoding::build_orthogonal;
    use crate::som::{default_schedule, SomUnit};
    use alloc::collections::BTreeSet;
    use alloc::vec;

    fn unit(row: usize, col: usize, weights: Vec<f64>, label: Option<ChunkClass>) -> SomUnit {
        SomUnit { row, col, weights, label, items: Vec::new() }
    }

    #[test]
    fn winner_skips_foreign_labels() {
        let mut map = SomMap::from_units(
            1,
            3,
            vec![
                unit(0, 0, vec![0.0], Some(ChunkClass::O)),
                unit(0, 1, vec![0.5], Some(ChunkClass::I)),
                unit(0, 2, vec![9.0], Some(ChunkClass::I)),
            ],
        );
        // Unit 0 is nearest to 0.1 but belongs to O.
        assert_eq!(winner(&mut map, &[0.1], ChunkClass::I).unwrap(), 1);
        assert_eq!(winner(&mut map, &[0.05], ChunkClass::O).unwrap(), 0);
    }

    #[test]
    fn unlabelled_winner_acquires_label_once() {
        let mut map = SomMap::from_units(
            1,
            2,
            vec![unit(0, 0, vec![0.0], None), unit(0, 1, vec![1.0], None)],
        );
        let w = winner(&mut map, &[0.1], ChunkClass::B).unwrap();
        assert_eq!(w, 0);
        assert_eq!(map.units()[0].label, Some(ChunkClass::B));
        // The labelled unit no longer accepts other classes; the other
        // unit wins and acquires that class instead.
        let w = winner(&mut map, &[0.1], ChunkClass::O).unwrap();
        assert_eq!(w, 1);
        assert_eq!(map.units()[1].label, Some(ChunkClass::O));
        // Winning again with the same class never rewrites anything.
        let w = winner(&mut map, &[0.1], ChunkClass::B).unwrap();
        assert_eq!(w, 0);
        assert_eq!(map.units()[0].label, Some(ChunkClass::B));
    }

    #[test]
    fn winner_errors_when_no_unit_can_accept() {
        let mut map = SomMap::from_units(
            1,
            2,
            vec![
                unit(0, 0, vec![0.0], Some(ChunkClass::B)),
                unit(0, 1, vec![1.0], Some(ChunkClass::I)),
            ],
        );
        assert_eq!(
            winner(&mut map, &[0.5], ChunkClass::O),
            Err(Error::LabelStarved(ChunkClass::O))
        );
    }

    #[test]
    fn update_skips_foreign_labels_and_keeps_labels() {
        let mut map = SomMap::from_units(
            1,
            3,
            vec![
                unit(0, 0, vec![0.0], Some(ChunkClass::B)),
                unit(0, 1, vec![0.0], Some(ChunkClass::I)),
                unit(0, 2, vec![0.0], None),
            ],
        );
        update(&mut map, 0, &[1.0], 0.5, 2, ChunkClass::B);
        assert_eq!(map.units()[0].weights, vec![0.5]); // same label
        assert_eq!(map.units()[1].weights, vec![0.0]); // foreign label
        assert_eq!(map.units()[2].weights, vec![0.5]); // unlabelled
        // Neighbourhood updates never assign labels.
        assert_eq!(map.units()[2].label, None);
        assert_eq!(map.units()[1].label, Some(ChunkClass::I));
    }

    fn toy_base_and_encoder() -> (MemoryBase, Encoder) {
        let tags: BTreeSet<Tag> = ["A", "B", "C", "D"].iter().map(|t| Tag::sym(t)).collect();
        let enc = build_orthogonal(&tags).unwrap();
        let instances = vec![
            Instance { tags: vec![Tag::sym("A")], freqs: ClassFreqs::new(3, 0, 0) },
            Instance { tags: vec![Tag::sym("B")], freqs: ClassFreqs::new(0, 4, 0) },
            Instance { tags: vec![Tag::sym("C")], freqs: ClassFreqs::new(0, 0, 5) },
            Instance { tags: vec![Tag::sym("D")], freqs: ClassFreqs::new(0, 1, 0) },
        ];
        let base = MemoryBase::new(WindowSpec::new(0, 0), instances).unwrap();
        (base, enc)
    }

    #[test]
    fn labelled_items_carry_modal_classes() {
        let (base, enc) = toy_base_and_encoder();
        let items = labelled_items(&base, &enc).unwrap();
        assert_eq!(items.len(), 4);
        assert_eq!(items[0].label, ChunkClass::B);
        assert_eq!(items[1].label, ChunkClass::I);
        assert_eq!(items[2].label, ChunkClass::O);
        assert_eq!(items[3].label, ChunkClass::I);
        assert_eq!(items[0].vector, vec![1.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn trained_map_keeps_one_region_per_class() {
        let (base, enc) = toy_base_and_encoder();
        let items = labelled_items(&base, &enc).unwrap();
        let mut map = SomMap::new(9, &crate::som::data_bounds(
            &items.iter().map(|i| i.vector.clone()).collect::<Vec<_>>(),
        ), 42);
        train(&mut map, &items, &default_schedule(9), 17).unwrap();
        // Every label that got assigned stays within one class, and all
        // three classes found at least one unit.
        let (counts, _) = map.label_census();
        assert!(counts.iter().all(|&c| c > 0), "census {counts:?}");
        let map = assign_and_prune(map, &base, &enc).unwrap();
        // Items may only sit on units labelled with their modal class.
        for u in map.units() {
            for &item in &u.items {
                let modal = base.instances()[item].modal_class().unwrap();
                assert_eq!(Some(modal), u.label);
            }
        }
        let all: usize = map.units().iter().map(|u| u.items.len()).sum();
        assert_eq!(all, base.len());
    }

    #[test]
    fn assignment_never_acquires_labels() {
        let (base, enc) = toy_base_and_encoder();
        // One unit per class plus an unlabelled one that is nearest to
        // everything; the unlabelled unit must stay empty and unlabelled.
        let map = SomMap::from_units(
            1,
            4,
            vec![
                unit(0, 0, vec![2.0, 0.0, 0.0, 0.0], Some(ChunkClass::B)),
                unit(0, 1, vec![0.0, 2.0, 0.0, 0.0], Some(ChunkClass::I)),
                unit(0, 2, vec![0.0, 0.0, 2.0, 0.0], Some(ChunkClass::O)),
                unit(0, 3, vec![0.25, 0.25, 0.25, 0.25], None),
            ],
        );
        let pruned = assign_and_prune(map, &base, &enc).unwrap();
        assert_eq!(pruned.len(), 3);
        assert!(pruned.units().iter().all(|u| u.label.is_some()));
    }

    #[test]
    fn assignment_errors_on_missing_label() {
        let (base, enc) = toy_base_and_encoder();
        let map = SomMap::from_units(
            1,
            2,
            vec![
                unit(0, 0, vec![0.0; 4], Some(ChunkClass::B)),
                unit(0, 1, vec![0.0; 4], Some(ChunkClass::I)),
            ],
        );
        assert_eq!(
            assign_and_prune(map, &base, &enc),
            Err(Error::MissingLabel(ChunkClass::O))
        );
    }

    #[test]
    fn training_determinism_and_write_once_labels() {
        let (base, enc) = toy_base_and_encoder();
        let items = labelled_items(&base, &enc).unwrap();
        let vectors: Vec<Vec<f64>> = items.iter().map(|i| i.vector.clone()).collect();
        let bounds = crate::som::data_bounds(&vectors);
        let mut a = SomMap::new(6, &bounds, 2);
        let mut b = SomMap::new(6, &bounds, 2);
        train(&mut a, &items, &default_schedule(6), 5).unwrap();
        train(&mut b, &items, &default_schedule(6), 5).unwrap();
        assert_eq!(a, b);

        // Replaying training step by step: once a unit has a label, no
        // later step may change it.
        let mut map = SomMap::new(6, &bounds, 2);
        let schedule = default_schedule(6);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut order: Vec<usize> = (0..items.len()).collect();
        let mut fixed: Vec<Option<ChunkClass>> = vec![None; map.len()];
        for epoch in 0..schedule.epochs {
            let radius = schedule.radius_at(epoch);
            order.shuffle(&mut rng);
            for &i in &order {
                let item = &items[i];
                let w = winner(&mut map, &item.vector, item.label).unwrap();
                update(&mut map, w, &item.vector, schedule.learning_rate, radius, item.label);
                for (u, prev) in map.units().iter().zip(fixed.iter_mut()) {
                    if let Some(p) = prev {
                        assert_eq!(u.label, Some(*p));
                    } else if let Some(l) = u.label {
                        *prev = Some(l);
                    }
                }
            }
        }
        assert_eq!(map, a);
    }
}
