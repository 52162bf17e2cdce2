//! The exact memory-based classifier: full nearest-neighbour scans over the
//! instance memory with per-feature weighting.
//!
//! Distances between tag windows use weighted overlap (a weight is paid for
//! every position where the tags differ). Weights come from occurrence
//! counts: uniform, information gain, or gain ratio. A Euclidean variant
//! over encoded vectors serves as the exact reference for the map-edited
//! pipelines, which search the same space.

use alloc::vec;
use alloc::vec::Vec;
use core::str::FromStr;

use crate::corpus::{ChunkClass, ChunkedSentence, Instance, Tag, WindowSpec};
use crate::encoding::{encode_window, encode_window_lenient, Encoder};
use crate::error::Error;
use crate::math;

/// Feature-weighting schemes for the overlap metric.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WeightScheme {
    Uniform,
    InfoGain,
    GainRatio,
}

impl WeightScheme {
    pub fn as_str(self) -> &'static str {
        match self {
            WeightScheme::Uniform => "uniform",
            WeightScheme::InfoGain => "ig",
            WeightScheme::GainRatio => "gr",
        }
    }
}

impl FromStr for WeightScheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<WeightScheme, Error> {
        match s {
            "uniform" => Ok(WeightScheme::Uniform),
            "ig" => Ok(WeightScheme::InfoGain),
            "gr" => Ok(WeightScheme::GainRatio),
            other => Err(Error::InvalidArgument(alloc::format!(
                "unknown weight scheme {other:?} (expected uniform, ig or gr)"
            ))),
        }
    }
}

/// The instance memory: distinct windows sorted by tag tuple, the window
/// shape they were extracted with, and the feature weights in force.
#[derive(Debug, Clone, PartialEq)]
pub struct MemoryBase {
    spec: WindowSpec,
    instances: Vec<Instance>,
    scheme: WeightScheme,
    weights: Vec<f64>,
}

impl MemoryBase {
    /// Builds a base from instances, sorting by tag tuple and merging any
    /// duplicates by summing their frequencies. Starts with uniform weights.
    pub fn new(spec: WindowSpec, mut instances: Vec<Instance>) -> Result<MemoryBase, Error> {
        for inst in &instances {
            if inst.tags.len() != spec.width() {
                return Err(Error::LengthMismatch {
                    left: inst.tags.len(),
                    right: spec.width(),
                });
            }
            if inst.freqs.total() == 0 {
                return Err(Error::ZeroFrequencies);
            }
        }
        instances.sort_by(|a, b| a.tags.cmp(&b.tags));
        let mut merged: Vec<Instance> = Vec::with_capacity(instances.len());
        for inst in instances {
            match merged.last_mut() {
                Some(last) if last.tags == inst.tags => {
                    for class in ChunkClass::ALL {
                        last.freqs.add(class, inst.freqs.get(class));
                    }
                }
                _ => merged.push(inst),
            }
        }
        let width = spec.width();
        Ok(MemoryBase {
            spec,
            instances: merged,
            scheme: WeightScheme::Uniform,
            weights: vec![1.0; width],
        })
    }

    /// Extracts instances from chunked sentences and weights them.
    pub fn build(
        sentences: &[ChunkedSentence],
        spec: WindowSpec,
        scheme: WeightScheme,
    ) -> Result<MemoryBase, Error> {
        let instances = crate::corpus::extract_instances(sentences, spec);
        MemoryBase::new(spec, instances)?.with_scheme(scheme)
    }

    /// Recomputes feature weights under the given scheme.
    pub fn with_scheme(mut self, scheme: WeightScheme) -> Result<MemoryBase, Error> {
        self.weights = compute_weights(&self.instances, self.spec.width(), scheme)?;
        self.scheme = scheme;
        Ok(self)
    }

    pub fn spec(&self) -> WindowSpec {
        self.spec
    }

    pub fn instances(&self) -> &[Instance] {
        &self.instances
    }

    pub fn scheme(&self) -> WeightScheme {
        self.scheme
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Number of stored instances (distinct windows).
    pub fn len(&self) -> usize {
        self.instances.len()
    }

    pub fn is_empty(&self) -> bool {
        self.instances.is_empty()
    }

    /// Total training occurrences behind the stored instances.
    pub fn occurrences(&self) -> u64 {
        self.instances.iter().map(|i| i.freqs.total()).sum()
    }

    /// The classes that actually occur as a modal class in this base, in
    /// canonical order.
    pub fn present_classes(&self) -> Vec<ChunkClass> {
        let mut present = [false; 3];
        for inst in &self.instances {
            if let Some(class) = inst.freqs.modal() {
                present[class.index()] = true;
            }
        }
        ChunkClass::ALL
            .into_iter()
            .filter(|c| present[c.index()])
            .collect()
    }
}

fn entropy(counts: &[u64], total: u64) -> f64 {
    if total == 0 {
        return 0.0;
    }
    let mut h = 0.0;
    for &c in counts {
        if c > 0 {
            let p = c as f64 / total as f64;
            h -= p * math::log2(p);
        }
    }
    h
}

/// Per-feature weights over occurrence-expanded counts. Information gain is
/// the drop in class entropy from knowing the feature's value; gain ratio
/// divides by the feature's own entropy, and is 0 for a feature with a
/// single observed value.
pub fn compute_weights(
    instances: &[Instance],
    width: usize,
    scheme: WeightScheme,
) -> Result<Vec<f64>, Error> {
    if scheme == WeightScheme::Uniform {
        return Ok(vec![1.0; width]);
    }
    if instances.is_empty() {
        return Err(Error::EmptyMemory);
    }
    let total: u64 = instances.iter().map(|i| i.freqs.total()).sum();
    let mut class_totals = [0u64; 3];
    for inst in instances {
        for class in ChunkClass::ALL {
            class_totals[class.index()] += inst.freqs.get(class);
        }
    }
    let base_entropy = entropy(&class_totals, total);

    let mut weights = Vec::with_capacity(width);
    for feature in 0..width {
        let mut by_value: alloc::collections::BTreeMap<&Tag, ([u64; 3], u64)> =
            alloc::collections::BTreeMap::new();
        for inst in instances {
            let entry = by_value.entry(&inst.tags[feature]).or_default();
            for class in ChunkClass::ALL {
                entry.0[class.index()] += inst.freqs.get(class);
            }
            entry.1 += inst.freqs.total();
        }
        let mut conditional = 0.0;
        let mut split_info = 0.0;
        for (counts, value_total) in by_value.values() {
            let p = *value_total as f64 / total as f64;
            conditional += p * entropy(counts, *value_total);
            split_info -= p * math::log2(p);
        }
        let gain = base_entropy - conditional;
        weights.push(match scheme {
            WeightScheme::Uniform => unreachable!("handled above"),
            WeightScheme::InfoGain => gain,
            WeightScheme::GainRatio => {
                if split_info > 0.0 {
                    gain / split_info
                } else {
                    0.0
                }
            }
        });
    }
    Ok(weights)
}

/// Weighted overlap distance: the sum of the weights of every position
/// where the two windows carry different tags.
pub fn overlap_distance(a: &[Tag], b: &[Tag], weights: &[f64]) -> Result<f64, Error> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch { left: a.len(), right: b.len() });
    }
    if a.len() != weights.len() {
        return Err(Error::LengthMismatch { left: a.len(), right: weights.len() });
    }
    Ok(a.iter()
        .zip(b)
        .zip(weights)
        .filter(|((x, y), _)| x != y)
        .map(|(_, w)| *w)
        .sum())
}

/// Result of a nearest-neighbour scan.
#[derive(Debug, Clone, PartialEq)]
pub struct Nearest<'a> {
    pub instance: &'a Instance,
    pub distance: f64,
    pub comparisons: usize,
}

/// Deterministic tie-break shared by every nearest-neighbour search in the
/// crate: smaller distance, then higher total frequency, then the
/// lexicographically smaller tag tuple.
fn challenger_wins(best: &Instance, best_dist: f64, cand: &Instance, cand_dist: f64) -> bool {
    if cand_dist != best_dist {
        return cand_dist < best_dist;
    }
    let (bf, cf) = (best.freqs.total(), cand.freqs.total());
    if cf != bf {
        return cf > bf;
    }
    cand.tags < best.tags
}

/// Exact nearest neighbour under weighted overlap, scanning the whole base.
pub fn nearest_exact<'a>(base: &'a MemoryBase, query: &[Tag]) -> Result<Nearest<'a>, Error> {
    if base.is_empty() {
        return Err(Error::EmptyMemory);
    }
    let mut best: Option<(&Instance, f64)> = None;
    for inst in base.instances() {
        let d = overlap_distance(&inst.tags, query, base.weights())?;
        match &best {
            Some((b, bd)) if !challenger_wins(b, *bd, inst, d) => {}
            _ => best = Some((inst, d)),
        }
    }
    let (instance, distance) = best.expect("base is non-empty");
    Ok(Nearest { instance, distance, comparisons: base.len() })
}

/// Classifies a window by the modal class of its exact nearest neighbour.
pub fn classify_exact(base: &MemoryBase, query: &[Tag]) -> Result<ChunkClass, Error> {
    nearest_exact(base, query)?.instance.modal_class()
}

/// Distance definition for [`nearest_in`].
pub enum Metric<'a> {
    /// Weighted overlap over raw tag windows.
    Overlap(&'a [f64]),
    /// Euclidean distance over encoded windows. The query is encoded
    /// leniently (unknown tags become padding); candidates strictly.
    Euclidean(&'a Encoder),
}

/// Nearest neighbour among an explicit candidate list, under either metric,
/// with the same tie-break as [`nearest_exact`]. Errors on an empty list.
pub fn nearest_in<'a>(
    candidates: &[&'a Instance],
    query: &[Tag],
    metric: &Metric<'_>,
) -> Result<(&'a Instance, f64), Error> {
    if candidates.is_empty() {
        return Err(Error::EmptyCandidates);
    }
    let query_vec = match metric {
        Metric::Euclidean(enc) => Some(encode_window_lenient(query, enc)),
        Metric::Overlap(_) => None,
    };
    let mut best: Option<(&Instance, f64)> = None;
    for &inst in candidates {
        let d = match metric {
            Metric::Overlap(weights) => overlap_distance(&inst.tags, query, weights)?,
            Metric::Euclidean(enc) => {
                let v = encode_window(&inst.tags, enc)?;
                let q = query_vec.as_ref().expect("query encoded for Euclidean");
                if v.len() != q.len() {
                    return Err(Error::LengthMismatch { left: v.len(), right: q.len() });
                }
                math::dist_sq(&v, q)
            }
        };
        match &best {
            Some((b, bd)) if !challenger_wins(b, *bd, inst, d) => {}
            _ => best = Some((inst, d)),
        }
    }
    let (instance, mut distance) = best.expect("candidates are non-empty");
    if matches!(metric, Metric::Euclidean(_)) {
        distance = math::sqrt(distance);
    }
    Ok((instance, distance))
}
