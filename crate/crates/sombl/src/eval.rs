//! Chunk-level scoring of predicted class sequences against gold.
//!
//! A chunk is a maximal span of `I` tokens, with `B` starting a new chunk
//! directly after another. Precision, recall and F-score count exact span
//! matches; tag accuracy counts per-token class matches. All four are
//! percentages.

use alloc::collections::BTreeSet;
use alloc::vec::Vec;

use crate::corpus::ChunkClass;
use crate::error::Error;

/// Chunk precision, recall, F-score and per-token tag accuracy, in percent.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChunkScore {
    pub precision: f64,
    pub recall: f64,
    pub fscore: f64,
    pub tag_accuracy: f64,
}

/// Extracts chunk spans as inclusive `(start, end)` token ranges. `B`
/// always starts a new chunk (closing any open one); `I` continues a chunk
/// or starts one from outside; `O` closes.
pub fn extract_chunks(classes: &[ChunkClass]) -> Vec<(usize, usize)> {
    let mut spans = Vec::new();
    let mut start: Option<usize> = None;
    for (idx, class) in classes.iter().enumerate() {
        match class {
            ChunkClass::O => {
                if let Some(s) = start.take() {
                    spans.push((s, idx - 1));
                }
            }
            ChunkClass::B => {
                if let Some(s) = start.take() {
                    spans.push((s, idx - 1));
                }
                start = Some(idx);
            }
            ChunkClass::I => {
                if start.is_none() {
                    start = Some(idx);
                }
            }
        }
    }
    if let Some(s) = start {
        spans.push((s, classes.len() - 1));
    }
    spans
}

/// Scores predictions against gold, sentence by sentence. Sequence counts
/// and lengths must line up exactly.
pub fn score(gold: &[Vec<ChunkClass>], pred: &[Vec<ChunkClass>]) -> Result<ChunkScore, Error> {
    if gold.len() != pred.len() {
        return Err(Error::ShapeMismatch { expected: gold.len(), actual: pred.len() });
    }
    let mut gold_chunks = 0usize;
    let mut pred_chunks = 0usize;
    let mut correct_chunks = 0usize;
    let mut tokens = 0usize;
    let mut correct_tags = 0usize;
    for (g, p) in gold.iter().zip(pred) {
        if g.len() != p.len() {
            return Err(Error::ShapeMismatch { expected: g.len(), actual: p.len() });
        }
        let gs: BTreeSet<(usize, usize)> = extract_chunks(g).into_iter().collect();
        let ps: BTreeSet<(usize, usize)> = extract_chunks(p).into_iter().collect();
        gold_chunks += gs.len();
        pred_chunks += ps.len();
        correct_chunks += gs.intersection(&ps).count();
        tokens += g.len();
        correct_tags += g.iter().zip(p).filter(|(a, b)| a == b).count();
    }
    let pct = |num: usize, den: usize| {
        if den == 0 {
            0.0
        } else {
            100.0 * num as f64 / den as f64
        }
    };
    let precision = pct(correct_chunks, pred_chunks);
    let recall = pct(correct_chunks, gold_chunks);
    // When P == R the harmonic mean is exactly P; computing it via the
    // general formula would round.
    let fscore = if precision == recall {
        precision
    } else if precision + recall > 0.0 {
        2.0 * precision * recall / (precision + recall)
    } else {
        0.0
    };
    let tag_accuracy = if tokens == 0 { 100.0 } else { pct(correct_tags, tokens) };
    Ok(ChunkScore { precision, recall, fscore, tag_accuracy })
}
