//! Tag-to-vector encodings for the map pipelines.
//!
//! Three sources: an orthogonal basis (one axis per tag), a lexical
//! approximation that places tags in a low-dimensional space built from
//! neighbouring-word counts, and user-supplied vectors read from a file.
//! The padding tag always encodes as the all-zero vector.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use crate::corpus::{Sentence, Tag, EMPTY_TAG};
use crate::error::Error;

/// Default dimensionality of the lexical space.
pub const DEFAULT_LEXICAL_DIM: usize = 25;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EncoderKind {
    Orthogonal,
    Lexical,
    External,
}

impl EncoderKind {
    pub fn as_str(self) -> &'static str {
        match self {
            EncoderKind::Orthogonal => "orth",
            EncoderKind::Lexical => "lex",
            EncoderKind::External => "file",
        }
    }
}

/// Maps tags to fixed-dimensional vectors. The padding tag is not stored:
/// it always maps to the zero vector.
#[derive(Debug, Clone, PartialEq)]
pub struct Encoder {
    dim: usize,
    kind: EncoderKind,
    table: BTreeMap<String, Vec<f64>>,
    zero: Vec<f64>,
}

impl Encoder {
    pub fn new(kind: EncoderKind, dim: usize, table: BTreeMap<String, Vec<f64>>) -> Encoder {
        Encoder { dim, kind, table, zero: vec![0.0; dim] }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kind(&self) -> EncoderKind {
        self.kind
    }

    /// The vector for a tag: zeros for padding, `None` for an unknown tag.
    pub fn vector(&self, tag: &Tag) -> Option<&[f64]> {
        match tag {
            Tag::Empty => Some(&self.zero),
            Tag::Sym(s) => self.table.get(s).map(|v| v.as_slice()),
        }
    }

    /// Known tags with their vectors, in sorted order.
    pub fn entries(&self) -> impl Iterator<Item = (&str, &[f64])> {
        self.table.iter().map(|(t, v)| (t.as_str(), v.as_slice()))
    }

    pub fn len(&self) -> usize {
        self.table.len()
    }

    pub fn is_empty(&self) -> bool {
        self.table.is_empty()
    }
}

/// Concatenates the vectors of a window's tags. Unknown tags are an error
/// naming the tag and its window position.
pub fn encode_window(tags: &[Tag], enc: &Encoder) -> Result<Vec<f64>, Error> {
    let mut out = Vec::with_capacity(tags.len() * enc.dim());
    for (position, tag) in tags.iter().enumerate() {
        match enc.vector(tag) {
            Some(v) => out.extend_from_slice(v),
            None => {
                return Err(Error::UnknownTag { tag: tag.to_string(), position })
            }
        }
    }
    Ok(out)
}

/// Like [`encode_window`], but unknown tags contribute the zero vector,
/// i.e. they are treated as padding. Used for test-time queries, where a
/// tag unseen in training has no encoding.
pub fn encode_window_lenient(tags: &[Tag], enc: &Encoder) -> Vec<f64> {
    let mut out = Vec::with_capacity(tags.len() * enc.dim());
    for tag in tags {
        match enc.vector(tag) {
            Some(v) => out.extend_from_slice(v),
            None => out.extend_from_slice(&vec![0.0; enc.dim()]),
        }
    }
    out
}

/// Builds the orthogonal encoding: tags sorted lexicographically, each
/// assigned one basis vector of dimension equal to the tag count.
pub fn build_orthogonal<'a, T>(tags: T) -> Result<Encoder, Error>
where
    T: IntoIterator<Item = &'a Tag>,
{
    let mut names: Vec<&str> = Vec::new();
    for tag in tags {
        match tag {
            Tag::Empty => return Err(Error::ReservedTag(EMPTY_TAG.to_string())),
            Tag::Sym(s) => names.push(s),
        }
    }
    names.sort_unstable();
    for pair in names.windows(2) {
        if pair[0] == pair[1] {
            return Err(Error::DuplicateTag(pair[0].to_string()));
        }
    }
    let dim = names.len();
    let table = names
        .iter()
        .enumerate()
        .map(|(i, name)| {
            let mut v = vec![0.0; dim];
            v[i] = 1.0;
            (name.to_string(), v)
        })
        .collect();
    Ok(Encoder::new(EncoderKind::Orthogonal, dim, table))
}

/// Options for the lexical encoding.
#[derive(Debug, Clone, Copy)]
pub struct LexicalParams {
    /// Candidate pool: only this many of the corpus's most frequent words
    /// are considered when picking context features.
    pub context_words: usize,
    /// Normalize each word's context-count row to unit L1 norm before
    /// averaging into tag vectors. When false, tag vectors are normalized
    /// after averaging instead.
    pub normalize_words_first: bool,
}

impl Default for LexicalParams {
    fn default() -> LexicalParams {
        LexicalParams { context_words: usize::MAX, normalize_words_first: true }
    }
}

/// Builds the lexical encoding. Feature axes are the corpus's most frequent
/// context words: the top half of `dim` (rounded up) ranked by how often a
/// word occurs as immediate left neighbour, the rest ranked by right-
/// neighbour occurrences. Each word gets a row of its context counts over
/// those axes, and a tag's vector is the frequency-weighted mean of the
/// rows of the words it tags.
pub fn build_lexical(
    sentences: &[Sentence],
    dim: usize,
    params: LexicalParams,
) -> Result<Encoder, Error> {
    if dim == 0 {
        return Err(Error::InvalidArgument(
            "lexical dimension must be at least 1".to_string(),
        ));
    }
    if sentences.is_empty() {
        return Err(Error::InvalidArgument(
            "lexical encoding needs a non-empty corpus".to_string(),
        ));
    }

    let mut word_counts: BTreeMap<&str, u64> = BTreeMap::new();
    let mut left_counts: BTreeMap<&str, u64> = BTreeMap::new();
    let mut right_counts: BTreeMap<&str, u64> = BTreeMap::new();
    let mut bigrams: BTreeMap<(&str, &str), u64> = BTreeMap::new();
    let mut tag_words: BTreeMap<(&str, &str), u64> = BTreeMap::new();
    for sentence in sentences {
        for (idx, token) in sentence.tokens.iter().enumerate() {
            let word = token.word.as_str();
            *word_counts.entry(word).or_default() += 1;
            let tag = match &token.pos {
                Tag::Sym(s) => s.as_str(),
                Tag::Empty => return Err(Error::ReservedTag(EMPTY_TAG.to_string())),
            };
            *tag_words.entry((tag, word)).or_default() += 1;
            if idx + 1 < sentence.tokens.len() {
                let next = sentence.tokens[idx + 1].word.as_str();
                *bigrams.entry((word, next)).or_default() += 1;
                *left_counts.entry(word).or_default() += 1;
                *right_counts.entry(next).or_default() += 1;
            }
        }
    }

    let mut pool: Vec<(&str, u64)> = word_counts.iter().map(|(w, c)| (*w, *c)).collect();
    pool.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));
    pool.truncate(params.context_words);

    let pick = |counts: &BTreeMap<&str, u64>, need: usize| -> Result<Vec<String>, Error> {
        let mut ranked: Vec<(&str, u64)> = pool
            .iter()
            .filter_map(|(w, _)| counts.get(w).map(|c| (*w, *c)))
            .collect();
        ranked.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));
        if ranked.len() < need {
            return Err(Error::DimensionTooLarge {
                requested: dim,
                available: 2 * ranked.len(),
            });
        }
        Ok(ranked[..need].iter().map(|(w, _)| w.to_string()).collect())
    };
    let left_features = pick(&left_counts, dim.div_ceil(2))?;
    let right_features = pick(&right_counts, dim / 2)?;

    // A word's row: counts of each left feature appearing directly before
    // it, then of each right feature appearing directly after it.
    let word_row = |word: &str| -> Vec<f64> {
        let mut row = Vec::with_capacity(dim);
        for f in &left_features {
            row.push(*bigrams.get(&(f.as_str(), word)).unwrap_or(&0) as f64);
        }
        for f in &right_features {
            row.push(*bigrams.get(&(word, f.as_str())).unwrap_or(&0) as f64);
        }
        if params.normalize_words_first {
            normalize_l1(&mut row);
        }
        row
    };

    let mut sums: BTreeMap<&str, (Vec<f64>, u64)> = BTreeMap::new();
    for ((tag, word), count) in &tag_words {
        let row = word_row(word);
        let entry = sums.entry(tag).or_insert_with(|| (vec![0.0; dim], 0));
        for (acc, x) in entry.0.iter_mut().zip(&row) {
            *acc += *count as f64 * x;
        }
        entry.1 += count;
    }

    let mut table = BTreeMap::new();
    for (tag, (mut sum, total)) in sums {
        for x in sum.iter_mut() {
            *x /= total as f64;
        }
        if !params.normalize_words_first {
            normalize_l1(&mut sum);
        }
        table.insert(tag.to_string(), sum);
    }
    Ok(Encoder::new(EncoderKind::Lexical, dim, table))
}

fn normalize_l1(v: &mut [f64]) {
    let sum: f64 = v.iter().map(|x| x.abs()).sum();
    if sum > 0.0 {
        for x in v.iter_mut() {
            *x /= sum;
        }
    }
}

/// Parses a tag-vector file: one `tag v1 v2 ... vD` line per tag, blank
/// lines and `#` comments skipped. All rows must share one dimension. A row
/// for the padding tag is allowed only if it is all zeros.
pub fn parse_tag_vectors(text: &str) -> Result<Encoder, Error> {
    let mut dim: Option<usize> = None;
    let mut table: BTreeMap<String, Vec<f64>> = BTreeMap::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let lineno = idx + 1;
        let mut parts = line.split_whitespace();
        let tag = parts.next().expect("non-empty line has a first field");
        let values: Result<Vec<f64>, _> = parts.map(str::parse).collect();
        let values = values.map_err(|e| Error::Parse {
            line: lineno,
            message: alloc::format!("bad vector component: {e}"),
        })?;
        if values.is_empty() {
            return Err(Error::Parse {
                line: lineno,
                message: "tag line has no vector components".to_string(),
            });
        }
        match dim {
            None => dim = Some(values.len()),
            Some(d) if d != values.len() => {
                return Err(Error::Parse {
                    line: lineno,
                    message: alloc::format!(
                        "expected {d} components, found {}",
                        values.len()
                    ),
                })
            }
            Some(_) => {}
        }
        if tag == EMPTY_TAG {
            if values.iter().any(|v| *v != 0.0) {
                return Err(Error::Parse {
                    line: lineno,
                    message: alloc::format!("{EMPTY_TAG} must map to the zero vector"),
                });
            }
            continue;
        }
        if table.insert(tag.to_string(), values).is_some() {
            return Err(Error::DuplicateTag(tag.to_string()));
        }
    }
    match dim {
        Some(d) if !table.is_empty() => Ok(Encoder::new(EncoderKind::External, d, table)),
        _ => Err(Error::Parse {
            line: 0,
            message: "tag-vector file defines no tags".to_string(),
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::parse_corpus;
    use alloc::format;

    fn tags(names: &[&str]) -> Vec<Tag> {
        names.iter().map(|n| Tag::sym(n)).collect()
    }

    #[test]
    fn orthogonal_assigns_basis_vectors_in_sorted_order() {
        let ts = tags(&["NN", "DT", "VBD"]);
        let enc = build_orthogonal(&ts).unwrap();
        assert_eq!(enc.dim(), 3);
        assert_eq!(enc.vector(&Tag::sym("DT")).unwrap(), &[1.0, 0.0, 0.0]);
        assert_eq!(enc.vector(&Tag::sym("NN")).unwrap(), &[0.0, 1.0, 0.0]);
        assert_eq!(enc.vector(&Tag::sym("VBD")).unwrap(), &[0.0, 0.0, 1.0]);
        assert_eq!(enc.vector(&Tag::Empty).unwrap(), &[0.0, 0.0, 0.0]);
        assert_eq!(enc.vector(&Tag::sym("JJ")), None);
    }

    #[test]
    fn orthogonal_rejects_duplicates_and_padding() {
        let ts = tags(&["NN", "NN"]);
        assert_eq!(
            build_orthogonal(&ts),
            Err(Error::DuplicateTag("NN".to_string()))
        );
        let with_padding = alloc::vec![Tag::sym("NN"), Tag::Empty];
        assert!(matches!(
            build_orthogonal(&with_padding),
            Err(Error::ReservedTag(_))
        ));
    }

    #[test]
    fn encode_window_concatenates_and_flags_unknowns() {
        let ts = tags(&["A", "B"]);
        let enc = build_orthogonal(&ts).unwrap();
        let window = alloc::vec![Tag::sym("B"), Tag::Empty, Tag::sym("A")];
        assert_eq!(
            encode_window(&window, &enc).unwrap(),
            alloc::vec![0.0, 1.0, 0.0, 0.0, 1.0, 0.0]
        );
        let with_unknown = alloc::vec![Tag::sym("A"), Tag::sym("Z")];
        match encode_window(&with_unknown, &enc) {
            Err(Error::UnknownTag { tag, position }) => {
                assert_eq!(tag, "Z");
                assert_eq!(position, 1);
            }
            other => panic!("expected unknown-tag error, got {other:?}"),
        }
        assert_eq!(
            encode_window_lenient(&with_unknown, &enc),
            alloc::vec![1.0, 0.0, 0.0, 0.0]
        );
    }

    fn toy_corpus() -> alloc::vec::Vec<Sentence> {
        // "the cat sat", "the dog sat", "a cat ran"
        let text = "the DT B-NP\ncat NN I-NP\nsat VBD B-VP\n\n\
                    the DT B-NP\ndog NN I-NP\nsat VBD B-VP\n\n\
                    a DT B-NP\ncat NN I-NP\nran VBD B-VP\n";
        parse_corpus(text).unwrap()
    }

    #[test]
    fn lexical_rows_are_l1_normalized_and_averaged() {
        let sentences = toy_corpus();
        // dim 2: one left feature, one right feature. Left-neighbour counts:
        // the=2 cat=2 a=1 dog=1; right: cat=2 sat=2 dog=1 ran=1. "cat" wins
        // both axes (count ties break alphabetically). Normalized rows over
        // [cat-before, cat-after]: sat=[1,0] ran=[1,0] the=[0,1] a=[0,1]
        // cat=dog=[0,0].
        let enc = build_lexical(&sentences, 2, LexicalParams::default()).unwrap();
        assert_eq!(enc.dim(), 2);
        let vbd = enc.vector(&Tag::sym("VBD")).unwrap();
        assert!((vbd[0] - 1.0).abs() < 1e-12 && vbd[1].abs() < 1e-12);
        let dt = enc.vector(&Tag::sym("DT")).unwrap();
        assert!(dt[0].abs() < 1e-12 && (dt[1] - 1.0).abs() < 1e-12);
        let nn = enc.vector(&Tag::sym("NN")).unwrap();
        assert_eq!(nn, &[0.0, 0.0]);
    }

    #[test]
    fn lexical_tag_vector_is_frequency_weighted() {
        // X tags "b" three times and "c" once. Features: left "a", right
        // "b". Normalized rows: b=[1,0], c=[0.5,0.5].
        let text = "a A O\nb X O\n\na A O\nb X O\n\na A O\nc X O\nb X O\n";
        let sentences = parse_corpus(text).unwrap();
        let enc = build_lexical(&sentences, 2, LexicalParams::default()).unwrap();
        let x = enc.vector(&Tag::sym("X")).unwrap();
        // (3*[1,0] + 1*[0.5,0.5]) / 4
        assert!((x[0] - 0.875).abs() < 1e-12);
        assert!((x[1] - 0.125).abs() < 1e-12);
    }

    #[test]
    fn lexical_rejects_oversized_dimension() {
        let sentences = toy_corpus();
        // Only 4 distinct words ever occur as a left neighbour.
        let err = build_lexical(&sentences, 40, LexicalParams::default());
        assert!(matches!(err, Err(Error::DimensionTooLarge { requested: 40, .. })));
    }

    #[test]
    fn lexical_respects_context_pool() {
        let sentences = toy_corpus();
        let params = LexicalParams { context_words: 3, ..LexicalParams::default() };
        let enc = build_lexical(&sentences, 2, params).unwrap();
        assert_eq!(enc.dim(), 2);
        let tiny = LexicalParams { context_words: 0, ..LexicalParams::default() };
        assert!(build_lexical(&sentences, 2, tiny).is_err());
    }

    #[test]
    fn normalize_after_averaging_gives_unit_tag_vectors() {
        let sentences = toy_corpus();
        let params = LexicalParams { normalize_words_first: false, ..Default::default() };
        let enc = build_lexical(&sentences, 2, params).unwrap();
        for (_, v) in enc.entries() {
            let sum: f64 = v.iter().map(|x| x.abs()).sum();
            assert!(sum == 0.0 || (sum - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn tag_vector_file_round_trip_of_values() {
        let text = "# comment\nDT 1.0 0.5\nNN 0.25 -2.0\n\n";
        let enc = parse_tag_vectors(text).unwrap();
        assert_eq!(enc.dim(), 2);
        assert_eq!(enc.kind(), EncoderKind::External);
        assert_eq!(enc.vector(&Tag::sym("NN")).unwrap(), &[0.25, -2.0]);
    }

    #[test]
    fn tag_vector_file_errors() {
        assert!(matches!(
            parse_tag_vectors("DT 1.0\nNN 1.0 2.0\n"),
            Err(Error::Parse { line: 2, .. })
        ));
        assert!(matches!(
            parse_tag_vectors("DT 1.0\nDT 2.0\n"),
            Err(Error::DuplicateTag(_))
        ));
        assert!(matches!(
            parse_tag_vectors("DT x\n"),
            Err(Error::Parse { line: 1, .. })
        ));
        assert!(parse_tag_vectors("\n# nothing\n").is_err());
        let padding_zero = format!("{EMPTY_TAG} 0 0\nDT 1 0\n");
        assert_eq!(parse_tag_vectors(&padding_zero).unwrap().len(), 1);
        let padding_bad = format!("{EMPTY_TAG} 0 1\nDT 1 0\n");
        assert!(parse_tag_vectors(&padding_bad).is_err());
    }
}
