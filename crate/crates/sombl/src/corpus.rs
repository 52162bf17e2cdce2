//! Corpus parsing, chunk-tag reduction and instance-memory construction.
//!
//! Input is the usual three-column shared-task format: one token per line as
//! `word POS chunk`, sentences separated by blank lines. Chunk annotation is
//! reduced to a three-class scheme over base noun phrases only: `I` inside an
//! NP, `O` outside, and `B` for a token that starts an NP immediately after
//! another NP. Instances are distinct part-of-speech windows around a focus
//! token, each carrying the class frequencies observed for that window.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::error::Error;

/// Literal used for window positions that fall outside the sentence. It is
/// reserved: a corpus tag spelled this way is rejected at parse time.
pub const EMPTY_TAG: &str = "__EMPTY__";

/// A part-of-speech tag, or the padding value for positions outside the
/// sentence. `Empty` sorts before every symbol so that instance ordering is
/// stable.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Tag {
    Empty,
    Sym(String),
}

impl Tag {
    pub fn sym(s: &str) -> Tag {
        Tag::Sym(s.to_string())
    }

    /// Parses a tag, mapping the reserved padding literal back to `Empty`.
    pub fn parse(s: &str) -> Tag {
        if s == EMPTY_TAG {
            Tag::Empty
        } else {
            Tag::sym(s)
        }
    }

    pub fn is_padding(&self) -> bool {
        matches!(self, Tag::Empty)
    }
}

impl fmt::Display for Tag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tag::Empty => f.write_str(EMPTY_TAG),
            Tag::Sym(s) => f.write_str(s),
        }
    }
}

/// The three chunk classes. Declaration order is the canonical order used
/// for every deterministic tie-break in the crate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ChunkClass {
    B,
    I,
    O,
}

impl ChunkClass {
    pub const ALL: [ChunkClass; 3] = [ChunkClass::B, ChunkClass::I, ChunkClass::O];

    pub fn as_str(self) -> &'static str {
        match self {
            ChunkClass::B => "B",
            ChunkClass::I => "I",
            ChunkClass::O => "O",
        }
    }

    pub fn index(self) -> usize {
        match self {
            ChunkClass::B => 0,
            ChunkClass::I => 1,
            ChunkClass::O => 2,
        }
    }
}

impl fmt::Display for ChunkClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ChunkClass {
    type Err = Error;

    fn from_str(s: &str) -> Result<ChunkClass, Error> {
        match s {
            "B" => Ok(ChunkClass::B),
            "I" => Ok(ChunkClass::I),
            "O" => Ok(ChunkClass::O),
            other => Err(Error::Parse {
                line: 0,
                message: alloc::format!("unknown chunk class {other:?}"),
            }),
        }
    }
}

/// One corpus token: surface form, part-of-speech tag and raw chunk tag.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub word: String,
    pub pos: Tag,
    pub chunk: String,
}

/// A sentence as parsed from the corpus. Always non-empty.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sentence {
    pub tokens: Vec<Token>,
}

impl Sentence {
    pub fn pos_tags(&self) -> Vec<Tag> {
        self.tokens.iter().map(|t| t.pos.clone()).collect()
    }
}

/// A sentence reduced to the chunking task: its tag sequence and the
/// three-class label of every token.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChunkedSentence {
    pub tags: Vec<Tag>,
    pub classes: Vec<ChunkClass>,
}

/// Window shape around the focus token: `left` tags before it and `right`
/// tags after it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct WindowSpec {
    pub left: usize,
    pub right: usize,
}

impl WindowSpec {
    pub fn new(left: usize, right: usize) -> WindowSpec {
        WindowSpec { left, right }
    }

    /// Number of tags in a window, focus included.
    pub fn width(self) -> usize {
        self.left + 1 + self.right
    }
}

impl fmt::Display for WindowSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-{}", self.left, self.right)
    }
}

impl FromStr for WindowSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<WindowSpec, Error> {
        let bad = || Error::Parse {
            line: 0,
            message: alloc::format!("window {s:?} is not of the form LEFT-RIGHT"),
        };
        let (l, r) = s.split_once('-').ok_or_else(bad)?;
        Ok(WindowSpec {
            left: l.trim().parse().map_err(|_| bad())?,
            right: r.trim().parse().map_err(|_| bad())?,
        })
    }
}

/// Class frequency counts for one stored window.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ClassFreqs {
    counts: [u64; 3],
}

impl ClassFreqs {
    pub fn new(b: u64, i: u64, o: u64) -> ClassFreqs {
        ClassFreqs { counts: [b, i, o] }
    }

    pub fn get(&self, class: ChunkClass) -> u64 {
        self.counts[class.index()]
    }

    pub fn add(&mut self, class: ChunkClass, n: u64) {
        self.counts[class.index()] += n;
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// Most frequent class; ties go to the earlier class in canonical order.
    pub fn modal(&self) -> Option<ChunkClass> {
        if self.total() == 0 {
            return None;
        }
        let mut best = ChunkClass::B;
        for class in [ChunkClass::I, ChunkClass::O] {
            if self.get(class) > self.get(best) {
                best = class;
            }
        }
        Some(best)
    }
}

/// A stored instance: one distinct tag window with its class frequencies.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    pub tags: Vec<Tag>,
    pub freqs: ClassFreqs,
}

impl Instance {
    /// The class this instance predicts. Errors on all-zero frequencies,
    /// which cannot occur for instances built by [`extract_instances`].
    pub fn modal_class(&self) -> Result<ChunkClass, Error> {
        self.freqs.modal().ok_or(Error::ZeroFrequencies)
    }
}

/// Parses a three-column corpus. Blank lines separate sentences; every
/// non-blank line must hold exactly `word POS chunk`.
pub fn parse_corpus(text: &str) -> Result<Vec<Sentence>, Error> {
    let mut sentences = Vec::new();
    let mut tokens: Vec<Token> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() {
            if !tokens.is_empty() {
                sentences.push(Sentence { tokens: core::mem::take(&mut tokens) });
            }
            continue;
        }
        let mut parts = line.split_whitespace();
        match (parts.next(), parts.next(), parts.next(), parts.next()) {
            (Some(word), Some(pos), Some(chunk), None) => {
                if pos == EMPTY_TAG {
                    return Err(Error::Parse {
                        line: idx + 1,
                        message: alloc::format!("tag {EMPTY_TAG:?} is reserved for padding"),
                    });
                }
                tokens.push(Token {
                    word: word.to_string(),
                    pos: Tag::sym(pos),
                    chunk: chunk.to_string(),
                });
            }
            _ => {
                return Err(Error::Parse {
                    line: idx + 1,
                    message: "expected exactly 3 whitespace-separated fields".to_string(),
                })
            }
        }
    }
    if !tokens.is_empty() {
        sentences.push(Sentence { tokens });
    }
    Ok(sentences)
}

fn is_np(chunk: &str) -> bool {
    chunk == "B-NP" || chunk == "I-NP"
}

fn check_chunk_shape(chunk: &str, line: usize) -> Result<(), Error> {
    let ok = chunk == "O"
        || (chunk.len() > 2
            && (chunk.starts_with("B-") || chunk.starts_with("I-")));
    if ok {
        Ok(())
    } else {
        Err(Error::UnknownChunkTag { line, tag: chunk.to_string() })
    }
}

/// Reduces a sentence's chunk annotation to the three-class noun-phrase
/// scheme: `I` inside an NP, `O` outside, and `B` only where an NP starts
/// directly after another NP. The line number in errors is the token's
/// position within the sentence, starting at 1.
pub fn to_np_iob1(sentence: &Sentence) -> Result<Vec<ChunkClass>, Error> {
    let mut classes = Vec::with_capacity(sentence.tokens.len());
    let mut prev_in_np = false;
    for (idx, token) in sentence.tokens.iter().enumerate() {
        check_chunk_shape(&token.chunk, idx + 1)?;
        let in_np = is_np(&token.chunk);
        let class = if !in_np {
            ChunkClass::O
        } else {
            let starts = token.chunk.starts_with("B-") || !prev_in_np;
            if starts && prev_in_np {
                ChunkClass::B
            } else {
                ChunkClass::I
            }
        };
        classes.push(class);
        prev_in_np = in_np;
    }
    Ok(classes)
}

/// Reduces every sentence with [`to_np_iob1`].
pub fn chunk_sentences(sentences: &[Sentence]) -> Result<Vec<ChunkedSentence>, Error> {
    sentences
        .iter()
        .map(|s| {
            Ok(ChunkedSentence {
                tags: s.pos_tags(),
                classes: to_np_iob1(s)?,
            })
        })
        .collect()
}

/// The window of tags around `focus`, padded with [`Tag::Empty`] where it
/// extends past either end of the sentence.
pub fn window_at(tags: &[Tag], focus: usize, spec: WindowSpec) -> Vec<Tag> {
    let mut window = Vec::with_capacity(spec.width());
    let lo = focus as i64 - spec.left as i64;
    for offset in 0..spec.width() as i64 {
        let pos = lo + offset;
        if pos < 0 || pos >= tags.len() as i64 {
            window.push(Tag::Empty);
        } else {
            window.push(tags[pos as usize].clone());
        }
    }
    window
}

/// One window per token position, in sentence order.
pub fn tag_windows(tags: &[Tag], spec: WindowSpec) -> Vec<Vec<Tag>> {
    (0..tags.len()).map(|i| window_at(tags, i, spec)).collect()
}

/// Builds the instance memory: every distinct window over the corpus with
/// the class frequencies observed for it. The result is sorted by tag tuple.
pub fn extract_instances(sentences: &[ChunkedSentence], spec: WindowSpec) -> Vec<Instance> {
    let mut acc: BTreeMap<Vec<Tag>, ClassFreqs> = BTreeMap::new();
    for sentence in sentences {
        for (idx, class) in sentence.classes.iter().enumerate() {
            let window = window_at(&sentence.tags, idx, spec);
            acc.entry(window).or_default().add(*class, 1);
        }
    }
    acc.into_iter()
        .map(|(tags, freqs)| Instance { tags, freqs })
        .collect()
}

/// The distinct part-of-speech tags of a corpus, sorted.
pub fn tag_set(sentences: &[Sentence]) -> BTreeSet<Tag> {
    sentences
        .iter()
        .flat_map(|s| s.tokens.iter().map(|t| t.pos.clone()))
        .collect()
}
