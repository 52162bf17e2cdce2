//! File formats: corpus reading, the memory-base dump, tag-vector files
//! and the versioned model format.
//!
//! Model files are plain text, written in a fixed order with `{}` float
//! formatting, so the same model always serializes to the same bytes and
//! floats round-trip exactly.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use anyhow::{bail, Context, Result};
use sombl::corpus::{self, ClassFreqs, Instance};
use sombl::encoding::{self, EncoderKind};
use sombl::som::SomUnit;
use sombl::{ChunkClass, Encoder, MemoryBase, Sentence, SomMap, Tag, WindowSpec};

use crate::harness::SystemKind;

pub const MODEL_MAGIC: &str = "sombl-model";
pub const MODEL_VERSION: u32 = 1;

/// Reads and parses a three-column corpus file.
pub fn read_corpus(path: &Path) -> Result<Vec<Sentence>> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("reading corpus {}", path.display()))?;
    corpus::parse_corpus(&text)
        .with_context(|| format!("parsing corpus {}", path.display()))
}

/// Reads a tag-vector file into an encoder.
pub fn read_tag_vectors(path: &Path) -> Result<Encoder> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("reading tag vectors {}", path.display()))?;
    encoding::parse_tag_vectors(&text)
        .with_context(|| format!("parsing tag vectors {}", path.display()))
}

/// The memory-base dump: one line per stored instance, in base (sorted)
/// order, `tag1 ... tagK<TAB>B:n I:n O:n`.
pub fn format_memory_base(base: &MemoryBase) -> String {
    let mut out = String::new();
    for inst in base.instances() {
        for (i, tag) in inst.tags.iter().enumerate() {
            if i > 0 {
                out.push(' ');
            }
            let _ = write!(out, "{tag}");
        }
        let f = inst.freqs;
        let _ = writeln!(
            out,
            "\tB:{} I:{} O:{}",
            f.get(ChunkClass::B),
            f.get(ChunkClass::I),
            f.get(ChunkClass::O)
        );
    }
    out
}

/// Everything a trained system needs at query time.
#[derive(Debug, Clone, PartialEq)]
pub struct Model {
    pub system: SystemKind,
    pub base: MemoryBase,
    /// Absent for the plain memory-based system.
    pub encoder: Option<Encoder>,
    /// Absent for the plain memory-based system.
    pub map: Option<SomMap>,
}

fn label_str(label: Option<ChunkClass>) -> &'static str {
    match label {
        None => "-",
        Some(c) => c.as_str(),
    }
}

/// Serializes a model. The output is byte-stable: base instances are in
/// sorted order, encoder rows in tag order, units in storage order.
pub fn format_model(model: &Model) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{MODEL_MAGIC} {MODEL_VERSION}");
    let _ = writeln!(out, "system {}", model.system.as_str());
    let _ = writeln!(out, "window {}", model.base.spec());
    let _ = writeln!(out, "weights {}", model.base.scheme().as_str());
    match &model.encoder {
        None => {
            let _ = writeln!(out, "encoder none 0");
        }
        Some(enc) => {
            let _ = writeln!(out, "encoder {} {}", enc.kind().as_str(), enc.dim());
            for (tag, row) in enc.entries() {
                let _ = write!(out, "tag {tag}");
                for v in row {
                    let _ = write!(out, " {v}");
                }
                out.push('\n');
            }
        }
    }
    let _ = writeln!(
        out,
        "instances {} {}",
        model.base.len(),
        model.base.spec().width()
    );
    for inst in model.base.instances() {
        out.push_str("inst");
        for tag in &inst.tags {
            let _ = write!(out, " {tag}");
        }
        let f = inst.freqs;
        let _ = writeln!(
            out,
            " {} {} {}",
            f.get(ChunkClass::B),
            f.get(ChunkClass::I),
            f.get(ChunkClass::O)
        );
    }
    match &model.map {
        None => {
            let _ = writeln!(out, "map 0 0");
        }
        Some(map) => {
            let (rows, cols) = map.shape();
            let _ = writeln!(out, "map {rows} {cols}");
            for unit in map.units() {
                let _ = write!(out, "unit {} {} {}", unit.row, unit.col, label_str(unit.label));
                for w in &unit.weights {
                    let _ = write!(out, " {w}");
                }
                out.push_str(" |");
                for item in &unit.items {
                    let _ = write!(out, " {item}");
                }
                out.push('\n');
            }
        }
    }
    out.push_str("end\n");
    out
}

pub fn write_model(path: &Path, model: &Model) -> Result<()> {
    fs::write(path, format_model(model))
        .with_context(|| format!("writing model {}", path.display()))
}

/// Line cursor over a model file.
struct Cursor<'a> {
    lines: Vec<&'a str>,
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn new(text: &'a str) -> Cursor<'a> {
        Cursor { lines: text.lines().collect(), pos: 0 }
    }

    fn next(&mut self) -> Result<(usize, Vec<&'a str>)> {
        let line = *self
            .lines
            .get(self.pos)
            .ok_or_else(|| anyhow::anyhow!("model file ends early"))?;
        self.pos += 1;
        Ok((self.pos, line.split_whitespace().collect()))
    }

    /// Consumes the next line, which must start with `keyword`; returns
    /// the remaining fields.
    fn expect(&mut self, keyword: &str) -> Result<Vec<&'a str>> {
        let (no, mut fields) = self.next()?;
        if fields.first() != Some(&keyword) {
            bail!("model line {no}: expected `{keyword}`, got {:?}", self.lines[no - 1]);
        }
        fields.remove(0);
        Ok(fields)
    }

    fn peek_keyword(&self) -> Option<&'a str> {
        self.lines
            .get(self.pos)
            .and_then(|line| line.split_whitespace().next())
    }
}

fn parse_num<T: FromStr>(field: &str, what: &str) -> Result<T> {
    field
        .parse()
        .map_err(|_| anyhow::anyhow!("model: bad {what} {field:?}"))
}

fn parse_label(field: &str) -> Result<Option<ChunkClass>> {
    if field == "-" {
        return Ok(None);
    }
    match field.parse() {
        Ok(c) => Ok(Some(c)),
        Err(_) => bail!("model: bad unit label {field:?}"),
    }
}

/// Parses a serialized model.
pub fn parse_model(text: &str) -> Result<Model> {
    let mut cur = Cursor::new(text);

    let version = cur.expect(MODEL_MAGIC)?;
    if version != [MODEL_VERSION.to_string().as_str()] {
        bail!("unsupported model version {version:?} (expected {MODEL_VERSION})");
    }
    let system = match cur.expect("system")?.as_slice() {
        [s] => SystemKind::from_str(s).map_err(|e| anyhow::anyhow!(e))?,
        f => bail!("model: bad system line {f:?}"),
    };
    let window: WindowSpec = match cur.expect("window")?.as_slice() {
        [w] => w.parse()?,
        f => bail!("model: bad window line {f:?}"),
    };
    let weights: sombl::WeightScheme = match cur.expect("weights")?.as_slice() {
        [w] => w.parse()?,
        f => bail!("model: bad weights line {f:?}"),
    };

    let enc_fields = cur.expect("encoder")?;
    let [enc_kind, enc_dim] = enc_fields.as_slice() else {
        bail!("model: bad encoder line {enc_fields:?}");
    };
    let dim: usize = parse_num(enc_dim, "encoder dimension")?;
    let encoder = if *enc_kind == "none" {
        None
    } else {
        let kind = match *enc_kind {
            "orth" => EncoderKind::Orthogonal,
            "lex" => EncoderKind::Lexical,
            "file" => EncoderKind::External,
            other => bail!("model: unknown encoder kind {other:?}"),
        };
        let mut table = std::collections::BTreeMap::new();
        while cur.peek_keyword() == Some("tag") {
            let (no, fields) = cur.next()?;
            let tag = *fields
                .get(1)
                .ok_or_else(|| anyhow::anyhow!("model line {no}: tag row without a tag"))?;
            let row: Vec<f64> = fields[2..]
                .iter()
                .map(|f| parse_num(f, "vector component"))
                .collect::<Result<_>>()?;
            if row.len() != dim {
                bail!("model line {no}: tag {tag:?} has {} components, expected {dim}", row.len());
            }
            if table.insert(tag.to_string(), row).is_some() {
                bail!("model line {no}: duplicate tag {tag:?}");
            }
        }
        Some(Encoder::new(kind, dim, table))
    };

    let inst_header = cur.expect("instances")?;
    let [count, width] = inst_header.as_slice() else {
        bail!("model: bad instances line {inst_header:?}");
    };
    let count: usize = parse_num(count, "instance count")?;
    let width: usize = parse_num(width, "window width")?;
    if width != window.width() {
        bail!("model: instance width {width} does not match window {window}");
    }
    let mut instances = Vec::with_capacity(count);
    for _ in 0..count {
        let fields = cur.expect("inst")?;
        if fields.len() != width + 3 {
            bail!("model: instance row has {} fields, expected {}", fields.len(), width + 3);
        }
        let tags: Vec<Tag> = fields[..width].iter().map(|t| Tag::parse(t)).collect();
        let b: u64 = parse_num(fields[width], "frequency")?;
        let i: u64 = parse_num(fields[width + 1], "frequency")?;
        let o: u64 = parse_num(fields[width + 2], "frequency")?;
        instances.push(Instance { tags, freqs: ClassFreqs::new(b, i, o) });
    }
    let base = MemoryBase::new(window, instances)?.with_scheme(weights)?;
    if base.len() != count {
        bail!("model: {count} instance rows collapse to {} distinct windows", base.len());
    }

    let map_fields = cur.expect("map")?;
    let [rows, cols] = map_fields.as_slice() else {
        bail!("model: bad map line {map_fields:?}");
    };
    let rows: usize = parse_num(rows, "map rows")?;
    let cols: usize = parse_num(cols, "map cols")?;
    let map = if rows == 0 && cols == 0 {
        None
    } else {
        let wdim = encoder
            .as_ref()
            .map(|e| e.dim() * window.width())
            .ok_or_else(|| anyhow::anyhow!("model: map present but no encoder"))?;
        let mut units = Vec::new();
        while cur.peek_keyword() == Some("unit") {
            let (no, fields) = cur.next()?;
            let rest = &fields[1..];
            if rest.len() < 3 + wdim + 1 {
                bail!("model line {no}: short unit row");
            }
            let row: usize = parse_num(rest[0], "unit row")?;
            let col: usize = parse_num(rest[1], "unit col")?;
            let label = parse_label(rest[2])?;
            let weights: Vec<f64> = rest[3..3 + wdim]
                .iter()
                .map(|f| parse_num(f, "unit weight"))
                .collect::<Result<_>>()?;
            if rest.get(3 + wdim) != Some(&"|") {
                bail!("model line {no}: unit row missing item separator");
            }
            let items: Vec<usize> = rest[3 + wdim + 1..]
                .iter()
                .map(|f| parse_num(f, "item index"))
                .collect::<Result<_>>()?;
            for &item in &items {
                if item >= base.len() {
                    bail!("model line {no}: item index {item} out of range");
                }
            }
            units.push(SomUnit { row, col, weights, label, items });
        }
        Some(SomMap::from_units(rows, cols, units))
    };

    let end = cur.expect("end")?;
    if !end.is_empty() {
        bail!("model: trailing fields after `end`");
    }

    Ok(Model { system, base, encoder, map })
}

pub fn read_model(path: &Path) -> Result<Model> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("reading model {}", path.display()))?;
    parse_model(&text).with_context(|| format!("in model {}", path.display()))
}
