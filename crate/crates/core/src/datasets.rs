//! Labeled sequence loading and reproducible train/validation/test splits.
//!
//! The canonical on-disk form is one record per line,
//! `id<TAB>label<TAB>sequence`, with `#` starting a comment line.
//! [`convert_uci_splice`] and [`convert_fasta`] produce it from the raw
//! public formats.

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kmer::{sanitize, DnaSequence};

/// Sequence length of the chromatin-occupancy sets.
pub const CHROMATIN_LENGTH: usize = 500;
/// Sequence length the splice set is usually quoted with.
pub const SPLICE_REFERENCE_LENGTH: usize = 61;
pub const CHROMATIN_CLASSES: [&str; 2] = ["negative", "positive"];
pub const SPLICE_CLASSES: [&str; 3] = ["EI", "IE", "N"];

pub const TRAIN_PERCENT: usize = 90;
pub const VALIDATION_PERCENT: usize = 5;
pub const MIN_SPLIT_RECORDS: usize = 20;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LabeledRecord {
    pub id: String,
    pub sequence: DnaSequence,
    /// Index into the dataset's class names.
    pub label: usize,
    /// Ambiguity codes replaced during sanitization.
    pub replaced: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Dataset {
    pub class_names: Vec<String>,
    pub records: Vec<LabeledRecord>,
    /// Records dropped for having the wrong length.
    pub skipped: usize,
    pub warnings: Vec<String>,
}

impl Dataset {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn replaced_total(&self) -> usize {
        self.records.iter().map(|r| r.replaced).sum()
    }

    /// Records per class, indexed like `class_names`.
    pub fn label_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.class_names.len()];
        for r in &self.records {
            counts[r.label] += 1;
        }
        counts
    }
}

/// How labels in the label column are turned into class indices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Vocabulary {
    /// Distinct labels of the file, sorted.
    Inferred,
    Fixed(Vec<String>),
    /// `0/1`, `negative/positive` or `neg/pos`, case-insensitive.
    Binary,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LoadOptions {
    pub vocabulary: Vocabulary,
    /// Records of any other length are skipped with a warning.
    pub expected_len: Option<usize>,
}

impl Default for LoadOptions {
    fn default() -> Self {
        LoadOptions {
            vocabulary: Vocabulary::Inferred,
            expected_len: None,
        }
    }
}

struct RawRecord {
    line: usize,
    id: String,
    label: String,
    sequence: String,
}

fn malformed(path: &Path, line: usize, message: impl Into<String>) -> Error {
    Error::Malformed {
        path: path.to_path_buf(),
        line,
        message: message.into(),
    }
}

fn parse_canonical(path: &Path, text: &str) -> Result<Vec<RawRecord>> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let trimmed = line.trim_end_matches('\r');
        if trimmed.trim().is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = trimmed.split('\t').collect();
        if fields.len() != 3 {
            return Err(malformed(
                path,
                i + 1,
                format!("expected 3 tab-separated fields, found {}", fields.len()),
            ));
        }
        out.push(RawRecord {
            line: i + 1,
            id: fields[0].trim().to_string(),
            label: fields[1].trim().to_string(),
            sequence: fields[2].trim().to_string(),
        });
    }
    Ok(out)
}

fn parse_uci_splice(path: &Path, text: &str) -> Result<Vec<RawRecord>> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != 3 {
            return Err(malformed(
                path,
                i + 1,
                format!("expected label, id, sequence; found {} fields", fields.len()),
            ));
        }
        out.push(RawRecord {
            line: i + 1,
            id: fields[1].to_string(),
            label: fields[0].to_string(),
            sequence: fields[2].to_string(),
        });
    }
    Ok(out)
}

fn binary_label(label: &str) -> Option<usize> {
    match label.to_ascii_lowercase().as_str() {
        "0" | "negative" | "neg" => Some(0),
        "1" | "positive" | "pos" => Some(1),
        _ => None,
    }
}

fn build_dataset(path: &Path, raw: Vec<RawRecord>, options: &LoadOptions) -> Result<Dataset> {
    let class_names: Vec<String> = match &options.vocabulary {
        Vocabulary::Inferred => raw
            .iter()
            .map(|r| r.label.clone())
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect(),
        Vocabulary::Fixed(names) => names.clone(),
        Vocabulary::Binary => CHROMATIN_CLASSES.iter().map(|s| s.to_string()).collect(),
    };
    let mut dataset = Dataset {
        class_names,
        ..Dataset::default()
    };
    for r in raw {
        let label = match options.vocabulary {
            Vocabulary::Binary => binary_label(&r.label),
            _ => dataset.class_names.iter().position(|c| *c == r.label),
        }
        .ok_or_else(|| malformed(path, r.line, format!("unknown label {:?}", r.label)))?;
        let clean = sanitize(&r.sequence).map_err(|e| malformed(path, r.line, e.to_string()))?;
        if let Some(expected) = options.expected_len {
            if clean.sequence.len() != expected {
                dataset.skipped += 1;
                dataset.warnings.push(format!(
                    "{}:{}: record {} has length {}, expected {expected}; skipped",
                    path.display(),
                    r.line,
                    r.id,
                    clean.sequence.len()
                ));
                continue;
            }
        }
        dataset.records.push(LabeledRecord {
            id: r.id,
            sequence: clean.sequence,
            label,
            replaced: clean.replaced,
        });
    }
    if dataset.records.is_empty() {
        dataset
            .warnings
            .push(format!("{}: no records loaded", path.display()));
    }
    Ok(dataset)
}

/// Loads a canonical TSV file.
pub fn load_canonical(path: impl AsRef<Path>, options: &LoadOptions) -> Result<Dataset> {
    let path = path.as_ref();
    let text = fs::read_to_string(path)?;
    build_dataset(path, parse_canonical(path, &text)?, options)
}

/// Loads a chromatin-occupancy set in canonical TSV form: binary labels,
/// 500-base sequences.
pub fn load_chromatin(path: impl AsRef<Path>) -> Result<Dataset> {
    load_chromatin_with(path, Some(CHROMATIN_LENGTH))
}

pub fn load_chromatin_with(path: impl AsRef<Path>, expected_len: Option<usize>) -> Result<Dataset> {
    load_canonical(
        path,
        &LoadOptions {
            vocabulary: Vocabulary::Binary,
            expected_len,
        },
    )
}

/// Loads the UCI splice-junction file (`label, id, sequence` per line).
/// The first record fixes the sequence length; a warning is recorded when it
/// is not 61.
pub fn load_splice(path: impl AsRef<Path>) -> Result<Dataset> {
    let path = path.as_ref();
    let text = fs::read_to_string(path)?;
    let raw = parse_uci_splice(path, &text)?;
    let expected_len = raw.first().map(|r| r.sequence.chars().count());
    let mut dataset = build_dataset(
        path,
        raw,
        &LoadOptions {
            vocabulary: Vocabulary::Fixed(SPLICE_CLASSES.iter().map(|s| s.to_string()).collect()),
            expected_len,
        },
    )?;
    if let Some(len) = expected_len {
        if len != SPLICE_REFERENCE_LENGTH {
            dataset.warnings.push(format!(
                "splice sequences have length {len}, reference length is {SPLICE_REFERENCE_LENGTH}"
            ));
        }
    }
    Ok(dataset)
}

fn write_canonical_line(out: &mut String, id: &str, label: &str, sequence: &str) {
    out.push_str(id);
    out.push('\t');
    out.push_str(label);
    out.push('\t');
    out.push_str(sequence);
    out.push('\n');
}

/// UCI splice text to canonical TSV. Sequences are uppercased but not sanitized.
pub fn convert_uci_splice(path: &Path, text: &str) -> Result<String> {
    let mut out = String::new();
    for r in parse_uci_splice(path, text)? {
        write_canonical_line(&mut out, &r.id, &r.label, &r.sequence.to_ascii_uppercase());
    }
    Ok(out)
}

/// FASTA with headers of the form `>id label` to canonical TSV. Sequence
/// lines are concatenated.
pub fn convert_fasta(path: &Path, text: &str) -> Result<String> {
    let mut out = String::new();
    let mut current: Option<(String, String, String)> = None;
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with(';') {
            continue;
        }
        if let Some(header) = line.strip_prefix('>') {
            if let Some((id, label, seq)) = current.take() {
                write_canonical_line(&mut out, &id, &label, &seq);
            }
            let mut parts = header.split_whitespace();
            let (Some(id), Some(label)) = (parts.next(), parts.last()) else {
                return Err(malformed(path, i + 1, "header needs an id and a label"));
            };
            current = Some((id.to_string(), label.to_string(), String::new()));
        } else {
            match current.as_mut() {
                Some((_, _, seq)) => seq.push_str(&line.to_ascii_uppercase()),
                None => return Err(malformed(path, i + 1, "sequence before first header")),
            }
        }
    }
    if let Some((id, label, seq)) = current {
        write_canonical_line(&mut out, &id, &label, &seq);
    }
    Ok(out)
}

/// SplitMix64. Reference constants: increment `0x9E3779B97F4A7C15`,
/// multipliers `0xBF58476D1CE4E5B9` and `0x94D049BB133111EB`, shifts 30, 27, 31.
/// The state is the seed itself.
#[derive(Clone, Debug)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Integer in `[0, bound)` as the high word of `next_u64() * bound`.
    pub fn below(&mut self, bound: u64) -> u64 {
        ((u128::from(self.next_u64()) * u128::from(bound)) >> 64) as u64
    }
}

/// Fisher-Yates over `0..n`, swapping position `i` (from `n-1` down to 1)
/// with `below(i + 1)`.
pub fn shuffled_indices(n: usize, seed: u64) -> Vec<usize> {
    let mut rng = SplitMix64::new(seed);
    let mut perm: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        let j = rng.below(i as u64 + 1) as usize;
        perm.swap(i, j);
    }
    perm
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DatasetSplit {
    pub seed: u64,
    pub fractions: [f64; 3],
    pub train: Vec<usize>,
    pub validation: Vec<usize>,
    pub test: Vec<usize>,
}

/// Part sizes for `n` records: `floor(0.90 n)`, `floor(0.05 n)`, remainder.
pub fn split_sizes(n: usize) -> (usize, usize, usize) {
    let train = n * TRAIN_PERCENT / 100;
    let validation = n * VALIDATION_PERCENT / 100;
    (train, validation, n - train - validation)
}

/// Shuffles record indices `0..num_records` and cuts them 90/5/5.
pub fn split(num_records: usize, seed: u64) -> Result<DatasetSplit> {
    if num_records < MIN_SPLIT_RECORDS {
        return Err(Error::TooFewRecords {
            got: num_records,
            min: MIN_SPLIT_RECORDS,
        });
    }
    let perm = shuffled_indices(num_records, seed);
    let (train, validation, _) = split_sizes(num_records);
    Ok(DatasetSplit {
        seed,
        fractions: [0.90, 0.05, 0.05],
        train: perm[..train].to_vec(),
        validation: perm[train..train + validation].to_vec(),
        test: perm[train + validation..].to_vec(),
    })
}

impl DatasetSplit {
    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn total(&self) -> usize {
        self.train.len() + self.validation.len() + self.test.len()
    }
}

/// Where a record set came from, for manifests.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SourceInfo {
    pub path: PathBuf,
    pub records: usize,
    pub skipped: usize,
    pub replaced: usize,
}
