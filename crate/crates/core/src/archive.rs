//! Binary archive of encoded images plus a JSON sidecar manifest.
//!
//! All integers are little-endian. The file is a 48-byte header followed by
//! `record_count` records:
//!
//! ```text
//! offset  size  field
//!      0     8  magic "DNAIMAGE"
//!      8     2  version (1)
//!     10     1  code width in bytes (2 when k <= 7, else 4)
//!     11     1  layout (0 hilbert, 1 reshape, 2 snake, 3 diagsnake, 4 flat)
//!     12     1  k
//!     13     1  curve order (0 for flat)
//!     14     2  reserved, zero
//!     16     8  record count
//!     24     4  height
//!     28     4  width
//!     32     4  channels (4^k)
//!     36     4  first kept row of the full grid
//!     40     4  one past the last kept row
//!     44     4  sequence length in bases
//!
//! record: label u32, then height*width codes of `code width` bytes,
//! row-major. The code 4^k marks an empty pixel.
//! ```

use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::curves::{generate_curve, CurveKind, CurveMapping};
use crate::datasets::{Dataset, SourceInfo};
use crate::error::{Error, Result};
use crate::imaging::{encode_sequence, encode_sequence_with, required_order, Layout, Provenance, SequenceImage};
use crate::kmer::{alphabet_size, DnaSequence, MAX_K};

pub const MAGIC: [u8; 8] = *b"DNAIMAGE";
pub const VERSION: u16 = 1;
pub const HEADER_LEN: usize = 48;
pub const FORMAT_NAME: &str = "dnacurve-archive";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ArchiveHeader {
    pub version: u16,
    pub code_width: u8,
    pub provenance: Provenance,
    pub record_count: u64,
    pub height: u32,
    pub width: u32,
}

impl ArchiveHeader {
    pub fn channels(&self) -> u32 {
        alphabet_size(self.provenance.k)
    }

    pub fn sentinel(&self) -> u32 {
        alphabet_size(self.provenance.k)
    }

    fn record_len(&self) -> usize {
        4 + self.height as usize * self.width as usize * self.code_width as usize
    }
}

/// Bytes per stored code for a given k.
pub fn code_width_for(k: usize) -> u8 {
    // the sentinel 4^k must also fit
    if alphabet_size(k) <= u32::from(u16::MAX) {
        2
    } else {
        4
    }
}

fn layout_code(layout: Layout) -> u8 {
    match layout {
        Layout::Curve(CurveKind::Hilbert) => 0,
        Layout::Curve(CurveKind::Reshape) => 1,
        Layout::Curve(CurveKind::Snake) => 2,
        Layout::Curve(CurveKind::DiagSnake) => 3,
        Layout::Flat => 4,
    }
}

fn layout_from_code(code: u8) -> Result<Layout> {
    Ok(match code {
        0 => Layout::Curve(CurveKind::Hilbert),
        1 => Layout::Curve(CurveKind::Reshape),
        2 => Layout::Curve(CurveKind::Snake),
        3 => Layout::Curve(CurveKind::DiagSnake),
        4 => Layout::Flat,
        other => return Err(Error::Archive(format!("unknown layout code {other}"))),
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ArchiveRecord {
    pub label: u32,
    pub image: SequenceImage,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TensorArchive {
    pub header: ArchiveHeader,
    pub records: Vec<ArchiveRecord>,
}

/// JSON sidecar describing an archive.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArchiveManifest {
    pub format: String,
    pub version: u16,
    pub record_count: u64,
    pub height: u32,
    pub width: u32,
    pub channels: u32,
    pub k: usize,
    pub layout: String,
    pub order: u32,
    pub crop_rows: [u32; 2],
    pub sequence_length: usize,
    pub code_width: u8,
    pub sentinel: u32,
    pub class_names: Vec<String>,
    pub ids: Vec<String>,
    pub source: SourceInfo,
    pub split: Option<PathBuf>,
}

/// Path of the manifest belonging to `archive`: the archive path plus `.json`.
pub fn manifest_path(archive: &Path) -> PathBuf {
    let mut s = archive.as_os_str().to_os_string();
    s.push(".json");
    PathBuf::from(s)
}

/// Encodes every record of `dataset`. All sequences must share one length.
/// Records are encoded in parallel; archive order equals input order.
pub fn encode_dataset(dataset: &Dataset, layout: Layout, k: usize) -> Result<TensorArchive> {
    if k == 0 || k > MAX_K {
        return Err(Error::InvalidK { k, max: MAX_K });
    }
    let first = dataset
        .records
        .first()
        .ok_or_else(|| Error::Archive("no records to encode".into()))?;
    let length = first.sequence.len();
    check_uniform_lengths(dataset, length)?;
    if length < k {
        return Err(Error::SequenceTooShort { len: length, k });
    }

    let mapping: Option<CurveMapping> = match layout {
        Layout::Curve(kind) => Some(generate_curve(kind, required_order(length - k + 1))?),
        Layout::Flat => None,
    };
    let records: Vec<ArchiveRecord> = dataset
        .records
        .par_iter()
        .map(|r| {
            let image = match &mapping {
                Some(m) => encode_sequence_with(&r.sequence, k, m)?,
                None => encode_sequence(&r.sequence, k, Layout::Flat)?,
            };
            Ok(ArchiveRecord {
                label: r.label as u32,
                image,
            })
        })
        .collect::<Result<_>>()?;

    let sample = &records[0].image;
    let header = ArchiveHeader {
        version: VERSION,
        code_width: code_width_for(k),
        provenance: *sample.provenance(),
        record_count: records.len() as u64,
        height: sample.height(),
        width: sample.width(),
    };
    debug_assert!(records
        .iter()
        .all(|r| r.image.height() == header.height && r.image.provenance() == sample.provenance()));
    Ok(TensorArchive { header, records })
}

fn check_uniform_lengths(dataset: &Dataset, expected: usize) -> Result<()> {
    const SHOWN: usize = 10;
    let offenders: Vec<String> = dataset
        .records
        .iter()
        .filter(|r| r.sequence.len() != expected)
        .map(|r| format!("{} (length {})", r.id, r.sequence.len()))
        .collect();
    if offenders.is_empty() {
        return Ok(());
    }
    let mut listed = offenders[..offenders.len().min(SHOWN)].join(", ");
    if offenders.len() > SHOWN {
        listed.push_str(&format!(" and {} more", offenders.len() - SHOWN));
    }
    Err(Error::MixedLengths {
        expected,
        offenders: listed,
    })
}

impl TensorArchive {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let h = &self.header;
        let mut out = Vec::with_capacity(HEADER_LEN + self.records.len() * h.record_len());
        out.extend_from_slice(&MAGIC);
        out.extend_from_slice(&h.version.to_le_bytes());
        out.push(h.code_width);
        out.push(layout_code(h.provenance.layout));
        out.push(h.provenance.k as u8);
        out.push(h.provenance.order as u8);
        out.extend_from_slice(&0u16.to_le_bytes());
        out.extend_from_slice(&h.record_count.to_le_bytes());
        out.extend_from_slice(&h.height.to_le_bytes());
        out.extend_from_slice(&h.width.to_le_bytes());
        out.extend_from_slice(&h.channels().to_le_bytes());
        out.extend_from_slice(&h.provenance.crop_start.to_le_bytes());
        out.extend_from_slice(&h.provenance.crop_end.to_le_bytes());
        out.extend_from_slice(&(h.provenance.sequence_len as u32).to_le_bytes());
        debug_assert_eq!(out.len(), HEADER_LEN);
        for r in &self.records {
            out.extend_from_slice(&r.label.to_le_bytes());
            for &code in r.image.pixels() {
                match h.code_width {
                    2 => out.extend_from_slice(&(code as u16).to_le_bytes()),
                    _ => out.extend_from_slice(&code.to_le_bytes()),
                }
            }
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        if bytes.len() < HEADER_LEN {
            return Err(Error::Archive(format!(
                "{} bytes is shorter than the header",
                bytes.len()
            )));
        }
        if bytes[..8] != MAGIC {
            return Err(Error::Archive("bad magic".into()));
        }
        let u16_at = |o: usize| u16::from_le_bytes([bytes[o], bytes[o + 1]]);
        let u32_at = |o: usize| u32::from_le_bytes(bytes[o..o + 4].try_into().unwrap());
        let version = u16_at(8);
        if version != VERSION {
            return Err(Error::Archive(format!("unsupported version {version}")));
        }
        let code_width = bytes[10];
        let layout = layout_from_code(bytes[11])?;
        let k = bytes[12] as usize;
        if k == 0 || k > MAX_K {
            return Err(Error::Archive(format!("invalid k {k}")));
        }
        if code_width != code_width_for(k) {
            return Err(Error::Archive(format!("code width {code_width} does not match k {k}")));
        }
        let provenance = Provenance {
            layout,
            order: u32::from(bytes[13]),
            crop_start: u32_at(36),
            crop_end: u32_at(40),
            k,
            sequence_len: u32_at(44) as usize,
        };
        let header = ArchiveHeader {
            version,
            code_width,
            provenance,
            record_count: u64::from_le_bytes(bytes[16..24].try_into().unwrap()),
            height: u32_at(24),
            width: u32_at(28),
        };
        if u32_at(32) != header.channels() {
            return Err(Error::Archive(format!(
                "channel count {} does not match k {k}",
                u32_at(32)
            )));
        }
        let body = &bytes[HEADER_LEN..];
        let record_len = header.record_len();
        let expected = usize::try_from(header.record_count)
            .ok()
            .and_then(|n| n.checked_mul(record_len))
            .ok_or_else(|| Error::Archive("record count overflows".into()))?;
        if body.len() != expected {
            return Err(Error::Archive(format!(
                "payload is {} bytes, header implies {expected}",
                body.len()
            )));
        }
        let width = code_width as usize;
        let records = body
            .chunks_exact(record_len)
            .map(|chunk| {
                let label = u32::from_le_bytes(chunk[..4].try_into().unwrap());
                let pixels = chunk[4..]
                    .chunks_exact(width)
                    .map(|c| match width {
                        2 => u32::from(u16::from_le_bytes([c[0], c[1]])),
                        _ => u32::from_le_bytes(c.try_into().unwrap()),
                    })
                    .collect();
                let image = SequenceImage::from_parts(provenance, header.height, header.width, pixels)?;
                Ok(ArchiveRecord { label, image })
            })
            .collect::<Result<_>>()?;
        Ok(TensorArchive { header, records })
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_bytes())?;
        Ok(())
    }

    pub fn read(path: &Path) -> Result<Self> {
        Self::from_bytes(&fs::read(path)?)
    }

    fn mapping(&self) -> Result<Option<CurveMapping>> {
        match self.header.provenance.layout {
            Layout::Curve(kind) => Ok(Some(generate_curve(kind, self.header.provenance.order)?)),
            Layout::Flat => Ok(None),
        }
    }

    /// Decodes record `index` back to its (sanitized) sequence.
    pub fn decode_record(&self, index: usize) -> Result<DnaSequence> {
        let record = self.records.get(index).ok_or(Error::IndexOutOfRange {
            index,
            len: self.records.len(),
        })?;
        let codes = match self.mapping()? {
            Some(m) => record.image.recover_codes_with(&m)?,
            None => record.image.recover_codes()?,
        };
        codes.to_sequence()
    }

    /// Decodes every record, in archive order.
    pub fn decode_all(&self) -> Result<Vec<DnaSequence>> {
        let mapping = self.mapping()?;
        self.records
            .par_iter()
            .map(|r| {
                let codes = match &mapping {
                    Some(m) => r.image.recover_codes_with(m)?,
                    None => r.image.recover_codes()?,
                };
                codes.to_sequence()
            })
            .collect()
    }

    /// Occupied pixels over all records divided by total pixels.
    pub fn fill_ratio(&self) -> f64 {
        let cells: usize = self.records.iter().map(|r| r.image.cell_count()).sum();
        if cells == 0 {
            return 0.0;
        }
        let occupied: usize = self.records.iter().map(|r| r.image.occupied()).sum();
        occupied as f64 / cells as f64
    }

    pub fn manifest(&self, dataset: &Dataset, source: &Path, split: Option<&Path>) -> ArchiveManifest {
        let h = &self.header;
        ArchiveManifest {
            format: FORMAT_NAME.to_string(),
            version: h.version,
            record_count: h.record_count,
            height: h.height,
            width: h.width,
            channels: h.channels(),
            k: h.provenance.k,
            layout: h.provenance.layout.to_string(),
            order: h.provenance.order,
            crop_rows: [h.provenance.crop_start, h.provenance.crop_end],
            sequence_length: h.provenance.sequence_len,
            code_width: h.code_width,
            sentinel: h.sentinel(),
            class_names: dataset.class_names.clone(),
            ids: dataset.records.iter().map(|r| r.id.clone()).collect(),
            source: SourceInfo {
                path: source.to_path_buf(),
                records: dataset.len(),
                skipped: dataset.skipped,
                replaced: dataset.replaced_total(),
            },
            split: split.map(Path::to_path_buf),
        }
    }
}

impl ArchiveManifest {
    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::datasets::LabeledRecord;
    use crate::kmer::sanitize;

    fn dataset(seqs: &[&str]) -> Dataset {
        Dataset {
            class_names: vec!["negative".into(), "positive".into()],
            records: seqs
                .iter()
                .enumerate()
                .map(|(i, s)| LabeledRecord {
                    id: format!("r{i}"),
                    sequence: sanitize(s).unwrap().sequence,
                    label: i % 2,
                    replaced: 0,
                })
                .collect(),
            ..Dataset::default()
        }
    }

    #[test]
    fn header_layout_is_fixed() {
        let ds = dataset(&["ACGTACGTAC", "TTTTGGGGCC"]);
        let archive = encode_dataset(&ds, Layout::Curve(CurveKind::Hilbert), 1).unwrap();
        let bytes = archive.to_bytes();
        assert_eq!(&bytes[..8], b"DNAIMAGE");
        assert_eq!(u16::from_le_bytes([bytes[8], bytes[9]]), 1);
        assert_eq!(bytes[10], 2);
        assert_eq!(bytes[11], 0);
        assert_eq!(bytes[12], 1);
        // 10 one-mers need order 2, first 10 Hilbert cells span rows 0..4
        assert_eq!(bytes[13], 2);
        assert_eq!(u64::from_le_bytes(bytes[16..24].try_into().unwrap()), 2);
        assert_eq!(u32::from_le_bytes(bytes[32..36].try_into().unwrap()), 4);
        assert_eq!(u32::from_le_bytes(bytes[44..48].try_into().unwrap()), 10);
        let h = archive.header;
        assert_eq!(bytes.len(), HEADER_LEN + 2 * (4 + (h.height * h.width) as usize * 2));
    }

    #[test]
    fn round_trip_through_bytes() {
        let ds = dataset(&["ACGTACGTACGTAAAC", "TTTTGGGGCCCCAAAA", "GATTACAGATTACAGA"]);
        for layout in [
            Layout::Curve(CurveKind::Hilbert),
            Layout::Curve(CurveKind::DiagSnake),
            Layout::Flat,
        ] {
            for k in [1, 3, 8] {
                let archive = encode_dataset(&ds, layout, k).unwrap();
                let back = TensorArchive::from_bytes(&archive.to_bytes()).unwrap();
                assert_eq!(back, archive);
                let decoded = back.decode_all().unwrap();
                for (d, r) in decoded.iter().zip(&ds.records) {
                    assert_eq!(d, &r.sequence);
                }
                assert_eq!(back.decode_record(1).unwrap(), ds.records[1].sequence);
            }
        }
    }

    #[test]
    fn wide_codes_for_large_k() {
        assert_eq!(code_width_for(7), 2);
        assert_eq!(code_width_for(8), 4);
        let ds = dataset(&["ACGTACGTACGT"]);
        let archive = encode_dataset(&ds, Layout::Flat, 8).unwrap();
        assert_eq!(archive.header.code_width, 4);
        assert_eq!(TensorArchive::from_bytes(&archive.to_bytes()).unwrap(), archive);
    }

    #[test]
    fn mixed_lengths_are_rejected() {
        let ds = dataset(&["ACGTACGT", "ACGTAC", "ACGTACGT", "AC"]);
        match encode_dataset(&ds, Layout::Curve(CurveKind::Snake), 1) {
            Err(Error::MixedLengths { expected: 8, offenders }) => {
                assert_eq!(offenders, "r1 (length 6), r3 (length 2)");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn corrupt_archives_are_rejected() {
        let ds = dataset(&["ACGTACGTAC"]);
        let bytes = encode_dataset(&ds, Layout::Curve(CurveKind::Hilbert), 2)
            .unwrap()
            .to_bytes();
        assert!(TensorArchive::from_bytes(&bytes[..20]).is_err());
        assert!(TensorArchive::from_bytes(&bytes[..bytes.len() - 1]).is_err());
        let mut bad = bytes.clone();
        bad[0] = b'X';
        assert!(TensorArchive::from_bytes(&bad).is_err());
        let mut bad = bytes.clone();
        bad[11] = 9;
        assert!(TensorArchive::from_bytes(&bad).is_err());
        let mut bad = bytes;
        // code above the sentinel in the first pixel
        bad[HEADER_LEN + 4] = 0xff;
        assert!(TensorArchive::from_bytes(&bad).is_err());
    }

    #[test]
    fn empty_dataset_is_an_error() {
        let ds = dataset(&[]);
        assert!(encode_dataset(&ds, Layout::Flat, 1).is_err());
    }

    #[test]
    fn manifest_mirrors_header() {
        let ds = dataset(&["ACGTACGTAC", "TTTTGGGGCC"]);
        let archive = encode_dataset(&ds, Layout::Curve(CurveKind::Hilbert), 1).unwrap();
        let m = archive.manifest(&ds, Path::new("in.tsv"), Some(Path::new("split.json")));
        assert_eq!(m.record_count, 2);
        assert_eq!((m.height, m.width, m.channels), (archive.header.height, 4, 4));
        assert_eq!(m.sentinel, 4);
        assert_eq!(m.layout, "hilbert");
        assert_eq!(m.ids, vec!["r0", "r1"]);
        assert!(m.to_json().unwrap().contains("\"split\": \"split.json\""));
        assert_eq!(manifest_path(Path::new("a/b.dnai")), PathBuf::from("a/b.dnai.json"));
    }
}
