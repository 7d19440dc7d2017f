//! Laying k-mer codes onto a curve and cropping the result.
//!
//! Images keep one integer per pixel: the k-mer code, or the sentinel `4^k`
//! for an empty pixel. The one-hot tensor is a view computed on demand.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::curves::{generate_curve, CurveKind, CurveMapping, GridPoint};
use crate::error::{Error, Result};
use crate::kmer::{alphabet_size, sequence_to_kmers, DnaSequence, KmerIndexList};

/// How codes are placed on the pixel grid.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Layout {
    Curve(CurveKind),
    /// A single row, codes in sequence order.
    Flat,
}

impl fmt::Display for Layout {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Layout::Curve(kind) => kind.fmt(f),
            Layout::Flat => f.write_str("flat"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub layout: Layout,
    /// Curve order; 0 for flat images.
    pub order: u32,
    /// Rows `[start, end)` of the full grid kept in this image.
    pub crop_start: u32,
    pub crop_end: u32,
    pub k: usize,
    /// Length in bases of the encoded sequence.
    pub sequence_len: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SequenceImage {
    height: u32,
    width: u32,
    provenance: Provenance,
    pixels: Vec<u32>,
}

/// Smallest `n` with `4^n >= num_kmers`.
pub fn required_order(num_kmers: usize) -> u32 {
    let mut order = 0;
    while (1usize << (2 * order)) < num_kmers {
        order += 1;
    }
    order
}

/// Places `codes[i]` at the cell of curve index `i` on a grid of the
/// smallest sufficient order. The result is not cropped.
pub fn layout(codes: &KmerIndexList, kind: CurveKind) -> Result<SequenceImage> {
    let mapping = generate_curve(kind, required_order(codes.len().max(1)))?;
    layout_with(codes, &mapping)
}

/// Like [`layout`], reusing a prebuilt curve. The curve may be larger than
/// strictly required.
pub fn layout_with(codes: &KmerIndexList, mapping: &CurveMapping) -> Result<SequenceImage> {
    if codes.len() > mapping.len() {
        return Err(Error::IndexOutOfRange {
            index: codes.len() - 1,
            len: mapping.len(),
        });
    }
    let side = mapping.side();
    let sentinel = alphabet_size(codes.k());
    let mut pixels = vec![sentinel; mapping.len()];
    for (&code, p) in codes.codes().iter().zip(mapping.points()) {
        pixels[p.row as usize * side as usize + p.col as usize] = code;
    }
    Ok(SequenceImage {
        height: side,
        width: side,
        provenance: Provenance {
            layout: Layout::Curve(mapping.kind()),
            order: mapping.order(),
            crop_start: 0,
            crop_end: side,
            k: codes.k(),
            sequence_len: codes.sequence_len(),
        },
        pixels,
    })
}

/// Keeps the smallest contiguous band of rows holding every occupied pixel.
pub fn crop(img: &SequenceImage) -> Result<SequenceImage> {
    let sentinel = img.sentinel();
    let width = img.width as usize;
    let mut occupied_rows = img
        .pixels
        .chunks(width)
        .enumerate()
        .filter(|(_, row)| row.iter().any(|&c| c != sentinel))
        .map(|(r, _)| r);
    let first = occupied_rows.next().ok_or(Error::EmptyImage)?;
    let last = occupied_rows.next_back().unwrap_or(first);
    let pixels = img.pixels[first * width..(last + 1) * width].to_vec();
    let mut provenance = img.provenance;
    provenance.crop_start = img.provenance.crop_start + first as u32;
    provenance.crop_end = img.provenance.crop_start + last as u32 + 1;
    Ok(SequenceImage {
        height: (last - first + 1) as u32,
        width: img.width,
        provenance,
        pixels,
    })
}

/// One row holding the codes in order, for models that skip the 2D mapping.
pub fn flatten_1d(codes: &KmerIndexList) -> SequenceImage {
    let width = codes.len() as u32;
    SequenceImage {
        height: 1,
        width,
        provenance: Provenance {
            layout: Layout::Flat,
            order: 0,
            crop_start: 0,
            crop_end: 1,
            k: codes.k(),
            sequence_len: codes.sequence_len(),
        },
        pixels: codes.codes().to_vec(),
    }
}

/// Full pipeline for one sequence: k-mers, then a cropped curve image or a flat row.
pub fn encode_sequence(seq: &DnaSequence, k: usize, layout_kind: Layout) -> Result<SequenceImage> {
    let codes = sequence_to_kmers(seq, k)?;
    match layout_kind {
        Layout::Curve(kind) => crop(&layout(&codes, kind)?),
        Layout::Flat => Ok(flatten_1d(&codes)),
    }
}

/// As [`encode_sequence`] for a curve layout, with a shared prebuilt curve.
pub fn encode_sequence_with(
    seq: &DnaSequence,
    k: usize,
    mapping: &CurveMapping,
) -> Result<SequenceImage> {
    let codes = sequence_to_kmers(seq, k)?;
    crop(&layout_with(&codes, mapping)?)
}

impl SequenceImage {
    /// Rebuilds an image from stored parts, checking that they agree.
    pub fn from_parts(
        provenance: Provenance,
        height: u32,
        width: u32,
        pixels: Vec<u32>,
    ) -> Result<Self> {
        let expected = height as usize * width as usize;
        if pixels.len() != expected {
            return Err(Error::PayloadMismatch {
                expected,
                actual: pixels.len(),
            });
        }
        if provenance.k == 0 || provenance.k > crate::kmer::MAX_K {
            return Err(Error::InvalidK {
                k: provenance.k,
                max: crate::kmer::MAX_K,
            });
        }
        let sentinel = alphabet_size(provenance.k);
        if let Some(&code) = pixels.iter().find(|&&c| c > sentinel) {
            return Err(Error::CodeOutOfRange {
                code,
                k: provenance.k,
            });
        }
        if provenance.crop_end < provenance.crop_start
            || provenance.crop_end - provenance.crop_start != height
        {
            return Err(Error::ImageLayout(format!(
                "crop rows {}..{} do not match height {height}",
                provenance.crop_start, provenance.crop_end
            )));
        }
        if let Layout::Curve(_) = provenance.layout {
            let side = 1u64 << provenance.order.min(31);
            if u64::from(width) != side || u64::from(provenance.crop_end) > side {
                return Err(Error::ImageLayout(format!(
                    "{width}-wide image with rows up to {} does not fit an order-{} curve",
                    provenance.crop_end, provenance.order
                )));
            }
        }
        Ok(SequenceImage {
            height,
            width,
            provenance,
            pixels,
        })
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    /// Channels of the one-hot view, `4^k`.
    pub fn channels(&self) -> u32 {
        alphabet_size(self.provenance.k)
    }

    pub fn k(&self) -> usize {
        self.provenance.k
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    /// The empty-pixel marker, `4^k`.
    pub fn sentinel(&self) -> u32 {
        alphabet_size(self.provenance.k)
    }

    /// Row-major codes, sentinel for empty pixels.
    pub fn pixels(&self) -> &[u32] {
        &self.pixels
    }

    pub fn pixel(&self, row: u32, col: u32) -> Option<u32> {
        if row >= self.height || col >= self.width {
            return None;
        }
        Some(self.pixels[row as usize * self.width as usize + col as usize])
    }

    pub fn occupied(&self) -> usize {
        let sentinel = self.sentinel();
        self.pixels.iter().filter(|&&c| c != sentinel).count()
    }

    pub fn cell_count(&self) -> usize {
        self.pixels.len()
    }

    /// Dense `H x W x C` one-hot tensor; empty pixels are all zero.
    pub fn one_hot(&self) -> Vec<u8> {
        let channels = self.channels() as usize;
        let sentinel = self.sentinel();
        let mut out = vec![0u8; self.pixels.len() * channels];
        for (i, &code) in self.pixels.iter().enumerate() {
            if code != sentinel {
                out[i * channels + code as usize] = 1;
            }
        }
        out
    }

    /// Reads the codes back in sequence order, regenerating the curve if needed.
    pub fn recover_codes(&self) -> Result<KmerIndexList> {
        match self.provenance.layout {
            Layout::Flat => self.recover_flat(),
            Layout::Curve(kind) => {
                let mapping = generate_curve(kind, self.provenance.order)?;
                self.recover_codes_with(&mapping)
            }
        }
    }

    /// Reads the codes back through an already built curve.
    pub fn recover_codes_with(&self, mapping: &CurveMapping) -> Result<KmerIndexList> {
        let kind = match self.provenance.layout {
            Layout::Flat => return self.recover_flat(),
            Layout::Curve(kind) => kind,
        };
        if mapping.kind() != kind || mapping.order() != self.provenance.order {
            return Err(Error::ImageLayout(format!(
                "image was laid out on {kind} order {}, got {} order {}",
                self.provenance.order,
                mapping.kind(),
                mapping.order()
            )));
        }
        let sentinel = self.sentinel();
        let occupied = self.occupied();
        let mut codes = vec![sentinel; occupied];
        for (i, &code) in self.pixels.iter().enumerate() {
            if code == sentinel {
                continue;
            }
            let row = self.provenance.crop_start + (i / self.width as usize) as u32;
            let col = (i % self.width as usize) as u32;
            let index = mapping.point_to_index(GridPoint::new(row, col))?;
            match codes.get_mut(index) {
                Some(slot) => *slot = code,
                None => {
                    return Err(Error::ImageLayout(format!(
                        "occupied pixel at curve index {index} beyond the {occupied} filled cells"
                    )))
                }
            }
        }
        KmerIndexList::from_codes(self.provenance.k, codes)
    }

    fn recover_flat(&self) -> Result<KmerIndexList> {
        let sentinel = self.sentinel();
        if self.pixels.contains(&sentinel) {
            return Err(Error::ImageLayout("flat image with empty pixels".into()));
        }
        KmerIndexList::from_codes(self.provenance.k, self.pixels.clone())
    }
}
