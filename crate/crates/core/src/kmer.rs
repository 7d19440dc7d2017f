//! DNA sanitization and overlapping k-mer codes.
//!
//! Bases are numbered A=0, C=1, G=2, T=3 and a k-mer's code is its base-4
//! value with the leftmost base most significant. The code is also the
//! position of the hot entry in the k-mer's one-hot vector of length `4^k`.

use std::fmt;

use crate::error::{Error, Result};

/// Largest supported word length; `4^15` plus the empty-pixel marker still fit a `u32`.
pub const MAX_K: usize = 15;

const BASES: [u8; 4] = *b"ACGT";

/// IUPAC ambiguity codes; each is replaced by `A` during sanitization.
pub const AMBIGUITY_CODES: &[u8] = b"RYSWKMBDHVN";

fn base_code(b: u8) -> Option<u32> {
    match b {
        b'A' => Some(0),
        b'C' => Some(1),
        b'G' => Some(2),
        b'T' => Some(3),
        _ => None,
    }
}

/// A sequence over `{A, C, G, T}` only.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DnaSequence(Vec<u8>);

impl DnaSequence {
    /// Wraps bases that are already clean. Fails on anything outside `ACGT`.
    pub fn new(bases: impl Into<Vec<u8>>) -> Result<Self> {
        let bases = bases.into();
        if let Some(position) = bases.iter().position(|b| base_code(*b).is_none()) {
            return Err(Error::InvalidBase {
                position,
                ch: bases[position] as char,
            });
        }
        Ok(DnaSequence(bases))
    }

    pub fn as_bytes(&self) -> &[u8] {
        &self.0
    }

    pub fn as_str(&self) -> &str {
        // only ACGT bytes are ever stored
        std::str::from_utf8(&self.0).expect("ascii")
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl fmt::Display for DnaSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Sanitized {
    pub sequence: DnaSequence,
    /// How many ambiguity codes were replaced by `A`.
    pub replaced: usize,
}

/// Uppercases `raw` and replaces IUPAC ambiguity codes with `A`.
pub fn sanitize(raw: &str) -> Result<Sanitized> {
    let mut bases = Vec::with_capacity(raw.len());
    let mut replaced = 0;
    for (position, ch) in raw.chars().enumerate() {
        let up = ch.to_ascii_uppercase();
        if !up.is_ascii() {
            return Err(Error::InvalidBase { position, ch });
        }
        let b = up as u8;
        if base_code(b).is_some() {
            bases.push(b);
        } else if AMBIGUITY_CODES.contains(&b) {
            bases.push(b'A');
            replaced += 1;
        } else {
            return Err(Error::InvalidBase { position, ch });
        }
    }
    Ok(Sanitized {
        sequence: DnaSequence(bases),
        replaced,
    })
}

fn check_k(k: usize) -> Result<()> {
    if k == 0 || k > MAX_K {
        return Err(Error::InvalidK { k, max: MAX_K });
    }
    Ok(())
}

/// Number of distinct k-mers, `4^k`.
pub fn alphabet_size(k: usize) -> u32 {
    1u32 << (2 * k)
}

pub fn kmer_to_index(word: &str) -> Result<u32> {
    check_k(word.len())?;
    word.bytes().enumerate().try_fold(0u32, |acc, (position, b)| {
        base_code(b)
            .map(|c| (acc << 2) | c)
            .ok_or(Error::InvalidBase {
                position,
                ch: b as char,
            })
    })
}

pub fn index_to_kmer(code: u32, k: usize) -> Result<String> {
    check_k(k)?;
    if code >= alphabet_size(k) {
        return Err(Error::CodeOutOfRange { code, k });
    }
    Ok((0..k)
        .rev()
        .map(|shift| BASES[((code >> (2 * shift)) & 3) as usize] as char)
        .collect())
}

/// A sequence as its overlapping k-mer codes, stride 1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KmerIndexList {
    k: usize,
    codes: Vec<u32>,
}

impl KmerIndexList {
    /// Validates raw codes against `k`.
    pub fn from_codes(k: usize, codes: Vec<u32>) -> Result<Self> {
        check_k(k)?;
        let limit = alphabet_size(k);
        if let Some(&code) = codes.iter().find(|&&c| c >= limit) {
            return Err(Error::CodeOutOfRange { code, k });
        }
        Ok(KmerIndexList { k, codes })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn codes(&self) -> &[u32] {
        &self.codes
    }

    pub fn len(&self) -> usize {
        self.codes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.codes.is_empty()
    }

    /// Length in bases of the sequence these codes came from.
    pub fn sequence_len(&self) -> usize {
        if self.codes.is_empty() {
            0
        } else {
            self.codes.len() + self.k - 1
        }
    }

    /// Merges the overlapping windows back into the original sequence.
    pub fn to_sequence(&self) -> Result<DnaSequence> {
        let Some((&first, rest)) = self.codes.split_first() else {
            return Ok(DnaSequence(Vec::new()));
        };
        let mask = alphabet_size(self.k - 1) - 1;
        let mut bases = index_to_kmer(first, self.k)?.into_bytes();
        let mut prev = first;
        for (i, &code) in rest.iter().enumerate() {
            if (prev & mask) != (code >> 2) {
                return Err(Error::InconsistentOverlap { position: i + 1 });
            }
            bases.push(BASES[(code & 3) as usize]);
            prev = code;
        }
        Ok(DnaSequence(bases))
    }
}

pub fn sequence_to_kmers(seq: &DnaSequence, k: usize) -> Result<KmerIndexList> {
    check_k(k)?;
    let bases = seq.as_bytes();
    if bases.len() < k {
        return Err(Error::SequenceTooShort {
            len: bases.len(),
            k,
        });
    }
    let mask = alphabet_size(k) - 1;
    let mut codes = Vec::with_capacity(bases.len() - k + 1);
    let mut rolling = 0u32;
    for (i, &b) in bases.iter().enumerate() {
        // DnaSequence guarantees ACGT
        rolling = ((rolling << 2) | base_code(b).unwrap_or(0)) & mask;
        if i + 1 >= k {
            codes.push(rolling);
        }
    }
    Ok(KmerIndexList { k, codes })
}
