//! DNA sequences as k-mer images laid out along space-filling curves.
//!
//! The pipeline is: [`kmer::sanitize`] a raw string, cut it into overlapping
//! k-mer codes with [`kmer::sequence_to_kmers`], place the codes on a curve
//! with [`imaging::layout`] and drop empty rows with [`imaging::crop`].
//! [`archive`] stores batches of images for a training front end, and
//! [`analysis`] measures how well each curve keeps distant positions close.

pub mod analysis;
pub mod archive;
pub mod cli;
pub mod curves;
pub mod datasets;
pub mod error;
pub mod imaging;
pub mod kmer;

pub use analysis::{curve_distance, gamma, gamma_table, seq_distance, GammaReport, GammaTable, Subject};
pub use archive::{encode_dataset, TensorArchive};
pub use curves::{generate_curve, index_to_point, point_to_index, CurveKind, CurveMapping, GridPoint};
pub use datasets::{load_chromatin, load_splice, split, Dataset, DatasetSplit, LabeledRecord};
pub use error::{Error, Result};
pub use imaging::{crop, flatten_1d, layout, required_order, Layout, SequenceImage};
pub use kmer::{kmer_to_index, sanitize, sequence_to_kmers, DnaSequence, KmerIndexList};
