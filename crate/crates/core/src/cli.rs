//! Command-line front end. Exit codes: 0 success, 1 usage error, 2 data error.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::analysis::{gamma_table_for, Subject, DEFAULT_LENGTHS};
use crate::archive::{encode_dataset, manifest_path, ArchiveManifest, TensorArchive};
use crate::curves::CurveKind;
use crate::datasets::{convert_fasta, convert_uci_splice, load_canonical, split, Dataset, LoadOptions, Vocabulary};
use crate::error::Error;
use crate::imaging::{Layout, SequenceImage};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DATA: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "dnacurve", version, about = "Encode DNA sequences as k-mer images along space-filling curves")]
pub struct Cli {
    /// Report errors as a JSON object on stderr.
    #[arg(long, global = true)]
    pub json_errors: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Encode a canonical TSV file into a tensor archive.
    Encode(EncodeArgs),
    /// Tabulate the locality measure for curves and lengths.
    Gamma(GammaArgs),
    /// Write a 90/5/5 train/validation/test split manifest.
    Split(SplitArgs),
    /// Show one record of an archive.
    Inspect(InspectArgs),
    /// Convert a raw public dataset format to canonical TSV.
    Convert(ConvertArgs),
}

#[derive(Debug, Args)]
pub struct EncodeArgs {
    /// Canonical TSV (`id<TAB>label<TAB>sequence`).
    pub input: PathBuf,
    #[arg(long, default_value = "hilbert", value_parser = parse_curve)]
    pub curve: CurveKind,
    #[arg(long, default_value_t = 4)]
    pub k: usize,
    /// One row of k-mers instead of a curve image.
    #[arg(long)]
    pub flat: bool,
    #[arg(long)]
    pub out: PathBuf,
    /// Comma-separated class names, in label-index order. Defaults to the
    /// sorted distinct labels of the input.
    #[arg(long, value_delimiter = ',')]
    pub classes: Option<Vec<String>>,
    /// Split manifest to reference from the archive manifest.
    #[arg(long)]
    pub split: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct GammaArgs {
    #[arg(long, value_delimiter = ',', default_values_t = DEFAULT_LENGTHS.to_vec())]
    pub lengths: Vec<usize>,
    /// Curves to evaluate; all four by default.
    #[arg(long, value_delimiter = ',', value_parser = parse_curve)]
    pub curve: Vec<CurveKind>,
    /// Add the unmapped sequence as a baseline row.
    #[arg(long)]
    pub with_sequence: bool,
    /// Write the table as CSV here.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SplitArgs {
    pub input: PathBuf,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct InspectArgs {
    pub archive: PathBuf,
    /// Record index.
    #[arg(default_value_t = 0)]
    pub record: usize,
    /// Canonical TSV the archive was encoded from; the decoded record is
    /// compared against the record at the same index.
    #[arg(long)]
    pub verify: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum RawFormat {
    /// `label, id, sequence` lines.
    UciSplice,
    /// `>id ... label` headers.
    Fasta,
}

#[derive(Debug, Args)]
pub struct ConvertArgs {
    pub input: PathBuf,
    #[arg(long, value_enum)]
    pub from: RawFormat,
    #[arg(long)]
    pub out: PathBuf,
}

fn parse_curve(s: &str) -> Result<CurveKind, String> {
    s.parse()
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Data(Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Data(_) => EXIT_DATA,
        }
    }

    fn kind(&self) -> &'static str {
        match self {
            CliError::Usage(_) => "usage",
            CliError::Data(_) => "data",
        }
    }

    fn message(&self) -> String {
        match self {
            CliError::Usage(m) => m.clone(),
            CliError::Data(e) => e.to_string(),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Data(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Data(e.into())
    }
}

/// Parses `args`, runs the command and returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let json_errors = args.iter().any(|a| a == "--json-errors");
    let cli = match Cli::try_parse_from(&args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(out, "{e}");
                return EXIT_OK;
            }
            let failure = CliError::Usage(e.to_string().trim_end().to_string());
            report(&failure, json_errors, err);
            return failure.exit_code();
        }
    };
    match execute(&cli, out, err) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            report(&e, cli.json_errors, err);
            e.exit_code()
        }
    }
}

fn report(e: &CliError, json: bool, err: &mut dyn Write) {
    if json {
        let value = serde_json::json!({
            "error": { "kind": e.kind(), "code": e.exit_code(), "message": e.message() }
        });
        let _ = writeln!(err, "{value}");
    } else {
        let _ = writeln!(err, "error: {}", e.message());
    }
}

pub fn execute(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), CliError> {
    match &cli.command {
        Command::Encode(a) => cmd_encode(a, out, err),
        Command::Gamma(a) => cmd_gamma(a, out),
        Command::Split(a) => cmd_split(a, out, err),
        Command::Inspect(a) => cmd_inspect(a, out),
        Command::Convert(a) => cmd_convert(a, out),
    }
}

fn load_input(path: &Path, classes: Option<&[String]>, err: &mut dyn Write) -> Result<Dataset, CliError> {
    let vocabulary = match classes {
        Some(names) => Vocabulary::Fixed(names.to_vec()),
        None => Vocabulary::Inferred,
    };
    let dataset = load_canonical(
        path,
        &LoadOptions {
            vocabulary,
            expected_len: None,
        },
    )?;
    for w in &dataset.warnings {
        let _ = writeln!(err, "warning: {w}");
    }
    Ok(dataset)
}

fn percent(part: usize, whole: usize) -> String {
    if part == whole {
        "100%".to_string()
    } else {
        format!("{:.2}%", 100.0 * part as f64 / whole as f64)
    }
}

pub fn cmd_encode(args: &EncodeArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), CliError> {
    if args.k == 0 || args.k > crate::kmer::MAX_K {
        return Err(CliError::Usage(format!(
            "--k must be between 1 and {}",
            crate::kmer::MAX_K
        )));
    }
    let dataset = load_input(&args.input, args.classes.as_deref(), err)?;
    let layout = if args.flat {
        Layout::Flat
    } else {
        Layout::Curve(args.curve)
    };
    let archive = encode_dataset(&dataset, layout, args.k)?;
    archive.write(&args.out)?;
    let manifest = archive.manifest(&dataset, &args.input, args.split.as_deref());
    fs::write(manifest_path(&args.out), manifest.to_json()?)?;

    let h = &archive.header;
    let occupied: usize = archive.records.iter().map(|r| r.image.occupied()).sum();
    let cells: usize = archive.records.iter().map(|r| r.image.cell_count()).sum();
    writeln!(
        out,
        "encoded {} records -> {}\nlayout {} order {}, k={}\ndims {}x{}x{}\nfill ratio {} ({} replaced bases)",
        archive.len(),
        args.out.display(),
        h.provenance.layout,
        h.provenance.order,
        h.provenance.k,
        h.height,
        h.width,
        h.channels(),
        percent(occupied, cells),
        dataset.replaced_total(),
    )?;
    Ok(())
}

pub fn cmd_gamma(args: &GammaArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let kinds = if args.curve.is_empty() {
        CurveKind::ALL.to_vec()
    } else {
        args.curve.clone()
    };
    let mut subjects: Vec<Subject> = kinds.into_iter().map(Subject::from).collect();
    if args.with_sequence {
        subjects.push(Subject::Sequence1D);
    }
    let table = gamma_table_for(&subjects, &args.lengths).map_err(|e| match e {
        Error::NotPowerOfFour(_) | Error::LengthTooSmall(_) => CliError::Usage(e.to_string()),
        other => CliError::Data(other),
    })?;
    write!(out, "{}", table.render_text())?;
    if let Some(path) = &args.out {
        fs::write(path, table.to_csv())?;
        writeln!(out, "wrote {}", path.display())?;
    }
    Ok(())
}

pub fn cmd_split(args: &SplitArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), CliError> {
    let dataset = load_input(&args.input, None, err)?;
    let s = split(dataset.len(), args.seed)?;
    fs::write(&args.out, s.to_json()?)?;
    writeln!(
        out,
        "split {} records (seed {}): train {}, validation {}, test {} -> {}",
        s.total(),
        s.seed,
        s.train.len(),
        s.validation.len(),
        s.test.len(),
        args.out.display()
    )?;
    Ok(())
}

/// ASCII view of an image: `.` for empty pixels, a density ramp keyed on
/// the code for occupied ones.
pub fn render_ascii(image: &SequenceImage) -> String {
    const RAMP: &[u8] = b"-:=+*#%@";
    let sentinel = image.sentinel();
    let mut s = String::with_capacity(image.cell_count() + image.height() as usize);
    for row in image.pixels().chunks(image.width() as usize) {
        for &code in row {
            if code == sentinel {
                s.push('.');
            } else {
                let bucket = (u64::from(code) * RAMP.len() as u64 / u64::from(sentinel)) as usize;
                s.push(RAMP[bucket] as char);
            }
        }
        s.push('\n');
    }
    s
}

pub fn cmd_inspect(args: &InspectArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let archive = TensorArchive::read(&args.archive)?;
    let manifest: Option<ArchiveManifest> = fs::read_to_string(manifest_path(&args.archive))
        .ok()
        .and_then(|text| serde_json::from_str(&text).ok());
    let record = archive.records.get(args.record).ok_or_else(|| {
        CliError::Usage(format!(
            "record {} out of range (archive has {})",
            args.record,
            archive.len()
        ))
    })?;
    let h = &archive.header;
    let image = &record.image;
    let label_name = manifest
        .as_ref()
        .and_then(|m| m.class_names.get(record.label as usize))
        .map(|n| format!(" ({n})"))
        .unwrap_or_default();
    let id = manifest
        .as_ref()
        .and_then(|m| m.ids.get(args.record))
        .map(|id| format!(" id {id}"))
        .unwrap_or_default();

    let mut text = String::new();
    let _ = writeln!(text, "archive {} ({} records)", args.archive.display(), archive.len());
    let _ = writeln!(
        text,
        "layout {} order {}, k={}",
        h.provenance.layout, h.provenance.order, h.provenance.k
    );
    let _ = writeln!(text, "dims {}x{}x{}", h.height, h.width, h.channels());
    let _ = writeln!(text, "crop rows {}..{}", h.provenance.crop_start, h.provenance.crop_end);
    let _ = writeln!(text, "record {}{id}: label {}{label_name}", args.record, record.label);
    let _ = writeln!(
        text,
        "fill {}/{} ({})",
        image.occupied(),
        image.cell_count(),
        percent(image.occupied(), image.cell_count())
    );
    text.push_str(&render_ascii(image));
    let decoded = archive.decode_record(args.record)?;
    let _ = writeln!(text, "sequence {decoded}");
    out.write_all(text.as_bytes())?;

    if let Some(path) = &args.verify {
        let dataset = load_canonical(path, &LoadOptions::default())?;
        let original = dataset.records.get(args.record).ok_or_else(|| {
            CliError::Data(Error::Archive(format!(
                "verification failed: {} has no record {}",
                path.display(),
                args.record
            )))
        })?;
        if original.sequence != decoded {
            let position = original
                .sequence
                .as_bytes()
                .iter()
                .zip(decoded.as_bytes())
                .position(|(a, b)| a != b)
                .unwrap_or_else(|| original.sequence.len().min(decoded.len()));
            return Err(CliError::Data(Error::Archive(format!(
                "verification failed: record {} differs from {} ({}) at base {position}",
                args.record,
                path.display(),
                original.id
            ))));
        }
        writeln!(out, "verify OK: matches {} in {}", original.id, path.display())?;
    }
    Ok(())
}

pub fn cmd_convert(args: &ConvertArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let text = fs::read_to_string(&args.input)?;
    let tsv = match args.from {
        RawFormat::UciSplice => convert_uci_splice(&args.input, &text)?,
        RawFormat::Fasta => convert_fasta(&args.input, &text)?,
    };
    fs::write(&args.out, &tsv)?;
    writeln!(
        out,
        "converted {} records -> {}",
        tsv.lines().count(),
        args.out.display()
    )?;
    Ok(())
}
