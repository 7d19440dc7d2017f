//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each,
//! and exits non-zero if any failed.

use std::path::Path;
use std::time::{Duration, Instant};

use dnacurve::analysis::{curve_distance, gamma_table, seq_distance, Subject};
use dnacurve::archive::{encode_dataset, TensorArchive};
use dnacurve::curves::{generate_curve, CurveKind};
use dnacurve::datasets::{load_canonical, split, split_sizes, Dataset, LabeledRecord, LoadOptions};
use dnacurve::imaging::{crop, layout, required_order, Layout};
use dnacurve::kmer::{sanitize, sequence_to_kmers};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

const GAMMA_LENGTHS: [usize; 5] = [16, 64, 256, 1024, 4096];
// Reference table, in hundredths.
const GAMMA_REFERENCE: [(CurveKind, [i64; 5]); 4] = [
    (CurveKind::Hilbert, [30, 24, 22, 21, 21]),
    (CurveKind::Snake, [28, 20, 17, 16, 16]),
    (CurveKind::Reshape, [22, 18, 16, 16, 15]),
    (CurveKind::DiagSnake, [22, 17, 16, 15, 15]),
];
const GAMMA_TOLERANCE_HUNDREDTHS: i64 = 1;
const GAMMA_TIME_LIMIT: Duration = Duration::from_secs(60);
const DISTANCE_TOLERANCE: f64 = 1e-12;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn gamma_table_reproduction() -> Outcome {
    let start = Instant::now();
    let table = gamma_table(&GAMMA_LENGTHS).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    let mut worst = 0;
    for (kind, reference) in GAMMA_REFERENCE {
        for (&length, &want) in GAMMA_LENGTHS.iter().zip(&reference) {
            let got = table.get(Subject::Curve(kind), length).unwrap().gamma;
            let rounded = (got * 100.0).round() as i64;
            let diff = (rounded - want).abs();
            worst = worst.max(diff);
            ensure(diff <= GAMMA_TOLERANCE_HUNDREDTHS, || {
                format!("{kind} at {length}: {got:.4} rounds to 0.{rounded:02}, reference 0.{want:02}")
            })?;
        }
    }
    for &length in &GAMMA_LENGTHS {
        let hilbert = table.get(Subject::Curve(CurveKind::Hilbert), length).unwrap().gamma;
        for kind in [CurveKind::Snake, CurveKind::Reshape, CurveKind::DiagSnake] {
            let other = table.get(Subject::Curve(kind), length).unwrap().gamma;
            ensure(hilbert > other, || {
                format!("hilbert {hilbert:.4} not above {kind} {other:.4} at {length}")
            })?;
        }
    }
    ensure(elapsed < GAMMA_TIME_LIMIT, || format!("took {elapsed:?}"))?;
    Ok(format!(
        "20 cells within {GAMMA_TOLERANCE_HUNDREDTHS}/100 (worst {worst}/100), hilbert maximal, {:.2}s",
        elapsed.as_secs_f64()
    ))
}

fn worked_distances() -> Outcome {
    let seq = seq_distance(0, 15).map_err(|e| e.to_string())?;
    ensure(seq == 15, || format!("sequence distance {seq}"))?;
    let expected = [
        (CurveKind::Reshape, 3.0 * 2f64.sqrt()),
        (CurveKind::DiagSnake, 3.0 * 2f64.sqrt()),
        (CurveKind::Snake, 3.0),
        (CurveKind::Hilbert, 3.0),
    ];
    for (kind, want) in expected {
        let m = generate_curve(kind, 2).map_err(|e| e.to_string())?;
        let got = curve_distance(&m, 0, 15).map_err(|e| e.to_string())?;
        ensure((got - want).abs() <= DISTANCE_TOLERANCE, || {
            format!("{kind}: {got} vs {want}")
        })?;
    }
    Ok("sequence 15, reshape/diagsnake 3*sqrt(2), snake/hilbert 3".into())
}

fn geometry() -> Outcome {
    let seq500 = sanitize(&"GATTACA".repeat(72)[..500]).unwrap().sequence;
    let codes = sequence_to_kmers(&seq500, 4).map_err(|e| e.to_string())?;
    ensure(codes.len() == 497, || format!("{} 4-mers", codes.len()))?;
    let order = required_order(codes.len());
    ensure(order == 5, || format!("order {order}"))?;
    let img = crop(&layout(&codes, CurveKind::Hilbert).map_err(|e| e.to_string())?)
        .map_err(|e| e.to_string())?;
    let dims = (img.height(), img.width(), img.channels());
    ensure(dims == (16, 32, 256), || format!("dims {dims:?}"))?;

    let seq61 = sanitize(&"ACGTTGCA".repeat(8)[..61]).unwrap().sequence;
    let codes = sequence_to_kmers(&seq61, 1).map_err(|e| e.to_string())?;
    let order = required_order(codes.len());
    ensure(order == 3, || format!("splice order {order}"))?;
    let img = crop(&layout(&codes, CurveKind::Hilbert).map_err(|e| e.to_string())?)
        .map_err(|e| e.to_string())?;
    let dims = (img.height(), img.width(), img.channels());
    ensure(dims == (8, 8, 4), || format!("splice dims {dims:?}"))?;
    Ok("500 bp, k=4 -> 497 k-mers, order 5, 16x32x256; 61 bp, k=1 -> order 3, 8x8x4".into())
}

struct Lcg(u64);

impl Lcg {
    fn next(&mut self) -> u64 {
        self.0 = self
            .0
            .wrapping_mul(6364136223846793005)
            .wrapping_add(1442695040888963407);
        self.0 >> 33
    }

    fn below(&mut self, n: u64) -> u64 {
        self.next() % n
    }
}

// Raw sequence with some lowercase and ambiguity codes.
fn random_raw(rng: &mut Lcg, len: usize) -> String {
    const ALPHABET: &[u8] = b"ACGTACGTACGTACGTacgtNRY";
    (0..len)
        .map(|_| ALPHABET[rng.below(ALPHABET.len() as u64) as usize] as char)
        .collect()
}

fn archive_bytes_with_threads(ds: &Dataset, layout: Layout, k: usize, threads: usize) -> Result<Vec<u8>, String> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| e.to_string())?;
    pool.install(|| encode_dataset(ds, layout, k))
        .map(|a| a.to_bytes())
        .map_err(|e| e.to_string())
}

fn round_trip() -> Outcome {
    let mut rng = Lcg(0xD1A6_0005);
    let mut total = 0;
    let mut bytes_total = 0;
    for kind in CurveKind::ALL {
        for k in [1usize, 4] {
            let length = k + rng.below(400) as usize;
            let records: Vec<LabeledRecord> = (0..125)
                .map(|i| {
                    let clean = sanitize(&random_raw(&mut rng, length)).unwrap();
                    LabeledRecord {
                        id: format!("{kind}-{k}-{i}"),
                        sequence: clean.sequence,
                        label: (i % 2) as usize,
                        replaced: clean.replaced,
                    }
                })
                .collect();
            let ds = Dataset {
                class_names: vec!["0".into(), "1".into()],
                records,
                ..Dataset::default()
            };
            let layout = Layout::Curve(kind);
            let bytes = archive_bytes_with_threads(&ds, layout, k, 1)?;
            let decoded = TensorArchive::from_bytes(&bytes)
                .and_then(|a| a.decode_all())
                .map_err(|e| e.to_string())?;
            for (d, r) in decoded.iter().zip(&ds.records) {
                ensure(d.as_bytes() == r.sequence.as_bytes(), || {
                    format!("{} decoded differently", r.id)
                })?;
            }
            ensure(decoded.len() == ds.len(), || "record count changed".into())?;
            for threads in [1, 2, 8] {
                let again = archive_bytes_with_threads(&ds, layout, k, threads)?;
                ensure(again == bytes, || {
                    format!("{kind} k={k}: bytes differ with {threads} threads")
                })?;
            }
            total += ds.len();
            bytes_total += bytes.len();
        }
    }
    Ok(format!(
        "{total} sequences over 4 curves x k in {{1,4}}, {bytes_total} archive bytes, stable across 1/2/8 threads"
    ))
}

fn curve_properties() -> Outcome {
    for kind in CurveKind::ALL {
        for order in 0..=6u32 {
            let m = generate_curve(kind, order).map_err(|e| e.to_string())?;
            let side = m.side() as usize;
            let mut seen = vec![false; side * side];
            for (i, p) in m.points().iter().enumerate() {
                let cell = p.row as usize * side + p.col as usize;
                ensure(!seen[cell], || format!("{kind} order {order}: cell {p} twice"))?;
                seen[cell] = true;
                ensure(m.point_to_index(*p).ok() == Some(i), || {
                    format!("{kind} order {order}: inverse broken at {i}")
                })?;
            }
            ensure(seen.iter().all(|&s| s), || format!("{kind} order {order}: not onto"))?;
            if kind.is_continuous() {
                for (i, w) in m.points().windows(2).enumerate() {
                    ensure(w[0].manhattan(w[1]) == 1, || {
                        format!("{kind} order {order}: step {i} is not a unit move")
                    })?;
                }
            }
        }
    }
    for order in 1..=6u32 {
        let m = generate_curve(CurveKind::Hilbert, order).map_err(|e| e.to_string())?;
        let half_rows = m.side() / 2;
        let half = m.len() / 2;
        ensure(m.points()[..half].iter().all(|p| p.row < half_rows), || {
            format!("order {order}: first half leaves the top rows")
        })?;
        ensure(m.points()[half..].iter().all(|p| p.row >= half_rows), || {
            format!("order {order}: second half enters the top rows")
        })?;
    }
    Ok("bijective at orders 0-6, unit steps for hilbert/snake, hilbert first half = top rows".into())
}

fn splits() -> Outcome {
    let data = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data");
    let ds = load_canonical(data.join("fixture_1000.tsv"), &LoadOptions::default()).map_err(|e| e.to_string())?;
    ensure(ds.len() == 1000, || format!("fixture has {} records", ds.len()))?;
    let s = split(ds.len(), 42).map_err(|e| e.to_string())?;
    let sizes = (s.train.len(), s.validation.len(), s.test.len());
    ensure(sizes == (900, 50, 50), || format!("sizes {sizes:?}"))?;
    for n in [20usize, 21, 39, 999, 14965, 36799] {
        let (t, v, e) = split_sizes(n);
        ensure(t == n * 9 / 10 && v == n / 20 && t + v + e == n, || {
            format!("rounding rule broken for {n}")
        })?;
        let s = split(n, 7).map_err(|e| e.to_string())?;
        let mut all: Vec<usize> = s.train.iter().chain(&s.validation).chain(&s.test).copied().collect();
        all.sort_unstable();
        ensure(all == (0..n).collect::<Vec<_>>(), || format!("not a partition for {n}"))?;
    }
    let again = split(ds.len(), 42).map_err(|e| e.to_string())?;
    ensure(again == s, || "same seed gave a different split".into())?;
    let other = split(ds.len(), 43).map_err(|e| e.to_string())?;
    ensure(other.train != s.train, || "seed change had no effect".into())?;
    let golden = std::fs::read_to_string(data.join("split_seed42.golden.json")).map_err(|e| e.to_string())?;
    let json = s.to_json().map_err(|e| e.to_string())?;
    ensure(json == golden, || "manifest differs from the committed golden file".into())?;
    Ok("900/50/50, rounding rule exact, deterministic, golden manifest byte-identical".into())
}

fn main() {
    let criteria: [Criterion; 6] = [
        ("gamma table reproduction", gamma_table_reproduction),
        ("worked distances", worked_distances),
        ("geometry", geometry),
        ("round-trip", round_trip),
        ("curve properties", curve_properties),
        ("splits", splits),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        match check() {
            Ok(detail) => println!("[PASS] {name}: {detail}"),
            Err(reason) => {
                failed += 1;
                println!("[FAIL] {name}: {reason}");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
