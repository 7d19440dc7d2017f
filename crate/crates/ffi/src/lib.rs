//! C ABI over `dnacurve`.
//!
//! Curves and images cross the boundary as opaque handles that the caller
//! releases with the matching `*_free` function. Every fallible call returns
//! a [`DnacurveStatus`]; on failure a description is available from
//! [`dnacurve_last_error_message`] on the same thread.
//!
//! Layout and curve identifiers are plain `uint32_t` values (the
//! `DNACURVE_LAYOUT_*` constants) so that an out-of-range value from C is an
//! ordinary error instead of an invalid enum.

#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use dnacurve::analysis::{gamma, Subject};
use dnacurve::curves::{generate_curve, CurveKind, CurveMapping, GridPoint};
use dnacurve::datasets::split_sizes;
use dnacurve::imaging::{encode_sequence, required_order, Layout, SequenceImage};
use dnacurve::kmer::{kmer_to_index, sanitize};
use dnacurve::Error;

pub const DNACURVE_LAYOUT_HILBERT: u32 = 0;
pub const DNACURVE_LAYOUT_RESHAPE: u32 = 1;
pub const DNACURVE_LAYOUT_SNAKE: u32 = 2;
pub const DNACURVE_LAYOUT_DIAGSNAKE: u32 = 3;
/// Single-row layout; for `dnacurve_gamma` it selects the unmapped sequence.
pub const DNACURVE_LAYOUT_FLAT: u32 = 4;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DnacurveStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    OutOfRange = 3,
    InvalidSequence = 4,
    BufferTooSmall = 5,
    Internal = 99,
}

/// Opaque curve handle.
pub struct DnacurveCurve(CurveMapping);

/// Opaque image handle.
pub struct DnacurveImage(SequenceImage);

#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct DnacurveGammaReport {
    pub gamma: f64,
    pub mean_delta: f64,
    pub max_delta: f64,
    pub pair_count: u64,
    pub length: usize,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(message: String) {
    let c = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(c));
}

fn fail(status: DnacurveStatus, message: impl Into<String>) -> DnacurveStatus {
    set_last_error(message.into());
    status
}

fn status_for(e: &Error) -> DnacurveStatus {
    match e {
        Error::IndexOutOfRange { .. } | Error::PointOutOfRange { .. } | Error::OrderTooLarge { .. } => {
            DnacurveStatus::OutOfRange
        }
        Error::InvalidBase { .. } | Error::SequenceTooShort { .. } => DnacurveStatus::InvalidSequence,
        _ => DnacurveStatus::InvalidArgument,
    }
}

fn from_error(e: Error) -> DnacurveStatus {
    let status = status_for(&e);
    fail(status, e.to_string())
}

fn guard(body: impl FnOnce() -> DnacurveStatus) -> DnacurveStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(status) => status,
        Err(_) => fail(DnacurveStatus::Internal, "internal panic"),
    }
}

fn layout_from(id: u32) -> Option<Layout> {
    match id {
        DNACURVE_LAYOUT_HILBERT => Some(Layout::Curve(CurveKind::Hilbert)),
        DNACURVE_LAYOUT_RESHAPE => Some(Layout::Curve(CurveKind::Reshape)),
        DNACURVE_LAYOUT_SNAKE => Some(Layout::Curve(CurveKind::Snake)),
        DNACURVE_LAYOUT_DIAGSNAKE => Some(Layout::Curve(CurveKind::DiagSnake)),
        DNACURVE_LAYOUT_FLAT => Some(Layout::Flat),
        _ => None,
    }
}

unsafe fn c_str<'a>(s: *const c_char) -> Result<&'a str, DnacurveStatus> {
    if s.is_null() {
        return Err(fail(DnacurveStatus::NullPointer, "string argument is NULL"));
    }
    CStr::from_ptr(s)
        .to_str()
        .map_err(|_| fail(DnacurveStatus::InvalidArgument, "string is not valid UTF-8"))
}

/// Message for the last failed call on this thread, or NULL. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn dnacurve_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn dnacurve_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Builds a curve of the given layout id (not FLAT) and order.
///
/// # Safety
/// `out` must be a valid pointer to writable storage for one handle.
#[no_mangle]
pub unsafe extern "C" fn dnacurve_curve_new(kind: u32, order: u32, out: *mut *mut DnacurveCurve) -> DnacurveStatus {
    guard(|| {
        if out.is_null() {
            return fail(DnacurveStatus::NullPointer, "out is NULL");
        }
        let Some(Layout::Curve(kind)) = layout_from(kind) else {
            return fail(DnacurveStatus::InvalidArgument, format!("unknown curve id {kind}"));
        };
        match generate_curve(kind, order) {
            Ok(m) => {
                *out = Box::into_raw(Box::new(DnacurveCurve(m)));
                DnacurveStatus::Ok
            }
            Err(e) => from_error(e),
        }
    })
}

/// # Safety
/// `curve` must be NULL or a handle from `dnacurve_curve_new` not yet freed.
#[no_mangle]
pub unsafe extern "C" fn dnacurve_curve_free(curve: *mut DnacurveCurve) {
    if !curve.is_null() {
        drop(Box::from_raw(curve));
    }
}

/// Number of cells, or 0 for NULL.
///
/// # Safety
/// `curve` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn dnacurve_curve_len(curve: *const DnacurveCurve) -> usize {
    curve.as_ref().map_or(0, |c| c.0.len())
}

/// Grid side length, or 0 for NULL.
///
/// # Safety
/// `curve` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn dnacurve_curve_side(curve: *const DnacurveCurve) -> u32 {
    curve.as_ref().map_or(0, |c| c.0.side())
}

/// # Safety
/// `curve` must be a live handle; `row` and `col` must be writable.
#[no_mangle]
pub unsafe extern "C" fn dnacurve_curve_index_to_point(
    curve: *const DnacurveCurve,
    index: usize,
    row: *mut u32,
    col: *mut u32,
) -> DnacurveStatus {
    guard(|| {
        let (Some(c), false, false) = (curve.as_ref(), row.is_null(), col.is_null()) else {
            return fail(DnacurveStatus::NullPointer, "NULL argument");
        };
        match c.0.index_to_point(index) {
            Ok(p) => {
                *row = p.row;
                *col = p.col;
                DnacurveStatus::Ok
            }
            Err(e) => from_error(e),
        }
    })
}

/// # Safety
/// `curve` must be a live handle; `index` must be writable.
#[no_mangle]
pub unsafe extern "C" fn dnacurve_curve_point_to_index(
    curve: *const DnacurveCurve,
    row: u32,
    col: u32,
    index: *mut usize,
) -> DnacurveStatus {
    guard(|| {
        let (Some(c), false) = (curve.as_ref(), index.is_null()) else {
            return fail(DnacurveStatus::NullPointer, "NULL argument");
        };
        match c.0.point_to_index(GridPoint::new(row, col)) {
            Ok(i) => {
                *index = i;
                DnacurveStatus::Ok
            }
            Err(e) => from_error(e),
        }
    })
}

/// One-hot channel index of a k-mer made of `A`, `C`, `G`, `T`.
///
/// # Safety
/// `word` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn dnacurve_kmer_to_index(word: *const c_char, out: *mut u32) -> DnacurveStatus {
    guard(|| {
        if out.is_null() {
            return fail(DnacurveStatus::NullPointer, "out is NULL");
        }
        let word = match c_str(word) {
            Ok(w) => w,
            Err(status) => return status,
        };
        match kmer_to_index(word) {
            Ok(code) => {
                *out = code;
                DnacurveStatus::Ok
            }
            Err(e) => from_error(e),
        }
    })
}

/// Smallest curve order whose grid holds `num_kmers` cells.
#[no_mangle]
pub extern "C" fn dnacurve_required_order(num_kmers: usize) -> u32 {
    required_order(num_kmers)
}

/// Sanitizes `sequence`, cuts it into k-mers and lays them out. Curve
/// layouts are cropped to their occupied rows.
///
/// # Safety
/// `sequence` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn dnacurve_encode(
    sequence: *const c_char,
    k: usize,
    layout: u32,
    out: *mut *mut DnacurveImage,
) -> DnacurveStatus {
    guard(|| {
        if out.is_null() {
            return fail(DnacurveStatus::NullPointer, "out is NULL");
        }
        let raw = match c_str(sequence) {
            Ok(s) => s,
            Err(status) => return status,
        };
        let Some(layout) = layout_from(layout) else {
            return fail(DnacurveStatus::InvalidArgument, format!("unknown layout id {layout}"));
        };
        let result = sanitize(raw).and_then(|clean| encode_sequence(&clean.sequence, k, layout));
        match result {
            Ok(img) => {
                *out = Box::into_raw(Box::new(DnacurveImage(img)));
                DnacurveStatus::Ok
            }
            Err(e) => from_error(e),
        }
    })
}

/// # Safety
/// `image` must be NULL or a handle from `dnacurve_encode` not yet freed.
#[no_mangle]
pub unsafe extern "C" fn dnacurve_image_free(image: *mut DnacurveImage) {
    if !image.is_null() {
        drop(Box::from_raw(image));
    }
}

/// # Safety
/// `image` must be a live handle; the out pointers must be writable.
#[no_mangle]
pub unsafe extern "C" fn dnacurve_image_dims(
    image: *const DnacurveImage,
    height: *mut u32,
    width: *mut u32,
    channels: *mut u32,
) -> DnacurveStatus {
    guard(|| {
        let Some(img) = image.as_ref() else {
            return fail(DnacurveStatus::NullPointer, "image is NULL");
        };
        if height.is_null() || width.is_null() || channels.is_null() {
            return fail(DnacurveStatus::NullPointer, "NULL out pointer");
        }
        *height = img.0.height();
        *width = img.0.width();
        *channels = img.0.channels();
        DnacurveStatus::Ok
    })
}

/// Rows `[start, end)` of the full curve grid kept after cropping.
///
/// # Safety
/// `image` must be a live handle; `start` and `end` must be writable.
#[no_mangle]
pub unsafe extern "C" fn dnacurve_image_crop_rows(
    image: *const DnacurveImage,
    start: *mut u32,
    end: *mut u32,
) -> DnacurveStatus {
    guard(|| {
        let (Some(img), false, false) = (image.as_ref(), start.is_null(), end.is_null()) else {
            return fail(DnacurveStatus::NullPointer, "NULL argument");
        };
        *start = img.0.provenance().crop_start;
        *end = img.0.provenance().crop_end;
        DnacurveStatus::Ok
    })
}

/// Copies the row-major code grid into `buf` (empty pixels hold `4^k`).
/// `*written` receives the pixel count; when `capacity` is too small nothing
/// is copied and `BUFFER_TOO_SMALL` is returned.
///
/// # Safety
/// `image` must be a live handle, `buf` must hold `capacity` values and
/// `written` must be writable.
#[no_mangle]
pub unsafe extern "C" fn dnacurve_image_codes(
    image: *const DnacurveImage,
    buf: *mut u32,
    capacity: usize,
    written: *mut usize,
) -> DnacurveStatus {
    guard(|| {
        let (Some(img), false) = (image.as_ref(), written.is_null()) else {
            return fail(DnacurveStatus::NullPointer, "NULL argument");
        };
        let pixels = img.0.pixels();
        *written = pixels.len();
        if capacity < pixels.len() {
            return fail(
                DnacurveStatus::BufferTooSmall,
                format!("need {} values, buffer holds {capacity}", pixels.len()),
            );
        }
        if buf.is_null() {
            return fail(DnacurveStatus::NullPointer, "buf is NULL");
        }
        ptr::copy_nonoverlapping(pixels.as_ptr(), buf, pixels.len());
        DnacurveStatus::Ok
    })
}

/// Decodes the image back to its sequence as a NUL-terminated string.
/// `*written` receives the sequence length excluding the terminator.
///
/// # Safety
/// `image` must be a live handle, `buf` must hold `capacity` bytes and
/// `written` must be writable.
#[no_mangle]
pub unsafe extern "C" fn dnacurve_image_decode(
    image: *const DnacurveImage,
    buf: *mut c_char,
    capacity: usize,
    written: *mut usize,
) -> DnacurveStatus {
    guard(|| {
        let (Some(img), false) = (image.as_ref(), written.is_null()) else {
            return fail(DnacurveStatus::NullPointer, "NULL argument");
        };
        let seq = match img.0.recover_codes().and_then(|c| c.to_sequence()) {
            Ok(s) => s,
            Err(e) => return from_error(e),
        };
        let bytes = seq.as_bytes();
        *written = bytes.len();
        if capacity < bytes.len() + 1 {
            return fail(
                DnacurveStatus::BufferTooSmall,
                format!("need {} bytes, buffer holds {capacity}", bytes.len() + 1),
            );
        }
        if buf.is_null() {
            return fail(DnacurveStatus::NullPointer, "buf is NULL");
        }
        ptr::copy_nonoverlapping(bytes.as_ptr().cast::<c_char>(), buf, bytes.len());
        *buf.add(bytes.len()) = 0;
        DnacurveStatus::Ok
    })
}

/// Locality measure for `length` elements on a curve layout, or on the bare
/// sequence when `layout` is `DNACURVE_LAYOUT_FLAT`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn dnacurve_gamma(layout: u32, length: usize, out: *mut DnacurveGammaReport) -> DnacurveStatus {
    guard(|| {
        if out.is_null() {
            return fail(DnacurveStatus::NullPointer, "out is NULL");
        }
        let subject = match layout_from(layout) {
            Some(Layout::Curve(kind)) => Subject::Curve(kind),
            Some(Layout::Flat) => Subject::Sequence1D,
            None => return fail(DnacurveStatus::InvalidArgument, format!("unknown layout id {layout}")),
        };
        match gamma(subject, length) {
            Ok(r) => {
                *out = DnacurveGammaReport {
                    gamma: r.gamma,
                    mean_delta: r.mean_delta,
                    max_delta: r.max_delta,
                    pair_count: r.pair_count,
                    length: r.length,
                };
                DnacurveStatus::Ok
            }
            Err(e) => from_error(e),
        }
    })
}

/// Train/validation/test sizes for `num_records` under the 90/5/5 rule.
///
/// # Safety
/// The out pointers must be writable.
#[no_mangle]
pub unsafe extern "C" fn dnacurve_split_sizes(
    num_records: usize,
    train: *mut usize,
    validation: *mut usize,
    test: *mut usize,
) -> DnacurveStatus {
    if train.is_null() || validation.is_null() || test.is_null() {
        return fail(DnacurveStatus::NullPointer, "NULL out pointer");
    }
    let (t, v, e) = split_sizes(num_records);
    *train = t;
    *validation = v;
    *test = e;
    DnacurveStatus::Ok
}
