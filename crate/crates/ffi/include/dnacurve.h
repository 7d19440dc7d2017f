#ifndef DNACURVE_H
#define DNACURVE_H

/* Generated by cbindgen from crates/ffi. Do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

#define DNACURVE_LAYOUT_HILBERT 0

#define DNACURVE_LAYOUT_RESHAPE 1

#define DNACURVE_LAYOUT_SNAKE 2

#define DNACURVE_LAYOUT_DIAGSNAKE 3

/**
 * Single-row layout; for `dnacurve_gamma` it selects the unmapped sequence.
 */
#define DNACURVE_LAYOUT_FLAT 4

typedef enum DnacurveStatus {
  DNACURVE_STATUS_OK = 0,
  DNACURVE_STATUS_NULL_POINTER = 1,
  DNACURVE_STATUS_INVALID_ARGUMENT = 2,
  DNACURVE_STATUS_OUT_OF_RANGE = 3,
  DNACURVE_STATUS_INVALID_SEQUENCE = 4,
  DNACURVE_STATUS_BUFFER_TOO_SMALL = 5,
  DNACURVE_STATUS_INTERNAL = 99,
} DnacurveStatus;

/**
 * Opaque curve handle.
 */
typedef struct DnacurveCurve DnacurveCurve;

/**
 * Opaque image handle.
 */
typedef struct DnacurveImage DnacurveImage;

typedef struct DnacurveGammaReport {
  double gamma;
  double mean_delta;
  double max_delta;
  uint64_t pair_count;
  size_t length;
} DnacurveGammaReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or NULL. The pointer
 * stays valid until the next failing call on the same thread.
 */
const char *dnacurve_last_error_message(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *dnacurve_version(void);

/**
 * Builds a curve of the given layout id (not FLAT) and order.
 *
 * # Safety
 * `out` must be a valid pointer to writable storage for one handle.
 */
enum DnacurveStatus dnacurve_curve_new(uint32_t kind, uint32_t order, struct DnacurveCurve **out);

/**
 * # Safety
 * `curve` must be NULL or a handle from `dnacurve_curve_new` not yet freed.
 */
void dnacurve_curve_free(struct DnacurveCurve *curve);

/**
 * Number of cells, or 0 for NULL.
 *
 * # Safety
 * `curve` must be NULL or a live handle.
 */
size_t dnacurve_curve_len(const struct DnacurveCurve *curve);

/**
 * Grid side length, or 0 for NULL.
 *
 * # Safety
 * `curve` must be NULL or a live handle.
 */
uint32_t dnacurve_curve_side(const struct DnacurveCurve *curve);

/**
 * # Safety
 * `curve` must be a live handle; `row` and `col` must be writable.
 */
enum DnacurveStatus dnacurve_curve_index_to_point(const struct DnacurveCurve *curve,
                                                  size_t index,
                                                  uint32_t *row,
                                                  uint32_t *col);

/**
 * # Safety
 * `curve` must be a live handle; `index` must be writable.
 */
enum DnacurveStatus dnacurve_curve_point_to_index(const struct DnacurveCurve *curve,
                                                  uint32_t row,
                                                  uint32_t col,
                                                  size_t *index);

/**
 * One-hot channel index of a k-mer made of `A`, `C`, `G`, `T`.
 *
 * # Safety
 * `word` must be a NUL-terminated string; `out` must be writable.
 */
enum DnacurveStatus dnacurve_kmer_to_index(const char *word, uint32_t *out);

/**
 * Smallest curve order whose grid holds `num_kmers` cells.
 */
uint32_t dnacurve_required_order(size_t num_kmers);

/**
 * Sanitizes `sequence`, cuts it into k-mers and lays them out. Curve
 * layouts are cropped to their occupied rows.
 *
 * # Safety
 * `sequence` must be a NUL-terminated string; `out` must be writable.
 */
enum DnacurveStatus dnacurve_encode(const char *sequence,
                                    size_t k,
                                    uint32_t layout,
                                    struct DnacurveImage **out);

/**
 * # Safety
 * `image` must be NULL or a handle from `dnacurve_encode` not yet freed.
 */
void dnacurve_image_free(struct DnacurveImage *image);

/**
 * # Safety
 * `image` must be a live handle; the out pointers must be writable.
 */
enum DnacurveStatus dnacurve_image_dims(const struct DnacurveImage *image,
                                        uint32_t *height,
                                        uint32_t *width,
                                        uint32_t *channels);

/**
 * Rows `[start, end)` of the full curve grid kept after cropping.
 *
 * # Safety
 * `image` must be a live handle; `start` and `end` must be writable.
 */
enum DnacurveStatus dnacurve_image_crop_rows(const struct DnacurveImage *image,
                                             uint32_t *start,
                                             uint32_t *end);

/**
 * Copies the row-major code grid into `buf` (empty pixels hold `4^k`).
 * `*written` receives the pixel count; when `capacity` is too small nothing
 * is copied and `BUFFER_TOO_SMALL` is returned.
 *
 * # Safety
 * `image` must be a live handle, `buf` must hold `capacity` values and
 * `written` must be writable.
 */
enum DnacurveStatus dnacurve_image_codes(const struct DnacurveImage *image,
                                         uint32_t *buf,
                                         size_t capacity,
                                         size_t *written);

/**
 * Decodes the image back to its sequence as a NUL-terminated string.
 * `*written` receives the sequence length excluding the terminator.
 *
 * # Safety
 * `image` must be a live handle, `buf` must hold `capacity` bytes and
 * `written` must be writable.
 */
enum DnacurveStatus dnacurve_image_decode(const struct DnacurveImage *image,
                                          char *buf,
                                          size_t capacity,
                                          size_t *written);

/**
 * Locality measure for `length` elements on a curve layout, or on the bare
 * sequence when `layout` is `DNACURVE_LAYOUT_FLAT`.
 *
 * # Safety
 * `out` must be writable.
 */
enum DnacurveStatus dnacurve_gamma(uint32_t layout, size_t length, struct DnacurveGammaReport *out);

/**
 * Train/validation/test sizes for `num_records` under the 90/5/5 rule.
 *
 * # Safety
 * The out pointers must be writable.
 */
enum DnacurveStatus dnacurve_split_sizes(size_t num_records,
                                         size_t *train,
                                         size_t *validation,
                                         size_t *test);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* DNACURVE_H */
