#ifndef VNSKIT_H
#define VNSKIT_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes for every fallible entry point.
 */
typedef enum VkStatus {
  VK_STATUS_OK = 0,
  VK_STATUS_NULL_ARGUMENT = 1,
  VK_STATUS_INVALID_UTF8 = 2,
  VK_STATUS_IO = 3,
  VK_STATUS_FORMAT = 4,
  VK_STATUS_SHAPE = 5,
  VK_STATUS_UNDEFINED_METRIC = 6,
  VK_STATUS_EMPTY_MASK = 7,
  VK_STATUS_CONFIG = 8,
  VK_STATUS_OTHER = 9,
} VkStatus;

/**
 * Opaque binary mask handle.
 */
typedef struct VkMask VkMask;

/**
 * Opaque soft prediction map handle.
 */
typedef struct VkSoftMap VkSoftMap;

/**
 * Component breakdown of the non-saliency score.
 */
typedef struct VkVnsBreakdown {
  double color_contrast;
  double texture_contrast;
  double c_fb;
  double boundary_clarity;
  double score;
} VkVnsBreakdown;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Loads a binary mask from an 8-bit grayscale PNG or PGM file; a pixel
 * is foreground iff its intensity >= threshold.
 *
 * # Safety
 * `path` must be a NUL-terminated string and `out` a valid pointer; the
 * returned handle must be released with [`vk_mask_free`].
 */
enum VkStatus vk_mask_load(const char *path, uint8_t threshold, struct VkMask **out);

/**
 * Builds a mask from a row-major byte raster (nonzero = foreground).
 *
 * # Safety
 * `bits` must point to `width * height` readable bytes.
 */
enum VkStatus vk_mask_from_bytes(size_t width,
                                 size_t height,
                                 const uint8_t *bits,
                                 struct VkMask **out);

/**
 * # Safety
 * `mask` must be a handle from this library, freed at most once.
 */
void vk_mask_free(struct VkMask *mask);

/**
 * # Safety
 * `mask` must be a live handle from this library.
 */
uint64_t vk_mask_fg_count(const struct VkMask *mask);

/**
 * Loads a soft prediction map from an 8-bit grayscale file (values
 * scaled into [0, 1]).
 *
 * # Safety
 * As [`vk_mask_load`]; release with [`vk_softmap_free`].
 */
enum VkStatus vk_softmap_load(const char *path, struct VkSoftMap **out);

/**
 * Builds a prediction map from row-major doubles, clamped into [0, 1].
 *
 * # Safety
 * `values` must point to `width * height` readable doubles.
 */
enum VkStatus vk_softmap_from_values(size_t width,
                                     size_t height,
                                     const double *values,
                                     struct VkSoftMap **out);

/**
 * # Safety
 * `map` must be a handle from this library, freed at most once.
 */
void vk_softmap_free(struct VkSoftMap *map);

/**
 * Intersection over union; 1.0 when both masks are empty.
 *
 * # Safety
 * All handles must be live and `out` writable.
 */
enum VkStatus vk_iou(const struct VkMask *pred, const struct VkMask *gt, double *out);

/**
 * Boundary IoU at band distance `d` (pixels, >= 1).
 *
 * # Safety
 * As [`vk_iou`].
 */
enum VkStatus vk_boundary_iou(const struct VkMask *pred,
                              const struct VkMask *gt,
                              size_t d,
                              double *out);

/**
 * Mean E-measure over the 256-threshold sweep.
 *
 * # Safety
 * As [`vk_iou`].
 */
enum VkStatus vk_e_measure_mean(const struct VkSoftMap *pred, const struct VkMask *gt, double *out);

/**
 * Weighted F-measure (beta2 is the beta-squared weighting, 1.0 default).
 *
 * # Safety
 * As [`vk_iou`].
 */
enum VkStatus vk_weighted_f_beta(const struct VkSoftMap *pred,
                                 const struct VkMask *gt,
                                 double beta2,
                                 double *out);

/**
 * Non-saliency score of an interleaved 8-bit RGB image against a mask.
 *
 * # Safety
 * `rgb` must point to `width * height * 3` readable bytes; `mask` must
 * be a live handle with matching dimensions.
 */
enum VkStatus vk_vns_score_rgb(size_t width,
                               size_t height,
                               const uint8_t *rgb,
                               const struct VkMask *mask,
                               struct VkVnsBreakdown *out);

/**
 * Message of the most recent failure on this thread. The pointer stays
 * valid until the next failing call on the same thread.
 */
const char *vk_last_error_message(void);

/**
 * Library version as a static string.
 */
const char *vk_version(void);

/**
 * Convenience NULL for language bindings that need an explicit sentinel.
 */
struct VkMask *vk_null_mask(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* VNSKIT_H */
