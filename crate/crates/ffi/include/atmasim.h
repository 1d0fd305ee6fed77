#ifndef ATMASIM_H
#define ATMASIM_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum AtmaStatus {
  ATMA_STATUS_OK = 0,
  ATMA_STATUS_NULL_POINTER = 1,
  ATMA_STATUS_INVALID_ARGUMENT = 2,
  ATMA_STATUS_INVALID_CONFIG = 3,
  ATMA_STATUS_IO = 4,
  ATMA_STATUS_FORMAT = 5,
  /**
   * The session could not be analysed, or a statistic is undefined.
   */
  ATMA_STATUS_ANALYSIS = 6,
  /**
   * The world reached the exit or its frame cap.
   */
  ATMA_STATUS_FINISHED = 7,
  ATMA_STATUS_PANIC = 8,
} AtmaStatus;

/**
 * Simulated world with its recording; opaque to C.
 */
typedef struct AtmaWorld AtmaWorld;

typedef struct AtmaPositions {
  /**
   * ft to the exit
   */
  double p_e;
  /**
   * follower rear minus ego front, ft
   */
  double p_f;
  /**
   * lead front minus ego rear, ft
   */
  double p_l;
} AtmaPositions;

typedef struct AtmaFrameState {
  uint64_t frame;
  double time_ms;
  double speed_mph;
  uint32_t lane;
  double lateral_offset;
  struct AtmaPositions positions;
} AtmaFrameState;

typedef struct AtmaWelch {
  double t;
  double df;
  /**
   * One-sided p for mean(a) > mean(b).
   */
  double p;
} AtmaWelch;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread; empty if none. The
 * pointer stays valid until the next failing call on the same thread.
 */
const char *atma_last_error(void);

/**
 * Creates a world from configuration text (`key = value` lines; may be
 * empty for defaults). On success `*out` receives the handle.
 *
 * # Safety
 * `config_text` must be a valid C string or null; `out` must be writable.
 */
enum AtmaStatus atma_world_new(const char *config_text, struct AtmaWorld **out);

/**
 * Releases a world. Null is ignored.
 *
 * # Safety
 * `world` must come from [`atma_world_new`] and not be used afterwards.
 */
void atma_world_free(struct AtmaWorld *world);

/**
 * Records one frame under the given pedal and steering inputs (steering
 * positive to the right) and advances the world. `state` may be null.
 *
 * # Safety
 * `world` must be a live handle; `state` must be writable or null.
 */
enum AtmaStatus atma_world_step(struct AtmaWorld *world,
                                double accel,
                                double brake,
                                double steer,
                                struct AtmaFrameState *state);

/**
 * Writes the frames recorded so far as a session file and ends the
 * recording. Later steps return `Finished`; the handle must still be freed.
 *
 * # Safety
 * `world` must be a live handle; `path` a valid C string.
 */
enum AtmaStatus atma_world_write_session(struct AtmaWorld *world, const char *path);

/**
 * Whether `(px, py)` lies in the convex hull of the `n` points `xs`, `ys`
 * (boundary inclusive).
 *
 * # Safety
 * `xs` and `ys` must hold `n` values; `inside` must be writable.
 */
enum AtmaStatus atma_point_in_hull(const double *xs,
                                   const double *ys,
                                   size_t n,
                                   double px,
                                   double py,
                                   bool *inside);

/**
 * One-sided Welch test of mean(a) > mean(b).
 *
 * # Safety
 * `a` and `b` must hold `na` and `nb` values; `out` must be writable.
 */
enum AtmaStatus atma_welch_greater(const double *a,
                                   size_t na,
                                   const double *b,
                                   size_t nb,
                                   struct AtmaWelch *out);

/**
 * Analyses one session file with default parameters and writes the report
 * bundle into `out_dir`.
 *
 * # Safety
 * Both arguments must be valid C strings.
 */
enum AtmaStatus atma_analyze_session(const char *session_path, const char *out_dir);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ATMASIM_H */
