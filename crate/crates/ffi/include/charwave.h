#ifndef CHARWAVE_H
#define CHARWAVE_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/*
 Result code of every fallible call.
 */
typedef enum CwStatus {
  CW_STATUS_OK = 0,
  CW_STATUS_NULL_POINTER = 1,
  CW_STATUS_INVALID_UTF8 = 2,
  /*
   Malformed TOML or invalid problem, window, grid or Picard settings.
   */
  CW_STATUS_CONFIG = 3,
  CW_STATUS_EXPRESSION = 4,
  CW_STATUS_NON_CONVERGENCE = 5,
  CW_STATUS_COVERAGE = 6,
  CW_STATUS_OUT_OF_WINDOW = 7,
  CW_STATUS_IO = 8,
  CW_STATUS_INVALID_ARGUMENT = 9,
  /*
   A Rust panic was caught at the boundary.
   */
  CW_STATUS_PANIC = 10,
} CwStatus;

/*
 Which of the three jump cases the data falls in.
 */
typedef enum CwCase {
  CW_CASE_CONTINUOUS = 0,
  CW_CASE_MIDPOINT_JUMP = 1,
  CW_CASE_GENERAL_JUMP = 2,
} CwCase;

typedef enum CwSide {
  /*
   The characteristic `x = x0 - a t`.
   */
  CW_SIDE_LEFT = 0,
  /*
   The characteristic `x = x0 + a t`.
   */
  CW_SIDE_RIGHT = 1,
} CwSide;

/*
 Opaque solution handle.
 */
typedef struct CwSolution CwSolution;

/*
 Node layout: node `(n, i)` is at `t = n dt`, `x = x0 + i dx`.
 */
typedef struct CwGrid {
  double a;
  double x0;
  double dt;
  double dx;
  size_t nt;
  int64_t i_lo;
  int64_t i_hi;
} CwGrid;

/*
 Solution value and first derivatives at a point.
 */
typedef struct CwPoint {
  double u;
  double ut;
  double ux;
  /*
   1, 2 or 3.
   */
  uint8_t region;
} CwPoint;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Solves the problem described by the TOML configuration `toml` (the same
 format the command line reads). On success `*out` receives a handle to
 be released with `cw_solution_free`; on failure it is set to null.

 # Safety
 `toml` must be a NUL-terminated string and `out` a valid pointer.
 */
enum CwStatus cw_solve_toml(const char *toml, struct CwSolution **out);

/*
 Releases a handle. Null is ignored.

 # Safety
 `sol` must come from `cw_solve_toml` and not have been freed.
 */
void cw_solution_free(struct CwSolution *sol);

/*
 # Safety
 `sol` must be a live handle and `out` a valid pointer.
 */
enum CwStatus cw_solution_grid(const struct CwSolution *sol, struct CwGrid *out);

/*
 Interpolated solution at `(t, x)` inside the window.

 # Safety
 `sol` must be a live handle and `out` a valid pointer.
 */
enum CwStatus cw_evaluate(const struct CwSolution *sol, double t, double x, struct CwPoint *out);

/*
 # Safety
 `sol` must be a live handle and `out` a valid pointer.
 */
enum CwStatus cw_solution_case(const struct CwSolution *sol, enum CwCase *out);

/*
 Measured jump of `u` across one characteristic at time `t > 0`.

 # Safety
 `sol` must be a live handle and `out` a valid pointer.
 */
enum CwStatus cw_jump(const struct CwSolution *sol, double t, enum CwSide side, double *out);

/*
 Runs the solution checks with the default tolerances. `*passed` is
 set either way; the status is `CW_STATUS_OK` unless an argument is bad.

 # Safety
 `sol` must be a live handle and `passed` a valid pointer.
 */
enum CwStatus cw_verify(const struct CwSolution *sol, bool *passed);

/*
 Writes the window nodes as CSV to `path`.

 # Safety
 `sol` must be a live handle and `path` a NUL-terminated string.
 */
enum CwStatus cw_write_csv(const struct CwSolution *sol, const char *path);

/*
 Classifies the data of a TOML configuration without solving.

 # Safety
 `toml` must be a NUL-terminated string and `out` a valid pointer.
 */
enum CwStatus cw_classify_toml(const char *toml, enum CwCase *out);

/*
 Copies the calling thread's last error message into `buf` (truncated,
 always NUL-terminated when `len > 0`) and returns the full length
 without the terminator. Returns 0 when the last call succeeded. `buf`
 may be null to query the length.

 # Safety
 `buf` must be null or point to `len` writable bytes.
 */
size_t cw_last_error_message(char *buf, size_t len);

/*
 Library version as a static NUL-terminated string.
 */
const char *cw_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CHARWAVE_H */
