#ifndef QDICKE_H
#define QDICKE_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result code of every fallible call.
typedef enum QdStatus {
  QD_STATUS_OK = 0,
  QD_STATUS_NULL_POINTER = 1,
  QD_STATUS_DOMAIN = 2,
  QD_STATUS_RANGE = 3,
  QD_STATUS_SIZE = 4,
  QD_STATUS_NUMERIC = 5,
  QD_STATUS_CONSISTENCY = 6,
  QD_STATUS_NO_CUSP = 7,
  QD_STATUS_ANNIHILATED = 8,
  QD_STATUS_BUFFER_TOO_SMALL = 9,
  QD_STATUS_INDEX_OUT_OF_RANGE = 10,
  QD_STATUS_PANIC = 11,
} QdStatus;

// Opaque superposition `sum_k alpha_k |N,k>_q`.
typedef struct QdState QdState;

// Opaque result of `qd_lmg_sweep`.
typedef struct QdSweep QdSweep;

// One field point of a sweep. Failed points have `ok == 0` and NaN values.
typedef struct QdSweepRow {
  double h;
  double ground_energy;
  double entropy_bits;
  double gap;
  bool degenerate;
  bool ok;
} QdSweepRow;

// Critical field located on a sweep.
typedef struct QdCusp {
  double h_c;
  double confidence;
  double step;
} QdCusp;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the last failed call on this thread; empty after a success.
//
// The pointer stays valid until the next `qd_*` call on the same thread.
const char *qd_last_error(void);

// Library version as a static NUL-terminated string.
const char *qd_version(void);

// The q-number `[x]` for deformation `q > 0`.
enum QdStatus qd_q_number(double x, double q, double *out);

// `ln [n choose m]_q`; `-inf` outside `0 <= m <= n`.
enum QdStatus qd_ln_q_binomial(int64_t n, int64_t m, double q, double *out);

// Schmidt weights `p_l`, `l = 0..=L`, of `|N,k>_q` across the cut after site `L`.
//
// `out` must hold `capacity >= L + 1` doubles.
enum QdStatus qd_schmidt_spectrum(size_t n,
                                  size_t k,
                                  size_t l,
                                  double q,
                                  double *out,
                                  size_t capacity);

// Entanglement entropy in bits of `|N,k>_q` across the cut after site `L`.
enum QdStatus qd_basis_entropy(size_t n, size_t k, size_t l, double q, double *out);

// Mean-field critical field of the q-LMG model at coupling 1.
enum QdStatus qd_mean_field_hc(size_t n, double q, double *out);

// Copies `len = N + 1` normalized amplitudes into a new state handle.
enum QdStatus qd_state_new(const double *alphas, size_t len, struct QdState **out);

// Releases a state; NULL is ignored.
void qd_state_free(struct QdState *state);

// Number of qubits `N` of a state.
enum QdStatus qd_state_n(const struct QdState *state, size_t *out);

// Entanglement entropy in bits of a state across the cut after site `L`.
enum QdStatus qd_state_entropy(const struct QdState *state, size_t l, double q, double *out);

// Ground-state entropy of the q-LMG model on `steps` evenly spaced fields
// in `[h_min, h_max]`, with cusp detection and one refinement level.
enum QdStatus qd_lmg_sweep(size_t n,
                           size_t l,
                           double q,
                           double h_min,
                           double h_max,
                           size_t steps,
                           double lambda,
                           struct QdSweep **out);

// Releases a sweep; NULL is ignored.
void qd_sweep_free(struct QdSweep *sweep);

// Number of rows in a sweep.
enum QdStatus qd_sweep_len(const struct QdSweep *sweep, size_t *out);

// Row `index` of a sweep, in increasing field order.
enum QdStatus qd_sweep_row(const struct QdSweep *sweep, size_t index, struct QdSweepRow *out);

// The detected cusp, or `QD_STATUS_NO_CUSP` when the curve has none.
enum QdStatus qd_sweep_cusp(const struct QdSweep *sweep, struct QdCusp *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* QDICKE_H */
