#ifndef TRILOCK_H
#define TRILOCK_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Attack outcome mirrored into the C ABI.
 */
typedef enum {
  TRILOCK_ATTACK_STATUS_KEY_RECOVERED = 0,
  TRILOCK_ATTACK_STATUS_TIMED_OUT = 1,
  TRILOCK_ATTACK_STATUS_EXHAUSTED_DEPTH = 2,
} TrilockAttackStatus;

/**
 * Result codes shared by all fallible functions.
 */
typedef enum {
  TRILOCK_STATUS_OK = 0,
  TRILOCK_STATUS_NULL_POINTER = 1,
  TRILOCK_STATUS_INVALID_UTF8 = 2,
  TRILOCK_STATUS_PARSE_ERROR = 3,
  TRILOCK_STATUS_INVALID_CONFIG = 4,
  TRILOCK_STATUS_LOCK_FAILED = 5,
  TRILOCK_STATUS_ATTACK_FAILED = 6,
  TRILOCK_STATUS_EVAL_FAILED = 7,
  TRILOCK_STATUS_INTERNAL_ERROR = 8,
} TrilockStatus;

/**
 * Key verification verdict.
 */
typedef enum {
  TRILOCK_VERDICT_EQUIVALENT = 0,
  TRILOCK_VERDICT_BOUNDED_EQUIVALENT = 1,
  TRILOCK_VERDICT_COUNTEREXAMPLE = 2,
} TrilockVerdict;

/**
 * An immutable gate-level sequential circuit.
 */
typedef struct TrilockCircuit TrilockCircuit;

/**
 * A locked circuit together with its locking parameters.
 */
typedef struct TrilockLocked TrilockLocked;

/**
 * Structural counts of a circuit.
 */
typedef struct {
  uint32_t inputs;
  uint32_t outputs;
  uint32_t gates;
  uint32_t flipflops;
} TrilockCircuitInfo;

/**
 * Locking parameters; zero/null fields take their defaults.
 */
typedef struct {
  /**
   * Key cycles devoted to SAT hardening (at least 1).
   */
  uint32_t kappa_s;
  /**
   * Key cycles devoted to corruptibility tuning (0 selects the
   * baseline point-function mode).
   */
  uint32_t kappa_f;
  /**
   * Error-selection fraction in (0, 1).
   */
  double alpha;
  /**
   * Correct key bits grouped per cycle; null derives one from `seed`.
   */
  const char *k_star;
  /**
   * Error-free suffix bits; null derives one from `seed`.
   */
  const char *k_double_star;
  /**
   * Primary outputs driven by the output error handler (minimum 1).
   */
  uint32_t po_invert;
  /**
   * Original registers driven by the state error handler.
   */
  uint32_t ff_invert;
  /**
   * Register pairs to re-encode after locking.
   */
  uint32_t reencode_pairs;
  uint64_t seed;
} TrilockLockOptions;

/**
 * SAT attack outcome summary.
 */
typedef struct {
  TrilockAttackStatus status;
  uint64_t n_dip;
  uint32_t depth_used;
  uint64_t sat_queries;
  double wall_time_s;
  bool bounded_verification;
} TrilockAttackSummary;

/**
 * SCC-level removal-resilience metrics.
 */
typedef struct {
  uint32_t o_sccs;
  uint32_t e_sccs;
  uint32_t m_sccs;
  /**
   * Percentage of registers inside mixed SCCs.
   */
  double p_m;
} TrilockSccReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * The last error message recorded on this thread. The pointer stays
 * valid until the next failing call on the same thread.
 */
const char *trilock_last_error(void);

/**
 * The crate version as a static string; do not free.
 */
const char *trilock_version(void);

/**
 * Releases a string returned by this library.
 *
 * # Safety
 * `s` must have been returned by a `trilock_*` function and not freed
 * before.
 */
void trilock_string_free(char *s);

/**
 * Parses `.bench` text into a circuit handle.
 *
 * # Safety
 * `bench_text` must be a valid NUL-terminated string and `out` a valid
 * pointer.
 */
TrilockStatus trilock_circuit_parse(const char *bench_text, TrilockCircuit **out);

/**
 * Serializes a circuit back to `.bench` text.
 *
 * # Safety
 * `circuit` must be a live handle, `out` a valid pointer.
 */
TrilockStatus trilock_circuit_write(const TrilockCircuit *circuit, char **out);

/**
 * Fills `info` with the circuit's structural counts.
 *
 * # Safety
 * Both pointers must be valid.
 */
TrilockStatus trilock_circuit_info(const TrilockCircuit *circuit, TrilockCircuitInfo *info);

/**
 * # Safety
 * `circuit` must come from this library and not be freed twice.
 */
void trilock_circuit_free(TrilockCircuit *circuit);

/**
 * Locks a circuit; `opts.reencode_pairs > 0` also applies state
 * re-encoding.
 *
 * # Safety
 * `circuit` and `opts` must be valid, `out` a valid pointer.
 */
TrilockStatus trilock_lock(const TrilockCircuit *circuit,
                           const TrilockLockOptions *opts,
                           TrilockLocked **out);

/**
 * Rebuilds a locked-circuit handle from `.bench` text plus its
 * metadata sidecar (as written by `trilock_locked_metadata`).
 *
 * # Safety
 * String arguments must be valid NUL-terminated strings.
 */
TrilockStatus trilock_locked_from_parts(const char *bench_text,
                                        const char *metadata_text,
                                        TrilockLocked **out);

/**
 * The locked netlist as `.bench` text.
 *
 * # Safety
 * `locked` must be a live handle, `out` a valid pointer.
 */
TrilockStatus trilock_locked_bench(const TrilockLocked *locked, char **out);

/**
 * The metadata sidecar text for a locked circuit.
 *
 * # Safety
 * `locked` must be a live handle, `out` a valid pointer.
 */
TrilockStatus trilock_locked_metadata(const TrilockLocked *locked, char **out);

/**
 * The correct key, grouped per cycle.
 *
 * # Safety
 * `locked` must be a live handle, `out` a valid pointer.
 */
TrilockStatus trilock_locked_key(const TrilockLocked *locked, char **out);

/**
 * # Safety
 * `locked` must come from this library and not be freed twice.
 */
void trilock_locked_free(TrilockLocked *locked);

/**
 * Runs the iterative-deepening SAT attack on a bare locked netlist
 * against a black-box oracle.
 *
 * `bstar = 0` starts at depth 1; `timeout_s <= 0` means no budget.
 * On `KEY_RECOVERED`, `out_key` (when non-null) receives the key.
 *
 * # Safety
 * Handles must be live; `summary` must be a valid pointer.
 */
TrilockStatus trilock_attack(const TrilockCircuit *locked_netlist,
                             uint32_t kappa,
                             const TrilockCircuit *oracle,
                             uint32_t b_max,
                             uint32_t bstar,
                             double timeout_s,
                             TrilockAttackSummary *summary,
                             char **out_key);

/**
 * Checks a candidate key against the oracle. `out_depth` receives the
 * counterexample depth (or the bounded-proof depth).
 *
 * # Safety
 * Handles and out-pointers must be valid; `key_text` NUL-terminated.
 */
TrilockStatus trilock_verify_key(const TrilockCircuit *locked_netlist,
                                 uint32_t kappa,
                                 const TrilockCircuit *oracle,
                                 const char *key_text,
                                 TrilockVerdict *verdict,
                                 uint32_t *out_depth);

/**
 * Measures functional corruptibility. `depth = 0` uses `kappa_s`;
 * `samples = 0` runs the exhaustive census (subject to the
 * enumeration bound).
 *
 * # Safety
 * Handles and out-pointers must be valid.
 */
TrilockStatus trilock_eval_fc(const TrilockLocked *locked,
                              const TrilockCircuit *oracle,
                              uint32_t depth,
                              uint64_t samples,
                              uint64_t seed,
                              double *out_fc,
                              double *out_std_error);

/**
 * Closed-form corruptibility prediction for the locked configuration.
 *
 * # Safety
 * Pointers must be valid.
 */
TrilockStatus trilock_predict_fc(const TrilockLocked *locked, double *out_fc);

/**
 * Closed-form SAT-resilience prediction, as a double (values grow
 * beyond 64-bit range quickly).
 *
 * # Safety
 * Pointers must be valid.
 */
TrilockStatus trilock_predict_ndip(const TrilockLocked *locked, double *out_ndip);

/**
 * SCC metrics of the locked netlist (uses the register tags carried by
 * the handle).
 *
 * # Safety
 * Pointers must be valid.
 */
TrilockStatus trilock_scc_report(const TrilockLocked *locked, TrilockSccReport *out);

/**
 * Tseitin CNF of the `(kappa + b)`-unrolled circuit in DIMACS form,
 * with a comment block mapping variables to (net, frame).
 *
 * # Safety
 * Pointers must be valid.
 */
TrilockStatus trilock_export_dimacs(const TrilockCircuit *circuit,
                                    uint32_t b,
                                    uint32_t kappa,
                                    char **out);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* TRILOCK_H */
