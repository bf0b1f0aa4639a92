/* C interface to the wplang word-problem toolkit. */

#ifndef WPLANG_H
#define WPLANG_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * How an entry point ended.
 */
typedef enum WpStatus {
  WP_STATUS_OK = 0,
  /**
   * A required pointer argument was null.
   */
  WP_STATUS_NULL_ARGUMENT = 1,
  /**
   * A string argument was not valid UTF-8.
   */
  WP_STATUS_INVALID_UTF8 = 2,
  /**
   * Arguments parsed but named nothing usable.
   */
  WP_STATUS_INVALID_ARGUMENT = 3,
  /**
   * The enumeration budget ran out before the slice was exhausted.
   */
  WP_STATUS_BUDGET_EXCEEDED = 4,
  /**
   * The run finished and its verification failed; any output string
   * still carries the diagnostic report.
   */
  WP_STATUS_VERIFICATION_FAILED = 5,
  /**
   * A panic was caught at the boundary.
   */
  WP_STATUS_PANIC = 6,
} WpStatus;

/**
 * Opaque handle to a word-problem oracle.
 */
typedef struct WpOracle WpOracle;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Copies the calling thread's most recent error message; null when the
 * last call succeeded. The caller frees the copy with `wp_string_free`.
 */
char *wp_last_error_message(void);

/**
 * Releases a string returned by this library. Null is ignored.
 *
 * # Safety
 * `s` must have come from this library and not have been freed before.
 */
void wp_string_free(char *s);

/**
 * Builds an oracle from a group description such as `free:2`, `bs12`
 * or `raag:graph.json`; file references resolve against `base_dir`
 * (null means the current directory). Returns null on failure with the
 * reason in `wp_last_error_message`.
 *
 * # Safety
 * `spec` must be a valid C string; `base_dir` must be one or null.
 */
struct WpOracle *wp_oracle_new(const char *spec, const char *base_dir);

/**
 * Releases an oracle handle. Null is ignored.
 *
 * # Safety
 * `oracle` must have come from `wp_oracle_new` and not been freed.
 */
void wp_oracle_free(struct WpOracle *oracle);

/**
 * Returns the oracle's display name as a fresh string.
 *
 * # Safety
 * `oracle` must be a live handle from `wp_oracle_new`.
 */
char *wp_oracle_name(const struct WpOracle *oracle);

/**
 * Decides whether `word` spells the identity, writing the verdict to
 * `verdict_out`.
 *
 * # Safety
 * `oracle` must be a live handle; `word` a valid C string;
 * `verdict_out` a valid pointer.
 */
enum WpStatus wp_oracle_decide(const struct WpOracle *oracle, const char *word, bool *verdict_out);

/**
 * Enumerates identity words matching `pattern` up to `max_len`,
 * projects letter counts through the comma-separated `selectors` and
 * writes the sorted deduplicated points as CSV text to `csv_out`.
 *
 * # Safety
 * `oracle` must be a live handle; `pattern` and `selectors` valid C
 * strings; `csv_out` a valid pointer.
 */
enum WpStatus wp_oracle_slice_csv(const struct WpOracle *oracle,
                                  const char *pattern,
                                  uintptr_t max_len,
                                  const char *selectors,
                                  uint64_t budget,
                                  char **csv_out);

/**
 * Runs a catalogued experiment (`size` zero means its default) and
 * writes the JSON report to `json_out`. A finished run whose own
 * verification failed returns `VerificationFailed` and still writes
 * the report.
 *
 * # Safety
 * `name` must be a valid C string; `json_out` a valid pointer.
 */
enum WpStatus wp_experiment_json(const char *name, uintptr_t size, char **json_out);

/**
 * Classifies the word problem of the graph's right-angled Artin group
 * and writes the verdict JSON to `json_out`.
 *
 * # Safety
 * `graph_json` must be a valid C string; `json_out` a valid pointer.
 */
enum WpStatus wp_graph_classify_json(const char *graph_json, char **json_out);

/**
 * Builds the Schreier diagram of the coset action, rewrites through
 * its transducer (optionally corrupted first when `mutate` is set) and
 * verifies against the group oracle up to `bound`. Writes a JSON
 * report to `json_out`; a failed verification returns
 * `VerificationFailed` with the report still written.
 *
 * # Safety
 * `oracle` must be a live handle; `action_json` a valid C string;
 * `json_out` a valid pointer.
 */
enum WpStatus wp_schreier_verify_json(const struct WpOracle *oracle,
                                      const char *action_json,
                                      uintptr_t bound,
                                      bool mutate,
                                      char **json_out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* WPLANG_H */
