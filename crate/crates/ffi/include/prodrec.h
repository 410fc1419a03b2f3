#ifndef PRODREC_H
#define PRODREC_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum ProdrecMode {
  PRODREC_MODE_SIMPLE = 0,
  PRODREC_MODE_METHOD1 = 1,
  PRODREC_MODE_METHOD2 = 2,
  PRODREC_MODE_IMPLICIT = 3,
} ProdrecMode;

typedef enum ProdrecStatus {
  PRODREC_STATUS_OK = 0,
  PRODREC_STATUS_NULL_ARGUMENT = 1,
  PRODREC_STATUS_INVALID_UTF8 = 2,
  PRODREC_STATUS_IO = 3,
  PRODREC_STATUS_PARSE = 4,
  PRODREC_STATUS_INVALID_DATA = 5,
  PRODREC_STATUS_CONFIG = 6,
  PRODREC_STATUS_NOT_FOUND = 7,
  PRODREC_STATUS_EMPTY = 8,
  PRODREC_STATUS_PANIC = 9,
} ProdrecStatus;

typedef enum ProdrecSource {
  PRODREC_SOURCE_NEIGHBOR = 0,
  PRODREC_SOURCE_RULE = 1,
  PRODREC_SOURCE_POPULARITY = 2,
} ProdrecSource;

/**
 * Opaque handle to a loaded dataset.
 */
typedef struct ProdrecDataset ProdrecDataset;

/**
 * Opaque handle to a ranked recommendation list.
 */
typedef struct ProdrecRecommendations ProdrecRecommendations;

/**
 * Recommender parameters. Start from [`prodrec_config_default`].
 */
typedef struct ProdrecConfig {
  size_t k_neighbors;
  size_t top_n;
  enum ProdrecMode mode;
  double minsup_pct;
  double minconf_pct;
  double exclusion_threshold;
  bool use_rules;
} ProdrecConfig;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

struct ProdrecConfig prodrec_config_default(void);

/**
 * Message for the last failed call on this thread; empty after a success.
 * The pointer stays valid until the next call into the library.
 */
const char *prodrec_last_error_message(void);

/**
 * Loads a dataset. `ratings_path` may be null.
 *
 * # Safety
 * Paths must be null or NUL-terminated strings; `out` must be writable.
 */
enum ProdrecStatus prodrec_dataset_load(const char *transactions_path,
                                        const char *ratings_path,
                                        struct ProdrecDataset **out);

/**
 * # Safety
 * `dataset` must be null or a handle from [`prodrec_dataset_load`], freed once.
 */
void prodrec_dataset_free(struct ProdrecDataset *dataset);

/**
 * # Safety
 * `dataset` must be null or a live handle.
 */
size_t prodrec_dataset_num_users(const struct ProdrecDataset *dataset);

/**
 * # Safety
 * `dataset` must be null or a live handle.
 */
size_t prodrec_dataset_num_items(const struct ProdrecDataset *dataset);

/**
 * # Safety
 * `dataset` must be null or a live handle.
 */
size_t prodrec_dataset_num_transactions(const struct ProdrecDataset *dataset);

/**
 * Recommends for a user of `dataset`. A null `config` means the defaults.
 *
 * # Safety
 * `dataset` must be a live handle, `user` a NUL-terminated string, `config`
 * null or valid, and `out` writable.
 */
enum ProdrecStatus prodrec_recommend(const struct ProdrecDataset *dataset,
                                     const char *user,
                                     const struct ProdrecConfig *config,
                                     struct ProdrecRecommendations **out);

/**
 * Popularity ranking for a user with no history.
 *
 * # Safety
 * As for [`prodrec_recommend`].
 */
enum ProdrecStatus prodrec_recommend_new(const struct ProdrecDataset *dataset,
                                         const struct ProdrecConfig *config,
                                         struct ProdrecRecommendations **out);

/**
 * # Safety
 * `list` must be null or a live handle.
 */
size_t prodrec_recommendations_len(const struct ProdrecRecommendations *list);

/**
 * Item id at `index`, or null when out of range. Borrowed from `list`.
 *
 * # Safety
 * `list` must be null or a live handle.
 */
const char *prodrec_recommendations_item(const struct ProdrecRecommendations *list, size_t index);

/**
 * Score at `index`, or NaN when out of range.
 *
 * # Safety
 * `list` must be null or a live handle.
 */
double prodrec_recommendations_score(const struct ProdrecRecommendations *list, size_t index);

/**
 * Origin of the entry at `index`; out-of-range indices report popularity.
 *
 * # Safety
 * `list` must be null or a live handle.
 */
enum ProdrecSource prodrec_recommendations_source(const struct ProdrecRecommendations *list,
                                                  size_t index);

/**
 * Neighbor id, rule, or `cold-start` for the entry at `index`; null when out
 * of range. Borrowed from `list`.
 *
 * # Safety
 * `list` must be null or a live handle.
 */
const char *prodrec_recommendations_explain(const struct ProdrecRecommendations *list,
                                            size_t index);

/**
 * # Safety
 * `list` must be null or a live handle, freed once.
 */
void prodrec_recommendations_free(struct ProdrecRecommendations *list);

/**
 * Mines association rules and writes them as newline-terminated lines
 * `X => Y, support=σ%, confidence=τ%`. Release `*out` with
 * [`prodrec_string_free`].
 *
 * # Safety
 * `dataset` must be a live handle and `out` writable.
 */
enum ProdrecStatus prodrec_mine_rules(const struct ProdrecDataset *dataset,
                                      double minsup_pct,
                                      double minconf_pct,
                                      char **out);

/**
 * # Safety
 * `s` must be null or a string returned by this library, freed once.
 */
void prodrec_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* PRODREC_H */
