#ifndef MUTUAL_REVIEW_H
#define MUTUAL_REVIEW_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/*
 Result codes.
 */
enum MrStatus
#if defined(__cplusplus) || __STDC_VERSION__ >= 202311L
  : int32_t
#endif // defined(__cplusplus) || __STDC_VERSION__ >= 202311L
 {
  MR_STATUS_OK = 0,
  MR_STATUS_NULL_POINTER = 1,
  MR_STATUS_INVALID_ARGUMENT = 2,
  MR_STATUS_SAMPLING_EXHAUSTED = 3,
  MR_STATUS_BUFFER_TOO_SMALL = 4,
  MR_STATUS_PANIC = 5,
};
#ifndef __cplusplus
#if __STDC_VERSION__ >= 202311L
typedef enum MrStatus MrStatus;
#else
typedef int32_t MrStatus;
#endif // __STDC_VERSION__ >= 202311L
#endif // __cplusplus

/*
 Which closed-form utility [`mr_utility`] evaluates.
 */
enum MrUtility
#if defined(__cplusplus) || __STDC_VERSION__ >= 202311L
  : int32_t
#endif // defined(__cplusplus) || __STDC_VERSION__ >= 202311L
 {
  MR_UTILITY_TRUTHFUL = 0,
  MR_UTILITY_EVIL = 1,
  MR_UTILITY_EVIL_WITH_BONUS = 2,
};
#ifndef __cplusplus
#if __STDC_VERSION__ >= 202311L
typedef enum MrUtility MrUtility;
#else
typedef int32_t MrUtility;
#endif // __STDC_VERSION__ >= 202311L
#endif // __cplusplus

/*
 Opaque group configuration.
 */
typedef struct MrConfig MrConfig;

/*
 Opaque behavior profile.
 */
typedef struct MrProfile MrProfile;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Library version as a static NUL-terminated string.
 */
const char *mr_version(void);

/*
 Copies the calling thread's last error message into `buf` (always
 NUL-terminated when `len > 0`) and returns the length the full message
 needs including the terminator; 0 if there is no error.

 # Safety
 `buf` must be null or point to `len` writable bytes.
 */
size_t mr_last_error_message(char *buf, size_t len);

/*
 Creates a configuration of `n` proposals, `m` reviews per PI and
 acceptance rate `rate`, with bonuses on and mutual review allowed. Returns
 null (and records the reason) if the values are invalid.
 */
struct MrConfig *mr_config_new(size_t n, size_t m, double rate);

/*
 # Safety
 `cfg` must be null or a handle from [`mr_config_new`] not yet freed.
 */
void mr_config_free(struct MrConfig *cfg);

/*
 # Safety
 `cfg` must be a live handle.
 */
MrStatus mr_config_set_bonus(struct MrConfig *cfg, bool enabled);

/*
 # Safety
 `cfg` must be a live handle.
 */
MrStatus mr_config_set_mutual_review(struct MrConfig *cfg, bool allowed);

/*
 # Safety
 `cfg` must be a live handle.
 */
MrStatus mr_config_set_utility_exponent(struct MrConfig *cfg, double p);

/*
 Number of funded proposals, or 0 for a null handle.

 # Safety
 `cfg` must be null or a live handle.
 */
size_t mr_config_funded_count(const struct MrConfig *cfg);

/*
 Creates a profile in which every PI reviews honestly without noise.
 */
struct MrProfile *mr_profile_new_honest(void);

/*
 # Safety
 `profile` must be null or a handle from [`mr_profile_new_honest`] not yet
 freed.
 */
void mr_profile_free(struct MrProfile *profile);

/*
 Perception noise of every reviewer without an individual setting.

 # Safety
 `profile` must be a live handle.
 */
MrStatus mr_profile_set_noise(struct MrProfile *profile, double sigma);

/*
 The PI with merit `who` submits reversed rankings.

 # Safety
 `profile` must be a live handle.
 */
MrStatus mr_profile_set_reverse(struct MrProfile *profile, size_t who);

/*
 The PI with merit `who` reviews honestly with its own noise `sigma`.

 # Safety
 `profile` must be a live handle.
 */
MrStatus mr_profile_set_noisy(struct MrProfile *profile, size_t who, double sigma);

/*
 `from` gives `to` the top score and reverse-scores the rest of its pile.

 # Safety
 `profile` must be a live handle.
 */
MrStatus mr_profile_set_one_sided_favor(struct MrProfile *profile, size_t from, size_t to);

/*
 `a` and `b` give each other the top score and review the rest honestly.

 # Safety
 `profile` must be a live handle.
 */
MrStatus mr_profile_set_reciprocal_pair(struct MrProfile *profile, size_t a, size_t b);

/*
 Marks `len` proposals as controversial: each reviewer perceives them
 `shift` above (with probability `plus_probability`) or below their merit.

 # Safety
 `profile` must be a live handle; `merits` must point to `len` values.
 */
MrStatus mr_profile_set_controversy(struct MrProfile *profile,
                                    const size_t *merits,
                                    size_t len,
                                    double shift,
                                    double plus_probability);

/*
 Estimates each proposal's funding probability over `replications` runs.
 `probabilities` and `std_errors` must hold at least N values. `workers` of
 0 uses every core.

 # Safety
 Handles must be live; buffers must hold `len` values.
 */
MrStatus mr_run_experiment(const struct MrConfig *cfg,
                           const struct MrProfile *profile,
                           uint64_t replications,
                           uint64_t seed,
                           size_t workers,
                           double *probabilities,
                           double *std_errors,
                           size_t len);

/*
 Estimates the change in funding probability from `base` to `variant`.
 Bonuses follow `base_bonus` / `variant_bonus` rather than the config. When
 `condition_reviewer` and `condition_proposal` are both non-zero only
 assignments in which that reviewer reviews that proposal are counted.
 `paired` reuses the same random draws for both arms.

 # Safety
 Handles must be live; buffers must hold `len` values.
 */
MrStatus mr_delta_experiment(const struct MrConfig *cfg,
                             const struct MrProfile *base,
                             bool base_bonus,
                             const struct MrProfile *variant,
                             bool variant_bonus,
                             size_t condition_reviewer,
                             size_t condition_proposal,
                             uint64_t replications,
                             uint64_t seed,
                             bool paired,
                             size_t workers,
                             double *delta,
                             double *std_errors,
                             size_t len);

/*
 Probability that an honest exact reviewer gives proposal `who` Borda
 score `k`.

 # Safety
 `cfg` must be live; `out` must be writable.
 */
MrStatus mr_borda_pmf(const struct MrConfig *cfg, size_t who, size_t k, double *out);

/*
 Expected MBC of proposal `who` when `reversed` of its reviewers reverse
 their rankings.

 # Safety
 `cfg` must be live; `out` must be writable.
 */
MrStatus mr_expected_mbc(const struct MrConfig *cfg, size_t who, size_t reversed, double *out);

/*
 Closed-form expected utility of PI `who` under the config's group size
 and utility exponent.

 # Safety
 `cfg` must be live; `out` must be writable.
 */
MrStatus mr_utility(const struct MrConfig *cfg, MrUtility kind, size_t who, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* MUTUAL_REVIEW_H */
