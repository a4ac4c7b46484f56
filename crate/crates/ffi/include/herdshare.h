/* C bindings for the herdshare secret sharing toolkit. */

#ifndef HERDSHARE_H
#define HERDSHARE_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result of an FFI call.
 */
typedef enum HsStatus {
  HS_STATUS_OK = 0,
  /**
   * A required pointer argument was null.
   */
  HS_STATUS_NULL_ARGUMENT = 1,
  /**
   * An argument was malformed (bad UTF-8, bad sizes, bad indices).
   */
  HS_STATUS_INVALID_ARGUMENT = 2,
  /**
   * The access structure is invalid.
   */
  HS_STATUS_INVALID_STRUCTURE = 3,
  /**
   * A fixed secret does not have digest length.
   */
  HS_STATUS_BAD_SECRET_LENGTH = 4,
  /**
   * The participants do not form an authorized subset.
   */
  HS_STATUS_UNAUTHORIZED = 5,
  /**
   * The control area carries no commitments.
   */
  HS_STATUS_COMMITMENTS_ABSENT = 6,
  /**
   * The share does not match its commitment.
   */
  HS_STATUS_VERIFY_FAILED = 7,
  /**
   * JSON parsing or validation failed.
   */
  HS_STATUS_PARSE = 8,
  /**
   * A caller-supplied buffer is too small.
   */
  HS_STATUS_BUFFER_TOO_SMALL = 9,
} HsStatus;

/**
 * Opaque access structure basis.
 */
typedef struct HsBasis HsBasis;

/**
 * Opaque parsed public control area.
 */
typedef struct HsControlArea HsControlArea;

/**
 * Opaque dealer output: shares, secret and the public control area.
 */
typedef struct HsDealer HsDealer;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message describing the most recent failure on this thread. Valid until
 * the next failing call on the same thread.
 */
const char *hs_last_error_message(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *hs_version(void);

/**
 * Frees a string returned by this library. Passing null is a no-op.
 *
 * # Safety
 * `s` must have been returned by a herdshare FFI call and not freed yet.
 */
void hs_string_free(char *s);

/**
 * Builds the `(t+1, n)` threshold basis.
 *
 * # Safety
 * `out` must be a valid pointer to an `HsBasis*` slot.
 */
enum HsStatus hs_basis_threshold(uint16_t t_plus_1, uint16_t n, struct HsBasis **out);

/**
 * Builds a basis from JSON rows (`[[1,2],[1,3]]`) over participants
 * `1..=n`. The rows must already form an antichain.
 *
 * # Safety
 * `json` must be a valid NUL-terminated string and `out` a valid slot.
 */
enum HsStatus hs_basis_from_json(const char *json, uint16_t n, struct HsBasis **out);

/**
 * Number of minimal authorized subsets in the basis.
 *
 * # Safety
 * `basis` must be a live handle from `hs_basis_*`.
 */
uintptr_t hs_basis_len(const struct HsBasis *basis);

/**
 * Frees a basis handle. Passing null is a no-op.
 *
 * # Safety
 * `basis` must be a live handle from `hs_basis_*` (or null) and not freed
 * twice.
 */
void hs_basis_free(struct HsBasis *basis);

/**
 * Deals a SHA-256 scheme over `basis`. `secret` may be null for a random
 * secret (then 32 bytes otherwise); `seed` may be null for system entropy.
 * Commitments are always published. The shares and the secret are zeroized
 * when the handle is freed.
 *
 * # Safety
 * `basis` must be live; `secret`, when non-null, must point to
 * `secret_len` readable bytes; `seed`, when non-null, must be readable;
 * `out` must be a valid slot.
 */
enum HsStatus hs_setup(const struct HsBasis *basis,
                       const uint8_t *secret,
                       uintptr_t secret_len,
                       const uint64_t *seed,
                       struct HsDealer **out);

/**
 * Digest length of the dealer's scheme (share and secret length).
 *
 * # Safety
 * `dealer` must be a live handle from `hs_setup`.
 */
uintptr_t hs_dealer_digest_len(const struct HsDealer *dealer);

/**
 * Number of participants in the dealer's scheme.
 *
 * # Safety
 * `dealer` must be a live handle from `hs_setup`.
 */
uint16_t hs_dealer_participants(const struct HsDealer *dealer);

/**
 * Copies one participant's share into `buf` (which must hold at least
 * `hs_dealer_digest_len` bytes).
 *
 * # Safety
 * `dealer` must be live and `buf` must point to `buf_len` writable bytes.
 */
enum HsStatus hs_dealer_share(const struct HsDealer *dealer,
                              uint16_t participant,
                              uint8_t *buf,
                              uintptr_t buf_len);

/**
 * Copies the dealt secret into `buf` (at least `hs_dealer_digest_len`
 * bytes).
 *
 * # Safety
 * `dealer` must be live and `buf` must point to `buf_len` writable bytes.
 */
enum HsStatus hs_dealer_secret(const struct HsDealer *dealer, uint8_t *buf, uintptr_t buf_len);

/**
 * Serializes the dealer's public control area (with commitments) to JSON.
 * The returned string must be released with `hs_string_free`.
 *
 * # Safety
 * `dealer` must be live and `out` a valid slot.
 */
enum HsStatus hs_dealer_control_area_json(const struct HsDealer *dealer, char **out);

/**
 * Frees a dealer handle, zeroizing shares and secret. Null is a no-op.
 *
 * # Safety
 * `dealer` must come from `hs_setup` and not be freed twice.
 */
void hs_dealer_free(struct HsDealer *dealer);

/**
 * Parses and validates a control area from JSON.
 *
 * # Safety
 * `json` must be a valid NUL-terminated string and `out` a valid slot.
 */
enum HsStatus hs_control_area_from_json(const char *json, struct HsControlArea **out);

/**
 * Digest length recorded in the control area.
 *
 * # Safety
 * `area` must be a live handle from `hs_control_area_from_json`.
 */
uintptr_t hs_control_area_digest_len(const struct HsControlArea *area);

/**
 * Version of the control area (starts at 1, bumped by refresh).
 *
 * # Safety
 * `area` must be a live handle from `hs_control_area_from_json`.
 */
uint32_t hs_control_area_version(const struct HsControlArea *area);

/**
 * Frees a control area handle. Null is a no-op.
 *
 * # Safety
 * `area` must come from `hs_control_area_from_json` and not be freed twice.
 */
void hs_control_area_free(struct HsControlArea *area);

/**
 * Recovers the secret from `count` shares laid out as one concatenated
 * buffer of `count * digest_len` bytes, `participants[i]` owning the i-th
 * slice. Any authorized set works; supersets are reduced to a minimal
 * authorized subset internally. Writes exactly `digest_len` bytes.
 *
 * # Safety
 * `area` must be live; `participants` must point to `count` readable
 * entries; `shares` to `shares_len` readable bytes; `secret_out` to
 * `secret_len` writable bytes.
 */
enum HsStatus hs_recover(const struct HsControlArea *area,
                         const uint16_t *participants,
                         uintptr_t count,
                         const uint8_t *shares,
                         uintptr_t shares_len,
                         uint8_t *secret_out,
                         uintptr_t secret_len);

/**
 * Verifies one share against the control area's commitments. Returns
 * `Ok` when the share matches, `VerifyFailed` when it does not, and
 * `CommitmentsAbsent` when the area carries no commitments.
 *
 * # Safety
 * `area` must be live and `share` must point to `share_len` readable
 * bytes.
 */
enum HsStatus hs_verify_share(const struct HsControlArea *area,
                              uint16_t participant,
                              const uint8_t *share,
                              uintptr_t share_len);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* HERDSHARE_H */
