#ifndef RZMS_H
#define RZMS_H

/* Generated by cbindgen from rzms-ffi; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes returned by every entry point.
 */
typedef enum RzmsStatus {
  RzmsStatus_Ok = 0,
  RzmsStatus_NullArgument = 1,
  RzmsStatus_InvalidArgument = 2,
  RzmsStatus_DecodeError = 3,
  RzmsStatus_BufferTooSmall = 4,
  RzmsStatus_ProtocolError = 5,
  RzmsStatus_VerifyFailed = 6,
  RzmsStatus_EntropyError = 7,
} RzmsStatus;

/**
 * Opaque parameter-set handle.
 */
typedef struct RzmsParams RzmsParams;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Creates the production (128-bit security) parameter set.
 * Free with `rzms_params_free`.
 */
struct RzmsParams *rzms_params_production(void);

/**
 * Creates the tiny test parameter set.
 */
struct RzmsParams *rzms_params_toy(void);

/**
 * Releases a parameter-set handle. Null is a no-op.
 */
void rzms_params_free(struct RzmsParams *params);

/**
 * Length of the seed/digest values used throughout (always 32).
 */
uintptr_t rzms_seed_len(void);

/**
 * Encoded public key length (framed). Zero on a null handle.
 */
uintptr_t rzms_public_key_len(const struct RzmsParams *params);

/**
 * Encoded secret key length (framed). Zero on a null handle.
 */
uintptr_t rzms_secret_key_len(const struct RzmsParams *params);

/**
 * Encoded signature-share length (framed). Zero on a null handle.
 */
uintptr_t rzms_share_len(const struct RzmsParams *params);

/**
 * Encoded final signature length (framed). Zero on a null handle.
 */
uintptr_t rzms_signature_len(const struct RzmsParams *params);

/**
 * Fills `out_rho` (32 bytes) with a fresh shared parameter from system
 * entropy.
 */
enum RzmsStatus rzms_setup(uint8_t *out_rho);

/**
 * Deterministic key generation. `rho` and `signer_seed` are 32 bytes each;
 * the encoded key pair is written to the two caller buffers
 * (`*pk_written`/`*sk_written` receive the exact sizes, which equal
 * `rzms_public_key_len`/`rzms_secret_key_len`).
 */
enum RzmsStatus rzms_keygen(const struct RzmsParams *params,
                            const uint8_t *rho,
                            const uint8_t *signer_seed,
                            uint8_t *pk_buf,
                            uintptr_t pk_cap,
                            uintptr_t *pk_written,
                            uint8_t *sk_buf,
                            uintptr_t sk_cap,
                            uintptr_t *sk_written);

/**
 * Runs the whole multi-party protocol locally over `count` signers whose
 * encoded secret and public keys are given as parallel arrays of buffers,
 * and writes the encoded final signature. `rng_seed` (32 bytes) fixes the
 * signing randomness; pass null for fresh entropy.
 */
enum RzmsStatus rzms_sign(const struct RzmsParams *params,
                          const uint8_t *const *sk_bufs,
                          const uintptr_t *sk_lens,
                          const uint8_t *const *pk_bufs,
                          const uintptr_t *pk_lens,
                          uintptr_t count,
                          const uint8_t *msg,
                          uintptr_t msg_len,
                          const uint8_t *rng_seed,
                          uint8_t *sig_buf,
                          uintptr_t sig_cap,
                          uintptr_t *sig_written);

/**
 * Verifies an encoded signature. Returns Ok when valid, VerifyFailed when
 * the signature does not verify, DecodeError when it does not even parse.
 */
enum RzmsStatus rzms_verify(const struct RzmsParams *params,
                            const uint8_t *rho,
                            const uint8_t *msg,
                            uintptr_t msg_len,
                            const uint8_t *sig,
                            uintptr_t sig_len);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* RZMS_H */
