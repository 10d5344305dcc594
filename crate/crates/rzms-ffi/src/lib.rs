//! C ABI for the multi-signature scheme.
//!
//! Conventions:
//! - The parameter set is the one opaque handle (`RzmsParams*`); everything
//!   else crosses the boundary as encoded wire bytes in caller-owned buffers.
//! - Every function returns an `RzmsStatus`; outputs go through pointers.
//! - Length queries (`rzms_*_len`) return the exact encoded size including
//!   the 6-byte frame, so callers can allocate precisely.
//!
//! The header is generated into include/rzms.h at build time.

// Every pointer argument is null-checked before use; buffer lengths are the
// caller's contract, as usual for a C ABI.
#![allow(clippy::not_unsafe_ptr_arg_deref)]

use std::slice;

use rzms::codec;
use rzms::params::{Params, SEED_LEN};
use rzms::protocol::{keygen, ms_verify, multi_sign_local, setup};

/// Status codes returned by every entry point.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RzmsStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidArgument = 2,
    DecodeError = 3,
    BufferTooSmall = 4,
    ProtocolError = 5,
    VerifyFailed = 6,
    EntropyError = 7,
}

/// Opaque parameter-set handle.
pub struct RzmsParams(Params);

/// Creates the production (128-bit security) parameter set.
/// Free with `rzms_params_free`.
#[no_mangle]
pub extern "C" fn rzms_params_production() -> *mut RzmsParams {
    Box::into_raw(Box::new(RzmsParams(Params::production())))
}

/// Creates the tiny test parameter set.
#[no_mangle]
pub extern "C" fn rzms_params_toy() -> *mut RzmsParams {
    Box::into_raw(Box::new(RzmsParams(Params::toy())))
}

/// Releases a parameter-set handle. Null is a no-op.
#[no_mangle]
pub extern "C" fn rzms_params_free(params: *mut RzmsParams) {
    if !params.is_null() {
        drop(unsafe { Box::from_raw(params) });
    }
}

/// Length of the seed/digest values used throughout (always 32).
#[no_mangle]
pub extern "C" fn rzms_seed_len() -> usize {
    SEED_LEN
}

/// Encoded public key length (framed). Zero on a null handle.
#[no_mangle]
pub extern "C" fn rzms_public_key_len(params: *const RzmsParams) -> usize {
    unsafe { params.as_ref() }.map_or(0, |p| {
        let s = codec::wire_sizes(&p.0);
        s.pk_body + s.frame
    })
}

/// Encoded secret key length (framed). Zero on a null handle.
#[no_mangle]
pub extern "C" fn rzms_secret_key_len(params: *const RzmsParams) -> usize {
    unsafe { params.as_ref() }.map_or(0, |p| {
        let s = codec::wire_sizes(&p.0);
        s.sk_body + s.frame
    })
}

/// Encoded signature-share length (framed). Zero on a null handle.
#[no_mangle]
pub extern "C" fn rzms_share_len(params: *const RzmsParams) -> usize {
    unsafe { params.as_ref() }.map_or(0, |p| {
        let s = codec::wire_sizes(&p.0);
        s.share_body + s.frame
    })
}

/// Encoded final signature length (framed). Zero on a null handle.
#[no_mangle]
pub extern "C" fn rzms_signature_len(params: *const RzmsParams) -> usize {
    unsafe { params.as_ref() }.map_or(0, |p| {
        let s = codec::wire_sizes(&p.0);
        s.sig_body + s.frame
    })
}

/// Fills `out_rho` (32 bytes) with a fresh shared parameter from system
/// entropy.
#[no_mangle]
pub extern "C" fn rzms_setup(out_rho: *mut u8) -> RzmsStatus {
    if out_rho.is_null() {
        return RzmsStatus::NullArgument;
    }
    match setup(128, None) {
        Ok(rho) => {
            unsafe { slice::from_raw_parts_mut(out_rho, SEED_LEN) }.copy_from_slice(&rho);
            RzmsStatus::Ok
        }
        Err(_) => RzmsStatus::EntropyError,
    }
}

unsafe fn seed_from(ptr: *const u8) -> Option<[u8; SEED_LEN]> {
    if ptr.is_null() {
        return None;
    }
    let mut s = [0u8; SEED_LEN];
    s.copy_from_slice(unsafe { slice::from_raw_parts(ptr, SEED_LEN) });
    Some(s)
}

fn write_out(buf: *mut u8, cap: usize, written: *mut usize, bytes: &[u8]) -> RzmsStatus {
    unsafe {
        if !written.is_null() {
            *written = bytes.len();
        }
    }
    if buf.is_null() {
        // Size query: report the length without writing.
        return if written.is_null() {
            RzmsStatus::NullArgument
        } else {
            RzmsStatus::Ok
        };
    }
    if cap < bytes.len() {
        return RzmsStatus::BufferTooSmall;
    }
    unsafe { slice::from_raw_parts_mut(buf, bytes.len()) }.copy_from_slice(bytes);
    RzmsStatus::Ok
}

/// Deterministic key generation. `rho` and `signer_seed` are 32 bytes each;
/// the encoded key pair is written to the two caller buffers
/// (`*pk_written`/`*sk_written` receive the exact sizes, which equal
/// `rzms_public_key_len`/`rzms_secret_key_len`).
#[no_mangle]
pub extern "C" fn rzms_keygen(
    params: *const RzmsParams,
    rho: *const u8,
    signer_seed: *const u8,
    pk_buf: *mut u8,
    pk_cap: usize,
    pk_written: *mut usize,
    sk_buf: *mut u8,
    sk_cap: usize,
    sk_written: *mut usize,
) -> RzmsStatus {
    let Some(p) = (unsafe { params.as_ref() }) else {
        return RzmsStatus::NullArgument;
    };
    let (Some(rho), Some(seed)) = (unsafe { seed_from(rho) }, unsafe { seed_from(signer_seed) })
    else {
        return RzmsStatus::NullArgument;
    };
    let (pk, sk) = keygen(&rho, &seed, &p.0);
    let pk_bytes = codec::encode_pk(&pk, &p.0);
    let sk_bytes = match codec::encode_sk(&sk, &p.0) {
        Ok(b) => b,
        Err(_) => return RzmsStatus::ProtocolError,
    };
    let st = write_out(pk_buf, pk_cap, pk_written, &pk_bytes);
    if st != RzmsStatus::Ok {
        return st;
    }
    write_out(sk_buf, sk_cap, sk_written, &sk_bytes)
}

/// Runs the whole multi-party protocol locally over `count` signers whose
/// encoded secret and public keys are given as parallel arrays of buffers,
/// and writes the encoded final signature. `rng_seed` (32 bytes) fixes the
/// signing randomness; pass null for fresh entropy.
#[no_mangle]
pub extern "C" fn rzms_sign(
    params: *const RzmsParams,
    sk_bufs: *const *const u8,
    sk_lens: *const usize,
    pk_bufs: *const *const u8,
    pk_lens: *const usize,
    count: usize,
    msg: *const u8,
    msg_len: usize,
    rng_seed: *const u8,
    sig_buf: *mut u8,
    sig_cap: usize,
    sig_written: *mut usize,
) -> RzmsStatus {
    let Some(p) = (unsafe { params.as_ref() }) else {
        return RzmsStatus::NullArgument;
    };
    if sk_bufs.is_null() || sk_lens.is_null() || pk_bufs.is_null() || pk_lens.is_null() {
        return RzmsStatus::NullArgument;
    }
    if count == 0 {
        return RzmsStatus::InvalidArgument;
    }
    if msg.is_null() && msg_len > 0 {
        return RzmsStatus::NullArgument;
    }
    let msg = if msg_len == 0 {
        &[][..]
    } else {
        unsafe { slice::from_raw_parts(msg, msg_len) }
    };
    let sk_bufs = unsafe { slice::from_raw_parts(sk_bufs, count) };
    let sk_lens = unsafe { slice::from_raw_parts(sk_lens, count) };
    let pk_bufs = unsafe { slice::from_raw_parts(pk_bufs, count) };
    let pk_lens = unsafe { slice::from_raw_parts(pk_lens, count) };
    let mut keys = Vec::with_capacity(count);
    for i in 0..count {
        if sk_bufs[i].is_null() || pk_bufs[i].is_null() {
            return RzmsStatus::NullArgument;
        }
        let pk_bytes = unsafe { slice::from_raw_parts(pk_bufs[i], pk_lens[i]) };
        let sk_bytes = unsafe { slice::from_raw_parts(sk_bufs[i], sk_lens[i]) };
        let pk = match codec::decode_pk(pk_bytes, &p.0) {
            Ok(pk) => pk,
            Err(_) => return RzmsStatus::DecodeError,
        };
        let sk = match codec::decode_sk(sk_bytes, &p.0) {
            Ok(sk) => sk,
            Err(_) => return RzmsStatus::DecodeError,
        };
        keys.push((pk, sk));
    }
    let rng = match unsafe { seed_from(rng_seed) } {
        Some(s) => s,
        None => match setup(128, None) {
            Ok(s) => s,
            Err(_) => return RzmsStatus::EntropyError,
        },
    };
    let sig = match multi_sign_local(&keys, msg, &rng, &p.0) {
        Ok(sig) => sig,
        Err(_) => return RzmsStatus::ProtocolError,
    };
    let bytes = match codec::encode_sig(&sig, &p.0) {
        Ok(b) => b,
        Err(_) => return RzmsStatus::ProtocolError,
    };
    write_out(sig_buf, sig_cap, sig_written, &bytes)
}

/// Verifies an encoded signature. Returns Ok when valid, VerifyFailed when
/// the signature does not verify, DecodeError when it does not even parse.
#[no_mangle]
pub extern "C" fn rzms_verify(
    params: *const RzmsParams,
    rho: *const u8,
    msg: *const u8,
    msg_len: usize,
    sig: *const u8,
    sig_len: usize,
) -> RzmsStatus {
    let Some(p) = (unsafe { params.as_ref() }) else {
        return RzmsStatus::NullArgument;
    };
    let Some(rho) = (unsafe { seed_from(rho) }) else {
        return RzmsStatus::NullArgument;
    };
    if sig.is_null() || (msg.is_null() && msg_len > 0) {
        return RzmsStatus::NullArgument;
    }
    let msg = if msg_len == 0 {
        &[][..]
    } else {
        unsafe { slice::from_raw_parts(msg, msg_len) }
    };
    let sig_bytes = unsafe { slice::from_raw_parts(sig, sig_len) };
    let sig = match codec::decode_sig(sig_bytes, &p.0) {
        Ok(s) => s,
        Err(_) => return RzmsStatus::DecodeError,
    };
    if ms_verify(&rho, msg, &sig, &p.0) {
        RzmsStatus::Ok
    } else {
        RzmsStatus::VerifyFailed
    }
}
