//! Bit-exact serialization of all protocol objects, plus the normative
//! hash-input packings.
//!
//! Bit order is little-endian within bytes: the first value occupies the low
//! bits of the first byte. Framed objects carry a 6-byte header
//! (magic "RZMS", version, kind) in front of the packed body. Byte-level
//! layouts are documented in docs/wire-format.md.

use crate::error::CodecError;
use crate::params::{Params, SEED_LEN};
use crate::protocol::{
    MultiSignature, PublicKeyShare, SecretKeyShare, SeedCiphertext, SignatureShare,
};
use crate::ring::{mod_pm, Poly, PolyVec};

pub const MAGIC: [u8; 4] = *b"RZMS";
pub const VERSION: u8 = 0x01;
/// Header bytes in front of every framed object.
pub const FRAME_LEN: usize = 6;

/// Object kind tags carried in the frame header.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u8)]
pub enum WireKind {
    PublicKey = 1,
    SecretKey = 2,
    Share = 3,
    Signature = 4,
    Params = 5,
}

impl WireKind {
    fn from_byte(b: u8) -> Result<WireKind, CodecError> {
        match b {
            1 => Ok(WireKind::PublicKey),
            2 => Ok(WireKind::SecretKey),
            3 => Ok(WireKind::Share),
            4 => Ok(WireKind::Signature),
            5 => Ok(WireKind::Params),
            other => Err(CodecError::BadKind(other)),
        }
    }
}

/// Packs `values` at `bits` per value, little-endian bit order, zero padding
/// in the final partial byte.
pub fn pack_bits(values: &[u32], bits: u32) -> Vec<u8> {
    debug_assert!((1..=32).contains(&bits));
    debug_assert!(values.iter().all(|&v| bits == 32 || v < (1u32 << bits)));
    let total_bits = values.len() * bits as usize;
    let mut out = vec![0u8; total_bits.div_ceil(8)];
    let mut acc = 0u64;
    let mut acc_bits = 0u32;
    let mut idx = 0;
    for &v in values {
        acc |= (v as u64) << acc_bits;
        acc_bits += bits;
        while acc_bits >= 8 {
            out[idx] = acc as u8;
            idx += 1;
            acc >>= 8;
            acc_bits -= 8;
        }
    }
    if acc_bits > 0 {
        out[idx] = acc as u8;
    }
    out
}

/// Exact inverse of [`pack_bits`]: rejects wrong-size input and nonzero
/// padding bits, so only encoder outputs decode.
pub fn unpack_bits(bytes: &[u8], bits: u32, count: usize) -> Result<Vec<u32>, CodecError> {
    let expected = (count * bits as usize).div_ceil(8);
    if bytes.len() != expected {
        return Err(CodecError::LengthMismatch {
            expected,
            got: bytes.len(),
        });
    }
    let mask = if bits == 32 {
        u64::MAX >> 32
    } else {
        (1u64 << bits) - 1
    };
    let mut acc = 0u64;
    let mut acc_bits = 0u32;
    let mut iter = bytes.iter();
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        while acc_bits < bits {
            let b = iter.next().ok_or(CodecError::Truncated {
                need: expected,
                have: bytes.len(),
            })?;
            acc |= (*b as u64) << acc_bits;
            acc_bits += 8;
        }
        out.push((acc & mask) as u32);
        acc >>= bits;
        acc_bits -= bits;
    }
    if acc != 0 {
        return Err(CodecError::NonCanonical);
    }
    Ok(out)
}

/// Packs one polynomial at a fixed width; coefficients must already fit.
pub fn pack_poly(p: &Poly, bits: u32) -> Result<Vec<u8>, CodecError> {
    if p.coeffs().iter().any(|&c| bits < 32 && c >= (1u32 << bits)) {
        return Err(CodecError::CoeffOutOfRange);
    }
    Ok(pack_bits(p.coeffs(), bits))
}

/// Unpacks one polynomial packed at `bits` per coefficient.
pub fn unpack_poly(bytes: &[u8], bits: u32, n: usize) -> Result<Poly, CodecError> {
    Ok(Poly::from_raw(unpack_bits(bytes, bits, n)?))
}

fn poly_bytes(n: usize, bits: u32) -> usize {
    (n * bits as usize).div_ceil(8)
}

/// Packs a full-range R_q vector at `coeff_bits` per coefficient (24 bits at
/// production parameters). This is the normative hash input for the final
/// challenge and the verifier.
pub fn pack_full_vec(v: &PolyVec, params: &Params) -> Vec<u8> {
    let mut out = Vec::with_capacity(v.len() * poly_bytes(params.n, params.coeff_bits));
    for p in v.polys() {
        out.extend_from_slice(&pack_bits(p.coeffs(), params.coeff_bits));
    }
    out
}

fn unpack_full_vec(bytes: &[u8], len: usize, params: &Params) -> Result<PolyVec, CodecError> {
    let per = poly_bytes(params.n, params.coeff_bits);
    if bytes.len() != len * per {
        return Err(CodecError::LengthMismatch {
            expected: len * per,
            got: bytes.len(),
        });
    }
    let mut polys = Vec::with_capacity(len);
    for i in 0..len {
        let vals = unpack_bits(&bytes[i * per..(i + 1) * per], params.coeff_bits, params.n)?;
        if vals.iter().any(|&v| v >= params.q) {
            return Err(CodecError::CoeffOutOfRange);
        }
        polys.push(Poly::from_raw(vals));
    }
    Ok(PolyVec::from_polys(polys))
}

/// Packs a high-bits vector at `w1_bits` per value (7 bits, 896 bytes at
/// production parameters). This is the normative input to the per-share
/// challenge hash.
pub fn pack_w1(w1: &PolyVec, params: &Params) -> Result<Vec<u8>, CodecError> {
    let mut out = Vec::with_capacity(w1.len() * poly_bytes(params.n, params.w1_bits));
    for p in w1.polys() {
        if p.coeffs().iter().any(|&c| c >= params.m_high) {
            return Err(CodecError::CoeffOutOfRange);
        }
        out.extend_from_slice(&pack_bits(p.coeffs(), params.w1_bits));
    }
    Ok(out)
}

/// Packs a vector whose centered coefficients lie in [-offset, offset],
/// shifting by `offset` before packing at `bits` per value.
fn pack_offset_vec(
    v: &PolyVec,
    offset: u32,
    bits: u32,
    params: &Params,
) -> Result<Vec<u8>, CodecError> {
    let q = params.q as i64;
    let mut out = Vec::with_capacity(v.len() * poly_bytes(params.n, bits));
    for p in v.polys() {
        let mut vals = Vec::with_capacity(params.n);
        for &c in p.coeffs() {
            let centered = mod_pm(c as i64, q);
            if centered.unsigned_abs() > offset as u64 {
                return Err(CodecError::CoeffOutOfRange);
            }
            vals.push((centered + offset as i64) as u32);
        }
        out.extend_from_slice(&pack_bits(&vals, bits));
    }
    Ok(out)
}

fn unpack_offset_vec(
    bytes: &[u8],
    len: usize,
    offset: u32,
    bits: u32,
    params: &Params,
) -> Result<PolyVec, CodecError> {
    let per = poly_bytes(params.n, bits);
    if bytes.len() != len * per {
        return Err(CodecError::LengthMismatch {
            expected: len * per,
            got: bytes.len(),
        });
    }
    let q = params.q as i64;
    let mut polys = Vec::with_capacity(len);
    for i in 0..len {
        let vals = unpack_bits(&bytes[i * per..(i + 1) * per], bits, params.n)?;
        let mut coeffs = Vec::with_capacity(params.n);
        for v in vals {
            if v > 2 * offset {
                return Err(CodecError::CoeffOutOfRange);
            }
            let centered = v as i64 - offset as i64;
            coeffs.push(centered.rem_euclid(q) as u32);
        }
        polys.push(Poly::from_raw(coeffs));
    }
    Ok(PolyVec::from_polys(polys))
}

/// Body sizes (bytes) for every object kind at the given parameters, plus
/// the derived aggregate-public-key and (z, c) figures.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WireSizes {
    pub pk_body: usize,
    pub sk_body: usize,
    pub share_body: usize,
    pub sig_body: usize,
    /// Size of the packed aggregate public key b alone.
    pub apk: usize,
    /// Size of the packed (z, c) portion of a final signature.
    pub z_and_c: usize,
    /// Frame header overhead on top of each body.
    pub frame: usize,
}

pub fn wire_sizes(params: &Params) -> WireSizes {
    let full = poly_bytes(params.n, params.coeff_bits);
    let z = params.l * poly_bytes(params.n, params.z_bits);
    let sk_poly = poly_bytes(params.n, params.sk_bits);
    let apk = params.k * full;
    WireSizes {
        pk_body: SEED_LEN + apk,
        sk_body: (params.l + params.k) * sk_poly + SEED_LEN,
        share_body: z + SEED_LEN + params.seed_chunks * (params.l + 1) * full,
        sig_body: z + SEED_LEN + apk,
        apk,
        z_and_c: z + SEED_LEN,
        frame: FRAME_LEN,
    }
}

fn frame(kind: WireKind, body: Vec<u8>) -> Vec<u8> {
    let mut out = Vec::with_capacity(FRAME_LEN + body.len());
    out.extend_from_slice(&MAGIC);
    out.push(VERSION);
    out.push(kind as u8);
    out.extend_from_slice(&body);
    out
}

fn unframe(bytes: &[u8], want: WireKind) -> Result<&[u8], CodecError> {
    if bytes.len() < FRAME_LEN {
        return Err(CodecError::Truncated {
            need: FRAME_LEN,
            have: bytes.len(),
        });
    }
    if bytes[..4] != MAGIC {
        return Err(CodecError::BadMagic);
    }
    if bytes[4] != VERSION {
        return Err(CodecError::BadVersion(bytes[4]));
    }
    let kind = WireKind::from_byte(bytes[5])?;
    if kind != want {
        return Err(CodecError::WrongKind {
            want: want as u8,
            got: kind as u8,
        });
    }
    Ok(&bytes[FRAME_LEN..])
}

fn take<'a>(bytes: &mut &'a [u8], len: usize) -> Result<&'a [u8], CodecError> {
    if bytes.len() < len {
        return Err(CodecError::Truncated {
            need: len,
            have: bytes.len(),
        });
    }
    let (head, tail) = bytes.split_at(len);
    *bytes = tail;
    Ok(head)
}

fn expect_empty(bytes: &[u8], body_len: usize) -> Result<(), CodecError> {
    if !bytes.is_empty() {
        return Err(CodecError::LengthMismatch {
            expected: body_len,
            got: body_len + bytes.len(),
        });
    }
    Ok(())
}

pub fn encode_pk(pk: &PublicKeyShare, params: &Params) -> Vec<u8> {
    let mut body = Vec::with_capacity(wire_sizes(params).pk_body);
    body.extend_from_slice(&pk.rho);
    body.extend_from_slice(&pack_full_vec(&pk.b, params));
    frame(WireKind::PublicKey, body)
}

pub fn decode_pk(bytes: &[u8], params: &Params) -> Result<PublicKeyShare, CodecError> {
    let sizes = wire_sizes(params);
    let mut body = unframe(bytes, WireKind::PublicKey)?;
    let rho: [u8; SEED_LEN] = take(&mut body, SEED_LEN)?.try_into().unwrap();
    let b = unpack_full_vec(take(&mut body, sizes.apk)?, params.k, params)?;
    expect_empty(body, sizes.pk_body)?;
    Ok(PublicKeyShare { rho, b })
}

pub fn encode_sk(sk: &SecretKeyShare, params: &Params) -> Result<Vec<u8>, CodecError> {
    let mut body = Vec::with_capacity(wire_sizes(params).sk_body);
    body.extend_from_slice(&pack_offset_vec(&sk.s, params.eta, params.sk_bits, params)?);
    body.extend_from_slice(&pack_offset_vec(&sk.e, params.eta, params.sk_bits, params)?);
    body.extend_from_slice(&sk.rnd_seed);
    Ok(frame(WireKind::SecretKey, body))
}

pub fn decode_sk(bytes: &[u8], params: &Params) -> Result<SecretKeyShare, CodecError> {
    let sizes = wire_sizes(params);
    let mut body = unframe(bytes, WireKind::SecretKey)?;
    let per = poly_bytes(params.n, params.sk_bits);
    let s = unpack_offset_vec(
        take(&mut body, params.l * per)?,
        params.l,
        params.eta,
        params.sk_bits,
        params,
    )?;
    let e = unpack_offset_vec(
        take(&mut body, params.k * per)?,
        params.k,
        params.eta,
        params.sk_bits,
        params,
    )?;
    let rnd_seed: [u8; SEED_LEN] = take(&mut body, SEED_LEN)?.try_into().unwrap();
    expect_empty(body, sizes.sk_body)?;
    Ok(SecretKeyShare { s, e, rnd_seed })
}

fn z_offset(params: &Params) -> u32 {
    params.gamma1 - params.beta - 1
}

pub fn encode_share(share: &SignatureShare, params: &Params) -> Result<Vec<u8>, CodecError> {
    let sizes = wire_sizes(params);
    let mut body = Vec::with_capacity(sizes.share_body);
    body.extend_from_slice(&pack_offset_vec(
        &share.z,
        z_offset(params),
        params.z_bits,
        params,
    )?);
    body.extend_from_slice(&share.c_tilde);
    for u in &share.ct.u {
        body.extend_from_slice(&pack_full_vec(u, params));
    }
    body.extend_from_slice(&pack_full_vec(
        &PolyVec::from_polys(share.ct.v.clone()),
        params,
    ));
    Ok(frame(WireKind::Share, body))
}

pub fn decode_share(bytes: &[u8], params: &Params) -> Result<SignatureShare, CodecError> {
    let sizes = wire_sizes(params);
    let mut body = unframe(bytes, WireKind::Share)?;
    let z_len = params.l * poly_bytes(params.n, params.z_bits);
    let z = unpack_offset_vec(
        take(&mut body, z_len)?,
        params.l,
        z_offset(params),
        params.z_bits,
        params,
    )?;
    let c_tilde: [u8; SEED_LEN] = take(&mut body, SEED_LEN)?.try_into().unwrap();
    let full = poly_bytes(params.n, params.coeff_bits);
    let mut u = Vec::with_capacity(params.seed_chunks);
    for _ in 0..params.seed_chunks {
        u.push(unpack_full_vec(
            take(&mut body, params.l * full)?,
            params.l,
            params,
        )?);
    }
    let v_vec = unpack_full_vec(
        take(&mut body, params.seed_chunks * full)?,
        params.seed_chunks,
        params,
    )?;
    expect_empty(body, sizes.share_body)?;
    Ok(SignatureShare {
        z,
        c_tilde,
        ct: SeedCiphertext {
            u,
            v: v_vec.polys().to_vec(),
        },
    })
}

pub fn encode_sig(sig: &MultiSignature, params: &Params) -> Result<Vec<u8>, CodecError> {
    let sizes = wire_sizes(params);
    let mut body = Vec::with_capacity(sizes.sig_body);
    body.extend_from_slice(&pack_offset_vec(
        &sig.z,
        z_offset(params),
        params.z_bits,
        params,
    )?);
    body.extend_from_slice(&sig.c);
    body.extend_from_slice(&pack_full_vec(&sig.b, params));
    Ok(frame(WireKind::Signature, body))
}

pub fn decode_sig(bytes: &[u8], params: &Params) -> Result<MultiSignature, CodecError> {
    let sizes = wire_sizes(params);
    let mut body = unframe(bytes, WireKind::Signature)?;
    let z_len = params.l * poly_bytes(params.n, params.z_bits);
    let z = unpack_offset_vec(
        take(&mut body, z_len)?,
        params.l,
        z_offset(params),
        params.z_bits,
        params,
    )?;
    let c: [u8; SEED_LEN] = take(&mut body, SEED_LEN)?.try_into().unwrap();
    let b = unpack_full_vec(take(&mut body, sizes.apk)?, params.k, params)?;
    expect_empty(body, sizes.sig_body)?;
    Ok(MultiSignature { z, c, b })
}

/// Parameter-set fingerprint record (kind 5): the raw scheme constants, so a
/// file can declare which set produced it.
pub fn encode_params(params: &Params) -> Vec<u8> {
    let mut body = Vec::with_capacity(22);
    body.extend_from_slice(&(params.n as u32).to_le_bytes());
    body.extend_from_slice(&params.q.to_le_bytes());
    body.push(params.k as u8);
    body.push(params.l as u8);
    body.extend_from_slice(&params.gamma1.to_le_bytes());
    body.extend_from_slice(&params.gamma2.to_le_bytes());
    body.extend_from_slice(&(params.tau as u16).to_le_bytes());
    body.extend_from_slice(&(params.eta as u16).to_le_bytes());
    frame(WireKind::Params, body)
}

/// Decodes a parameter record back into a validated parameter set (the retry
/// limit is not part of the record; the default production value is used).
pub fn decode_params(bytes: &[u8]) -> Result<Params, CodecError> {
    let mut body = unframe(bytes, WireKind::Params)?;
    let n = u32::from_le_bytes(take(&mut body, 4)?.try_into().unwrap()) as usize;
    let q = u32::from_le_bytes(take(&mut body, 4)?.try_into().unwrap());
    let k = take(&mut body, 1)?[0] as usize;
    let l = take(&mut body, 1)?[0] as usize;
    let gamma1 = u32::from_le_bytes(take(&mut body, 4)?.try_into().unwrap());
    let gamma2 = u32::from_le_bytes(take(&mut body, 4)?.try_into().unwrap());
    let tau = u16::from_le_bytes(take(&mut body, 2)?.try_into().unwrap()) as usize;
    let eta = u16::from_le_bytes(take(&mut body, 2)?.try_into().unwrap()) as u32;
    expect_empty(body, 22)?;
    Params::new(n, q, k, l, gamma1, gamma2, tau, eta, 10_000).map_err(|_| CodecError::NonCanonical)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::{xof_stream, Seed, XofStream};
    use proptest::prelude::*;

    fn rand_seed(xof: &mut XofStream) -> Seed {
        let mut s = [0u8; 32];
        xof.read_bytes(&mut s);
        s
    }

    fn rand_full_poly(xof: &mut XofStream, params: &Params) -> Poly {
        let coeffs = (0..params.n)
            .map(|_| loop {
                let c = xof.take_bits(8 * params.a_chunk_bytes);
                if c < params.q {
                    break c;
                }
            })
            .collect();
        Poly::from_raw(coeffs)
    }

    fn rand_full_vec(xof: &mut XofStream, len: usize, params: &Params) -> PolyVec {
        PolyVec::from_polys((0..len).map(|_| rand_full_poly(xof, params)).collect())
    }

    fn rand_bounded_vec(xof: &mut XofStream, len: usize, bound: u32, params: &Params) -> PolyVec {
        let q = params.q as i64;
        PolyVec::from_polys(
            (0..len)
                .map(|_| {
                    let coeffs = (0..params.n)
                        .map(|_| {
                            let v = (xof.take_bits(24) % (2 * bound + 1)) as i64 - bound as i64;
                            v.rem_euclid(q) as u32
                        })
                        .collect();
                    Poly::from_raw(coeffs)
                })
                .collect(),
        )
    }

    fn rand_pk(xof: &mut XofStream, params: &Params) -> PublicKeyShare {
        PublicKeyShare {
            rho: rand_seed(xof),
            b: rand_full_vec(xof, params.k, params),
        }
    }

    fn rand_sk(xof: &mut XofStream, params: &Params) -> SecretKeyShare {
        SecretKeyShare {
            s: rand_bounded_vec(xof, params.l, params.eta, params),
            e: rand_bounded_vec(xof, params.k, params.eta, params),
            rnd_seed: rand_seed(xof),
        }
    }

    fn rand_share(xof: &mut XofStream, params: &Params) -> SignatureShare {
        SignatureShare {
            z: rand_bounded_vec(xof, params.l, params.gamma1 - params.beta - 1, params),
            c_tilde: rand_seed(xof),
            ct: SeedCiphertext {
                u: (0..params.seed_chunks)
                    .map(|_| rand_full_vec(xof, params.l, params))
                    .collect(),
                v: (0..params.seed_chunks)
                    .map(|_| rand_full_poly(xof, params))
                    .collect(),
            },
        }
    }

    fn rand_sig(xof: &mut XofStream, params: &Params) -> MultiSignature {
        MultiSignature {
            z: rand_bounded_vec(xof, params.l, params.gamma1 - params.beta - 1, params),
            c: rand_seed(xof),
            b: rand_full_vec(xof, params.k, params),
        }
    }

    #[test]
    fn production_size_table() {
        let p = Params::production();
        let s = wire_sizes(&p);
        assert_eq!(s.pk_body, 3104);
        assert_eq!(s.sk_body, 1056);
        assert_eq!(s.share_body, 6176);
        assert_eq!(s.sig_body, 5408);
        assert_eq!(s.apk, 3072);
        assert_eq!(s.z_and_c, 2336);
        assert_eq!(s.frame, 6);
    }

    #[test]
    fn zero_poly_pack24() {
        let p = Params::production();
        let bytes = pack_poly(&Poly::zero(p.n), 24).unwrap();
        assert_eq!(bytes.len(), 768);
        assert!(bytes.iter().all(|&b| b == 0));
        // A full k-vector of R_q elements packs to the aggregate-key size.
        let v = PolyVec::zero(p.k, p.n);
        assert_eq!(pack_full_vec(&v, &p).len(), 3072);
    }

    #[test]
    fn w1_packing() {
        let p = Params::production();
        let zero = PolyVec::zero(p.k, p.n);
        let packed = pack_w1(&zero, &p).unwrap();
        assert_eq!(packed.len(), 896);
        assert!(packed.iter().all(|&b| b == 0));
        // Out-of-range high-bits value refused.
        let bad = PolyVec::from_polys(
            (0..p.k)
                .map(|_| Poly::from_raw(vec![p.m_high; p.n]))
                .collect(),
        );
        assert_eq!(pack_w1(&bad, &p), Err(CodecError::CoeffOutOfRange));
        // Round trip through the generic unpacker.
        let mut xof = xof_stream(&[21u8; 32], 0x7f, 0);
        let w1 = PolyVec::from_polys(
            (0..p.k)
                .map(|_| Poly::from_raw((0..p.n).map(|_| xof.take_bits(7) % p.m_high).collect()))
                .collect(),
        );
        let packed = pack_w1(&w1, &p).unwrap();
        let per = (p.n * p.w1_bits as usize).div_ceil(8);
        for (i, poly) in w1.polys().iter().enumerate() {
            let vals = unpack_bits(&packed[i * per..(i + 1) * per], p.w1_bits, p.n).unwrap();
            assert_eq!(&vals, poly.coeffs());
        }
    }

    #[test]
    fn object_round_trips() {
        for p in [Params::production(), Params::toy()] {
            let mut xof = xof_stream(&[22u8; 32], 0x7f, 0);
            let sizes = wire_sizes(&p);
            for _ in 0..1000 {
                let pk = rand_pk(&mut xof, &p);
                let enc = encode_pk(&pk, &p);
                assert_eq!(enc.len(), sizes.pk_body + FRAME_LEN);
                assert_eq!(decode_pk(&enc, &p).unwrap(), pk);

                let sk = rand_sk(&mut xof, &p);
                let enc = encode_sk(&sk, &p).unwrap();
                assert_eq!(enc.len(), sizes.sk_body + FRAME_LEN);
                assert_eq!(decode_sk(&enc, &p).unwrap(), sk);

                let share = rand_share(&mut xof, &p);
                let enc = encode_share(&share, &p).unwrap();
                assert_eq!(enc.len(), sizes.share_body + FRAME_LEN);
                assert_eq!(decode_share(&enc, &p).unwrap(), share);

                let sig = rand_sig(&mut xof, &p);
                let enc = encode_sig(&sig, &p).unwrap();
                assert_eq!(enc.len(), sizes.sig_body + FRAME_LEN);
                assert_eq!(decode_sig(&enc, &p).unwrap(), sig);
            }
        }
    }

    #[test]
    fn params_record_round_trip() {
        for p in [Params::production(), Params::toy()] {
            let enc = encode_params(&p);
            assert_eq!(decode_params(&enc).unwrap(), p);
        }
    }

    #[test]
    fn framing_rejections() {
        let p = Params::production();
        let mut xof = xof_stream(&[23u8; 32], 0x7f, 0);
        let enc = encode_sig(&rand_sig(&mut xof, &p), &p).unwrap();

        // Truncations at every boundary class never yield a partial object.
        for cut in [0, 3, 5, 6, 100, enc.len() - 1] {
            assert!(decode_sig(&enc[..cut], &p).is_err());
        }
        // Trailing garbage rejected.
        let mut long = enc.clone();
        long.push(0);
        assert!(decode_sig(&long, &p).is_err());

        let mut bad = enc.clone();
        bad[0] ^= 0xff;
        assert_eq!(decode_sig(&bad, &p).unwrap_err(), CodecError::BadMagic);

        let mut bad = enc.clone();
        bad[4] = 9;
        assert_eq!(decode_sig(&bad, &p).unwrap_err(), CodecError::BadVersion(9));

        let mut bad = enc.clone();
        bad[5] = 77;
        assert_eq!(decode_sig(&bad, &p).unwrap_err(), CodecError::BadKind(77));

        let mut bad = enc.clone();
        bad[5] = WireKind::PublicKey as u8;
        assert!(matches!(
            decode_sig(&bad, &p).unwrap_err(),
            CodecError::WrongKind { .. }
        ));
    }

    #[test]
    fn out_of_range_coefficients_rejected() {
        let p = Params::production();
        // A b-coefficient equal to q is representable in 24 bits but not
        // canonical; the decoder must refuse it.
        let pk = PublicKeyShare {
            rho: [0u8; 32],
            b: PolyVec::zero(p.k, p.n),
        };
        let mut enc = encode_pk(&pk, &p);
        let qbytes = p.q.to_le_bytes();
        enc[FRAME_LEN + 32] = qbytes[0];
        enc[FRAME_LEN + 33] = qbytes[1];
        enc[FRAME_LEN + 34] = qbytes[2];
        assert_eq!(
            decode_pk(&enc, &p).unwrap_err(),
            CodecError::CoeffOutOfRange
        );

        // z offset values above 2*(gamma1-beta-1) are refused.
        let mut xof = xof_stream(&[24u8; 32], 0x7f, 0);
        let sig = rand_sig(&mut xof, &p);
        let mut enc = encode_sig(&sig, &p).unwrap();
        for b in enc.iter_mut().skip(FRAME_LEN).take(3) {
            *b = 0xff;
        }
        assert!(decode_sig(&enc, &p).is_err());
    }

    #[test]
    fn poly_round_trip_at_protocol_widths() {
        let p = Params::production();
        let mut xof = xof_stream(&[25u8; 32], 0x7f, 0);
        for width in [7u32, 18, 24] {
            for _ in 0..10_000 {
                let poly = Poly::from_raw((0..p.n).map(|_| xof.take_bits(width)).collect());
                let packed = pack_poly(&poly, width).unwrap();
                assert_eq!(packed.len(), (p.n * width as usize).div_ceil(8));
                assert_eq!(unpack_poly(&packed, width, p.n).unwrap(), poly);
            }
        }
    }

    proptest! {
        #[test]
        fn pack_bits_round_trip(
            bits in 1u32..=24,
            count in 1usize..200,
            seed in any::<u64>(),
        ) {
            let mut xof = xof_stream(&{
                let mut s = [0u8; 32];
                s[..8].copy_from_slice(&seed.to_le_bytes());
                s
            }, 0x7e, 0);
            let values: Vec<u32> = (0..count).map(|_| xof.take_bits(bits)).collect();
            let packed = pack_bits(&values, bits);
            prop_assert_eq!(packed.len(), (count * bits as usize).div_ceil(8));
            let back = unpack_bits(&packed, bits, count).unwrap();
            prop_assert_eq!(back, values);
        }
    }
}
