//! Deterministic randomness expansion: the hash H (SHA3-256), the XOF
//! (SHAKE-256), matrix/mask/secret/challenge samplers, and the 256-bit-seed
//! to ring-element encoding used by the seed-encryption channel.
//!
//! Every sampler here is normative wire-level behavior: two implementations
//! fed the same seeds must produce identical keys and signatures. Candidates
//! are consumed from each stream as back-to-back little-endian bit chunks
//! (LSB first within each byte); rejected candidates are simply discarded.

use sha3::digest::{ExtendableOutput, Update, XofReader};
use sha3::{Digest, Sha3_256, Shake256};

use crate::params::{Params, SEED_LEN};
use crate::ring::{mod_pm, Poly, PolyMat, PolyVec};

/// A 32-byte seed or digest.
pub type Seed = [u8; SEED_LEN];

/// Domain-separation byte for matrix expansion.
pub const DOMAIN_MATRIX: u8 = 0x00;
/// Domain-separation byte for mask-vector expansion.
pub const DOMAIN_MASK: u8 = 0x01;
/// Domain-separation byte for eta-bounded secret sampling.
pub const DOMAIN_ETA: u8 = 0x02;
/// Domain-separation byte for challenge-ball sampling.
pub const DOMAIN_BALL: u8 = 0x03;
/// Domain-separation byte for seed-encryption randomness.
pub const DOMAIN_ENCRYPT: u8 = 0x04;
/// Domain-separation byte for simulator/transcript derivations.
pub const DOMAIN_TRANSCRIPT: u8 = 0x05;

/// H: SHA3-256 over the exact input bytes.
pub fn hash_h(data: &[u8]) -> Seed {
    let mut h = Sha3_256::new();
    Digest::update(&mut h, data);
    h.finalize().into()
}

/// An unbounded deterministic byte/bit stream: SHAKE-256 over
/// seed || domain || nonce (nonce little-endian, 2 bytes).
pub struct XofStream {
    reader: sha3::Shake256Reader,
    buf: [u8; 136],
    pos: usize,
    acc: u64,
    acc_bits: u32,
}

/// Opens the stream for (seed, domain, nonce).
pub fn xof_stream(seed: &Seed, domain: u8, nonce: u16) -> XofStream {
    let mut x = Shake256::default();
    x.update(seed);
    x.update(&[domain]);
    x.update(&nonce.to_le_bytes());
    XofStream {
        reader: x.finalize_xof(),
        buf: [0; 136],
        pos: 136,
        acc: 0,
        acc_bits: 0,
    }
}

impl XofStream {
    fn next_byte(&mut self) -> u8 {
        if self.pos == self.buf.len() {
            self.reader.read(&mut self.buf);
            self.pos = 0;
        }
        let b = self.buf[self.pos];
        self.pos += 1;
        b
    }

    /// Consumes `bits` (1..=32) from the stream, LSB first.
    pub fn take_bits(&mut self, bits: u32) -> u32 {
        debug_assert!((1..=32).contains(&bits));
        while self.acc_bits < bits {
            self.acc |= (self.next_byte() as u64) << self.acc_bits;
            self.acc_bits += 8;
        }
        let out = (self.acc & ((1u64 << bits) - 1)) as u32;
        self.acc >>= bits;
        self.acc_bits -= bits;
        out
    }

    /// Fills `out` with whole bytes. Equivalent to repeated 8-bit reads.
    pub fn read_bytes(&mut self, out: &mut [u8]) {
        for b in out.iter_mut() {
            *b = self.take_bits(8) as u8;
        }
    }
}

/// Expands the public matrix A in R_q^{k x l} from rho. Entry (i, j) is
/// rejection-sampled from the stream with nonce i*256 + j: each candidate is
/// `a_chunk_bytes` bytes read little-endian, accepted when below q.
pub fn expand_a(rho: &Seed, params: &Params) -> PolyMat {
    let chunk_bits = 8 * params.a_chunk_bytes;
    let rows = (0..params.k)
        .map(|i| {
            PolyVec::from_polys(
                (0..params.l)
                    .map(|j| {
                        let mut xof = xof_stream(rho, DOMAIN_MATRIX, (i * 256 + j) as u16);
                        let coeffs = (0..params.n)
                            .map(|_| loop {
                                let c = xof.take_bits(chunk_bits);
                                if c < params.q {
                                    break c;
                                }
                            })
                            .collect();
                        Poly::from_raw(coeffs)
                    })
                    .collect(),
            )
        })
        .collect();
    PolyMat::from_rows(rows)
}

/// Expands the mask vector y in S_{gamma1-1}^l from rho'. Component i uses
/// nonce i; candidates are `mask_bits`-bit chunks t, accepted when
/// t < 2*gamma1 - 1 and mapped to t - (gamma1 - 1).
pub fn expand_mask(rho_prime: &Seed, params: &Params) -> PolyVec {
    let bound = 2 * params.gamma1 - 1;
    let shift = (params.gamma1 - 1) as u64;
    let q = params.q as u64;
    PolyVec::from_polys(
        (0..params.l)
            .map(|i| {
                let mut xof = xof_stream(rho_prime, DOMAIN_MASK, i as u16);
                let coeffs = (0..params.n)
                    .map(|_| loop {
                        let t = xof.take_bits(params.mask_bits);
                        if t < bound {
                            break ((t as u64 + q - shift) % q) as u32;
                        }
                    })
                    .collect();
                Poly::from_raw(coeffs)
            })
            .collect(),
    )
}

/// Eta sampler under an explicit domain byte; the seed-encryption channel
/// draws its randomness through this with [`DOMAIN_ENCRYPT`].
pub fn sample_eta_domain(seed: &Seed, domain: u8, nonce: u16, params: &Params) -> Poly {
    let bound = 2 * params.eta + 1;
    let q = params.q as u64;
    let eta = params.eta as u64;
    let mut xof = xof_stream(seed, domain, nonce);
    let coeffs = (0..params.n)
        .map(|_| loop {
            let c = xof.take_bits(4);
            if c < bound {
                break ((c as u64 + q - eta) % q) as u32;
            }
        })
        .collect();
    Poly::from_raw(coeffs)
}

/// Samples one polynomial with coefficients uniform in [-eta, eta], from
/// 4-bit rejection chunks under (seed, nonce).
pub fn sample_eta(seed: &Seed, nonce: u16, params: &Params) -> Poly {
    sample_eta_domain(seed, DOMAIN_ETA, nonce, params)
}

/// Derives the challenge polynomial c in B_tau from a digest: exactly tau
/// coefficients are +/-1, placed by an in-place shuffle with sign bits, all
/// driven by the stream under nonce 0.
pub fn sample_in_ball(c_tilde: &Seed, params: &Params) -> Poly {
    let mut xof = xof_stream(c_tilde, DOMAIN_BALL, 0);
    let mut sign_bytes = [0u8; 8];
    xof.read_bytes(&mut sign_bytes);
    let mut signs = u64::from_le_bytes(sign_bytes);
    let mut coeffs = vec![0u32; params.n];
    for i in (params.n - params.tau)..params.n {
        let j = loop {
            let cand = xof.take_bits(8) as usize;
            if cand <= i {
                break cand;
            }
        };
        coeffs[i] = coeffs[j];
        coeffs[j] = if signs & 1 == 0 { 1 } else { params.q - 1 };
        signs >>= 1;
    }
    Poly::from_raw(coeffs)
}

/// Number of ring elements needed to carry a 256-bit seed (1 when n >= 256).
pub fn seed_chunk_count(params: &Params) -> usize {
    params.seed_chunks
}

/// Encodes a 256-bit seed into `seed_chunks` ring elements: bit g of the seed
/// (LSB first within each byte) becomes coefficient g mod n of chunk g / n,
/// as 0 or (q-1)/2.
pub fn encode_seed(seed: &Seed, params: &Params) -> Vec<Poly> {
    let half = (params.q - 1) / 2;
    (0..params.seed_chunks)
        .map(|t| {
            let coeffs = (0..params.n)
                .map(|i| {
                    let g = t * params.n + i;
                    if g < 8 * SEED_LEN && (seed[g / 8] >> (g % 8)) & 1 == 1 {
                        half
                    } else {
                        0
                    }
                })
                .collect();
            Poly::from_raw(coeffs)
        })
        .collect()
}

/// Decodes a seed from noisy chunks: bit g is 1 iff the centered value of the
/// corresponding coefficient exceeds q/4 in magnitude. Total on any input;
/// correctness requires noise below q/4, which callers validate downstream.
pub fn decode_seed(chunks: &[Poly], params: &Params) -> Seed {
    let q = params.q as i64;
    let mut out = [0u8; SEED_LEN];
    for (t, chunk) in chunks.iter().enumerate().take(params.seed_chunks) {
        for i in 0..params.n {
            let g = t * params.n + i;
            if g >= 8 * SEED_LEN {
                break;
            }
            let centered = mod_pm(chunk.coeffs()[i] as i64, q);
            if 4 * centered.abs() > q {
                out[g / 8] |= 1 << (g % 8);
            }
        }
    }
    out
}
