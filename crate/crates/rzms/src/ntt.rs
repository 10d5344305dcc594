//! Negacyclic number-theoretic transform over Z_q[x]/(x^n + 1).
//!
//! Valid whenever q = 1 (mod 2n): a primitive 2n-th root of unity zeta exists
//! and x^n + 1 splits into linear factors. The tables store zeta^brv(i), so
//! pointwise multiplication in the transformed domain realizes the negacyclic
//! convolution directly, with no separate twisting pass.
//!
//! This is an internal speed path: every result must be bit-identical to
//! schoolbook multiplication, which the tests enforce.

use crate::error::Error;

pub(crate) fn pow_mod(mut base: u64, mut exp: u64, q: u64) -> u64 {
    base %= q;
    let mut acc = 1u64;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * base % q;
        }
        base = base * base % q;
        exp >>= 1;
    }
    acc
}

fn bit_reverse(value: usize, bits: u32) -> usize {
    let mut out = 0usize;
    for b in 0..bits {
        out |= ((value >> b) & 1) << (bits - 1 - b);
    }
    out
}

#[derive(Debug)]
pub(crate) struct NttTables {
    /// zeta^brv(i) for i in 0..n, zeta a primitive 2n-th root of unity.
    zetas: Vec<u32>,
    n_inv: u64,
    q: u64,
}

impl NttTables {
    pub(crate) fn new(n: usize, q: u32) -> Result<Self, Error> {
        if n < 2 || !n.is_power_of_two() {
            return Err(Error::InvalidParams(format!(
                "ring degree {n} is not a power of two >= 2"
            )));
        }
        let q64 = q as u64;
        let two_n = 2 * n as u64;
        if !(q64 - 1).is_multiple_of(two_n) {
            return Err(Error::InvalidParams(format!(
                "q = {q} does not satisfy q = 1 (mod 2n = {two_n})"
            )));
        }
        let exp = (q64 - 1) / two_n;
        let log_n = n.trailing_zeros();
        // Smallest base whose (q-1)/2n-th power has order exactly 2n, i.e.
        // zeta^n = -1. Deterministic, so both sides of any cross-check agree.
        let mut root = 0u64;
        for cand in 2..q64 {
            let z = pow_mod(cand, exp, q64);
            if pow_mod(z, n as u64, q64) == q64 - 1 {
                root = z;
                break;
            }
        }
        if root == 0 {
            return Err(Error::InvalidParams(format!(
                "no primitive 2n-th root of unity mod {q}"
            )));
        }
        let zetas = (0..n)
            .map(|i| pow_mod(root, bit_reverse(i, log_n) as u64, q64) as u32)
            .collect();
        let n_inv = pow_mod(n as u64, q64 - 2, q64);
        Ok(NttTables {
            zetas,
            n_inv,
            q: q64,
        })
    }

    pub(crate) fn forward(&self, a: &mut [u32]) {
        let n = a.len();
        let q = self.q;
        let mut k = 0usize;
        let mut len = n / 2;
        while len >= 1 {
            let mut start = 0;
            while start < n {
                k += 1;
                let zeta = self.zetas[k] as u64;
                for j in start..start + len {
                    let t = zeta * a[j + len] as u64 % q;
                    let aj = a[j] as u64;
                    a[j + len] = ((aj + q - t) % q) as u32;
                    a[j] = ((aj + t) % q) as u32;
                }
                start += 2 * len;
            }
            len >>= 1;
        }
    }

    pub(crate) fn inverse(&self, a: &mut [u32]) {
        let n = a.len();
        let q = self.q;
        let mut k = n;
        let mut len = 1;
        while len < n {
            let mut start = 0;
            while start < n {
                k -= 1;
                let neg_zeta = q - self.zetas[k] as u64;
                for j in start..start + len {
                    let t = a[j] as u64;
                    a[j] = ((t + a[j + len] as u64) % q) as u32;
                    let diff = (t + q - a[j + len] as u64) % q;
                    a[j + len] = (neg_zeta * diff % q) as u32;
                }
                start += 2 * len;
            }
            len <<= 1;
        }
        for x in a.iter_mut() {
            *x = (*x as u64 * self.n_inv % q) as u32;
        }
    }

    pub(crate) fn pointwise_acc(&self, acc: &mut [u32], a: &[u32], b: &[u32]) {
        let q = self.q;
        for i in 0..acc.len() {
            let prod = a[i] as u64 * b[i] as u64 % q;
            acc[i] = ((acc[i] as u64 + prod) % q) as u32;
        }
    }

    pub(crate) fn pointwise(&self, a: &[u32], b: &[u32]) -> Vec<u32> {
        let q = self.q;
        a.iter()
            .zip(b)
            .map(|(&x, &y)| (x as u64 * y as u64 % q) as u32)
            .collect()
    }
}
