//! Arithmetic in R_q = Z_q[x]/(x^n + 1): polynomials, vectors and matrices of
//! them, centered reductions, infinity norms, and the decompose/high-bits/
//! low-bits rounding used by the signing loop.
//!
//! Coefficients are always stored canonically in [0, q). Centered values are
//! views computed on demand, never a second storage format.

use crate::error::{Error, Result};
use crate::params::Params;

/// Centered reduction: the unique r' = r (mod alpha) with r' in
/// (-alpha/2, alpha/2] for even alpha, or [-(alpha-1)/2, (alpha-1)/2] for odd.
pub fn mod_pm(r: i64, alpha: i64) -> i64 {
    debug_assert!(alpha >= 1);
    let m = r.rem_euclid(alpha);
    if 2 * m > alpha {
        m - alpha
    } else {
        m
    }
}

/// Splits a canonical coefficient r in [0, q) into (r1, r0) with
/// r = r1*alpha + r0 (mod q), r1 in [0, (q-1)/alpha) and centered r0,
/// mapping the r - r0 = q - 1 corner to r1 = 0 with r0 decremented.
pub fn decompose(r: u32, alpha: u32, q: u32) -> (u32, i32) {
    debug_assert!(r < q);
    let r0 = mod_pm(r as i64, alpha as i64);
    if r as i64 - r0 == q as i64 - 1 {
        (0, (r0 - 1) as i32)
    } else {
        (((r as i64 - r0) / alpha as i64) as u32, r0 as i32)
    }
}

/// High-bits projection of [`decompose`].
pub fn high_bits(r: u32, alpha: u32, q: u32) -> u32 {
    decompose(r, alpha, q).0
}

/// Low-bits projection of [`decompose`].
pub fn low_bits(r: u32, alpha: u32, q: u32) -> i32 {
    decompose(r, alpha, q).1
}

/// An element of R_q, canonical coefficients in [0, q), lowest degree first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Poly {
    coeffs: Vec<u32>,
}

impl Poly {
    pub fn zero(n: usize) -> Poly {
        Poly { coeffs: vec![0; n] }
    }

    /// Builds a polynomial, checking length and canonical range.
    pub fn from_coeffs(coeffs: Vec<u32>, params: &Params) -> Result<Poly> {
        if coeffs.len() != params.n {
            return Err(Error::DimensionMismatch {
                expected: params.n,
                got: coeffs.len(),
            });
        }
        if coeffs.iter().any(|&c| c >= params.q) {
            return Err(Error::InvalidParams("coefficient out of [0, q)".into()));
        }
        Ok(Poly { coeffs })
    }

    pub(crate) fn from_raw(coeffs: Vec<u32>) -> Poly {
        Poly { coeffs }
    }

    pub fn coeffs(&self) -> &[u32] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    /// Centered view of coefficient i, in [-(q-1)/2, (q-1)/2].
    pub fn centered(&self, i: usize, params: &Params) -> i64 {
        mod_pm(self.coeffs[i] as i64, params.q as i64)
    }

    pub fn add(&self, other: &Poly, params: &Params) -> Poly {
        let q = params.q as u64;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(&a, &b)| ((a as u64 + b as u64) % q) as u32)
            .collect();
        Poly { coeffs }
    }

    pub fn sub(&self, other: &Poly, params: &Params) -> Poly {
        let q = params.q as u64;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(&a, &b)| ((a as u64 + q - b as u64) % q) as u32)
            .collect();
        Poly { coeffs }
    }

    /// Negacyclic product via the NTT. Bit-identical to [`Poly::schoolbook_mul`].
    pub fn mul(&self, other: &Poly, params: &Params) -> Poly {
        let t = params.tables();
        let mut a = self.coeffs.clone();
        let mut b = other.coeffs.clone();
        t.forward(&mut a);
        t.forward(&mut b);
        let mut c = t.pointwise(&a, &b);
        t.inverse(&mut c);
        Poly { coeffs: c }
    }

    /// Direct negacyclic convolution, reducing via x^n = -1. Used as the
    /// reference route for the NTT.
    pub fn schoolbook_mul(&self, other: &Poly, params: &Params) -> Poly {
        let n = params.n;
        let q = params.q as u64;
        let mut acc = vec![0i64; n];
        for (i, &ai) in self.coeffs.iter().enumerate() {
            if ai == 0 {
                continue;
            }
            for (j, &bj) in other.coeffs.iter().enumerate() {
                let prod = (ai as u64 * bj as u64 % q) as i64;
                let idx = i + j;
                if idx < n {
                    acc[idx] += prod;
                } else {
                    acc[idx - n] -= prod;
                }
            }
        }
        let coeffs = acc
            .into_iter()
            .map(|v| v.rem_euclid(q as i64) as u32)
            .collect();
        Poly { coeffs }
    }

    /// max_i |c_i mod+- q|.
    pub fn inf_norm(&self, params: &Params) -> u32 {
        let q = params.q as i64;
        self.coeffs
            .iter()
            .map(|&c| mod_pm(c as i64, q).unsigned_abs() as u32)
            .max()
            .unwrap_or(0)
    }

    /// Coefficient-wise high bits with alpha = 2*gamma2.
    pub fn high_bits(&self, params: &Params) -> Poly {
        let coeffs = self
            .coeffs
            .iter()
            .map(|&c| decompose(c, params.alpha, params.q).0)
            .collect();
        Poly { coeffs }
    }

    /// Coefficient-wise low bits (stored canonically mod q).
    pub fn low_bits(&self, params: &Params) -> Poly {
        let q = params.q as i64;
        let coeffs = self
            .coeffs
            .iter()
            .map(|&c| decompose(c, params.alpha, params.q).1 as i64)
            .map(|r0| r0.rem_euclid(q) as u32)
            .collect();
        Poly { coeffs }
    }

    pub fn to_ntt(&self, params: &Params) -> NttPoly {
        let mut c = self.coeffs.clone();
        params.tables().forward(&mut c);
        NttPoly(c)
    }
}

/// A polynomial in the NTT domain. Kept as a distinct type so the two
/// representations cannot be mixed up.
#[derive(Debug, Clone)]
pub struct NttPoly(Vec<u32>);

impl NttPoly {
    pub fn to_poly(&self, params: &Params) -> Poly {
        let mut c = self.0.clone();
        params.tables().inverse(&mut c);
        Poly { coeffs: c }
    }

    pub fn pointwise(&self, other: &NttPoly, params: &Params) -> NttPoly {
        NttPoly(params.tables().pointwise(&self.0, &other.0))
    }
}

/// Forward transform (exposed thinly; most callers use `Poly::mul`).
pub fn ntt_forward(p: &Poly, params: &Params) -> NttPoly {
    p.to_ntt(params)
}

/// Inverse transform.
pub fn ntt_inverse(p: &NttPoly, params: &Params) -> Poly {
    p.to_poly(params)
}

/// A fixed-length vector of ring elements (length k or l at the use site).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolyVec {
    polys: Vec<Poly>,
}

impl PolyVec {
    pub fn zero(len: usize, n: usize) -> PolyVec {
        PolyVec {
            polys: (0..len).map(|_| Poly::zero(n)).collect(),
        }
    }

    pub fn from_polys(polys: Vec<Poly>) -> PolyVec {
        PolyVec { polys }
    }

    pub fn len(&self) -> usize {
        self.polys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.polys.is_empty()
    }

    pub fn get(&self, i: usize) -> &Poly {
        &self.polys[i]
    }

    pub fn polys(&self) -> &[Poly] {
        &self.polys
    }

    pub fn add(&self, other: &PolyVec, params: &Params) -> PolyVec {
        debug_assert_eq!(self.len(), other.len());
        PolyVec {
            polys: self
                .polys
                .iter()
                .zip(&other.polys)
                .map(|(a, b)| a.add(b, params))
                .collect(),
        }
    }

    pub fn sub(&self, other: &PolyVec, params: &Params) -> PolyVec {
        debug_assert_eq!(self.len(), other.len());
        PolyVec {
            polys: self
                .polys
                .iter()
                .zip(&other.polys)
                .map(|(a, b)| a.sub(b, params))
                .collect(),
        }
    }

    /// Sum_i self_i * other_i in R_q.
    pub fn dot(&self, other: &PolyVec, params: &Params) -> Result<Poly> {
        if self.len() != other.len() {
            return Err(Error::DimensionMismatch {
                expected: self.len(),
                got: other.len(),
            });
        }
        let t = params.tables();
        let mut acc = vec![0u32; params.n];
        for (a, b) in self.polys.iter().zip(&other.polys) {
            let ah = a.to_ntt(params);
            let bh = b.to_ntt(params);
            t.pointwise_acc(&mut acc, &ah.0, &bh.0);
        }
        t.inverse(&mut acc);
        Ok(Poly { coeffs: acc })
    }

    pub fn inf_norm(&self, params: &Params) -> u32 {
        self.polys
            .iter()
            .map(|p| p.inf_norm(params))
            .max()
            .unwrap_or(0)
    }

    pub fn high_bits(&self, params: &Params) -> PolyVec {
        PolyVec {
            polys: self.polys.iter().map(|p| p.high_bits(params)).collect(),
        }
    }

    pub fn low_bits(&self, params: &Params) -> PolyVec {
        PolyVec {
            polys: self.polys.iter().map(|p| p.low_bits(params)).collect(),
        }
    }

    pub fn to_ntt(&self, params: &Params) -> NttVec {
        NttVec(self.polys.iter().map(|p| p.to_ntt(params)).collect())
    }

    /// Component-wise ring product with another vector of equal length.
    pub fn mul_elementwise(&self, other: &PolyVec, params: &Params) -> Result<PolyVec> {
        if self.len() != other.len() {
            return Err(Error::DimensionMismatch {
                expected: self.len(),
                got: other.len(),
            });
        }
        Ok(PolyVec {
            polys: self
                .polys
                .iter()
                .zip(&other.polys)
                .map(|(a, b)| a.mul(b, params))
                .collect(),
        })
    }

    /// Applies a centered reduction mod `modulus` to every coefficient,
    /// returning the result in canonical form. The centered view of each
    /// coefficient (mod+- q) is reduced, matching the convention that ring
    /// elements are read through their centered representatives.
    pub fn reduce_centered(&self, modulus: u32, params: &Params) -> PolyVec {
        let q = params.q as i64;
        PolyVec {
            polys: self
                .polys
                .iter()
                .map(|p| {
                    let coeffs = p
                        .coeffs
                        .iter()
                        .map(|&c| {
                            let centered = mod_pm(c as i64, q);
                            mod_pm(centered, modulus as i64).rem_euclid(q) as u32
                        })
                        .collect();
                    Poly { coeffs }
                })
                .collect(),
        }
    }
}

/// A vector of NTT-domain polynomials.
#[derive(Debug, Clone)]
pub struct NttVec(Vec<NttPoly>);

impl NttVec {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, i: usize) -> &NttPoly {
        &self.0[i]
    }

    pub fn to_polyvec(&self, params: &Params) -> PolyVec {
        PolyVec {
            polys: self.0.iter().map(|p| p.to_poly(params)).collect(),
        }
    }
}

/// Multiplies every component of `v` (NTT domain) by the NTT-domain scalar
/// `c`, returning the result back in coefficient form.
pub fn scalar_mul_vec(c: &NttPoly, v: &NttVec, params: &Params) -> PolyVec {
    let polys =
        v.0.iter()
            .map(|p| c.pointwise(p, params).to_poly(params))
            .collect();
    PolyVec { polys }
}

/// A k x l matrix over R_q.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolyMat {
    rows: Vec<PolyVec>,
}

impl PolyMat {
    pub fn from_rows(rows: Vec<PolyVec>) -> PolyMat {
        PolyMat { rows }
    }

    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    pub fn ncols(&self) -> usize {
        self.rows.first().map_or(0, PolyVec::len)
    }

    pub fn row(&self, i: usize) -> &PolyVec {
        &self.rows[i]
    }

    pub fn entry(&self, i: usize, j: usize) -> &Poly {
        self.rows[i].get(j)
    }

    /// A * v for v of length l, producing a length-k vector.
    pub fn mul_vec(&self, v: &PolyVec, params: &Params) -> Result<PolyVec> {
        self.to_ntt(params).mul_vec(v, params)
    }

    /// A^t * v for v of length k, producing a length-l vector.
    pub fn mul_vec_transposed(&self, v: &PolyVec, params: &Params) -> Result<PolyVec> {
        self.to_ntt(params).mul_vec_transposed(v, params)
    }

    pub fn to_ntt(&self, params: &Params) -> NttMat {
        NttMat {
            rows: self
                .rows
                .iter()
                .map(|r| r.polys.iter().map(|p| p.to_ntt(params)).collect())
                .collect(),
        }
    }
}

/// A matrix held in the NTT domain; cache this when the same matrix is
/// applied repeatedly (the signing loop does).
#[derive(Debug, Clone)]
pub struct NttMat {
    rows: Vec<Vec<NttPoly>>,
}

impl NttMat {
    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    pub fn ncols(&self) -> usize {
        self.rows.first().map_or(0, Vec::len)
    }

    pub fn mul_vec(&self, v: &PolyVec, params: &Params) -> Result<PolyVec> {
        if v.len() != self.ncols() {
            return Err(Error::DimensionMismatch {
                expected: self.ncols(),
                got: v.len(),
            });
        }
        let t = params.tables();
        let vh = v.to_ntt(params);
        let polys = self
            .rows
            .iter()
            .map(|row| {
                let mut acc = vec![0u32; params.n];
                for (a, b) in row.iter().zip(&vh.0) {
                    t.pointwise_acc(&mut acc, &a.0, &b.0);
                }
                t.inverse(&mut acc);
                Poly { coeffs: acc }
            })
            .collect();
        Ok(PolyVec { polys })
    }

    pub fn mul_vec_transposed(&self, v: &PolyVec, params: &Params) -> Result<PolyVec> {
        if v.len() != self.nrows() {
            return Err(Error::DimensionMismatch {
                expected: self.nrows(),
                got: v.len(),
            });
        }
        let t = params.tables();
        let vh = v.to_ntt(params);
        let polys = (0..self.ncols())
            .map(|col| {
                let mut acc = vec![0u32; params.n];
                for (row, b) in self.rows.iter().zip(&vh.0) {
                    t.pointwise_acc(&mut acc, &row[col].0, &b.0);
                }
                t.inverse(&mut acc);
                Poly { coeffs: acc }
            })
            .collect();
        Ok(PolyVec { polys })
    }
}
