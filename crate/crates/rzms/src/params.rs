//! Scheme parameter sets and the constants derived from them.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::ntt::NttTables;

/// Length in bytes of every seed and digest (256 bits).
pub const SEED_LEN: usize = 32;

/// All scheme constants plus the values derived from them.
///
/// Cloning is cheap: the NTT tables are shared behind an `Arc`.
#[derive(Clone)]
pub struct Params {
    /// Ring degree: coefficients per polynomial. Power of two.
    pub n: usize,
    /// Prime modulus, q = 1 (mod 2n).
    pub q: u32,
    /// Rows of the public matrix A.
    pub k: usize,
    /// Columns of the public matrix A.
    pub l: usize,
    /// Mask coefficient bound: y coefficients lie in [-(gamma1-1), gamma1-1].
    pub gamma1: u32,
    /// Low-order rounding range; alpha = 2*gamma2.
    pub gamma2: u32,
    /// Number of +/-1 coefficients in a challenge polynomial.
    pub tau: usize,
    /// Secret coefficient bound.
    pub eta: u32,
    /// tau * eta.
    pub beta: u32,
    /// 2 * gamma2; the decompose divisor.
    pub alpha: u32,
    /// (q - 1) / alpha; high bits lie in [0, m_high).
    pub m_high: u32,
    /// Abort the signing loop after this many rejected attempts.
    pub retry_limit: u32,
    /// Packing width for full-range coefficients: bitlen(q - 1).
    pub coeff_bits: u32,
    /// Packing width for offset-shifted z coefficients: bitlen(2*(gamma1-beta-1)).
    pub z_bits: u32,
    /// Packing width for high-bits values: bitlen(m_high - 1).
    pub w1_bits: u32,
    /// Packing width for offset-shifted secret coefficients: bitlen(2*eta).
    pub sk_bits: u32,
    /// Rejection chunk width for mask sampling: log2(gamma1) + 1.
    pub mask_bits: u32,
    /// Rejection chunk size in bytes for matrix expansion: ceil(coeff_bits / 8).
    pub a_chunk_bytes: u32,
    /// Ring elements needed to carry one 256-bit seed: ceil(256 / n).
    pub seed_chunks: usize,
    pub(crate) ntt: Arc<NttTables>,
}

fn bitlen(x: u32) -> u32 {
    32 - x.leading_zeros()
}

fn is_prime(x: u32) -> bool {
    if x < 2 {
        return false;
    }
    let mut d = 2u32;
    while (d as u64) * (d as u64) <= x as u64 {
        if x.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

impl Params {
    /// Validates every structural invariant and precomputes derived constants.
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        n: usize,
        q: u32,
        k: usize,
        l: usize,
        gamma1: u32,
        gamma2: u32,
        tau: usize,
        eta: u32,
        retry_limit: u32,
    ) -> Result<Params> {
        if n < 2 || !n.is_power_of_two() {
            return Err(Error::InvalidParams(format!(
                "n = {n} is not a power of two >= 2"
            )));
        }
        if !is_prime(q) {
            return Err(Error::InvalidParams(format!("q = {q} is not prime")));
        }
        if !(q as u64 - 1).is_multiple_of(2 * n as u64) {
            return Err(Error::InvalidParams(format!("q = {q} != 1 (mod 2n)")));
        }
        if q >= 1 << 30 {
            return Err(Error::InvalidParams("q must fit in 30 bits".into()));
        }
        if k == 0 || l == 0 {
            return Err(Error::InvalidParams(
                "matrix dimensions must be positive".into(),
            ));
        }
        if !gamma1.is_power_of_two() {
            return Err(Error::InvalidParams(format!(
                "gamma1 = {gamma1} is not a power of two"
            )));
        }
        let alpha = 2 * gamma2;
        if alpha == 0 || !(q - 1).is_multiple_of(alpha) {
            return Err(Error::InvalidParams(format!(
                "alpha = {alpha} does not divide q - 1"
            )));
        }
        if eta == 0 || eta > 7 {
            return Err(Error::InvalidParams(format!(
                "eta = {eta} out of supported range 1..=7"
            )));
        }
        if tau == 0 || tau > n || tau > 64 {
            return Err(Error::InvalidParams(format!(
                "tau = {tau} out of supported range"
            )));
        }
        let beta = tau as u32 * eta;
        if beta >= gamma2 {
            return Err(Error::InvalidParams(format!(
                "beta = {beta} must be < gamma2 = {gamma2}"
            )));
        }
        if beta >= gamma1 {
            return Err(Error::InvalidParams(format!(
                "beta = {beta} must be < gamma1 = {gamma1}"
            )));
        }
        let m_high = (q - 1) / alpha;
        let ntt = Arc::new(NttTables::new(n, q)?);
        Ok(Params {
            n,
            q,
            k,
            l,
            gamma1,
            gamma2,
            tau,
            eta,
            beta,
            alpha,
            m_high,
            retry_limit,
            coeff_bits: bitlen(q - 1),
            z_bits: bitlen(2 * (gamma1 - beta - 1)),
            w1_bits: bitlen(m_high - 1),
            sk_bits: bitlen(2 * eta),
            mask_bits: gamma1.trailing_zeros() + 1,
            a_chunk_bytes: bitlen(q - 1).div_ceil(8),
            seed_chunks: (8 * SEED_LEN).div_ceil(n),
            ntt,
        })
    }

    /// The 128-bit-security production set: n=256, q=8397313, (k,l)=(4,4),
    /// gamma1=2^17, gamma2=63616, tau=41, eta=5.
    pub fn production() -> Params {
        Params::new(256, 8_397_313, 4, 4, 1 << 17, 63_616, 41, 5, 10_000)
            .expect("production parameters satisfy all invariants")
    }

    /// A tiny set for exhaustive/brute-force testing: n=8, q=257, (k,l)=(2,2),
    /// gamma1=16, gamma2=8, tau=2, eta=1.
    ///
    /// Rejection is much harsher here (acceptance ~2.7e-4 per attempt), so the
    /// retry limit is raised accordingly.
    pub fn toy() -> Params {
        Params::new(8, 257, 2, 2, 16, 8, 2, 1, 100_000)
            .expect("toy parameters satisfy all invariants")
    }

    /// Looks a set up by name ("production" or "toy").
    pub fn by_name(name: &str) -> Result<Params> {
        match name {
            "production" => Ok(Params::production()),
            "toy" => Ok(Params::toy()),
            other => Err(Error::InvalidParams(format!(
                "unknown parameter set '{other}'"
            ))),
        }
    }

    /// Analytic per-attempt acceptance probability of the signing loop:
    /// ((2(gamma1-beta)-1)/(2 gamma1-1))^(n l) * ((2(gamma2-beta)-1)/(2 gamma2))^(n k).
    pub fn analytic_acceptance(&self) -> f64 {
        let z_ratio =
            (2.0 * (self.gamma1 - self.beta) as f64 - 1.0) / (2.0 * self.gamma1 as f64 - 1.0);
        let r0_ratio = (2.0 * (self.gamma2 - self.beta) as f64 - 1.0) / (2.0 * self.gamma2 as f64);
        z_ratio.powi((self.n * self.l) as i32) * r0_ratio.powi((self.n * self.k) as i32)
    }

    pub(crate) fn tables(&self) -> &NttTables {
        &self.ntt
    }
}

impl fmt::Debug for Params {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Params")
            .field("n", &self.n)
            .field("q", &self.q)
            .field("k", &self.k)
            .field("l", &self.l)
            .field("gamma1", &self.gamma1)
            .field("gamma2", &self.gamma2)
            .field("tau", &self.tau)
            .field("eta", &self.eta)
            .finish_non_exhaustive()
    }
}

impl PartialEq for Params {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n
            && self.q == other.q
            && self.k == other.k
            && self.l == other.l
            && self.gamma1 == other.gamma1
            && self.gamma2 == other.gamma2
            && self.tau == other.tau
            && self.eta == other.eta
    }
}

impl Eq for Params {}
