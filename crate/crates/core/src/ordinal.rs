//! Ordinals below ω^ω and the fast-growing hierarchy indexed by them.
//!
//! An ordinal `ω^{d-1}·c_{d-1} + ... + ω·c_1 + c_0` is stored as its
//! coefficient vector `[c_0, c_1, ...]` with no trailing zeros, so equality
//! of values is equality of representations.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};

use crate::text::{self, ParseError};

/// An ordinal below ω^ω in Cantor normal form.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Ordinal {
    coeffs: Vec<u64>,
}

impl Ordinal {
    pub fn zero() -> Self {
        Ordinal { coeffs: Vec::new() }
    }

    pub fn from_nat(n: u64) -> Self {
        Self::from_coeffs(vec![n])
    }

    /// `ω^e`.
    pub fn omega_pow(e: usize) -> Self {
        let mut coeffs = vec![0; e + 1];
        coeffs[e] = 1;
        Ordinal { coeffs }
    }

    /// Builds `Σ ω^i · coeffs[i]`, dropping trailing zero coefficients.
    pub fn from_coeffs(mut coeffs: Vec<u64>) -> Self {
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        Ordinal { coeffs }
    }

    /// Coefficients from `ω^0` upwards; empty for zero.
    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    /// The coefficient of `ω^i`.
    pub fn coeff(&self, i: usize) -> u64 {
        self.coeffs.get(i).copied().unwrap_or(0)
    }

    /// The coefficients padded (or truncated) to exactly `d` entries.
    pub fn coeffs_padded(&self, d: usize) -> Vec<u64> {
        (0..d).map(|i| self.coeff(i)).collect()
    }

    /// Number of coefficient slots needed: the smallest `d` with `self < ω^d`.
    pub fn width(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_successor(&self) -> bool {
        self.coeff(0) > 0
    }

    pub fn is_limit(&self) -> bool {
        !self.is_zero() && self.coeff(0) == 0
    }

    pub fn predecessor(&self) -> Option<Ordinal> {
        if !self.is_successor() {
            return None;
        }
        let mut c = self.coeffs.clone();
        c[0] -= 1;
        Some(Self::from_coeffs(c))
    }

    pub fn successor(&self) -> Ordinal {
        let mut c = self.coeffs_padded(self.width().max(1));
        c[0] += 1;
        Self::from_coeffs(c)
    }

    /// Natural (Hessenberg) sum: coefficient-wise addition.
    pub fn natural_sum(&self, other: &Ordinal) -> Ordinal {
        let w = self.width().max(other.width());
        Self::from_coeffs((0..w).map(|i| self.coeff(i) + other.coeff(i)).collect())
    }

    /// The `n`-th element of the fundamental sequence of a limit ordinal.
    ///
    /// For `λ = γ + ω^i` with `i ≥ 1` the lowest nonzero term, `λ(n) = γ + ω^{i-1}·(n+1)`.
    /// Returns `None` for zero and successors.
    pub fn fundamental(&self, n: u64) -> Option<Ordinal> {
        if !self.is_limit() {
            return None;
        }
        let i = self.coeffs.iter().position(|&c| c != 0)?;
        let mut c = self.coeffs.clone();
        c[i] -= 1;
        c[i - 1] = n.checked_add(1)?;
        Some(Self::from_coeffs(c))
    }
}

impl Ord for Ordinal {
    fn cmp(&self, other: &Self) -> Ordering {
        self.width().cmp(&other.width()).then_with(|| {
            for i in (0..self.width()).rev() {
                match self.coeffs[i].cmp(&other.coeffs[i]) {
                    Ordering::Equal => continue,
                    o => return o,
                }
            }
            Ordering::Equal
        })
    }
}

impl PartialOrd for Ordinal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Ordinal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for i in (0..self.width()).rev() {
            let c = self.coeffs[i];
            if c == 0 {
                continue;
            }
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            match (i, c) {
                (0, c) => write!(f, "{c}")?,
                (1, 1) => f.write_str("w")?,
                (1, c) => write!(f, "w*{c}")?,
                (e, 1) => write!(f, "w^{e}")?,
                (e, c) => write!(f, "w^{e}*{c}")?,
            }
        }
        Ok(())
    }
}

impl FromStr for Ordinal {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        text::parse_ordinal(s)
    }
}

/// Raised when a hierarchy value would exceed the caller's cap.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("fast-growing value exceeds cap {cap}")]
pub struct CapExceeded {
    pub cap: BigUint,
}

/// Memoizing evaluator for `F_α(x)` with a hard cap on every value.
///
/// `F_0(x) = x+1`, `F_{β+1}(x) = F_β^{x+1}(x)` and `F_λ(x) = F_{λ(x)}(x)`.
#[derive(Debug, Clone)]
pub struct FastGrowing {
    cap: BigUint,
    memo: HashMap<(Ordinal, BigUint), BigUint>,
}

impl FastGrowing {
    pub fn new(cap: BigUint) -> Self {
        FastGrowing { cap, memo: HashMap::new() }
    }

    /// Evaluator whose cap is `2^64 - 1`.
    pub fn u64_capped() -> Self {
        Self::new(BigUint::from(u64::MAX))
    }

    pub fn cap(&self) -> &BigUint {
        &self.cap
    }

    fn exceeded(&self) -> CapExceeded {
        CapExceeded { cap: self.cap.clone() }
    }

    fn check(&self, v: BigUint) -> Result<BigUint, CapExceeded> {
        if v > self.cap {
            Err(self.exceeded())
        } else {
            Ok(v)
        }
    }

    /// `F_α(x)`.
    pub fn eval(&mut self, alpha: &Ordinal, x: &BigUint) -> Result<BigUint, CapExceeded> {
        if *x > self.cap {
            return Err(self.exceeded());
        }
        let key = (alpha.clone(), x.clone());
        if let Some(v) = self.memo.get(&key) {
            return Ok(v.clone());
        }
        let v = if alpha.is_zero() {
            self.check(x + 1u32)?
        } else if let Some(beta) = alpha.predecessor() {
            if beta.is_zero() {
                // F_1(x) = 2x + 1
                self.check(x * 2u32 + 1u32)?
            } else {
                // Every F_β with β ≥ 1 at least doubles, so this loop stops
                // within log2(cap) rounds once the cap is in reach.
                let rounds = x + 1u32;
                let mut v = x.clone();
                let mut k = BigUint::zero();
                while k < rounds {
                    v = self.eval(&beta, &v)?;
                    k += 1u32;
                }
                v
            }
        } else {
            let n = x.to_u64().ok_or_else(|| self.exceeded())?;
            let next = alpha.fundamental(n).ok_or_else(|| self.exceeded())?;
            self.eval(&next, x)?
        };
        self.memo.insert(key, v.clone());
        Ok(v)
    }

    /// `F_α^k(x)`, the `k`-fold iterate.
    pub fn iterate(&mut self, alpha: &Ordinal, k: u64, x: &BigUint) -> Result<BigUint, CapExceeded> {
        let mut v = x.clone();
        for _ in 0..k {
            v = self.eval(alpha, &v)?;
        }
        Ok(v)
    }

    /// `F_α(x)` as a `u64`; convenient for grid-sized arguments.
    pub fn eval_u64(&mut self, alpha: &Ordinal, x: u64) -> Result<u64, CapExceeded> {
        let v = self.eval(alpha, &BigUint::from(x))?;
        v.to_u64().ok_or_else(|| self.exceeded())
    }

    pub fn iterate_u64(&mut self, alpha: &Ordinal, k: u64, x: u64) -> Result<u64, CapExceeded> {
        let v = self.iterate(alpha, k, &BigUint::from(x))?;
        v.to_u64().ok_or_else(|| self.exceeded())
    }
}

/// One-shot `F_α(n)`, failing with [`CapExceeded`] if any intermediate value exceeds `cap`.
pub fn f_eval(alpha: &Ordinal, n: &BigUint, cap: &BigUint) -> Result<BigUint, CapExceeded> {
    FastGrowing::new(cap.clone()).eval(alpha, n)
}

/// `2^bits - 1`, a handy cap.
pub fn cap_bits(bits: u32) -> BigUint {
    (BigUint::one() << bits) - 1u32
}
