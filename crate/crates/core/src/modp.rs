//! Mod-p binomial arithmetic.
//!
//! Binomial coefficients use the extended convention: `C(a, b) = 0` whenever
//! `a < 0`, `b < 0` or `b > a`. Everything else is computed digitwise with
//! Lucas' theorem, so arguments never have to be expanded to full size.

use num_bigint::BigUint;

use crate::error::{Error, Result};

/// Default rewrite budget of a single normal-form computation.
pub const DEFAULT_FUEL: u64 = 1_000_000;

/// Default bound on `|k|` for letter indices.
pub const DEFAULT_INDEX_BOUND: i64 = 1 << 48;

/// An element of `F_p`, always stored in `0..p`.
pub type Fp = u32;

/// The odd prime together with the global limits every computation runs under.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PrimeContext {
    p: u32,
    fuel: u64,
    index_bound: i64,
}

/// Returns a context iff `p` is an odd prime.
pub fn validate_prime(p: i64) -> Result<PrimeContext> {
    if p < 3 || p % 2 == 0 || p > u32::MAX as i64 {
        return Err(Error::NotOddPrime(p));
    }
    let mut d = 3;
    while d * d <= p {
        if p % d == 0 {
            return Err(Error::NotOddPrime(p));
        }
        d += 2;
    }
    Ok(PrimeContext {
        p: p as u32,
        fuel: DEFAULT_FUEL,
        index_bound: DEFAULT_INDEX_BOUND,
    })
}

impl PrimeContext {
    pub fn new(p: i64) -> Result<Self> {
        validate_prime(p)
    }

    pub fn with_fuel(mut self, fuel: u64) -> Result<Self> {
        if fuel == 0 {
            return Err(Error::BadLimit("fuel must be positive"));
        }
        self.fuel = fuel;
        Ok(self)
    }

    pub fn with_index_bound(mut self, bound: i64) -> Result<Self> {
        if bound < 1 {
            return Err(Error::BadLimit("index bound must be positive"));
        }
        self.index_bound = bound;
        Ok(self)
    }

    #[inline]
    pub fn p(&self) -> u32 {
        self.p
    }

    #[inline]
    pub fn p_i64(&self) -> i64 {
        self.p as i64
    }

    pub fn fuel(&self) -> u64 {
        self.fuel
    }

    pub fn index_bound(&self) -> i64 {
        self.index_bound
    }

    /// Checks that an index computed in wide arithmetic fits the bound.
    pub fn check_index(&self, k: i128) -> Result<i64> {
        if k.unsigned_abs() > self.index_bound as u128 {
            return Err(Error::IndexOverflow(format!(
                "|{k}| exceeds index bound {}",
                self.index_bound
            )));
        }
        Ok(k as i64)
    }

    /// `p^s` as a wide integer, or `IndexOverflow`.
    pub fn pow(&self, s: u32) -> Result<i128> {
        (self.p as i128)
            .checked_pow(s)
            .ok_or_else(|| Error::IndexOverflow(format!("{}^{s} does not fit", self.p)))
    }

    #[inline]
    pub fn reduce(&self, x: i128) -> Fp {
        x.rem_euclid(self.p as i128) as Fp
    }

    #[inline]
    pub fn add(&self, a: Fp, b: Fp) -> Fp {
        ((a as u64 + b as u64) % self.p as u64) as Fp
    }

    #[inline]
    pub fn mul(&self, a: Fp, b: Fp) -> Fp {
        ((a as u64 * b as u64) % self.p as u64) as Fp
    }

    #[inline]
    pub fn neg(&self, a: Fp) -> Fp {
        if a == 0 {
            0
        } else {
            self.p - a
        }
    }

    /// `(-1)^e` in `F_p`.
    #[inline]
    pub fn sign(&self, e: i64) -> Fp {
        if e.rem_euclid(2) == 0 {
            1
        } else {
            self.p - 1
        }
    }
}

/// Base-p digits of a nonnegative integer, least significant first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DigitSeq(pub Vec<u32>);

impl DigitSeq {
    pub fn digits(&self) -> &[u32] {
        &self.0
    }

    pub fn value(&self, ctx: &PrimeContext) -> u128 {
        self.0
            .iter()
            .rev()
            .fold(0u128, |acc, &d| acc * ctx.p as u128 + d as u128)
    }
}

pub fn padic_digits(m: i64, ctx: &PrimeContext) -> Result<DigitSeq> {
    if m < 0 {
        return Err(Error::NegativeInput(m));
    }
    let p = ctx.p_i64();
    let mut m = m;
    let mut digits = Vec::new();
    while m > 0 {
        digits.push((m % p) as u32);
        m /= p;
    }
    Ok(DigitSeq(digits))
}

/// Small binomial `C(a, b)` mod p for `0 <= a, b < p`.
fn small_binom(a: u64, b: u64, p: u64) -> u64 {
    if b > a {
        return 0;
    }
    let b = b.min(a - b);
    let mut num = 1u64;
    let mut den = 1u64;
    for i in 0..b {
        num = num * ((a - i) % p) % p;
        den = den * ((i + 1) % p) % p;
    }
    // den is a product of integers below p, hence a unit
    num * mod_pow(den, p - 2, p) % p
}

fn mod_pow(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * base % m;
        }
        base = base * base % m;
        exp >>= 1;
    }
    acc
}

/// `C(a, b) mod p` under the extended convention.
pub fn binom_ext(a: i64, b: i64, ctx: &PrimeContext) -> Fp {
    binom_ext_wide(a as i128, b as i128, ctx)
}

pub(crate) fn binom_ext_wide(a: i128, b: i128, ctx: &PrimeContext) -> Fp {
    if a < 0 || b < 0 || b > a {
        return 0;
    }
    let p = ctx.p as u128;
    let (mut a, mut b) = (a as u128, b as u128);
    let mut acc = 1u64;
    while b > 0 {
        let (da, db) = ((a % p) as u64, (b % p) as u64);
        if db > da {
            return 0;
        }
        acc = acc * small_binom(da, db, p as u64) % p as u64;
        a /= p;
        b /= p;
    }
    acc as Fp
}

/// Exact binomial coefficient. Rejects a negative top argument.
pub fn binom_exact(a: i64, b: i64) -> Result<BigUint> {
    if a < 0 {
        return Err(Error::NegativeTop(a));
    }
    if b < 0 || b > a {
        return Ok(BigUint::from(0u32));
    }
    let b = b.min(a - b) as u64;
    let a = a as u64;
    let mut acc = BigUint::from(1u32);
    for i in 0..b {
        acc *= a - i;
        acc /= i + 1;
    }
    Ok(acc)
}

/// `A(k, j) = C((p-1)(k-j) - 1, j)`.
pub fn a_coeff(k: i64, j: i64, ctx: &PrimeContext) -> Fp {
    let top = (ctx.p_i64() - 1) as i128 * (k as i128 - j as i128) - 1;
    binom_ext_wide(top, j as i128, ctx)
}

/// `alpha_s = (p^s - 1) / (p - 1)`, with `alpha_0 = 0`.
pub fn alpha(s: u32, ctx: &PrimeContext) -> Result<i64> {
    let ps = ctx.pow(s)?;
    i64::try_from((ps - 1) / (ctx.p as i128 - 1))
        .map_err(|_| Error::IndexOverflow(format!("alpha_{s} does not fit")))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx(p: i64) -> PrimeContext {
        validate_prime(p).unwrap()
    }

    #[test]
    fn primes() {
        assert_eq!(validate_prime(3).unwrap().p(), 3);
        assert_eq!(validate_prime(2), Err(Error::NotOddPrime(2)));
        assert_eq!(validate_prime(9), Err(Error::NotOddPrime(9)));
        assert_eq!(validate_prime(1), Err(Error::NotOddPrime(1)));
        assert_eq!(validate_prime(-7), Err(Error::NotOddPrime(-7)));
        assert!(validate_prime(7919).is_ok());
        assert!(validate_prime(7917).is_err());
    }

    #[test]
    fn limits() {
        assert!(ctx(3).with_fuel(0).is_err());
        assert!(ctx(3).with_index_bound(0).is_err());
        assert_eq!(ctx(3).with_fuel(5).unwrap().fuel(), 5);
    }

    #[test]
    fn digits() {
        assert_eq!(padic_digits(5, &ctx(3)).unwrap().0, vec![2, 1]);
        assert_eq!(padic_digits(0, &ctx(5)).unwrap().0, Vec::<u32>::new());
        assert_eq!(padic_digits(27, &ctx(3)).unwrap().0, vec![0, 0, 0, 1]);
        assert_eq!(padic_digits(-1, &ctx(3)), Err(Error::NegativeInput(-1)));
        for m in 0..500 {
            let c = ctx(7);
            assert_eq!(padic_digits(m, &c).unwrap().value(&c), m as u128);
        }
    }

    #[test]
    fn extended_binomials() {
        let c = ctx(3);
        assert_eq!(binom_ext(-1, 0, &c), 0);
        assert_eq!(binom_ext(2, 5, &c), 0);
        assert_eq!(binom_ext(5, 2, &c), 1);
        assert_eq!(binom_ext(0, 0, &c), 1);
        assert_eq!(binom_ext(4, -1, &c), 0);
    }

    #[test]
    fn exact_binomials() {
        assert_eq!(binom_exact(17, 0).unwrap(), BigUint::from(1u32));
        assert_eq!(binom_exact(11, 3).unwrap(), BigUint::from(165u32));
        assert_eq!(binom_exact(4, 7).unwrap(), BigUint::from(0u32));
        assert_eq!(binom_exact(-1, 0), Err(Error::NegativeTop(-1)));
        assert_eq!(
            binom_exact(100, 50).unwrap().to_string(),
            "100891344545564193334812497256"
        );
    }

    #[test]
    fn a_coefficients() {
        assert_eq!(a_coeff(3, 1, &ctx(3)), 0);
        assert_eq!(a_coeff(1, 0, &ctx(3)), 1);
        assert_eq!(a_coeff(0, 0, &ctx(5)), 0);
    }

    #[test]
    fn alphas() {
        let c = ctx(3);
        assert_eq!(alpha(0, &c).unwrap(), 0);
        assert_eq!(alpha(1, &c).unwrap(), 1);
        assert_eq!(alpha(2, &c).unwrap(), 4);
        assert_eq!(alpha(3, &ctx(5)).unwrap(), 31);
        assert!(matches!(alpha(200, &c), Err(Error::IndexOverflow(_))));
    }

    #[test]
    fn sign_and_field_ops() {
        let c = ctx(5);
        assert_eq!(c.sign(3), 4);
        assert_eq!(c.sign(-2), 1);
        assert_eq!(c.neg(0), 0);
        assert_eq!(c.reduce(-1), 4);
        assert_eq!(c.mul(4, 4), 1);
    }
}
