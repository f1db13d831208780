//! Exact integer and rational arithmetic: factorization, square classes,
//! Legendre symbols, and local square tests.
//!
//! Everything here is pure and exact. Rationals are `num_rational::BigRational`
//! values, always reduced with a positive denominator. Zero inputs are rejected
//! wherever a square class or residue symbol is meaningless (the forms handled
//! downstream are non-degenerate, so a zero coefficient is always a caller bug).

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::Error;

/// Exact rational number, reduced, denominator > 0.
pub type Rational = BigRational;

/// Parse a rational from `"p/q"` or a plain integer string.
pub fn parse_rational(text: &str) -> Result<Rational, Error> {
    BigRational::from_str(text.trim()).map_err(|e| Error::Parse {
        offset: 0,
        message: format!("invalid rational {text:?}: {e}"),
    })
}

pub fn rat_int(n: i64) -> Rational {
    BigRational::from_integer(BigInt::from(n))
}

pub fn rat(n: i64, d: i64) -> Rational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

// ---------------------------------------------------------------------------
// Primality and factorization
// ---------------------------------------------------------------------------

const SMALL_PRIMES: [u32; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

/// Deterministic Miller-Rabin. The base set is proven complete below 3.3e24,
/// which covers anything this library meets in practice; beyond that the test
/// is still overwhelmingly reliable.
pub fn is_prime(n: &BigInt) -> bool {
    if n < &BigInt::from(2) {
        return false;
    }
    for &p in &SMALL_PRIMES {
        let p = BigInt::from(p);
        if n == &p {
            return true;
        }
        if n.is_multiple_of(&p) {
            return false;
        }
    }
    // n - 1 = d * 2^s with d odd
    let one = BigInt::one();
    let nm1 = n - &one;
    let s = nm1.trailing_zeros().unwrap_or(0);
    let d = &nm1 >> s;
    'witness: for &a in &SMALL_PRIMES {
        let mut x = BigInt::from(a).modpow(&d, n);
        if x.is_one() || x == nm1 {
            continue;
        }
        for _ in 1..s {
            x = x.modpow(&BigInt::from(2), n);
            if x == nm1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Brent-cycle Pollard rho; returns a nontrivial factor of composite odd `n`.
fn pollard_rho(n: &BigInt) -> BigInt {
    let one = BigInt::one();
    let two = BigInt::from(2);
    if n.is_multiple_of(&two) {
        return two;
    }
    let mut c = BigInt::one();
    loop {
        let f = |x: &BigInt| (x * x + &c) % n;
        let mut x = BigInt::from(2);
        let mut y = BigInt::from(2);
        let mut d = BigInt::one();
        while d.is_one() {
            x = f(&x);
            y = f(&f(&y));
            d = (&x - &y).abs().gcd(n);
        }
        if &d != n {
            return d;
        }
        c += &one;
    }
}

/// Prime factorization of `|n|` as (prime, exponent) pairs with strictly
/// increasing primes. Rejects zero. The sign is the caller's business.
///
/// Trial division up to 2^16 handles everything desk-scale; larger cofactors
/// fall back to Miller-Rabin plus Pollard rho.
pub fn factor(n: &BigInt) -> Result<Vec<(BigInt, u32)>, Error> {
    if n.is_zero() {
        return Err(Error::ZeroArgument("factor"));
    }
    let mut m = n.abs();
    let mut out: Vec<(BigInt, u32)> = Vec::new();
    let push = |p: BigInt, e: u32, out: &mut Vec<(BigInt, u32)>| {
        if e > 0 {
            out.push((p, e));
        }
    };

    let mut e2 = 0u32;
    while m.is_even() {
        m /= 2;
        e2 += 1;
    }
    push(BigInt::from(2), e2, &mut out);

    let mut d = BigInt::from(3);
    let limit = BigInt::from(1u32 << 16);
    while &d * &d <= m && d <= limit {
        let mut e = 0u32;
        while m.is_multiple_of(&d) {
            m /= &d;
            e += 1;
        }
        push(d.clone(), e, &mut out);
        d += 2;
    }

    // Whatever is left has no factor below 2^16.
    let mut stack = Vec::new();
    if !m.is_one() {
        stack.push(m);
    }
    let mut big: Vec<BigInt> = Vec::new();
    while let Some(m) = stack.pop() {
        if is_prime(&m) {
            big.push(m);
        } else {
            let f = pollard_rho(&m);
            stack.push(&m / &f);
            stack.push(f);
        }
    }
    big.sort();
    let mut i = 0;
    while i < big.len() {
        let mut e = 1u32;
        while i + e as usize != big.len() && big[i + e as usize] == big[i] {
            e += 1;
        }
        out.push((big[i].clone(), e));
        i += e as usize;
    }
    out.sort_by(|a, b| a.0.cmp(&b.0));
    Ok(out)
}

// ---------------------------------------------------------------------------
// Square classes
// ---------------------------------------------------------------------------

/// A nonzero rational modulo nonzero rational squares, stored as its canonical
/// signed squarefree integer representative.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SquareClass(BigInt);

impl SquareClass {
    /// Square class of a nonzero rational.
    pub fn of(r: &Rational) -> Result<Self, Error> {
        if r.is_zero() {
            return Err(Error::ZeroArgument("square_class"));
        }
        // n/d and n*d differ by the square d^2.
        let nd = r.numer() * r.denom();
        let mut rep = BigInt::one();
        for (p, e) in factor(&nd)? {
            if e % 2 == 1 {
                rep *= p;
            }
        }
        if nd.is_negative() {
            rep = -rep;
        }
        Ok(SquareClass(rep))
    }

    pub fn of_int(n: i64) -> Self {
        Self::of(&rat_int(n)).expect("nonzero integer")
    }

    pub fn representative(&self) -> &BigInt {
        &self.0
    }

    pub fn is_one(&self) -> bool {
        self.0.is_one()
    }

    pub fn is_positive(&self) -> bool {
        self.0.is_positive()
    }

    /// Product of two square classes, again squarefree.
    pub fn mul(&self, other: &SquareClass) -> SquareClass {
        let prod = BigRational::from_integer(&self.0 * &other.0);
        SquareClass::of(&prod).expect("product of nonzero classes")
    }

    pub fn to_rational(&self) -> Rational {
        BigRational::from_integer(self.0.clone())
    }

    /// Odd primes dividing the representative.
    pub fn odd_primes(&self) -> Vec<BigInt> {
        factor(&self.0)
            .expect("representative is nonzero")
            .into_iter()
            .map(|(p, _)| p)
            .filter(|p| !p.is_even())
            .collect()
    }
}

impl fmt::Display for SquareClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Convenience: square class of an arbitrary nonzero rational.
pub fn square_class(r: &Rational) -> Result<SquareClass, Error> {
    SquareClass::of(r)
}

// ---------------------------------------------------------------------------
// Places
// ---------------------------------------------------------------------------

/// A place of the rationals: a finite prime or the real place.
///
/// The ordering puts finite primes first (ascending) and the real place last,
/// which is the order obstruction reports use.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Place {
    Prime(BigInt),
    Infinity,
}

impl Place {
    pub fn prime(p: u32) -> Self {
        Place::Prime(BigInt::from(p))
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, Place::Prime(_))
    }
}

impl fmt::Display for Place {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Place::Prime(p) => write!(f, "{p}"),
            Place::Infinity => write!(f, "inf"),
        }
    }
}

impl FromStr for Place {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        let s = s.trim();
        if s == "inf" || s == "oo" || s == "infinity" {
            return Ok(Place::Infinity);
        }
        let p: BigInt = s.parse().map_err(|_| Error::Parse {
            offset: 0,
            message: format!("invalid place {s:?}: expected a prime or \"inf\""),
        })?;
        if !is_prime(&p) {
            return Err(Error::Parse {
                offset: 0,
                message: format!("invalid place {s:?}: {p} is not prime"),
            });
        }
        Ok(Place::Prime(p))
    }
}

// ---------------------------------------------------------------------------
// Residue symbols and local squares
// ---------------------------------------------------------------------------

/// Legendre symbol (a|p) for an odd prime p, via Euler's criterion.
pub fn legendre(a: &BigInt, p: &BigInt) -> Result<i32, Error> {
    if p.is_even() || !is_prime(p) {
        return Err(Error::NotAnOddPrime(p.clone()));
    }
    let a = a.mod_floor(p);
    if a.is_zero() {
        return Ok(0);
    }
    let e = (p - BigInt::one()) / BigInt::from(2);
    let r = a.modpow(&e, p);
    if r.is_one() {
        Ok(1)
    } else {
        Ok(-1)
    }
}

/// p-adic valuation of a nonzero rational.
pub fn valuation(r: &Rational, p: &BigInt) -> i64 {
    assert!(!r.is_zero(), "valuation of zero");
    let count = |mut n: BigInt| {
        let mut v = 0i64;
        while n.is_multiple_of(p) {
            n /= p;
            v += 1;
        }
        v
    };
    count(r.numer().abs()) - count(r.denom().clone())
}

/// Unit part of `r` at `p` reduced mod `modulus` (numerator times inverse
/// denominator). `modulus` must be a power of `p` coprime to the unit part.
fn unit_mod(r: &Rational, p: &BigInt, modulus: &BigInt) -> BigInt {
    let v = valuation(r, p);
    let mut num = r.numer().clone();
    let mut den = r.denom().clone();
    if v >= 0 {
        num /= p.pow(v as u32);
    } else {
        den /= p.pow((-v) as u32);
    }
    let num = num.mod_floor(modulus);
    let den = den.mod_floor(modulus);
    let inv = mod_inverse(&den, modulus).expect("denominator unit mod p^k");
    (num * inv).mod_floor(modulus)
}

fn mod_inverse(a: &BigInt, m: &BigInt) -> Option<BigInt> {
    let e = a.extended_gcd(m);
    if e.gcd.is_one() {
        Some(e.x.mod_floor(m))
    } else {
        None
    }
}

/// Is `r` a square in the completion at `v`?
///
/// At the real place this is positivity; at an odd prime, even valuation with
/// a quadratic-residue unit part; at 2, even valuation with unit part 1 mod 8.
pub fn is_local_square(r: &Rational, v: &Place) -> Result<bool, Error> {
    if r.is_zero() {
        return Err(Error::ZeroArgument("is_local_square"));
    }
    match v {
        Place::Infinity => Ok(r.is_positive()),
        Place::Prime(p) => {
            if valuation(r, p) % 2 != 0 {
                return Ok(false);
            }
            if p.is_even() {
                let u = unit_mod(r, p, &BigInt::from(8));
                Ok(u.is_one())
            } else {
                let u = unit_mod(r, p, p);
                Ok(legendre(&u, p)? == 1)
            }
        }
    }
}
