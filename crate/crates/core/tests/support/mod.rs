//! Shared test support: independent brute-force oracles and seeded random
//! generators.
//!
//! The oracles here deliberately avoid the production code paths they check.
//! The Hilbert-symbol oracle decides local solvability of z^2 = ax^2 + by^2
//! from the definition, by bounded Hensel lifting of residue solutions; the
//! local-square oracle searches squares in residue rings; the torsion oracle
//! searches for finite-order elements over lattice translates directly.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::rngs::StdRng;
use rand::Rng;

use cuspcert_core::arith::{Place, Rational};
use cuspcert_core::bieberbach::{AffineIsometry, GroupClosure};
use cuspcert_core::forms::DiagonalForm;
use cuspcert_core::matrix::{vec_add, Matrix};

// ---------------------------------------------------------------------------
// Hilbert symbol oracle
// ---------------------------------------------------------------------------

/// Decide (a,b)_v by brute force: sign analysis at the real place, bounded
/// Hensel search for points on z^2 = a x^2 + b y^2 at finite places.
pub fn hilbert_oracle(a: &Rational, b: &Rational, v: &Place) -> i32 {
    assert!(!a.is_zero() && !b.is_zero());
    match v {
        Place::Infinity => {
            if a.is_positive() || b.is_positive() {
                1
            } else {
                -1
            }
        }
        Place::Prime(p) => {
            let p = p.to_u64().expect("oracle primes are small");
            // clear denominators by squares: a x^2 with x -> x/den(a) etc.
            let ai = squarefree_i64(a);
            let bi = squarefree_i64(b);
            if ternary_isotropic([ai, bi, -1], p) {
                1
            } else {
                -1
            }
        }
    }
}

/// Signed squarefree integer representing the square class of r, computed by
/// local trial division (independent of arith::square_class).
fn squarefree_i64(r: &Rational) -> i64 {
    let nd = r.numer() * r.denom();
    let mut n = nd.to_i64().expect("oracle inputs are small");
    let sign = n.signum();
    n = n.abs();
    let mut out = 1i64;
    let mut d = 2i64;
    while d * d <= n {
        let mut e = 0;
        while n % d == 0 {
            n /= d;
            e += 1;
        }
        if e % 2 == 1 {
            out *= d;
        }
        d += 1;
    }
    out * n * sign
}

fn vp_i64(mut n: i64, p: u64) -> u32 {
    assert!(n != 0);
    n = n.abs();
    let p = p as i64;
    let mut v = 0;
    while n % p == 0 {
        n /= p;
        v += 1;
    }
    v
}

/// Is the form c0 x^2 + c1 y^2 + c2 z^2 isotropic over Q_p?
///
/// Levels hold primitive residue solutions mod p^j. A class exits early when
/// its gradient has exactly known valuation s with j >= 2s+1 (Hensel lifts a
/// true zero from it). Any class surviving to level K = 2 v_p(4 c0 c1 c2) + 3
/// also certifies a zero: a primitive solution mod p^K always has a gradient
/// entry of valuation at most (K-1)/2, because the coefficient valuations are
/// at most v_p(c0 c1 c2) after normalization.
pub fn ternary_isotropic(coeffs: [i64; 3], p: u64) -> bool {
    // per-coefficient square stripping
    let mut c: Vec<i64> = coeffs
        .iter()
        .map(|&x| squarefree_i64(&BigRational::from_integer(BigInt::from(x))))
        .collect();
    // strip common p factors (dividing the whole form does not change zeros)
    let pi = p as i64;
    while c.iter().all(|&x| x % pi == 0) {
        for x in c.iter_mut() {
            *x /= pi;
        }
    }
    let tau = vp_i64(4 * c[0] * c[1] * c[2], p);
    let cap = 2 * tau + 3;

    let mut modulus: i128 = p as i128;
    // level 1: primitive solutions mod p
    let mut classes: Vec<[i128; 3]> = Vec::new();
    for x in 0..p as i128 {
        for y in 0..p as i128 {
            for z in 0..p as i128 {
                if x == 0 && y == 0 && z == 0 {
                    continue;
                }
                let f = c[0] as i128 * x * x + c[1] as i128 * y * y + c[2] as i128 * z * z;
                if f.rem_euclid(modulus) == 0 {
                    classes.push([x, y, z]);
                }
            }
        }
    }

    for level in 1..=cap {
        if classes.is_empty() {
            return false;
        }
        // smooth exit
        for v in &classes {
            if let Some(s) = exact_gradient_valuation(&c, v, p, level) {
                if level >= 2 * s + 1 {
                    return true;
                }
            }
        }
        if level == cap {
            // survivors at full precision certify a zero
            return true;
        }
        // lift to the next level
        let next_modulus = modulus * p as i128;
        let mut next: Vec<[i128; 3]> = Vec::new();
        for v in &classes {
            for tx in 0..p as i128 {
                for ty in 0..p as i128 {
                    for tz in 0..p as i128 {
                        let w = [
                            v[0] + tx * modulus,
                            v[1] + ty * modulus,
                            v[2] + tz * modulus,
                        ];
                        let f = c[0] as i128 * w[0] * w[0]
                            + c[1] as i128 * w[1] * w[1]
                            + c[2] as i128 * w[2] * w[2];
                        if f.rem_euclid(next_modulus) == 0 {
                            next.push(w);
                        }
                    }
                }
            }
        }
        assert!(
            next.len() < 2_000_000,
            "oracle class explosion at p={p}, coeffs {coeffs:?}"
        );
        classes = next;
        modulus = next_modulus;
    }
    unreachable!("loop returns at cap");
}

/// Exact valuation of the gradient (2 c_i v_i) when certain: an entry with a
/// nonzero residue has exact valuation; zero residues only say ">= level".
fn exact_gradient_valuation(c: &[i64], v: &[i128; 3], p: u64, level: u32) -> Option<u32> {
    let mut best_exact: Option<u32> = None;
    let mut sentinel_min = u32::MAX;
    for i in 0..3 {
        let coeff_val = vp_i64(2 * c[i], p);
        if v[i] == 0 {
            sentinel_min = sentinel_min.min(coeff_val + level);
        } else {
            let s = coeff_val + vp_i64(v[i] as i64, p);
            best_exact = Some(best_exact.map_or(s, |b: u32| b.min(s)));
        }
    }
    // a sentinel only bounds its entry from below, so the minimum is still
    // exact when the best exact entry does not exceed every sentinel
    match best_exact {
        Some(s) if s <= sentinel_min => Some(s),
        _ => None,
    }
}

/// Is r a square in the completion at v? Brute-force residue search with
/// Hensel-sufficient precision (p^3 at odd p, 2^6 at 2).
pub fn local_square_oracle(r: &Rational, v: &Place) -> bool {
    assert!(!r.is_zero());
    match v {
        Place::Infinity => r.is_positive(),
        Place::Prime(p) => {
            let p = p.to_u64().expect("oracle primes are small");
            let s = squarefree_i64(r);
            let val = vp_i64(s, p);
            if val % 2 == 1 {
                return false;
            }
            let u = s / (p as i64).pow(val);
            let k = if p == 2 { 6 } else { 3 };
            let modulus = (p as i128).pow(k);
            let target = (u as i128).rem_euclid(modulus);
            (0..modulus).any(|z| (z * z).rem_euclid(modulus) == target)
        }
    }
}

/// Hasse-Witt invariant computed entirely through the oracle symbols.
pub fn hasse_witt_oracle(f: &DiagonalForm, v: &Place) -> i32 {
    let cs = f.coefficients();
    let mut s = 1;
    for i in 0..cs.len() {
        for j in (i + 1)..cs.len() {
            s *= hilbert_oracle(&cs[i], &cs[j], v);
        }
    }
    s
}

// ---------------------------------------------------------------------------
// Torsion oracle
// ---------------------------------------------------------------------------

/// Exhaustive finite-order search: try every holonomy element translated by
/// lattice vectors with coefficients in a radius-2 box, powering up to the
/// holonomy order. Only sensible in tiny dimensions.
pub fn torsion_oracle_is_torsion_free(c: &GroupClosure) -> bool {
    let basis = c.lattice.basis();
    let dim = c.dimension;
    let radius: i64 = 2;
    let mut coeffs = vec![-radius; basis.len()];
    let order_cap = c.holonomy_order();
    loop {
        // build the lattice vector for this coefficient tuple
        let mut l = vec![BigRational::zero(); dim];
        for (k, b) in coeffs.iter().zip(&basis) {
            let k = BigRational::from_integer(BigInt::from(*k));
            for (li, bi) in l.iter_mut().zip(b) {
                *li += &k * bi;
            }
        }
        for (a, v) in &c.cosets {
            if a.is_identity() {
                continue;
            }
            let g = AffineIsometry {
                linear: a.clone(),
                translation: vec_add(v, &l),
            };
            let mut power = g.clone();
            for _ in 1..=order_cap {
                if power.is_identity() {
                    return false;
                }
                power = power.compose(&g);
            }
        }
        // advance the coefficient tuple
        let mut i = 0;
        loop {
            if i == coeffs.len() {
                return true;
            }
            coeffs[i] += 1;
            if coeffs[i] <= radius {
                break;
            }
            coeffs[i] = -radius;
            i += 1;
        }
    }
}

// ---------------------------------------------------------------------------
// Random generators
// ---------------------------------------------------------------------------

/// Random nonzero squarefree rational supported on the given primes.
pub fn random_coefficient(rng: &mut StdRng, primes: &[i64]) -> Rational {
    let mut value = 1i64;
    for &p in primes {
        if rng.gen_bool(0.35) {
            value *= p;
        }
    }
    if rng.gen_bool(0.5) {
        value = -value;
    }
    BigRational::from_integer(BigInt::from(value))
}

pub fn random_form(rng: &mut StdRng, rank: usize, primes: &[i64]) -> DiagonalForm {
    let coefficients = (0..rank).map(|_| random_coefficient(rng, primes)).collect();
    DiagonalForm::new(coefficients).expect("nonzero coefficients")
}

/// Random invertible integer matrix with entries in [-bound, bound].
pub fn random_invertible(rng: &mut StdRng, n: usize, bound: i64) -> Matrix {
    loop {
        let rows: Vec<Vec<Rational>> = (0..n)
            .map(|_| {
                (0..n)
                    .map(|_| BigRational::from_integer(BigInt::from(rng.gen_range(-bound..=bound))))
                    .collect()
            })
            .collect();
        let m = Matrix::new(rows);
        if !m.det().is_zero() {
            return m;
        }
    }
}

/// Random non-degenerate symmetric matrix with small entries.
pub fn random_symmetric(rng: &mut StdRng, n: usize, bound: i64) -> Matrix {
    loop {
        let mut rows = vec![vec![BigRational::zero(); n]; n];
        for i in 0..n {
            for j in i..n {
                let e = BigRational::from_integer(BigInt::from(rng.gen_range(-bound..=bound)));
                rows[i][j] = e.clone();
                rows[j][i] = e;
            }
        }
        let m = Matrix::new(rows);
        if !m.det().is_zero() {
            return m;
        }
    }
}

pub fn standard_places() -> Vec<Place> {
    vec![
        Place::prime(2),
        Place::prime(3),
        Place::prime(5),
        Place::prime(7),
        Place::prime(11),
        Place::Infinity,
    ]
}
