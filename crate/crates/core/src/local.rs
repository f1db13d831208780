//! Hilbert symbols at all places, Hasse-Witt invariants, and complete
//! invariant profiles of diagonal forms.
//!
//! The production path is the closed-form local formulas (valuations plus
//! Legendre symbols at odd p, the unit characters (u-1)/2 and (u^2-1)/8 at 2,
//! signs at the real place). The solvability definition itself is exercised
//! against these formulas by a brute-force Hensel oracle that lives in the
//! test suite.

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

use crate::arith::{factor, legendre, square_class, Place, Rational, SquareClass};
use crate::error::{Error, Result};
use crate::forms::{DiagonalForm, Signature};

/// Hilbert symbol `(a,b)_v`: +1 iff `z^2 = a x^2 + b y^2` has a nontrivial
/// solution in the completion at `v`.
pub fn hilbert(a: &Rational, b: &Rational, v: &Place) -> Result<i32> {
    if a.is_zero() || b.is_zero() {
        return Err(Error::ZeroArgument("hilbert"));
    }
    // The symbol only depends on square classes, so reduce to signed
    // squarefree integers first; valuations are then 0 or 1.
    let a = square_class(a)?;
    let b = square_class(b)?;
    Ok(hilbert_squarefree(a.representative(), b.representative(), v))
}

fn hilbert_squarefree(a: &BigInt, b: &BigInt, v: &Place) -> i32 {
    match v {
        Place::Infinity => {
            if a.is_negative() && b.is_negative() {
                -1
            } else {
                1
            }
        }
        Place::Prime(p) if p.is_even() => {
            let (alpha, u) = split_once(a, p);
            let (beta, w) = split_once(b, p);
            let mut e = eps2(&u) * eps2(&w);
            if alpha == 1 {
                e += omega2(&w);
            }
            if beta == 1 {
                e += omega2(&u);
            }
            if e % 2 == 0 {
                1
            } else {
                -1
            }
        }
        Place::Prime(p) => {
            let (alpha, u) = split_once(a, p);
            let (beta, w) = split_once(b, p);
            let mut s = 1i32;
            if alpha == 1 && beta == 1 {
                // (-1)^{(p-1)/2}
                let pm = ((p - 1u32) / 2u32).mod_floor(&BigInt::from(2));
                if pm == BigInt::from(1) {
                    s = -s;
                }
            }
            if beta == 1 {
                s *= legendre(&u, p).expect("p odd prime");
            }
            if alpha == 1 {
                s *= legendre(&w, p).expect("p odd prime");
            }
            s
        }
    }
}

/// Split a squarefree integer as p^e * unit with e in {0,1}.
fn split_once(n: &BigInt, p: &BigInt) -> (u32, BigInt) {
    if n.is_multiple_of(p) {
        (1, n / p)
    } else {
        (0, n.clone())
    }
}

/// (u-1)/2 mod 2 for odd u.
fn eps2(u: &BigInt) -> i64 {
    if u.mod_floor(&BigInt::from(4)) == BigInt::from(3) {
        1
    } else {
        0
    }
}

/// (u^2-1)/8 mod 2 for odd u.
fn omega2(u: &BigInt) -> i64 {
    let m = u.mod_floor(&BigInt::from(8));
    if m == BigInt::from(3) || m == BigInt::from(5) {
        1
    } else {
        0
    }
}

/// Hasse-Witt invariant of a diagonal form at a place: the product of the
/// Hilbert symbols over coefficient pairs i < j.
pub fn hasse_witt(f: &DiagonalForm, v: &Place) -> i32 {
    let classes: Vec<SquareClass> = f
        .coefficients()
        .iter()
        .map(|c| square_class(c).expect("nonzero coefficient"))
        .collect();
    let mut s = 1i32;
    for i in 0..classes.len() {
        for j in (i + 1)..classes.len() {
            s *= hilbert_squarefree(
                classes[i].representative(),
                classes[j].representative(),
                v,
            );
        }
    }
    s
}

/// The finite set of places where a Hasse-Witt invariant of `f` could be -1:
/// the real place, 2, and every odd prime dividing a coefficient's numerator
/// or denominator. Outside this set all symbols between coefficients are
/// unit-unit symbols at an odd place, hence +1.
pub fn relevant_places(f: &DiagonalForm) -> BTreeSet<Place> {
    let mut out = BTreeSet::new();
    out.insert(Place::Infinity);
    out.insert(Place::prime(2));
    for c in f.coefficients() {
        let nd = c.numer() * c.denom();
        for (p, _) in factor(&nd).expect("nonzero coefficient") {
            if !p.is_even() {
                out.insert(Place::Prime(p));
            }
        }
    }
    out
}

/// The complete classification datum of a diagonal form up to rational
/// equivalence: rank, signature, discriminant class, and the finite set of
/// places with Hasse-Witt invariant -1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InvariantProfile {
    pub rank: usize,
    pub signature: Signature,
    pub discriminant: SquareClass,
    pub negative_places: BTreeSet<Place>,
}

impl InvariantProfile {
    /// Hasse-Witt invariant at any place, read off the sparse set.
    pub fn epsilon(&self, v: &Place) -> i32 {
        if self.negative_places.contains(v) {
            -1
        } else {
            1
        }
    }
}

impl fmt::Display for InvariantProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "rank {}, signature {}, disc {}, eps=-1 at {{",
            self.rank, self.signature, self.discriminant
        )?;
        for (i, p) in self.negative_places.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, "}}")
    }
}

/// Compute the full invariant profile of a diagonal form. Hasse-Witt
/// invariants are evaluated only at `relevant_places(f)`; every other place
/// is provably +1.
pub fn profile(f: &DiagonalForm) -> InvariantProfile {
    let mut negative_places = BTreeSet::new();
    for v in relevant_places(f) {
        if hasse_witt(f, &v) == -1 {
            negative_places.insert(v);
        }
    }
    let p = InvariantProfile {
        rank: f.rank(),
        signature: f.signature(),
        discriminant: f.discriminant(),
        negative_places,
    };
    debug_assert!(
        p.negative_places.len() % 2 == 0,
        "Hilbert reciprocity: even number of negative places"
    );
    debug_assert_eq!(
        p.epsilon(&Place::Infinity),
        epsilon_infinity_from_signature(&p.signature),
        "real Hasse-Witt invariant is determined by the signature"
    );
    p
}

/// `(-1)^{s(s-1)/2}` for `s` negative squares.
pub fn epsilon_infinity_from_signature(sig: &Signature) -> i32 {
    if (sig.neg * sig.neg.saturating_sub(1) / 2) % 2 == 0 {
        1
    } else {
        -1
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{rat, rat_int};

    fn form(cs: &[i64]) -> DiagonalForm {
        DiagonalForm::from_ints(cs).unwrap()
    }

    fn places() -> Vec<Place> {
        vec![
            Place::prime(2),
            Place::prime(3),
            Place::prime(5),
            Place::prime(7),
            Place::prime(11),
            Place::Infinity,
        ]
    }

    #[test]
    fn hilbert_examples() {
        for v in places() {
            assert_eq!(hilbert(&rat_int(1), &rat_int(5), &v).unwrap(), 1, "at {v}");
        }
        assert_eq!(
            hilbert(&rat_int(-1), &rat_int(-1), &Place::Infinity).unwrap(),
            -1
        );
        assert_eq!(
            hilbert(&rat_int(-1), &rat_int(-1), &Place::prime(2)).unwrap(),
            -1
        );
        assert_eq!(
            hilbert(&rat_int(3), &rat_int(3), &Place::prime(3)).unwrap(),
            -1
        );
        assert!(hilbert(&rat_int(0), &rat_int(1), &Place::Infinity).is_err());
    }

    #[test]
    fn hilbert_symbol_laws() {
        let values: Vec<Rational> = [-10i64, -7, -5, -3, -2, -1, 2, 3, 5, 6, 7, 15]
            .iter()
            .map(|&n| rat_int(n))
            .collect();
        for v in places() {
            for a in &values {
                for b in &values {
                    let ab = hilbert(a, b, &v).unwrap();
                    // symmetry
                    assert_eq!(ab, hilbert(b, a, &v).unwrap());
                    // (a, -a) = 1 and (a, s^2) = 1
                    assert_eq!(hilbert(a, &-a.clone(), &v).unwrap(), 1);
                    let s2 = rat(9, 4);
                    assert_eq!(hilbert(a, &s2, &v).unwrap(), 1);
                    // bilinearity in the second slot
                    for c in &values {
                        let bc = b * c;
                        assert_eq!(
                            hilbert(a, &bc, &v).unwrap(),
                            ab * hilbert(a, c, &v).unwrap(),
                            "a={a} b={b} c={c} at {v}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn hasse_witt_examples() {
        for v in places() {
            assert_eq!(hasse_witt(&form(&[1, 1, 1]), &v), 1);
            assert_eq!(hasse_witt(&form(&[1, 1, 1, 1, 1, 1, -3]), &v), 1);
        }
        assert_eq!(hasse_witt(&form(&[1, 1, 1, 3, 3, 3]), &Place::prime(3)), -1);
        assert_eq!(hasse_witt(&form(&[1, 1, 1, 3, 3, 3]), &Place::prime(2)), -1);
    }

    #[test]
    fn relevant_places_examples() {
        let base: BTreeSet<Place> = [Place::Infinity, Place::prime(2)].into();
        assert_eq!(relevant_places(&form(&[1, 1])), base);

        let mut with3 = base.clone();
        with3.insert(Place::prime(3));
        assert_eq!(relevant_places(&form(&[1, 1, 1, 1, 1, 1, -3])), with3);

        let f = DiagonalForm::new(vec![rat(5, 6), rat_int(7)]).unwrap();
        let expected: BTreeSet<Place> = [
            Place::Infinity,
            Place::prime(2),
            Place::prime(3),
            Place::prime(5),
            Place::prime(7),
        ]
        .into();
        assert_eq!(relevant_places(&f), expected);
    }

    #[test]
    fn profile_examples() {
        let p = profile(&form(&[1, -1]));
        assert_eq!(p.rank, 2);
        assert_eq!(p.signature, Signature { pos: 1, neg: 1 });
        assert_eq!(p.discriminant, SquareClass::of_int(-1));
        assert!(p.negative_places.is_empty());

        let p = profile(&form(&[1, 1, 1, 1, 1, 1, -3]));
        assert_eq!(p.rank, 7);
        assert_eq!(p.signature, Signature { pos: 6, neg: 1 });
        assert_eq!(p.discriminant, SquareClass::of_int(-3));
        assert!(p.negative_places.is_empty());

        let p = profile(&form(&[1, 1, 1, 3, 3, 3]));
        assert_eq!(p.rank, 6);
        assert_eq!(p.signature, Signature { pos: 6, neg: 0 });
        assert_eq!(p.discriminant, SquareClass::of_int(3));
        let expected: BTreeSet<Place> = [Place::prime(2), Place::prime(3)].into();
        assert_eq!(p.negative_places, expected);
    }

    #[test]
    fn profile_invariant_under_permutation_and_square_scaling() {
        let f = form(&[2, -3, 5, 7]);
        let g = form(&[7, 5, -3, 2]);
        assert_eq!(profile(&f), profile(&g));
        // multiply one coefficient by a square
        let mut cs = f.coefficients().to_vec();
        cs[1] *= rat(49, 9);
        let h = DiagonalForm::new(cs).unwrap();
        assert_eq!(profile(&f), profile(&h));
    }

    #[test]
    fn reciprocity_on_fixed_forms() {
        // product of epsilon over all places (only relevant ones can be -1)
        for f in [
            form(&[1, 1, 1, 3, 3, 3]),
            form(&[2, 3, 5]),
            form(&[-1, -1]),
            form(&[6, -10, 15, 7]),
            form(&[1, 1, 1, 1, 1, 1, -3]),
        ] {
            let prod: i32 = relevant_places(&f)
                .iter()
                .map(|v| hasse_witt(&f, v))
                .product();
            assert_eq!(prod, 1, "reciprocity for {f}");
        }
    }

    #[test]
    fn epsilon_infinity_matches_signature_rule() {
        for f in [
            form(&[1, 1]),
            form(&[1, -1]),
            form(&[-1, -1]),
            form(&[-1, -1, -1]),
            form(&[-1, -1, -1, -1]),
            form(&[1, -2, -3, -5, 7]),
        ] {
            assert_eq!(
                hasse_witt(&f, &Place::Infinity),
                epsilon_infinity_from_signature(&f.signature()),
                "for {f}"
            );
        }
    }
}
