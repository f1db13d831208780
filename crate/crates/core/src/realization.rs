//! Feasibility and constructive realization of diagonal forms with prescribed
//! invariants, and the definite-complement construction for Lorentzian forms.
//!
//! `serre_feasible` checks the five classical existence conditions for a rank
//! n form with given discriminant, signature, and Hasse-Witt data.  `realize`
//! turns a feasible target into an actual diagonal form by peeling off one
//! coefficient at a time, always checking that the residual target stays
//! feasible before committing (splitting off a unit blindly can strand a
//! feasible target on an infeasible rank-2 residual).  Every output is
//! post-verified by recomputing its profile from scratch.

use std::collections::BTreeSet;

use num_traits::Signed;

use crate::arith::{is_local_square, rat_int, Place, Rational, SquareClass};
use crate::error::{Error, Result};
use crate::forms::{DiagonalForm, Signature};
use crate::local::{hilbert, profile, InvariantProfile};

/// A user-specified invariant target; feasibility is the whole point, so the
/// only structural requirements are the ones the types already carry.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TargetProfile {
    pub rank: usize,
    pub signature: Signature,
    pub discriminant: SquareClass,
    pub negative_places: BTreeSet<Place>,
}

impl TargetProfile {
    pub fn epsilon(&self, v: &Place) -> i32 {
        if self.negative_places.contains(v) {
            -1
        } else {
            1
        }
    }

    pub fn from_profile(p: &InvariantProfile) -> Self {
        TargetProfile {
            rank: p.rank,
            signature: p.signature,
            discriminant: p.discriminant.clone(),
            negative_places: p.negative_places.clone(),
        }
    }

    fn as_profile(&self) -> InvariantProfile {
        InvariantProfile {
            rank: self.rank,
            signature: self.signature,
            discriminant: self.discriminant.clone(),
            negative_places: self.negative_places.clone(),
        }
    }
}

/// The five existence conditions for a rank n form with discriminant d,
/// signature (r,s), and Hasse-Witt invariants eps:
///
///   1. eps_p = -1 at finitely many places, with product +1 over all places.
///   2. eps_p = +1 when n = 1; when n = 2, eps_p = +1 wherever d is in the
///      class of -1 locally.
///   3. r, s >= 0 and n = r + s.
///   4. sign(d) = (-1)^s.
///   5. eps_infinity = (-1)^{s(s-1)/2}.
///
/// Returns feasibility together with the violated condition numbers.
pub fn serre_feasible(t: &TargetProfile) -> (bool, Vec<u8>) {
    let mut violated = Vec::new();
    let s = t.signature.neg;

    // 1: the set is finite by construction; the product condition is parity
    if t.negative_places.len() % 2 != 0 {
        violated.push(1);
    }

    if t.rank == 1 && !t.negative_places.is_empty() {
        violated.push(2);
    } else if t.rank == 2 {
        let minus_d = SquareClass::of_int(-1).mul(&t.discriminant).to_rational();
        if t.negative_places
            .iter()
            .any(|v| is_local_square(&minus_d, v).unwrap_or(false))
        {
            violated.push(2);
        }
    }

    if t.rank == 0 || t.signature.rank() != t.rank {
        violated.push(3);
    }

    let want_negative = s % 2 == 1;
    if t.discriminant.is_positive() == want_negative {
        violated.push(4);
    }

    let eps_inf_required = if (s * s.saturating_sub(1) / 2) % 2 == 0 {
        1
    } else {
        -1
    };
    if t.epsilon(&Place::Infinity) != eps_inf_required {
        violated.push(5);
    }

    (violated.is_empty(), violated)
}

/// Construct a diagonal form whose profile equals the target exactly.
/// Infeasible targets are rejected with the violated-condition list; the
/// output is canonicalized (coefficients ascending by absolute value, then
/// sign) and post-verified against the target by full profile recomputation.
pub fn realize(t: &TargetProfile) -> Result<DiagonalForm> {
    let (ok, violated) = serre_feasible(t);
    if !ok {
        return Err(Error::Infeasible { violated });
    }
    let mut coefficients = realize_feasible(&t.as_profile())?;
    coefficients.sort_by(|a, b| a.abs().cmp(&b.abs()).then(a.cmp(b)));
    let form = DiagonalForm::new(coefficients)?;
    let got = profile(&form);
    if got != t.as_profile() {
        return Err(Error::NotCrystallographic(format!(
            "internal: realized form {form} has profile {got}, wanted {}",
            t.as_profile()
        )));
    }
    Ok(form)
}

fn realize_feasible(t: &InvariantProfile) -> Result<Vec<Rational>> {
    if t.rank == 1 {
        // the form is forced: <d>
        return Ok(vec![t.discriminant.to_rational()]);
    }
    if t.rank == 2 {
        return realize_rank_two(t);
    }
    // rank >= 3: peel off a coefficient whose residual target stays feasible;
    // +-1 almost always works and is tried first
    for a in squarefree_candidates(&t.signature) {
        let residual = remove_coefficient(t, &a);
        if serre_feasible(&TargetProfile::from_profile(&residual)).0 {
            let mut rest = realize_feasible(&residual)?;
            rest.push(a.to_rational());
            return Ok(rest);
        }
    }
    Err(Error::SearchExhausted {
        examined: CANDIDATE_BOUND,
        bound: CANDIDATE_BOUND,
    })
}

/// Residual target after removing one coefficient `a` from a diagonal form
/// with the given profile: for g = <a> + h,
///   disc h  = a * disc g   (mod squares)
///   eps_v h = eps_v g * (a, disc h)_v.
fn remove_coefficient(t: &InvariantProfile, a: &SquareClass) -> InvariantProfile {
    let d_res = a.mul(&t.discriminant);
    let signature = if a.is_positive() {
        Signature {
            pos: t.signature.pos - 1,
            neg: t.signature.neg,
        }
    } else {
        Signature {
            pos: t.signature.pos,
            neg: t.signature.neg - 1,
        }
    };
    let mut places: BTreeSet<Place> = t.negative_places.clone();
    places.insert(Place::prime(2));
    places.insert(Place::Infinity);
    for p in a.odd_primes() {
        places.insert(Place::Prime(p));
    }
    for p in d_res.odd_primes() {
        places.insert(Place::Prime(p));
    }
    let a_rat = a.to_rational();
    let d_rat = d_res.to_rational();
    let mut negative_places = BTreeSet::new();
    for v in places {
        let e = t.epsilon(&v) * hilbert(&a_rat, &d_rat, &v).expect("nonzero");
        if e == -1 {
            negative_places.insert(v);
        }
    }
    InvariantProfile {
        rank: t.rank - 1,
        signature,
        discriminant: d_res,
        negative_places,
    }
}

fn realize_rank_two(t: &InvariantProfile) -> Result<Vec<Rational>> {
    // <a, b> with b forced by the discriminant; the first coefficient is
    // positive unless the form is negative definite
    let first_negative = t.signature.neg == 2;
    let mut checked = 0u64;
    for a in squarefree_magnitudes() {
        checked += 1;
        if checked > CANDIDATE_BOUND {
            break;
        }
        let a = if first_negative {
            SquareClass::of(&-rat_int(a as i64)).unwrap()
        } else {
            SquareClass::of(&rat_int(a as i64)).unwrap()
        };
        let b = a.mul(&t.discriminant);
        let mut places: BTreeSet<Place> = t.negative_places.clone();
        places.insert(Place::prime(2));
        places.insert(Place::Infinity);
        for p in a.odd_primes() {
            places.insert(Place::Prime(p));
        }
        for p in b.odd_primes() {
            places.insert(Place::Prime(p));
        }
        let a_rat = a.to_rational();
        let b_rat = b.to_rational();
        if places
            .iter()
            .all(|v| hilbert(&a_rat, &b_rat, v).expect("nonzero") == t.epsilon(v))
        {
            return Ok(vec![a_rat, b_rat]);
        }
    }
    Err(Error::SearchExhausted {
        examined: checked,
        bound: CANDIDATE_BOUND,
    })
}

const CANDIDATE_BOUND: u64 = 1_000_000;

/// Positive squarefree integers in ascending order.
fn squarefree_magnitudes() -> impl Iterator<Item = u64> {
    (1u64..).filter(|&k| {
        let mut k = k;
        let mut d = 2u64;
        while d * d <= k {
            if k % (d * d) == 0 {
                return false;
            }
            while k % d == 0 {
                k /= d;
            }
            d += 1;
        }
        true
    })
}

/// Candidate coefficients for the peeling step: squarefree, ascending by
/// absolute value, positive before negative, signs restricted by the
/// signature still to be produced.
fn squarefree_candidates(sig: &Signature) -> impl Iterator<Item = SquareClass> + '_ {
    let pos_ok = sig.pos > 0;
    let neg_ok = sig.neg > 0;
    squarefree_magnitudes()
        .take(10_000)
        .flat_map(move |k| {
            let mut out = Vec::new();
            if pos_ok {
                out.push(SquareClass::of(&rat_int(k as i64)).unwrap());
            }
            if neg_ok {
                out.push(SquareClass::of(&-rat_int(k as i64)).unwrap());
            }
            out
        })
}

// ---------------------------------------------------------------------------
// Definite complement
// ---------------------------------------------------------------------------

/// Record of a definite-complement computation: everything needed to recheck
/// the construction is stored, and the final equality is verified here rather
/// than assumed from the invariant algebra.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComplementCertificate {
    pub input: DiagonalForm,
    pub input_profile: InvariantProfile,
    pub target: TargetProfile,
    pub complement: DiagonalForm,
    pub complement_profile: InvariantProfile,
    pub extended_profile: InvariantProfile,
    pub profiles_equal: bool,
}

/// For `q` of signature (m,1) with m >= 6, build a positive definite diagonal
/// `q'` of rank m-1 with discriminant -d and Hasse-Witt invariants
/// `eps_v(q') = eps_v(q) * (-1,-d)_v`, so that `q' + <1,-1>` shares all
/// invariants with `q`.
pub fn definite_complement(q: &DiagonalForm) -> Result<(DiagonalForm, ComplementCertificate)> {
    let sig = q.signature();
    if sig.neg != 1 {
        return Err(Error::SignatureMismatch {
            expected_pos: q.rank().saturating_sub(1),
            expected_neg: 1,
            found_pos: sig.pos,
            found_neg: sig.neg,
        });
    }
    let m = sig.pos;
    if m < 6 {
        return Err(Error::BelowMinimum {
            minimum: 6,
            found: m,
        });
    }
    let p = profile(q);
    let minus_d = SquareClass::of_int(-1).mul(&p.discriminant);
    debug_assert!(minus_d.is_positive(), "disc of a (m,1) form is negative");

    // eps target: eps_v(q) * (-1, -d)_v; the symbol is nontrivial only at 2,
    // infinity, and odd primes dividing d
    let mut places: BTreeSet<Place> = p.negative_places.clone();
    places.insert(Place::prime(2));
    places.insert(Place::Infinity);
    for prime in minus_d.odd_primes() {
        places.insert(Place::Prime(prime));
    }
    let minus_one = -rat_int(1);
    let minus_d_rat = minus_d.to_rational();
    let mut negative_places = BTreeSet::new();
    for v in places {
        let e = p.epsilon(&v) * hilbert(&minus_one, &minus_d_rat, &v)?;
        if e == -1 {
            negative_places.insert(v);
        }
    }
    let target = TargetProfile {
        rank: m - 1,
        signature: Signature { pos: m - 1, neg: 0 },
        discriminant: minus_d,
        negative_places,
    };

    let complement = realize(&target)?;
    let complement_profile = profile(&complement);
    let hyperbolic = DiagonalForm::new(vec![rat_int(1), rat_int(-1)])?;
    let extended = complement.direct_sum(&hyperbolic);
    let extended_profile = profile(&extended);
    let profiles_equal = extended_profile == p;

    let certificate = ComplementCertificate {
        input: q.clone(),
        input_profile: p,
        target,
        complement: complement.clone(),
        complement_profile,
        extended_profile,
        profiles_equal,
    };
    Ok((complement, certificate))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equivalence::{projectively_equivalent, rationally_equivalent};
    use crate::forms::lorentz_j;
    use crate::local::hasse_witt;

    fn target(
        rank: usize,
        pos: usize,
        neg: usize,
        disc: i64,
        places: &[Place],
    ) -> TargetProfile {
        TargetProfile {
            rank,
            signature: Signature { pos, neg },
            discriminant: SquareClass::of_int(disc),
            negative_places: places.iter().cloned().collect(),
        }
    }

    #[test]
    fn feasibility_examples() {
        // rank 1 with a negative place: condition 2
        let t = target(1, 1, 0, 2, &[Place::prime(2)]);
        let (ok, v) = serre_feasible(&t);
        assert!(!ok);
        assert!(v.contains(&2));
        // also violates 1 (odd-size set)
        assert!(v.contains(&1));

        // the worked positive-definite target is feasible
        let t = target(6, 6, 0, 3, &[Place::prime(2), Place::prime(3)]);
        assert_eq!(serre_feasible(&t), (true, vec![]));

        // sign of d must be (-1)^s
        let t = target(3, 2, 1, 1, &[]);
        let (ok, v) = serre_feasible(&t);
        assert!(!ok);
        assert_eq!(v, vec![4]);
    }

    #[test]
    fn feasibility_condition_one() {
        let t = target(3, 3, 0, 1, &[Place::prime(2), Place::prime(3), Place::prime(5)]);
        let (ok, v) = serre_feasible(&t);
        assert!(!ok);
        assert_eq!(v, vec![1]);
    }

    #[test]
    fn feasibility_condition_two_rank_two() {
        // d = -1 is locally -1 everywhere, so no eps may be negative
        let t = target(2, 1, 1, -1, &[Place::prime(3), Place::prime(7)]);
        let (ok, v) = serre_feasible(&t);
        assert!(!ok);
        assert_eq!(v, vec![2]);
    }

    #[test]
    fn feasibility_condition_three() {
        let t = target(3, 2, 0, 1, &[]);
        let (ok, v) = serre_feasible(&t);
        assert!(!ok);
        assert_eq!(v, vec![3]);
    }

    #[test]
    fn feasibility_condition_five() {
        // s = 2 forces eps_infinity = -1
        let t = target(2, 0, 2, 1, &[]);
        let (ok, v) = serre_feasible(&t);
        assert!(!ok);
        assert_eq!(v, vec![5]);
    }

    #[test]
    fn realize_trivial_targets() {
        let f = realize(&target(2, 2, 0, 1, &[])).unwrap();
        assert_eq!(f, DiagonalForm::from_ints(&[1, 1]).unwrap());

        let f = realize(&target(1, 0, 1, -2, &[])).unwrap();
        assert_eq!(f, DiagonalForm::from_ints(&[-2]).unwrap());
    }

    #[test]
    fn realize_worked_target() {
        let t = target(6, 6, 0, 3, &[Place::prime(2), Place::prime(3)]);
        let f = realize(&t).unwrap();
        let p = profile(&f);
        assert_eq!(p.rank, 6);
        assert_eq!(p.signature, Signature { pos: 6, neg: 0 });
        assert_eq!(p.discriminant, SquareClass::of_int(3));
        let expected: BTreeSet<Place> = [Place::prime(2), Place::prime(3)].into();
        assert_eq!(p.negative_places, expected);
        // the spec's reference realization has the same profile
        assert!(rationally_equivalent(
            &f,
            &DiagonalForm::from_ints(&[1, 1, 1, 3, 3, 3]).unwrap()
        ));
    }

    #[test]
    fn realize_rejects_infeasible() {
        let t = target(1, 1, 0, 2, &[Place::prime(2)]);
        match realize(&t) {
            Err(Error::Infeasible { violated }) => assert!(violated.contains(&2)),
            other => panic!("expected infeasible, got {other:?}"),
        }
    }

    #[test]
    fn realize_needs_nonunit_split() {
        // splitting off <1> blindly would leave an infeasible rank-2
        // residual here (disc -1 forces all eps positive at rank 2)
        let t = target(
            3,
            2,
            1,
            -1,
            &[Place::prime(2), Place::prime(3)],
        );
        assert_eq!(serre_feasible(&t), (true, vec![]));
        let f = realize(&t).unwrap();
        assert_eq!(profile(&f), t.as_profile());
    }

    #[test]
    fn realize_round_trips_profiles() {
        let forms = [
            DiagonalForm::from_ints(&[1, 2, -3]).unwrap(),
            DiagonalForm::from_ints(&[2, 3, 5, 7]).unwrap(),
            DiagonalForm::from_ints(&[-1, -2, 6, 10, 13]).unwrap(),
            DiagonalForm::from_ints(&[1, 1, 1, 3, 3, 3]).unwrap(),
            DiagonalForm::from_ints(&[5, -7, 11, -13, 2, 3]).unwrap(),
        ];
        for f in &forms {
            let t = TargetProfile::from_profile(&profile(f));
            let g = realize(&t).unwrap();
            assert_eq!(profile(&g), profile(f), "round trip for {f}");
        }
    }

    #[test]
    fn complement_of_lorentz_form() {
        let q = lorentz_j(7);
        let (qp, cert) = definite_complement(&q).unwrap();
        assert_eq!(qp.rank(), 5);
        assert_eq!(qp.signature(), Signature { pos: 5, neg: 0 });
        assert!(cert.profiles_equal);
        assert!(cert.target.negative_places.is_empty());
        assert!(rationally_equivalent(
            &qp,
            &DiagonalForm::from_ints(&[1, 1, 1, 1, 1]).unwrap()
        ));
    }

    #[test]
    fn complement_worked_instance() {
        let q = DiagonalForm::from_ints(&[1, 1, 1, 1, 1, 1, -3]).unwrap();
        let (qp, cert) = definite_complement(&q).unwrap();
        let p = profile(&qp);
        assert_eq!(p.rank, 5);
        assert_eq!(p.signature, Signature { pos: 5, neg: 0 });
        assert_eq!(p.discriminant, SquareClass::of_int(3));
        let expected: BTreeSet<Place> = [Place::prime(2), Place::prime(3)].into();
        assert_eq!(p.negative_places, expected);
        assert!(cert.profiles_equal);

        // the paper-level consequence: q' + <1,-1> is equivalent to q,
        // projectively with scalar 1
        let qpp = qp.direct_sum(&DiagonalForm::from_ints(&[1, -1]).unwrap());
        assert!(rationally_equivalent(&qpp, &q));
        let v = projectively_equivalent(&q, &qpp).unwrap();
        assert!(v.equivalent);
        assert!(v.scalar_witness.unwrap().is_one());
    }

    #[test]
    fn complement_rejects_small_or_wrong_signature() {
        let q = DiagonalForm::from_ints(&[1, 1, 1, 1, -1]).unwrap();
        assert!(matches!(
            definite_complement(&q),
            Err(Error::BelowMinimum { minimum: 6, .. })
        ));
        let q = DiagonalForm::from_ints(&[1, 1, -1, -1]).unwrap();
        assert!(matches!(
            definite_complement(&q),
            Err(Error::SignatureMismatch { .. })
        ));
    }

    #[test]
    fn complement_telescoping_identity() {
        // eps_v(q' + <1,-1>) = eps_v(q') * (-1, disc q')_v at every place
        for q in [
            lorentz_j(7),
            DiagonalForm::from_ints(&[1, 1, 1, 1, 1, 1, -3]).unwrap(),
            DiagonalForm::from_ints(&[2, 1, 5, 1, 1, 3, -6]).unwrap(),
        ] {
            let (qp, _) = definite_complement(&q).unwrap();
            let qpp = qp.direct_sum(&DiagonalForm::from_ints(&[1, -1]).unwrap());
            let d = qp.discriminant().to_rational();
            let minus_one = -rat_int(1);
            let mut places = crate::local::relevant_places(&qpp);
            places.extend(crate::local::relevant_places(&qp));
            for v in places {
                assert_eq!(
                    hasse_witt(&qpp, &v),
                    hasse_witt(&qp, &v) * hilbert(&minus_one, &d, &v).unwrap(),
                    "telescoping at {v} for {q}"
                );
            }
        }
    }

    #[test]
    fn complement_target_is_feasible_for_accepted_inputs() {
        for q in [
            lorentz_j(7),
            lorentz_j(8),
            DiagonalForm::from_ints(&[1, 1, 1, 1, 1, 1, -3]).unwrap(),
            DiagonalForm::from_ints(&[2, 3, 5, 1, 1, 6, 1, -2]).unwrap(),
        ] {
            let (_, cert) = definite_complement(&q).unwrap();
            assert_eq!(serre_feasible(&cert.target), (true, vec![]));
        }
    }
}
