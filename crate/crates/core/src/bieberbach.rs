//! Affine crystallographic machinery: Im-Kim generator families, group
//! closure with exact lattice saturation, torsion-freeness, orientability,
//! the Generalized Hantzsche-Wendt predicate, circle products, and form
//! preservation.
//!
//! A presentation is a finite list of affine isometries `x -> Ax + v` over
//! exact rationals together with a seed translation lattice. `closure`
//! saturates products until the holonomy group (the finite set of linear
//! parts), the full translation lattice, and one reduced coset representative
//! per holonomy element are all stable. Everything downstream (torsion,
//! orientability, GHW, flags) reads that finite data.

use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::arith::{rat, rat_int, Rational};
use crate::error::{Error, Result};
use crate::forms::DiagonalForm;
use crate::matrix::{
    solve_integer_combination, solve_linear, vec_add, vec_is_zero, vec_sub, zero_vec, Lattice,
    Matrix, Vector,
};

/// The affine map x -> Ax + v with A invertible.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct AffineIsometry {
    pub linear: Matrix,
    pub translation: Vector,
}

impl AffineIsometry {
    pub fn new(linear: Matrix, translation: Vector) -> Result<Self> {
        if !linear.is_square() || linear.nrows() != translation.len() {
            return Err(Error::DimensionMismatch {
                rank: translation.len(),
                dimension: linear.nrows(),
            });
        }
        if linear.det().is_zero() {
            return Err(Error::DegenerateForm);
        }
        Ok(AffineIsometry {
            linear,
            translation,
        })
    }

    pub fn identity(n: usize) -> Self {
        AffineIsometry {
            linear: Matrix::identity(n),
            translation: zero_vec(n),
        }
    }

    pub fn translation_only(v: Vector) -> Self {
        AffineIsometry {
            linear: Matrix::identity(v.len()),
            translation: v,
        }
    }

    pub fn dimension(&self) -> usize {
        self.translation.len()
    }

    /// Composition: self after other, (A,v)(B,w) = (AB, Aw + v).
    pub fn compose(&self, other: &AffineIsometry) -> AffineIsometry {
        AffineIsometry {
            linear: self.linear.mul(&other.linear),
            translation: vec_add(&self.linear.mul_vec(&other.translation), &self.translation),
        }
    }

    pub fn inverse(&self) -> AffineIsometry {
        let inv = self.linear.inverse().expect("linear part invertible");
        let t = inv
            .mul_vec(&self.translation)
            .into_iter()
            .map(|x| -x)
            .collect();
        AffineIsometry {
            linear: inv,
            translation: t,
        }
    }

    pub fn apply(&self, x: &[Rational]) -> Vector {
        vec_add(&self.linear.mul_vec(x), &self.translation)
    }

    pub fn is_identity(&self) -> bool {
        self.linear.is_identity() && vec_is_zero(&self.translation)
    }
}

/// Generators of a candidate Bieberbach group with a known full-rank
/// translation sublattice.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CrystalPresentation {
    pub dimension: usize,
    pub generators: Vec<AffineIsometry>,
    pub seed_lattice: Vec<Vector>,
}

impl CrystalPresentation {
    pub fn new(
        dimension: usize,
        generators: Vec<AffineIsometry>,
        seed_lattice: Vec<Vector>,
    ) -> Result<Self> {
        for g in &generators {
            if g.dimension() != dimension {
                return Err(Error::DimensionMismatch {
                    rank: g.dimension(),
                    dimension,
                });
            }
        }
        let lattice = Lattice::from_rows(&seed_lattice);
        if lattice.dim() != dimension || !lattice.is_full_rank() {
            return Err(Error::NotCrystallographic(
                "seed lattice must have full rank".into(),
            ));
        }
        Ok(CrystalPresentation {
            dimension,
            generators,
            seed_lattice,
        })
    }
}

/// Finite data of the closed group: holonomy elements with one reduced coset
/// representative each, and the full translation lattice.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupClosure {
    pub dimension: usize,
    pub cosets: BTreeMap<Matrix, Vector>,
    pub lattice: Lattice,
}

impl GroupClosure {
    pub fn holonomy_order(&self) -> usize {
        self.cosets.len()
    }

    /// log2 of the holonomy order when the group is elementary abelian 2;
    /// None otherwise.
    pub fn elementary_abelian_rank(&self) -> Option<usize> {
        let n = self.holonomy_order();
        if !n.is_power_of_two() {
            return None;
        }
        for a in self.cosets.keys() {
            if !a.mul(a).is_identity() {
                return None;
            }
        }
        Some(n.trailing_zeros() as usize)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct ClosureConfig {
    /// Abort when more distinct linear parts than this appear.
    pub max_holonomy: usize,
    /// Abort when the saturation has not stabilized after this many rounds.
    pub max_rounds: usize,
}

impl ClosureConfig {
    pub fn for_dimension(dim: usize) -> Self {
        ClosureConfig {
            max_holonomy: 1usize << (dim + 2).min(24),
            max_rounds: 64,
        }
    }
}

/// Saturate the group generated by a presentation into its closure.
///
/// Round structure: keep the lattice closed under the holonomy action, reduce
/// all coset representatives, then multiply every stored coset by every
/// generator (and inverse). A product landing on a known linear part with a
/// different representative contributes the difference to the lattice.
/// Stops when a full round changes nothing.
pub fn closure(p: &CrystalPresentation) -> Result<GroupClosure> {
    closure_with(p, &ClosureConfig::for_dimension(p.dimension))
}

pub fn closure_with(p: &CrystalPresentation, cfg: &ClosureConfig) -> Result<GroupClosure> {
    let n = p.dimension;
    let mut lattice = Lattice::from_rows(&p.seed_lattice);
    if !lattice.is_full_rank() {
        return Err(Error::NotCrystallographic(
            "seed lattice must have full rank".into(),
        ));
    }
    let mut multipliers: Vec<AffineIsometry> = Vec::new();
    for g in &p.generators {
        multipliers.push(g.clone());
        multipliers.push(g.inverse());
    }
    let mut cosets: BTreeMap<Matrix, Vector> = BTreeMap::new();
    cosets.insert(Matrix::identity(n), zero_vec(n));

    for _ in 0..cfg.max_rounds {
        let mut changed = false;

        // lattice closed under the holonomy action
        loop {
            let mut grown = false;
            let basis = lattice.basis();
            for a in cosets.keys() {
                for b in &basis {
                    grown |= lattice.insert(&a.mul_vec(b));
                }
            }
            changed |= grown;
            if !grown {
                break;
            }
        }

        // canonical representatives under the current lattice
        let reduced: BTreeMap<Matrix, Vector> = cosets
            .iter()
            .map(|(a, v)| (a.clone(), lattice.reduce(v)))
            .collect();
        cosets = reduced;

        // products with all generators
        let snapshot: Vec<(Matrix, Vector)> =
            cosets.iter().map(|(a, v)| (a.clone(), v.clone())).collect();
        for (a, v) in &snapshot {
            for g in &multipliers {
                let lin = a.mul(&g.linear);
                let tr = vec_add(&a.mul_vec(&g.translation), v);
                let tr = lattice.reduce(&tr);
                match cosets.get(&lin) {
                    None => {
                        if cosets.len() >= cfg.max_holonomy {
                            return Err(Error::NotCrystallographic(format!(
                                "holonomy exceeded {} elements",
                                cfg.max_holonomy
                            )));
                        }
                        cosets.insert(lin, tr);
                        changed = true;
                    }
                    Some(known) => {
                        let diff = vec_sub(&tr, known);
                        if !vec_is_zero(&diff) && lattice.insert(&diff) {
                            changed = true;
                        }
                    }
                }
            }
        }

        if !changed {
            return Ok(GroupClosure {
                dimension: n,
                cosets,
                lattice,
            });
        }
    }
    Err(Error::NotCrystallographic(
        "closure did not stabilize within the round bound".into(),
    ))
}

// ---------------------------------------------------------------------------
// Predicates
// ---------------------------------------------------------------------------

/// An element of finite order together with a point it fixes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TorsionWitness {
    pub element: AffineIsometry,
    pub fixed_point: Vector,
}

/// Multiplicative order of a finite-order matrix.
fn matrix_order(a: &Matrix, cap: usize) -> usize {
    let mut power = a.clone();
    for k in 1..=cap {
        if power.is_identity() {
            return k;
        }
        power = power.mul(a);
    }
    cap + 1
}

/// Projection onto ker(A - I) along im(A - I): (1/k) sum of the powers of A.
fn fixed_space_projection(a: &Matrix, order: usize) -> Matrix {
    let n = a.nrows();
    let mut sum = Matrix::identity(n);
    let mut power = a.clone();
    for _ in 1..order {
        for i in 0..n {
            for j in 0..n {
                let d = power.rows[i][j].clone();
                sum.rows[i][j] += d;
            }
        }
        power = power.mul(a);
    }
    let k = rat_int(order as i64);
    for i in 0..n {
        for j in 0..n {
            sum.rows[i][j] = &sum.rows[i][j] / &k;
        }
    }
    sum
}

/// Torsion-freeness via the linear Diophantine criterion: an element (A, v+l)
/// with A != I has finite order iff the component of v+l in ker(A - I)
/// vanishes for some lattice vector l, i.e. iff -P_A v lies in P_A(L).
/// Returns a witness element and one of its fixed points when torsion exists.
pub fn is_torsion_free(c: &GroupClosure) -> (bool, Option<TorsionWitness>) {
    let basis = c.lattice.basis();
    for (a, v) in &c.cosets {
        if a.is_identity() {
            continue;
        }
        let order = matrix_order(a, c.holonomy_order().max(2));
        let proj = fixed_space_projection(a, order);
        let rows: Vec<Vector> = basis.iter().map(|b| proj.mul_vec(b)).collect();
        let target: Vector = proj.mul_vec(v).into_iter().map(|x| -x).collect();
        if let Some(x) = solve_integer_combination(&rows, &target) {
            let mut l = zero_vec(c.dimension);
            for (xi, b) in x.iter().zip(&basis) {
                let xi = BigRational::from_integer(xi.clone());
                for (li, bi) in l.iter_mut().zip(b) {
                    *li += &xi * bi;
                }
            }
            let w = vec_add(v, &l);
            // fixed point: (A - I) y = -w is consistent because P_A w = 0
            let mut a_minus_i = a.clone();
            for i in 0..c.dimension {
                a_minus_i.rows[i][i] -= BigRational::one();
            }
            let rhs: Vector = w.iter().map(|x| -x.clone()).collect();
            let fixed_point =
                solve_linear(&a_minus_i, &rhs).expect("projected kernel component vanishes");
            let element = AffineIsometry {
                linear: a.clone(),
                translation: w,
            };
            debug_assert_eq!(element.apply(&fixed_point), fixed_point);
            return (false, Some(TorsionWitness {
                element,
                fixed_point,
            }));
        }
    }
    (true, None)
}

/// Orientability: every generator (hence every holonomy element) preserves
/// orientation.
pub fn is_orientable(p: &CrystalPresentation) -> bool {
    p.generators
        .iter()
        .all(|g| g.linear.det() == BigRational::one())
}

pub fn is_diagonal_holonomy(c: &GroupClosure) -> bool {
    c.cosets.keys().all(|a| a.is_sign_diagonal())
}

/// Generalized Hantzsche-Wendt: orientable, holonomy of diagonal +-1
/// matrices, elementary abelian of rank dimension - 1.
pub fn is_ghw(c: &GroupClosure) -> bool {
    if !is_diagonal_holonomy(c) {
        return false;
    }
    if c.cosets.keys().any(|a| a.det() != BigRational::one()) {
        return false;
    }
    c.elementary_abelian_rank() == Some(c.dimension.saturating_sub(1))
}

/// Does every generator's linear part preserve the diagonal form exactly?
pub fn preserves_form(p: &CrystalPresentation, f: &DiagonalForm) -> Result<bool> {
    if f.rank() != p.dimension {
        return Err(Error::DimensionMismatch {
            rank: f.rank(),
            dimension: p.dimension,
        });
    }
    let gram = f.gram();
    Ok(p.generators.iter().all(|g| {
        g.linear.transpose().mul(&gram).mul(&g.linear) == gram
    }))
}

// ---------------------------------------------------------------------------
// The Im-Kim family
// ---------------------------------------------------------------------------

/// The flat (2n+1)-dimensional family with generators t_1..t_{n+1},
/// tau_1..tau_n, K:
///
/// * `t_i` translates by one unit along axis i;
/// * `tau_j` negates axes j and j+1 and translates by 1/2 along axis j+1+n;
/// * `K` negates the last n+1 axes when n is odd and the last n axes when n
///   is even (the even case follows the verbal description of the action),
///   and translates by 1/2 along each of the first n+1 axes.
///
/// The seed lattice collects the unit translations together with the
/// translation parts of tau_j^2 and K^2; the full lattice is whatever the
/// closure saturates to, never assumed.
pub fn im_kim(n: usize) -> Result<CrystalPresentation> {
    if n < 1 {
        return Err(Error::BadImKimIndex(n));
    }
    let dim = 2 * n + 1;
    let half = rat(1, 2);
    let mut generators = Vec::with_capacity(2 * n + 2);

    for i in 0..=n {
        let mut v = zero_vec(dim);
        v[i] = BigRational::one();
        generators.push(AffineIsometry::translation_only(v));
    }

    for j in 1..=n {
        let mut linear = Matrix::identity(dim);
        linear.rows[j - 1][j - 1] = -BigRational::one();
        linear.rows[j][j] = -BigRational::one();
        let mut v = zero_vec(dim);
        v[n + j] = half.clone();
        generators.push(AffineIsometry::new(linear, v)?);
    }

    let mut linear = Matrix::identity(dim);
    let first_negated = if n % 2 == 1 { n } else { n + 1 };
    for i in first_negated..dim {
        linear.rows[i][i] = -BigRational::one();
    }
    let mut v = zero_vec(dim);
    for item in v.iter_mut().take(n + 1) {
        *item = half.clone();
    }
    generators.push(AffineIsometry::new(linear, v)?);

    let mut seed: Vec<Vector> = Vec::new();
    for g in &generators {
        if g.linear.is_identity() {
            seed.push(g.translation.clone());
        } else {
            let sq = g.compose(g);
            debug_assert!(sq.linear.is_identity(), "order-2 linear parts");
            seed.push(sq.translation.clone());
        }
    }
    CrystalPresentation::new(dim, generators, seed)
}

/// Extend a presentation by a circle factor: every generator gains a trailing
/// row and column that are zero except for a 1 in the corner, and one unit
/// translation along the new axis is added.
pub fn product_with_circle(p: &CrystalPresentation) -> CrystalPresentation {
    let dim = p.dimension + 1;
    let extend_matrix = |a: &Matrix| {
        let mut rows = vec![vec![BigRational::zero(); dim]; dim];
        for i in 0..p.dimension {
            for j in 0..p.dimension {
                rows[i][j] = a.rows[i][j].clone();
            }
        }
        rows[dim - 1][dim - 1] = BigRational::one();
        Matrix { rows }
    };
    let mut generators: Vec<AffineIsometry> = p
        .generators
        .iter()
        .map(|g| {
            let mut v = g.translation.clone();
            v.push(BigRational::zero());
            AffineIsometry {
                linear: extend_matrix(&g.linear),
                translation: v,
            }
        })
        .collect();
    let mut new_axis = zero_vec(dim);
    new_axis[dim - 1] = BigRational::one();
    generators.push(AffineIsometry::translation_only(new_axis.clone()));

    let mut seed: Vec<Vector> = p
        .seed_lattice
        .iter()
        .map(|r| {
            let mut v = r.clone();
            v.push(BigRational::zero());
            v
        })
        .collect();
    seed.push(new_axis);
    CrystalPresentation {
        dimension: dim,
        generators,
        seed_lattice: seed,
    }
}

// ---------------------------------------------------------------------------
// GHW search
// ---------------------------------------------------------------------------

/// Search for a Generalized Hantzsche-Wendt presentation in odd dimension n.
///
/// Linear parts are fixed: B_i has +1 at position i and -1 elsewhere
/// (i = 1..n-1), generating the full determinant-one diagonal sign group of
/// rank n-1. Translation vectors run over {0, 1/2}^n in lexicographic order
/// (0 before 1/2, leftmost coordinate most significant). Prefixes whose
/// partial subgroup already contains torsion are skipped; since a skipped
/// prefix admits no valid completion, the first hit is the lexicographically
/// first valid tuple. The winning candidate is re-verified with the exact
/// closure machinery before being returned.
///
/// Returns None when `bound` candidate vectors were examined without a hit.
pub fn ghw_search(n: usize, bound: u64) -> Result<Option<CrystalPresentation>> {
    if n % 2 == 0 || n < 3 {
        return Err(Error::BadGhwDimension(n));
    }
    let full: u32 = (1u32 << n) - 1;
    // sign masks of the fixed linear parts: bit set = coordinate negated
    let masks: Vec<u32> = (0..n - 1).map(|i| full ^ (1u32 << i)).collect();

    // subgroup elements as (sign mask, translation mask); translations live in
    // (1/2)Z^n / Z^n because every generator translation does and sign
    // matrices fix that group pointwise
    struct Dfs {
        masks: Vec<u32>,
        full: u32,
        examined: u64,
        bound: u64,
    }
    impl Dfs {
        fn run(&mut self, chosen: &mut Vec<u32>) -> Option<Vec<u32>> {
            let depth = chosen.len();
            if depth == self.masks.len() {
                return Some(chosen.clone());
            }
            for v in 0..=self.full {
                if self.examined >= self.bound {
                    return None;
                }
                self.examined += 1;
                chosen.push(v);
                if self.prefix_torsion_free(chosen) {
                    if let Some(hit) = self.run(chosen) {
                        return Some(hit);
                    }
                    if self.examined >= self.bound {
                        chosen.pop();
                        return None;
                    }
                }
                chosen.pop();
            }
            None
        }

        /// Every nontrivial element (u, r) of the subgroup generated by the
        /// prefix must have a half-integer translation coordinate on a fixed
        /// axis: r & !u != 0.
        fn prefix_torsion_free(&self, chosen: &[u32]) -> bool {
            let k = chosen.len();
            for subset in 1u32..(1 << k) {
                let mut u = 0u32;
                let mut r = 0u32;
                for (i, v) in chosen.iter().enumerate() {
                    if subset & (1 << i) != 0 {
                        u ^= self.masks[i];
                        r ^= v;
                    }
                }
                debug_assert!(u != 0, "sign masks are independent");
                let fixed = !u & self.full;
                if r & fixed == 0 {
                    return false;
                }
            }
            true
        }
    }

    // lexicographic order: coordinate i (0-based) is bit n-1-i
    let mut dfs = Dfs {
        masks: masks.clone(),
        full,
        examined: 0,
        bound,
    };
    let Some(hit) = dfs.run(&mut Vec::new()) else {
        return Ok(None);
    };

    let to_vector = |mask: u32| -> Vector {
        (0..n)
            .map(|i| {
                if mask & (1 << (n - 1 - i)) != 0 {
                    rat(1, 2)
                } else {
                    BigRational::zero()
                }
            })
            .collect()
    };
    // the DFS works with bit i = coordinate i; re-map to the lexicographic
    // convention when building the actual vectors
    let generators: Vec<AffineIsometry> = masks
        .iter()
        .zip(&hit)
        .map(|(m, v)| {
            let mut linear = Matrix::identity(n);
            for i in 0..n {
                if m & (1 << i) != 0 {
                    linear.rows[i][i] = -BigRational::one();
                }
            }
            AffineIsometry {
                linear,
                translation: to_vector(reverse_bits(*v, n)),
            }
        })
        .collect();
    let seed: Vec<Vector> = (0..n)
        .map(|i| {
            let mut v = zero_vec(n);
            v[i] = BigRational::one();
            v
        })
        .collect();
    let presentation = CrystalPresentation::new(n, generators, seed)?;

    // exact re-verification of the bitmask reasoning
    let c = closure(&presentation)?;
    let (torsion_free, _) = is_torsion_free(&c);
    if !torsion_free || !is_ghw(&c) {
        return Err(Error::NotCrystallographic(
            "internal: ghw search candidate failed exact verification".into(),
        ));
    }
    Ok(Some(presentation))
}

fn reverse_bits(v: u32, n: usize) -> u32 {
    let mut out = 0u32;
    for i in 0..n {
        if v & (1 << i) != 0 {
            out |= 1 << (n - 1 - i);
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Topology flags
// ---------------------------------------------------------------------------

/// Literature-backed metadata attached to a closure; nothing cohomological is
/// computed here.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TopologyFlags {
    /// Set to n when the closure is the Im-Kim family member of dimension
    /// 2n+1 (or its circle product): w_{2j} nonzero for 0 <= 2j <= n.
    pub sw_nonvanishing_range: Option<usize>,
    pub sw_citation: Option<String>,
    /// Set when the closure is a GHW group of dimension > 3, or the circle
    /// product of one.
    pub spinc_obstructed: bool,
    pub spinc_citation: Option<String>,
}

pub fn topology_flags(c: &GroupClosure) -> TopologyFlags {
    let dim = c.dimension;
    let mut sw_nonvanishing_range = None;

    if dim % 2 == 1 && dim >= 3 {
        let n = (dim - 1) / 2;
        if let Ok(reference) = im_kim(n).and_then(|p| closure(&p)) {
            if &reference == c {
                sw_nonvanishing_range = Some(n);
            }
        }
    } else if dim % 2 == 0 && dim >= 4 {
        let n = (dim - 2) / 2;
        if let Ok(reference) = im_kim(n).map(|p| product_with_circle(&p)) {
            if let Ok(reference) = closure(&reference) {
                if &reference == c {
                    sw_nonvanishing_range = Some(n);
                }
            }
        }
    }

    let ghw_here = is_ghw(c) && dim > 3;
    let ghw_under_circle = strip_circle(c)
        .map(|s| is_ghw(&s) && s.dimension > 3)
        .unwrap_or(false);
    let spinc_obstructed = ghw_here || ghw_under_circle;

    TopologyFlags {
        sw_citation: sw_nonvanishing_range
            .map(|_| "[ImKim]: w_{2j} != 0 for 0 <= 2j <= n on this family".to_string()),
        sw_nonvanishing_range,
        spinc_obstructed,
        spinc_citation: spinc_obstructed.then(|| {
            "[LPS]: generalized Hantzsche-Wendt manifolds of dimension > 3 admit no spin^C structure"
                .to_string()
        }),
    }
}

/// Recognize a literal circle factor along the last axis and strip it:
/// every holonomy element and coset representative must be trivial there and
/// the lattice must split off Z along it.
pub fn strip_circle(c: &GroupClosure) -> Option<GroupClosure> {
    let dim = c.dimension;
    if dim < 2 {
        return None;
    }
    let last = dim - 1;
    let mut unit = zero_vec(dim);
    unit[last] = BigRational::one();
    if !c.lattice.contains(&unit) {
        return None;
    }
    let mut cosets = BTreeMap::new();
    for (a, v) in &c.cosets {
        for i in 0..dim {
            if i != last && (!a.rows[i][last].is_zero() || !a.rows[last][i].is_zero()) {
                return None;
            }
        }
        if a.rows[last][last] != BigRational::one() || !v[last].is_zero() {
            return None;
        }
        let stripped_a = Matrix {
            rows: a.rows[..last]
                .iter()
                .map(|r| r[..last].to_vec())
                .collect(),
        };
        cosets.insert(stripped_a, v[..last].to_vec());
    }
    let mut rows: Vec<Vector> = Vec::new();
    for b in c.lattice.basis() {
        if !b[last].is_zero() {
            // the only basis vector allowed to touch the last axis is the
            // unit itself
            if b[..last].iter().any(|x| !x.is_zero()) || b[last] != BigRational::one() {
                return None;
            }
            continue;
        }
        rows.push(b[..last].to_vec());
    }
    let lattice = Lattice::from_rows(&rows);
    if !lattice.is_full_rank() || lattice.dim() != last {
        return None;
    }
    Some(GroupClosure {
        dimension: last,
        cosets,
        lattice,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat_int;

    fn torus(n: usize) -> CrystalPresentation {
        let gens = (0..n)
            .map(|i| {
                let mut v = zero_vec(n);
                v[i] = BigRational::one();
                AffineIsometry::translation_only(v)
            })
            .collect();
        let seed = (0..n)
            .map(|i| {
                let mut v = zero_vec(n);
                v[i] = BigRational::one();
                v
            })
            .collect();
        CrystalPresentation::new(n, gens, seed).unwrap()
    }

    #[test]
    fn affine_composition_and_inverse() {
        let g = AffineIsometry::new(
            Matrix::new(vec![
                vec![rat_int(0), rat_int(-1)],
                vec![rat_int(1), rat_int(0)],
            ]),
            vec![rat(1, 2), rat_int(0)],
        )
        .unwrap();
        let gi = g.inverse();
        assert!(g.compose(&gi).is_identity());
        assert!(gi.compose(&g).is_identity());
        let x = vec![rat(1, 3), rat(2, 5)];
        assert_eq!(gi.apply(&g.apply(&x)), x);
    }

    #[test]
    fn torus_closure_is_trivial_holonomy() {
        let c = closure(&torus(3)).unwrap();
        assert_eq!(c.holonomy_order(), 1);
        assert_eq!(c.lattice, Lattice::standard(3));
        let (tf, _) = is_torsion_free(&c);
        assert!(tf);
        assert!(!is_ghw(&c));
    }

    #[test]
    fn im_kim_generator_shape() {
        for n in 1..=4 {
            let p = im_kim(n).unwrap();
            assert_eq!(p.dimension, 2 * n + 1);
            assert_eq!(p.generators.len(), 2 * n + 2);
            for g in &p.generators {
                assert_eq!(g.linear.det(), BigRational::one(), "orientation preserved");
            }
            assert!(is_orientable(&p));
        }
        assert!(im_kim(0).is_err());
    }

    #[test]
    fn im_kim_closure_holonomy() {
        for n in 1..=3 {
            let c = closure(&im_kim(n).unwrap()).unwrap();
            assert_eq!(c.holonomy_order(), 1 << (n + 1), "order 2^(n+1) for n={n}");
            assert_eq!(c.elementary_abelian_rank(), Some(n + 1));
            assert!(is_diagonal_holonomy(&c));
            assert_eq!(c.lattice, Lattice::standard(2 * n + 1), "full integer lattice");
            let (tf, w) = is_torsion_free(&c);
            assert!(tf, "im_kim({n}) torsion witness: {w:?}");
        }
    }

    #[test]
    fn im_kim_ghw_identification() {
        let c1 = closure(&im_kim(1).unwrap()).unwrap();
        assert!(is_ghw(&c1), "the n=1 member is the Hantzsche-Wendt group");
        let c2 = closure(&im_kim(2).unwrap()).unwrap();
        assert!(!is_ghw(&c2), "rank 3 != dimension-1 = 4");
    }

    #[test]
    fn closure_soundness_products_stay_in_table() {
        let c = closure(&im_kim(2).unwrap()).unwrap();
        for (a, v) in &c.cosets {
            for (b, w) in &c.cosets {
                let lin = a.mul(b);
                let tr = vec_add(&a.mul_vec(w), v);
                let known = c.cosets.get(&lin).expect("closed under multiplication");
                let diff = vec_sub(&c.lattice.reduce(&tr), known);
                assert!(vec_is_zero(&diff), "coset reps stable under products");
            }
        }
        // lattice closed under holonomy
        for a in c.cosets.keys() {
            for b in c.lattice.basis() {
                assert!(c.lattice.contains(&a.mul_vec(&b)));
            }
        }
    }

    #[test]
    fn point_reflection_has_torsion() {
        let n = 2;
        let mut neg = Matrix::identity(n);
        neg.rows[0][0] = -BigRational::one();
        neg.rows[1][1] = -BigRational::one();
        let gens = vec![AffineIsometry::new(neg, zero_vec(n)).unwrap()];
        let seed = vec![
            vec![BigRational::one(), BigRational::zero()],
            vec![BigRational::zero(), BigRational::one()],
        ];
        let p = CrystalPresentation::new(n, gens, seed).unwrap();
        let c = closure(&p).unwrap();
        let (tf, witness) = is_torsion_free(&c);
        assert!(!tf);
        let w = witness.unwrap();
        assert_eq!(w.element.apply(&w.fixed_point), w.fixed_point);
    }

    #[test]
    fn klein_bottle_group_is_torsion_free() {
        // glide reflection: (x,y) -> (x + 1/2, -y)
        let glide = AffineIsometry::new(
            Matrix::new(vec![
                vec![rat_int(1), rat_int(0)],
                vec![rat_int(0), rat_int(-1)],
            ]),
            vec![rat(1, 2), rat_int(0)],
        )
        .unwrap();
        let seed = vec![
            vec![BigRational::one(), BigRational::zero()],
            vec![BigRational::zero(), BigRational::one()],
        ];
        let p = CrystalPresentation::new(2, vec![glide], seed).unwrap();
        let c = closure(&p).unwrap();
        assert_eq!(c.holonomy_order(), 2);
        let (tf, _) = is_torsion_free(&c);
        assert!(tf);
        assert!(!is_orientable(&p));
    }

    #[test]
    fn preserves_form_examples() {
        let p = im_kim(2).unwrap();
        for f in [
            DiagonalForm::from_ints(&[1, 2, 3, 4, 5]).unwrap(),
            DiagonalForm::from_ints(&[7, 7, 1, 2, 9]).unwrap(),
        ] {
            assert!(preserves_form(&p, &f).unwrap());
        }
        assert!(matches!(
            preserves_form(&p, &DiagonalForm::from_ints(&[1, 1]).unwrap()),
            Err(Error::DimensionMismatch { .. })
        ));

        // a rotation swapping axes of different weight does not preserve
        let rot = AffineIsometry::new(
            Matrix::new(vec![
                vec![rat_int(0), rat_int(-1)],
                vec![rat_int(1), rat_int(0)],
            ]),
            zero_vec(2),
        )
        .unwrap();
        let seed = vec![
            vec![BigRational::one(), BigRational::zero()],
            vec![BigRational::zero(), BigRational::one()],
        ];
        let p = CrystalPresentation::new(2, vec![rot], seed).unwrap();
        assert!(!preserves_form(&p, &DiagonalForm::from_ints(&[1, 2]).unwrap()).unwrap());
        assert!(preserves_form(&p, &DiagonalForm::from_ints(&[1, 1]).unwrap()).unwrap());
    }

    #[test]
    fn circle_product_preserves_structure() {
        let p = im_kim(1).unwrap();
        let q = product_with_circle(&p);
        assert_eq!(q.dimension, 4);
        assert_eq!(q.generators.len(), p.generators.len() + 1);
        let c = closure(&q).unwrap();
        assert_eq!(c.holonomy_order(), 4, "holonomy unchanged by the circle");
        let (tf, _) = is_torsion_free(&c);
        assert!(tf);

        let torus_c = closure(&product_with_circle(&torus(2))).unwrap();
        assert_eq!(torus_c.holonomy_order(), 1);
        assert_eq!(torus_c.lattice, Lattice::standard(3));
    }

    #[test]
    fn strip_circle_inverts_product() {
        let p = im_kim(1).unwrap();
        let c = closure(&p).unwrap();
        let circled = closure(&product_with_circle(&p)).unwrap();
        let stripped = strip_circle(&circled).unwrap();
        assert_eq!(stripped, c);
        // a closure without a trivial last axis does not strip
        assert!(strip_circle(&c).is_none());
    }

    #[test]
    fn ghw_search_dimension_three() {
        let p = ghw_search(3, 1_000_000).unwrap().expect("hit in dim 3");
        let c = closure(&p).unwrap();
        assert!(is_ghw(&c));
        assert_eq!(c.holonomy_order(), 4);
        let (tf, _) = is_torsion_free(&c);
        assert!(tf);
        // deterministic output
        let p2 = ghw_search(3, 1_000_000).unwrap().unwrap();
        assert_eq!(p, p2);
    }

    #[test]
    fn ghw_search_rejects_even_dimension() {
        assert!(matches!(ghw_search(4, 1000), Err(Error::BadGhwDimension(4))));
        assert!(matches!(ghw_search(1, 1000), Err(Error::BadGhwDimension(1))));
    }

    #[test]
    fn ghw_search_dimension_five() {
        let p = ghw_search(5, 1_000_000).unwrap().expect("hit in dim 5");
        let c = closure(&p).unwrap();
        assert!(is_ghw(&c));
        assert_eq!(c.holonomy_order(), 16);
        let (tf, _) = is_torsion_free(&c);
        assert!(tf);
    }

    #[test]
    fn topology_flags_examples() {
        let c2 = closure(&im_kim(2).unwrap()).unwrap();
        let flags = topology_flags(&c2);
        assert_eq!(flags.sw_nonvanishing_range, Some(2));
        assert!(!flags.spinc_obstructed, "im_kim(2) is not GHW");

        let c1 = closure(&im_kim(1).unwrap()).unwrap();
        let flags = topology_flags(&c1);
        assert_eq!(flags.sw_nonvanishing_range, Some(1));
        assert!(
            !flags.spinc_obstructed,
            "Hantzsche-Wendt has dimension 3, not > 3"
        );

        let g5 = closure(&ghw_search(5, 1_000_000).unwrap().unwrap()).unwrap();
        let flags = topology_flags(&g5);
        assert!(flags.spinc_obstructed);
        assert!(flags.spinc_citation.is_some());

        // circle product of im_kim(1) is recognized for the SW flag
        let circled = closure(&product_with_circle(&im_kim(1).unwrap())).unwrap();
        let flags = topology_flags(&circled);
        assert_eq!(flags.sw_nonvanishing_range, Some(1));

        // circle product of a dim-5 GHW keeps the spin^C obstruction
        let g5_circled =
            closure(&product_with_circle(&ghw_search(5, 1_000_000).unwrap().unwrap())).unwrap();
        let flags = topology_flags(&g5_circled);
        assert!(flags.spinc_obstructed);

        let torus_flags = topology_flags(&closure(&torus(3)).unwrap());
        assert_eq!(torus_flags.sw_nonvanishing_range, None);
        assert!(!torus_flags.spinc_obstructed);
    }

    #[test]
    fn holonomy_guard_rejects_infinite_linear_parts() {
        // an irrational-angle-like shear generates infinitely many linear
        // parts; the guard must fire rather than loop
        let shear = AffineIsometry::new(
            Matrix::new(vec![
                vec![rat_int(1), rat_int(1)],
                vec![rat_int(0), rat_int(1)],
            ]),
            zero_vec(2),
        )
        .unwrap();
        let seed = vec![
            vec![BigRational::one(), BigRational::zero()],
            vec![BigRational::zero(), BigRational::one()],
        ];
        let p = CrystalPresentation::new(2, vec![shear], seed).unwrap();
        assert!(matches!(
            closure(&p),
            Err(Error::NotCrystallographic(_))
        ));
    }
}
