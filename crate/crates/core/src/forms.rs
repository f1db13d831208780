//! Rational quadratic forms: diagonal and symmetric-matrix representations,
//! congruence diagonalization, signature, discriminant, and constructors.

use std::fmt;

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::arith::{parse_rational, square_class, Rational, SquareClass};
use crate::error::{Error, Result};
use crate::matrix::Matrix;

/// A non-degenerate diagonal quadratic form, written `<a1,...,an>`.
///
/// Coefficients are kept exactly as given; square-class reduction happens only
/// inside invariant computations, so a form prints the way it was built.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DiagonalForm {
    coefficients: Vec<Rational>,
}

impl DiagonalForm {
    pub fn new(coefficients: Vec<Rational>) -> Result<Self> {
        if coefficients.is_empty() {
            return Err(Error::EmptyForm);
        }
        if coefficients.iter().any(|c| c.is_zero()) {
            return Err(Error::ZeroArgument("diagonal form coefficient"));
        }
        Ok(DiagonalForm { coefficients })
    }

    pub fn from_ints(coefficients: &[i64]) -> Result<Self> {
        Self::new(
            coefficients
                .iter()
                .map(|&c| BigRational::from_integer(c.into()))
                .collect(),
        )
    }

    pub fn coefficients(&self) -> &[Rational] {
        &self.coefficients
    }

    pub fn rank(&self) -> usize {
        self.coefficients.len()
    }

    pub fn signature(&self) -> Signature {
        let pos = self.coefficients.iter().filter(|c| c.is_positive()).count();
        Signature {
            pos,
            neg: self.rank() - pos,
        }
    }

    /// Product of the coefficients modulo squares.
    pub fn discriminant(&self) -> SquareClass {
        let mut prod = BigRational::one();
        for c in &self.coefficients {
            prod *= c;
        }
        square_class(&prod).expect("coefficients are nonzero")
    }

    pub fn direct_sum(&self, other: &DiagonalForm) -> DiagonalForm {
        let mut coefficients = self.coefficients.clone();
        coefficients.extend(other.coefficients.iter().cloned());
        DiagonalForm { coefficients }
    }

    /// The form `c*q`, coefficient-wise.
    pub fn scale(&self, c: &Rational) -> Result<DiagonalForm> {
        if c.is_zero() {
            return Err(Error::ZeroArgument("scale"));
        }
        Ok(DiagonalForm {
            coefficients: self.coefficients.iter().map(|a| a * c).collect(),
        })
    }

    pub fn gram(&self) -> Matrix {
        Matrix::from_diagonal(&self.coefficients)
    }

    /// Parse `"<a1,a2,...,an>"` with rational entries. Errors carry the byte
    /// offset of the offending token.
    pub fn parse(text: &str) -> Result<Self> {
        let s = text.trim();
        let base = text.len() - text.trim_start().len();
        let err = |offset: usize, message: String| Error::Parse { offset, message };
        if !s.starts_with('<') {
            return Err(err(base, "expected form to start with '<'".into()));
        }
        if !s.ends_with('>') {
            return Err(err(base + s.len(), "expected form to end with '>'".into()));
        }
        let inner = &s[1..s.len() - 1];
        let mut coefficients = Vec::new();
        let mut pos = base + 1;
        for piece in inner.split(',') {
            let lead = piece.len() - piece.trim_start().len();
            let token = piece.trim();
            if token.is_empty() {
                return Err(err(pos + lead, "empty coefficient".into()));
            }
            let value = parse_rational(token)
                .map_err(|_| err(pos + lead, format!("invalid rational {token:?}")))?;
            if value.is_zero() {
                return Err(err(pos + lead, "zero coefficient in a form".into()));
            }
            coefficients.push(value);
            pos += piece.len() + 1;
        }
        DiagonalForm::new(coefficients)
    }
}

impl fmt::Display for DiagonalForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<")?;
        for (i, c) in self.coefficients.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ">")
    }
}

/// The Lorentzian form `<1,...,1,-1>` of the given rank.
pub fn lorentz_j(rank: usize) -> DiagonalForm {
    assert!(rank >= 2, "lorentz_j needs rank >= 2");
    let mut coefficients = vec![BigRational::one(); rank];
    coefficients[rank - 1] = -BigRational::one();
    DiagonalForm { coefficients }
}

/// Counts of positive and negative squares over the reals.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Signature {
    pub pos: usize,
    pub neg: usize,
}

impl Signature {
    pub fn rank(&self) -> usize {
        self.pos + self.neg
    }

    pub fn swapped(&self) -> Signature {
        Signature {
            pos: self.neg,
            neg: self.pos,
        }
    }
}

impl fmt::Display for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.pos, self.neg)
    }
}

/// A non-degenerate symmetric Gram matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymmetricForm {
    matrix: Matrix,
}

impl SymmetricForm {
    pub fn new(matrix: Matrix) -> Result<Self> {
        if !matrix.is_symmetric() {
            return Err(Error::NotSymmetric);
        }
        if matrix.det().is_zero() {
            return Err(Error::DegenerateForm);
        }
        Ok(SymmetricForm { matrix })
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn rank(&self) -> usize {
        self.matrix.nrows()
    }

    /// Symmetric Gaussian congruence: returns `(d, T)` with `T^t Q T` exactly
    /// the diagonal matrix of `d`.
    ///
    /// Pivot repair: a zero diagonal pivot is first fixed by swapping in a
    /// later index with nonzero diagonal entry; if the whole active diagonal
    /// vanishes, adding row and column `j` into `i` creates one (possible by
    /// non-degeneracy).
    pub fn diagonalize(&self) -> (DiagonalForm, Matrix) {
        let n = self.rank();
        let mut a = self.matrix.rows.clone();
        let mut t = Matrix::identity(n);

        // column operation applied symmetrically, with T accumulating it
        for i in 0..n {
            if a[i][i].is_zero() {
                if let Some(j) = ((i + 1)..n).find(|&j| !a[j][j].is_zero()) {
                    swap_sym(&mut a, &mut t, i, j);
                } else {
                    let j = ((i + 1)..n)
                        .find(|&j| !a[i][j].is_zero())
                        .expect("non-degenerate form has a pivot");
                    add_col_row(&mut a, &mut t, i, j, &BigRational::one());
                }
            }
            let pivot = a[i][i].clone();
            for j in (i + 1)..n {
                if a[i][j].is_zero() {
                    continue;
                }
                let f = -(&a[i][j] / &pivot);
                add_col_row(&mut a, &mut t, j, i, &f);
            }
        }
        let diag: Vec<Rational> = (0..n).map(|i| a[i][i].clone()).collect();
        let form = DiagonalForm::new(diag).expect("non-degenerate diagonalization");
        debug_assert_eq!(
            t.transpose().mul(&self.matrix).mul(&t),
            form.gram(),
            "congruence identity"
        );
        (form, t)
    }
}

/// col_i += f * col_j and row_i += f * row_j on the Gram matrix; T tracks the
/// column operation.
fn add_col_row(a: &mut [Vec<Rational>], t: &mut Matrix, i: usize, j: usize, f: &Rational) {
    let n = a.len();
    for r in 0..n {
        let d = f * &a[r][j];
        a[r][i] += d;
    }
    for c in 0..n {
        let d = f * &a[j][c];
        a[i][c] += d;
    }
    for r in 0..n {
        let d = f * &t.rows[r][j];
        t.rows[r][i] += d;
    }
}

fn swap_sym(a: &mut Vec<Vec<Rational>>, t: &mut Matrix, i: usize, j: usize) {
    a.swap(i, j);
    for row in a.iter_mut() {
        row.swap(i, j);
    }
    for row in t.rows.iter_mut() {
        row.swap(i, j);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{rat, rat_int};

    fn form(cs: &[i64]) -> DiagonalForm {
        DiagonalForm::from_ints(cs).unwrap()
    }

    fn sym(rows: &[&[i64]]) -> SymmetricForm {
        SymmetricForm::new(Matrix::new(
            rows.iter()
                .map(|r| r.iter().map(|&x| rat_int(x)).collect())
                .collect(),
        ))
        .unwrap()
    }

    #[test]
    fn construction_guards() {
        assert!(matches!(DiagonalForm::new(vec![]), Err(Error::EmptyForm)));
        assert!(DiagonalForm::from_ints(&[1, 0, 2]).is_err());
        assert!(SymmetricForm::new(Matrix::new(vec![
            vec![rat_int(1), rat_int(2)],
            vec![rat_int(3), rat_int(1)],
        ]))
        .is_err());
        assert!(matches!(
            SymmetricForm::new(Matrix::new(vec![
                vec![rat_int(1), rat_int(2)],
                vec![rat_int(2), rat_int(4)],
            ])),
            Err(Error::DegenerateForm)
        ));
    }

    #[test]
    fn signature_examples() {
        assert_eq!(form(&[1, 1, -1]).signature(), Signature { pos: 2, neg: 1 });
        assert_eq!(lorentz_j(7).signature(), Signature { pos: 6, neg: 1 });
        assert_eq!(
            form(&[1, 1, 1, 3, 3, 3]).signature(),
            Signature { pos: 6, neg: 0 }
        );
    }

    #[test]
    fn discriminant_examples() {
        assert_eq!(form(&[1, -1]).discriminant(), SquareClass::of_int(-1));
        assert_eq!(form(&[2, 3, 6]).discriminant(), SquareClass::of_int(1));
        assert_eq!(
            form(&[1, 1, 1, 1, 1, 1, -3]).discriminant(),
            SquareClass::of_int(-3)
        );
    }

    #[test]
    fn constructors() {
        assert_eq!(form(&[1]).direct_sum(&form(&[-1])), form(&[1, -1]));
        let scaled = form(&[1, 1]).scale(&rat_int(-1)).unwrap();
        assert_eq!(scaled, form(&[-1, -1]));
        assert_eq!(scaled.signature(), Signature { pos: 0, neg: 2 });
        assert!(form(&[1]).scale(&rat_int(0)).is_err());
        assert_eq!(lorentz_j(7), form(&[1, 1, 1, 1, 1, 1, -1]));
    }

    #[test]
    fn discriminant_is_multiplicative_under_direct_sum() {
        let f = form(&[2, -3, 5]);
        let g = form(&[7, 10]);
        let lhs = f.direct_sum(&g).discriminant();
        assert_eq!(lhs, f.discriminant().mul(&g.discriminant()));
    }

    #[test]
    fn diagonalize_identity_and_diagonal() {
        let (d, t) = sym(&[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1]]).diagonalize();
        assert_eq!(d, form(&[1, 1, 1]));
        assert!(t.is_identity());

        let (d, t) = sym(&[&[1, 0], &[0, -1]]).diagonalize();
        assert_eq!(d, form(&[1, -1]));
        assert!(t.is_identity());
    }

    #[test]
    fn diagonalize_hyperbolic_plane() {
        let q = sym(&[&[0, 1], &[1, 0]]);
        let (d, t) = q.diagonalize();
        // T^t Q T = diag(d), exactly
        assert_eq!(t.transpose().mul(q.matrix()).mul(&t), d.gram());
        assert_eq!(d.signature(), Signature { pos: 1, neg: 1 });
        assert_eq!(d.discriminant(), SquareClass::of_int(-1));
    }

    #[test]
    fn diagonalize_random_congruences() {
        // S^t D S for a handful of fixed S must diagonalize back to the same
        // signature and discriminant.
        let d = form(&[1, 2, -3]);
        let s_list = [
            [[1i64, 1, 0], [0, 1, 2], [1, 0, 1]],
            [[2, 1, 1], [1, 1, 0], [0, 1, 1]],
            [[1, 0, 0], [3, 1, 0], [-2, 5, 1]],
        ];
        for s in s_list {
            let s = Matrix::new(
                s.iter()
                    .map(|r| r.iter().map(|&x| rat_int(x)).collect())
                    .collect(),
            );
            if s.det().is_zero() {
                continue;
            }
            let q = s.transpose().mul(&d.gram()).mul(&s);
            let qf = SymmetricForm::new(q.clone()).unwrap();
            let (diag, t) = qf.diagonalize();
            assert_eq!(t.transpose().mul(&q).mul(&t), diag.gram());
            assert_eq!(diag.signature(), d.signature());
            assert_eq!(diag.discriminant(), d.discriminant());
        }
    }

    #[test]
    fn parse_and_display_round_trip() {
        for text in ["<1,1,1,-3>", "<1/2,-5,7/3>", "<2>"] {
            let f = DiagonalForm::parse(text).unwrap();
            assert_eq!(f.to_string(), text);
            assert_eq!(DiagonalForm::parse(&f.to_string()).unwrap(), f);
        }
        let f = DiagonalForm::parse(" < 1 , -2/3 > ").unwrap();
        assert_eq!(f, DiagonalForm::new(vec![rat_int(1), rat(-2, 3)]).unwrap());
    }

    #[test]
    fn parse_errors_carry_position() {
        match DiagonalForm::parse("<1,x,3>") {
            Err(Error::Parse { offset, .. }) => assert_eq!(offset, 3),
            other => panic!("expected parse error, got {other:?}"),
        }
        match DiagonalForm::parse("<1,0>") {
            Err(Error::Parse { offset, .. }) => assert_eq!(offset, 3),
            other => panic!("expected parse error, got {other:?}"),
        }
        assert!(DiagonalForm::parse("1,2,3").is_err());
        assert!(DiagonalForm::parse("<1,2,3").is_err());
        assert!(DiagonalForm::parse("<>").is_err());
    }
}
