//! Exact matrices and vectors.
//!
//! [`Matrix`] is dimension-generic and used by the simulator. The planar
//! types [`Vec2`] and [`Mat2`] carry the eigen-decomposition, which lives in
//! the quadratic field generated by the characteristic discriminant.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};
use thiserror::Error;

use crate::exact::{
    sqrt_normalize_with_bound, ExactError, QuadNum, Rational, Scalar, Sign, DEFAULT_FACTOR_BOUND,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LinalgError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("matrix is singular")]
    SingularMatrix,
    #[error("guard row is zero")]
    ZeroRow,
    #[error(transparent)]
    Exact(#[from] ExactError),
}

/// Row-major dense matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Scalar> Matrix<T> {
    pub fn new(rows: usize, cols: usize, data: Vec<T>) -> Result<Self, LinalgError> {
        if data.len() != rows * cols {
            return Err(LinalgError::DimensionMismatch {
                expected: rows * cols,
                got: data.len(),
            });
        }
        Ok(Matrix { rows, cols, data })
    }

    pub fn from_rows(rows: Vec<Vec<T>>) -> Result<Self, LinalgError> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            if row.len() != c {
                return Err(LinalgError::DimensionMismatch {
                    expected: c,
                    got: row.len(),
                });
            }
            data.extend(row);
        }
        Ok(Matrix {
            rows: r,
            cols: c,
            data,
        })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![T::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = T::one();
        }
        m
    }

    pub fn diagonal(diag: Vec<T>) -> Self {
        let n = diag.len();
        let mut m = Self::zeros(n, n);
        for (i, d) in diag.into_iter().enumerate() {
            m.data[i * n + i] = d;
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &T {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: T) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[T] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn row_iter(&self) -> impl Iterator<Item = &[T]> {
        self.data.chunks(self.cols.max(1)).take(self.rows)
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    /// Exact matrix-vector product.
    pub fn apply<U>(&self, v: &[U]) -> Result<Vec<U>, LinalgError>
    where
        U: Scalar,
        T: Into<U>,
    {
        if v.len() != self.cols {
            return Err(LinalgError::DimensionMismatch {
                expected: self.cols,
                got: v.len(),
            });
        }
        Ok(self.row_iter().map(|row| dot_mixed(row, v)).collect())
    }

    pub fn mul(&self, other: &Matrix<T>) -> Result<Matrix<T>, LinalgError> {
        if self.cols != other.rows {
            return Err(LinalgError::DimensionMismatch {
                expected: self.cols,
                got: other.rows,
            });
        }
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for j in 0..other.cols {
                let mut acc = T::zero();
                for k in 0..self.cols {
                    acc = acc + self.get(i, k).clone() * other.get(k, j);
                }
                out.set(i, j, acc);
            }
        }
        Ok(out)
    }
}

fn dot_mixed<T, U>(row: &[T], v: &[U]) -> U
where
    T: Scalar + Into<U>,
    U: Scalar,
{
    row.iter().zip(v).fold(U::zero(), |acc, (a, x)| {
        if a.is_zero() {
            acc
        } else {
            acc + a.clone().into() * x
        }
    })
}

/// `mat_apply` for the dimension-generic rational matrix.
pub fn mat_apply<T: Scalar>(a: &Matrix<Rational>, v: &[T]) -> Result<Vec<T>, LinalgError>
where
    Rational: Into<T>,
{
    a.apply(v)
}

/// Planar vector.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Vec2<T> {
    pub x1: T,
    pub x2: T,
}

impl<T: Scalar> Vec2<T> {
    pub fn new(x1: T, x2: T) -> Self {
        Vec2 { x1, x2 }
    }

    pub fn is_zero(&self) -> bool {
        self.x1.is_zero() && self.x2.is_zero()
    }

    pub fn dot(&self, o: &Vec2<T>) -> T {
        self.x1.clone() * &o.x1 + self.x2.clone() * &o.x2
    }

    /// `self.x1 * o.x2 - self.x2 * o.x1`; positive when `o` is counterclockwise
    /// of `self`.
    pub fn cross(&self, o: &Vec2<T>) -> T {
        self.x1.clone() * &o.x2 - self.x2.clone() * &o.x1
    }

    pub fn neg(&self) -> Self {
        Vec2::new(-self.x1.clone(), -self.x2.clone())
    }

    pub fn add(&self, o: &Vec2<T>) -> Self {
        Vec2::new(self.x1.clone() + &o.x1, self.x2.clone() + &o.x2)
    }

    pub fn scale(&self, k: &Rational) -> Self {
        Vec2::new(self.x1.scale(k), self.x2.scale(k))
    }

    pub fn mul_scalar(&self, k: &T) -> Self {
        Vec2::new(self.x1.clone() * k, self.x2.clone() * k)
    }

    /// Rotation by +90 degrees.
    pub fn perp(&self) -> Self {
        Vec2::new(-self.x2.clone(), self.x1.clone())
    }

    pub fn as_slice(&self) -> [T; 2] {
        [self.x1.clone(), self.x2.clone()]
    }
}

impl Vec2<Rational> {
    pub fn from_ints(a: i64, b: i64) -> Self {
        Vec2::new(
            Rational::from_integer(a.into()),
            Rational::from_integer(b.into()),
        )
    }

    pub fn to_quad(&self) -> Vec2<QuadNum> {
        Vec2::new(self.x1.clone().into(), self.x2.clone().into())
    }
}

impl Vec2<QuadNum> {
    pub fn from_ints(a: i64, b: i64) -> Self {
        Vec2::new(QuadNum::from_int(a), QuadNum::from_int(b))
    }

    /// Common non-rational radicand of both coordinates, if any.
    pub fn radicand(&self) -> Result<Option<BigInt>, ExactError> {
        match (self.x1.is_rational(), self.x2.is_rational()) {
            (true, true) => Ok(None),
            (false, true) => Ok(Some(self.x1.radicand().clone())),
            (true, false) => Ok(Some(self.x2.radicand().clone())),
            (false, false) if self.x1.radicand() == self.x2.radicand() => {
                Ok(Some(self.x1.radicand().clone()))
            }
            _ => Err(ExactError::IncompatibleRadicands(
                self.x1.radicand().clone(),
                self.x2.radicand().clone(),
            )),
        }
    }

    /// Positive rescaling so that the first nonzero coordinate has absolute
    /// value one. The direction (and orientation) is unchanged.
    pub fn canonical_direction(&self) -> Self {
        let lead = if !self.x1.is_zero() {
            &self.x1
        } else {
            &self.x2
        };
        if lead.is_zero() {
            return self.clone();
        }
        let inv = lead.abs().checked_inv().expect("nonzero lead");
        self.mul_scalar(&inv)
    }

    /// Any scaling (possibly negative) making the first nonzero coordinate 1.
    pub fn canonical_eigenvector(&self) -> Self {
        let lead = if !self.x1.is_zero() {
            &self.x1
        } else {
            &self.x2
        };
        if lead.is_zero() {
            return self.clone();
        }
        let inv = lead.checked_inv().expect("nonzero lead");
        self.mul_scalar(&inv)
    }
}

impl<T: fmt::Display> fmt::Display for Vec2<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x1, self.x2)
    }
}

impl<T: fmt::Display> fmt::Debug for Vec2<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x1, self.x2)
    }
}

/// 2x2 matrix `[[a11, a12], [a21, a22]]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mat2<T> {
    pub a11: T,
    pub a12: T,
    pub a21: T,
    pub a22: T,
}

impl<T: Scalar> Mat2<T> {
    pub fn new(a11: T, a12: T, a21: T, a22: T) -> Self {
        Mat2 { a11, a12, a21, a22 }
    }

    pub fn identity() -> Self {
        Mat2::new(T::one(), T::zero(), T::zero(), T::one())
    }

    pub fn is_zero(&self) -> bool {
        self.a11.is_zero() && self.a12.is_zero() && self.a21.is_zero() && self.a22.is_zero()
    }

    pub fn trace(&self) -> T {
        self.a11.clone() + &self.a22
    }

    pub fn det(&self) -> T {
        self.a11.clone() * &self.a22 - self.a12.clone() * &self.a21
    }

    pub fn apply<U>(&self, v: &Vec2<U>) -> Vec2<U>
    where
        U: Scalar,
        T: Into<U>,
    {
        let r1 = [self.a11.clone(), self.a12.clone()];
        let r2 = [self.a21.clone(), self.a22.clone()];
        let xs = [v.x1.clone(), v.x2.clone()];
        Vec2::new(dot_mixed(&r1, &xs), dot_mixed(&r2, &xs))
    }

    pub fn mul(&self, o: &Mat2<T>) -> Mat2<T> {
        Mat2::new(
            self.a11.clone() * &o.a11 + self.a12.clone() * &o.a21,
            self.a11.clone() * &o.a12 + self.a12.clone() * &o.a22,
            self.a21.clone() * &o.a11 + self.a22.clone() * &o.a21,
            self.a21.clone() * &o.a12 + self.a22.clone() * &o.a22,
        )
    }

    /// Row vector `b` times this matrix.
    pub fn left_apply(&self, b: &Vec2<T>) -> Vec2<T> {
        Vec2::new(
            b.x1.clone() * &self.a11 + b.x2.clone() * &self.a21,
            b.x1.clone() * &self.a12 + b.x2.clone() * &self.a22,
        )
    }

    pub fn to_matrix(&self) -> Matrix<T> {
        Matrix {
            rows: 2,
            cols: 2,
            data: vec![
                self.a11.clone(),
                self.a12.clone(),
                self.a21.clone(),
                self.a22.clone(),
            ],
        }
    }

    pub fn from_matrix(m: &Matrix<T>) -> Result<Self, LinalgError> {
        if m.rows != 2 || m.cols != 2 {
            return Err(LinalgError::DimensionMismatch {
                expected: 4,
                got: m.rows * m.cols,
            });
        }
        Ok(Mat2::new(
            m.get(0, 0).clone(),
            m.get(0, 1).clone(),
            m.get(1, 0).clone(),
            m.get(1, 1).clone(),
        ))
    }
}

impl Mat2<Rational> {
    pub fn from_ints(a11: i64, a12: i64, a21: i64, a22: i64) -> Self {
        let r = |n: i64| Rational::from_integer(n.into());
        Mat2::new(r(a11), r(a12), r(a21), r(a22))
    }

    /// Exact inverse via the adjugate.
    pub fn inverse(&self) -> Result<Self, LinalgError> {
        let det = self.det();
        if det.is_zero() {
            return Err(LinalgError::SingularMatrix);
        }
        Ok(Mat2::new(
            &self.a22 / &det,
            -(&self.a12 / &det),
            -(&self.a21 / &det),
            &self.a11 / &det,
        ))
    }
}

pub fn mat2_inverse(a: &Mat2<Rational>) -> Result<Mat2<Rational>, LinalgError> {
    a.inverse()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EigenKind {
    ComplexPair,
    RealDistinct,
    RealRepeated,
}

#[derive(Debug, Clone, PartialEq, Eq)]
#[allow(clippy::large_enum_variant)]
pub enum Eigenvectors {
    /// Complex eigenvalues: nothing stored.
    None,
    /// One eigenvector per eigenvalue, in eigenvalue order.
    Distinct(Vec2<QuadNum>, Vec2<QuadNum>),
    /// Defective repeated eigenvalue: a single eigen-direction.
    Single(Vec2<QuadNum>),
    /// `A` is a scalar multiple of the identity.
    FullPlane,
}

/// Eigen-data of a rational 2x2 matrix. Real eigenvalues are ordered
/// `lambda1 >= lambda2`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EigenInfo {
    pub kind: EigenKind,
    pub eigenvalues: Option<(QuadNum, QuadNum)>,
    pub eigenvectors: Eigenvectors,
    pub discriminant: Rational,
}

impl EigenInfo {
    pub fn has_positive_eigenvalue(&self) -> bool {
        self.eigenvalues
            .as_ref()
            .is_some_and(|(l1, _)| l1.sign().is_positive())
    }

    /// Non-rational radicand of the eigenvalues, if any.
    pub fn radicand(&self) -> Option<BigInt> {
        let (l1, _) = self.eigenvalues.as_ref()?;
        (!l1.is_rational()).then(|| l1.radicand().clone())
    }
}

pub fn eigen2(a: &Mat2<Rational>) -> Result<EigenInfo, LinalgError> {
    eigen2_with_bound(a, DEFAULT_FACTOR_BOUND)
}

/// Eigenvalues are the roots `(tr +- sqrt(disc)) / 2` of
/// `l^2 - tr*l + det`; eigenvectors come from a nonzero row `(p, q)` of
/// `A - l I` as `(-q, p)`, scaled so the first nonzero coordinate is 1.
pub fn eigen2_with_bound(a: &Mat2<Rational>, bound: u64) -> Result<EigenInfo, LinalgError> {
    let tr = a.trace();
    let det = a.det();
    let disc = &tr * &tr - Rational::from_integer(4.into()) * &det;
    let half = Rational::new(1.into(), 2.into());
    let kind = match Sign::of_rational(&disc) {
        Sign::Negative => {
            return Ok(EigenInfo {
                kind: EigenKind::ComplexPair,
                eigenvalues: None,
                eigenvectors: Eigenvectors::None,
                discriminant: disc,
            })
        }
        Sign::Zero => EigenKind::RealRepeated,
        Sign::Positive => EigenKind::RealDistinct,
    };
    let (coef, radicand) = sqrt_normalize_with_bound(&disc, bound)?;
    let mid = &tr * &half;
    let spread = &coef * &half;
    let l1 = QuadNum::from_parts(mid.clone(), spread.clone(), radicand.clone());
    let l2 = QuadNum::from_parts(mid, -spread, radicand);
    let aq = lift(a);
    let eigenvectors = match kind {
        EigenKind::RealDistinct => Eigenvectors::Distinct(
            eigenvector(&aq, &l1).expect("distinct eigenvalue has rank-1 A - lI"),
            eigenvector(&aq, &l2).expect("distinct eigenvalue has rank-1 A - lI"),
        ),
        _ => match eigenvector(&aq, &l1) {
            Some(v) => Eigenvectors::Single(v),
            None => Eigenvectors::FullPlane,
        },
    };
    Ok(EigenInfo {
        kind,
        eigenvalues: Some((l1, l2)),
        eigenvectors,
        discriminant: disc,
    })
}

/// Embeds a rational matrix into the quadratic field.
pub fn lift(a: &Mat2<Rational>) -> Mat2<QuadNum> {
    Mat2::new(
        a.a11.clone().into(),
        a.a12.clone().into(),
        a.a21.clone().into(),
        a.a22.clone().into(),
    )
}

/// `None` when `A - lI` vanishes.
fn eigenvector(a: &Mat2<QuadNum>, l: &QuadNum) -> Option<Vec2<QuadNum>> {
    let p1 = &a.a11 - l;
    let q1 = a.a12.clone();
    let p2 = a.a21.clone();
    let q2 = &a.a22 - l;
    let v = if !p1.is_zero() || !q1.is_zero() {
        Vec2::new(-q1, p1)
    } else if !p2.is_zero() || !q2.is_zero() {
        Vec2::new(-q2, p2)
    } else {
        return None;
    };
    Some(v.canonical_eigenvector())
}

/// Primitive integer vector spanning the kernel of the row `b`:
/// `(-b2, b1)` with denominators cleared and common factors removed.
pub fn kernel_dir(b: &Vec2<Rational>) -> Result<Vec2<Rational>, LinalgError> {
    if b.is_zero() {
        return Err(LinalgError::ZeroRow);
    }
    Ok(primitive(&Vec2::new(-b.x2.clone(), b.x1.clone())))
}

/// Positive rescaling of a nonzero rational vector to coprime integers.
pub fn primitive(v: &Vec2<Rational>) -> Vec2<Rational> {
    let l = v.x1.denom().lcm(v.x2.denom());
    let n1 = v.x1.numer() * (&l / v.x1.denom());
    let n2 = v.x2.numer() * (&l / v.x2.denom());
    let g = n1.gcd(&n2);
    if g.is_zero() {
        return v.clone();
    }
    let g = g.abs();
    Vec2::new(
        Rational::from_integer(n1 / &g),
        Rational::from_integer(n2 / &g),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{int, rat};
    use num_traits::One;

    fn q(a: i64, b: i64, d: i64) -> QuadNum {
        QuadNum::new(int(a), int(b), d.into()).unwrap()
    }

    #[test]
    fn apply_examples() {
        let a = Mat2::from_ints(-2, 4, 4, 0);
        assert_eq!(
            a.apply(&Vec2::<Rational>::from_ints(-1, 4)),
            Vec2::<Rational>::from_ints(18, -4)
        );
        let v = vec![int(3), rat(1, 2)];
        assert_eq!(mat_apply(&Matrix::identity(2), &v).unwrap(), v);
        let d = Matrix::diagonal(vec![int(2), int(3), int(5)]);
        assert_eq!(
            mat_apply(&d, &[int(1), int(-1), int(1)]).unwrap(),
            vec![int(2), int(-3), int(5)]
        );
        assert!(matches!(
            mat_apply(&d, &[int(1)]),
            Err(LinalgError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn apply_to_quadratic_vector() {
        let a = Matrix::from_rows(vec![vec![int(-2), int(4)], vec![int(4), int(0)]]).unwrap();
        let beta = vec![
            QuadNum::one(),
            QuadNum::new(rat(1, 4), rat(1, 4), 17.into()).unwrap(),
        ];
        let out = mat_apply(&a, &beta).unwrap();
        let l1 = q(-1, 1, 17);
        assert_eq!(out, vec![&beta[0] * &l1, &beta[1] * &l1]);
    }

    #[test]
    fn inverse_examples() {
        assert_eq!(
            Mat2::from_ints(2, 0, 0, -1).inverse().unwrap(),
            Mat2::new(rat(1, 2), int(0), int(0), int(-1))
        );
        let a = Mat2::from_ints(1, 1, 0, 1);
        let inv = a.inverse().unwrap();
        assert_eq!(inv, Mat2::from_ints(1, -1, 0, 1));
        assert_eq!(a.mul(&inv), Mat2::identity());
        assert_eq!(
            Mat2::from_ints(1, 2, 2, 4).inverse(),
            Err(LinalgError::SingularMatrix)
        );
    }

    #[test]
    fn eigen_worked_matrix() {
        let e = eigen2(&Mat2::from_ints(-2, 4, 4, 0)).unwrap();
        assert_eq!(e.kind, EigenKind::RealDistinct);
        assert_eq!(e.eigenvalues, Some((q(-1, 1, 17), q(-1, -1, 17))));
        let Eigenvectors::Distinct(v1, _) = &e.eigenvectors else {
            panic!("expected two eigenvectors")
        };
        assert_eq!(v1.x1, QuadNum::one());
        assert_eq!(
            v1.x2,
            QuadNum::new(rat(1, 4), rat(1, 4), 17.into()).unwrap()
        );
    }

    #[test]
    fn eigen_kinds() {
        let e = eigen2(&Mat2::from_ints(0, -1, 1, 0)).unwrap();
        assert_eq!(e.kind, EigenKind::ComplexPair);
        assert!(e.eigenvalues.is_none());

        let e = eigen2(&Mat2::from_ints(2, 0, 0, 2)).unwrap();
        assert_eq!(e.kind, EigenKind::RealRepeated);
        assert_eq!(e.eigenvectors, Eigenvectors::FullPlane);
        assert_eq!(
            e.eigenvalues,
            Some((QuadNum::from_int(2), QuadNum::from_int(2)))
        );

        // (A - I) = [[0,1],[0,0]] forces v2 = 0
        let e = eigen2(&Mat2::from_ints(1, 1, 0, 1)).unwrap();
        assert_eq!(e.kind, EigenKind::RealRepeated);
        assert_eq!(
            e.eigenvectors,
            Eigenvectors::Single(Vec2::<QuadNum>::from_ints(1, 0))
        );
    }

    #[test]
    fn kernel_examples() {
        let k = |a, b| kernel_dir(&Vec2::<Rational>::from_ints(a, b)).unwrap();
        assert_eq!(k(4, 1), Vec2::<Rational>::from_ints(-1, 4));
        assert_eq!(k(1, 0), Vec2::<Rational>::from_ints(0, 1));
        assert_eq!(k(2, 2), Vec2::<Rational>::from_ints(-1, 1));
        assert_eq!(
            kernel_dir(&Vec2::new(rat(1, 2), rat(-1, 3))).unwrap(),
            Vec2::<Rational>::from_ints(2, 3)
        );
        assert_eq!(
            kernel_dir(&Vec2::<Rational>::from_ints(0, 0)),
            Err(LinalgError::ZeroRow)
        );
    }
}
