//! Small dense linear algebra over `f64` and `Complex64`.
//!
//! Dimensions never exceed 64 (the vectorized 8×8 Lyapunov problem), so
//! everything is row-major `Vec` storage with partial-pivot LU.

use std::fmt;
use std::ops::{Add, AddAssign, Div, Index, IndexMut, Mul, Neg, Sub, SubAssign};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Condition estimates above this are reported as singular.
pub const CONDITION_LIMIT: f64 = 1e14;

/// Scalar field the matrices are generic over.
pub trait Scalar:
    Copy
    + PartialEq
    + fmt::Debug
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + AddAssign
    + SubAssign
    + Send
    + Sync
{
    fn zero() -> Self;
    fn one() -> Self;
    fn modulus(self) -> f64;
    fn is_finite(self) -> bool;
    fn from_real(x: f64) -> Self;
    fn to_complex(self) -> Complex64;
}

impl Scalar for f64 {
    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn modulus(self) -> f64 {
        self.abs()
    }
    fn is_finite(self) -> bool {
        f64::is_finite(self)
    }
    fn from_real(x: f64) -> Self {
        x
    }
    fn to_complex(self) -> Complex64 {
        Complex64::new(self, 0.0)
    }
}

impl Scalar for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn one() -> Self {
        Complex64::new(1.0, 0.0)
    }
    fn modulus(self) -> f64 {
        self.norm()
    }
    fn is_finite(self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }
    fn from_real(x: f64) -> Self {
        Complex64::new(x, 0.0)
    }
    fn to_complex(self) -> Complex64 {
        self
    }
}

/// Dense row-major matrix.
#[derive(Clone, PartialEq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

pub type ComplexMatrix = Matrix<Complex64>;
pub type RealMatrix = Matrix<f64>;

impl<T: fmt::Debug> fmt::Debug for Matrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            writeln!(f, "  {:?}", &self.data[r * self.cols..(r + 1) * self.cols])?;
        }
        write!(f, "]")
    }
}

impl<T: Scalar> Matrix<T> {
    pub fn from_rows(rows: usize, cols: usize, data: Vec<T>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Dimension(format!(
                "{} entries given for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        if let Some(bad) = data.iter().position(|x| !x.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "matrix entry",
                reason: format!("entry ({}, {}) is not finite", bad / cols, bad % cols),
            });
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![T::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    pub fn from_diagonal(diag: &[T]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = d;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Self { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    pub fn row(&self, r: usize) -> &[T] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self[(c, r)])
    }

    pub fn scale(&self, s: T) -> Self {
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().map(|&x| x * s).collect() }
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::Dimension(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == T::zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let prod = a * other[(k, j)];
                    out[(i, j)] += prod;
                }
            }
        }
        Ok(out)
    }

    pub fn matvec(&self, v: &[T]) -> Result<Vec<T>> {
        if self.cols != v.len() {
            return Err(Error::Dimension(format!(
                "cannot apply {}x{} to a vector of length {}",
                self.rows,
                self.cols,
                v.len()
            )));
        }
        Ok((0..self.rows)
            .map(|r| {
                let mut acc = T::zero();
                for (a, &x) in self.row(r).iter().zip(v) {
                    acc += *a * x;
                }
                acc
            })
            .collect())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    fn zip_with(&self, other: &Self, f: impl Fn(T, T) -> T) -> Result<Self> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::Dimension(format!(
                "shapes {}x{} and {}x{} differ",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let data = self.data.iter().zip(&other.data).map(|(&a, &b)| f(a, b)).collect();
        Ok(Self { rows: self.rows, cols: self.cols, data })
    }

    /// Maximum absolute column sum.
    pub fn norm1(&self) -> f64 {
        (0..self.cols)
            .map(|c| (0..self.rows).map(|r| self[(r, c)].modulus()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|x| x.modulus()).fold(0.0, f64::max)
    }

    pub fn to_complex(&self) -> ComplexMatrix {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| x.to_complex()).collect(),
        }
    }

    fn require_square(&self) -> Result<()> {
        if self.is_square() {
            Ok(())
        } else {
            Err(Error::Dimension(format!("{}x{} matrix is not square", self.rows, self.cols)))
        }
    }
}

impl<T> Index<(usize, usize)> for Matrix<T> {
    type Output = T;
    fn index(&self, (r, c): (usize, usize)) -> &T {
        assert!(r < self.rows && c < self.cols, "index ({r}, {c}) out of bounds");
        &self.data[r * self.cols + c]
    }
}

impl<T> IndexMut<(usize, usize)> for Matrix<T> {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut T {
        assert!(r < self.rows && c < self.cols, "index ({r}, {c}) out of bounds");
        &mut self.data[r * self.cols + c]
    }
}

/// Partial-pivot LU factorization `P M = L U` packed into one matrix.
#[derive(Debug, Clone)]
pub struct Lu<T> {
    packed: Matrix<T>,
    perm: Vec<usize>,
    odd_swaps: bool,
    /// True when an exactly zero pivot was met.
    singular: bool,
}

impl<T: Scalar> Lu<T> {
    pub fn new(m: &Matrix<T>) -> Result<Self> {
        m.require_square()?;
        let n = m.rows;
        let mut a = m.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut odd_swaps = false;
        let mut singular = false;
        for k in 0..n {
            let (p, best) = (k..n)
                .map(|r| (r, a[(r, k)].modulus()))
                .fold((k, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
            if best == 0.0 {
                singular = true;
                continue;
            }
            if p != k {
                for c in 0..n {
                    a.data.swap(k * n + c, p * n + c);
                }
                perm.swap(k, p);
                odd_swaps = !odd_swaps;
            }
            let pivot = a[(k, k)];
            for r in k + 1..n {
                let factor = a[(r, k)] / pivot;
                a[(r, k)] = factor;
                if factor == T::zero() {
                    continue;
                }
                for c in k + 1..n {
                    let u = a[(k, c)];
                    a[(r, c)] -= factor * u;
                }
            }
        }
        Ok(Self { packed: a, perm, odd_swaps, singular })
    }

    pub fn determinant(&self) -> T {
        let n = self.packed.rows;
        let mut det = if self.odd_swaps { -T::one() } else { T::one() };
        for i in 0..n {
            det = det * self.packed[(i, i)];
        }
        det
    }

    /// Solves without any conditioning check.
    pub fn solve_unchecked(&self, v: &[T]) -> Result<Vec<T>> {
        let n = self.packed.rows;
        if v.len() != n {
            return Err(Error::Dimension(format!("right-hand side has length {}, expected {n}", v.len())));
        }
        if self.singular {
            return Err(Error::Singular { condition: f64::INFINITY });
        }
        let mut x: Vec<T> = self.perm.iter().map(|&p| v[p]).collect();
        for i in 0..n {
            for j in 0..i {
                let l = self.packed[(i, j)];
                let xj = x[j];
                x[i] -= l * xj;
            }
        }
        for i in (0..n).rev() {
            for j in i + 1..n {
                let u = self.packed[(i, j)];
                let xj = x[j];
                x[i] -= u * xj;
            }
            x[i] = x[i] / self.packed[(i, i)];
        }
        Ok(x)
    }

    pub fn inverse(&self) -> Result<Matrix<T>> {
        let n = self.packed.rows;
        let mut inv = Matrix::zeros(n, n);
        let mut e = vec![T::zero(); n];
        for c in 0..n {
            e.iter_mut().for_each(|x| *x = T::zero());
            e[c] = T::one();
            let col = self.solve_unchecked(&e)?;
            for r in 0..n {
                inv[(r, c)] = col[r];
            }
        }
        Ok(inv)
    }
}

/// 1-norm condition number `‖M‖₁‖M⁻¹‖₁`, computed from the explicit inverse.
pub fn condition_number<T: Scalar>(m: &Matrix<T>) -> Result<f64> {
    let lu = Lu::new(m)?;
    if lu.singular {
        return Ok(f64::INFINITY);
    }
    Ok(m.norm1() * lu.inverse()?.norm1())
}

/// Solves `M x = v`, rejecting matrices whose condition number exceeds [`CONDITION_LIMIT`].
pub fn solve<T: Scalar>(m: &Matrix<T>, v: &[T]) -> Result<Vec<T>> {
    let lu = Lu::new(m)?;
    if lu.singular {
        return Err(Error::Singular { condition: f64::INFINITY });
    }
    let condition = m.norm1() * lu.inverse()?.norm1();
    if !(condition <= CONDITION_LIMIT) {
        return Err(Error::Singular { condition });
    }
    lu.solve_unchecked(v)
}

pub fn determinant<T: Scalar>(m: &Matrix<T>) -> Result<T> {
    Ok(Lu::new(m)?.determinant())
}

/// Eigenvalues of a square matrix (complex Schur form via nalgebra).
pub fn eigenvalues<T: Scalar>(m: &Matrix<T>) -> Result<Vec<Complex64>> {
    m.require_square()?;
    let n = m.rows;
    let dm = nalgebra::DMatrix::<Complex64>::from_fn(n, n, |r, c| m[(r, c)].to_complex());
    let schur = nalgebra::Schur::try_new(dm, f64::EPSILON, 10_000)
        .ok_or_else(|| Error::NotSettled("Schur iteration did not converge".into()))?;
    Ok(schur
        .eigenvalues()
        .ok_or_else(|| Error::NotSettled("Schur form is not triangular".into()))?
        .iter()
        .copied()
        .collect())
}

/// Returns the eigenvalue with the largest real part if it is not strictly negative.
pub fn check_hurwitz<T: Scalar>(m: &Matrix<T>) -> Result<()> {
    let eig = eigenvalues(m)?;
    let worst = eig
        .into_iter()
        .max_by(|a, b| a.re.total_cmp(&b.re))
        .ok_or_else(|| Error::Dimension("empty matrix".into()))?;
    if worst.re < 0.0 {
        Ok(())
    } else {
        Err(Error::NotHurwitz { eigenvalue: worst })
    }
}

/// Solves `A Σ + Σ Aᵀ + D = 0` for Hurwitz `A` by vectorization.
///
/// The Kronecker system is solved without the conditioning cutoff: it is
/// routinely ill-conditioned when the drift mixes rates many orders of
/// magnitude apart, yet LU stays backward stable and the residual is small.
pub fn lyapunov_solve(a: &RealMatrix, d: &RealMatrix) -> Result<RealMatrix> {
    a.require_square()?;
    let n = a.rows;
    if d.rows != n || d.cols != n {
        return Err(Error::Dimension(format!("diffusion is {}x{}, drift is {n}x{n}", d.rows, d.cols)));
    }
    let asym = (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .map(|(i, j)| (d[(i, j)] - d[(j, i)]).abs())
        .fold(0.0, f64::max);
    if asym > 1e-12 * d.max_abs().max(f64::MIN_POSITIVE) {
        return Err(Error::InvalidParameter { name: "D", reason: "diffusion matrix is not symmetric".into() });
    }
    check_hurwitz(a)?;

    // (AΣ + ΣAᵀ)_{ij} = Σ_k A_ik Σ_kj + Σ_k A_jk Σ_ik, row-major index i*n+j.
    let m = n * n;
    let mut k = RealMatrix::zeros(m, m);
    for i in 0..n {
        for j in 0..n {
            let row = i * n + j;
            for l in 0..n {
                k[(row, l * n + j)] += a[(i, l)];
                k[(row, i * n + l)] += a[(j, l)];
            }
        }
    }
    let rhs: Vec<f64> = d.data.iter().map(|x| -x).collect();
    let lu = Lu::new(&k)?;
    let mut x = lu.solve_unchecked(&rhs)?;
    // One step of iterative refinement.
    let kx = k.matvec(&x)?;
    let resid: Vec<f64> = rhs.iter().zip(&kx).map(|(r, v)| r - v).collect();
    let dx = lu.solve_unchecked(&resid)?;
    x.iter_mut().zip(dx).for_each(|(xi, di)| *xi += di);

    let sigma = RealMatrix { rows: n, cols: n, data: x };
    Ok(RealMatrix::from_fn(n, n, |i, j| 0.5 * (sigma[(i, j)] + sigma[(j, i)])))
}

/// `A Σ + Σ Aᵀ + D`, for residual checks.
pub fn lyapunov_residual(a: &RealMatrix, sigma: &RealMatrix, d: &RealMatrix) -> Result<RealMatrix> {
    let as_ = a.matmul(sigma)?;
    let sat = sigma.matmul(&a.transpose())?;
    as_.add(&sat)?.add(d)
}

/// Eigenvalues of a real symmetric matrix, ascending.
pub fn symmetric_eigenvalues(m: &RealMatrix) -> Result<Vec<f64>> {
    m.require_square()?;
    let n = m.rows;
    let dm = nalgebra::DMatrix::<f64>::from_fn(n, n, |r, c| 0.5 * (m[(r, c)] + m[(c, r)]));
    let mut ev: Vec<f64> = dm.symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    Ok(ev)
}

/// Eigenvalues of a complex Hermitian matrix, ascending.
pub fn hermitian_eigenvalues(m: &ComplexMatrix) -> Result<Vec<f64>> {
    m.require_square()?;
    let n = m.rows;
    let dm = nalgebra::DMatrix::<Complex64>::from_fn(n, n, |r, c| 0.5 * (m[(r, c)] + m[(c, r)].conj()));
    let mut ev: Vec<f64> = dm.symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    Ok(ev)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn random_complex(rng: &mut ChaCha8Rng, n: usize) -> ComplexMatrix {
        ComplexMatrix::from_fn(n, n, |_, _| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
    }

    #[test]
    fn identity_solve() {
        let v = vec![c(1.0, 2.0), c(-3.0, 0.5), c(0.0, 0.0)];
        let x = solve(&ComplexMatrix::identity(3), &v).unwrap();
        assert_eq!(x, v);
    }

    #[test]
    fn diagonal_imaginary_solve() {
        let m = ComplexMatrix::from_diagonal(&[c(0.0, 2.0); 4]);
        let v = vec![c(1.0, 0.0), c(0.0, 1.0), c(2.0, -2.0), c(-1.0, 3.0)];
        let x = solve(&m, &v).unwrap();
        for (xi, vi) in x.iter().zip(&v) {
            assert!((xi - vi / c(0.0, 2.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn roundtrip_random_systems() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut checked = 0;
        while checked < 1000 {
            let m = random_complex(&mut rng, 4);
            if condition_number(&m).unwrap() > 1e3 {
                continue;
            }
            let x: Vec<Complex64> =
                (0..4).map(|_| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect();
            let v = m.matvec(&x).unwrap();
            let got = solve(&m, &v).unwrap();
            let err: f64 = got.iter().zip(&x).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt();
            let scale: f64 = x.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
            assert!(err <= 1e-12 * scale, "err {err}");
            checked += 1;
        }
    }

    #[test]
    fn singular_reported_with_condition() {
        let m = ComplexMatrix::from_rows(2, 2, vec![c(1.0, 0.0), c(2.0, 0.0), c(2.0, 0.0), c(4.0, 0.0)]).unwrap();
        assert!(matches!(solve(&m, &[c(1.0, 0.0), c(1.0, 0.0)]), Err(Error::Singular { .. })));
        let near = RealMatrix::from_rows(2, 2, vec![1.0, 1.0, 1.0, 1.0 + 1e-15]).unwrap();
        match solve(&near, &[1.0, 2.0]) {
            Err(Error::Singular { condition }) => assert!(condition > CONDITION_LIMIT),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn determinant_basics() {
        assert_eq!(determinant(&ComplexMatrix::identity(4)).unwrap(), c(1.0, 0.0));
        let d = [c(1.0, 1.0), c(2.0, 0.0), c(0.0, -3.0), c(0.5, 0.5)];
        let det = determinant(&ComplexMatrix::from_diagonal(&d)).unwrap();
        assert_eq!(det, d[0] * d[1] * d[2] * d[3]);
        let tri = RealMatrix::from_rows(3, 3, vec![2.0, 5.0, 7.0, 0.0, 3.0, 1.0, 0.0, 0.0, -4.0]).unwrap();
        assert_eq!(determinant(&tri).unwrap(), -24.0);
        let swap = RealMatrix::from_rows(2, 2, vec![0.0, 1.0, 1.0, 0.0]).unwrap();
        assert_eq!(determinant(&swap).unwrap(), -1.0);
    }

    #[test]
    fn determinant_multiplicative() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..500 {
            let a = random_complex(&mut rng, 4);
            let b = random_complex(&mut rng, 4);
            let lhs = determinant(&a.matmul(&b).unwrap()).unwrap();
            let rhs = determinant(&a).unwrap() * determinant(&b).unwrap();
            assert!((lhs - rhs).norm() <= 1e-10 * rhs.norm().max(1e-3), "{lhs} vs {rhs}");
        }
    }

    #[test]
    fn determinant_matches_eigenvalue_product() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..100 {
            let a = random_complex(&mut rng, 5);
            let prod = eigenvalues(&a).unwrap().into_iter().fold(c(1.0, 0.0), |acc, x| acc * x);
            let det = determinant(&a).unwrap();
            assert!((prod - det).norm() <= 1e-10 * det.norm().max(1e-6));
        }
    }

    #[test]
    fn lyapunov_scalar_balance() {
        let a = RealMatrix::identity(3).scale(-0.5);
        let s = lyapunov_solve(&a, &RealMatrix::identity(3)).unwrap();
        assert!(s.sub(&RealMatrix::identity(3)).unwrap().max_abs() < 1e-14);
        let zero = lyapunov_solve(&a, &RealMatrix::zeros(3, 3)).unwrap();
        assert_eq!(zero.max_abs(), 0.0);
    }

    #[test]
    fn lyapunov_rejects_unstable() {
        let a = RealMatrix::from_diagonal(&[-1.0, 0.5]);
        match lyapunov_solve(&a, &RealMatrix::identity(2)) {
            Err(Error::NotHurwitz { eigenvalue }) => assert!((eigenvalue.re - 0.5).abs() < 1e-12),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn lyapunov_random_stable() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            let g = RealMatrix::from_fn(8, 8, |_, _| rng.random_range(-1.0..1.0));
            // Shift by more than the spectral radius bound to make it Hurwitz.
            let shift = g.norm1() + 0.1;
            let a = g.sub(&RealMatrix::identity(8).scale(shift)).unwrap();
            let l = RealMatrix::from_fn(8, 8, |_, _| rng.random_range(-1.0..1.0));
            let d = l.matmul(&l.transpose()).unwrap();
            let s = lyapunov_solve(&a, &d).unwrap();
            let r = lyapunov_residual(&a, &s, &d).unwrap();
            assert!(r.max_abs() <= 1e-10 * d.max_abs());
            assert!(s.sub(&s.transpose()).unwrap().max_abs() <= 1e-12 * s.max_abs());
            let ev = symmetric_eigenvalues(&s).unwrap();
            assert!(ev[0] >= -1e-10 * s.max_abs());
        }
    }

    #[test]
    fn shape_errors() {
        assert!(matches!(RealMatrix::from_rows(2, 2, vec![1.0]), Err(Error::Dimension(_))));
        assert!(RealMatrix::from_rows(1, 1, vec![f64::NAN]).is_err());
        let a = RealMatrix::zeros(2, 3);
        assert!(a.matmul(&a).is_err());
        assert!(determinant(&a).is_err());
    }
}
