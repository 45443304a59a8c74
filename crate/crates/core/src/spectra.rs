//! Dense Hermitian linear algebra and the spectral functional calculus.
//!
//! Everything downstream (normalized determinants, order tests, Levi forms)
//! is expressed through [`HermitianMatrix`] and its [`SpectralDecomposition`].
//! Storage is dense; the supported envelope is dimension <= 64.

use nalgebra::{Complex, DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};

pub type C64 = Complex<f64>;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

/// Relative Hermiticity tolerance applied at ingestion.
pub const TAU_HERM: f64 = 1e-12;
/// Relative tolerance for positive semidefiniteness.
pub const TAU_PSD: f64 = 1e-9;
/// Relative invertibility cutoff for `log` and negative powers.
pub const EPS_LOG: f64 = 1e-12;

const EIGEN_MAX_ITER: usize = 10_000;

#[inline]
pub fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

/// Invertibility cutoff `EPS_LOG * max(1, norm)`.
#[inline]
pub fn log_cutoff(norm: f64) -> f64 {
    EPS_LOG * norm.max(1.0)
}

/// Operator 2-norm of an arbitrary complex matrix.
pub fn op_norm(m: &CMatrix) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.clone().svd(false, false).singular_values.max()
}

/// A dense complex self-adjoint matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianMatrix(CMatrix);

impl HermitianMatrix {
    /// Checked ingestion: rejects matrices whose asymmetry `||A - A*||_F`
    /// exceeds `TAU_HERM * max(1, ||A||_F)`, then symmetrizes.
    pub fn new(m: CMatrix) -> Result<Self> {
        check_shape(&m)?;
        let asym = (&m - m.adjoint()).norm();
        let tol = TAU_HERM * m.norm().max(1.0);
        if asym > tol {
            return Err(Error::NotHermitian {
                asymmetry: asym,
                tolerance: tol,
            });
        }
        Ok(Self::symmetrize_unchecked(m))
    }

    /// Replaces `m` by `(m + m*)/2` without checking how far from Hermitian it was.
    /// Used for results of computations that are Hermitian up to rounding.
    pub fn symmetrize(m: CMatrix) -> Result<Self> {
        check_shape(&m)?;
        Ok(Self::symmetrize_unchecked(m))
    }

    fn symmetrize_unchecked(m: CMatrix) -> Self {
        let adj = m.adjoint();
        Self((m + adj) * c(0.5))
    }

    pub fn from_real(m: DMatrix<f64>) -> Result<Self> {
        Self::new(m.map(c))
    }

    /// Builds a real symmetric matrix from rows.
    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        let n = rows.len();
        let mut m = DMatrix::<f64>::zeros(n, n);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::BadShape {
                    rows: n,
                    cols: row.len(),
                });
            }
            for (j, v) in row.iter().enumerate() {
                m[(i, j)] = *v;
            }
        }
        Self::from_real(m)
    }

    /// Real diagonal matrix. Panics on an empty slice.
    pub fn diag(d: &[f64]) -> Self {
        assert!(!d.is_empty(), "diagonal must be non-empty");
        Self(CMatrix::from_diagonal(&CVector::from_iterator(
            d.len(),
            d.iter().map(|&x| c(x)),
        )))
    }

    pub fn identity(n: usize) -> Self {
        Self::scaled_identity(n, 1.0)
    }

    pub fn zeros(n: usize) -> Self {
        assert!(n >= 1, "dimension must be >= 1");
        Self(CMatrix::zeros(n, n))
    }

    pub fn scaled_identity(n: usize, t: f64) -> Self {
        assert!(n >= 1, "dimension must be >= 1");
        Self(CMatrix::identity(n, n) * c(t))
    }

    /// Rank-one matrix `v v*`.
    pub fn outer(v: &CVector) -> Self {
        Self::symmetrize_unchecked(v * v.adjoint())
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn as_matrix(&self) -> &CMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> CMatrix {
        self.0
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.0[(i, j)]
    }

    /// Real parts of the diagonal.
    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.dim()).map(|i| self.0[(i, i)].re).collect()
    }

    pub fn is_diagonal(&self, tol: f64) -> bool {
        let n = self.dim();
        (0..n).all(|i| (0..n).all(|j| i == j || self.0[(i, j)].norm() <= tol))
    }

    pub fn scale(&self, t: f64) -> Self {
        Self(&self.0 * c(t))
    }

    /// `A + t I`.
    pub fn shift(&self, t: f64) -> Self {
        let mut m = self.0.clone();
        for i in 0..self.dim() {
            m[(i, i)] += c(t);
        }
        Self(m)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        same_dim(self, other)?;
        Ok(Self(&self.0 + &other.0))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        same_dim(self, other)?;
        Ok(Self(&self.0 - &other.0))
    }

    /// Plain matrix product; not Hermitian in general.
    pub fn matmul(&self, other: &Self) -> Result<CMatrix> {
        same_dim(self, other)?;
        Ok(&self.0 * &other.0)
    }

    /// `U A U*`.
    pub fn conjugate_by(&self, u: &CMatrix) -> Result<Self> {
        if u.nrows() != self.dim() || u.ncols() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: u.nrows(),
            });
        }
        Ok(Self::symmetrize_unchecked(u * &self.0 * u.adjoint()))
    }

    /// The quadratic form `<Ax, x>` (real for Hermitian A).
    pub fn quad_form(&self, x: &CVector) -> f64 {
        x.dotc(&(&self.0 * x)).re
    }

    pub fn apply(&self, x: &CVector) -> CVector {
        &self.0 * x
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.0.norm()
    }

    /// Spectral norm `max |lambda_j|`. Falls back to the Frobenius norm if
    /// the eigen-solver fails.
    pub fn spectral_norm(&self) -> f64 {
        eigh(self)
            .map(|d| d.spectral_norm())
            .unwrap_or_else(|_| self.frobenius_norm())
    }

    /// `max(1, ||A||_2)`, the default scale for relative tolerances.
    pub fn scale_hint(&self) -> f64 {
        self.spectral_norm().max(1.0)
    }
}

fn check_shape(m: &CMatrix) -> Result<()> {
    if m.nrows() != m.ncols() || m.nrows() == 0 {
        return Err(Error::BadShape {
            rows: m.nrows(),
            cols: m.ncols(),
        });
    }
    Ok(())
}

fn same_dim(a: &HermitianMatrix, b: &HermitianMatrix) -> Result<()> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            got: b.dim(),
        });
    }
    Ok(())
}

/// Sorted eigen-system `A = sum_j lambda_j v_j v_j*`.
#[derive(Clone, Debug)]
pub struct SpectralDecomposition {
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    /// Orthonormal columns matching `eigenvalues`.
    pub eigenvectors: CMatrix,
}

impl SpectralDecomposition {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn min(&self) -> f64 {
        self.eigenvalues[0]
    }

    pub fn max(&self) -> f64 {
        self.eigenvalues[self.dim() - 1]
    }

    pub fn spectral_norm(&self) -> f64 {
        self.min().abs().max(self.max().abs())
    }

    pub fn vector(&self, j: usize) -> CVector {
        self.eigenvectors.column(j).into_owned()
    }

    pub fn min_vector(&self) -> UnitVector {
        UnitVector::normalized(self.vector(0)).expect("eigenvector has unit norm")
    }

    pub fn max_vector(&self) -> UnitVector {
        UnitVector::normalized(self.vector(self.dim() - 1)).expect("eigenvector has unit norm")
    }

    /// Spectral weights `|<x, v_j>|^2` of the vector state `x`.
    pub fn weights(&self, x: &CVector) -> Vec<f64> {
        let coeffs = self.eigenvectors.adjoint() * x;
        coeffs.iter().map(|z| z.norm_sqr()).collect()
    }

    /// `sum_j f(lambda_j) v_j v_j*`.
    pub fn map<F: Fn(f64) -> f64>(&self, f: F) -> HermitianMatrix {
        let n = self.dim();
        let mut scaled = self.eigenvectors.clone();
        for j in 0..n {
            let fj = c(f(self.eigenvalues[j]));
            for i in 0..n {
                scaled[(i, j)] *= fj;
            }
        }
        HermitianMatrix::symmetrize_unchecked(scaled * self.eigenvectors.adjoint())
    }

    pub fn reconstruct(&self) -> HermitianMatrix {
        self.map(|x| x)
    }
}

/// Gershgorin-based condition estimate, used only for diagnostics.
fn condition_estimate(a: &HermitianMatrix) -> f64 {
    let n = a.dim();
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..n {
        let radius: f64 = (0..n).filter(|&j| j != i).map(|j| a.get(i, j).norm()).sum();
        let d = a.get(i, i).re;
        lo = lo.min(d - radius);
        hi = hi.max(d + radius);
    }
    let big = lo.abs().max(hi.abs());
    let small = if lo > 0.0 { lo } else { f64::MIN_POSITIVE };
    big / small
}

/// Hermitian eigen-decomposition with eigenvalues sorted ascending.
pub fn eigh(a: &HermitianMatrix) -> Result<SpectralDecomposition> {
    let n = a.dim();
    let eig = SymmetricEigen::try_new(a.as_matrix().clone(), f64::EPSILON, EIGEN_MAX_ITER)
        .ok_or_else(|| Error::EigenNonConvergence {
            dim: n,
            condition_estimate: condition_estimate(a),
        })?;
    if eig.eigenvalues.iter().any(|v| !v.is_finite()) {
        return Err(Error::EigenNonConvergence {
            dim: n,
            condition_estimate: condition_estimate(a),
        });
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let eigenvalues = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut eigenvectors = CMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        eigenvectors.set_column(dst, &eig.eigenvectors.column(src));
    }
    Ok(SpectralDecomposition {
        eigenvalues,
        eigenvectors,
    })
}

/// Scalar functions supported by [`fun_calc`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum FunctionTag {
    Log,
    Exp,
    Power(f64),
}

/// Spectral functional calculus `f(A)`.
pub fn fun_calc(a: &HermitianMatrix, f: FunctionTag) -> Result<HermitianMatrix> {
    let d = eigh(a)?;
    fun_calc_decomposed(&d, f)
}

/// [`fun_calc`] on an already computed eigen-system.
pub fn fun_calc_decomposed(d: &SpectralDecomposition, f: FunctionTag) -> Result<HermitianMatrix> {
    let norm = d.spectral_norm();
    match f {
        FunctionTag::Exp => Ok(d.map(f64::exp)),
        FunctionTag::Log => {
            require_invertible(d)?;
            Ok(d.map(f64::ln))
        }
        FunctionTag::Power(p) if p == 0.0 => Ok(HermitianMatrix::identity(d.dim())),
        FunctionTag::Power(p) if p < 0.0 => {
            require_invertible(d)?;
            Ok(d.map(|x| x.powf(p)))
        }
        FunctionTag::Power(p) => {
            if d.min() < -TAU_PSD * norm.max(1.0) {
                return Err(Error::NotPositive {
                    lambda_min: d.min(),
                });
            }
            Ok(d.map(|x| x.max(0.0).powf(p)))
        }
    }
}

fn require_invertible(d: &SpectralDecomposition) -> Result<()> {
    let cutoff = log_cutoff(d.spectral_norm());
    if d.min() <= cutoff {
        return Err(Error::NotInvertible {
            lambda_min: d.min(),
            cutoff,
        });
    }
    Ok(())
}

pub fn min_eig(a: &HermitianMatrix) -> Result<f64> {
    Ok(eigh(a)?.min())
}

pub fn max_eig(a: &HermitianMatrix) -> Result<f64> {
    Ok(eigh(a)?.max())
}

/// Outcome of a semidefiniteness test.
#[derive(Clone, Debug, PartialEq)]
pub struct PsdCheck {
    pub holds: bool,
    /// `lambda_min(A)`.
    pub margin: f64,
    /// The threshold `-TAU_PSD * scale` the margin was compared against.
    pub threshold: f64,
}

/// `lambda_min(A) >= -TAU_PSD * scale`.
pub fn is_psd(a: &HermitianMatrix, scale: f64) -> Result<PsdCheck> {
    if !(scale > 0.0) {
        return Err(Error::Domain(format!("scale must be positive, got {scale}")));
    }
    let lmin = min_eig(a)?;
    let threshold = -TAU_PSD * scale;
    Ok(PsdCheck {
        holds: lmin >= threshold,
        margin: lmin,
        threshold,
    })
}

/// Entrywise (Schur) product relative to the standard basis.
pub fn hadamard(a: &HermitianMatrix, b: &HermitianMatrix) -> Result<HermitianMatrix> {
    same_dim(a, b)?;
    HermitianMatrix::symmetrize(a.as_matrix().component_mul(b.as_matrix()))
}

/// Weighted geometric mean `A^{1/2} (A^{-1/2} B A^{-1/2})^alpha A^{1/2}`.
pub fn geometric_mean(a: &HermitianMatrix, b: &HermitianMatrix, alpha: f64) -> Result<HermitianMatrix> {
    same_dim(a, b)?;
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::Domain(format!("alpha must lie in [0, 1], got {alpha}")));
    }
    let da = eigh(a)?;
    require_invertible(&da)?;
    require_invertible(&eigh(b)?)?;
    if alpha == 0.0 {
        return Ok(a.clone());
    }
    if alpha == 1.0 {
        return Ok(b.clone());
    }
    let half = da.map(f64::sqrt);
    let inv_half = da.map(|x| 1.0 / x.sqrt());
    let inner = HermitianMatrix::symmetrize(inv_half.as_matrix() * b.as_matrix() * inv_half.as_matrix())?;
    let powered = fun_calc(&inner, FunctionTag::Power(alpha))?;
    HermitianMatrix::symmetrize(half.as_matrix() * powered.as_matrix() * half.as_matrix())
}

/// A complex vector of Euclidean norm one.
#[derive(Clone, Debug, PartialEq)]
pub struct UnitVector(CVector);

impl UnitVector {
    /// Normalizes `v`; fails on zero or non-finite input.
    pub fn normalized(v: CVector) -> Result<Self> {
        let n = v.norm();
        if !(n > 0.0) || !n.is_finite() {
            return Err(Error::ZeroVector);
        }
        Ok(Self(v.unscale(n)))
    }

    pub fn from_real(v: &[f64]) -> Result<Self> {
        Self::normalized(CVector::from_iterator(v.len(), v.iter().map(|&x| c(x))))
    }

    /// Standard basis vector `e_j` (0-based index).
    pub fn basis(n: usize, j: usize) -> Self {
        assert!(j < n, "basis index out of range");
        let mut v = CVector::zeros(n);
        v[j] = c(1.0);
        Self(v)
    }

    /// `|I|^{-1/2} sum_{j in I} e_j` (0-based indices).
    pub fn averaging(n: usize, indices: &[usize]) -> Result<Self> {
        let mut v = CVector::zeros(n);
        for &j in indices {
            if j >= n {
                return Err(Error::DimensionMismatch { expected: n, got: j + 1 });
            }
            v[j] = c(1.0);
        }
        Self::normalized(v)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_vector(&self) -> &CVector {
        &self.0
    }

    pub fn into_vector(self) -> CVector {
        self.0
    }
}

/// Bounds `0 < m <= M` with `m I <= A <= M I`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpectralBounds {
    lower: f64,
    upper: f64,
}

impl SpectralBounds {
    pub fn new(lower: f64, upper: f64) -> Result<Self> {
        if !(lower > 0.0) || !(lower <= upper) || !upper.is_finite() {
            return Err(Error::InvalidBounds { m: lower, big_m: upper });
        }
        Ok(Self { lower, upper })
    }

    /// Tightest bounds: the spectral endpoints of `a`.
    pub fn of(a: &HermitianMatrix) -> Result<Self> {
        let d = eigh(a)?;
        Self::new(d.min(), d.max())
    }

    pub fn lower(&self) -> f64 {
        self.lower
    }

    pub fn upper(&self) -> f64 {
        self.upper
    }

    /// `h = M / m`.
    pub fn ratio(&self) -> f64 {
        self.upper / self.lower
    }

    /// Whether `m I <= a <= M I` within the PSD tolerance.
    pub fn contains(&self, a: &HermitianMatrix) -> Result<bool> {
        let d = eigh(a)?;
        let tol = TAU_PSD * self.upper.max(d.spectral_norm()).max(1.0);
        Ok(d.min() >= self.lower - tol && d.max() <= self.upper + tol)
    }
}
