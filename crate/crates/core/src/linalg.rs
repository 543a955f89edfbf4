//! Hermitian linear-algebra kernel.
//!
//! Everything here works on dense complex matrices of modest size (a few
//! dozen rows). [`HermitianMatrix`] carries the Hermitian invariant in its
//! type, so [`eigh`] and the spectral functions built on it are total.

use std::ops::{Add, Mul, Sub};

use nalgebra::linalg::SymmetricEigen;
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{ensure_dim, Error, Result};

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

/// Absolute tolerance on `|H[j,k] - conj(H[k,j])|` when validating input.
pub const HERMITIAN_TOL: f64 = 1e-12;
/// Eigenvalues above `-PSD_TOL` count as nonnegative.
pub const PSD_TOL: f64 = 1e-10;
/// Relative clip threshold: eigenvalues with `|λ| <= CLIP_REL * max(1, |H|)` are zero.
pub const CLIP_REL: f64 = 1e-12;

pub(crate) const ZERO: Complex64 = Complex64::new(0.0, 0.0);

pub(crate) fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// A square complex matrix equal to its conjugate transpose.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianMatrix(CMatrix);

impl HermitianMatrix {
    /// Validates squareness and Hermitian symmetry, then stores the exactly
    /// symmetrized matrix.
    pub fn new(m: CMatrix) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::validation(format!(
                "matrix is {}x{}, expected square",
                m.nrows(),
                m.ncols()
            )));
        }
        if m.nrows() == 0 {
            return Err(Error::validation("matrix has dimension 0"));
        }
        let d = m.nrows();
        for j in 0..d {
            for k in j..d {
                let defect = (m[(j, k)] - m[(k, j)].conj()).norm();
                if defect > HERMITIAN_TOL {
                    return Err(Error::validation(format!(
                        "matrix is not Hermitian: entry ({j},{k}) differs from conjugate of ({k},{j}) by {defect:e}"
                    )));
                }
            }
        }
        Ok(Self::from_raw(m))
    }

    /// Symmetrizes `(m + m†)/2` without checking. For matrices that are
    /// Hermitian by construction up to rounding.
    pub(crate) fn from_raw(m: CMatrix) -> Self {
        debug_assert_eq!(m.nrows(), m.ncols());
        let adj = m.adjoint();
        HermitianMatrix((m + adj).map(|z| z * 0.5))
    }

    pub fn from_real_diag(diag: &[f64]) -> Self {
        let d = diag.len();
        let mut m = CMatrix::zeros(d, d);
        for (i, &v) in diag.iter().enumerate() {
            m[(i, i)] = c(v);
        }
        HermitianMatrix(m)
    }

    /// Builds a matrix from real row-major entries (symmetric input expected).
    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        let d = rows.len();
        let mut m = CMatrix::zeros(d, d);
        for (j, row) in rows.iter().enumerate() {
            ensure_dim(d, row.len())?;
            for (k, &v) in row.iter().enumerate() {
                m[(j, k)] = c(v);
            }
        }
        Self::new(m)
    }

    pub fn identity(d: usize) -> Self {
        HermitianMatrix(CMatrix::identity(d, d))
    }

    pub fn zeros(d: usize) -> Self {
        HermitianMatrix(CMatrix::zeros(d, d))
    }

    /// `|v⟩⟨v|` for the given (not renormalized) vector.
    pub fn projector(v: &CVector) -> Self {
        HermitianMatrix(v * v.adjoint())
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> CMatrix {
        self.0
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim()).map(|i| self.0[(i, i)].re).sum()
    }

    /// Real trace inner product `tr[A B]`.
    pub fn inner(&self, other: &HermitianMatrix) -> f64 {
        debug_assert_eq!(self.dim(), other.dim());
        self.0
            .iter()
            .zip(other.0.iter())
            .map(|(a, b)| (a * b.conj()).re)
            .sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.0.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn diagonal_real(&self) -> Vec<f64> {
        (0..self.dim()).map(|i| self.0[(i, i)].re).collect()
    }

    pub fn scaled(&self, s: f64) -> Self {
        HermitianMatrix(self.0.map(|z| z * s))
    }

    /// `U H U†` for an arbitrary (rectangular) `U`.
    pub fn conjugate_by(&self, u: &CMatrix) -> Self {
        Self::from_raw(u * &self.0 * u.adjoint())
    }

    /// Frobenius norm of the commutator `[A, B]`.
    pub fn commutator_norm(&self, other: &HermitianMatrix) -> f64 {
        let ab = &self.0 * &other.0;
        let ba = &other.0 * &self.0;
        (ab - ba).iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Frobenius distance to another matrix of the same dimension.
    pub fn distance(&self, other: &HermitianMatrix) -> f64 {
        (self - other).frobenius_norm()
    }

    /// Largest entry magnitude.
    pub fn max_abs(&self) -> f64 {
        self.0.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

impl Add for &HermitianMatrix {
    type Output = HermitianMatrix;
    fn add(self, rhs: &HermitianMatrix) -> HermitianMatrix {
        HermitianMatrix(&self.0 + &rhs.0)
    }
}

impl Sub for &HermitianMatrix {
    type Output = HermitianMatrix;
    fn sub(self, rhs: &HermitianMatrix) -> HermitianMatrix {
        HermitianMatrix(&self.0 - &rhs.0)
    }
}

impl Mul<f64> for &HermitianMatrix {
    type Output = HermitianMatrix;
    fn mul(self, rhs: f64) -> HermitianMatrix {
        self.scaled(rhs)
    }
}

/// Eigendecomposition `H = U diag(λ) U†` with ascending eigenvalues.
#[derive(Clone, Debug)]
pub struct Spectrum {
    pub eigenvalues: Vec<f64>,
    /// Unitary matrix whose columns are the eigenvectors.
    pub eigenvectors: CMatrix,
}

impl Spectrum {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    /// Magnitude below which eigenvalues are treated as exactly zero.
    pub fn clip_threshold(&self) -> f64 {
        let scale = self
            .eigenvalues
            .iter()
            .fold(1.0_f64, |acc, &l| acc.max(l.abs()));
        CLIP_REL * scale
    }

    pub fn min(&self) -> f64 {
        self.eigenvalues[0]
    }

    pub fn max(&self) -> f64 {
        *self.eigenvalues.last().expect("nonempty spectrum")
    }

    pub fn eigenvector(&self, i: usize) -> CVector {
        self.eigenvectors.column(i).into_owned()
    }

    /// `U diag(f(λ)) U†`.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> HermitianMatrix {
        let mut scaled = self.eigenvectors.clone();
        for (j, &l) in self.eigenvalues.iter().enumerate() {
            let v = f(l);
            scaled.column_mut(j).iter_mut().for_each(|z| *z *= v);
        }
        HermitianMatrix::from_raw(scaled * self.eigenvectors.adjoint())
    }

    /// Projector onto the span of eigenvectors whose eigenvalue satisfies `keep`.
    pub fn projector_where(&self, keep: impl Fn(f64) -> bool) -> HermitianMatrix {
        self.map(|l| if keep(l) { 1.0 } else { 0.0 })
    }

    pub fn reconstruct(&self) -> HermitianMatrix {
        self.map(|l| l)
    }

    /// Indices of eigenvalues above the clip threshold.
    pub fn support(&self) -> Vec<usize> {
        let clip = self.clip_threshold();
        (0..self.dim())
            .filter(|&i| self.eigenvalues[i] > clip)
            .collect()
    }

    /// Indices of eigenvalues at or below the clip threshold (the numerical kernel
    /// of a positive semidefinite matrix).
    pub fn kernel(&self) -> Vec<usize> {
        let clip = self.clip_threshold();
        (0..self.dim())
            .filter(|&i| self.eigenvalues[i] <= clip)
            .collect()
    }
}

pub fn eigh(h: &HermitianMatrix) -> Spectrum {
    let d = h.dim();
    if d == 1 {
        return Spectrum {
            eigenvalues: vec![h.0[(0, 0)].re],
            eigenvectors: CMatrix::identity(1, 1),
        };
    }
    let eig = SymmetricEigen::new(h.0.clone());
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let eigenvalues = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut eigenvectors = CMatrix::zeros(d, d);
    for (dst, &src) in order.iter().enumerate() {
        eigenvectors.set_column(dst, &eig.eigenvectors.column(src));
    }
    Spectrum {
        eigenvalues,
        eigenvectors,
    }
}

/// Scalar functions that can be applied spectrally.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum MatrixFunction {
    /// Natural logarithm on the support; zero on the kernel.
    Log,
    /// `λ^s`; for non-integer `s` only on the support.
    Pow(f64),
    Sqrt,
    Exp,
}

pub fn matrix_function(h: &HermitianMatrix, f: MatrixFunction) -> Result<HermitianMatrix> {
    apply_function(&eigh(h), f)
}

/// Same as [`matrix_function`] but reuses an existing eigendecomposition.
pub fn apply_function(spec: &Spectrum, f: MatrixFunction) -> Result<HermitianMatrix> {
    let clip = spec.clip_threshold();
    let needs_psd = match f {
        MatrixFunction::Log | MatrixFunction::Sqrt => true,
        MatrixFunction::Pow(s) => s.fract() != 0.0 || s < 0.0,
        MatrixFunction::Exp => false,
    };
    if needs_psd {
        let neg_tol = PSD_TOL * (clip / CLIP_REL);
        if spec.min() < -neg_tol {
            return Err(Error::domain(format!(
                "{f:?} of a matrix with negative eigenvalue {:e}",
                spec.min()
            )));
        }
    }
    Ok(match f {
        MatrixFunction::Log => spec.map(|l| if l > clip { l.ln() } else { 0.0 }),
        MatrixFunction::Sqrt => spec.map(|l| if l > clip { l.sqrt() } else { 0.0 }),
        MatrixFunction::Exp => spec.map(f64::exp),
        MatrixFunction::Pow(s) if s == 0.0 => spec.map(|l| if l.abs() > clip { 1.0 } else { 0.0 }),
        MatrixFunction::Pow(s) if s.fract() == 0.0 && s > 0.0 => spec.map(|l| l.powi(s as i32)),
        MatrixFunction::Pow(s) => spec.map(|l| if l > clip { l.powf(s) } else { 0.0 }),
    })
}

/// First divided difference of `ln` at `(a, b)`, with the limit `1/a` on the diagonal.
pub(crate) fn log_divided_difference(a: f64, b: f64) -> f64 {
    let d = a - b;
    if d == 0.0 {
        1.0 / a
    } else if d.abs() < 0.5 * b {
        (d / b).ln_1p() / d
    } else {
        (a.ln() - b.ln()) / d
    }
}

/// Fréchet derivative of the matrix logarithm at `x` in direction `h`,
/// by the Daleckii–Krein formula in the eigenbasis of `x`.
pub fn frechet_log(x: &HermitianMatrix, h: &HermitianMatrix) -> Result<HermitianMatrix> {
    ensure_dim(x.dim(), h.dim())?;
    let spec = eigh(x);
    let neg_tol = PSD_TOL * (spec.clip_threshold() / CLIP_REL);
    if spec.min() < -neg_tol {
        return Err(Error::domain(format!(
            "log derivative at a matrix with negative eigenvalue {:e}",
            spec.min()
        )));
    }
    frechet_log_at(&spec, h)
}

pub(crate) fn frechet_log_at(spec: &Spectrum, h: &HermitianMatrix) -> Result<HermitianMatrix> {
    let u = &spec.eigenvectors;
    let mut ht = u.adjoint() * h.matrix() * u;
    let clip = spec.clip_threshold();
    let tol = 1e-9 * h.max_abs().max(1.0);
    let lam = &spec.eigenvalues;
    let d = spec.dim();
    for j in 0..d {
        for k in 0..d {
            if lam[j] > clip && lam[k] > clip {
                ht[(j, k)] *= log_divided_difference(lam[j], lam[k]);
            } else {
                if ht[(j, k)].norm() > tol {
                    return Err(Error::domain(format!(
                        "direction has weight {:e} outside the support of the base point",
                        ht[(j, k)].norm()
                    )));
                }
                ht[(j, k)] = ZERO;
            }
        }
    }
    Ok(HermitianMatrix::from_raw(u * ht * u.adjoint()))
}

/// Sum of absolute eigenvalues.
pub fn trace_norm(a: &HermitianMatrix) -> f64 {
    eigh(a).eigenvalues.iter().map(|l| l.abs()).sum()
}

pub fn kron(a: &HermitianMatrix, b: &HermitianMatrix) -> HermitianMatrix {
    HermitianMatrix(a.0.kronecker(&b.0))
}

/// `a ⊗ a ⊗ … ⊗ a` (`n` factors).
pub fn kron_power(a: &HermitianMatrix, n: usize) -> HermitianMatrix {
    assert!(n >= 1, "kron_power needs at least one factor");
    let mut out = a.clone();
    for _ in 1..n {
        out = kron(&out, a);
    }
    out
}

/// Whether `c·B − A` is positive semidefinite (minimum eigenvalue ≥ −1e−10).
pub fn dominates(a: &HermitianMatrix, b: &HermitianMatrix, c: f64) -> Result<bool> {
    ensure_dim(a.dim(), b.dim())?;
    let gap = &b.scaled(c) - a;
    Ok(eigh(&gap).min() >= -PSD_TOL)
}
