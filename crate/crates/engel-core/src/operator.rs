//! Dense operators on a shared grid.
//!
//! A `GridOperator` stores the operator matrix: `apply` is a plain
//! matrix-vector product.  An integral operator with kernel `K` therefore has
//! entries `h * K(u_j, v_k)`, which makes the Frobenius norm of the matrix the
//! quadrature approximation of the Hilbert-Schmidt norm
//! `(integral of |K|^2)^{1/2}` and keeps `trace`, singular values and
//! composition consistent with the operator picture.

use nalgebra::linalg::SymmetricEigen;
use nalgebra::{DMatrix, DVector};
use num_complex::Complex;

use crate::error::{Error, Result};
use crate::grid::Grid1D;
use crate::scalar::{cr, rf, Real};

/// Relative eigenvalue floor used when forming fractional powers: spectrum
/// below `FRACTIONAL_POWER_FLOOR * max_eigenvalue` is clipped up to it.
pub const FRACTIONAL_POWER_FLOOR: f64 = 1e-10;

/// Relative tolerance for accepting a matrix as Hermitian.
pub const HERMITIAN_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Debug)]
pub struct GridOperator<R: Real> {
    grid: Grid1D<R>,
    mat: DMatrix<Complex<R>>,
}

impl<R: Real> GridOperator<R> {
    pub fn from_matrix(grid: Grid1D<R>, mat: DMatrix<Complex<R>>) -> Self {
        assert_eq!(mat.nrows(), grid.len(), "matrix rows must match the grid");
        assert_eq!(mat.ncols(), grid.len(), "matrix columns must match the grid");
        Self { grid, mat }
    }

    /// Integral operator with kernel `K`: entries `h * K(u_j, v_k)`.
    pub fn from_kernel(grid: Grid1D<R>, kernel: impl Fn(R, R) -> Complex<R>) -> Self {
        let h = cr(grid.spacing());
        let mat = DMatrix::from_fn(grid.len(), grid.len(), |j, k| {
            kernel(grid.point(j), grid.point(k)) * h
        });
        Self { grid, mat }
    }

    /// Multiplication operator by the function `g(u)`.
    pub fn diagonal(grid: Grid1D<R>, g: impl Fn(R) -> Complex<R>) -> Self {
        let mat = DMatrix::from_fn(grid.len(), grid.len(), |j, k| {
            if j == k {
                g(grid.point(j))
            } else {
                Complex::new(R::zero(), R::zero())
            }
        });
        Self { grid, mat }
    }

    pub fn identity(grid: Grid1D<R>) -> Self {
        Self::diagonal(grid, |_| Complex::new(R::one(), R::zero()))
    }

    pub fn zero(grid: Grid1D<R>) -> Self {
        let n = grid.len();
        Self::from_matrix(grid, DMatrix::zeros(n, n))
    }

    pub fn grid(&self) -> &Grid1D<R> {
        &self.grid
    }

    pub fn matrix(&self) -> &DMatrix<Complex<R>> {
        &self.mat
    }

    pub fn into_matrix(self) -> DMatrix<Complex<R>> {
        self.mat
    }

    pub fn apply(&self, v: &DVector<Complex<R>>) -> DVector<Complex<R>> {
        &self.mat * v
    }

    /// Operator composition `(self . rhs)(f) = self(rhs(f))`.
    pub fn compose(&self, rhs: &Self) -> Result<Self> {
        self.check_same_grid(rhs)?;
        Ok(Self {
            grid: self.grid.clone(),
            mat: &self.mat * &rhs.mat,
        })
    }

    pub fn adjoint(&self) -> Self {
        Self {
            grid: self.grid.clone(),
            mat: self.mat.adjoint(),
        }
    }

    pub fn scale(&self, c: Complex<R>) -> Self {
        Self {
            grid: self.grid.clone(),
            mat: self.mat.map(|z| z * c),
        }
    }

    pub fn add(&self, rhs: &Self) -> Result<Self> {
        self.check_same_grid(rhs)?;
        Ok(Self {
            grid: self.grid.clone(),
            mat: &self.mat + &rhs.mat,
        })
    }

    pub fn sub(&self, rhs: &Self) -> Result<Self> {
        self.check_same_grid(rhs)?;
        Ok(Self {
            grid: self.grid.clone(),
            mat: &self.mat - &rhs.mat,
        })
    }

    /// Commutator `[A, B] = A B - B A` in the operator sense.
    pub fn commutator(&self, rhs: &Self) -> Result<Self> {
        self.compose(rhs)?.sub(&rhs.compose(self)?)
    }

    pub fn trace(&self) -> Complex<R> {
        let mut acc = Complex::new(R::zero(), R::zero());
        for j in 0..self.mat.nrows() {
            acc += self.mat[(j, j)];
        }
        acc
    }

    /// Hilbert-Schmidt norm: the Frobenius norm of the operator matrix,
    /// equal to `sqrt(sum of squared singular values)`.
    pub fn hs_norm(&self) -> R {
        let mut acc = R::zero();
        for z in self.mat.iter() {
            acc += z.norm_sqr();
        }
        acc.sqrt()
    }

    /// Largest singular value, computed by power iteration on `A* A`.
    ///
    /// Deterministic start vector; the Rayleigh quotient is monotone along
    /// the iteration and near-degenerate top singular values only tighten the
    /// bracket, so the returned value is reliable to well below the check
    /// tolerances used in this crate.
    pub fn operator_norm(&self) -> R {
        let n = self.mat.ncols();
        let ata = self.mat.adjoint() * &self.mat;
        let mut v = DVector::from_fn(n, |j, _| {
            Complex::new(R::one() + rf::<R>(j as f64 / n as f64) * rf(0.125), R::zero())
        });
        let mut norm = v.norm();
        v /= cr(norm);
        let mut lambda = R::zero();
        for _ in 0..500 {
            let w = &ata * &v;
            norm = w.norm();
            if norm <= R::default_epsilon() {
                return R::zero();
            }
            let next = v.dotc(&w).re;
            let stalled = (next - lambda).abs() <= rf::<R>(1e-13) * next.abs().max(R::one());
            lambda = next;
            v = w / cr(norm);
            if stalled {
                break;
            }
        }
        lambda.max(R::zero()).sqrt()
    }

    /// Relative deviation from Hermitian symmetry in Frobenius norm.
    pub fn hermitian_defect(&self) -> R {
        let diff = &self.mat - self.mat.adjoint();
        let mut acc = R::zero();
        for z in diff.iter() {
            acc += z.norm_sqr();
        }
        acc.sqrt() / (R::one() + self.hs_norm())
    }

    /// Spectral decomposition of a Hermitian operator: eigenvalues ascending
    /// with the unitary matrix of eigenvectors as columns.
    pub fn hermitian_eigen(&self) -> Result<(DVector<R>, DMatrix<Complex<R>>)> {
        let defect = self.hermitian_defect();
        if defect > rf(HERMITIAN_TOLERANCE) {
            return Err(Error::NotHermitian {
                asymmetry: defect.to_f64().unwrap_or(f64::NAN),
            });
        }
        let herm = (&self.mat + self.mat.adjoint()).map(|z| z * cr(rf::<R>(0.5)));
        let eigen = SymmetricEigen::new(herm);
        let mut order: Vec<usize> = (0..eigen.eigenvalues.len()).collect();
        order.sort_by(|&a, &b| {
            eigen.eigenvalues[a]
                .partial_cmp(&eigen.eigenvalues[b])
                .unwrap()
        });
        let n = order.len();
        let values = DVector::from_fn(n, |i, _| eigen.eigenvalues[order[i]]);
        let vectors = DMatrix::from_fn(n, n, |r, c| eigen.eigenvectors[(r, order[c])]);
        Ok((values, vectors))
    }

    /// `A^s` for Hermitian positive semidefinite `A` via the spectral
    /// calculus.  Eigenvalues below the relative floor are clipped up to it,
    /// which regularizes negative powers; genuinely negative spectrum is an
    /// error.
    pub fn fractional_power(&self, s: R) -> Result<Self> {
        let (values, vectors) = self.hermitian_eigen()?;
        let max = values.iter().fold(R::zero(), |m, &v| m.max(v.abs()));
        let floor = max * rf(FRACTIONAL_POWER_FLOOR);
        let neg_tol = max * rf(1e-8);
        let mut powered = DVector::zeros(values.len());
        for (i, &v) in values.iter().enumerate() {
            if v < -neg_tol {
                return Err(Error::NotPositiveSemidefinite {
                    min_eig: v.to_f64().unwrap_or(f64::NAN),
                });
            }
            powered[i] = v.max(floor).powf(s);
        }
        let mut scaled = vectors.clone();
        for c in 0..scaled.ncols() {
            for r in 0..scaled.nrows() {
                scaled[(r, c)] *= cr(powered[c]);
            }
        }
        Ok(Self {
            grid: self.grid.clone(),
            mat: scaled * vectors.adjoint(),
        })
    }

    fn check_same_grid(&self, rhs: &Self) -> Result<()> {
        if self.grid != rhs.grid {
            return Err(Error::GridMismatch(format!(
                "{} points vs {} points",
                self.grid.len(),
                rhs.grid.len()
            )));
        }
        Ok(())
    }
}
