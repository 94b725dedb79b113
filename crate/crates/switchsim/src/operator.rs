//! Dense operators on a finite-dimensional Hilbert space, density operators
//! with validated invariants, and the handful of matrix maps the whole crate
//! is built from. Matrices are stored row-major (ndarray's default), and
//! tensor products put the left factor on the most significant index.

use ndarray::prelude::*;
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::linalg;

/// Square complex matrix with finite entries.
#[derive(Clone, Debug, PartialEq)]
pub struct Operator {
    mat: Array2<C64>,
}

impl Operator {
    pub fn from_array(mat: Array2<C64>) -> Result<Self> {
        if mat.nrows() != mat.ncols() {
            return Err(Error::NotSquare {
                rows: mat.nrows(),
                cols: mat.ncols(),
            });
        }
        if mat.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self { mat })
    }

    /// Caller guarantees squareness and finiteness (hot paths, internal
    /// arithmetic whose inputs were already validated).
    pub(crate) fn from_array_unchecked(mat: Array2<C64>) -> Self {
        debug_assert_eq!(mat.nrows(), mat.ncols());
        Self { mat }
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            mat: Array2::zeros((dim, dim)),
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            mat: Array2::eye(dim),
        }
    }

    pub fn from_diag(diag: &[C64]) -> Self {
        let mut mat = Array2::zeros((diag.len(), diag.len()));
        for (i, z) in diag.iter().enumerate() {
            mat[[i, i]] = *z;
        }
        Self { mat }
    }

    /// |a><b| for computational basis indices a, b.
    pub fn basis_unit(dim: usize, a: usize, b: usize) -> Self {
        let mut mat = Array2::zeros((dim, dim));
        mat[[a, b]] = C64::new(1.0, 0.0);
        Self { mat }
    }

    /// |u><v| for arbitrary kets.
    pub fn outer(u: ArrayView1<C64>, v: ArrayView1<C64>) -> Self {
        let d = u.len();
        let mut mat = Array2::zeros((d, d));
        for i in 0..d {
            for j in 0..d {
                mat[[i, j]] = u[i] * v[j].conj();
            }
        }
        Self { mat }
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn array(&self) -> &Array2<C64> {
        &self.mat
    }

    pub fn into_array(self) -> Array2<C64> {
        self.mat
    }

    pub fn adjoint(&self) -> Self {
        Self {
            mat: self.mat.t().mapv(|z| z.conj()),
        }
    }

    pub fn trace(&self) -> C64 {
        self.mat.diag().sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.mat.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Hermitian part (A + A^dag) / 2.
    pub fn herm_part(&self) -> Self {
        let d = self.dim();
        let mut mat = Array2::zeros((d, d));
        for i in 0..d {
            for j in 0..d {
                mat[[i, j]] = (self.mat[[i, j]] + self.mat[[j, i]].conj()) * 0.5;
            }
        }
        Self { mat }
    }

    /// Frobenius norm of A - A^dag.
    pub fn herm_defect(&self) -> f64 {
        let d = self.dim();
        let mut s = 0.0;
        for i in 0..d {
            for j in 0..d {
                s += (self.mat[[i, j]] - self.mat[[j, i]].conj()).norm_sqr();
            }
        }
        s.sqrt()
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.herm_defect() <= tol
    }

    pub fn is_projector(&self, tol: f64) -> bool {
        if !self.is_hermitian(tol) {
            return false;
        }
        let sq = self * self;
        (&sq - self).frobenius_norm() <= tol
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        let prod = &self.adjoint() * self;
        (&prod - &Self::identity(self.dim())).frobenius_norm() <= tol
    }

    pub fn scaled(&self, c: C64) -> Self {
        Self {
            mat: self.mat.mapv(|z| z * c),
        }
    }

    pub fn scaled_re(&self, c: f64) -> Self {
        Self {
            mat: self.mat.mapv(|z| z * c),
        }
    }

    /// Smallest eigenvalue of a Hermitian operator.
    pub fn min_eigenvalue(&self) -> Result<f64> {
        let w = linalg::eigh_vals(&self.mat)?;
        Ok(if w.is_empty() { 0.0 } else { w[0] })
    }
}

impl std::ops::Add for &Operator {
    type Output = Operator;
    fn add(self, rhs: &Operator) -> Operator {
        Operator {
            mat: &self.mat + &rhs.mat,
        }
    }
}

impl std::ops::Sub for &Operator {
    type Output = Operator;
    fn sub(self, rhs: &Operator) -> Operator {
        Operator {
            mat: &self.mat - &rhs.mat,
        }
    }
}

impl std::ops::Neg for &Operator {
    type Output = Operator;
    fn neg(self) -> Operator {
        Operator {
            mat: self.mat.mapv(|z| -z),
        }
    }
}

/// Matrix product.
impl std::ops::Mul for &Operator {
    type Output = Operator;
    fn mul(self, rhs: &Operator) -> Operator {
        Operator {
            mat: self.mat.dot(&rhs.mat),
        }
    }
}

impl std::ops::AddAssign<&Operator> for Operator {
    fn add_assign(&mut self, rhs: &Operator) {
        self.mat += &rhs.mat;
    }
}

/// tr(A B) in O(d^2), avoiding the full product.
pub fn trace_product(a: &Operator, b: &Operator) -> C64 {
    let d = a.dim();
    debug_assert_eq!(d, b.dim());
    let am = a.array();
    let bm = b.array();
    let mut s = C64::new(0.0, 0.0);
    for i in 0..d {
        for j in 0..d {
            s += am[[i, j]] * bm[[j, i]];
        }
    }
    s
}

/// Tensor product with the left factor on the most significant index:
/// (A kron B)[(i1 dB + i2), (j1 dB + j2)] = A[i1, j1] B[i2, j2].
pub fn kron(a: &Operator, b: &Operator) -> Operator {
    let (da, db) = (a.dim(), b.dim());
    let mut mat = Array2::zeros((da * db, da * db));
    for i1 in 0..da {
        for j1 in 0..da {
            let aij = a.array()[[i1, j1]];
            if aij == C64::new(0.0, 0.0) {
                continue;
            }
            for i2 in 0..db {
                for j2 in 0..db {
                    mat[[i1 * db + i2, j1 * db + j2]] = aij * b.array()[[i2, j2]];
                }
            }
        }
    }
    Operator { mat }
}

/// Trace norm ||A||_1 of a Hermitian operator (sum of |eigenvalues|).
pub fn herm_trace_norm(a: &Operator) -> Result<f64> {
    let w = linalg::eigh_vals(a.array())?;
    Ok(w.iter().map(|x| x.abs()).sum())
}

/// State with unit trace and nonnegative spectrum (within the tolerance it
/// was validated at).
#[derive(Clone, Debug, PartialEq)]
pub struct DensityOperator {
    op: Operator,
}

/// Checks Hermiticity (re-Hermitizing when the defect is below `tol`), unit
/// trace, and spectrum bounded below by -`tol`.
pub fn validate_density(op: Operator, tol: f64) -> Result<DensityOperator> {
    let defect = op.herm_defect();
    if defect > tol {
        return Err(Error::NotHermitian { defect });
    }
    let op = op.herm_part();
    let tr = op.trace();
    if (tr.re - 1.0).abs() > tol || tr.im.abs() > tol {
        return Err(Error::InvalidDensity {
            reason: format!("trace {:.12} + {:.3e}i, expected 1", tr.re, tr.im),
        });
    }
    let min_eig = op.min_eigenvalue()?;
    if min_eig < -tol {
        return Err(Error::InvalidDensity {
            reason: format!("minimum eigenvalue {min_eig:.3e} below -{tol:.1e}"),
        });
    }
    Ok(DensityOperator { op })
}

impl DensityOperator {
    pub fn new(op: Operator, tol: f64) -> Result<Self> {
        validate_density(op, tol)
    }

    /// Caller guarantees the invariants hold by construction (e.g. the
    /// positivity-preserving trajectory scheme, which Hermitizes and pins
    /// the trace of every state it emits).
    pub(crate) fn from_operator_unchecked(op: Operator) -> Self {
        Self { op }
    }

    /// |psi><psi| / <psi|psi>.
    pub fn pure(ket: ArrayView1<C64>) -> Result<Self> {
        let norm_sq: f64 = ket.iter().map(|z| z.norm_sqr()).sum();
        if norm_sq <= 0.0 || !norm_sq.is_finite() {
            return Err(Error::InvalidDensity {
                reason: "pure state from a zero or non-finite ket".into(),
            });
        }
        let op = Operator::outer(ket, ket).scaled_re(1.0 / norm_sq);
        Ok(Self { op })
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self {
            op: Operator::identity(dim).scaled_re(1.0 / dim as f64),
        }
    }

    pub fn dim(&self) -> usize {
        self.op.dim()
    }

    pub fn op(&self) -> &Operator {
        &self.op
    }

    pub fn into_operator(self) -> Operator {
        self.op
    }

    /// tr(A rho), real part (A expected Hermitian).
    pub fn expectation(&self, a: &Operator) -> f64 {
        trace_product(a, &self.op).re
    }
}

/// (1/2) ||a - b||_1.
pub fn trace_distance(a: &DensityOperator, b: &DensityOperator) -> Result<f64> {
    Ok(0.5 * herm_trace_norm(&(a.op() - b.op()))?)
}

pub fn sigma_x() -> Operator {
    Operator::from_array_unchecked(array![
        [C64::new(0.0, 0.0), C64::new(1.0, 0.0)],
        [C64::new(1.0, 0.0), C64::new(0.0, 0.0)]
    ])
}

pub fn sigma_y() -> Operator {
    Operator::from_array_unchecked(array![
        [C64::new(0.0, 0.0), C64::new(0.0, -1.0)],
        [C64::new(0.0, 1.0), C64::new(0.0, 0.0)]
    ])
}

pub fn sigma_z() -> Operator {
    Operator::from_array_unchecked(array![
        [C64::new(1.0, 0.0), C64::new(0.0, 0.0)],
        [C64::new(0.0, 0.0), C64::new(-1.0, 0.0)]
    ])
}

/// |0><1|, the qubit lowering operator.
pub fn sigma_minus() -> Operator {
    Operator::basis_unit(2, 0, 1)
}

pub fn basis_ket(dim: usize, index: usize) -> Array1<C64> {
    let mut v = Array1::zeros(dim);
    v[index] = C64::new(1.0, 0.0);
    v
}
