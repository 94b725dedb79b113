//! Target subspaces: the invariant set I_S(H) of states supported on a
//! subspace H_S, described by its orthogonal projector. The complement basis
//! ordering fixed here is what the reduced (complement-block) generator
//! calculations in the rest of the crate are expressed in.

use ndarray::prelude::*;
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::linalg;
use crate::operator::{DensityOperator, Operator};

#[derive(Clone, Debug)]
pub struct TargetSubspace {
    projector: Operator,
    complement: Operator,
    /// d x r, orthonormal columns spanning the target.
    basis_s: Array2<C64>,
    /// d x (d - r), orthonormal columns spanning the complement.
    basis_r: Array2<C64>,
}

impl TargetSubspace {
    /// Builds the subspace from its orthogonal projector.
    pub fn from_projector(projector: Operator, tol: f64) -> Result<Self> {
        if !projector.is_hermitian(tol) {
            return Err(Error::NotHermitian {
                defect: projector.herm_defect(),
            });
        }
        let sq = &projector * &projector;
        let defect = (&sq - &projector).frobenius_norm();
        if defect > tol {
            return Err(Error::NotProjector { defect });
        }
        let d = projector.dim();
        let tr = projector.trace().re;
        let r = tr.round() as usize;
        if (tr - r as f64).abs() > tol * d as f64 || r == 0 || r > d {
            return Err(Error::Invalid {
                context: "target subspace",
                reason: format!("projector trace {tr} is not a valid rank"),
            });
        }
        // Eigenvalues of a projector split into d - r zeros and r ones, in
        // ascending order; the eigenvector columns give orthonormal bases.
        let (w, v) = linalg::eigh(projector.array())?;
        for (k, lam) in w.iter().enumerate() {
            let nearest = if k < d - r { 0.0 } else { 1.0 };
            if (lam - nearest).abs() > 1e-7 {
                return Err(Error::NotProjector {
                    defect: (lam - nearest).abs(),
                });
            }
        }
        let basis_r = v.slice(s![.., ..d - r]).to_owned();
        let basis_s = v.slice(s![.., d - r..]).to_owned();
        let complement = &Operator::identity(d) - &projector;
        Ok(Self {
            projector,
            complement,
            basis_s,
            basis_r,
        })
    }

    /// Builds the subspace spanned by the given kets (must be linearly
    /// independent; they are orthonormalized internally).
    pub fn from_span(kets: &[ArrayView1<C64>], tol: f64) -> Result<Self> {
        if kets.is_empty() {
            return Err(Error::Invalid {
                context: "target subspace",
                reason: "empty spanning set".into(),
            });
        }
        let d = kets[0].len();
        let mut ortho: Vec<Array1<C64>> = Vec::with_capacity(kets.len());
        for ket in kets {
            if ket.len() != d {
                return Err(Error::DimensionMismatch {
                    left: d,
                    right: ket.len(),
                    context: "spanning kets",
                });
            }
            let mut v = ket.to_owned();
            for u in &ortho {
                let overlap: C64 = u.iter().zip(v.iter()).map(|(a, b)| a.conj() * b).sum();
                for i in 0..d {
                    v[i] -= overlap * u[i];
                }
            }
            let norm: f64 = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            if norm < 1e-10 {
                return Err(Error::Invalid {
                    context: "target subspace",
                    reason: "spanning kets are linearly dependent".into(),
                });
            }
            ortho.push(v.mapv(|z| z / norm));
        }
        let mut proj = Operator::zeros(d);
        for u in &ortho {
            proj += &Operator::outer(u.view(), u.view());
        }
        Self::from_projector(proj, tol)
    }

    pub fn dim(&self) -> usize {
        self.projector.dim()
    }

    /// Dimension of the target subspace.
    pub fn dim_s(&self) -> usize {
        self.basis_s.ncols()
    }

    /// Dimension of the complement.
    pub fn dim_r(&self) -> usize {
        self.basis_r.ncols()
    }

    pub fn projector(&self) -> &Operator {
        &self.projector
    }

    pub fn complement_projector(&self) -> &Operator {
        &self.complement
    }

    pub fn basis_s(&self) -> ArrayView2<'_, C64> {
        self.basis_s.view()
    }

    pub fn basis_r(&self) -> ArrayView2<'_, C64> {
        self.basis_r.view()
    }

    /// tr(P_R rho): the population outside the target. Zero exactly on
    /// I_S(H), and (1/2)||rho - I_S||_1 <= this weight.
    pub fn residual_weight(&self, rho: &DensityOperator) -> f64 {
        crate::operator::trace_product(&self.complement, rho.op()).re
    }

    pub fn contains(&self, rho: &DensityOperator, tol: f64) -> bool {
        self.residual_weight(rho) <= tol
    }

    /// W_R^dag X W_R, the complement block of X in the complement basis.
    pub fn complement_block(&self, x: &Operator) -> Array2<C64> {
        let wr = &self.basis_r;
        let tmp = x.array().dot(wr);
        wr.t().mapv(|z| z.conj()).dot(&tmp)
    }

    /// W_S^dag X W_S, the target block of X in the target basis.
    pub fn target_block(&self, x: &Operator) -> Array2<C64> {
        let ws = &self.basis_s;
        let tmp = x.array().dot(ws);
        ws.t().mapv(|z| z.conj()).dot(&tmp)
    }

    /// W_R X_R W_R^dag, embedding a complement-block matrix into the full
    /// space (zero on and against the target).
    pub fn embed_complement(&self, x_r: &Array2<C64>) -> Operator {
        let wr = &self.basis_r;
        let tmp = x_r.dot(&wr.t().mapv(|z| z.conj()));
        Operator::from_array_unchecked(wr.dot(&tmp))
    }

    /// W_S X_S W_S^dag.
    pub fn embed_target(&self, x_s: &Array2<C64>) -> Operator {
        let ws = &self.basis_s;
        let tmp = x_s.dot(&ws.t().mapv(|z| z.conj()));
        Operator::from_array_unchecked(ws.dot(&tmp))
    }
}
