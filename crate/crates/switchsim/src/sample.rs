//! Seeded random density operators for property tests and certificate
//! verification. All draws go through one owned ChaCha stream so results are
//! reproducible from a single seed.

use ndarray::prelude::*;
use num_complex::Complex64 as C64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::operator::{DensityOperator, Operator};

/// Random-state source. Mixed states are Hilbert-Schmidt uniform (GG^dag
/// normalized); pure states are Haar uniform.
pub struct StateSampler {
    rng: ChaCha8Rng,
}

impl StateSampler {
    pub fn new(seed: u64) -> Self {
        Self {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    fn gaussian(&mut self) -> C64 {
        let re: f64 = StandardNormal.sample(&mut self.rng);
        let im: f64 = StandardNormal.sample(&mut self.rng);
        C64::new(re, im)
    }

    /// Matrix of independent standard complex Gaussians.
    pub fn ginibre(&mut self, rows: usize, cols: usize) -> Array2<C64> {
        Array2::from_shape_fn((rows, cols), |_| self.gaussian())
    }

    /// Full-rank mixed state, Hilbert-Schmidt measure.
    pub fn hs_mixed(&mut self, dim: usize) -> DensityOperator {
        self.rank_k(dim, dim)
    }

    /// Rank-k mixed state: normalized GG^dag with G of shape dim x k.
    pub fn rank_k(&mut self, dim: usize, k: usize) -> DensityOperator {
        let g = self.ginibre(dim, k);
        let gram = g.dot(&g.mapv(|z| z.conj()).reversed_axes());
        let trace: C64 = gram.diag().sum();
        let rho = gram.mapv(|z| z / trace.re);
        DensityOperator::from_operator_unchecked(
            Operator::from_array(rho)
                .expect("finite by construction")
                .herm_part(),
        )
    }

    /// Haar-random pure state.
    pub fn haar_pure(&mut self, dim: usize) -> DensityOperator {
        let v = Array1::from_shape_fn(dim, |_| self.gaussian());
        DensityOperator::pure(v.view()).expect("Gaussian vector is nonzero a.s.")
    }

    /// Random mixed state supported on the span of the given orthonormal
    /// columns.
    pub fn supported_on(&mut self, basis: ArrayView2<C64>) -> DensityOperator {
        let k = basis.ncols();
        let small = self.rank_k(k, k);
        let lifted = basis
            .dot(small.op().array())
            .dot(&basis.mapv(|z| z.conj()).reversed_axes());
        DensityOperator::from_operator_unchecked(
            Operator::from_array(lifted)
                .expect("finite by construction")
                .herm_part(),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::validate_density;
    use crate::target::TargetSubspace;
    use approx::assert_abs_diff_eq;

    #[test]
    fn test_sampled_states_are_valid() {
        let mut s = StateSampler::new(7);
        for dim in [2usize, 3, 5] {
            for _ in 0..20 {
                validate_density(s.hs_mixed(dim).op().clone(), 1e-9).unwrap();
                validate_density(s.haar_pure(dim).op().clone(), 1e-9).unwrap();
                validate_density(s.rank_k(dim, 2).op().clone(), 1e-9).unwrap();
            }
        }
    }

    #[test]
    fn test_determinism_per_seed() {
        let a = StateSampler::new(42).hs_mixed(4);
        let b = StateSampler::new(42).hs_mixed(4);
        assert_eq!(a.op().array(), b.op().array());
        let c = StateSampler::new(43).hs_mixed(4);
        assert!((a.op() - c.op()).frobenius_norm() > 1e-6);
    }

    #[test]
    fn test_rank_is_respected() {
        let mut s = StateSampler::new(1);
        let rho = s.rank_k(4, 2);
        let (vals, _) = crate::linalg::eigh(rho.op().array()).unwrap();
        let near_zero = vals.iter().filter(|v| v.abs() < 1e-12).count();
        assert_eq!(near_zero, 2);
    }

    #[test]
    fn test_supported_on_stays_in_subspace() {
        let mut s = StateSampler::new(9);
        let proj = &crate::operator::Operator::basis_unit(3, 0, 0)
            + &crate::operator::Operator::basis_unit(3, 1, 1);
        let target = TargetSubspace::from_projector(proj, 1e-9).unwrap();
        for _ in 0..10 {
            let rho = s.supported_on(target.basis_s());
            assert_abs_diff_eq!(target.residual_weight(&rho), 0.0, epsilon = 1e-12);
            validate_density(rho.op().clone(), 1e-9).unwrap();
        }
    }

    #[test]
    fn test_pure_states_have_unit_purity() {
        let mut s = StateSampler::new(3);
        let rho = s.haar_pure(5);
        let purity = crate::operator::trace_product(rho.op(), rho.op()).re;
        assert_abs_diff_eq!(purity, 1.0, epsilon = 1e-12);
    }
}
