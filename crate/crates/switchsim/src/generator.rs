//! Lindblad generators of the controlled master equation
//!
//!   d rho / dt = -i [H_j, rho] + sum_v D[L_{j,v}](rho) + D[C](rho)
//!
//! where C is the measurement channel shared by every generator in a
//! switching family. Convex combinations, the matrix (vectorized) form of a
//! generator, deterministic Euler propagation of the ensemble mean, and the
//! stability check on the target-complement block live here.

use ndarray::prelude::*;
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::linalg;
use crate::operator::{trace_product, DensityOperator, Operator};
use crate::superop::commutator_drift;
use crate::target::TargetSubspace;

/// An operator together with its adjoint and Gram matrix A^dag A, cached
/// because dissipator applications dominate the simulation hot path.
#[derive(Clone, Debug)]
pub(crate) struct CachedOp {
    op: Operator,
    dag: Operator,
    gram: Operator,
    is_zero: bool,
}

impl CachedOp {
    fn new(op: Operator) -> Self {
        let dag = op.adjoint();
        let gram = &dag * &op;
        let is_zero = op.frobenius_norm() == 0.0;
        Self {
            op,
            dag,
            gram,
            is_zero,
        }
    }

    /// A X A^dag.
    pub(crate) fn sandwich(&self, x: &Operator) -> Operator {
        &(&self.op * x) * &self.dag
    }

    pub(crate) fn is_zero(&self) -> bool {
        self.is_zero
    }

    /// D[A](X) = A X A^dag - (1/2){A^dag A, X}.
    fn dissipate(&self, x: &Operator) -> Operator {
        let sandwich = self.sandwich(x);
        let anti = &(&self.gram * x) + &(x * &self.gram);
        &sandwich - &anti.scaled_re(0.5)
    }

    /// Heisenberg-picture dissipator A^dag X A - (1/2){A^dag A, X}.
    fn dissipate_dual(&self, x: &Operator) -> Operator {
        let sandwich = &(&self.dag * x) * &self.op;
        let anti = &(&self.gram * x) + &(x * &self.gram);
        &sandwich - &anti.scaled_re(0.5)
    }
}

/// One controlled generator: Hamiltonian, noise operators, and the shared
/// measurement channel (which may be zero for measurement-free models).
#[derive(Clone, Debug)]
pub struct LindbladGenerator {
    label: String,
    hamiltonian: Operator,
    h_is_zero: bool,
    noise: Vec<CachedOp>,
    measurement: CachedOp,
    c_sum: Operator,
    dim: usize,
}

impl LindbladGenerator {
    pub fn new(
        label: impl Into<String>,
        hamiltonian: Operator,
        noise_ops: Vec<Operator>,
        measurement_op: Operator,
        tol: f64,
    ) -> Result<Self> {
        let dim = hamiltonian.dim();
        if !hamiltonian.is_hermitian(tol) {
            return Err(Error::NotHermitian {
                defect: hamiltonian.herm_defect(),
            });
        }
        for l in &noise_ops {
            if l.dim() != dim {
                return Err(Error::DimensionMismatch {
                    left: dim,
                    right: l.dim(),
                    context: "noise operator",
                });
            }
        }
        if measurement_op.dim() != dim {
            return Err(Error::DimensionMismatch {
                left: dim,
                right: measurement_op.dim(),
                context: "measurement operator",
            });
        }
        let h_is_zero = hamiltonian.frobenius_norm() == 0.0;
        let measurement = CachedOp::new(measurement_op);
        let c_sum = &measurement.op + &measurement.dag;
        Ok(Self {
            label: label.into(),
            hamiltonian,
            h_is_zero,
            noise: noise_ops.into_iter().map(CachedOp::new).collect(),
            measurement,
            c_sum,
            dim,
        })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn hamiltonian(&self) -> &Operator {
        &self.hamiltonian
    }

    pub fn noise_ops(&self) -> impl Iterator<Item = &Operator> {
        self.noise.iter().map(|n| &n.op)
    }

    pub fn measurement_op(&self) -> &Operator {
        &self.measurement.op
    }

    /// C + C^dag, the observable whose expectation drives the measurement
    /// record.
    pub fn measurement_sum(&self) -> &Operator {
        &self.c_sum
    }

    pub fn has_measurement(&self) -> bool {
        !self.measurement.is_zero
    }

    /// -iH - (1/2) C^dag C - (1/2) sum_v L_v^dag L_v, the deterministic part
    /// of the one-step Kraus matrix.
    pub(crate) fn kraus_drift(&self) -> Operator {
        let mut m = self.hamiltonian.scaled(C64::new(0.0, -1.0));
        m += &self.measurement.gram.scaled_re(-0.5);
        for n in &self.noise {
            m += &n.gram.scaled_re(-0.5);
        }
        m
    }

    pub(crate) fn noise_cached(&self) -> &[CachedOp] {
        &self.noise
    }

    /// Dimension-d identity plus kraus_drift * dt, the noise-independent part
    /// of the one-step Kraus matrix.
    pub(crate) fn kraus_matrix_base(&self, dt: f64) -> Operator {
        let mut m = Operator::identity(self.dim);
        m += &self.kraus_drift().scaled_re(dt);
        m
    }

    /// Generator action without the measurement dissipator; combinations add
    /// the shared D[C] exactly once on top of this.
    fn apply_sans_measurement(&self, x: &Operator) -> Operator {
        let mut out = if self.h_is_zero {
            Operator::zeros(self.dim)
        } else {
            commutator_drift(&self.hamiltonian, x)
        };
        for n in &self.noise {
            out += &n.dissipate(x);
        }
        out
    }

    fn apply_dual_sans_measurement(&self, x: &Operator) -> Operator {
        let mut out = if self.h_is_zero {
            Operator::zeros(self.dim)
        } else {
            -&commutator_drift(&self.hamiltonian, x)
        };
        for n in &self.noise {
            out += &n.dissipate_dual(x);
        }
        out
    }
}

/// A map rho -> L(rho) (Schrodinger picture) with its Heisenberg dual.
pub trait Liouvillian {
    fn dim(&self) -> usize;
    fn apply(&self, x: &Operator) -> Operator;
    fn apply_dual(&self, x: &Operator) -> Operator;
}

impl Liouvillian for LindbladGenerator {
    fn dim(&self) -> usize {
        self.dim
    }

    fn apply(&self, x: &Operator) -> Operator {
        let mut out = self.apply_sans_measurement(x);
        if !self.measurement.is_zero {
            out += &self.measurement.dissipate(x);
        }
        out
    }

    fn apply_dual(&self, x: &Operator) -> Operator {
        let mut out = self.apply_dual_sans_measurement(x);
        if !self.measurement.is_zero {
            out += &self.measurement.dissipate_dual(x);
        }
        out
    }
}

/// Convex combination sum_j alpha_j L_j of generators sharing one
/// measurement channel; D[C] enters once, not once per term.
#[derive(Clone, Debug)]
pub struct ConvexCombination<'a> {
    gens: &'a [LindbladGenerator],
    alpha: Vec<f64>,
}

/// Tolerance for "these generators share one measurement operator".
const SHARED_C_TOL: f64 = 1e-10;

pub fn convex_combine<'a>(
    gens: &'a [LindbladGenerator],
    alpha: &[f64],
) -> Result<ConvexCombination<'a>> {
    if gens.is_empty() {
        return Err(Error::InvalidWeights {
            reason: "no generators".into(),
        });
    }
    if gens.len() != alpha.len() {
        return Err(Error::InvalidWeights {
            reason: format!("{} weights for {} generators", alpha.len(), gens.len()),
        });
    }
    if alpha.iter().any(|a| *a < -1e-12 || !a.is_finite()) {
        return Err(Error::InvalidWeights {
            reason: "weights must be nonnegative".into(),
        });
    }
    let sum: f64 = alpha.iter().sum();
    if (sum - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidWeights {
            reason: format!("weights sum to {sum}, expected 1"),
        });
    }
    let dim = gens[0].dim();
    for (i, g) in gens.iter().enumerate() {
        if g.dim() != dim {
            return Err(Error::DimensionMismatch {
                left: dim,
                right: g.dim(),
                context: "combined generators",
            });
        }
        if (g.measurement_op() - gens[0].measurement_op()).frobenius_norm() > SHARED_C_TOL {
            return Err(Error::MixedMeasurements { index: i });
        }
    }
    let alpha = alpha.iter().map(|a| a.max(0.0) / sum).collect();
    Ok(ConvexCombination { gens, alpha })
}

impl ConvexCombination<'_> {
    pub fn alpha(&self) -> &[f64] {
        &self.alpha
    }

    pub fn generators(&self) -> &[LindbladGenerator] {
        self.gens
    }
}

impl Liouvillian for ConvexCombination<'_> {
    fn dim(&self) -> usize {
        self.gens[0].dim()
    }

    fn apply(&self, x: &Operator) -> Operator {
        let mut out = Operator::zeros(self.dim());
        for (g, a) in self.gens.iter().zip(&self.alpha) {
            if *a > 0.0 {
                out += &g.apply_sans_measurement(x).scaled_re(*a);
            }
        }
        let c = &self.gens[0].measurement;
        if !c.is_zero {
            out += &c.dissipate(x);
        }
        out
    }

    fn apply_dual(&self, x: &Operator) -> Operator {
        let mut out = Operator::zeros(self.dim());
        for (g, a) in self.gens.iter().zip(&self.alpha) {
            if *a > 0.0 {
                out += &g.apply_dual_sans_measurement(x).scaled_re(*a);
            }
        }
        let c = &self.gens[0].measurement;
        if !c.is_zero {
            out += &c.dissipate_dual(x);
        }
        out
    }
}

/// L(rho) for a state.
pub fn generator_apply(gen: &impl Liouvillian, rho: &DensityOperator) -> Operator {
    gen.apply(rho.op())
}

/// Forward-Euler propagation of the deterministic master equation. Returns
/// the state at every step including the initial one. A step that drives an
/// eigenvalue below -100 tol (or lets the trace drift by more than 100 tol)
/// is rejected as an instability of the chosen dt.
pub fn mme_propagate(
    gen: &impl Liouvillian,
    rho0: &DensityOperator,
    dt: f64,
    n_steps: usize,
    tol: f64,
) -> Result<Vec<DensityOperator>> {
    let slack = 100.0 * tol;
    let mut out = Vec::with_capacity(n_steps + 1);
    out.push(rho0.clone());
    let mut rho = rho0.op().clone();
    for step in 1..=n_steps {
        let next = (&rho + &gen.apply(&rho).scaled_re(dt)).herm_part();
        let min_eig = next.min_eigenvalue()?;
        if min_eig < -slack {
            return Err(Error::StepUnstable {
                step,
                min_eig,
                limit: slack,
            });
        }
        let tr = next.trace().re;
        if (tr - 1.0).abs() > slack {
            return Err(Error::StepUnstable {
                step,
                min_eig: tr - 1.0,
                limit: slack,
            });
        }
        out.push(DensityOperator::from_operator_unchecked(next.clone()));
        rho = next;
    }
    Ok(out)
}

/// One unvalidated Euler step, used where the caller owns the validation
/// policy (deterministic estimate propagation inside trajectory loops).
pub(crate) fn euler_step(gen: &impl Liouvillian, rho: &Operator, dt: f64) -> Operator {
    (rho + &gen.apply(rho).scaled_re(dt)).herm_part()
}

/// Matrix of the generator on vectorized operators: G vec(X) = vec(L(X)),
/// with vec the row-major flattening, so vec(X)[a d + b] = X[a, b].
pub fn vectorize_generator(gen: &impl Liouvillian) -> Array2<C64> {
    let d = gen.dim();
    let mut g = Array2::zeros((d * d, d * d));
    for a in 0..d {
        for b in 0..d {
            let col = a * d + b;
            let image = gen.apply(&Operator::basis_unit(d, a, b));
            for i in 0..d {
                for j in 0..d {
                    g[[i * d + j, col]] = image.array()[[i, j]];
                }
            }
        }
    }
    g
}

/// Spectrum attached to a stability check.
#[derive(Clone, Debug)]
pub struct GeneratorSpectrum {
    /// Eigenvalues of the generator matrix; of the complement block when
    /// `reduced` is set.
    pub eigenvalues: Vec<C64>,
    pub reduced: bool,
    /// Norm of the generator block that maps target-supported states out of
    /// the target; zero (up to tolerance) means the target is invariant.
    pub invariance_defect: f64,
}

/// Outcome of `check_gas`.
#[derive(Clone, Debug)]
pub struct GasReport {
    pub is_invariant: bool,
    pub is_gas: bool,
    pub spectrum: GeneratorSpectrum,
}

/// Matrix of the generator (or its dual) compressed to the complement block:
/// X_R -> W_R^dag L(W_R X_R W_R^dag) W_R on B(H_R), row-major vectorization.
pub(crate) fn reduced_matrix(
    gen: &impl Liouvillian,
    target: &TargetSubspace,
    dual: bool,
) -> Array2<C64> {
    let m = target.dim_r();
    let wr = target.basis_r();
    let mut g = Array2::zeros((m * m, m * m));
    for a in 0..m {
        for b in 0..m {
            let col = a * m + b;
            let unit = Operator::outer(wr.column(a), wr.column(b));
            let image = if dual {
                gen.apply_dual(&unit)
            } else {
                gen.apply(&unit)
            };
            let block = target.complement_block(&image);
            for i in 0..m {
                for j in 0..m {
                    g[[i * m + j, col]] = block[[i, j]];
                }
            }
        }
    }
    g
}

/// Frobenius norm of the generator components that leak target-supported
/// states out of the target block.
pub(crate) fn invariance_defect(gen: &impl Liouvillian, target: &TargetSubspace) -> f64 {
    let r = target.dim_s();
    let ws = target.basis_s();
    let mut leak_sq = 0.0;
    for a in 0..r {
        for b in 0..r {
            let unit = Operator::outer(ws.column(a), ws.column(b));
            let image = gen.apply(&unit);
            let total = image.frobenius_norm();
            let kept = image_target_norm(&image, target);
            leak_sq += (total * total - kept * kept).max(0.0);
        }
    }
    leak_sq.sqrt()
}

fn image_target_norm(image: &Operator, target: &TargetSubspace) -> f64 {
    let block = target.target_block(image);
    block.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Decides global asymptotic stability of the target for a single generator
/// or convex combination: the target must be invariant, and every eigenvalue
/// of the generator reduced to the complement block must have real part
/// below -tol.
pub fn check_gas(gen: &impl Liouvillian, target: &TargetSubspace, tol: f64) -> Result<GasReport> {
    if gen.dim() != target.dim() {
        return Err(Error::DimensionMismatch {
            left: gen.dim(),
            right: target.dim(),
            context: "check_gas",
        });
    }
    let defect = invariance_defect(gen, target);
    let is_invariant = defect <= tol;
    if target.dim_r() == 0 {
        return Ok(GasReport {
            is_invariant,
            is_gas: is_invariant,
            spectrum: GeneratorSpectrum {
                eigenvalues: Vec::new(),
                reduced: true,
                invariance_defect: defect,
            },
        });
    }
    let m = reduced_matrix(gen, target, false);
    let eigenvalues = linalg::eig_vals(&m)?.to_vec();
    let stable = eigenvalues.iter().all(|z| z.re < -tol);
    Ok(GasReport {
        is_invariant,
        is_gas: is_invariant && stable,
        spectrum: GeneratorSpectrum {
            eigenvalues,
            reduced: true,
            invariance_defect: defect,
        },
    })
}

/// Expectation of the measurement observable, tr((C + C^dag) rho).
pub fn measurement_expectation(gen: &LindbladGenerator, rho: &Operator) -> f64 {
    trace_product(gen.measurement_sum(), rho).re
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::{basis_ket, sigma_minus, DensityOperator, Operator};
    use approx::assert_abs_diff_eq;

    fn decay_generator(measurement: Option<Operator>) -> LindbladGenerator {
        LindbladGenerator::new(
            "decay",
            Operator::zeros(2),
            vec![sigma_minus()],
            measurement.unwrap_or_else(|| Operator::zeros(2)),
            1e-9,
        )
        .unwrap()
    }

    fn ground_target() -> TargetSubspace {
        TargetSubspace::from_projector(Operator::basis_unit(2, 0, 0), 1e-9).unwrap()
    }

    #[test]
    fn test_apply_matches_building_blocks() {
        let gen = LindbladGenerator::new(
            "full",
            crate::operator::sigma_z(),
            vec![sigma_minus()],
            Operator::basis_unit(2, 1, 1),
            1e-9,
        )
        .unwrap();
        let rho =
            DensityOperator::pure(ndarray::array![C64::new(1.0, 0.0), C64::new(1.0, 0.0)].view())
                .unwrap();
        let direct = gen.apply(rho.op());
        let expected = &(&crate::superop::commutator_drift(&crate::operator::sigma_z(), rho.op())
            + &crate::superop::dissipator(&sigma_minus(), rho.op()))
            + &crate::superop::dissipator(&Operator::basis_unit(2, 1, 1), rho.op());
        assert_abs_diff_eq!((&direct - &expected).frobenius_norm(), 0.0, epsilon = 1e-14);
    }

    #[test]
    fn test_dual_is_trace_adjoint() {
        // tr(A L(B)) = tr(L^dual(A) B) for arbitrary operators.
        let gen = LindbladGenerator::new(
            "full",
            crate::operator::sigma_x(),
            vec![sigma_minus()],
            Operator::basis_unit(2, 1, 1),
            1e-9,
        )
        .unwrap();
        let a = &crate::operator::sigma_y() + &Operator::identity(2).scaled_re(0.2);
        let b = &crate::operator::sigma_z() + &sigma_minus();
        let lhs = trace_product(&a, &gen.apply(&b));
        let rhs = trace_product(&gen.apply_dual(&a), &b);
        assert_abs_diff_eq!((lhs - rhs).norm(), 0.0, epsilon = 1e-13);
    }

    #[test]
    fn test_mme_decay_closed_form() {
        // With L = sigma-, populations decay as e^{-t} and coherences as
        // e^{-t/2}.
        let gen = decay_generator(None);
        let rho0 = DensityOperator::new(
            Operator::from_array(ndarray::array![
                [C64::new(0.3, 0.0), C64::new(0.2, 0.1)],
                [C64::new(0.2, -0.1), C64::new(0.7, 0.0)]
            ])
            .unwrap(),
            1e-9,
        )
        .unwrap();
        let dt = 1e-3;
        let steps = 1000;
        let states = mme_propagate(&gen, &rho0, dt, steps, 1e-9).unwrap();
        let final_state = states.last().unwrap();
        let t = dt * steps as f64;
        assert_abs_diff_eq!(
            final_state.op().array()[[1, 1]].re,
            0.7 * (-t).exp(),
            epsilon = 1e-3
        );
        assert_abs_diff_eq!(
            final_state.op().array()[[0, 1]].re,
            0.2 * (-t / 2.0).exp(),
            epsilon = 1e-3
        );
        assert_abs_diff_eq!(final_state.op().trace().re, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn test_mme_rejects_coarse_dt() {
        // dt = 3 overshoots: 1 - dt < -100 tol immediately.
        let gen = decay_generator(None);
        let rho0 = DensityOperator::pure(basis_ket(2, 1).view()).unwrap();
        assert!(matches!(
            mme_propagate(&gen, &rho0, 3.0, 5, 1e-9),
            Err(Error::StepUnstable { .. })
        ));
    }

    #[test]
    fn test_vectorized_decay_spectrum() {
        // Vectorized sigma- generator has eigenvalues {0, -1/2, -1/2, -1}.
        let gen = decay_generator(None);
        let g = vectorize_generator(&gen);
        let mut re: Vec<f64> = linalg::eig_vals(&g).unwrap().iter().map(|z| z.re).collect();
        re.sort_by(f64::total_cmp);
        let expect = [-1.0, -0.5, -0.5, 0.0];
        for (got, want) in re.iter().zip(expect.iter()) {
            assert_abs_diff_eq!(got, want, epsilon = 1e-12);
        }
    }

    #[test]
    fn test_vectorize_against_apply() {
        let gen = LindbladGenerator::new(
            "full",
            crate::operator::sigma_x(),
            vec![sigma_minus()],
            Operator::basis_unit(2, 1, 1),
            1e-9,
        )
        .unwrap();
        let g = vectorize_generator(&gen);
        let rho = DensityOperator::maximally_mixed(2);
        let image = gen.apply(rho.op());
        let flat: Vec<C64> = rho.op().array().iter().copied().collect();
        let applied = g.dot(&Array1::from(flat));
        for a in 0..2 {
            for b in 0..2 {
                let got = applied[a * 2 + b];
                let want = image.array()[[a, b]];
                assert_abs_diff_eq!((got - want).norm(), 0.0, epsilon = 1e-13);
            }
        }
    }

    #[test]
    fn test_check_gas_decay() {
        // sigma- relaxation to |0>: invariant, reduced block is the scalar
        // -1, hence GAS.
        let gen = decay_generator(None);
        let report = check_gas(&gen, &ground_target(), 1e-8).unwrap();
        assert!(report.is_invariant);
        assert!(report.is_gas);
        assert_eq!(report.spectrum.eigenvalues.len(), 1);
        assert_abs_diff_eq!(report.spectrum.eigenvalues[0].re, -1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(report.spectrum.eigenvalues[0].im, 0.0, epsilon = 1e-12);
        assert!(report.spectrum.reduced);
    }

    #[test]
    fn test_check_gas_detects_leak() {
        // A Hamiltonian sigma_x drives |0> out of the target.
        let gen = LindbladGenerator::new(
            "leaky",
            crate::operator::sigma_x(),
            vec![],
            Operator::zeros(2),
            1e-9,
        )
        .unwrap();
        let report = check_gas(&gen, &ground_target(), 1e-8).unwrap();
        assert!(!report.is_invariant);
        assert!(!report.is_gas);
        // Leak of -i[sigma_x, |0><0|] has Frobenius norm sqrt(2).
        assert_abs_diff_eq!(
            report.spectrum.invariance_defect,
            2f64.sqrt(),
            epsilon = 1e-12
        );
    }

    #[test]
    fn test_check_gas_whole_space_vacuous() {
        let gen = decay_generator(None);
        let whole = TargetSubspace::from_projector(Operator::identity(2), 1e-9).unwrap();
        let report = check_gas(&gen, &whole, 1e-8).unwrap();
        assert!(report.is_invariant);
        assert!(report.is_gas);
        assert!(report.spectrum.eigenvalues.is_empty());
    }

    #[test]
    fn test_convex_combination_interpolates() {
        // Mixing decay with a pure dephasing generator: the combination's
        // action is the weighted sum, with the shared (zero) C counted once.
        let dephase = LindbladGenerator::new(
            "dephase",
            Operator::zeros(2),
            vec![crate::operator::sigma_z()],
            Operator::zeros(2),
            1e-9,
        )
        .unwrap();
        let gens = vec![decay_generator(None), dephase];
        let comb = convex_combine(&gens, &[0.25, 0.75]).unwrap();
        let rho =
            DensityOperator::pure(ndarray::array![C64::new(1.0, 0.0), C64::new(1.0, 0.0)].view())
                .unwrap();
        let direct = comb.apply(rho.op());
        let expected =
            &gens[0].apply(rho.op()).scaled_re(0.25) + &gens[1].apply(rho.op()).scaled_re(0.75);
        assert_abs_diff_eq!((&direct - &expected).frobenius_norm(), 0.0, epsilon = 1e-14);
    }

    #[test]
    fn test_convex_combination_counts_measurement_once() {
        let c = Operator::basis_unit(2, 1, 1);
        let g1 = decay_generator(Some(c.clone()));
        let g2 = decay_generator(Some(c.clone()));
        let gens = vec![g1, g2];
        let comb = convex_combine(&gens, &[0.5, 0.5]).unwrap();
        // Both halves are the same generator; the combination must equal one
        // copy of it, not double-count D[C].
        let rho = DensityOperator::maximally_mixed(2);
        let direct = comb.apply(rho.op());
        let single = gens[0].apply(rho.op());
        assert_abs_diff_eq!((&direct - &single).frobenius_norm(), 0.0, epsilon = 1e-14);
    }

    #[test]
    fn test_convex_combination_rejects_bad_weights() {
        let gens = vec![decay_generator(None), decay_generator(None)];
        assert!(convex_combine(&gens, &[0.5, 0.4]).is_err());
        assert!(convex_combine(&gens, &[1.5, -0.5]).is_err());
        assert!(convex_combine(&gens, &[1.0]).is_err());
        assert!(convex_combine(&[], &[]).is_err());
    }

    #[test]
    fn test_convex_combination_rejects_mixed_measurements() {
        let g1 = decay_generator(Some(Operator::basis_unit(2, 1, 1)));
        let g2 = decay_generator(Some(Operator::basis_unit(2, 0, 0)));
        let gens = vec![g1, g2];
        assert!(matches!(
            convex_combine(&gens, &[0.5, 0.5]),
            Err(Error::MixedMeasurements { index: 1 })
        ));
    }
}
