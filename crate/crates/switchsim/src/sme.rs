//! Stochastic master equation trajectories under homodyne detection, the
//! filter that re-estimates the state from the measurement record, and the
//! paired true/estimated simulation driven by a switching law.
//!
//! One step of the diffusive unraveling is
//! drho = L_j(rho) dt + G_C(rho) dW,   dY = tr((C + C^dag) rho) dt + dW,
//! with G_C(rho) = C rho + rho C^dag - tr((C + C^dag) rho) rho. The filter
//! runs the same equation from its own state, driven by the innovation
//! dW~ = dY - tr((C + C^dag) rho_est) dt instead of the true noise.

use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::generator::{euler_step, measurement_expectation, LindbladGenerator, Liouvillian};
use crate::lyapunov::LyapunovCertificate;
use crate::operator::{herm_trace_norm, trace_product, DensityOperator, Operator};
use crate::superop::backaction;
use crate::switching::{Scheduler, SwitchingLaw};
use crate::C64;

/// Explicit steps whose smallest eigenvalue falls below this are treated as
/// blown up rather than a tolerable discretization transient.
const EULER_EIG_FLOOR: f64 = 0.05;
/// Renormalization trace below this signals a degenerate Kraus step.
const ZERO_TRACE_FLOOR: f64 = 1e-12;

/// Integration scheme for one trajectory step.
///
/// KrausPositive rewrites the step as a completely positive map
/// M rho M^dag + sum_v L_v rho L_v^dag dt with
/// M = I + (-iH - C^dag C / 2 - sum_v L_v^dag L_v / 2) dt + C dy,
/// renormalized by its trace, so positivity survives any step size.
/// EulerMaruyama is the explicit first-order step, kept for
/// cross-validation; it can transiently leave the positive cone.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Scheme {
    EulerMaruyama,
    #[default]
    KrausPositive,
}

#[derive(Clone, Copy, Debug)]
pub struct SmeStepConfig {
    pub dt: f64,
    pub scheme: Scheme,
    /// Guard for hermiticity/trace repair in explicit steps.
    pub tol: f64,
}

impl SmeStepConfig {
    pub fn new(dt: f64) -> Result<Self> {
        let cfg = Self {
            dt,
            scheme: Scheme::default(),
            tol: 1e-6,
        };
        cfg.check()?;
        Ok(cfg)
    }

    pub fn with_scheme(mut self, scheme: Scheme) -> Self {
        self.scheme = scheme;
        self
    }

    fn check(&self) -> Result<()> {
        if !self.dt.is_finite() || self.dt <= 0.0 {
            return Err(Error::Invalid {
                context: "step config",
                reason: format!("dt must be positive and finite, got {}", self.dt),
            });
        }
        if !self.tol.is_finite() || self.tol <= 0.0 {
            return Err(Error::Invalid {
                context: "step config",
                reason: format!("tol must be positive and finite, got {}", self.tol),
            });
        }
        Ok(())
    }
}

/// Result of one true-state step: the advanced state and the measurement
/// increment dy it produced.
#[derive(Clone, Debug)]
pub struct SmeStep {
    pub rho_next: DensityOperator,
    pub dy: f64,
}

/// Forces the diagonal sum to exactly 1.0. The matrix is already Hermitian
/// with zero diagonal imaginary parts, so only the last real diagonal entry
/// is nudged; one or two passes close the rounding gap.
fn pin_trace(a: &mut Array2<C64>) {
    let d = a.nrows();
    if d == 0 {
        return;
    }
    for _ in 0..4 {
        let tr: C64 = a.diag().sum();
        if tr.re == 1.0 {
            return;
        }
        a[[d - 1, d - 1]].re += 1.0 - tr.re;
    }
}

/// Positivity-preserving advance by one step with measurement increment dy.
/// Used for the true state (dy built from its own expectation plus noise)
/// and verbatim for the filter (dy from the record), so equal inputs give
/// bit-identical outputs.
fn kraus_advance(gen: &LindbladGenerator, rho: &Operator, dy: f64, dt: f64) -> Result<Operator> {
    let mut m = gen.kraus_matrix_base(dt);
    if gen.has_measurement() {
        m += &gen.measurement_op().scaled_re(dy);
    }
    let mut out = &(&m * rho) * &m.adjoint();
    for l in gen.noise_cached() {
        if !l.is_zero() {
            out += &l.sandwich(rho).scaled_re(dt);
        }
    }
    let tr = out.trace().re;
    if !tr.is_finite() || tr <= ZERO_TRACE_FLOOR {
        return Err(Error::Invalid {
            context: "positivity-preserving step",
            reason: format!("renormalization trace {tr:.3e}; dt too large for this generator"),
        });
    }
    let mut arr = out.scaled_re(1.0 / tr).herm_part().into_array();
    pin_trace(&mut arr);
    Operator::from_array(arr)
}

/// Explicit first-order advance driven by the noise-like scalar (dW for the
/// true state, the innovation for the filter). Hermitized, then guarded
/// against trace drift and spectral blowup; small negative eigenvalues are
/// tolerated as discretization transients.
fn euler_advance(
    gen: &LindbladGenerator,
    rho: &Operator,
    noise: f64,
    dt: f64,
    tol: f64,
) -> Result<Operator> {
    let mut out = rho + &gen.apply(rho).scaled_re(dt);
    if gen.has_measurement() {
        out += &backaction(gen.measurement_op(), rho).scaled_re(noise);
    }
    let out = out.herm_part();
    let tr = out.trace().re;
    if !tr.is_finite() {
        return Err(Error::NonFinite);
    }
    if (tr - 1.0).abs() > 100.0 * tol {
        return Err(Error::InvalidDensity {
            reason: format!("trace drifted to {tr:.12} after explicit step"),
        });
    }
    let min_eig = out.min_eigenvalue()?;
    if min_eig < -EULER_EIG_FLOOR {
        return Err(Error::StepUnstable {
            step: 0,
            min_eig,
            limit: EULER_EIG_FLOOR,
        });
    }
    Ok(out)
}

/// Advances the true state by one step under generator `gen` with Wiener
/// increment `dw` (a N(0, dt) draw supplied by the caller) and returns the
/// state together with the homodyne increment
/// dy = tr((C + C^dag) rho) dt + dw.
pub fn sme_step(
    gen: &LindbladGenerator,
    rho: &DensityOperator,
    dw: f64,
    cfg: &SmeStepConfig,
) -> Result<SmeStep> {
    cfg.check()?;
    if !dw.is_finite() {
        return Err(Error::Invalid {
            context: "trajectory step",
            reason: format!("non-finite Wiener increment {dw}"),
        });
    }
    let dy = measurement_expectation(gen, rho.op()) * cfg.dt + dw;
    let next = match cfg.scheme {
        Scheme::KrausPositive => kraus_advance(gen, rho.op(), dy, cfg.dt)?,
        Scheme::EulerMaruyama => euler_advance(gen, rho.op(), dw, cfg.dt, cfg.tol)?,
    };
    Ok(SmeStep {
        rho_next: DensityOperator::from_operator_unchecked(next),
        dy,
    })
}

/// Advances the filter state from the recorded increment `dy` produced by a
/// matching true-state step (same generator, same dt). The positivity
/// scheme consumes dy directly; the explicit scheme converts it to the
/// innovation dy - tr((C + C^dag) rho_est) dt.
pub fn filter_step(
    gen: &LindbladGenerator,
    rho_est: &DensityOperator,
    dy: f64,
    cfg: &SmeStepConfig,
) -> Result<DensityOperator> {
    cfg.check()?;
    if !dy.is_finite() {
        return Err(Error::Invalid {
            context: "filter step",
            reason: format!("non-finite measurement increment {dy}"),
        });
    }
    let next = match cfg.scheme {
        Scheme::KrausPositive => kraus_advance(gen, rho_est.op(), dy, cfg.dt)?,
        Scheme::EulerMaruyama => {
            let innovation = dy - measurement_expectation(gen, rho_est.op()) * cfg.dt;
            euler_advance(gen, rho_est.op(), innovation, cfg.dt, cfg.tol)?
        }
    };
    Ok(DensityOperator::from_operator_unchecked(next))
}

/// Full record of one paired true/estimate trajectory. All per-time lists
/// have n_steps + 1 entries; dy[0] = 0 pads the increment list to the same
/// length, and the final selected index repeats the last governing one.
/// rho_true/rho_est are populated only when state recording was requested;
/// the endpoint states are always kept.
#[derive(Clone, Debug)]
pub struct TrajectoryRecord {
    pub law: String,
    pub seed: u64,
    pub stream: u64,
    pub times: Vec<f64>,
    pub selected_j: Vec<usize>,
    pub dy: Vec<f64>,
    pub v_true: Vec<f64>,
    pub v_est: Vec<f64>,
    /// Trace-norm distance (1/2)||rho - rho_target||_1 to the pure target
    /// when the target is one-dimensional; complement population otherwise.
    pub dist_true: Vec<f64>,
    /// tr(P_R rho): population outside the target subspace.
    pub residual_true: Vec<f64>,
    /// Frobenius distance ||rho - rho_est||_F between true and estimate.
    pub est_gap: Vec<f64>,
    /// tr((C + C^dag)(rho - rho_est)) under the governing generator.
    pub meas_gap: Vec<f64>,
    pub rho_true: Vec<DensityOperator>,
    pub rho_est: Vec<DensityOperator>,
    pub final_true: DensityOperator,
    pub final_est: DensityOperator,
    /// Number of index changes along the run.
    pub switches: usize,
}

fn stamp_step(e: Error, step: usize) -> Error {
    match e {
        Error::StepUnstable { min_eig, limit, .. } => Error::StepUnstable {
            step,
            min_eig,
            limit,
        },
        Error::InvalidDensity { reason } => Error::InvalidDensity {
            reason: format!("step {step}: {reason}"),
        },
        Error::Invalid { context, reason } => Error::Invalid {
            context,
            reason: format!("step {step}: {reason}"),
        },
        other => other,
    }
}

/// Simulates the physical state and its running estimate side by side for
/// n_steps steps. The switching law reads the estimate it is entitled to:
/// the filtered state for measurement-based laws, the deterministically
/// propagated average dynamics (from rho0_est, open loop) for state-based
/// laws, and only the clock for cyclic laws. Both states always evolve
/// under the generator the law selected. `record_cert` supplies the
/// Lyapunov function and target used for the recorded scalars.
///
/// Noise comes from a counter-based stream keyed by (master_seed, stream),
/// so trajectories are reproducible and independent across streams.
#[allow(clippy::too_many_arguments)]
pub fn simulate_pair(
    gens: &[LindbladGenerator],
    law: &SwitchingLaw,
    record_cert: &LyapunovCertificate,
    rho0_true: &DensityOperator,
    rho0_est: &DensityOperator,
    n_steps: usize,
    cfg: &SmeStepConfig,
    master_seed: u64,
    stream: u64,
    record_states: bool,
) -> Result<TrajectoryRecord> {
    cfg.check()?;
    if gens.is_empty() {
        return Err(Error::InvalidWeights {
            reason: "no generators to simulate".into(),
        });
    }
    let dim = gens[0].dim();
    for g in gens {
        if g.dim() != dim {
            return Err(Error::DimensionMismatch {
                left: dim,
                right: g.dim(),
                context: "generator family",
            });
        }
    }
    if rho0_true.dim() != dim || rho0_est.dim() != dim || record_cert.k().dim() != dim {
        return Err(Error::DimensionMismatch {
            left: dim,
            right: rho0_true.dim(),
            context: "initial states and certificate vs generators",
        });
    }

    let target = record_cert.target();
    let pure_target = if target.dim_s() == 1 {
        Some(Operator::outer(
            target.basis_s().column(0),
            target.basis_s().column(0),
        ))
    } else {
        None
    };

    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(stream);
    let sqrt_dt = cfg.dt.sqrt();
    let mut scheduler = Scheduler::new(law, gens, cfg.dt)?;
    let uses_filter = law.uses_filter();

    let mut rho = rho0_true.op().clone();
    let mut rho_e = rho0_est.op().clone();

    let n_rows = n_steps + 1;
    let mut rec = TrajectoryRecord {
        law: law.label().to_string(),
        seed: master_seed,
        stream,
        times: Vec::with_capacity(n_rows),
        selected_j: Vec::with_capacity(n_rows),
        dy: Vec::with_capacity(n_rows),
        v_true: Vec::with_capacity(n_rows),
        v_est: Vec::with_capacity(n_rows),
        dist_true: Vec::with_capacity(n_rows),
        residual_true: Vec::with_capacity(n_rows),
        est_gap: Vec::with_capacity(n_rows),
        meas_gap: Vec::with_capacity(n_rows),
        rho_true: Vec::new(),
        rho_est: Vec::new(),
        final_true: rho0_true.clone(),
        final_est: rho0_est.clone(),
        switches: 0,
    };
    rec.dy.push(0.0);

    let push_row = |rec: &mut TrajectoryRecord,
                    step: usize,
                    j: usize,
                    rho: &Operator,
                    rho_e: &Operator|
     -> Result<()> {
        rec.times.push(step as f64 * cfg.dt);
        rec.selected_j.push(j);
        rec.v_true.push(trace_product(record_cert.k(), rho).re);
        rec.v_est.push(trace_product(record_cert.k(), rho_e).re);
        let dist = match &pure_target {
            Some(t) => 0.5 * herm_trace_norm(&(rho - t))?,
            None => trace_product(target.complement_projector(), rho).re,
        };
        rec.dist_true.push(dist);
        rec.residual_true
            .push(trace_product(target.complement_projector(), rho).re);
        rec.est_gap.push((rho - rho_e).frobenius_norm());
        rec.meas_gap.push(
            measurement_expectation(&gens[j], rho) - measurement_expectation(&gens[j], rho_e),
        );
        if record_states {
            rec.rho_true
                .push(DensityOperator::from_operator_unchecked(rho.clone()));
            rec.rho_est
                .push(DensityOperator::from_operator_unchecked(rho_e.clone()));
        }
        Ok(())
    };

    let mut last_j: Option<usize> = None;
    for step in 0..n_steps {
        // The decision is fixed before the noise for this interval is drawn.
        let decision = scheduler.decide(step, &rho_e)?;
        let j = decision.index;
        if let Some(prev) = last_j {
            if prev != j {
                rec.switches += 1;
            }
        }
        last_j = Some(j);
        push_row(&mut rec, step, j, &rho, &rho_e)?;

        let z: f64 = rng.sample(StandardNormal);
        let dw = sqrt_dt * z;
        let gen = &gens[j];
        let dy = measurement_expectation(gen, &rho) * cfg.dt + dw;
        rho = match cfg.scheme {
            Scheme::KrausPositive => kraus_advance(gen, &rho, dy, cfg.dt),
            Scheme::EulerMaruyama => euler_advance(gen, &rho, dw, cfg.dt, cfg.tol),
        }
        .map_err(|e| stamp_step(e, step))?;
        rho_e = if uses_filter {
            match cfg.scheme {
                Scheme::KrausPositive => kraus_advance(gen, &rho_e, dy, cfg.dt),
                Scheme::EulerMaruyama => {
                    let innovation = dy - measurement_expectation(gen, &rho_e) * cfg.dt;
                    euler_advance(gen, &rho_e, innovation, cfg.dt, cfg.tol)
                }
            }
            .map_err(|e| stamp_step(e, step))?
        } else {
            euler_step(gen, &rho_e, cfg.dt)
        };
        rec.dy.push(dy);
    }

    let j_last = match last_j {
        Some(j) => j,
        None => scheduler.decide(0, &rho_e)?.index,
    };
    push_row(&mut rec, n_steps, j_last, &rho, &rho_e)?;
    rec.final_true = DensityOperator::from_operator_unchecked(rho);
    rec.final_est = DensityOperator::from_operator_unchecked(rho_e);
    Ok(rec)
}
