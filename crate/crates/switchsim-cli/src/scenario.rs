//! Turns a validated configuration into a runnable experiment: the
//! generator family and certificate for the chosen system, the switching
//! laws to compare, and the true/estimated initial states for the chosen
//! mismatch scenario.

use switchsim::{
    graph_model, product_state, three_level_model, DensityOperator, Graph, LindbladGenerator,
    LyapunovCertificate, MeasurementChoice, Operator, Scheme, SmeStepConfig, SwitchingLaw,
};

use crate::config::{
    canonical_toml, ConfigFile, LawKind, MeasurementKind, ScenarioKind, SchemeKind, SystemKind,
};
use crate::error::{CliError, Result};

/// Everything run_ensemble needs, resolved and validated.
pub struct Experiment {
    pub gens: Vec<LindbladGenerator>,
    pub cert: LyapunovCertificate,
    pub rho0_true: DensityOperator,
    pub rho0_est: DensityOperator,
    pub laws: Vec<(String, SwitchingLaw)>,
    pub step_cfg: SmeStepConfig,
    pub n_steps: usize,
    pub n_realizations: usize,
    pub master_seed: u64,
    pub output_path: String,
    pub config_text: String,
    pub invariant_tol: f64,
}

fn half_mix(a: &DensityOperator, b: &Operator) -> Result<DensityOperator> {
    let op = &a.op().scaled_re(0.5) + &b.scaled_re(0.5);
    DensityOperator::new(op, 1e-9).map_err(CliError::Sim)
}

/// Population of `rho0` outside the support of `est`. Zero (within
/// rounding) exactly when supp(rho0) is contained in supp(est), which the
/// filter needs to be able to recover the truth.
fn support_leak(rho0: &DensityOperator, est: &DensityOperator) -> Result<f64> {
    let (vals, vecs) = switchsim::linalg::eigh(est.op().array())?;
    let d = est.dim();
    let mut inside = 0.0;
    for (idx, v) in vals.iter().enumerate() {
        if *v > 1e-10 {
            let col = vecs.column(idx);
            let mut quad = switchsim::C64::new(0.0, 0.0);
            for a in 0..d {
                for b in 0..d {
                    quad += col[a].conj() * rho0.op().array()[[a, b]] * col[b];
                }
            }
            inside += quad.re;
        }
    }
    Ok((1.0 - inside).max(0.0))
}

/// Resolves the estimate initial state for a graph system.
fn graph_estimate(
    scenario: ScenarioKind,
    custom: Option<&str>,
    g: &Graph,
    true_pattern: &str,
    rho0: &DensityOperator,
) -> Result<DensityOperator> {
    match scenario {
        ScenarioKind::Exact => Ok(rho0.clone()),
        ScenarioKind::UniformMix => {
            let mixed = Operator::identity(g.dim()).scaled_re(1.0 / g.dim() as f64);
            half_mix(rho0, &mixed)
        }
        ScenarioKind::OrthogonalMix => {
            let flipped: String = true_pattern
                .chars()
                .map(|c| if c == '+' { '-' } else { '+' })
                .collect();
            let other = product_state(&flipped, g, true).map_err(CliError::Sim)?;
            half_mix(rho0, other.op())
        }
        ScenarioKind::Custom => {
            let pattern = custom.expect("validated custom pattern");
            let other = product_state(pattern, g, true).map_err(CliError::Sim)?;
            half_mix(rho0, other.op())
        }
    }
}

fn build_laws(
    cfg: &ConfigFile,
    gens: &[LindbladGenerator],
    cert: &LyapunovCertificate,
) -> Result<Vec<(String, SwitchingLaw)>> {
    let m = gens.len();
    let dwell = cfg.run.dwell_steps;
    let mut laws = Vec::with_capacity(cfg.run.laws.len());
    for kind in &cfg.run.laws {
        let law = match kind {
            LawKind::Cyclic => {
                let alpha = match &cfg.cyclic.alpha {
                    Some(a) => {
                        if a.len() != m {
                            return Err(CliError::Field {
                                field: "cyclic.alpha",
                                reason: format!("{} fractions for {m} generators", a.len()),
                            });
                        }
                        a.clone()
                    }
                    None => vec![1.0 / m as f64; m],
                };
                // Default period gives each generator one dwell interval
                // per cycle under uniform fractions.
                let period = cfg
                    .cyclic
                    .period
                    .unwrap_or(m as f64 * dwell as f64 * cfg.run.dt);
                SwitchingLaw::cyclic(alpha, period).map_err(CliError::Sim)?
            }
            LawKind::State => {
                SwitchingLaw::state_based(cert.clone(), dwell).map_err(CliError::Sim)?
            }
            LawKind::Measurement => {
                SwitchingLaw::measurement_based(cert.clone(), dwell).map_err(CliError::Sim)?
            }
        };
        laws.push((kind.label().to_string(), law));
    }
    Ok(laws)
}

pub fn build_experiment(cfg: &ConfigFile) -> Result<Experiment> {
    let (gens, cert, rho0_true, rho0_est) = match cfg.system.kind {
        SystemKind::Graph => {
            let n = cfg.system.n_qubits.expect("validated");
            let edges = cfg.system.edges.clone().unwrap_or_default();
            let g = Graph::new(n, &edges).map_err(CliError::Sim)?;
            let choice = match cfg.system.measurement {
                MeasurementKind::Certificate => MeasurementChoice::Certificate,
                MeasurementKind::GraphHamiltonian => MeasurementChoice::GraphHamiltonian,
                MeasurementKind::None => MeasurementChoice::Unmonitored,
            };
            let model = graph_model(&g, choice).map_err(CliError::Sim)?;
            let pattern = cfg.system.true_pattern.as_deref().expect("validated");
            let rho0 = product_state(pattern, &g, true).map_err(CliError::Sim)?;
            let est = graph_estimate(
                cfg.run.scenario,
                cfg.run.custom_pattern.as_deref(),
                &g,
                pattern,
                &rho0,
            )?;
            (model.generators, model.cert, rho0, est)
        }
        SystemKind::ThreeLevel => {
            let measured = cfg.system.measurement == MeasurementKind::Certificate;
            let model = three_level_model(measured).map_err(CliError::Sim)?;
            let cert = LyapunovCertificate::new(
                model.k_op.clone(),
                model.target.clone(),
                cfg.tolerances.invariant,
            )
            .map_err(CliError::Sim)?;
            let rho0 = DensityOperator::maximally_mixed(3);
            (model.generators, cert, rho0.clone(), rho0)
        }
    };

    let leak = support_leak(&rho0_true, &rho0_est)?;
    if leak > 1e-9 {
        return Err(CliError::Field {
            field: "run.scenario",
            reason: format!("estimate support does not contain the true state (leak {leak:.3e})"),
        });
    }

    let laws = build_laws(cfg, &gens, &cert)?;
    let scheme = match cfg.run.scheme {
        SchemeKind::Kraus => Scheme::KrausPositive,
        SchemeKind::Euler => Scheme::EulerMaruyama,
    };
    let mut step_cfg = SmeStepConfig::new(cfg.run.dt).map_err(CliError::Sim)?;
    step_cfg = step_cfg.with_scheme(scheme);
    step_cfg.tol = cfg.tolerances.step;

    Ok(Experiment {
        gens,
        cert,
        rho0_true,
        rho0_est,
        laws,
        step_cfg,
        n_steps: cfg.run.n_steps,
        n_realizations: cfg.run.n_realizations,
        master_seed: cfg.run.master_seed,
        output_path: cfg.run.output_path.clone(),
        config_text: canonical_toml(cfg),
        invariant_tol: cfg.tolerances.invariant,
    })
}
