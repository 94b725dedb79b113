//! Switching control laws: open-loop cyclic, deterministic state-based, and
//! measurement-based, plus the dwell-time scheduler that holds each decision
//! for a fixed number of integration steps so the switching sequence cannot
//! chatter.

use crate::error::{Error, Result};
use crate::generator::LindbladGenerator;
use crate::lyapunov::{v_drift, DriftTable, LyapunovCertificate};
use crate::operator::{DensityOperator, Operator};

/// Ties in the argmin are broken toward the lowest index when drifts agree
/// within this margin.
pub const TIE_TOL: f64 = 1e-12;

/// A switching control law.
///
/// Cyclic holds index j for the fraction alpha_j of each period, in
/// ascending index order. StateBased re-selects the argmin of the
/// certificate drift at a deterministically propagated estimate every
/// dwell_steps steps. MeasurementBased does the same at the filtered
/// estimate driven by the measurement record.
#[derive(Clone, Debug)]
pub enum SwitchingLaw {
    Cyclic {
        alpha: Vec<f64>,
        period: f64,
    },
    StateBased {
        cert: LyapunovCertificate,
        dwell_steps: usize,
    },
    MeasurementBased {
        cert: LyapunovCertificate,
        dwell_steps: usize,
    },
}

impl SwitchingLaw {
    pub fn cyclic(alpha: Vec<f64>, period: f64) -> Result<Self> {
        if alpha.is_empty() || alpha.iter().any(|a| !a.is_finite() || *a < 0.0) {
            return Err(Error::InvalidWeights {
                reason: "cycle fractions must be nonnegative".into(),
            });
        }
        let sum: f64 = alpha.iter().sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidWeights {
                reason: format!("cycle fractions sum to {sum}, expected 1"),
            });
        }
        if !period.is_finite() || period <= 0.0 {
            return Err(Error::Invalid {
                context: "cyclic law",
                reason: format!("period must be positive, got {period}"),
            });
        }
        Ok(Self::Cyclic { alpha, period })
    }

    pub fn state_based(cert: LyapunovCertificate, dwell_steps: usize) -> Result<Self> {
        if dwell_steps == 0 {
            return Err(Error::Invalid {
                context: "state-based law",
                reason: "dwell_steps must be at least 1".into(),
            });
        }
        Ok(Self::StateBased { cert, dwell_steps })
    }

    pub fn measurement_based(cert: LyapunovCertificate, dwell_steps: usize) -> Result<Self> {
        if dwell_steps == 0 {
            return Err(Error::Invalid {
                context: "measurement-based law",
                reason: "dwell_steps must be at least 1".into(),
            });
        }
        Ok(Self::MeasurementBased { cert, dwell_steps })
    }

    pub fn label(&self) -> &'static str {
        match self {
            Self::Cyclic { .. } => "cyclic",
            Self::StateBased { .. } => "state",
            Self::MeasurementBased { .. } => "measurement",
        }
    }

    pub fn certificate(&self) -> Option<&LyapunovCertificate> {
        match self {
            Self::Cyclic { .. } => None,
            Self::StateBased { cert, .. } | Self::MeasurementBased { cert, .. } => Some(cert),
        }
    }

    /// Steps between re-decisions. Cyclic laws re-read the clock every step.
    pub fn dwell_steps(&self) -> usize {
        match self {
            Self::Cyclic { .. } => 1,
            Self::StateBased { dwell_steps, .. } | Self::MeasurementBased { dwell_steps, .. } => {
                *dwell_steps
            }
        }
    }

    /// Whether decisions are driven by the filtered (measurement-record)
    /// estimate rather than a deterministic propagation.
    pub fn uses_filter(&self) -> bool {
        matches!(self, Self::MeasurementBased { .. })
    }
}

/// One held switching decision: generator `index` governs steps
/// [step, valid_until_step).
#[derive(Clone, Debug, PartialEq)]
pub struct SwitchDecision {
    pub index: usize,
    pub step: usize,
    pub valid_until_step: usize,
    /// Certificate drifts per generator at decision time; empty for clock
    /// decisions.
    pub v_drifts: Vec<f64>,
}

/// Index owning time t under the cyclic partition: [0, period) splits into
/// consecutive right-open sub-intervals of lengths alpha_j * period, and a
/// partition point belongs to the interval it starts.
pub fn cyclic_index(t: f64, alpha: &[f64], period: f64) -> usize {
    let x = t.rem_euclid(period);
    let mut prefix = 0.0;
    for (j, a) in alpha.iter().enumerate() {
        prefix += a * period;
        if x < prefix {
            return j;
        }
    }
    // Accumulated rounding can leave x marginally past the last boundary.
    alpha.len() - 1
}

/// Lowest index attaining the minimum within TIE_TOL.
pub(crate) fn argmin_with_ties(drifts: &[f64]) -> usize {
    let min = drifts.iter().copied().fold(f64::INFINITY, f64::min);
    drifts
        .iter()
        .position(|d| *d <= min + TIE_TOL)
        .expect("nonempty drift list")
}

/// Evaluates the certificate drift for every generator at the given state
/// and returns the argmin decision. The validity window is left at [0, 0);
/// the scheduler stamps it.
pub fn select_argmin(
    cert: &LyapunovCertificate,
    gens: &[LindbladGenerator],
    rho: &DensityOperator,
) -> Result<SwitchDecision> {
    if gens.is_empty() {
        return Err(Error::InvalidWeights {
            reason: "no generators to select among".into(),
        });
    }
    let v_drifts = gens
        .iter()
        .map(|g| v_drift(cert, g, rho))
        .collect::<Result<Vec<f64>>>()?;
    Ok(SwitchDecision {
        index: argmin_with_ties(&v_drifts),
        step: 0,
        valid_until_step: 0,
        v_drifts,
    })
}

/// Reference scheduling step: at a step where the held decision has expired
/// (or none exists), recompute per the law; otherwise return the held
/// decision unchanged. `t` is the physical time of `step`;
/// `rho_for_decision` is the estimate the law is entitled to see (ignored by
/// cyclic laws).
pub fn schedule(
    law: &SwitchingLaw,
    step: usize,
    t: f64,
    rho_for_decision: &DensityOperator,
    gens: &[LindbladGenerator],
    held: Option<&SwitchDecision>,
) -> Result<SwitchDecision> {
    if let Some(h) = held {
        if step < h.valid_until_step {
            return Ok(h.clone());
        }
    }
    match law {
        SwitchingLaw::Cyclic { alpha, period } => Ok(SwitchDecision {
            index: cyclic_index(t, alpha, *period),
            step,
            valid_until_step: step + 1,
            v_drifts: Vec::new(),
        }),
        SwitchingLaw::StateBased { cert, dwell_steps }
        | SwitchingLaw::MeasurementBased { cert, dwell_steps } => {
            let mut d = select_argmin(cert, gens, rho_for_decision)?;
            d.step = step;
            d.valid_until_step = step + dwell_steps;
            Ok(d)
        }
    }
}

/// Stateful scheduler used inside trajectory loops. Drift evaluations go
/// through a precomputed DriftTable (tr(K L_j(rho)) = tr(L_j^dual(K) rho)),
/// which agrees with the reference `schedule` to rounding.
pub struct Scheduler<'a> {
    law: &'a SwitchingLaw,
    n_gens: usize,
    table: Option<DriftTable>,
    dt: f64,
    held: Option<SwitchDecision>,
}

impl<'a> Scheduler<'a> {
    pub fn new(law: &'a SwitchingLaw, gens: &[LindbladGenerator], dt: f64) -> Result<Self> {
        if gens.is_empty() {
            return Err(Error::InvalidWeights {
                reason: "no generators to schedule".into(),
            });
        }
        if let SwitchingLaw::Cyclic { alpha, .. } = law {
            if alpha.len() != gens.len() {
                return Err(Error::InvalidWeights {
                    reason: format!(
                        "{} cycle fractions for {} generators",
                        alpha.len(),
                        gens.len()
                    ),
                });
            }
        }
        let table = match law.certificate() {
            Some(cert) => Some(DriftTable::new(cert, gens)?),
            None => None,
        };
        Ok(Self {
            law,
            n_gens: gens.len(),
            table,
            dt,
            held: None,
        })
    }

    /// Decision governing `step`. `rho_for_decision` must be the law's
    /// estimate at this step; it is only read when the held decision has
    /// expired.
    pub fn decide(&mut self, step: usize, rho_for_decision: &Operator) -> Result<SwitchDecision> {
        if let Some(h) = &self.held {
            if step < h.valid_until_step {
                return Ok(h.clone());
            }
        }
        let next = match self.law {
            SwitchingLaw::Cyclic { alpha, period } => SwitchDecision {
                index: cyclic_index(step as f64 * self.dt, alpha, *period),
                step,
                valid_until_step: step + 1,
                v_drifts: Vec::new(),
            },
            SwitchingLaw::StateBased { dwell_steps, .. }
            | SwitchingLaw::MeasurementBased { dwell_steps, .. } => {
                let table = self.table.as_ref().expect("argmin law has a table");
                let v_drifts = table.drifts(rho_for_decision);
                debug_assert_eq!(v_drifts.len(), self.n_gens);
                SwitchDecision {
                    index: argmin_with_ties(&v_drifts),
                    step,
                    valid_until_step: step + dwell_steps,
                    v_drifts,
                }
            }
        };
        self.held = Some(next.clone());
        Ok(next)
    }
}
