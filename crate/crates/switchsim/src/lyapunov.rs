//! Linear Lyapunov certificates V(rho) = tr(K rho) for a target subspace:
//! construction from the dominant eigen-operator of the reduced dual
//! generator, drift evaluation, sampled verification of the min-drift
//! condition, the minimum dwell-time bound, and practical-stability
//! monitoring of trajectories.

use ndarray::prelude::*;
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::generator::{invariance_defect, reduced_matrix, LindbladGenerator, Liouvillian};
use crate::linalg;
use crate::operator::{trace_product, DensityOperator, Operator};
use crate::sample::StateSampler;
use crate::target::TargetSubspace;

/// V(rho) = tr(K rho) with K Hermitian, positive semidefinite, vanishing
/// exactly on the target subspace and positive definite on its complement.
/// k_max is the largest eigenvalue of K, so V(rho) <= k_max tr(P_R rho).
#[derive(Clone, Debug)]
pub struct LyapunovCertificate {
    k: Operator,
    target: TargetSubspace,
    k_max: f64,
}

impl LyapunovCertificate {
    pub fn new(k: Operator, target: TargetSubspace, tol: f64) -> Result<Self> {
        if k.dim() != target.dim() {
            return Err(Error::DimensionMismatch {
                left: k.dim(),
                right: target.dim(),
                context: "certificate operator vs target",
            });
        }
        if !k.is_hermitian(tol) {
            return Err(Error::NotHermitian {
                defect: k.herm_defect(),
            });
        }
        let k = k.herm_part();
        let min_eig = k.min_eigenvalue()?;
        if min_eig < -tol {
            return Err(Error::InvalidDensity {
                reason: format!("certificate not PSD, min eigenvalue {min_eig}"),
            });
        }
        // Kernel must contain the target: K P_S = 0.
        let kernel_defect = (&k * target.projector()).frobenius_norm();
        if kernel_defect > tol.max(1e-12) * k.frobenius_norm().max(1.0) {
            return Err(Error::KernelMismatch {
                kernel_dim: 0,
                target_dim: target.dim_s(),
            });
        }
        let k_max = if target.dim_r() == 0 {
            0.0
        } else {
            let block = target.complement_block(&k);
            let vals = linalg::eigh_vals(&block)?;
            // Positive definite on the complement, so V > 0 off the target.
            if vals[0] <= tol {
                return Err(Error::KernelMismatch {
                    kernel_dim: target.dim_s() + vals.iter().filter(|v| **v <= tol).count(),
                    target_dim: target.dim_s(),
                });
            }
            vals[vals.len() - 1]
        };
        Ok(Self { k, target, k_max })
    }

    pub fn k(&self) -> &Operator {
        &self.k
    }

    pub fn target(&self) -> &TargetSubspace {
        &self.target
    }

    pub fn k_max(&self) -> f64 {
        self.k_max
    }
}

/// V(rho).
pub fn v_value(cert: &LyapunovCertificate, rho: &DensityOperator) -> Result<f64> {
    if rho.dim() != cert.k.dim() {
        return Err(Error::DimensionMismatch {
            left: cert.k.dim(),
            right: rho.dim(),
            context: "v_value",
        });
    }
    Ok(trace_product(&cert.k, rho.op()).re)
}

/// dV/dt along a generator: tr(K L(rho)).
pub fn v_drift(
    cert: &LyapunovCertificate,
    gen: &impl Liouvillian,
    rho: &DensityOperator,
) -> Result<f64> {
    if rho.dim() != cert.k.dim() || gen.dim() != cert.k.dim() {
        return Err(Error::DimensionMismatch {
            left: cert.k.dim(),
            right: rho.dim().max(gen.dim()),
            context: "v_drift",
        });
    }
    Ok(trace_product(&cert.k, &gen.apply(rho.op())).re)
}

/// Precomputed Heisenberg images L_j^dual(K), one per generator, so a drift
/// evaluation inside the trajectory loop is a single trace product instead
/// of a full generator application: tr(K L_j(rho)) = tr(L_j^dual(K) rho).
#[derive(Clone, Debug)]
pub struct DriftTable {
    images: Vec<Operator>,
}

impl DriftTable {
    pub fn new(cert: &LyapunovCertificate, gens: &[LindbladGenerator]) -> Result<Self> {
        let mut images = Vec::with_capacity(gens.len());
        for g in gens {
            if g.dim() != cert.k.dim() {
                return Err(Error::DimensionMismatch {
                    left: cert.k.dim(),
                    right: g.dim(),
                    context: "drift table",
                });
            }
            images.push(g.apply_dual(&cert.k));
        }
        Ok(Self { images })
    }

    pub fn len(&self) -> usize {
        self.images.len()
    }

    pub fn is_empty(&self) -> bool {
        self.images.is_empty()
    }

    /// Drift of V along generator j at the given state.
    pub fn drift(&self, j: usize, rho: &Operator) -> f64 {
        trace_product(&self.images[j], rho).re
    }

    /// All drifts at the given state, in generator order.
    pub fn drifts(&self, rho: &Operator) -> Vec<f64> {
        self.images
            .iter()
            .map(|im| trace_product(im, rho).re)
            .collect()
    }
}

/// Result of `construct_k`: the certificate plus how it was obtained.
#[derive(Clone, Debug)]
pub struct ConstructedCertificate {
    pub certificate: LyapunovCertificate,
    /// Dominant (largest-real-part) eigenvalue of the reduced dual generator.
    pub dominant_eigenvalue: C64,
    /// Whether the dominant eigenvalue was degenerate (a cluster was used).
    pub degenerate: bool,
    /// Whether the identity perturbation was needed to reach positive
    /// definiteness.
    pub perturbation_applied: bool,
}

fn unvec(v: ArrayView1<C64>, m: usize) -> Array2<C64> {
    let mut out = Array2::zeros((m, m));
    for i in 0..m {
        for j in 0..m {
            out[[i, j]] = v[i * m + j];
        }
    }
    out
}

fn vec_of(a: &Array2<C64>) -> Array1<C64> {
    let m = a.nrows();
    let mut out = Array1::zeros(m * m);
    for i in 0..m {
        for j in 0..m {
            out[i * m + j] = a[[i, j]];
        }
    }
    out
}

fn hermitize(a: &Array2<C64>) -> Array2<C64> {
    let at = a.t().mapv(|z| z.conj());
    (a + &at).mapv(|z| z * 0.5)
}

/// Positive scaling tolerance for clustering eigenvalues of the reduced
/// dual generator into one dominant group.
const CLUSTER_TOL: f64 = 1e-9;
/// Identity perturbation weight (trace-normalized identity on the
/// complement) applied when the dominant eigen-operator is not positive
/// definite.
const PERTURBATION_GAMMA: f64 = 1e-6;

/// Builds a linear Lyapunov certificate for a generator (or convex
/// combination) that makes the target GAS. The certificate matrix on the
/// complement is the dominant eigen-operator of the reduced dual generator:
/// the spectral projection of the identity onto the dominant eigenvalue
/// cluster, Hermitized, perturbed to positive definiteness if needed, and
/// normalized so the largest eigenvalue of K is 1. Drift negativity is
/// re-verified on sampled states before returning.
pub fn construct_k(
    gen: &impl Liouvillian,
    target: &TargetSubspace,
    tol: f64,
) -> Result<ConstructedCertificate> {
    if gen.dim() != target.dim() {
        return Err(Error::DimensionMismatch {
            left: gen.dim(),
            right: target.dim(),
            context: "construct_k",
        });
    }
    let m_dim = target.dim_r();
    if m_dim == 0 {
        return Err(Error::Invalid {
            context: "construct_k",
            reason: "target is the whole space; no certificate is needed".into(),
        });
    }
    let defect = invariance_defect(gen, target);
    if defect > tol {
        return Err(Error::TargetNotInvariant {
            label: "construct_k input".into(),
            defect,
        });
    }
    // The dual reduced matrix is the conjugate transpose of the primal one
    // (the vectorization basis is orthonormal for the HS inner product).
    let m_primal = reduced_matrix(gen, target, false);
    let m_dual = m_primal.t().mapv(|z| z.conj());
    let (eigenvalues, vectors) = linalg::eig(&m_dual)?;
    let max_re = eigenvalues
        .iter()
        .map(|z| z.re)
        .fold(f64::NEG_INFINITY, f64::max);
    if max_re >= -tol {
        return Err(Error::NotGas {
            label: "construct_k input".into(),
            max_re,
        });
    }
    let cluster: Vec<usize> = eigenvalues
        .iter()
        .enumerate()
        .filter(|(_, z)| (z.re - max_re).abs() <= CLUSTER_TOL)
        .map(|(i, _)| i)
        .collect();
    let degenerate = cluster.len() > 1;
    let dominant_eigenvalue = eigenvalues[cluster[0]];

    // Primary path: spectral projection of the complement identity onto the
    // dominant cluster. The identity is positive definite, so its dominant
    // component inherits positivity whenever the cluster is diagonalizable.
    let identity_vec = vec_of(&Array2::eye(m_dim).mapv(|x: f64| C64::new(x, 0.0)));
    let mut x = match linalg::solve(&vectors, &identity_vec) {
        Ok(coords) => {
            let mut acc = Array1::<C64>::zeros(m_dim * m_dim);
            for &i in &cluster {
                let col = vectors.column(i);
                let w = coords[i];
                for r in 0..acc.len() {
                    acc[r] += w * col[r];
                }
            }
            hermitize(&unvec(acc.view(), m_dim))
        }
        Err(_) => Array2::zeros((m_dim, m_dim)),
    };
    // Residual check guards against a defective (non-diagonalizable)
    // dominant cluster, where the eigenvector matrix is singular.
    let projector_ok = {
        let norm = x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm < 1e-10 {
            false
        } else {
            let image = m_dual.dot(&vec_of(&x));
            let scaled = vec_of(&x).mapv(|z| z * dominant_eigenvalue);
            let resid: f64 = image
                .iter()
                .zip(scaled.iter())
                .map(|(a, b)| (a - b).norm_sqr())
                .sum::<f64>()
                .sqrt();
            resid <= 1e-6 * norm
        }
    };
    if !projector_ok {
        // Fallback: the cluster eigenvector whose Hermitization is closest
        // to positive semidefinite; the perturbation below finishes the job.
        let mut best: Option<(f64, Array2<C64>)> = None;
        for &i in &cluster {
            let mut h = hermitize(&unvec(vectors.column(i), m_dim));
            let vals = linalg::eigh_vals(&h)?;
            let (lo, hi) = (vals[0], vals[vals.len() - 1]);
            if -lo > hi {
                h.mapv_inplace(|z| -z);
            }
            let vals = linalg::eigh_vals(&h)?;
            let score = vals[0] / vals[vals.len() - 1].max(1e-300);
            if best.as_ref().is_none_or(|(s, _)| score > *s) {
                best = Some((score, h));
            }
        }
        x = best.expect("cluster is nonempty").1;
    }

    let vals = linalg::eigh_vals(&x)?;
    let (lo, hi) = (vals[0], vals[vals.len() - 1]);
    if -lo > hi {
        x.mapv_inplace(|z| -z);
    }
    let top = hi.max(-lo);
    if top <= 0.0 {
        return Err(Error::Invalid {
            context: "construct_k",
            reason: "dominant eigen-operator vanished".into(),
        });
    }
    x.mapv_inplace(|z| z / top);
    let mut perturbation_applied = false;
    if linalg::eigh_vals(&x)?[0] <= tol {
        let shift = PERTURBATION_GAMMA / m_dim as f64;
        for i in 0..m_dim {
            x[[i, i]] += C64::new(shift, 0.0);
        }
        perturbation_applied = true;
        if linalg::eigh_vals(&x)?[0] <= 0.0 {
            return Err(Error::Invalid {
                context: "construct_k",
                reason: "eigen-operator not positive definite after perturbation".into(),
            });
        }
    }
    // Normalize so the largest eigenvalue of K is exactly 1.
    let vals = linalg::eigh_vals(&x)?;
    let top = vals[vals.len() - 1];
    x.mapv_inplace(|z| z / top);

    let k = target.embed_complement(&x);
    let certificate = LyapunovCertificate::new(k, target.clone(), tol)?;

    // Drift negativity on sampled states outside the target.
    let mut sampler = StateSampler::new(0x5eed_cafe);
    for i in 0..48 {
        let rho = if i % 3 == 0 {
            sampler.haar_pure(gen.dim())
        } else {
            sampler.hs_mixed(gen.dim())
        };
        if target.residual_weight(&rho) < 1e-9 {
            continue;
        }
        let drift = v_drift(&certificate, gen, &rho)?;
        if drift >= 0.0 {
            return Err(Error::DriftCheckFailed { drift, sample: i });
        }
    }

    Ok(ConstructedCertificate {
        certificate,
        dominant_eigenvalue,
        degenerate,
        perturbation_applied,
    })
}

/// Outcome of the sampled min-drift verification.
#[derive(Clone, Debug)]
pub struct Assumption2Report {
    pub holds: bool,
    /// States at which the condition failed.
    pub witnesses: Vec<DensityOperator>,
}

/// Checks, on sampled states, that some generator gives strictly negative
/// certificate drift outside the target while target-supported states see
/// zero minimum-magnitude drift. Samples are Hilbert-Schmidt mixed, Haar
/// pure, rank-deficient, the computational basis states, and random states
/// supported on the target.
pub fn verify_assumption2(
    cert: &LyapunovCertificate,
    gens: &[LindbladGenerator],
    n_samples: usize,
    seed: u64,
    tol: f64,
) -> Result<Assumption2Report> {
    if gens.is_empty() {
        return Ok(Assumption2Report {
            holds: false,
            witnesses: Vec::new(),
        });
    }
    let dim = cert.k().dim();
    let mut sampler = StateSampler::new(seed);
    let mut samples: Vec<DensityOperator> = Vec::new();
    for _ in 0..n_samples {
        samples.push(sampler.hs_mixed(dim));
    }
    for _ in 0..n_samples / 4 + 1 {
        samples.push(sampler.haar_pure(dim));
        if dim > 2 {
            samples.push(sampler.rank_k(dim, 2));
        }
    }
    for l in 0..dim {
        samples.push(DensityOperator::pure(
            crate::operator::basis_ket(dim, l).view(),
        )?);
    }
    for _ in 0..4 {
        samples.push(sampler.supported_on(cert.target().basis_s()));
    }

    let mut witnesses = Vec::new();
    for rho in samples {
        let drifts: Result<Vec<f64>> = gens.iter().map(|g| v_drift(cert, g, &rho)).collect();
        let drifts = drifts?;
        let min = drifts.iter().copied().fold(f64::INFINITY, f64::min);
        let min_abs = drifts.iter().map(|d| d.abs()).fold(f64::INFINITY, f64::min);
        let on_target = cert.target().residual_weight(&rho) <= 1e-9;
        let ok = if on_target { min_abs < tol } else { min < -tol };
        if !ok {
            witnesses.push(rho);
        }
    }
    Ok(Assumption2Report {
        holds: witnesses.is_empty(),
        witnesses,
    })
}

/// The chattering-free dwell-time bound (1 - r) k_c_min / k2_max.
#[derive(Clone, Copy, Debug)]
pub struct DwellBound {
    pub r: f64,
    /// Smallest absolute eigenvalue of the reduced dual image of K under the
    /// convex combination.
    pub k_c_min: f64,
    /// Largest absolute eigenvalue of the twice-applied reduced dual, over
    /// all generators.
    pub k2_max: f64,
    pub bound: f64,
}

/// Computes the minimum dwell time guaranteeing the certificate keeps
/// decreasing over a switching interval, for generators that all leave the
/// target invariant and whose convex combination is stabilizing.
pub fn dwell_bound(
    cert: &LyapunovCertificate,
    gens: &[LindbladGenerator],
    alpha: &[f64],
    r: f64,
    tol: f64,
) -> Result<DwellBound> {
    if !(0.0..1.0).contains(&r) {
        return Err(Error::InvalidRetention { r });
    }
    let target = cert.target();
    for g in gens {
        let defect = invariance_defect(g, target);
        if defect > tol {
            return Err(Error::TargetNotInvariant {
                label: g.label().to_string(),
                defect,
            });
        }
    }
    let combination = crate::generator::convex_combine(gens, alpha)?;

    let reduced_dual_block = |gen: &dyn Fn(&Operator) -> Operator, x: &Operator| -> Operator {
        target.embed_complement(&target.complement_block(&gen(x)))
    };

    let c_image = reduced_dual_block(&|x| combination.apply_dual(x), &cert.k);
    let c_vals = linalg::eigh_vals(&target.complement_block(&c_image))?;
    let k_c_min = c_vals.iter().map(|v| v.abs()).fold(f64::INFINITY, f64::min);
    if !k_c_min.is_finite() || k_c_min <= tol {
        return Err(Error::Invalid {
            context: "dwell_bound",
            reason: format!("combination drift operator has a near-zero eigenvalue {k_c_min}"),
        });
    }

    let mut k2_max = 0.0f64;
    for g in gens {
        let once = reduced_dual_block(&|x| g.apply_dual(x), &cert.k);
        let twice = reduced_dual_block(&|x| g.apply_dual(x), &once);
        let vals = linalg::eigh_vals(&target.complement_block(&twice))?;
        let top = vals.iter().map(|v| v.abs()).fold(0.0, f64::max);
        k2_max = k2_max.max(top);
    }
    if k2_max <= tol {
        return Err(Error::ZeroCurvature);
    }
    Ok(DwellBound {
        r,
        k_c_min,
        k2_max,
        bound: (1.0 - r) * k_c_min / k2_max,
    })
}

/// Practical-stability verdict for one trajectory.
#[derive(Clone, Copy, Debug)]
pub struct StabilityMonitor {
    /// First step whose complement weight tr(P_R rho) is at most epsilon/2,
    /// which places the state within epsilon of the target in trace norm.
    pub entry_step: Option<usize>,
    /// Whether V stayed at or below epsilon / (2 k_max) from entry onward.
    pub stayed: bool,
}

pub fn practical_stability_monitor(
    cert: &LyapunovCertificate,
    trajectory: &[DensityOperator],
    epsilon: f64,
) -> Result<StabilityMonitor> {
    if epsilon <= 0.0 {
        return Err(Error::Invalid {
            context: "practical_stability_monitor",
            reason: "epsilon must be positive".into(),
        });
    }
    let target = cert.target();
    let entry_step = trajectory
        .iter()
        .position(|rho| target.residual_weight(rho) <= epsilon / 2.0);
    let stayed = match entry_step {
        None => false,
        Some(k) => {
            let beta = epsilon / (2.0 * cert.k_max().max(1e-300));
            trajectory[k..]
                .iter()
                .map(|rho| v_value(cert, rho))
                .collect::<Result<Vec<f64>>>()?
                .iter()
                .all(|v| *v <= beta + 1e-12)
        }
    };
    Ok(StabilityMonitor { entry_step, stayed })
}
