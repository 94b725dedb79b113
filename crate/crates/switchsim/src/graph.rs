//! Graph-state targets for local dissipative stabilization: the CZ
//! entangling circuit, the conjugated local noise operators that pump into
//! the graph state, the graph Hamiltonian whose unique ground state it is,
//! and the product-state fixtures the experiments start from.
//!
//! Qubit 1 is the most significant tensor factor: computational basis index
//! b encodes qubit j in bit (n - j).

use ndarray::{Array1, Array2};

use crate::error::{Error, Result};
use crate::generator::LindbladGenerator;
use crate::lyapunov::LyapunovCertificate;
use crate::operator::{DensityOperator, Operator};
use crate::target::TargetSubspace;
use crate::C64;

/// Dense 2^n x 2^n construction stays interactive up to this size.
pub const MAX_QUBITS: usize = 6;

const TOL: f64 = 1e-9;

/// Simple undirected graph on qubits 1..=n. Edges are stored normalized as
/// (j, k) with j < k.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    edges: Vec<(usize, usize)>,
}

impl Graph {
    pub fn new(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidGraph {
                reason: "at least one qubit is required".into(),
            });
        }
        if n > MAX_QUBITS {
            return Err(Error::TooManyQubits { n, max: MAX_QUBITS });
        }
        let mut normalized = Vec::with_capacity(edges.len());
        for &(a, b) in edges {
            if a == b {
                return Err(Error::InvalidGraph {
                    reason: format!("self-loop on qubit {a}"),
                });
            }
            if a < 1 || b < 1 || a > n || b > n {
                return Err(Error::InvalidGraph {
                    reason: format!("edge ({a},{b}) outside 1..={n}"),
                });
            }
            let e = (a.min(b), a.max(b));
            if normalized.contains(&e) {
                return Err(Error::InvalidGraph {
                    reason: format!("duplicate edge ({},{})", e.0, e.1),
                });
            }
            normalized.push(e);
        }
        normalized.sort_unstable();
        Ok(Self {
            n,
            edges: normalized,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn dim(&self) -> usize {
        1 << self.n
    }
}

/// Bit of basis index b for 1-based qubit j (qubit 1 most significant).
fn bit(b: usize, j: usize, n: usize) -> usize {
    (b >> (n - j)) & 1
}

/// Diagonal of U_G: the product of CZ phases, entry b carries
/// (-1)^(number of edges whose both endpoints read 1 in b).
fn circuit_diag(g: &Graph) -> Vec<f64> {
    let n = g.n;
    (0..g.dim())
        .map(|b| {
            let mut sign = 1.0;
            for &(j, k) in &g.edges {
                if bit(b, j, n) == 1 && bit(b, k, n) == 1 {
                    sign = -sign;
                }
            }
            sign
        })
        .collect()
}

/// The entangling circuit U_G = prod_{(j,k) in E} CZ_{(j,k)}: diagonal,
/// real +-1, involutive, independent of edge order.
pub fn build_circuit(g: &Graph) -> Operator {
    let diag: Vec<C64> = circuit_diag(g)
        .into_iter()
        .map(|s| C64::new(s, 0.0))
        .collect();
    Operator::from_diag(&diag)
}

/// The graph state ket U_G |+>^n, with amplitudes d_b / sqrt(2^n).
fn graph_state_ket(g: &Graph) -> Array1<C64> {
    let amp = 1.0 / (g.dim() as f64).sqrt();
    Array1::from_iter(circuit_diag(g).into_iter().map(|s| C64::new(s * amp, 0.0)))
}

/// Local stabilizing noise operator for qubit j:
/// L_{G,j} = U_G^dag (|+><-|_j tensor I) U_G. Nilpotent; its dissipator
/// fixes the graph state.
pub fn build_stabilizer_noise(g: &Graph, j: usize) -> Result<Operator> {
    let n = g.n;
    if j < 1 || j > n {
        return Err(Error::InvalidGraph {
            reason: format!("qubit index {j} outside 1..={n}"),
        });
    }
    let d = g.dim();
    let diag = circuit_diag(g);
    let mask = 1usize << (n - j);
    let mut mat = Array2::zeros((d, d));
    // |+><-| on qubit j: column b feeds both rows b&!mask and b|mask with
    // amplitude (1/2)(-1)^{bit_j(b)}; conjugation by the diagonal U_G
    // multiplies by d[row] d[col].
    for b in 0..d {
        let amp = 0.5 * if bit(b, j, n) == 1 { -1.0 } else { 1.0 };
        for row in [b & !mask, b | mask] {
            mat[[row, b]] = C64::new(amp * diag[row] * diag[b], 0.0);
        }
    }
    Operator::from_array(mat)
}

/// Graph Hamiltonian bundle: H_G itself and the Lyapunov certificate built
/// from its normalized shift.
#[derive(Clone, Debug)]
pub struct GraphHamiltonian {
    pub h_g: Operator,
    /// Certificate with K = (H_G + n I) / (2n): spectrum in [0,1], kernel
    /// exactly the graph state.
    pub k_g: LyapunovCertificate,
}

/// H_G = -U_G^dag (sum_j X_j) U_G: Hermitian, spectrum in [-n, n], unique
/// ground state U_G |+>^n at energy -n.
pub fn build_graph_hamiltonian(g: &Graph) -> Result<GraphHamiltonian> {
    let n = g.n;
    let d = g.dim();
    let diag = circuit_diag(g);
    let mut mat = Array2::zeros((d, d));
    for b in 0..d {
        for j in 1..=n {
            let row = b ^ (1usize << (n - j));
            mat[[row, b]] += C64::new(-diag[row] * diag[b], 0.0);
        }
    }
    let h_g = Operator::from_array(mat)?;

    let vals = crate::linalg::eigh_vals(h_g.array())?;
    let ground = vals[0];
    let gap = vals[1] - vals[0];
    if (ground + n as f64).abs() > 1e-6 || gap < 1e-6 {
        return Err(Error::DegenerateGround { gap });
    }

    let scale = 1.0 / (2.0 * n as f64);
    let mut k_mat = h_g.clone();
    k_mat += &Operator::identity(d).scaled_re(n as f64);
    let k_mat = k_mat.scaled_re(scale);

    let ket = graph_state_ket(g);
    let target = TargetSubspace::from_span(&[ket.view()], TOL)?;
    let k_g = LyapunovCertificate::new(k_mat, target, TOL)?;
    Ok(GraphHamiltonian { h_g, k_g })
}

/// Pure product state over the +- basis, optionally conjugated by U_G.
/// Pattern character i (1-based qubit i) must be '+' or '-'.
pub fn product_state(pattern: &str, g: &Graph, rotate: bool) -> Result<DensityOperator> {
    let n = g.n;
    let signs: Vec<f64> = pattern
        .chars()
        .map(|c| match c {
            '+' => Ok(1.0),
            '-' => Ok(-1.0),
            other => Err(Error::InvalidPattern {
                pattern: pattern.to_string(),
                reason: format!("character '{other}' is not '+' or '-'"),
            }),
        })
        .collect::<Result<_>>()?;
    if signs.len() != n {
        return Err(Error::InvalidPattern {
            pattern: pattern.to_string(),
            reason: format!("length {} does not match {} qubits", signs.len(), n),
        });
    }
    let d = g.dim();
    let amp = 1.0 / (d as f64).sqrt();
    let diag = circuit_diag(g);
    let mut ket = Array1::zeros(d);
    for b in 0..d {
        let mut v = amp;
        for (idx, s) in signs.iter().enumerate() {
            if bit(b, idx + 1, n) == 1 {
                v *= s;
            }
        }
        if rotate {
            v *= diag[b];
        }
        ket[b] = C64::new(v, 0.0);
    }
    DensityOperator::pure(ket.view())
}

/// Which operator drives the homodyne record in the graph experiments.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum MeasurementChoice {
    /// C = k_g, the normalized shifted graph Hamiltonian (the certificate
    /// matrix itself).
    #[default]
    Certificate,
    /// C = H_G, the raw graph Hamiltonian (same dissipator and back-action
    /// shape, 2n times stronger).
    GraphHamiltonian,
    /// No continuous monitoring; generators are purely dissipative.
    Unmonitored,
}

/// Everything the graph experiments need: one generator per qubit
/// (L_j = D[L_{G,j}] + D[C] with the shared measurement C), the certificate,
/// and the target.
#[derive(Clone, Debug)]
pub struct GraphModel {
    pub graph: Graph,
    pub generators: Vec<LindbladGenerator>,
    pub cert: LyapunovCertificate,
    pub h_g: Operator,
}

pub fn graph_model(g: &Graph, measurement: MeasurementChoice) -> Result<GraphModel> {
    let bundle = build_graph_hamiltonian(g)?;
    let c_op = match measurement {
        MeasurementChoice::Certificate => bundle.k_g.k().clone(),
        MeasurementChoice::GraphHamiltonian => bundle.h_g.clone(),
        MeasurementChoice::Unmonitored => Operator::zeros(g.dim()),
    };
    let mut generators = Vec::with_capacity(g.n);
    for j in 1..=g.n {
        let l = build_stabilizer_noise(g, j)?;
        generators.push(LindbladGenerator::new(
            format!("stabilize-q{j}"),
            Operator::zeros(g.dim()),
            vec![l],
            c_op.clone(),
            TOL,
        )?);
    }
    Ok(GraphModel {
        graph: g.clone(),
        generators,
        cert: bundle.k_g,
        h_g: bundle.h_g,
    })
}

/// The five-qubit example graph used by the experiments:
/// edges {(1,2),(1,3),(2,3),(3,4),(4,5)}.
pub fn example_graph() -> Graph {
    Graph::new(5, &[(1, 2), (1, 3), (2, 3), (3, 4), (4, 5)]).expect("static graph is valid")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generator::{check_gas, convex_combine, measurement_expectation, Liouvillian};
    use crate::lyapunov::v_drift;
    use crate::operator::trace_product;
    use crate::sample::StateSampler;
    use crate::superop::{backaction, dissipator};
    use approx::assert_abs_diff_eq;

    fn graph_state(g: &Graph) -> DensityOperator {
        let plus = "+".repeat(g.n());
        product_state(&plus, g, true).unwrap()
    }

    #[test]
    fn test_single_qubit_empty_graph() {
        let g = Graph::new(1, &[]).unwrap();
        let u = build_circuit(&g);
        assert!((u.array() - Operator::identity(2).array())
            .iter()
            .all(|z| z.norm() == 0.0));
        let l = build_stabilizer_noise(&g, 1).unwrap();
        // |+><-| = (1/2) [[1,-1],[1,-1]].
        assert_abs_diff_eq!(l.array()[[0, 0]].re, 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(l.array()[[0, 1]].re, -0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(l.array()[[1, 0]].re, 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(l.array()[[1, 1]].re, -0.5, epsilon = 1e-15);
        let bundle = build_graph_hamiltonian(&g).unwrap();
        // H = -X, ground |+>, K = |-><-|.
        assert_abs_diff_eq!(bundle.h_g.array()[[0, 1]].re, -1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(bundle.h_g.array()[[0, 0]].re, 0.0, epsilon = 1e-15);
        let k = bundle.k_g.k();
        assert_abs_diff_eq!(k.array()[[0, 0]].re, 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(k.array()[[0, 1]].re, -0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(bundle.k_g.k_max(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn test_two_qubit_cz_and_spectrum() {
        let g = Graph::new(2, &[(1, 2)]).unwrap();
        let u = build_circuit(&g);
        let expect = [1.0, 1.0, 1.0, -1.0];
        for (b, e) in expect.iter().enumerate() {
            assert_eq!(u.array()[[b, b]].re, *e);
        }
        let rho_g = graph_state(&g);
        for (b, e) in expect.iter().enumerate() {
            assert_abs_diff_eq!(rho_g.op().array()[[b, 0]].re, 0.25 * e, epsilon = 1e-15);
        }
        let bundle = build_graph_hamiltonian(&g).unwrap();
        let vals = crate::linalg::eigh_vals(bundle.h_g.array()).unwrap();
        for (v, e) in vals.iter().zip([-2.0, 0.0, 0.0, 2.0]) {
            assert_abs_diff_eq!(*v, e, epsilon = 1e-12);
        }
        let kvals = crate::linalg::eigh_vals(bundle.k_g.k().array()).unwrap();
        for (v, e) in kvals.iter().zip([0.0, 0.5, 0.5, 1.0]) {
            assert_abs_diff_eq!(*v, e, epsilon = 1e-12);
        }
        let l1 = build_stabilizer_noise(&g, 1).unwrap();
        assert!(dissipator(&l1, rho_g.op()).frobenius_norm() < 1e-10);
    }

    #[test]
    fn test_three_qubit_path_sign_enumeration() {
        let g = Graph::new(3, &[(1, 2), (2, 3)]).unwrap();
        let u = build_circuit(&g);
        for b in 0..8 {
            let (b1, b2, b3) = ((b >> 2) & 1, (b >> 1) & 1, b & 1);
            let sign = if (b1 * b2 + b2 * b3) % 2 == 1 {
                -1.0
            } else {
                1.0
            };
            assert_eq!(u.array()[[b, b]].re, sign, "basis state {b:03b}");
        }
        // Order independence and involution.
        let g_rev = Graph::new(3, &[(2, 3), (1, 2)]).unwrap();
        assert_eq!(g, g_rev);
        let u2 = &u * &u;
        assert!((u2.array() - Operator::identity(8).array())
            .iter()
            .all(|z| z.norm() < 1e-15));
    }

    #[test]
    fn test_stabilizer_noise_is_nilpotent() {
        let g = example_graph();
        for j in 1..=5 {
            let l = build_stabilizer_noise(&g, j).unwrap();
            let l2 = &l * &l;
            assert!(l2.frobenius_norm() < 1e-12, "qubit {j}");
        }
    }

    #[test]
    fn test_example_graph_ground_energy() {
        let g = example_graph();
        let bundle = build_graph_hamiltonian(&g).unwrap();
        let rho_g = graph_state(&g);
        assert_abs_diff_eq!(
            trace_product(&bundle.h_g, rho_g.op()).re,
            -5.0,
            epsilon = 1e-9
        );
        // Every local dissipator and the Hamiltonian fix the graph state.
        for j in 1..=5 {
            let l = build_stabilizer_noise(&g, j).unwrap();
            assert!(dissipator(&l, rho_g.op()).frobenius_norm() < 1e-10);
        }
        let comm = &(&bundle.h_g * rho_g.op()) - &(rho_g.op() * &bundle.h_g);
        assert!(comm.frobenius_norm() < 1e-10);
    }

    #[test]
    fn test_uniform_combination_is_gas_path_graph() {
        let g = Graph::new(3, &[(1, 2), (2, 3)]).unwrap();
        let model = graph_model(&g, MeasurementChoice::Certificate).unwrap();
        let comb = convex_combine(&model.generators, &[1.0 / 3.0; 3]).unwrap();
        let report = check_gas(&comb, model.cert.target(), 1e-9).unwrap();
        assert!(report.is_invariant);
        assert!(report.is_gas);
    }

    #[test]
    fn test_certificate_measurement_is_silent_at_target() {
        let g = example_graph();
        let model = graph_model(&g, MeasurementChoice::Certificate).unwrap();
        let rho_g = graph_state(&g);
        let c = model.generators[0].measurement_op();
        assert!(backaction(c, rho_g.op()).frobenius_norm() < 1e-10);
        // tr(K D_K(rho)) = 0 identically: the dual image of K under its own
        // dissipator vanishes.
        let pump_free =
            LindbladGenerator::new("monitor-only", Operator::zeros(32), vec![], c.clone(), 1e-9)
                .unwrap();
        let mut sampler = StateSampler::new(9);
        for _ in 0..10 {
            let rho = sampler.hs_mixed(32);
            let drift = v_drift(&model.cert, &pump_free, &rho).unwrap();
            assert_abs_diff_eq!(drift, 0.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn test_graph_hamiltonian_measurement_still_fixes_target() {
        let g = Graph::new(3, &[(1, 2), (2, 3)]).unwrap();
        let model = graph_model(&g, MeasurementChoice::GraphHamiltonian).unwrap();
        let rho_g = graph_state(&g);
        for gen in &model.generators {
            assert!(gen.apply(rho_g.op()).frobenius_norm() < 1e-10);
        }
        // The record's drift rate differs from the certificate choice by
        // the affine shift: tr((2 H_G) rho_G) = -2n vs tr((2 k_g) rho_G) = 0.
        assert_abs_diff_eq!(
            measurement_expectation(&model.generators[0], rho_g.op()),
            -6.0,
            epsilon = 1e-9
        );
        let cert_model = graph_model(&g, MeasurementChoice::Certificate).unwrap();
        assert_abs_diff_eq!(
            measurement_expectation(&cert_model.generators[0], rho_g.op()),
            0.0,
            epsilon = 1e-10
        );
    }

    #[test]
    fn test_fixture_pattern_values() {
        let g = example_graph();
        let bundle = build_graph_hamiltonian(&g).unwrap();
        let rho_g = graph_state(&g);
        assert_abs_diff_eq!(
            trace_product(bundle.k_g.k(), rho_g.op()).re,
            0.0,
            epsilon = 1e-12
        );
        // <X> per qubit: "--++-" gives sum -1, so V = (1 + 5)/10.
        let rho0 = product_state("--++-", &g, true).unwrap();
        assert_abs_diff_eq!(
            trace_product(bundle.k_g.k(), rho0.op()).re,
            0.6,
            epsilon = 1e-12
        );
        // Flipped pattern "++--+": sum +1, V = (-1 + 5)/10.
        let flipped = product_state("++--+", &g, true).unwrap();
        assert_abs_diff_eq!(
            trace_product(bundle.k_g.k(), flipped.op()).re,
            0.4,
            epsilon = 1e-12
        );
        // The two fixtures are orthogonal to the target and to each other.
        assert_abs_diff_eq!(
            trace_product(rho0.op(), rho_g.op()).re,
            0.0,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(
            trace_product(rho0.op(), flipped.op()).re,
            0.0,
            epsilon = 1e-12
        );
    }

    #[test]
    fn test_unrotated_minus_state() {
        let g = Graph::new(1, &[]).unwrap();
        let rho = product_state("-", &g, false).unwrap();
        let arr = rho.op().array();
        assert_abs_diff_eq!(arr[[0, 0]].re, 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(arr[[0, 1]].re, -0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(arr[[1, 1]].re, 0.5, epsilon = 1e-15);
    }

    #[test]
    fn test_graph_validation() {
        assert!(Graph::new(0, &[]).is_err());
        assert!(Graph::new(7, &[]).is_err());
        assert!(Graph::new(3, &[(1, 1)]).is_err());
        assert!(Graph::new(3, &[(1, 4)]).is_err());
        assert!(Graph::new(3, &[(1, 2), (2, 1)]).is_err());
        assert!(Graph::new(6, &[(1, 2)]).is_ok());
        let g = Graph::new(3, &[]).unwrap();
        assert!(build_stabilizer_noise(&g, 0).is_err());
        assert!(build_stabilizer_noise(&g, 4).is_err());
        assert!(product_state("++", &g, false).is_err());
        assert!(product_state("+x+", &g, false).is_err());
    }
}
