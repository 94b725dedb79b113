//! The three building blocks of the controlled master equation: Hamiltonian
//! drift, dissipation, and diffusive measurement back-action.

use num_complex::Complex64 as C64;

use crate::operator::{trace_product, Operator};

/// D[L](X) = L X L^dag - (1/2){L^dag L, X}.
pub fn dissipator(l: &Operator, x: &Operator) -> Operator {
    let ldag = l.adjoint();
    let sandwich = &(l * x) * &ldag;
    let ldl = &ldag * l;
    let anti = &(&ldl * x) + &(x * &ldl);
    &sandwich - &anti.scaled_re(0.5)
}

/// -i [H, X].
pub fn commutator_drift(h: &Operator, x: &Operator) -> Operator {
    let comm = &(h * x) - &(x * h);
    comm.scaled(C64::new(0.0, -1.0))
}

/// G_C(X) = C X + X C^dag - tr((C + C^dag) X) X, the nonlinear back-action
/// of a diffusive measurement of C. Traceless whenever tr(X) = 1.
pub fn backaction(c: &Operator, x: &Operator) -> Operator {
    let cdag = c.adjoint();
    let sum = &(c * x) + &(x * &cdag);
    let weight = trace_product(&(c + &cdag), x);
    &sum - &x.scaled(weight)
}
