//! A three-level model that no fixed generator or convex mixture stabilizes,
//! although switching between the generators does. The first generator keeps
//! the ground-state target invariant but not attractive; the second does not
//! even keep it invariant, yet both have nonpositive drift of the linear
//! certificate everywhere, which is what dwell-time switching exploits.
//!
//! Generator 1: H = 0,                   L_1 = |0><2| + |1><1| + |2><2|.
//! Generator 2: H = |0><2| + |2><0|,     L_2 = |0><1| + |1><1| + |2><2|.
//!
//! Generator 1 empties level 2 but leaves level 1 untouched; generator 2
//! empties level 1 but its Hamiltonian recycles level-2 population. The
//! natural linear certificate is V(rho) = tr(K rho) with K = I - |0><0|.

use crate::error::Result;
use crate::generator::LindbladGenerator;
use crate::operator::Operator;
use crate::target::TargetSubspace;
use num_complex::Complex64 as C64;

/// The two generators, their common target, and the certificate operator.
#[derive(Clone, Debug)]
pub struct ThreeLevelModel {
    pub generators: Vec<LindbladGenerator>,
    pub target: TargetSubspace,
    /// K = I - |0><0|; doubles as the measurement operator when monitoring
    /// is enabled.
    pub k_op: Operator,
}

/// Builds the model. With `with_measurement` the common channel C = K is
/// attached to both generators (closed-loop form); without it C = 0 and the
/// dynamics is purely dissipative.
pub fn three_level_model(with_measurement: bool) -> Result<ThreeLevelModel> {
    let one = C64::new(1.0, 0.0);
    let k_op = &Operator::identity(3) - &Operator::basis_unit(3, 0, 0);
    let c = if with_measurement {
        k_op.clone()
    } else {
        Operator::zeros(3)
    };

    let l1 = &(&Operator::basis_unit(3, 0, 2) + &Operator::basis_unit(3, 1, 1))
        + &Operator::basis_unit(3, 2, 2);
    let g1 = LindbladGenerator::new("pump-2", Operator::zeros(3), vec![l1], c.clone(), 1e-9)?;

    let mut h2 = Operator::zeros(3).into_array();
    h2[[0, 2]] = one;
    h2[[2, 0]] = one;
    let l2 = &(&Operator::basis_unit(3, 0, 1) + &Operator::basis_unit(3, 1, 1))
        + &Operator::basis_unit(3, 2, 2);
    let g2 = LindbladGenerator::new("pump-1", Operator::from_array(h2)?, vec![l2], c, 1e-9)?;

    let target = TargetSubspace::from_projector(Operator::basis_unit(3, 0, 0), 1e-9)?;
    Ok(ThreeLevelModel {
        generators: vec![g1, g2],
        target,
        k_op,
    })
}
