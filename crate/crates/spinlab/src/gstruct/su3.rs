use super::su2::check_unit;
use crate::clifford::{CliffordRep, Spinor};
use crate::error::{Result, SpinError};
use crate::forms::Form;

#[derive(Debug, Clone, PartialEq)]
pub struct SU3Structure {
    pub omega: Form,
    pub theta_plus: Form,
}

/// `omega(X, Y) = <j X eta, Y eta>` with `j` the volume element, `Theta_+ = -<X Y Z eta, eta>`.
pub fn su3_from_spinor(eta: &Spinor, rep6: &CliffordRep) -> Result<SU3Structure> {
    if rep6.n() != 6 || eta.len() != rep6.spinor_dim() {
        return Err(SpinError::DimensionMismatch { expected: 6, found: rep6.n() });
    }
    check_unit(eta)?;
    let g: Vec<Spinor> = (1..=6).map(|i| rep6.gen(i) * eta).collect();
    let j = rep6.volume();
    let mut om = Vec::new();
    let mut th = Vec::new();
    for a in 1..=6 {
        let jx = j * &g[a - 1];
        for b in a + 1..=6 {
            om.push((vec![a, b], jx.dot(&g[b - 1])));
            for c in b + 1..=6 {
                th.push((vec![a, b, c], -(rep6.gen(a) * (rep6.gen(b) * &g[c - 1])).dot(eta)));
            }
        }
    }
    Ok(SU3Structure { omega: Form::from_terms(6, 2, om)?, theta_plus: Form::from_terms(6, 3, th)? })
}

impl SU3Structure {
    /// Coefficient of `e^{123456}` in `omega^3`.
    pub fn volume_coefficient(&self) -> f64 {
        (&(&self.omega ^ &self.omega) ^ &self.omega).coeff(&[1, 2, 3, 4, 5, 6])
    }

    pub fn omega_wedge_theta(&self) -> f64 {
        (&self.omega ^ &self.theta_plus).norm()
    }
}
