//! Structures induced by an invariant spinor: SU(2) in dimension 5, SU(3) in dimension 6,
//! plus the invariants `(mu, v)` and `(mu, gamma)` of the squared Dirac operator.

mod connection;
mod su2;
mod su3;
mod torsion;

pub use connection::{
    connection_components, covariant_derivative_spinor, dirac_from_components, levi_civita, ConnectionComponents,
};
pub use su2::{su2_from_spinor, SU2Structure, EPSILON};
pub use su3::{su3_from_spinor, SU3Structure};
pub use torsion::{hypo_residual, is_hypo, su2_torsion, torsion_from_components, SU2Torsion};

use serde::Serialize;

use crate::algebra::MetricLieAlgebra;
use crate::dirac::square_four_form;
use crate::error::{Result, SpinError};
use crate::forms::{Form, Orientation};

/// `16 D^2 = mu + v j1` in dimension 5.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Dim5Invariants {
    pub mu: f64,
    pub v: [f64; 5],
}

impl Dim5Invariants {
    pub fn v_norm(&self) -> f64 {
        self.v.iter().map(|x| x * x).sum::<f64>().sqrt()
    }
}

/// `16 D^2 = mu + gamma j` in dimension 6, `j` the volume element.
#[derive(Debug, Clone, PartialEq)]
pub struct Dim6Invariants {
    pub mu: f64,
    pub gamma: Form,
}

fn require(alg: &MetricLieAlgebra, n: usize) -> Result<()> {
    if alg.dim() != n {
        return Err(SpinError::DimensionMismatch { expected: n, found: alg.dim() });
    }
    if alg.orientation() != Orientation::Positive {
        return Err(SpinError::Unsupported("invariants are defined for the positively oriented frame".into()));
    }
    Ok(())
}

pub fn mu_v(alg: &MetricLieAlgebra) -> Result<Dim5Invariants> {
    require(alg, 5)?;
    let (mu, f) = square_four_form(alg)?;
    let star = f.hodge_star(Orientation::Positive);
    let mut v = [0.0; 5];
    for (i, x) in v.iter_mut().enumerate() {
        *x = -star.coeff(&[i + 1]);
    }
    Ok(Dim5Invariants { mu, v })
}

/// `|mu - |v|| <= tol * max(mu, 1)`.
pub fn is_harmonic_metric_dim5(alg: &MetricLieAlgebra, tol: f64) -> Result<bool> {
    let inv = mu_v(alg)?;
    Ok((inv.mu - inv.v_norm()).abs() <= tol * inv.mu.max(1.0))
}

pub fn mu_gamma(alg: &MetricLieAlgebra) -> Result<Dim6Invariants> {
    require(alg, 6)?;
    let (mu, f) = square_four_form(alg)?;
    Ok(Dim6Invariants { mu, gamma: -&f.hodge_star(Orientation::Positive) })
}
