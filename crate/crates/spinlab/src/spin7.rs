//! Lifts to dimension 8 by a flat torus factor and the induced Spin(7) structure.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::algebra::MetricLieAlgebra;
use crate::clifford::{positive_basis, rep, rep_cl8, CliffordRep, Spinor};
use crate::error::{Result, SpinError};
use crate::forms::{basis_masks, coords, from_coords, Form, Orientation};

const UNIT_TOL: f64 = 1e-10;
const INTERTWINE_TOL: f64 = 1e-10;
pub const BALANCED_TOL: f64 = 1e-8;

/// Append `8 - n` closed coframe vectors.
pub fn lift_algebra(alg: &MetricLieAlgebra) -> Result<MetricLieAlgebra> {
    let n = alg.dim();
    if !(4..=7).contains(&n) {
        return Err(SpinError::Unsupported(format!("torus lift needs 4 <= n <= 7, got {n}")));
    }
    Ok(alg.direct_sum_abelian(8 - n))
}

/// The 8-dimensional representation of `Cl_n` whose spinors are lifted: `rep(n)` for n <= 6,
/// and the `W+` block of `v -> rho_8(v e_8)` for n = 7.
pub fn base_rep(n: usize) -> Result<CliffordRep> {
    match n {
        4..=6 => rep(n),
        7 => {
            let r8 = rep_cl8();
            let b = positive_basis(&r8)?;
            let gens = (1..=7).map(|i| b.transpose() * r8.gen(i) * r8.gen(8) * &b).collect();
            CliffordRep::new(gens)
        }
        _ => Err(SpinError::Unsupported(format!("no torus lift from dimension {n}"))),
    }
}

/// Isometry `T: R^8 -> W+` with `rho_8(v e_{n+1}) T = T rho_n(v)` for `v` in R^n (16 x 8).
#[derive(Debug, Clone, PartialEq)]
pub struct Intertwiner {
    n: usize,
    t: DMatrix<f64>,
    residual: f64,
}

impl Intertwiner {
    pub fn new(n: usize) -> Result<Self> {
        let base = base_rep(n)?;
        let r8 = rep_cl8();
        let b = positive_basis(&r8)?;
        let id = DMatrix::<f64>::identity(8, 8);
        // X rho_i - A_i X = 0 with X row-major vectorised
        let mut m = DMatrix::zeros(64 * n, 64);
        for i in 1..=n {
            let a = b.transpose() * r8.gen(i) * r8.gen(n + 1) * &b;
            let block = id.kronecker(&base.gen(i).transpose()) - a.kronecker(&id);
            m.view_mut((64 * (i - 1), 0), (64, 64)).copy_from(&block);
        }
        let eig = SymmetricEigen::new(m.transpose() * &m);
        let k = eig.eigenvalues.imin();
        let v = eig.eigenvectors.column(k);
        let x = DMatrix::from_row_slice(8, 8, v.as_slice());
        let scale = ((x.transpose() * &x).trace() / 8.0).sqrt();
        let x = x / scale;
        let orth = (x.transpose() * &x - &id).amax();
        let t = &b * &x;
        let mut residual = orth;
        for i in 1..=n {
            residual = residual.max((r8.gen(i) * r8.gen(n + 1) * &t - &t * base.gen(i)).amax());
        }
        if residual > INTERTWINE_TOL {
            return Err(SpinError::Numerical(format!("no intertwiner found for n = {n} (residual {residual:.3e})")));
        }
        Ok(Intertwiner { n, t, residual })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.t
    }

    pub fn residual(&self) -> f64 {
        self.residual
    }

    pub fn lift(&self, eta: &Spinor) -> Result<Spinor> {
        if eta.len() != 8 {
            return Err(SpinError::DimensionMismatch { expected: 8, found: eta.len() });
        }
        Ok(&self.t * eta)
    }
}

/// Shared intertwiner for n = 4..7.
pub fn intertwiner(n: usize) -> Result<&'static Intertwiner> {
    static CACHE: std::sync::OnceLock<Vec<Result<Intertwiner>>> = std::sync::OnceLock::new();
    if !(4..=7).contains(&n) {
        return Err(SpinError::Unsupported(format!("no torus lift from dimension {n}")));
    }
    CACHE.get_or_init(|| (4..=7).map(Intertwiner::new).collect())[n - 4].as_ref().map_err(Clone::clone)
}

/// Lift a spinor of an n-dimensional algebra (n = 4..7) to a positive spinor in dimension 8.
pub fn lift_spinor(eta: &Spinor, n: usize) -> Result<Spinor> {
    intertwiner(n)?.lift(eta)
}

/// `Omega_{ijkl} = -<e_i e_j e_k e_l eta, eta>` for a unit positive spinor.
pub fn spin7_form(eta8: &Spinor, rep8: &CliffordRep) -> Result<Form> {
    if rep8.n() != 8 || eta8.len() != rep8.spinor_dim() {
        return Err(SpinError::DimensionMismatch { expected: 8, found: rep8.n() });
    }
    let norm = eta8.norm();
    if (norm - 1.0).abs() > UNIT_TOL {
        return Err(SpinError::NonUnitSpinor(norm));
    }
    let chir = (rep8.volume() * eta8 - eta8).amax();
    if chir > UNIT_TOL {
        return Err(SpinError::Unsupported(format!("spinor is not positive (chirality residual {chir:.3e})")));
    }
    let g: Vec<Spinor> = (1..=8).map(|i| rep8.gen(i) * eta8).collect();
    let mut terms = Vec::new();
    for l in 1..=8 {
        for k in 1..l {
            let kl = rep8.gen(k) * &g[l - 1];
            for j in 1..k {
                let jkl = rep8.gen(j) * &kl;
                for i in 1..j {
                    let v = -(rep8.gen(i) * &jkl).dot(eta8);
                    if v.abs() > 1e-14 {
                        terms.push((vec![i, j, k, l], v));
                    }
                }
            }
        }
    }
    Form::from_terms(8, 4, terms)
}

/// `d Omega = tau_1 ^ Omega + tau3_residual`.
#[derive(Debug, Clone, PartialEq)]
pub struct Spin7Data {
    pub omega4: Form,
    pub d_omega: Form,
    pub tau1: Form,
    pub tau3_residual: Form,
    /// `|*(d Omega) ^ Omega|`, zero exactly when balanced.
    pub star_d_wedge: f64,
    pub balanced: bool,
    pub parallel: bool,
}

pub fn spin7_torsion(alg8: &MetricLieAlgebra, omega4: &Form) -> Result<Spin7Data> {
    if alg8.dim() != 8 || omega4.dim() != 8 {
        return Err(SpinError::DimensionMismatch { expected: 8, found: alg8.dim() });
    }
    let d_omega = alg8.d(omega4);
    let keys = basis_masks(8, 5);
    let cols: Vec<_> = (1..=8).map(|i| coords(&(&Form::basis(8, &[i]).expect("index") ^ omega4), &keys)).collect();
    let a = DMatrix::from_columns(&cols);
    let gram = a.transpose() * &a;
    let chol = gram
        .cholesky()
        .ok_or_else(|| SpinError::Numerical("e^i ^ Omega are linearly dependent; not a Spin(7) form".into()))?;
    let y = coords(&d_omega, &keys);
    let c = chol.solve(&(a.transpose() * &y));
    let tau1 = Form::one_form(c.as_slice()).pruned(0.0);
    let tau3_residual = from_coords(8, 5, &keys, &(y - &a * &c)).pruned(0.0);
    let star_d_wedge = (&d_omega.hodge_star(Orientation::Positive) ^ omega4).norm();
    let scale = alg8.scale().max(1.0);
    Ok(Spin7Data {
        omega4: omega4.clone(),
        balanced: tau1.norm() <= BALANCED_TOL * scale,
        parallel: d_omega.norm() <= BALANCED_TOL * scale,
        d_omega,
        tau1,
        tau3_residual,
        star_d_wedge,
    })
}
