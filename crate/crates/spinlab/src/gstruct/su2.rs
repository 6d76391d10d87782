use nalgebra::{DMatrix, DVector};

use crate::clifford::{CliffordRep, QuaternionicOps, Spinor};
use crate::error::{Result, SpinError};
use crate::forms::Form;

/// Signs in `omega_k(X, Y) = eps_k <X j_k eta, Y eta>`.
pub const EPSILON: [f64; 3] = [1.0, -1.0, -1.0];

const UNIT_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct SU2Structure {
    pub spinor: Spinor,
    pub alpha: Form,
    pub omega: [Form; 3],
    /// Reeb vector, the metric dual of alpha.
    pub reeb: DVector<f64>,
    /// Orthonormal basis of ker(alpha) as columns (5 x 4), with (xi, R) positively oriented.
    pub xi: DMatrix<f64>,
    /// `J_k` on ker(alpha) in the `xi` basis: `J_k f_a = sum_b j[k][(b, a)] f_b`.
    pub j: [DMatrix<f64>; 3],
}

pub(crate) fn check_unit(eta: &Spinor) -> Result<()> {
    let n = eta.norm();
    if (n - 1.0).abs() > UNIT_TOL {
        return Err(SpinError::NonUnitSpinor(n));
    }
    Ok(())
}

/// Orthonormal completion of a unit vector, oriented so that `det[F | r] > 0`.
pub(crate) fn complement_basis(r: &DVector<f64>) -> DMatrix<f64> {
    let n = r.len();
    let mut m = DMatrix::zeros(n, n + 1);
    m.set_column(0, r);
    for i in 0..n {
        m[(i, i + 1)] = 1.0;
    }
    let q = m.qr().q();
    let mut f = q.columns(1, n - 1).into_owned();
    let mut full = f.clone().insert_column(n - 1, 0.0);
    full.set_column(n - 1, r);
    if full.determinant() < 0.0 {
        let last = -f.column(n - 2);
        f.set_column(n - 2, &last);
    }
    f
}

pub fn su2_from_spinor(eta: &Spinor, rep5: &CliffordRep, ops: &QuaternionicOps) -> Result<SU2Structure> {
    if rep5.n() != 5 || eta.len() != rep5.spinor_dim() {
        return Err(SpinError::DimensionMismatch { expected: 5, found: rep5.n() });
    }
    check_unit(eta)?;
    let g: Vec<Spinor> = (1..=5).map(|i| rep5.gen(i) * eta).collect();
    let j1eta = &ops.j1 * eta;
    let a: Vec<f64> = g.iter().map(|gi| -gi.dot(&j1eta)).collect();
    let alpha = Form::one_form(&a);
    let reeb = DVector::from_vec(a);
    let omega: [Form; 3] = std::array::from_fn(|k| {
        let jeta = ops.j(k + 1) * eta;
        let mut terms = Vec::new();
        for x in 1..=5 {
            let xj = rep5.gen(x) * &jeta;
            for y in x + 1..=5 {
                terms.push((vec![x, y], EPSILON[k] * xj.dot(&g[y - 1])));
            }
        }
        Form::from_terms(5, 2, terms).expect("valid indices")
    });
    let xi = complement_basis(&reeb);
    let xv: Vec<Spinor> = (0..4).map(|c| rep5.vector(xi.column(c).as_slice()) * eta).collect();
    let j = std::array::from_fn(|k| {
        let jk = ops.j(k + 1);
        DMatrix::from_fn(4, 4, |b, a| (jk * &xv[a]).dot(&xv[b]))
    });
    Ok(SU2Structure { spinor: eta.clone(), alpha, omega, reeb, xi, j })
}

impl SU2Structure {
    /// Basis 1-forms `f^a` of ker(alpha)^*.
    pub fn xi_forms(&self) -> [Form; 4] {
        std::array::from_fn(|a| Form::one_form(self.xi.column(a).as_slice()))
    }

    /// 2-form on R^5 given by a bilinear form on ker(alpha) in `xi` coordinates.
    pub fn xi_two_form(&self, bil: impl Fn(&DVector<f64>, &DVector<f64>) -> f64) -> Form {
        let ft = self.xi.transpose();
        let mut terms = Vec::new();
        for a in 1..=5 {
            for b in a + 1..=5 {
                terms.push((vec![a, b], bil(&ft.column(a - 1).into_owned(), &ft.column(b - 1).into_owned())));
            }
        }
        Form::from_terms(5, 2, terms).expect("valid indices")
    }

    /// Max violation of `omega_i ^ omega_j = 0`, `omega_i^2 = omega_j^2`.
    pub fn compatibility_residual(&self) -> f64 {
        let mut r: f64 = 0.0;
        let sq0 = &self.omega[0] ^ &self.omega[0];
        for i in 0..3 {
            for j in i + 1..3 {
                r = r.max((&self.omega[i] ^ &self.omega[j]).norm());
            }
            r = r.max((&(&self.omega[i] ^ &self.omega[i]) - &sq0).norm());
        }
        r
    }

    /// Coefficient of `e^{12345}` in `alpha ^ omega_1^2`.
    pub fn volume_coefficient(&self) -> f64 {
        (&self.alpha ^ &(&self.omega[0] ^ &self.omega[0])).coeff(&[1, 2, 3, 4, 5])
    }

    /// Max of `|J_k^2 + I|`, `|J_1 J_2 - J_3|`.
    pub fn j_residual(&self) -> f64 {
        let id = DMatrix::<f64>::identity(4, 4);
        let mut r = (&self.j[0] * &self.j[1] - &self.j[2]).amax();
        for jk in &self.j {
            r = r.max((jk * jk + &id).amax());
        }
        r
    }

    /// Max of `|omega_k eta + 2 eps_k j_k eta|` and `|alpha eta + j_1 eta|`.
    pub fn spinor_identity_residual(&self, rep5: &CliffordRep, ops: &QuaternionicOps) -> Result<f64> {
        let eta = &self.spinor;
        let mut r = (self.alpha.clifford_apply(rep5, eta)? + &ops.j1 * eta).amax();
        for k in 0..3 {
            let lhs = self.omega[k].clifford_apply(rep5, eta)?;
            r = r.max((lhs + ops.j(k + 1) * eta * (2.0 * EPSILON[k])).amax());
        }
        Ok(r)
    }
}
