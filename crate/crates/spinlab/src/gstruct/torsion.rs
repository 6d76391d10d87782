use nalgebra::{DMatrix, DVector, SymmetricEigen};

use super::connection::ConnectionComponents;
use super::su2::{SU2Structure, EPSILON};
use crate::algebra::MetricLieAlgebra;
use crate::error::{Result, SpinError};
use crate::forms::{basis_masks, coords, from_coords, Form};

const RESIDUAL_TOL: f64 = 1e-9;

/// Intrinsic torsion of an SU(2) structure:
/// `d alpha = sum_l tau0[l] omega_l + alpha ^ tau1[3] + tau2[3]`,
/// `d omega_k = sum_l tau0_kl[k][l] alpha ^ omega_l + tau1[k] ^ omega_k + alpha ^ tau2[k]`.
/// Index 3 of `tau1`/`tau2` holds the components of `d alpha`.
#[derive(Debug, Clone, PartialEq)]
pub struct SU2Torsion {
    pub tau0: [f64; 3],
    pub tau0_kl: [[f64; 3]; 3],
    pub tau1: [Form; 4],
    pub tau2: [Form; 4],
    /// Largest reconstruction error of `d alpha`, `d omega_k`.
    pub residual: f64,
}

/// Three orthonormal 2-forms on ker(alpha) orthogonal to the `omega_k`.
fn su2_basis(s: &SU2Structure) -> Vec<Form> {
    let b2 = basis_masks(5, 2);
    let f = s.xi_forms();
    let mut cols = Vec::new();
    for a in 0..4 {
        for b in a + 1..4 {
            cols.push(coords(&(&f[a] ^ &f[b]), &b2));
        }
    }
    let mx = DMatrix::from_columns(&cols);
    let om = DMatrix::from_columns(&s.omega.iter().map(|o| coords(o, &b2)).collect::<Vec<_>>());
    let gram = om.transpose() * &om;
    let inv = gram.try_inverse().expect("omega_k are linearly independent");
    let p = DMatrix::<f64>::identity(10, 10) - &om * inv * om.transpose();
    let pm = p * mx;
    // the projected span is 3-dimensional with unit eigenvalues
    let eig = SymmetricEigen::new(&pm * pm.transpose());
    (0..10)
        .filter(|&k| eig.eigenvalues[k] > 0.5)
        .map(|k| from_coords(5, 2, &b2, &eig.eigenvectors.column(k).into_owned()))
        .collect()
}

fn solve(target: &Form, basis: &[Form], degree: usize) -> Result<(DVector<f64>, f64)> {
    let keys = basis_masks(5, degree);
    let a = DMatrix::from_columns(&basis.iter().map(|f| coords(f, &keys)).collect::<Vec<_>>());
    let y = coords(target, &keys);
    let c = a
        .clone()
        .lu()
        .solve(&y)
        .ok_or_else(|| SpinError::Numerical("torsion decomposition basis is degenerate".into()))?;
    let r = (&a * &c - y).amax();
    Ok((c, r))
}

fn combo(forms: &[Form], c: &[f64]) -> Form {
    let mut out = Form::zero(forms[0].dim(), forms[0].degree());
    for (f, &x) in forms.iter().zip(c) {
        out = &out + &(f * x);
    }
    out.pruned(0.0)
}

/// Decompose `d alpha` and `d omega_k` on the type decomposition of 2- and 3-forms.
pub fn su2_torsion(alg: &MetricLieAlgebra, s: &SU2Structure) -> Result<SU2Torsion> {
    if alg.dim() != 5 {
        return Err(SpinError::DimensionMismatch { expected: 5, found: alg.dim() });
    }
    let f = s.xi_forms();
    let su = su2_basis(s);
    let alpha = &s.alpha;

    let mut basis: Vec<Form> = s.omega.to_vec();
    basis.extend(f.iter().map(|fa| alpha ^ fa));
    basis.extend(su.iter().cloned());
    let (c, mut residual) = solve(&alg.d(alpha), &basis, 2)?;
    let tau0 = [c[0], c[1], c[2]];
    let tau1_4 = combo(&f, &c.as_slice()[3..7]);
    let tau2_4 = combo(&su, &c.as_slice()[7..10]);

    let mut tau0_kl = [[0.0; 3]; 3];
    let mut tau1: Vec<Form> = Vec::new();
    let mut tau2: Vec<Form> = Vec::new();
    for k in 0..3 {
        let mut basis: Vec<Form> = s.omega.iter().map(|o| alpha ^ o).collect();
        basis.extend(f.iter().map(|fa| fa ^ &s.omega[k]));
        basis.extend(su.iter().map(|x| alpha ^ x));
        let (c, r) = solve(&alg.d(&s.omega[k]), &basis, 3)?;
        residual = residual.max(r);
        tau0_kl[k] = [c[0], c[1], c[2]];
        tau1.push(combo(&f, &c.as_slice()[3..7]));
        tau2.push(combo(&su, &c.as_slice()[7..10]));
    }
    tau1.push(tau1_4);
    tau2.push(tau2_4);
    if residual > RESIDUAL_TOL * (1.0 + alg.scale()) {
        return Err(SpinError::Numerical(format!("torsion reconstruction residual {residual:.3e}")));
    }
    Ok(SU2Torsion {
        tau0,
        tau0_kl,
        tau1: tau1.try_into().expect("four components"),
        tau2: tau2.try_into().expect("four components"),
        residual,
    })
}

/// The same torsion computed from the connection components.
pub fn torsion_from_components(s: &SU2Structure, c: &ConnectionComponents) -> SU2Torsion {
    let (mu, lam, phi) = (c.mu, c.lambda, c.phi);
    let tau0 = [-4.0 * mu, 4.0 * lam[2], -4.0 * lam[1]];
    let t12 = 4.0 * lam[1] + 2.0 * phi[2];
    let t13 = 4.0 * lam[2] - 2.0 * phi[1];
    let t23 = 4.0 * mu - 2.0 * phi[0];
    let d = 4.0 * lam[0];
    let tau0_kl = [[d, t12, t13], [-t12, d, t23], [-t13, -t23, d]];
    let xi_one = |x: DVector<f64>| Form::one_form((&s.xi * x).as_slice()).pruned(0.0);
    let mut tau1: Vec<Form> = (0..3)
        .map(|k| {
            let mut acc = DVector::zeros(4);
            for l in (0..3).filter(|&l| l != k) {
                acc += s.j[l].transpose() * &c.theta[l] * EPSILON[l];
            }
            xi_one(acc * -2.0)
        })
        .collect();
    tau1.push(xi_one(s.j[0].transpose() * &c.v_xi * 2.0));
    // i(A) beta (X, Y) = beta(A X, Y)
    let i_omega = |a: &DMatrix<f64>, k: usize, scale: f64| {
        s.xi_two_form(|x, y| scale * (&s.j[k] * (a * x)).dot(y)).pruned(1e-15)
    };
    let tau2 = [
        s.xi_two_form(|x, y| 4.0 * (&c.s0 * x).dot(y)).pruned(1e-15),
        i_omega(&c.s_parts[2], 2, 4.0),
        i_omega(&c.s_parts[1], 1, -4.0),
        i_omega(&c.s_parts[0], 0, -4.0),
    ];
    SU2Torsion { tau0, tau0_kl, tau1: tau1.try_into().expect("four components"), tau2, residual: 0.0 }
}

impl SU2Torsion {
    /// Largest coefficient difference between two torsion decompositions.
    pub fn max_difference(&self, other: &SU2Torsion) -> f64 {
        let mut r: f64 = 0.0;
        for l in 0..3 {
            r = r.max((self.tau0[l] - other.tau0[l]).abs());
            for k in 0..3 {
                r = r.max((self.tau0_kl[k][l] - other.tau0_kl[k][l]).abs());
            }
        }
        for k in 0..4 {
            r = r.max((&self.tau1[k] - &other.tau1[k]).max_abs());
            r = r.max((&self.tau2[k] - &other.tau2[k]).max_abs());
        }
        r
    }

    /// Components whose norm exceeds `tol`, named `tau0^l`, `tau0^{kl}`, `tau1^k`, `tau2^k`.
    pub fn nonzero_components(&self, tol: f64) -> Vec<String> {
        let mut out = Vec::new();
        for l in 0..3 {
            if self.tau0[l].abs() > tol {
                out.push(format!("tau0^{}", l + 1));
            }
        }
        for k in 0..3 {
            for l in 0..3 {
                if self.tau0_kl[k][l].abs() > tol {
                    out.push(format!("tau0^{}{}", k + 1, l + 1));
                }
            }
        }
        for k in 0..4 {
            if self.tau1[k].norm() > tol {
                out.push(format!("tau1^{}", k + 1));
            }
        }
        for k in 0..4 {
            if self.tau2[k].norm() > tol {
                out.push(format!("tau2^{}", k + 1));
            }
        }
        out
    }
}

/// `d omega_1 = 0` and `d(alpha ^ omega_k) = 0` for k = 2, 3.
pub fn is_hypo(alg: &MetricLieAlgebra, s: &SU2Structure, tol: f64) -> bool {
    hypo_residual(alg, s) <= tol * alg.scale().max(1.0)
}

pub fn hypo_residual(alg: &MetricLieAlgebra, s: &SU2Structure) -> f64 {
    let a = alg.d(&s.omega[0]).norm();
    let b = alg.d(&(&s.alpha ^ &s.omega[1])).norm();
    let c = alg.d(&(&s.alpha ^ &s.omega[2])).norm();
    a.max(b).max(c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{catalog, FamilyGroup};
    use crate::clifford::{quaternionic_ops_dim5, rep};
    use crate::gstruct::{connection_components, su2_from_spinor};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn direct_matches_formulas() {
        let r = rep(5).unwrap();
        let ops = quaternionic_ops_dim5();
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for f in catalog().iter().filter(|f| f.group() == FamilyGroup::Dim5) {
            for _ in 0..3 {
                let alg = f.instantiate(&f.sample(&mut rng, 2.0)).unwrap();
                let eta = DVector::from_fn(8, |_, _| rng.gen_range(-1.0..1.0)).normalize();
                let s = su2_from_spinor(&eta, &r, &ops).unwrap();
                let direct = su2_torsion(&alg, &s).unwrap();
                assert!(direct.residual < 1e-12);
                let c = connection_components(&alg, &r, &ops, &s).unwrap();
                let formula = torsion_from_components(&s, &c);
                assert!(direct.max_difference(&formula) < 1e-10, "{}: {}", f.name(), direct.max_difference(&formula));
                for k in 0..3 {
                    assert!((direct.tau0_kl[k][k] - direct.tau0_kl[0][0]).abs() < 1e-10);
                    for l in 0..3 {
                        if k != l {
                            assert!((direct.tau0_kl[k][l] + direct.tau0_kl[l][k]).abs() < 1e-10);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn abelian_is_torsion_free_and_hypo() {
        let r = rep(5).unwrap();
        let ops = quaternionic_ops_dim5();
        let alg = MetricLieAlgebra::abelian(5);
        let s = su2_from_spinor(&crate::clifford::unit_spinor(8, 3), &r, &ops).unwrap();
        let t = su2_torsion(&alg, &s).unwrap();
        assert!(t.nonzero_components(1e-12).is_empty());
        assert!(is_hypo(&alg, &s, 1e-10));
    }
}
