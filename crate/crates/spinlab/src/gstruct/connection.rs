use nalgebra::{DMatrix, DVector};

use super::su2::{check_unit, SU2Structure};
use crate::algebra::MetricLieAlgebra;
use crate::clifford::{CliffordRep, QuaternionicOps, Spinor};
use crate::error::{Result, SpinError};

/// `de^k(e_a, e_b)`, 1-based.
fn de_eval(alg: &MetricLieAlgebra, k: usize, a: usize, b: usize) -> f64 {
    match a.cmp(&b) {
        std::cmp::Ordering::Less => alg.de(k).coeff(&[a, b]),
        std::cmp::Ordering::Greater => -alg.de(k).coeff(&[b, a]),
        std::cmp::Ordering::Equal => 0.0,
    }
}

/// Levi-Civita coefficients `g(nabla_{e_i} e_j, e_k)`, flattened as `[(i * n + j) * n + k]` (0-based).
pub fn levi_civita(alg: &MetricLieAlgebra) -> Vec<f64> {
    let n = alg.dim();
    let mut g = vec![0.0; n * n * n];
    for i in 1..=n {
        for j in 1..=n {
            for k in 1..=n {
                g[((i - 1) * n + j - 1) * n + k - 1] =
                    0.5 * (de_eval(alg, j, i, k) + de_eval(alg, i, j, k) - de_eval(alg, k, i, j));
            }
        }
    }
    g
}

fn nabla_all(alg: &MetricLieAlgebra, rep: &CliffordRep, eta: &Spinor) -> Result<Vec<Spinor>> {
    if alg.dim() != rep.n() {
        return Err(SpinError::DimensionMismatch { expected: alg.dim(), found: rep.n() });
    }
    if eta.len() != rep.spinor_dim() {
        return Err(SpinError::DimensionMismatch { expected: rep.spinor_dim(), found: eta.len() });
    }
    let n = alg.dim();
    let gamma = levi_civita(alg);
    let pairs: Vec<Vec<Spinor>> =
        (0..n).map(|j| (0..n).map(|k| if j < k { rep.gens()[j].clone() * (&rep.gens()[k] * eta) } else { DVector::zeros(0) }).collect()).collect();
    Ok((0..n)
        .map(|i| {
            let mut s = DVector::zeros(eta.len());
            for j in 0..n {
                for k in j + 1..n {
                    let c = gamma[(i * n + j) * n + k];
                    if c != 0.0 {
                        s += &pairs[j][k] * (0.5 * c);
                    }
                }
            }
            s
        })
        .collect())
}

/// `nabla_{e_i} eta = 1/2 sum_{j<k} g(nabla_{e_i} e_j, e_k) e_j e_k eta` for an invariant spinor (1-based `i`).
pub fn covariant_derivative_spinor(alg: &MetricLieAlgebra, rep: &CliffordRep, eta: &Spinor, i: usize) -> Result<Spinor> {
    if i == 0 || i > alg.dim() {
        return Err(SpinError::IndexOutOfRange { index: i, dim: alg.dim() });
    }
    Ok(nabla_all(alg, rep, eta)?.swap_remove(i - 1))
}

/// Components of `nabla eta` relative to an SU(2) structure, all in the `xi` basis.
#[derive(Debug, Clone, PartialEq)]
pub struct ConnectionComponents {
    /// `s[(b, a)] = <nabla_{f_a} eta, f_b eta>`.
    pub s: DMatrix<f64>,
    pub mu: f64,
    pub lambda: [f64; 3],
    /// Parts of the symmetric traceless piece of `s` anticommuting with two of the `J_l`.
    pub s_parts: [DMatrix<f64>; 3],
    /// Skew part orthogonal to the `J_l`.
    pub s0: DMatrix<f64>,
    pub v_xi: DVector<f64>,
    pub theta: [DVector<f64>; 3],
    pub phi: [f64; 3],
    /// Max deviation of the reconstructed `nabla_{e_i} eta`.
    pub residual: f64,
}

impl ConnectionComponents {
    /// Max entry of `S - (mu I + sum S_k + sum lambda_l J_l + S0)`.
    pub fn decomposition_residual(&self, s: &SU2Structure) -> f64 {
        let mut rec = DMatrix::<f64>::identity(4, 4) * self.mu + &self.s0;
        for k in 0..3 {
            rec += &self.s_parts[k] + &s.j[k] * self.lambda[k];
        }
        (&self.s - rec).amax()
    }
}

pub fn connection_components(
    alg: &MetricLieAlgebra,
    rep5: &CliffordRep,
    ops: &QuaternionicOps,
    s: &SU2Structure,
) -> Result<ConnectionComponents> {
    let eta = &s.spinor;
    check_unit(eta)?;
    let nb = nabla_all(alg, rep5, eta)?;
    let nabla_x = |x: &DVector<f64>| nb.iter().zip(x.iter()).fold(DVector::zeros(eta.len()), |acc, (v, &c)| acc + v * c);
    let fcol: Vec<DVector<f64>> = (0..4).map(|a| s.xi.column(a).into_owned()).collect();
    let fe: Vec<Spinor> = fcol.iter().map(|f| rep5.vector(f.as_slice()) * eta).collect();
    let je: Vec<Spinor> = (1..=3).map(|l| ops.j(l) * eta).collect();
    let nf: Vec<Spinor> = fcol.iter().map(&nabla_x).collect();
    let nr = nabla_x(&s.reeb);

    let sm = DMatrix::from_fn(4, 4, |b, a| nf[a].dot(&fe[b]));
    let theta: [DVector<f64>; 3] = std::array::from_fn(|l| DVector::from_fn(4, |a, _| nf[a].dot(&je[l])));
    let v_xi = DVector::from_fn(4, |b, _| nr.dot(&fe[b]));
    let phi: [f64; 3] = std::array::from_fn(|l| nr.dot(&je[l]));

    let mut residual: f64 = 0.0;
    for i in 0..5 {
        let mut x = DVector::zeros(5);
        x[i] = 1.0;
        let xx = s.xi.transpose() * &x;
        let a = s.reeb.dot(&x);
        let mut rec = rep5.vector((&s.xi * (&sm * &xx)).as_slice()) * eta + rep5.vector((&s.xi * &v_xi).as_slice()) * eta * a;
        for l in 0..3 {
            rec += &je[l] * (theta[l].dot(&xx) + a * phi[l]);
        }
        residual = residual.max((rec - &nb[i]).amax());
    }
    if residual > 1e-8 * (1.0 + alg.scale()) {
        return Err(SpinError::Numerical(format!("connection components do not reconstruct nabla (residual {residual:.3e})")));
    }

    let mu = sm.trace() / 4.0;
    let lambda: [f64; 3] = std::array::from_fn(|l| sm.dot(&s.j[l]) / 4.0);
    let id = DMatrix::<f64>::identity(4, 4);
    let ssym = (&sm + sm.transpose()) * 0.5 - &id * mu;
    let sskew = (&sm - sm.transpose()) * 0.5;
    let conj = |l: usize, p: &DMatrix<f64>| -(&s.j[l] * p * &s.j[l]);
    let s_parts = std::array::from_fn(|k| {
        let mut p = ssym.clone();
        for l in 0..3 {
            let sign = if l == k { 1.0 } else { -1.0 };
            p = (&p + conj(l, &p) * sign) * 0.5;
        }
        p
    });
    let mut s0 = sskew;
    for l in 0..3 {
        s0 -= &s.j[l] * lambda[l];
    }
    Ok(ConnectionComponents { s: sm, mu, lambda, s_parts, s0, v_xi, theta, phi, residual })
}

/// `D eta` assembled from the connection components:
/// `(-4mu + phi_1) eta - 4 lambda_1 j_1 eta + (4 lambda_2 + phi_3) j_2 eta + (4 lambda_3 - phi_2) j_3 eta
///  + J_1(V + Theta_1) eta - J_2(Theta_2) eta - J_3(Theta_3) eta`.
/// Equals a quarter of the assembled `4 D` matrix applied to `eta`.
pub fn dirac_from_components(
    rep5: &CliffordRep,
    ops: &QuaternionicOps,
    s: &SU2Structure,
    c: &ConnectionComponents,
) -> Spinor {
    let eta = &s.spinor;
    let vec = |x: DVector<f64>| rep5.vector((&s.xi * x).as_slice()) * eta;
    eta * (-4.0 * c.mu + c.phi[0]) - &ops.j1 * eta * (4.0 * c.lambda[0])
        + &ops.j2 * eta * (4.0 * c.lambda[1] + c.phi[2])
        + &ops.j3 * eta * (4.0 * c.lambda[2] - c.phi[1])
        + vec(&s.j[0] * (&c.v_xi + &c.theta[0]))
        - vec(&s.j[1] * &c.theta[1])
        - vec(&s.j[2] * &c.theta[2])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{catalog, FamilyGroup};
    use crate::clifford::{quaternionic_ops_dim5, rep};
    use crate::dirac::assemble_dirac;
    use crate::gstruct::su2_from_spinor;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn abelian_nabla_vanishes() {
        let a = MetricLieAlgebra::abelian(5);
        let r = rep(5).unwrap();
        let eta = crate::clifford::unit_spinor(8, 1);
        for i in 1..=5 {
            assert_eq!(covariant_derivative_spinor(&a, &r, &eta, i).unwrap().amax(), 0.0);
        }
    }

    #[test]
    fn dirac_and_metric_compatibility() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for n in [4usize, 5, 6] {
            let r = rep(n).unwrap();
            for f in catalog().iter().filter(|f| f.dim() == n) {
                let alg = f.instantiate(&f.sample(&mut rng, 2.0)).unwrap();
                let eta = DVector::from_fn(8, |_, _| rng.gen_range(-1.0..1.0)).normalize();
                let mut sum = DVector::zeros(8);
                for i in 1..=n {
                    let nb = covariant_derivative_spinor(&alg, &r, &eta, i).unwrap();
                    assert!(nb.dot(&eta).abs() < 1e-12);
                    sum += r.gen(i) * nb;
                }
                let direct = assemble_dirac(&alg, &r).unwrap().apply(&eta) * 0.25;
                assert!((sum - direct).amax() < 1e-12, "{}", f.name());
            }
        }
    }

    #[test]
    fn components_reconstruct_and_give_dirac() {
        let r = rep(5).unwrap();
        let ops = quaternionic_ops_dim5();
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        for f in catalog().iter().filter(|f| f.group() == FamilyGroup::Dim5) {
            let alg = f.instantiate(&f.sample(&mut rng, 2.0)).unwrap();
            let eta = DVector::from_fn(8, |_, _| rng.gen_range(-1.0..1.0)).normalize();
            let s = su2_from_spinor(&eta, &r, &ops).unwrap();
            let c = connection_components(&alg, &r, &ops, &s).unwrap();
            assert!(c.residual < 1e-12);
            assert!(c.decomposition_residual(&s) < 1e-12);
            let d = dirac_from_components(&r, &ops, &s, &c);
            let direct = assemble_dirac(&alg, &r).unwrap().apply(&eta) * 0.25;
            assert!((d - direct).amax() < 1e-12, "{}", f.name());
        }
    }
}
