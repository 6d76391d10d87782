//! Dirac operator on invariant spinors as a finite matrix.
//!
//! `DiracMatrix` stores `4 D` (or `16 D^2` when `squared`), so kernels and
//! eigenvalue ratios never depend on the scale factor.

use nalgebra::{DMatrix, SymmetricEigen};
use serde::Serialize;

use crate::algebra::{Derivation, MetricLieAlgebra, JACOBI_TOL};
use crate::clifford::{CliffordRep, Spinor};
use crate::error::{Result, SpinError};
use crate::forms::Form;

pub const DEFAULT_KERNEL_TOL: f64 = 1e-9;

const SYMMETRY_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DiracSource {
    General,
    Nilpotent,
    Rank1,
    SquaredFormula,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiracMatrix {
    matrix: DMatrix<f64>,
    squared: bool,
    source: DiracSource,
}

impl DiracMatrix {
    pub fn new(matrix: DMatrix<f64>, squared: bool, source: DiracSource) -> Self {
        DiracMatrix { matrix, squared, source }
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.matrix
    }

    pub fn squared(&self) -> bool {
        self.squared
    }

    pub fn source(&self) -> DiracSource {
        self.source
    }

    pub fn size(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn apply(&self, phi: &Spinor) -> Spinor {
        &self.matrix * phi
    }

    /// Largest entry of `M - M^T`.
    pub fn asymmetry(&self) -> f64 {
        (&self.matrix - self.matrix.transpose()).amax()
    }

    pub fn is_symmetric(&self) -> bool {
        self.asymmetry() <= SYMMETRY_TOL * (1.0 + self.matrix.amax())
    }

    /// Spectral norm.
    pub fn norm(&self) -> f64 {
        if self.matrix.is_empty() {
            return 0.0;
        }
        self.matrix.clone().svd(false, false).singular_values.max()
    }

    /// `(4 D)^2 = 16 D^2`.
    pub fn square(&self) -> Result<DiracMatrix> {
        if self.squared {
            return Err(SpinError::Unsupported("matrix is already squared".into()));
        }
        Ok(DiracMatrix { matrix: &self.matrix * &self.matrix, squared: true, source: self.source })
    }
}

fn check_dims(alg: &MetricLieAlgebra, rep: &CliffordRep) -> Result<()> {
    if alg.dim() != rep.n() {
        return Err(SpinError::DimensionMismatch { expected: alg.dim(), found: rep.n() });
    }
    Ok(())
}

fn e(n: usize, i: usize) -> Form {
    Form::basis(n, &[i]).expect("frame index in range")
}

/// `4 D = -sum_i (e^i ^ de^i + i(e_i) de^i)` acting by Clifford multiplication.
pub fn assemble_dirac(alg: &MetricLieAlgebra, rep: &CliffordRep) -> Result<DiracMatrix> {
    check_dims(alg, rep)?;
    let n = alg.dim();
    let mut total = Form::zero(n, 3);
    let mut contr = Form::zero(n, 1);
    for i in 1..=n {
        total = &total + &(&e(n, i) ^ alg.de(i));
        contr = &contr + &alg.de(i).contract(i)?;
    }
    let m = -(total.clifford_matrix(rep)? + contr.clifford_matrix(rep)?);
    Ok(DiracMatrix::new(m, false, DiracSource::General))
}

/// Nilpotent frame: `4 D = -sum_i e^i ^ de^i`, symmetric.
pub fn assemble_dirac_nilpotent(alg: &MetricLieAlgebra, rep: &CliffordRep) -> Result<DiracMatrix> {
    check_dims(alg, rep)?;
    if !alg.is_nilpotent_frame() {
        return Err(SpinError::NotNilpotent);
    }
    let n = alg.dim();
    let mut total = Form::zero(n, 3);
    for i in 1..=n {
        total = &total + &(&e(n, i) ^ alg.de(i));
    }
    Ok(DiracMatrix::new(-total.clifford_matrix(rep)?, false, DiracSource::Nilpotent))
}

/// Rank-one extension by a derivation, with `e^0` as the last frame index:
/// `4 D = -sum_i (e^i ^ de^i + i(e_i)de^i + e^0 ^ e^i ^ D(e^i)) - tr(D) e^0`.
pub fn assemble_dirac_rank1(n_alg: &MetricLieAlgebra, d: &Derivation, rep: &CliffordRep) -> Result<DiracMatrix> {
    if !n_alg.is_nilpotent_frame() {
        return Err(SpinError::NotNilpotent);
    }
    let n = n_alg.dim();
    if rep.n() != n + 1 {
        return Err(SpinError::DimensionMismatch { expected: n + 1, found: rep.n() });
    }
    let r = d.residual(n_alg);
    if r > JACOBI_TOL * (1.0 + n_alg.scale()) * (1.0 + d.matrix().amax()) {
        return Err(SpinError::NotDerivation(r));
    }
    let big = n + 1;
    let e0 = e(big, big);
    let mut three = Form::zero(big, 3);
    let mut one = Form::zero(big, 1);
    for i in 1..=n {
        let de = crate::algebra::embed(n_alg.de(i), big);
        let ei = e(big, i);
        three = &three + &(&ei ^ &de);
        one = &one + &de.contract(i)?;
        let di = crate::algebra::embed(&d.image(i), big);
        three = &three + &(&(&e0 ^ &ei) ^ &di);
    }
    let m = -(three.clifford_matrix(rep)? + one.clifford_matrix(rep)?) - rep.gen(big) * d.trace();
    Ok(DiracMatrix::new(m, false, DiracSource::Rank1))
}

/// `16 D^2 = sum_i -(de^i)^2 + sum_{i<j} (e^{ij} de^i de^j - de^j de^i e^{ij})` (nilpotent frame).
pub fn assemble_dirac_squared(alg: &MetricLieAlgebra, rep: &CliffordRep) -> Result<DiracMatrix> {
    check_dims(alg, rep)?;
    if !alg.is_nilpotent_frame() {
        return Err(SpinError::NotNilpotent);
    }
    let n = alg.dim();
    let a: Vec<DMatrix<f64>> = alg.differentials().iter().map(|f| f.clifford_matrix(rep)).collect::<Result<_>>()?;
    let sd = rep.spinor_dim();
    let mut m = DMatrix::zeros(sd, sd);
    for ai in &a {
        m -= ai * ai;
    }
    for i in 0..n {
        for j in i + 1..n {
            let eij = rep.gens()[i].clone() * &rep.gens()[j];
            m += &eij * &a[i] * &a[j] - &a[j] * &a[i] * &eij;
        }
    }
    Ok(DiracMatrix::new(m, true, DiracSource::SquaredFormula))
}

/// `(mu, F)` with `16 D^2 = mu + F` as Clifford action, `mu = sum |de^i|^2` (nilpotent frame).
pub fn square_four_form(alg: &MetricLieAlgebra) -> Result<(f64, Form)> {
    if !alg.is_nilpotent_frame() {
        return Err(SpinError::NotNilpotent);
    }
    let n = alg.dim();
    let mu: f64 = alg.differentials().iter().map(Form::norm_sq).sum();
    let mut f = Form::zero(n, 4);
    for i in 1..=n {
        f = &f - &(alg.de(i) ^ alg.de(i));
    }
    for i in 1..=n {
        let dei = alg.de(i);
        for j in i + 1..=n {
            let cij = alg.de(j).contract(i)?;
            let ej = e(n, j);
            f = &f - &(&(&(dei ^ &cij) ^ &ej) * 2.0);
            let rest = alg.de(j) - &(&e(n, i) ^ &cij);
            let eij = &e(n, i) ^ &ej;
            for k in 1..i {
                let t = &(&dei.contract(k)? ^ &rest.contract(k)?) ^ &eij;
                f = &f + &(&t * 2.0);
            }
        }
    }
    Ok((mu, f.pruned(0.0)))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectrumReport {
    /// Ascending eigenvalues, or ascending singular values when `singular` is set.
    pub eigenvalues: Vec<f64>,
    pub singular: bool,
    #[serde(skip)]
    pub kernel_basis: Vec<Spinor>,
    pub kernel_dim: usize,
    /// Relative tolerance; the absolute threshold is `tol * norm`.
    pub tol: f64,
    pub norm: f64,
}

impl SpectrumReport {
    pub fn min_abs(&self) -> f64 {
        self.eigenvalues.iter().map(|v| v.abs()).fold(f64::INFINITY, f64::min)
    }
}

fn check_finite(m: &DMatrix<f64>) -> Result<()> {
    if m.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(SpinError::Numerical("matrix has non-finite entries".into()))
    }
}

fn symmetric_report(m: &DiracMatrix, tol: f64) -> SpectrumReport {
    let sym = (m.matrix() + m.matrix().transpose()) * 0.5;
    let eig = SymmetricEigen::new(sym);
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let norm = eig.eigenvalues.amax();
    let thr = tol * norm;
    let eigenvalues: Vec<f64> = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let kernel_basis: Vec<Spinor> = order
        .iter()
        .filter(|&&k| eig.eigenvalues[k].abs() <= thr)
        .map(|&k| eig.eigenvectors.column(k).into_owned())
        .collect();
    SpectrumReport { eigenvalues, singular: false, kernel_dim: kernel_basis.len(), kernel_basis, tol, norm }
}

fn singular_report(m: &DiracMatrix, tol: f64) -> Result<SpectrumReport> {
    let svd = m.matrix().clone().svd(false, true);
    let v_t = svd.v_t.ok_or_else(|| SpinError::Numerical("SVD did not return right singular vectors".into()))?;
    let s = &svd.singular_values;
    let norm = s.max();
    let thr = tol * norm;
    let mut order: Vec<usize> = (0..s.len()).collect();
    order.sort_by(|&a, &b| s[a].total_cmp(&s[b]));
    let kernel_basis: Vec<Spinor> =
        order.iter().filter(|&&k| s[k] <= thr).map(|&k| v_t.row(k).transpose().into_owned()).collect();
    Ok(SpectrumReport {
        eigenvalues: order.iter().map(|&k| s[k]).collect(),
        singular: true,
        kernel_dim: kernel_basis.len(),
        kernel_basis,
        tol,
        norm,
    })
}

/// Kernel with a tolerance relative to the spectral norm. Symmetric matrices use an
/// eigendecomposition, others an SVD. A zero matrix has full kernel.
pub fn kernel(m: &DiracMatrix, tol: f64) -> Result<SpectrumReport> {
    if !(tol > 0.0) {
        return Err(SpinError::Unsupported(format!("kernel tolerance must be positive, got {tol}")));
    }
    check_finite(m.matrix())?;
    if m.is_symmetric() {
        Ok(symmetric_report(m, tol))
    } else {
        singular_report(m, tol)
    }
}

/// Sorted eigenvalues of a symmetric Dirac matrix (kernel at the default tolerance).
pub fn spectrum(m: &DiracMatrix) -> Result<SpectrumReport> {
    check_finite(m.matrix())?;
    if !m.is_symmetric() {
        return Err(SpinError::Unsupported(format!(
            "spectrum needs a symmetric matrix (asymmetry {:.3e}); use kernel() for singular values",
            m.asymmetry()
        )));
    }
    Ok(symmetric_report(m, DEFAULT_KERNEL_TOL))
}

/// Smallest singular value.
pub fn min_singular_value(m: &DiracMatrix) -> f64 {
    m.matrix().clone().svd(false, false).singular_values.min()
}

/// Kernel dimension of the operator for `alg` in the standard representation of its dimension.
pub fn kernel_dim(alg: &MetricLieAlgebra, tol: f64) -> Result<usize> {
    let rep = crate::clifford::rep(alg.dim())?;
    Ok(kernel(&assemble_dirac(alg, &rep)?, tol)?.kernel_dim)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{family, parse_salamon, Bindings};
    use crate::clifford::rep;
    use std::collections::BTreeMap;

    fn alg(s: &str) -> MetricLieAlgebra {
        parse_salamon(s, &BTreeMap::new()).unwrap()
    }

    fn bind(pairs: &[(&str, f64)]) -> Bindings {
        pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect()
    }

    #[test]
    fn abelian_is_zero() {
        let a = MetricLieAlgebra::abelian(5);
        let m = assemble_dirac(&a, &rep(5).unwrap()).unwrap();
        assert_eq!(m.matrix().amax(), 0.0);
        let k = kernel(&m, DEFAULT_KERNEL_TOL).unwrap();
        assert_eq!(k.kernel_dim, 8);
        assert!(spectrum(&m).unwrap().eigenvalues.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn l3a1_is_minus_e124() {
        let a = family("L3+A1").unwrap().instantiate(&bind(&[("mu12", 1.5)])).unwrap();
        let r = rep(4).unwrap();
        let m = assemble_dirac(&a, &r).unwrap();
        let e124 = Form::basis(4, &[1, 2, 4]).unwrap().clifford_matrix(&r).unwrap();
        assert!((m.matrix() + e124 * 1.5).amax() < 1e-14);
        assert_eq!(kernel(&m, DEFAULT_KERNEL_TOL).unwrap().kernel_dim, 0);
    }

    #[test]
    fn heisenberg_padded_symmetric() {
        let a = alg("(0,0,12,0,0)");
        let m = assemble_dirac(&a, &rep(5).unwrap()).unwrap();
        assert!(m.matrix().amax() > 0.0);
        assert!(m.asymmetry() < 1e-14);
    }

    #[test]
    fn n56_expansion() {
        let a = alg("(0,0,0,0,12+34)");
        let r = rep(5).unwrap();
        let m = assemble_dirac_nilpotent(&a, &r).unwrap();
        let f = Form::from_terms(5, 3, vec![(vec![1, 2, 5], 1.0), (vec![3, 4, 5], 1.0)]).unwrap();
        assert!((m.matrix() + f.clifford_matrix(&r).unwrap()).amax() < 1e-14);
    }

    #[test]
    fn n56_kernels() {
        let f = family("N5,6").unwrap();
        let m = |a: f64, b: f64| {
            let alg = f.instantiate(&bind(&[("mu12", a), ("mu34", b)])).unwrap();
            kernel(&assemble_dirac(&alg, &rep(5).unwrap()).unwrap(), DEFAULT_KERNEL_TOL).unwrap()
        };
        let k = m(1.0, -1.0);
        assert_eq!(k.kernel_dim, 4);
        assert_eq!(m(1.0, 2.0).kernel_dim, 0);
        // orthonormal kernel vectors
        for (i, u) in k.kernel_basis.iter().enumerate() {
            for (j, w) in k.kernel_basis.iter().enumerate() {
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((u.dot(w) - expect).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn l4_square_is_scalar() {
        let b = bind(&[("mu12", 0.7), ("l12", -1.3), ("mu13", 1.1)]);
        let a = family("L4").unwrap().instantiate(&b).unwrap();
        let r = rep(4).unwrap();
        let sq = assemble_dirac_squared(&a, &r).unwrap();
        let c = 0.7f64.powi(2) + 1.1f64.powi(2) + 1.3f64.powi(2);
        assert!((sq.matrix() - DMatrix::identity(8, 8) * c).amax() < 1e-12);
        let direct = assemble_dirac(&a, &r).unwrap().square().unwrap();
        assert!((sq.matrix() - direct.matrix()).amax() < 1e-12);
    }

    #[test]
    fn four_form_square_matches() {
        let b = bind(&[("mu12", 0.7), ("l12", -1.3), ("l13", 0.4), ("mu14", 1.1), ("mu23", -0.6)]);
        let a = family("N5,4").unwrap().instantiate(&b).unwrap();
        let r = rep(5).unwrap();
        let (mu, f) = square_four_form(&a).unwrap();
        let lhs = assemble_dirac(&a, &r).unwrap().square().unwrap();
        let rhs = DMatrix::identity(8, 8) * mu + f.clifford_matrix(&r).unwrap();
        assert!((lhs.matrix() - rhs).amax() < 1e-12);
    }

    #[test]
    fn rank1_matches_extension() {
        let h = alg("(0,0,12)");
        let d = Derivation::new(&h, DMatrix::from_row_slice(3, 3, &[1.0, 0.0, 0.0, 0.0, 2.0, 0.0, 0.0, 0.0, 3.0])).unwrap();
        let r4 = rep(4).unwrap();
        let m1 = assemble_dirac_rank1(&h, &d, &r4).unwrap();
        let g = crate::algebra::rank1_extension(&h, &d).unwrap();
        let m2 = assemble_dirac(&g, &r4).unwrap();
        assert!((m1.matrix() - m2.matrix()).amax() < 1e-12);
        let z = assemble_dirac_rank1(&h, &Derivation::zero(3), &r4).unwrap();
        let ds = assemble_dirac(&h.direct_sum_abelian(1), &r4).unwrap();
        assert!((z.matrix() - ds.matrix()).amax() < 1e-14);
        assert!(kernel(&m1, DEFAULT_KERNEL_TOL).unwrap().eigenvalues.len() == 8);
    }

    #[test]
    fn non_nilpotent_rejected() {
        let a = alg("(0,0,13)");
        assert!(matches!(assemble_dirac_nilpotent(&a, &rep(3).unwrap()), Err(SpinError::NotNilpotent)));
        assert!(assemble_dirac(&a, &rep(3).unwrap()).is_ok());
    }

    #[test]
    fn dimension_mismatch() {
        let a = alg("(0,0,12)");
        assert!(matches!(assemble_dirac(&a, &rep(4).unwrap()), Err(SpinError::DimensionMismatch { .. })));
    }
}
