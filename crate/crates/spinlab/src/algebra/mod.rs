//! Metric Lie algebras given by structure equations over an orthonormal coframe.

mod catalog;
mod parse;

pub use catalog::{catalog, family, Bindings, FamilyGroup, ParamKind, Parameter, ParameterFamily, NONZERO_MARGIN};
pub use parse::{eval_expr, parse_algebra_file, parse_input, parse_salamon, parse_salamon_unchecked, RawAlgebra};

use nalgebra::DMatrix;

use crate::error::{Result, SpinError};
use crate::forms::{mask_indices, Form, Orientation};

pub const JACOBI_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct MetricLieAlgebra {
    dim: usize,
    differentials: Vec<Form>,
    orientation: Orientation,
    name: Option<String>,
}

/// Extend `images` (image of each `e^i`) to a derivation of the exterior algebra.
/// `odd` selects the graded sign `(-1)^p` needed for the exterior differential.
fn extend_derivation(a: &Form, images: &[Form], odd: bool) -> Form {
    let dim = a.dim();
    let img_deg = images.first().map_or(1, |f| f.degree());
    let mut out = Form::zero(dim, a.degree() + img_deg - 1);
    for (mask, c) in a.masks() {
        let idx = mask_indices(mask);
        for (p, &i) in idx.iter().enumerate() {
            let bit = 1u32 << (i - 1);
            let before = mask & (bit - 1);
            let after = mask & !(bit | (bit - 1));
            let s0 = if odd && p % 2 == 1 { -c } else { c };
            for (b, cb) in images[i - 1].masks() {
                if b & (before | after) != 0 {
                    continue;
                }
                let s = sign(before, b) * sign(before | b, after);
                out.push_mask(before | b | after, s * s0 * cb);
            }
        }
    }
    out
}

fn sign(a: u32, b: u32) -> f64 {
    let mut swaps = 0u32;
    let mut rest = b;
    while rest != 0 {
        let j = rest.trailing_zeros();
        swaps += (a >> j).count_ones();
        rest &= rest - 1;
    }
    if swaps.is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

impl MetricLieAlgebra {
    /// Build and validate the Jacobi identity `d(de^i) = 0`.
    pub fn new(differentials: Vec<Form>, orientation: Orientation) -> Result<Self> {
        let alg = Self::new_unchecked(differentials, orientation)?;
        alg.validate()?;
        Ok(alg)
    }

    /// Build without checking the Jacobi identity (shapes are still checked).
    pub fn new_unchecked(differentials: Vec<Form>, orientation: Orientation) -> Result<Self> {
        let dim = differentials.len();
        for f in &differentials {
            if f.dim() != dim {
                return Err(SpinError::DimensionMismatch { expected: dim, found: f.dim() });
            }
            if !f.is_empty() && f.degree() != 2 {
                return Err(SpinError::InvalidForm(format!("de^i must be a 2-form, got degree {}", f.degree())));
            }
        }
        let differentials = differentials
            .into_iter()
            .map(|f| if f.is_empty() { Form::zero(dim, 2) } else { f })
            .collect();
        Ok(MetricLieAlgebra { dim, differentials, orientation, name: None })
    }

    pub fn abelian(dim: usize) -> Self {
        MetricLieAlgebra {
            dim,
            differentials: vec![Form::zero(dim, 2); dim],
            orientation: Orientation::Positive,
            name: None,
        }
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into());
        self
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn orientation(&self) -> Orientation {
        self.orientation
    }

    pub fn differentials(&self) -> &[Form] {
        &self.differentials
    }

    /// `de^i`, 1-based.
    pub fn de(&self, i: usize) -> &Form {
        &self.differentials[i - 1]
    }

    /// Largest absolute structure constant.
    pub fn scale(&self) -> f64 {
        self.differentials.iter().map(Form::max_abs).fold(0.0, f64::max)
    }

    /// Norms of `d(de^i)` for each i.
    pub fn jacobi_residuals(&self) -> Vec<f64> {
        self.differentials.iter().map(|f| self.d(f).norm()).collect()
    }

    pub fn validate(&self) -> Result<()> {
        let tol = JACOBI_TOL * self.scale().max(1.0).powi(2);
        for (i, r) in self.jacobi_residuals().into_iter().enumerate() {
            if r > tol {
                return Err(SpinError::Jacobi { index: i + 1, residual: r });
            }
        }
        Ok(())
    }

    pub fn is_abelian(&self) -> bool {
        self.differentials.iter().all(Form::is_empty)
    }

    /// Every `de^k` involves only `e^{ij}` with `i, j < k`.
    pub fn is_nilpotent_frame(&self) -> bool {
        self.differentials.iter().enumerate().all(|(k, f)| f.masks().all(|(m, _)| m >> k == 0))
    }

    /// Chevalley-Eilenberg differential (infallible when dimensions match).
    pub fn d(&self, a: &Form) -> Form {
        if a.degree() == 0 || a.is_empty() {
            return Form::zero(self.dim, a.degree() + 1);
        }
        extend_derivation(a, &self.differentials, true)
    }

    pub fn cev_differential(&self, a: &Form) -> Result<Form> {
        if a.dim() != self.dim {
            return Err(SpinError::DimensionMismatch { expected: self.dim, found: a.dim() });
        }
        Ok(self.d(a))
    }

    /// Direct sum with `k` closed coframe vectors appended.
    pub fn direct_sum_abelian(&self, k: usize) -> MetricLieAlgebra {
        let n = self.dim + k;
        let mut diffs: Vec<Form> = self.differentials.iter().map(|f| embed(f, n)).collect();
        diffs.extend(std::iter::repeat_n(Form::zero(n, 2), k));
        MetricLieAlgebra { dim: n, differentials: diffs, orientation: self.orientation, name: None }
    }

    /// Structure equations in compact notation with numeric coefficients.
    pub fn render_salamon(&self) -> String {
        let entries: Vec<String> = self
            .differentials
            .iter()
            .map(|f| {
                let terms = f.terms();
                if terms.is_empty() || self.dim > 9 {
                    return "0".to_string();
                }
                let mut s = String::new();
                for (k, (idx, c)) in terms.iter().enumerate() {
                    let pair = format!("{}{}", idx[0], idx[1]);
                    let neg = *c < 0.0;
                    if neg {
                        s.push('-');
                    } else if k > 0 {
                        s.push('+');
                    }
                    if c.abs() == 1.0 {
                        s.push_str(&pair);
                    } else {
                        s.push_str(&format!("{:?}*{pair}", c.abs()));
                    }
                }
                s
            })
            .collect();
        format!("({})", entries.join(","))
    }
}

/// Re-embed a form into a larger dimension (same indices).
pub fn embed(f: &Form, dim: usize) -> Form {
    assert!(dim >= f.dim(), "embedding into a smaller dimension");
    let mut g = Form::zero(dim, f.degree());
    for (m, c) in f.masks() {
        g.push_mask(m, c);
    }
    g
}

pub fn cev_differential(alg: &MetricLieAlgebra, a: &Form) -> Result<Form> {
    alg.cev_differential(a)
}

/// A derivation of a nilpotent algebra acting on its coframe:
/// `D(e^i) = sum_j matrix[(j-1, i-1)] e^j`.
#[derive(Debug, Clone, PartialEq)]
pub struct Derivation {
    matrix: DMatrix<f64>,
}

impl Derivation {
    pub fn new(alg: &MetricLieAlgebra, matrix: DMatrix<f64>) -> Result<Self> {
        let n = alg.dim();
        if matrix.nrows() != n || matrix.ncols() != n {
            return Err(SpinError::DimensionMismatch { expected: n, found: matrix.nrows() });
        }
        let d = Derivation { matrix };
        let r = d.residual(alg);
        let tol = JACOBI_TOL * (1.0 + alg.scale()) * (1.0 + d.matrix.amax());
        if r > tol {
            return Err(SpinError::NotDerivation(r));
        }
        Ok(d)
    }

    pub fn zero(n: usize) -> Self {
        Derivation { matrix: DMatrix::zeros(n, n) }
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace()
    }

    fn images(&self) -> Vec<Form> {
        let n = self.matrix.nrows();
        (0..n).map(|i| Form::one_form(&self.matrix.column(i).iter().copied().collect::<Vec<_>>())).collect()
    }

    /// Image of `e^i` (1-based).
    pub fn image(&self, i: usize) -> Form {
        Form::one_form(&self.matrix.column(i - 1).iter().copied().collect::<Vec<_>>())
    }

    /// Action on forms as an even derivation.
    pub fn apply(&self, a: &Form) -> Form {
        if a.degree() == 0 || a.is_empty() {
            return Form::zero(a.dim(), a.degree());
        }
        extend_derivation(a, &self.images(), false)
    }

    /// `max_i |d(D e^i) - D(de^i)|`.
    pub fn residual(&self, alg: &MetricLieAlgebra) -> f64 {
        (1..=alg.dim())
            .map(|i| (&alg.d(&self.image(i)) - &self.apply(alg.de(i))).norm())
            .fold(0.0, f64::max)
    }
}

/// Solvable extension `<e_0> + n` with `de^i += D(e^i) ^ e^0` and `e^0` appended last.
pub fn rank1_extension(n_alg: &MetricLieAlgebra, d: &Derivation) -> Result<MetricLieAlgebra> {
    if !n_alg.is_nilpotent_frame() {
        return Err(SpinError::NotNilpotent);
    }
    let r = d.residual(n_alg);
    if r > JACOBI_TOL * (1.0 + n_alg.scale()) * (1.0 + d.matrix.amax()) {
        return Err(SpinError::NotDerivation(r));
    }
    let n = n_alg.dim() + 1;
    let e0 = Form::basis(n, &[n])?;
    let mut diffs = Vec::with_capacity(n);
    for i in 1..=n_alg.dim() {
        let base = embed(n_alg.de(i), n);
        let extra = &embed(&d.image(i), n) ^ &e0;
        diffs.push(&base + &extra);
    }
    diffs.push(Form::zero(n, 2));
    MetricLieAlgebra::new(diffs, n_alg.orientation())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(n: usize, idx: &[usize]) -> Form {
        Form::basis(n, idx).unwrap()
    }

    fn heisenberg() -> MetricLieAlgebra {
        MetricLieAlgebra::new(vec![Form::zero(3, 2), Form::zero(3, 2), e(3, &[1, 2])], Orientation::Positive).unwrap()
    }

    #[test]
    fn heisenberg_differential() {
        let h = heisenberg();
        assert_eq!(h.d(&e(3, &[3])), e(3, &[1, 2]));
        assert!(h.is_nilpotent_frame());
        assert!(h.d(&e(3, &[1, 2])).is_empty());
    }

    #[test]
    fn leibniz_example() {
        // de5 = e12 + e34: d(e5 ^ e12) = e1234
        let n = 5;
        let mut diffs = vec![Form::zero(n, 2); n];
        diffs[4] = &e(n, &[1, 2]) + &e(n, &[3, 4]);
        let alg = MetricLieAlgebra::new(diffs, Orientation::Positive).unwrap();
        let got = alg.d(&e(n, &[1, 2, 5]));
        // e125 = e12 ^ e5: d = e12 ^ de5 = e1234
        assert_eq!(got, e(n, &[1, 2, 3, 4]));
        let got = alg.d(&(&e(n, &[5]) ^ &e(n, &[1, 2])));
        assert_eq!(got, e(n, &[1, 2, 3, 4]));
    }

    #[test]
    fn jacobi_failure_detected() {
        let n = 4;
        // de3 = e24, de4 = e13: d(de3) = -e2 ^ e13 = e123
        let diffs = vec![Form::zero(n, 2), Form::zero(n, 2), e(n, &[2, 4]), e(n, &[1, 3])];
        match MetricLieAlgebra::new(diffs, Orientation::Positive) {
            Err(SpinError::Jacobi { index, residual }) => {
                assert_eq!(index, 3);
                assert!((residual - 1.0).abs() < 1e-12);
            }
            other => panic!("expected Jacobi failure, got {other:?}"),
        }
    }

    #[test]
    fn abelian_is_closed() {
        let a = MetricLieAlgebra::abelian(4);
        assert!(a.d(&e(4, &[1, 2, 3])).is_empty());
        assert!(a.is_abelian());
    }

    #[test]
    fn derivation_extension() {
        let h = heisenberg();
        let d = Derivation::new(&h, DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![1.0, 1.0, 2.0]))).unwrap();
        assert_eq!(d.trace(), 4.0);
        let g = rank1_extension(&h, &d).unwrap();
        assert_eq!(g.dim(), 4);
        let expected = &e(4, &[1, 2]) + &(&e(4, &[3]) ^ &e(4, &[4])).scale(2.0);
        assert_eq!(g.de(3), &expected);
        assert_eq!(g.de(1), &e(4, &[1, 4]));
        assert!(g.de(4).is_empty());
        let bad = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![1.0, 1.0, 1.0]));
        assert!(matches!(Derivation::new(&h, bad), Err(SpinError::NotDerivation(_))));
    }

    #[test]
    fn zero_derivation_gives_direct_sum() {
        let h = heisenberg();
        let g = rank1_extension(&h, &Derivation::zero(3)).unwrap();
        assert_eq!(g, h.direct_sum_abelian(1));
    }

    #[test]
    fn nilpotent_flag() {
        let n = 3;
        let alg = MetricLieAlgebra::new_unchecked(vec![e(n, &[2, 3]), Form::zero(n, 2), Form::zero(n, 2)], Orientation::Positive)
            .unwrap();
        assert!(!alg.is_nilpotent_frame());
    }
}
