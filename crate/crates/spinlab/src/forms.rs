//! Exterior algebra over R^n with a fixed orthonormal coframe.
//!
//! Basis blades are stored as bitmasks: bit `i-1` set means `e^i` is a factor.
//! Indices in the public API are 1-based.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, BitXor, Mul, Neg, Sub};

use nalgebra::{DMatrix, DVector};

use crate::clifford::CliffordRep;
use crate::error::{Result, SpinError};

pub const MAX_DIM: usize = 16;

/// Orientation of the coframe `(e^1, ..., e^n)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
pub enum Orientation {
    #[default]
    Positive,
    Negative,
}

impl Orientation {
    pub fn sign(self) -> f64 {
        match self {
            Orientation::Positive => 1.0,
            Orientation::Negative => -1.0,
        }
    }

    pub fn from_sign(s: i32) -> Option<Self> {
        match s {
            1 => Some(Orientation::Positive),
            -1 => Some(Orientation::Negative),
            _ => None,
        }
    }
}

/// Homogeneous exterior form.
#[derive(Debug, Clone, PartialEq)]
pub struct Form {
    dim: usize,
    degree: usize,
    terms: BTreeMap<u32, f64>,
}

fn mask_of(dim: usize, idx: &[usize]) -> Result<(u32, f64)> {
    let mut mask = 0u32;
    let mut sign = 1.0;
    for &i in idx {
        if i == 0 || i > dim {
            return Err(SpinError::IndexOutOfRange { index: i, dim });
        }
        let bit = 1u32 << (i - 1);
        if mask & bit != 0 {
            return Ok((0, 0.0));
        }
        // moving e^i left past the factors already present with larger index
        if (mask >> i).count_ones() % 2 == 1 {
            sign = -sign;
        }
        mask |= bit;
    }
    Ok((mask, sign))
}

/// Sign of `e^A ^ e^B` relative to the sorted blade (masks assumed disjoint).
fn wedge_sign(a: u32, b: u32) -> f64 {
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

pub fn mask_indices(mask: u32) -> Vec<usize> {
    let mut out = Vec::with_capacity(mask.count_ones() as usize);
    let mut rest = mask;
    while rest != 0 {
        out.push(rest.trailing_zeros() as usize + 1);
        rest &= rest - 1;
    }
    out
}

impl Form {
    pub fn zero(dim: usize, degree: usize) -> Self {
        assert!(dim <= MAX_DIM, "dimension {dim} exceeds {MAX_DIM}");
        Form { dim, degree, terms: BTreeMap::new() }
    }

    pub fn scalar(dim: usize, c: f64) -> Self {
        let mut f = Form::zero(dim, 0);
        f.push_mask(0, c);
        f
    }

    /// Basis form `e^{i1...ik}` (indices in any order, sign applied).
    pub fn basis(dim: usize, idx: &[usize]) -> Result<Self> {
        Form::from_terms(dim, idx.len(), [(idx.to_vec(), 1.0)])
    }

    /// Build a form from `(indices, coefficient)` pairs; unsorted tuples are reordered with sign.
    pub fn from_terms<I>(dim: usize, degree: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec<usize>, f64)>,
    {
        if dim > MAX_DIM {
            return Err(SpinError::InvalidForm(format!("dimension {dim} exceeds {MAX_DIM}")));
        }
        let mut f = Form::zero(dim, degree);
        for (idx, c) in terms {
            if idx.len() != degree {
                return Err(SpinError::InvalidForm(format!(
                    "term of degree {} in a form of degree {degree}",
                    idx.len()
                )));
            }
            if !c.is_finite() {
                return Err(SpinError::InvalidForm("non-finite coefficient".into()));
            }
            let (mask, s) = mask_of(dim, &idx)?;
            if s != 0.0 {
                f.push_mask(mask, s * c);
            }
        }
        Ok(f)
    }

    /// 1-form with coefficients `v[i-1]` on `e^i`.
    pub fn one_form(v: &[f64]) -> Self {
        let mut f = Form::zero(v.len(), 1);
        for (i, &c) in v.iter().enumerate() {
            f.push_mask(1 << i, c);
        }
        f
    }

    pub(crate) fn push_mask(&mut self, mask: u32, c: f64) {
        if c == 0.0 {
            return;
        }
        let e = self.terms.entry(mask).or_insert(0.0);
        *e += c;
        if *e == 0.0 {
            self.terms.remove(&mask);
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub(crate) fn masks(&self) -> impl Iterator<Item = (u32, f64)> + '_ {
        self.terms.iter().map(|(&m, &c)| (m, c))
    }

    /// Terms as `(indices, coefficient)`, lexicographic in the index tuple.
    pub fn terms(&self) -> Vec<(Vec<usize>, f64)> {
        let mut v: Vec<_> = self.terms.iter().map(|(&m, &c)| (mask_indices(m), c)).collect();
        v.sort_by(|a, b| a.0.cmp(&b.0));
        v
    }

    pub fn coeff(&self, idx: &[usize]) -> f64 {
        match mask_of(self.dim, idx) {
            Ok((m, s)) if s != 0.0 => s * self.terms.get(&m).copied().unwrap_or(0.0),
            _ => 0.0,
        }
    }

    /// Coefficient vector of a 1-form.
    pub fn to_vector(&self) -> Vec<f64> {
        assert_eq!(self.degree, 1, "to_vector needs a 1-form");
        (1..=self.dim).map(|i| self.terms.get(&(1 << (i - 1))).copied().unwrap_or(0.0)).collect()
    }

    pub fn norm_sq(&self) -> f64 {
        self.terms.values().map(|c| c * c).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.terms.values().fold(0.0, |m, c| m.max(c.abs()))
    }

    pub fn inner(&self, other: &Form) -> f64 {
        self.terms.iter().map(|(m, c)| c * other.terms.get(m).copied().unwrap_or(0.0)).sum()
    }

    pub fn scale(&self, s: f64) -> Form {
        let mut f = Form::zero(self.dim, self.degree);
        if s != 0.0 {
            for (&m, &c) in &self.terms {
                f.terms.insert(m, c * s);
            }
        }
        f
    }

    /// Drop coefficients with `|c| <= tol`.
    pub fn pruned(&self, tol: f64) -> Form {
        let mut f = self.clone();
        f.terms.retain(|_, c| c.abs() > tol);
        f
    }

    fn check_same(&self, other: &Form) -> Result<()> {
        if self.dim != other.dim {
            return Err(SpinError::DimensionMismatch { expected: self.dim, found: other.dim });
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Form) -> Result<Form> {
        self.check_same(other)?;
        let degree = if self.is_empty() { other.degree } else { self.degree };
        if !self.is_empty() && !other.is_empty() && self.degree != other.degree {
            return Err(SpinError::InvalidForm(format!(
                "adding forms of degree {} and {}",
                self.degree, other.degree
            )));
        }
        let mut f = self.clone();
        f.degree = degree;
        for (&m, &c) in &other.terms {
            f.push_mask(m, c);
        }
        Ok(f)
    }

    pub fn wedge(&self, other: &Form) -> Result<Form> {
        self.check_same(other)?;
        let degree = self.degree + other.degree;
        let mut f = Form::zero(self.dim, degree.min(self.dim + 1));
        if degree > self.dim {
            return Ok(f);
        }
        for (&a, &ca) in &self.terms {
            for (&b, &cb) in &other.terms {
                if a & b == 0 {
                    f.push_mask(a | b, wedge_sign(a, b) * ca * cb);
                }
            }
        }
        Ok(f)
    }

    /// Interior product with the i-th frame vector.
    pub fn contract(&self, i: usize) -> Result<Form> {
        if i == 0 || i > self.dim {
            return Err(SpinError::IndexOutOfRange { index: i, dim: self.dim });
        }
        let mut f = Form::zero(self.dim, self.degree.saturating_sub(1));
        if self.degree == 0 {
            return Ok(f);
        }
        let bit = 1u32 << (i - 1);
        for (&m, &c) in &self.terms {
            if m & bit != 0 {
                let below = (m & (bit - 1)).count_ones();
                let s = if below.is_multiple_of(2) { 1.0 } else { -1.0 };
                f.push_mask(m & !bit, s * c);
            }
        }
        Ok(f)
    }

    /// Interior product with an arbitrary vector.
    pub fn contract_vector(&self, v: &[f64]) -> Result<Form> {
        if v.len() != self.dim {
            return Err(SpinError::DimensionMismatch { expected: self.dim, found: v.len() });
        }
        let mut f = Form::zero(self.dim, self.degree.saturating_sub(1));
        for (i, &x) in v.iter().enumerate() {
            if x != 0.0 {
                f = f.try_add(&self.contract(i + 1)?.scale(x))?;
            }
        }
        Ok(f)
    }

    /// Hodge star with `b ^ *b = |b|^2 * sign * e^{1..n}`.
    pub fn hodge_star(&self, o: Orientation) -> Form {
        let full = (1u32 << self.dim) - 1;
        let mut f = Form::zero(self.dim, self.dim - self.degree.min(self.dim));
        for (&m, &c) in &self.terms {
            let comp = full & !m;
            f.push_mask(comp, o.sign() * wedge_sign(m, comp) * c);
        }
        f
    }

    /// Evaluate a 2-form on a pair of vectors.
    pub fn eval2(&self, x: &[f64], y: &[f64]) -> f64 {
        assert_eq!(self.degree, 2, "eval2 needs a 2-form");
        self.terms
            .iter()
            .map(|(&m, &c)| {
                let ix = mask_indices(m);
                let (a, b) = (ix[0] - 1, ix[1] - 1);
                c * (x[a] * y[b] - x[b] * y[a])
            })
            .sum()
    }

    /// Matrix of the Clifford action: a basis blade acts as the ordered product of generators.
    pub fn clifford_matrix(&self, rep: &CliffordRep) -> Result<DMatrix<f64>> {
        if rep.n() != self.dim {
            return Err(SpinError::DimensionMismatch { expected: rep.n(), found: self.dim });
        }
        let n = rep.spinor_dim();
        let mut out = DMatrix::zeros(n, n);
        for (&m, &c) in &self.terms {
            let mut p = DMatrix::identity(n, n);
            for i in mask_indices(m) {
                p *= rep.gen(i);
            }
            out += p * c;
        }
        Ok(out)
    }

    pub fn clifford_apply(&self, rep: &CliffordRep, phi: &DVector<f64>) -> Result<DVector<f64>> {
        if phi.len() != rep.spinor_dim() {
            return Err(SpinError::DimensionMismatch { expected: rep.spinor_dim(), found: phi.len() });
        }
        Ok(self.clifford_matrix(rep)? * phi)
    }

    /// Render as `c*e125` terms; exact unit coefficients print without the factor.
    pub fn render(&self) -> String {
        let terms = self.terms();
        if terms.is_empty() {
            return "0".into();
        }
        let mut s = String::new();
        for (k, (idx, c)) in terms.iter().enumerate() {
            let neg = *c < 0.0;
            if k == 0 {
                if neg {
                    s.push('-');
                }
            } else {
                s.push_str(if neg { " - " } else { " + " });
            }
            let a = c.abs();
            if a != 1.0 || idx.is_empty() {
                s.push_str(&format!("{a}"));
                if !idx.is_empty() {
                    s.push('*');
                }
            }
            if !idx.is_empty() {
                s.push('e');
                for i in idx {
                    s.push_str(&i.to_string());
                }
            }
        }
        s
    }
}

impl fmt::Display for Form {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

impl Add for &Form {
    type Output = Form;
    /// Panics on dimension or degree mismatch.
    fn add(self, rhs: &Form) -> Form {
        self.try_add(rhs).expect("form addition")
    }
}

impl Sub for &Form {
    type Output = Form;
    fn sub(self, rhs: &Form) -> Form {
        self.try_add(&rhs.scale(-1.0)).expect("form subtraction")
    }
}

impl Neg for &Form {
    type Output = Form;
    fn neg(self) -> Form {
        self.scale(-1.0)
    }
}

impl Mul<f64> for &Form {
    type Output = Form;
    fn mul(self, rhs: f64) -> Form {
        self.scale(rhs)
    }
}

/// `&a ^ &b` is the wedge product; panics on dimension mismatch.
impl BitXor for &Form {
    type Output = Form;
    fn bitxor(self, rhs: &Form) -> Form {
        self.wedge(rhs).expect("wedge")
    }
}

/// `wedge(a, b)` as a free function.
pub fn wedge(a: &Form, b: &Form) -> Result<Form> {
    a.wedge(b)
}

pub fn contract(i: usize, a: &Form) -> Result<Form> {
    a.contract(i)
}

pub fn hodge_star(a: &Form, o: Orientation) -> Form {
    a.hodge_star(o)
}

pub fn clifford_action(a: &Form, rep: &CliffordRep, phi: &DVector<f64>) -> Result<DVector<f64>> {
    a.clifford_apply(rep, phi)
}

/// All strictly increasing k-tuples of 1..=n as masks, in lexicographic tuple order.
pub fn basis_masks(n: usize, k: usize) -> Vec<u32> {
    let mut out: Vec<u32> = (0u32..(1u32 << n)).filter(|m| m.count_ones() as usize == k).collect();
    out.sort_by_key(|&m| mask_indices(m));
    out
}

/// Coefficient vector of a k-form against `basis_masks(n, k)`.
pub fn coords(f: &Form, basis: &[u32]) -> DVector<f64> {
    DVector::from_iterator(basis.len(), basis.iter().map(|m| f.terms.get(m).copied().unwrap_or(0.0)))
}

pub fn from_coords(dim: usize, degree: usize, basis: &[u32], v: &DVector<f64>) -> Form {
    let mut f = Form::zero(dim, degree);
    for (m, c) in basis.iter().zip(v.iter()) {
        f.push_mask(*m, *c);
    }
    f
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(dim: usize, idx: &[usize]) -> Form {
        Form::basis(dim, idx).unwrap()
    }

    #[test]
    fn wedge_basis() {
        let w = &e(5, &[1]) ^ &e(5, &[2]);
        assert_eq!(w.terms(), vec![(vec![1, 2], 1.0)]);
        assert!((&e(5, &[1, 2]) ^ &e(5, &[1, 2])).is_empty());
        let w = &e(5, &[5]) ^ &(&e(5, &[1, 2]) + &e(5, &[3, 4]));
        assert_eq!(w.terms(), vec![(vec![1, 2, 5], 1.0), (vec![3, 4, 5], 1.0)]);
    }

    #[test]
    fn wedge_dim_mismatch() {
        assert!(e(4, &[1]).wedge(&e(5, &[2])).is_err());
    }

    #[test]
    fn unsorted_basis_sign() {
        assert_eq!(e(5, &[2, 1]).coeff(&[1, 2]), -1.0);
        assert_eq!(e(5, &[3, 1, 2]).coeff(&[1, 2, 3]), 1.0);
        assert_eq!(e(5, &[1, 2]).coeff(&[2, 1]), -1.0);
    }

    #[test]
    fn contraction() {
        assert_eq!(e(3, &[1, 2]).contract(1).unwrap().terms(), vec![(vec![2], 1.0)]);
        assert!(e(3, &[1, 2]).contract(3).unwrap().is_empty());
        let f = &e(3, &[1, 2]) + &e(3, &[2, 3]);
        assert_eq!(f.contract(2).unwrap().terms(), vec![(vec![1], -1.0), (vec![3], 1.0)]);
        assert!(f.contract(4).is_err());
    }

    #[test]
    fn hodge_examples() {
        let s = e(5, &[1, 2]).hodge_star(Orientation::Positive);
        assert_eq!(s.terms(), vec![(vec![3, 4, 5], 1.0)]);
        let s = e(5, &[1, 3]).hodge_star(Orientation::Positive);
        assert_eq!(s.terms(), vec![(vec![2, 4, 5], -1.0)]);
        let s = e(5, &[1, 3]).hodge_star(Orientation::Negative);
        assert_eq!(s.terms(), vec![(vec![2, 4, 5], 1.0)]);
    }

    #[test]
    fn hodge_defining_identity_exhaustive() {
        for n in 1..=8 {
            for k in 0..=n {
                for m in basis_masks(n, k) {
                    let b = from_coords(n, k, &[m], &DVector::from_element(1, 1.0));
                    for o in [Orientation::Positive, Orientation::Negative] {
                        let w = &b ^ &b.hodge_star(o);
                        let full = (1u32 << n) - 1;
                        assert_eq!(w.len(), 1);
                        assert_eq!(w.terms.get(&full).copied(), Some(o.sign()));
                        let ss = b.hodge_star(o).hodge_star(o);
                        let s = if (k * (n - k)) % 2 == 0 { 1.0 } else { -1.0 };
                        assert_eq!(ss, b.scale(s));
                    }
                }
            }
        }
    }

    #[test]
    fn scalar_and_top_degree() {
        let one = Form::scalar(3, 2.0);
        let w = &one ^ &e(3, &[1, 3]);
        assert_eq!(w.terms(), vec![(vec![1, 3], 2.0)]);
        assert!((&e(3, &[1, 2]) ^ &e(3, &[3, 1])).is_empty());
        assert_eq!((&e(2, &[1, 2]) ^ &e(2, &[1])).degree(), 3);
    }

    #[test]
    fn render_forms() {
        let f = Form::from_terms(5, 2, [(vec![1, 2], 1.0), (vec![3, 4], -2.5)]).unwrap();
        assert_eq!(f.render(), "e12 - 2.5*e34");
        assert_eq!(Form::zero(3, 2).render(), "0");
    }

    #[test]
    fn eval_two_form() {
        let f = e(3, &[1, 2]);
        assert_eq!(f.eval2(&[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0]), 1.0);
        assert_eq!(f.eval2(&[0.0, 1.0, 0.0], &[1.0, 0.0, 0.0]), -1.0);
    }
}
