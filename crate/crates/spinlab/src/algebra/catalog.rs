//! Parameterised families of metric nilpotent Lie algebras in dimensions 4, 5 and 6.
//!
//! Templates use the compact notation with named coefficients. Parameters named `mu*`
//! must be nonzero, all others may vanish.

use std::collections::BTreeMap;
use std::sync::OnceLock;

use rand::Rng;

use super::parse::parse_salamon;
use super::MetricLieAlgebra;
use crate::error::{Result, SpinError};

pub type Bindings = BTreeMap<String, f64>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ParamKind {
    Nonzero,
    Free,
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct Parameter {
    pub name: String,
    pub kind: ParamKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum FamilyGroup {
    Dim4,
    Dim5,
    Dim6Decomposable,
    Dim6NonDecomposable,
    Abelian,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParameterFamily {
    name: String,
    dim: usize,
    group: FamilyGroup,
    template: String,
    params: Vec<Parameter>,
    constants: Bindings,
    /// Isomorphism type label in compact notation, kept as printed (not validated).
    structure: Option<String>,
    /// Row as it appears in the reference table when it differs from `template`.
    printed: Option<String>,
}

/// Nonzero margin used by [`ParameterFamily::sample`].
pub const NONZERO_MARGIN: f64 = 0.1;

impl ParameterFamily {
    fn new(name: &str, group: FamilyGroup, template: &str) -> Self {
        let params = template_identifiers(template)
            .into_iter()
            .filter(|p| p != "m" && p != "sqrt")
            .map(|name| {
                let kind = if name.starts_with("mu") { ParamKind::Nonzero } else { ParamKind::Free };
                Parameter { name, kind }
            })
            .collect();
        let dim = template.matches(',').count() + 1;
        ParameterFamily {
            name: name.to_string(),
            dim,
            group,
            template: template.to_string(),
            params,
            constants: Bindings::new(),
            structure: None,
            printed: None,
        }
    }

    fn structure(mut self, s: &str) -> Self {
        self.structure = Some(s.to_string());
        self
    }

    fn printed(mut self, s: &str) -> Self {
        self.printed = Some(s.to_string());
        self
    }

    fn constant(mut self, name: &str, v: f64) -> Self {
        self.constants.insert(name.to_string(), v);
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn group(&self) -> FamilyGroup {
        self.group
    }

    pub fn template(&self) -> &str {
        &self.template
    }

    pub fn params(&self) -> &[Parameter] {
        &self.params
    }

    pub fn structure_type(&self) -> Option<&str> {
        self.structure.as_deref()
    }

    pub fn printed_template(&self) -> Option<&str> {
        self.printed.as_deref()
    }

    pub fn constants(&self) -> &Bindings {
        &self.constants
    }

    fn full_bindings(&self, b: &Bindings) -> Result<Bindings> {
        let mut all = self.constants.clone();
        for p in &self.params {
            let v = *b.get(&p.name).ok_or_else(|| SpinError::UnboundParameter(p.name.clone()))?;
            if !v.is_finite() {
                return Err(SpinError::InvalidForm(format!("parameter {} is not finite", p.name)));
            }
            if p.kind == ParamKind::Nonzero && v == 0.0 {
                return Err(SpinError::ZeroParameter(p.name.clone()));
            }
            all.insert(p.name.clone(), v);
        }
        Ok(all)
    }

    /// Bind every parameter and validate the result.
    pub fn instantiate(&self, b: &Bindings) -> Result<MetricLieAlgebra> {
        Ok(parse_salamon(&self.template, &self.full_bindings(b)?)?.with_name(self.name.clone()))
    }

    /// Instantiate the row exactly as printed in the reference table (falls back to the template).
    pub fn instantiate_printed(&self, b: &Bindings) -> Result<MetricLieAlgebra> {
        let t = self.printed.as_deref().unwrap_or(&self.template);
        Ok(parse_salamon(t, &self.full_bindings(b)?)?.with_name(self.name.clone()))
    }

    /// All parameters set to 1.
    pub fn unit_bindings(&self) -> Bindings {
        self.params.iter().map(|p| (p.name.clone(), 1.0)).collect()
    }

    /// Uniform in `[-bound, bound]`, nonzero parameters resampled until `|v| > 0.1`.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R, bound: f64) -> Bindings {
        self.params
            .iter()
            .map(|p| {
                let v = loop {
                    let v = rng.gen_range(-bound..=bound);
                    if p.kind == ParamKind::Free || v.abs() > NONZERO_MARGIN {
                        break v;
                    }
                };
                (p.name.clone(), v)
            })
            .collect()
    }
}

fn template_identifiers(t: &str) -> Vec<String> {
    let mut out: Vec<String> = Vec::new();
    let b = t.as_bytes();
    let mut i = 0;
    while i < b.len() {
        if b[i].is_ascii_alphabetic() {
            let s = i;
            while i < b.len() && (b[i].is_ascii_alphanumeric() || b[i] == b'_') {
                i += 1;
            }
            let id = &t[s..i];
            if !out.iter().any(|o| o == id) {
                out.push(id.to_string());
            }
        } else {
            i += 1;
        }
    }
    out
}

/// Positive real root used by one of the non-decomposable rows.
fn n63_m() -> f64 {
    let c: f64 = 459.0 + 12.0 * 177f64.sqrt();
    let c3 = c.cbrt();
    3f64.sqrt() * (c3 * (c3 * c3 + 6.0 * c3 + 57.0)).sqrt() / (3.0 * c3)
}

fn build() -> Vec<ParameterFamily> {
    use FamilyGroup::*;
    let f = ParameterFamily::new;
    vec![
        f("L3+A1", Dim4, "(0,0,0,mu12*12)"),
        f("L4", Dim4, "(0,0,mu12*12,l12*12+mu13*13)"),
        f("L3+A2", Dim5, "(0,0,0,0,mu12*12)"),
        f("L4+A1", Dim5, "(0,0,0,mu12*12,l12*12+l13*13+mu14*14)"),
        f("N5,6", Dim5, "(0,0,0,0,mu12*12+mu34*34)"),
        f("N5,5", Dim5, "(0,0,0,mu12*12,mu13*13)"),
        f("N5,4", Dim5, "(0,0,0,mu12*12,l12*12+l13*13+mu14*14+mu23*23)"),
        f("N5,3", Dim5, "(0,0,mu12*12,l12_4*12+mu13*13,l12_5*12+mu23*23)"),
        f("N5,2", Dim5, "(0,0,mu12*12,l12_4*12+mu13*13,l12_5*12+l13*13+mu14*14)"),
        f("N5,1", Dim5, "(0,0,mu12*12,l12_4*12+mu13*13,l12_5*12+l13*13+mu14*14+mu23*23)"),
        f("L3+A3", Dim6Decomposable, "(0,0,0,0,0,mu12*12)"),
        f("L3+L3", Dim6Decomposable, "(0,0,0,0,mu12*12+l13_5*13,-l13_6*13-l23*23+mu34*34)"),
        f("L4+A2", Dim6Decomposable, "(0,0,0,0,mu12*12,l12*12+l13*13+mu15*15)"),
        f("N5,6+A1", Dim6Decomposable, "(0,0,0,0,0,mu12*12+mu34*34)"),
        f("N5,5+A1", Dim6Decomposable, "(0,0,0,0,mu12*12,mu13*13)"),
        f("N5,4+A1", Dim6Decomposable, "(0,0,0,0,mu12*12,l12*12+l13*13+l14*14+mu15*15+mu23*23)"),
        f("N5,3+A1", Dim6Decomposable, "(0,0,0,mu12*12,l12_5*12+l*23+mu14*14,l12_6*12+l*13+mu24*24)"),
        f("N5,2+A1", Dim6Decomposable, "(0,0,0,mu12*12,l12_5*12+l13*13+mu14*14,l12_6*12+l13*13+l14*14+mu15*15)"),
        f(
            "N5,1+A1",
            Dim6Decomposable,
            "(0,0,0,mu12*12,l12_5*12+mu14*l13_4*13+mu14*14,l12_6*12+l13_6*13+l14*14+mu15*15+mu24*l13*23+mu24*24)",
        ),
        f("N6,24", Dim6NonDecomposable, "(0,0,0,0,12,2*13+24)").structure("(0,0,0,0,12,13+24)"),
        f("N6,23", Dim6NonDecomposable, "(0,0,0,0,13-24,14+23)").structure("(0,0,0,0,13-24,14+23)"),
        f("N6,22", Dim6NonDecomposable, "(0,0,0,0,12,14+15+34)").structure("(0,0,0,0,12,15+34)"),
        f("N6,21", Dim6NonDecomposable, "(0,0,0,12,13,2*23)").structure("(0,0,0,12,13,23)"),
        f("N6,20", Dim6NonDecomposable, "(0,0,0,12,sqrt(2)*13,14)").structure("(0,0,0,12,13,14)"),
        f("N6,18", Dim6NonDecomposable, "(0,0,0,12,13,2*13+sqrt(3)*24+23)").structure("(0,0,0,12,13,24)"),
        f("N6,17", Dim6NonDecomposable, "(0,0,0,12,13,12+15+23+24)")
            .structure("(0,0,0,12,13,15+24)")
            .printed("(0,0,0,12,13,12+15+23+24+23)"),
        f("N6,16", Dim6NonDecomposable, "(0,0,0,12,13,-2*23+24-35)").structure("(0,0,0,12,13,24-35)"),
        f("N6,15", Dim6NonDecomposable, "(0,0,0,12,13,24+35)").structure("(0,0,0,12,13,24+35)"),
        f("N6,19", Dim6NonDecomposable, "(0,0,0,12,13,14+23+sqrt(2*(sqrt(2)-1))*12)").structure("(0,0,0,12,13,14+23)"),
        f("N6,12", Dim6NonDecomposable, "(0,0,0,12,14,23+24)").structure("(0,0,0,12,14,23+24)"),
        f("N6,13", Dim6NonDecomposable, "(0,0,0,12,14,13+24)").structure("(0,0,0,12,14,13+24)"),
        f("N6,14", Dim6NonDecomposable, "(0,0,0,sqrt(2)*12,1/sqrt(2)*14+23,13-1/sqrt(2)*24)")
            .structure("(0,0,0,12,14+23,13-24)")
            .printed("(0,0,0,1/sqrt(2)*12,sqrt(2)*14+23,13-sqrt(2)*24)"),
        f("N6,11", Dim6NonDecomposable, "(0,0,0,12,14,15+sqrt(2)*13+23)").structure("(0,0,0,12,14,15+23)"),
        f("N6,10", Dim6NonDecomposable, "(0,0,0,12,14-7/4*13,15+24-3/4*23+2*12)").structure("(0,0,0,12,14,15+23+24)"),
        f("N6,9", Dim6NonDecomposable, "(0,0,0,12,14+23,1/4*15-1/4*34)")
            .structure("(0,0,0,12,14+23,15-34)")
            .printed("(0,0,0,12,14+23,1/4*15+1/4*34)"),
        f("N6,8", Dim6NonDecomposable, "(0,0,12,13,23,14)").structure("(0,0,12,13,23,14)"),
        f("N6,6", Dim6NonDecomposable, "(0,0,12,13,23,14+25+12+sqrt(2)*23)")
            .structure("(0,0,12,13,23,14+25)")
            .printed("(0,0,12,13,23,14+24+12+sqrt(2)*23)"),
        f("N6,7", Dim6NonDecomposable, "(0,0,12,13,23,14-25-12+sqrt(2)*23)").structure("(0,0,12,13,23,14-25)"),
        f("N6,5", Dim6NonDecomposable, "(0,0,12,13,1/5*14+1/5*12,1/5*12+1/5*14+sqrt(46)/5*15)")
            .structure("(0,0,12,14,13,15)"),
        f("N6,4", Dim6NonDecomposable, "(0,0,12,13,14,15+23+12)").structure("(0,0,12,13,14,15+23)"),
        f("N6,2", Dim6NonDecomposable, "(0,0,12,13,14,25-34+sqrt(5)*12)").structure("(0,0,12,13,14,15-34)"),
        f("N6,3", Dim6NonDecomposable, "(0,0,12,13,1/m*14+1/m*23,m*15+24)")
            .structure("(0,0,12,13,14+23,15+24)")
            .constant("m", n63_m()),
        f("N6,1", Dim6NonDecomposable, "(0,0,12,13,14+23,25-34+(1+sqrt(5))*12)").structure("(0,0,12,13,14+23,15-34)"),
        f("A4", Abelian, "(0,0,0,0)"),
        f("A5", Abelian, "(0,0,0,0,0)"),
        f("A6", Abelian, "(0,0,0,0,0,0)"),
    ]
}

/// Every family, in table order.
pub fn catalog() -> &'static [ParameterFamily] {
    static CATALOG: OnceLock<Vec<ParameterFamily>> = OnceLock::new();
    CATALOG.get_or_init(build)
}

pub fn family(name: &str) -> Result<&'static ParameterFamily> {
    catalog()
        .iter()
        .find(|f| f.name.eq_ignore_ascii_case(name))
        .ok_or_else(|| SpinError::UnknownFamily(name.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn counts() {
        let c = catalog();
        let count = |g| c.iter().filter(|f| f.group() == g).count();
        assert_eq!(count(FamilyGroup::Dim4), 2);
        assert_eq!(count(FamilyGroup::Dim5), 8);
        assert_eq!(count(FamilyGroup::Dim6Decomposable), 9);
        assert_eq!(count(FamilyGroup::Dim6NonDecomposable), 24);
        assert_eq!(count(FamilyGroup::Abelian), 3);
    }

    #[test]
    fn parameter_kinds() {
        let f = family("N5,4").unwrap();
        let names: Vec<_> = f.params().iter().map(|p| (p.name.as_str(), p.kind)).collect();
        assert_eq!(
            names,
            vec![
                ("mu12", ParamKind::Nonzero),
                ("l12", ParamKind::Free),
                ("l13", ParamKind::Free),
                ("mu14", ParamKind::Nonzero),
                ("mu23", ParamKind::Nonzero)
            ]
        );
        assert!(family("N6,3").unwrap().params().is_empty());
    }

    #[test]
    fn n56_row() {
        let mut b = Bindings::new();
        b.insert("mu12".into(), 2.0);
        b.insert("mu34".into(), -1.5);
        let a = family("N5,6").unwrap().instantiate(&b).unwrap();
        assert_eq!(a.de(5).terms(), vec![(vec![1, 2], 2.0), (vec![3, 4], -1.5)]);
        b.insert("mu34".into(), 0.0);
        assert!(matches!(family("N5,6").unwrap().instantiate(&b), Err(SpinError::ZeroParameter(_))));
    }

    #[test]
    fn n624_row() {
        let a = family("N6,24").unwrap().instantiate(&Bindings::new()).unwrap();
        assert_eq!(a.de(5).terms(), vec![(vec![1, 2], 1.0)]);
        assert_eq!(a.de(6).terms(), vec![(vec![1, 3], 2.0), (vec![2, 4], 1.0)]);
    }

    #[test]
    fn m_constant() {
        let m = n63_m();
        assert!((m - 2.658967081916994).abs() < 1e-12);
    }

    #[test]
    fn random_bindings_satisfy_jacobi() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for f in catalog() {
            for _ in 0..10 {
                let b = f.sample(&mut rng, 2.0);
                for p in f.params() {
                    if p.kind == ParamKind::Nonzero {
                        assert!(b[&p.name].abs() > NONZERO_MARGIN);
                    }
                }
                let a = f.instantiate(&b).unwrap_or_else(|e| panic!("{}: {e}", f.name()));
                assert!(a.is_nilpotent_frame(), "{}", f.name());
                assert_eq!(a.dim(), f.dim());
            }
        }
    }

    #[test]
    fn printed_rows() {
        let none = Bindings::new();
        assert!(matches!(family("N6,9").unwrap().instantiate_printed(&none), Err(SpinError::Jacobi { .. })));
        assert!(matches!(family("N6,6").unwrap().instantiate_printed(&none), Err(SpinError::Jacobi { .. })));
        assert!(family("N6,14").unwrap().instantiate_printed(&none).is_ok());
        let a = family("N6,17").unwrap().instantiate_printed(&none).unwrap();
        assert_eq!(a.de(6).coeff(&[2, 3]), 2.0);
    }

    #[test]
    fn structure_types_parse() {
        for f in catalog().iter().filter(|f| f.group() == FamilyGroup::Dim6NonDecomposable) {
            let s = f.structure_type().unwrap();
            super::super::parse::parse_salamon_unchecked(s, &Bindings::new()).unwrap();
        }
    }
}
