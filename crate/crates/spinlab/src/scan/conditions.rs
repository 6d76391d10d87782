//! Closed-form harmonicity conditions with samplers on and off the harmonic locus.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::algebra::{family, Bindings, ParamKind, NONZERO_MARGIN};
use crate::dirac::{assemble_dirac, kernel};
use crate::error::Result;

use super::rep_cached;

/// Sampling box for free parameters.
pub const SAMPLE_BOUND: f64 = 2.0;
/// Minimal distance from the locus for violating samples.
pub const VIOLATION_MARGIN: f64 = 0.05;
/// Relative kernel tolerance used for harmonicity decisions.
pub const HARMONIC_TOL: f64 = 1e-8;

type Sampler = fn(&mut ChaCha8Rng) -> Bindings;

pub struct Condition {
    pub name: &'static str,
    pub family: &'static str,
    /// Distance from the harmonic locus; zero exactly on it. `None` when only a sampler is known.
    pub residual: Option<fn(&Bindings) -> f64>,
    sampler: Sampler,
    /// Number of satisfying samples drawn by default.
    pub samples: usize,
}

impl std::fmt::Debug for Condition {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Condition").field("name", &self.name).field("family", &self.family).finish()
    }
}

fn b(pairs: &[(&str, f64)]) -> Bindings {
    pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect()
}

fn g(p: &Bindings, k: &str) -> f64 {
    p.get(k).copied().unwrap_or(0.0)
}

/// `sign * U(lo, hi)`.
fn nz(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    sgn(rng) * rng.gen_range(lo..hi)
}

fn sgn(rng: &mut ChaCha8Rng) -> f64 {
    if rng.gen_bool(0.5) {
        1.0
    } else {
        -1.0
    }
}

fn free(rng: &mut ChaCha8Rng) -> f64 {
    rng.gen_range(-SAMPLE_BOUND..=SAMPLE_BOUND)
}

fn n56(rng: &mut ChaCha8Rng) -> Bindings {
    let m = nz(rng, 0.1, 2.0);
    b(&[("mu12", m), ("mu34", sgn(rng) * m)])
}

fn n55(rng: &mut ChaCha8Rng) -> Bindings {
    let m = nz(rng, 0.1, 2.0);
    b(&[("mu12", m), ("mu13", sgn(rng) * m)])
}

fn n54(rng: &mut ChaCha8Rng) -> Bindings {
    let m12 = nz(rng, 0.1, 1.5);
    let m23 = sgn(rng) * (m12 * m12 + rng.gen_range(0.05..2.0)).sqrt();
    let m14 = sgn(rng) * (m23 * m23 - m12 * m12).sqrt();
    b(&[("mu12", m12), ("l12", 0.0), ("l13", 0.0), ("mu14", m14), ("mu23", m23)])
}

fn n52(rng: &mut ChaCha8Rng) -> Bindings {
    let s = sgn(rng);
    let m12 = nz(rng, 0.1, 2.0);
    let l13 = free(rng);
    let l125 = nz(rng, 0.1, 2.0);
    b(&[("mu12", m12), ("mu14", s * m12), ("l12_4", -s * l13), ("l13", l13), ("mu13", s * l125), ("l12_5", l125)])
}

fn n51(rng: &mut ChaCha8Rng) -> Bindings {
    let m12 = nz(rng, 0.1, 2.0);
    let m13 = nz(rng, 0.1, 2.0);
    let m14 = sgn(rng) * (m12 * m12 + rng.gen_range(0.05..3.0)).sqrt();
    let l125 = m13 * m12 / m14;
    let m23 = sgn(rng) * ((m14 * m14 - m12 * m12) * (m13 * m13 + m14 * m14) / (m14 * m14)).sqrt();
    b(&[
        ("mu12", m12),
        ("l12_4", 0.0),
        ("mu13", m13),
        ("l12_5", l125),
        ("l13", 0.0),
        ("mu14", m14),
        ("mu23", m23),
    ])
}

fn n56a1(rng: &mut ChaCha8Rng) -> Bindings {
    n56(rng)
}

fn n55a1(rng: &mut ChaCha8Rng) -> Bindings {
    n55(rng)
}

fn n54a1(rng: &mut ChaCha8Rng) -> Bindings {
    let m12 = nz(rng, 0.1, 1.5);
    let m23 = sgn(rng) * (m12 * m12 + rng.gen_range(0.05..2.0)).sqrt();
    let m15 = sgn(rng) * (m23 * m23 - m12 * m12).sqrt();
    b(&[("mu12", m12), ("l12", 0.0), ("l13", 0.0), ("l14", 0.0), ("mu15", m15), ("mu23", m23)])
}

fn n53a1(rng: &mut ChaCha8Rng) -> Bindings {
    let l125: f64 = rng.gen_range(-1.0..1.0);
    let m14 = nz(rng, 0.1, 1.0);
    let m24 = nz(rng, 0.1, 1.0);
    b(&[
        ("mu12", 1.0),
        ("l12_5", l125),
        ("l", n53a1_lambda(l125, 0.0, m14, m24)),
        ("mu14", m14),
        ("l12_6", 0.0),
        ("mu24", m24),
    ])
}

/// Coefficient `l` of the harmonic metrics on `N5,3+A1` with `mu12 = 1`.
pub fn n53a1_lambda(l125: f64, l126: f64, m14: f64, m24: f64) -> f64 {
    let inner = (1.0 + l125 * l125 + l126 * l126 + m14 * m14 - m24 * m24).powi(2) - 4.0 * l126 * l126 + 4.0 * m24 * m24;
    0.5 * (1.0 + (m14 + m24).powi(2)).powf(-0.5) * inner.sqrt()
}

fn n52a1(rng: &mut ChaCha8Rng) -> Bindings {
    let m12 = nz(rng, 0.1, 2.0);
    let l14 = free(rng);
    let m14 = nz(rng, 0.1, 2.0);
    b(&[
        ("mu12", m12),
        ("l12_5", -l14),
        ("l13", 0.0),
        ("mu14", m14),
        ("l12_6", m14),
        ("l14", l14),
        ("mu15", m12),
    ])
}

fn n51a1(rng: &mut ChaCha8Rng) -> Bindings {
    b(&[
        ("mu12", 1.0),
        ("l12_5", 0.0),
        ("l13_4", 0.0),
        ("mu14", 1.0),
        ("l12_6", 0.5),
        ("l13_6", 0.0),
        ("l14", 0.0),
        ("mu15", 2.0),
        ("l13", 0.0),
        ("mu24", sgn(rng) * 15f64.sqrt() / 2.0),
    ])
}

fn l3l3_branch1(rng: &mut ChaCha8Rng) -> Bindings {
    let m12 = nz(rng, 0.1, 2.0);
    let m34 = nz(rng, 0.1, 2.0);
    let s1 = sgn(rng);
    let s2 = sgn(rng);
    b(&[("mu12", m12), ("l13_5", s2 * m34), ("l13_6", s1 * m12), ("l23", 0.0), ("mu34", m34)])
}

fn l3l3_branch2(rng: &mut ChaCha8Rng) -> Bindings {
    let a: f64 = rng.gen_range(0.2..2.0);
    let bb: f64 = rng.gen_range(0.1..a - 0.05);
    let l23 = sgn(rng) * (2.0 * (a * a - bb * bb)).sqrt();
    b(&[
        ("mu12", sgn(rng) * a),
        ("l13_5", sgn(rng) * a),
        ("l13_6", sgn(rng) * bb),
        ("l23", l23),
        ("mu34", sgn(rng) * bb),
    ])
}

fn res_n56(p: &Bindings) -> f64 {
    (g(p, "mu12").abs() - g(p, "mu34").abs()).abs()
}

fn res_n55(p: &Bindings) -> f64 {
    (g(p, "mu12").abs() - g(p, "mu13").abs()).abs()
}

fn res_n54(p: &Bindings) -> f64 {
    let (m12, m14, m23) = (g(p, "mu12"), g(p, "mu14"), g(p, "mu23"));
    g(p, "l12").abs().max(g(p, "l13").abs()).max((m14 * m14 + m12 * m12 - m23 * m23).abs())
}

fn res_n52(p: &Bindings) -> f64 {
    [1.0, -1.0]
        .iter()
        .map(|s| {
            (g(p, "mu12") - s * g(p, "mu14"))
                .abs()
                .max((g(p, "l12_4") + s * g(p, "l13")).abs())
                .max((g(p, "mu13") - s * g(p, "l12_5")).abs())
        })
        .fold(f64::INFINITY, f64::min)
}

/// `|lhs - rhs|` of the quartic characterising harmonic metrics on `N5,1`.
fn res_n51(p: &Bindings) -> f64 {
    let (m12, l124, m13, l125, l13, m14, m23) =
        (g(p, "mu12"), g(p, "l12_4"), g(p, "mu13"), g(p, "l12_5"), g(p, "l13"), g(p, "mu14"), g(p, "mu23"));
    let s = m12 * m12 + l124 * l124 + m13 * m13 + l125 * l125 + l13 * l13 + m14 * m14 + m23 * m23;
    let c = -m13 * l125 + l13 * l124 - m12 * m14;
    let rhs = 4.0 * (m14 * m14 * m23 * m23 + c * c + l124 * l124 * m23 * m23 + m13 * m13 * m23 * m23);
    (s * s - rhs).abs()
}

/// Product form of the branch-2 identity on `L3+L3`, minimised over the sign choice.
pub fn l3l3_identity_residual(p: &Bindings) -> f64 {
    let (m12, l5, l6, l23, m34) = (g(p, "mu12"), g(p, "l13_5"), g(p, "l13_6"), g(p, "l23"), g(p, "mu34"));
    let mu = m12 * m12 + l5 * l5 + l6 * l6 + l23 * l23 + m34 * m34;
    let lhs = 4.0 * l23 * l23 * (l5 * l5 + m12 * m12);
    [1.0, -1.0]
        .iter()
        .map(|s| (lhs - (mu - 2.0 * s * m12 * l6 + 2.0 * l5 * m34) * (mu + 2.0 * s * m12 * l6 - 2.0 * l5 * m34)).abs())
        .fold(f64::INFINITY, f64::min)
}

/// Same identity with `mu` in place of `mu^2` on the right-hand side.
pub fn l3l3_displayed_residual(p: &Bindings) -> f64 {
    let (m12, l5, l6, l23, m34) = (g(p, "mu12"), g(p, "l13_5"), g(p, "l13_6"), g(p, "l23"), g(p, "mu34"));
    let mu = m12 * m12 + l5 * l5 + l6 * l6 + l23 * l23 + m34 * m34;
    let lhs = 4.0 * l23 * l23 * (l5 * l5 + m12 * m12);
    [1.0, -1.0]
        .iter()
        .map(|s| (lhs - (mu - 4.0 * (s * m12 * l6 + l5 * m34).powi(2))).abs())
        .fold(f64::INFINITY, f64::min)
}

/// A point on the displayed branch-2 identity: `mu12 = 1` and small remaining parameters.
pub fn l3l3_displayed_point() -> Bindings {
    let (l5, l6, m34): (f64, f64, f64) = (0.2, 0.1, 0.3);
    let rest = 1.0 + l5 * l5 + l6 * l6 + m34 * m34 - 4.0 * (l6 + l5 * m34).powi(2);
    let l23 = (rest / (4.0 * (l5 * l5 + 1.0) - 1.0)).sqrt();
    b(&[("mu12", 1.0), ("l13_5", l5), ("l13_6", l6), ("l23", l23), ("mu34", m34)])
}

fn build() -> Vec<Condition> {
    let c = |name, family, residual, sampler, samples| Condition { name, family, residual, sampler, samples };
    vec![
        c("N5,6", "N5,6", Some(res_n56 as fn(&Bindings) -> f64), n56 as Sampler, 100),
        c("N5,5", "N5,5", Some(res_n55), n55, 100),
        c("N5,4", "N5,4", Some(res_n54), n54, 100),
        c("N5,2", "N5,2", Some(res_n52), n52, 100),
        c("N5,1", "N5,1", Some(res_n51), n51, 100),
        c("L3+L3/branch1", "L3+L3", None, l3l3_branch1, 50),
        c("L3+L3/branch2", "L3+L3", None, l3l3_branch2, 50),
        c("N5,6+A1", "N5,6+A1", None, n56a1, 20),
        c("N5,5+A1", "N5,5+A1", None, n55a1, 20),
        c("N5,4+A1", "N5,4+A1", None, n54a1, 20),
        c("N5,3+A1", "N5,3+A1", None, n53a1, 20),
        c("N5,2+A1", "N5,2+A1", None, n52a1, 20),
        c("N5,1+A1", "N5,1+A1", None, n51a1, 20),
    ]
}

/// Every known condition, dimension 5 first.
pub fn conditions() -> &'static [Condition] {
    static C: std::sync::OnceLock<Vec<Condition>> = std::sync::OnceLock::new();
    C.get_or_init(build)
}

pub fn condition(name: &str) -> Option<&'static Condition> {
    conditions().iter().find(|c| c.name.eq_ignore_ascii_case(name))
}

impl Condition {
    pub fn sample_satisfying(&self, rng: &mut ChaCha8Rng) -> Bindings {
        (self.sampler)(rng)
    }

    /// A satisfying sample with one parameter moved so that the residual is at least
    /// [`VIOLATION_MARGIN`]. `None` without a residual.
    pub fn sample_violating(&self, rng: &mut ChaCha8Rng) -> Result<Option<Bindings>> {
        let Some(res) = self.residual else { return Ok(None) };
        let fam = family(self.family)?;
        loop {
            let mut p = self.sample_satisfying(rng);
            let k = rng.gen_range(0..fam.params().len());
            let par = &fam.params()[k];
            let v = p[&par.name] + nz(rng, VIOLATION_MARGIN, 0.5);
            if par.kind == ParamKind::Nonzero && v.abs() <= NONZERO_MARGIN {
                continue;
            }
            p.insert(par.name.clone(), v);
            if res(&p) >= VIOLATION_MARGIN {
                return Ok(Some(p));
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConditionReport {
    pub condition: String,
    pub satisfying: usize,
    /// Smallest kernel dimension over satisfying samples.
    pub min_kernel_satisfying: usize,
    /// Largest residual of the closed form over satisfying samples.
    pub max_residual_satisfying: f64,
    pub violating: usize,
    /// Largest kernel dimension over violating samples.
    pub max_kernel_violating: usize,
}

impl ConditionReport {
    pub fn holds(&self) -> bool {
        self.min_kernel_satisfying > 0 && self.max_kernel_violating == 0 && self.max_residual_satisfying <= 1e-9
    }
}

pub fn kernel_dim_of(family_name: &str, p: &Bindings) -> Result<usize> {
    let alg = family(family_name)?.instantiate(p)?;
    Ok(kernel(&assemble_dirac(&alg, rep_cached(alg.dim())?)?, HARMONIC_TOL)?.kernel_dim)
}

/// Kernel dimensions on `n_sat` satisfying and `n_viol` violating samples.
pub fn solve_condition(cond: &Condition, rng: &mut ChaCha8Rng, n_sat: usize, n_viol: usize) -> Result<ConditionReport> {
    let mut min_k = usize::MAX;
    let mut max_res: f64 = 0.0;
    for _ in 0..n_sat {
        let p = cond.sample_satisfying(rng);
        min_k = min_k.min(kernel_dim_of(cond.family, &p)?);
        if let Some(r) = cond.residual {
            max_res = max_res.max(r(&p));
        }
    }
    let mut max_k = 0;
    let mut violating = 0;
    for _ in 0..n_viol {
        let Some(p) = cond.sample_violating(rng)? else { break };
        violating += 1;
        max_k = max_k.max(kernel_dim_of(cond.family, &p)?);
    }
    Ok(ConditionReport {
        condition: cond.name.to_string(),
        satisfying: n_sat,
        min_kernel_satisfying: if n_sat == 0 { 0 } else { min_k },
        max_residual_satisfying: max_res,
        violating,
        max_kernel_violating: max_k,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn every_condition_samples_instantiate() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for c in conditions() {
            for _ in 0..5 {
                let p = c.sample_satisfying(&mut rng);
                let k = kernel_dim_of(c.family, &p).unwrap();
                assert!(k > 0, "{}: {p:?}", c.name);
                if let Some(r) = c.residual {
                    assert!(r(&p) < 1e-9, "{}", c.name);
                }
            }
        }
    }

    #[test]
    fn dim5_conditions_separate() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for c in conditions().iter().filter(|c| c.residual.is_some()) {
            let r = solve_condition(c, &mut rng, 10, 10).unwrap();
            assert!(r.holds(), "{r:?}");
            assert_eq!(r.violating, 10);
        }
    }

    #[test]
    fn worked_points() {
        let p = b(&[("mu12", 1.0), ("mu14", 1.0), ("l12_4", 0.3), ("l13", -0.3), ("mu13", 0.7), ("l12_5", 0.7)]);
        assert!(kernel_dim_of("N5,2", &p).unwrap() > 0);
        let branch1 = b(&[("mu12", 0.8), ("l13_5", 1.3), ("l13_6", 0.8), ("l23", 0.0), ("mu34", 1.3)]);
        assert!(kernel_dim_of("L3+L3", &branch1).unwrap() > 0);
        let mut q = b(&[("mu12", 1.0), ("l12_4", 0.0), ("mu13", 1.0), ("l12_5", 0.5), ("l13", 0.0), ("mu14", 2.0)]);
        q.insert("mu23".into(), (15.0f64 / 4.0).sqrt());
        assert!(kernel_dim_of("N5,1", &q).unwrap() > 0);
        assert!(res_n51(&q) < 1e-12);
        q.insert("mu23".into(), 15f64.sqrt());
        assert_eq!(kernel_dim_of("N5,1", &q).unwrap(), 0);
    }

    #[test]
    fn l3l3_identities() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..20 {
            let p = l3l3_branch2(&mut rng);
            assert!(l3l3_identity_residual(&p) < 1e-9);
            assert!(l3l3_displayed_residual(&p) > 1e-3);
        }
        let d = l3l3_displayed_point();
        assert!(l3l3_displayed_residual(&d) < 1e-12);
        assert_eq!(kernel_dim_of("L3+L3", &d).unwrap(), 0);
    }
}
