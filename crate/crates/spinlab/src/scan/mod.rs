//! Parameter-space scans for harmonic metrics and the built-in verification suite.

mod conditions;
mod verify;

pub use conditions::{
    condition, conditions, kernel_dim_of, l3l3_displayed_point, l3l3_displayed_residual, l3l3_identity_residual,
    n53a1_lambda, solve_condition, Condition, ConditionReport, HARMONIC_TOL, SAMPLE_BOUND, VIOLATION_MARGIN,
};
pub(crate) use verify::num as round_sig;
pub use verify::{claim_ids, verify_claims, verify_paper, ClaimRecord, ClaimStatus, Discrepancy, VerificationReport};

use std::sync::OnceLock;

use rayon::prelude::*;
use serde::Serialize;

use crate::algebra::{Bindings, ParamKind, ParameterFamily, NONZERO_MARGIN};
use crate::clifford::{rep, CliffordRep};
use crate::dirac::{assemble_dirac, kernel};
use crate::error::{Result, SpinError};

/// Grids larger than this are rejected.
pub const MAX_GRID_POINTS: usize = 10_000_000;

pub(crate) fn rep_cached(n: usize) -> Result<&'static CliffordRep> {
    static REPS: OnceLock<Vec<CliffordRep>> = OnceLock::new();
    let reps = REPS.get_or_init(|| (1..=8).map(|k| rep(k).expect("representations exist for 1..=8")).collect());
    if n == 0 || n > 8 {
        return Err(SpinError::Unsupported(format!("no Clifford representation for n = {n}")));
    }
    Ok(&reps[n - 1])
}

/// Worker pool capped by `SPINLAB_THREADS` when set.
pub fn thread_pool() -> Result<rayon::ThreadPool> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Ok(s) = std::env::var("SPINLAB_THREADS") {
        let n: usize = s
            .trim()
            .parse()
            .map_err(|_| SpinError::Unsupported(format!("SPINLAB_THREADS must be a positive integer, got `{s}`")))?;
        b = b.num_threads(n.max(1));
    }
    b.build().map_err(|e| SpinError::Numerical(format!("thread pool: {e}")))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Axis {
    pub name: String,
    pub lo: f64,
    pub hi: f64,
    pub steps: usize,
}

impl Axis {
    pub fn new(name: impl Into<String>, lo: f64, hi: f64, steps: usize) -> Result<Self> {
        let name = name.into();
        if steps == 0 || !lo.is_finite() || !hi.is_finite() || (steps == 1 && lo != hi) || (steps > 1 && lo >= hi) {
            return Err(SpinError::Unsupported(format!("invalid range for `{name}`: {lo}:{hi}:{steps}")));
        }
        Ok(Axis { name, lo, hi, steps })
    }

    /// `name=lo:hi:steps`.
    pub fn parse(s: &str) -> Result<Self> {
        let bad = || SpinError::Syntax { pos: 0, msg: format!("expected name=lo:hi:steps, got `{s}`") };
        let (name, rest) = s.split_once('=').ok_or_else(bad)?;
        let parts: Vec<&str> = rest.split(':').collect();
        if parts.len() != 3 || name.trim().is_empty() {
            return Err(bad());
        }
        let lo = parts[0].trim().parse().map_err(|_| bad())?;
        let hi = parts[1].trim().parse().map_err(|_| bad())?;
        let steps = parts[2].trim().parse().map_err(|_| bad())?;
        Axis::new(name.trim(), lo, hi, steps)
    }

    pub fn value(&self, i: usize) -> f64 {
        if self.steps == 1 {
            self.lo
        } else {
            self.lo + (self.hi - self.lo) * i as f64 / (self.steps - 1) as f64
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct GridSpec {
    pub axes: Vec<Axis>,
    /// Values of the parameters that are not scanned.
    pub fixed: Bindings,
}

impl GridSpec {
    pub fn new(axes: Vec<Axis>) -> Self {
        GridSpec { axes, fixed: Bindings::new() }
    }

    pub fn with_fixed(mut self, fixed: Bindings) -> Self {
        self.fixed = fixed;
        self
    }

    pub fn points(&self) -> usize {
        self.axes.iter().map(|a| a.steps).product()
    }

    fn binding(&self, mut idx: usize) -> Bindings {
        let mut b = self.fixed.clone();
        for a in self.axes.iter().rev() {
            b.insert(a.name.clone(), a.value(idx % a.steps));
            idx /= a.steps;
        }
        b
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanHit {
    pub binding: Bindings,
    pub kernel_dim: usize,
    /// Smallest `|eigenvalue|` (singular value) of `4 D`.
    pub min_abs_eigenvalue: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanResult {
    pub family: String,
    pub grid: GridSpec,
    pub tol: f64,
    pub points: usize,
    pub evaluated: usize,
    /// Points where a nonzero parameter is within the nonzero margin of 0.
    pub skipped_nonzero: usize,
    /// Points failing the Jacobi identity.
    pub skipped_jacobi: usize,
    /// Confirmed hits, sorted by binding.
    pub hits: Vec<ScanHit>,
    /// Points under `tol` whose kernel vanished at `tol / 10`.
    pub unconfirmed: usize,
    /// Minimum over non-hit points of the smallest singular value.
    pub min_singular_value: Option<f64>,
    pub argmin: Option<Bindings>,
}

enum Point {
    Skipped,
    Jacobi,
    Eval { sigma: f64, confirmed: Option<usize> },
}

fn eval_point(family: &ParameterFamily, rep: &CliffordRep, b: &Bindings, tol: f64) -> Result<Point> {
    for p in family.params() {
        if p.kind == ParamKind::Nonzero && b[&p.name].abs() < NONZERO_MARGIN {
            return Ok(Point::Skipped);
        }
    }
    let alg = match family.instantiate(b) {
        Ok(a) => a,
        Err(SpinError::Jacobi { .. }) => return Ok(Point::Jacobi),
        Err(e) => return Err(e),
    };
    let m = assemble_dirac(&alg, rep)?;
    let rel = if m.norm() > 0.0 { 1.0 / m.norm() } else { 1.0 };
    let sigma = kernel(&m, rel)?.min_abs();
    let confirmed = if sigma <= tol {
        let k = kernel(&m, (tol / 10.0) * rel)?.kernel_dim;
        Some(k)
    } else {
        None
    };
    Ok(Point::Eval { sigma, confirmed })
}

/// Evaluate the smallest singular value of `4 D` on every grid point; hits are points with
/// value `<= tol`, each confirmed by a kernel computation at `tol / 10`.
pub fn scan_grid(family: &ParameterFamily, grid: &GridSpec, tol: f64) -> Result<ScanResult> {
    if !(tol > 0.0) {
        return Err(SpinError::Unsupported(format!("scan tolerance must be positive, got {tol}")));
    }
    for a in &grid.axes {
        if !family.params().iter().any(|p| p.name == a.name) {
            return Err(SpinError::Unsupported(format!("`{}` is not a parameter of {}", a.name, family.name())));
        }
    }
    for p in family.params() {
        if !grid.axes.iter().any(|a| a.name == p.name) && !grid.fixed.contains_key(&p.name) {
            return Err(SpinError::UnboundParameter(p.name.clone()));
        }
    }
    let total = grid.axes.iter().try_fold(1usize, |acc, a| acc.checked_mul(a.steps)).unwrap_or(usize::MAX);
    if total > MAX_GRID_POINTS {
        return Err(SpinError::Unsupported(format!("grid has {total} points, limit {MAX_GRID_POINTS}")));
    }
    let rep = rep_cached(family.dim())?;
    let pool = thread_pool()?;
    let results: Vec<Result<Point>> =
        pool.install(|| (0..total).into_par_iter().map(|i| eval_point(family, rep, &grid.binding(i), tol)).collect());

    let mut out = ScanResult {
        family: family.name().to_string(),
        grid: grid.clone(),
        tol,
        points: total,
        evaluated: 0,
        skipped_nonzero: 0,
        skipped_jacobi: 0,
        hits: Vec::new(),
        unconfirmed: 0,
        min_singular_value: None,
        argmin: None,
    };
    for (i, r) in results.into_iter().enumerate() {
        match r? {
            Point::Skipped => out.skipped_nonzero += 1,
            Point::Jacobi => out.skipped_jacobi += 1,
            Point::Eval { sigma, confirmed } => {
                out.evaluated += 1;
                match confirmed {
                    Some(k) if k > 0 => {
                        out.hits.push(ScanHit { binding: grid.binding(i), kernel_dim: k, min_abs_eigenvalue: sigma })
                    }
                    Some(_) => out.unconfirmed += 1,
                    None => {
                        if out.min_singular_value.is_none_or(|m| sigma < m) {
                            out.min_singular_value = Some(sigma);
                            out.argmin = Some(grid.binding(i));
                        }
                    }
                }
            }
        }
    }
    out.hits.sort_by(|a, b| {
        a.binding.values().zip(b.binding.values()).map(|(x, y)| x.total_cmp(y)).find(|o| o.is_ne()).unwrap_or(std::cmp::Ordering::Equal)
    });
    Ok(out)
}
