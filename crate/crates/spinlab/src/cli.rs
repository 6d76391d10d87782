//! Command-line front end. `run` returns the process exit code:
//! 0 on success, 1 when a checked condition fails, 2 on input errors.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::io::Write;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use nalgebra::{DMatrix, SymmetricEigen};
use serde_json::{json, Value};

use crate::algebra::{family, parse_input, Bindings, MetricLieAlgebra};
use crate::clifford::{quaternionic_ops_dim5, rep, Spinor};
use crate::dirac::{assemble_dirac, kernel, DiracMatrix, DEFAULT_KERNEL_TOL};
use crate::error::{Result, SpinError};
use crate::forms::{Form, Orientation};
use crate::gstruct::{hypo_residual, mu_gamma, mu_v, su2_from_spinor, su2_torsion, su3_from_spinor, SU2Torsion};
use crate::scan::{round_sig, scan_grid, verify_claims, Axis, GridSpec};
use crate::spin7::{lift_algebra, lift_spinor, spin7_form, spin7_torsion};

pub const SCHEMA: u32 = 1;

#[derive(Debug, Parser)]
#[command(name = "spinlab", version, about = "Dirac operators of invariant spinors on metric Lie algebras")]
struct Cli {
    /// Machine-readable output.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
struct Source {
    /// Compact structure equations such as "(0,0,12,13)", or a path to an algebra file.
    input: Option<String>,
    /// Catalog family instead of an explicit algebra.
    #[arg(long)]
    family: Option<String>,
}

#[derive(Debug, Args)]
struct Input {
    #[command(flatten)]
    source: Source,
    /// Parameter binding `name=value`.
    #[arg(long = "param", value_name = "NAME=VALUE")]
    params: Vec<String>,
}

#[derive(Debug, Args)]
struct SpinorChoice {
    /// Use the k-th kernel vector (1-based).
    #[arg(long, conflicts_with = "vector")]
    spinor: Option<usize>,
    /// Explicit unit spinor, comma separated.
    #[arg(long, allow_hyphen_values = true)]
    vector: Option<String>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Parse and validate structure equations.
    Algebra {
        #[command(flatten)]
        input: Input,
        /// Exit 1 if the Jacobi identity fails.
        #[arg(long)]
        check: bool,
    },
    /// Matrix of 4D (or 16D^2), its spectrum and kernel.
    Dirac {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        squared: bool,
        #[arg(long)]
        spectrum: bool,
        #[arg(long)]
        kernel: bool,
        #[arg(long, default_value_t = DEFAULT_KERNEL_TOL)]
        tol: f64,
        /// Exit 1 if the kernel is trivial.
        #[arg(long)]
        expect_kernel: bool,
    },
    /// `(mu, v)` in dimension 5, `(mu, gamma)` in dimension 6.
    Invariants {
        #[command(flatten)]
        input: Input,
    },
    /// SU(2) or SU(3) structure induced by a spinor.
    Structure {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        choice: SpinorChoice,
        #[arg(long, conflicts_with = "su3")]
        su2: bool,
        #[arg(long)]
        su3: bool,
        #[arg(long)]
        torsion: bool,
        #[arg(long)]
        hypo: bool,
        #[arg(long, default_value_t = DEFAULT_KERNEL_TOL)]
        tol: f64,
    },
    /// Spin(7) structure on the product with a flat torus.
    Lift {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        choice: SpinorChoice,
        /// Torus dimension; must equal 8 - n.
        #[arg(long)]
        torus: Option<usize>,
        /// Exit 1 unless the lifted structure is balanced.
        #[arg(long)]
        check_balanced: bool,
        #[arg(long, default_value_t = DEFAULT_KERNEL_TOL)]
        tol: f64,
    },
    /// Grid scan of a catalog family for harmonic spinors.
    Scan {
        #[arg(long)]
        family: String,
        /// Scanned axis `name=lo:hi:steps`.
        #[arg(long = "range", value_name = "NAME=LO:HI:STEPS", allow_hyphen_values = true)]
        ranges: Vec<String>,
        /// Fixed parameter `name=value`.
        #[arg(long = "param", value_name = "NAME=VALUE", allow_hyphen_values = true)]
        params: Vec<String>,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
    },
    /// Run the classification verification suite.
    VerifyPaper {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Restrict to one claim id (repeatable).
        #[arg(long = "claim")]
        claims: Vec<String>,
        /// Record wall-clock time in the report.
        #[arg(long)]
        timing: bool,
    },
}

/// Command outcome: the report plus whether the checked condition holds.
struct Report {
    json: Value,
    human: String,
    ok: bool,
}

fn parse_bindings(items: &[String]) -> Result<Bindings> {
    let mut b = BTreeMap::new();
    for s in items {
        let bad = || SpinError::Syntax { pos: 0, msg: format!("expected name=value, got `{s}`") };
        let (k, v) = s.split_once('=').ok_or_else(bad)?;
        let v: f64 = v.trim().parse().map_err(|_| bad())?;
        if k.trim().is_empty() || !v.is_finite() {
            return Err(bad());
        }
        b.insert(k.trim().to_string(), v);
    }
    Ok(b)
}

fn read_text(input: &str) -> Result<String> {
    if input.trim_start().starts_with('(') {
        Ok(input.to_string())
    } else {
        Ok(std::fs::read_to_string(input)?)
    }
}

/// Structure equations without the Jacobi check.
fn load_unchecked(input: &Input) -> Result<MetricLieAlgebra> {
    let params = parse_bindings(&input.params)?;
    match (&input.source.input, &input.source.family) {
        (Some(text), _) => parse_input(&read_text(text)?, &params)?.build_unchecked(),
        (None, Some(name)) => {
            let f = family(name)?;
            let mut b = f.unit_bindings();
            b.extend(params);
            Ok(crate::algebra::parse_salamon_unchecked(f.template(), &full(f, &b))?.build_unchecked()?.with_name(f.name()))
        }
        (None, None) => Err(SpinError::Unsupported("no input given".into())),
    }
}

fn full(f: &crate::algebra::ParameterFamily, b: &Bindings) -> Bindings {
    let mut out = f.constants().clone();
    out.extend(b.iter().map(|(k, v)| (k.clone(), *v)));
    out
}

fn load(input: &Input) -> Result<MetricLieAlgebra> {
    let params = parse_bindings(&input.params)?;
    match (&input.source.input, &input.source.family) {
        (Some(text), _) => parse_input(&read_text(text)?, &params)?.build(),
        (None, Some(name)) => {
            let f = family(name)?;
            if let Some(k) = params.keys().find(|k| !f.params().iter().any(|p| &p.name == *k)) {
                return Err(SpinError::Unsupported(format!("`{k}` is not a parameter of {}", f.name())));
            }
            f.instantiate(&params)
        }
        (None, None) => Err(SpinError::Unsupported("no input given".into())),
    }
}

fn round(x: f64) -> Value {
    round_sig(x)
}

fn round_all(v: Value) -> Value {
    match v {
        Value::Number(n) if !n.is_i64() && !n.is_u64() => n.as_f64().map_or(Value::Null, round),
        Value::Array(a) => Value::Array(a.into_iter().map(round_all).collect()),
        Value::Object(o) => Value::Object(o.into_iter().map(|(k, v)| (k, round_all(v))).collect()),
        other => other,
    }
}

/// `{"125": c, ...}` keyed by concatenated frame indices.
fn form_json(f: &Form) -> Value {
    let m: serde_json::Map<String, Value> = f
        .terms()
        .into_iter()
        .map(|(idx, c)| (idx.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(if f.dim() > 9 { "," } else { "" }), round(c)))
        .collect();
    Value::Object(m)
}

fn fmt(x: f64) -> String {
    let s = format!("{:.12}", x);
    match s.trim_end_matches('0').trim_end_matches('.') {
        "-0" => "0".to_string(),
        t => t.to_string(),
    }
}

fn matrix_json(m: &DMatrix<f64>) -> Value {
    Value::Array((0..m.nrows()).map(|i| Value::Array((0..m.ncols()).map(|j| round(m[(i, j)])).collect())).collect())
}

fn cmd_algebra(input: &Input, check: bool) -> Result<Report> {
    let alg = load_unchecked(input)?;
    let residuals = alg.jacobi_residuals();
    let worst = residuals.iter().copied().fold(0.0, f64::max);
    let jacobi = alg.validate();
    let ok = jacobi.is_ok();
    let mut human = format!(
        "dim {}\n{}\njacobi: {}\nnilpotent frame: {}\nabelian: {}\n",
        alg.dim(),
        alg.render_salamon(),
        if ok { "ok".to_string() } else { jacobi.unwrap_err().to_string() },
        alg.is_nilpotent_frame(),
        alg.is_abelian()
    );
    for (i, f) in alg.differentials().iter().enumerate() {
        human.push_str(&format!("de{} = {}\n", i + 1, f.render()));
    }
    Ok(Report {
        json: json!({
            "dim": alg.dim(),
            "structure": alg.render_salamon(),
            "orientation": if alg.orientation() == Orientation::Positive { 1 } else { -1 },
            "jacobi": ok,
            "jacobi_residual": round(worst),
            "nilpotent_frame": alg.is_nilpotent_frame(),
            "abelian": alg.is_abelian(),
            "differentials": alg.differentials().iter().map(form_json).collect::<Vec<_>>(),
        }),
        human,
        ok: ok || !check,
    })
}

fn dirac_of(alg: &MetricLieAlgebra) -> Result<DiracMatrix> {
    assemble_dirac(alg, &rep(alg.dim())?)
}

fn cmd_dirac(input: &Input, squared: bool, spectrum: bool, show_kernel: bool, tol: f64, expect: bool) -> Result<Report> {
    let alg = load(input)?;
    let m = dirac_of(&alg)?;
    let m = if squared { m.square()? } else { m };
    let r = kernel(&m, tol)?;
    let mut j = json!({
        "dim": alg.dim(),
        "squared": squared,
        "symmetric": m.is_symmetric(),
        "kernel_dim": r.kernel_dim,
        "tol": tol,
        "spectrum": r.eigenvalues.iter().map(|&x| round(x)).collect::<Vec<_>>(),
        "singular_values": r.singular,
    });
    let label = if squared { "16 D^2" } else { "4 D" };
    let mut human = format!("{label} on {} ({}x{})\n", alg.render_salamon(), m.size(), m.size());
    if !spectrum && !show_kernel {
        j["matrix"] = matrix_json(m.matrix());
        for i in 0..m.size() {
            let row: Vec<String> = (0..m.size()).map(|k| format!("{:>8.4}", m.matrix()[(i, k)])).collect();
            human.push_str(&row.join(" "));
            human.push('\n');
        }
    }
    if spectrum {
        let name = if r.singular { "singular values" } else { "eigenvalues" };
        human.push_str(&format!("{name}: {}\n", r.eigenvalues.iter().map(|&x| fmt(x)).collect::<Vec<_>>().join(" ")));
    }
    human.push_str(&format!("kernel_dim: {}\n", r.kernel_dim));
    if show_kernel {
        let basis: Vec<Value> = r.kernel_basis.iter().map(|v| Value::Array(v.iter().map(|&x| round(x)).collect())).collect();
        for v in &r.kernel_basis {
            human.push_str(&format!("  [{}]\n", v.iter().map(|&x| fmt(x)).collect::<Vec<_>>().join(", ")));
        }
        j["kernel_basis"] = Value::Array(basis);
    }
    Ok(Report { json: j, human, ok: !expect || r.kernel_dim > 0 })
}

fn cmd_invariants(input: &Input) -> Result<Report> {
    let alg = load(input)?;
    match alg.dim() {
        5 => {
            let inv = mu_v(&alg)?;
            Ok(Report {
                json: json!({
                    "dim": 5,
                    "mu": round(inv.mu),
                    "v": inv.v.iter().map(|&x| round(x)).collect::<Vec<_>>(),
                    "v_norm": round(inv.v_norm()),
                }),
                human: format!(
                    "mu = {}\nv = ({})\n|v| = {}\n",
                    fmt(inv.mu),
                    inv.v.iter().map(|&x| fmt(x)).collect::<Vec<_>>().join(", "),
                    fmt(inv.v_norm())
                ),
                ok: true,
            })
        }
        6 => {
            let inv = mu_gamma(&alg)?;
            Ok(Report {
                json: json!({"dim": 6, "mu": round(inv.mu), "gamma": form_json(&inv.gamma)}),
                human: format!("mu = {}\ngamma = {}\n", fmt(inv.mu), inv.gamma.render()),
                ok: true,
            })
        }
        n => Err(SpinError::Unsupported(format!("invariants are defined in dimensions 5 and 6, got {n}"))),
    }
}

struct Chosen {
    spinor: Spinor,
    harmonic: bool,
    source: String,
}

/// The requested spinor. Without a choice: the first kernel vector, or the eigenvector of the
/// eigenvalue closest to zero when the kernel is trivial.
fn choose_spinor(alg: &MetricLieAlgebra, choice: &SpinorChoice, tol: f64) -> Result<Chosen> {
    let m = dirac_of(alg)?;
    let r = kernel(&m, tol)?;
    if let Some(text) = &choice.vector {
        let v: Vec<f64> = text
            .split(',')
            .map(|s| s.trim().parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| SpinError::Syntax { pos: 0, msg: format!("bad spinor `{text}`") })?;
        if v.len() != m.size() {
            return Err(SpinError::DimensionMismatch { expected: m.size(), found: v.len() });
        }
        let s = Spinor::from_vec(v);
        if (s.norm() - 1.0).abs() > 1e-10 {
            return Err(SpinError::NonUnitSpinor(s.norm()));
        }
        let harmonic = m.apply(&s).amax() <= tol * r.norm.max(1.0);
        return Ok(Chosen { spinor: s, harmonic, source: "vector".into() });
    }
    match choice.spinor {
        Some(0) => Err(SpinError::Unsupported("--spinor is 1-based".into())),
        Some(k) if k > r.kernel_dim => {
            Err(SpinError::Unsupported(format!("kernel has dimension {}, no vector {k}", r.kernel_dim)))
        }
        Some(k) => Ok(Chosen { spinor: r.kernel_basis[k - 1].clone(), harmonic: true, source: format!("kernel[{k}]") }),
        None if r.kernel_dim > 0 => {
            Ok(Chosen { spinor: r.kernel_basis[0].clone(), harmonic: true, source: "kernel[1]".into() })
        }
        None => {
            let sym = (m.matrix() + m.matrix().transpose()) * 0.5;
            let eig = SymmetricEigen::new(sym);
            let k = eig.eigenvalues.iamin();
            Ok(Chosen {
                spinor: eig.eigenvectors.column(k).into_owned(),
                harmonic: false,
                source: format!("eigenvector for {}", fmt(eig.eigenvalues[k])),
            })
        }
    }
}

fn torsion_json(t: &SU2Torsion, tol: f64) -> Value {
    json!({
        "tau0": t.tau0.iter().map(|&x| round(x)).collect::<Vec<_>>(),
        "tau0_kl": t.tau0_kl.iter().map(|r| r.iter().map(|&x| round(x)).collect::<Vec<_>>()).collect::<Vec<_>>(),
        "tau1": t.tau1.iter().map(form_json).collect::<Vec<_>>(),
        "tau2": t.tau2.iter().map(form_json).collect::<Vec<_>>(),
        "nonzero": t.nonzero_components(tol),
    })
}

fn cmd_structure(input: &Input, choice: &SpinorChoice, su3: bool, torsion: bool, hypo: bool, tol: f64) -> Result<Report> {
    let alg = load(input)?;
    let want = if su3 { 6 } else { 5 };
    if alg.dim() != want && (su3 || alg.dim() != 6) {
        return Err(SpinError::DimensionMismatch { expected: want, found: alg.dim() });
    }
    let c = choose_spinor(&alg, choice, tol)?;
    let r = rep(alg.dim())?;
    let mut human = format!("spinor: {} (harmonic: {})\n", c.source, c.harmonic);
    let mut j = json!({
        "dim": alg.dim(),
        "spinor": c.spinor.iter().map(|&x| round(x)).collect::<Vec<_>>(),
        "spinor_source": c.source,
        "harmonic": c.harmonic,
    });
    let mut ok = true;
    if alg.dim() == 6 {
        let s = su3_from_spinor(&c.spinor, &r)?;
        human.push_str(&format!("omega = {}\ntheta+ = {}\n", s.omega.render(), s.theta_plus.render()));
        j["structure"] = "su3".into();
        j["omega"] = form_json(&s.omega);
        j["theta_plus"] = form_json(&s.theta_plus);
        if torsion || hypo {
            return Err(SpinError::Unsupported("torsion and hypo are available for SU(2) structures only".into()));
        }
    } else {
        let ops = quaternionic_ops_dim5();
        let s = su2_from_spinor(&c.spinor, &r, &ops)?;
        let alpha_abs: Vec<f64> = (1..=5).map(|i| s.alpha.coeff(&[i]).abs()).collect();
        human.push_str(&format!("alpha = {}\n|alpha_i| = ({})\n", s.alpha.render(), alpha_abs.iter().map(|&x| fmt(x)).collect::<Vec<_>>().join(", ")));
        for (k, o) in s.omega.iter().enumerate() {
            human.push_str(&format!("omega{} = {}\n", k + 1, o.render()));
        }
        let da = alg.d(&s.alpha).pruned(1e-14);
        human.push_str(&format!("d alpha = {}\n", da.render()));
        j["structure"] = "su2".into();
        j["alpha"] = form_json(&s.alpha);
        j["alpha_abs"] = Value::Array(alpha_abs.iter().map(|&x| round(x)).collect());
        j["omega"] = Value::Array(s.omega.iter().map(form_json).collect());
        j["d_alpha"] = form_json(&da);
        if torsion {
            let t = su2_torsion(&alg, &s)?;
            human.push_str(&format!("nonzero torsion: {}\n", t.nonzero_components(tol).join(" ")));
            for k in 0..4 {
                if t.tau2[k].norm() > tol {
                    human.push_str(&format!("tau2^{} = {}\n", k + 1, t.tau2[k].pruned(tol).render()));
                }
                if t.tau1[k].norm() > tol {
                    human.push_str(&format!("tau1^{} = {}\n", k + 1, t.tau1[k].pruned(tol).render()));
                }
            }
            j["torsion"] = torsion_json(&t, tol);
        }
        if hypo {
            let res = hypo_residual(&alg, &s);
            let is = res <= tol * alg.scale().max(1.0);
            human.push_str(&format!("hypo: {is} (residual {res:.3e})\n"));
            j["hypo"] = is.into();
            j["hypo_residual"] = round(res);
            ok = is;
        }
    }
    Ok(Report { json: j, human, ok })
}

fn cmd_lift(input: &Input, choice: &SpinorChoice, torus: Option<usize>, check: bool, tol: f64) -> Result<Report> {
    let alg = load(input)?;
    let n = alg.dim();
    if !(4..=7).contains(&n) {
        return Err(SpinError::Unsupported(format!("lift needs 4 <= n <= 7, got {n}")));
    }
    if let Some(k) = torus {
        if k + n != 8 {
            return Err(SpinError::Unsupported(format!("torus dimension must be {} for n = {n}", 8 - n)));
        }
    }
    let c = choose_spinor(&alg, choice, tol)?;
    let big = lift_algebra(&alg)?;
    let r8 = rep(8)?;
    let eta = lift_spinor(&c.spinor, n)?;
    let om = spin7_form(&eta, &r8)?;
    let data = spin7_torsion(&big, &om)?;
    let dirac_res = dirac_of(&big)?.apply(&eta).amax();
    let self_dual = (&om.hodge_star(Orientation::Positive) - &om).max_abs();
    let square = (&om ^ &om).coeff(&[1, 2, 3, 4, 5, 6, 7, 8]);
    let t = data.tau1.norm() + 0.0;
    let human = format!(
        "spinor: {} (harmonic: {})\ntorus: T^{}\n|tau1| = {:.3e}\nbalanced: {}\nparallel: {}\n|4D eta| = {:.3e}\n|*Omega - Omega| = {:.3e}\nOmega^Omega = {} vol\n",
        c.source,
        c.harmonic,
        8 - n,
        t,
        data.balanced,
        data.parallel,
        dirac_res,
        self_dual,
        fmt(square)
    );
    Ok(Report {
        json: json!({
            "dim": n,
            "torus": 8 - n,
            "spinor_source": c.source,
            "harmonic": c.harmonic,
            "tau1": form_json(&data.tau1),
            "tau1_norm": round(t),
            "balanced": data.balanced,
            "parallel": data.parallel,
            "dirac_residual": round(dirac_res),
            "self_duality_residual": round(self_dual),
            "omega_squared": round(square),
        }),
        human,
        ok: !check || data.balanced,
    })
}

fn cmd_scan(name: &str, ranges: &[String], params: &[String], tol: f64) -> Result<Report> {
    let f = family(name)?;
    let axes = ranges.iter().map(|s| Axis::parse(s)).collect::<Result<Vec<_>>>()?;
    let grid = GridSpec::new(axes).with_fixed(parse_bindings(params)?);
    let r = scan_grid(f, &grid, tol)?;
    let mut human = format!(
        "{}: {} points, {} evaluated, {} near a zero parameter, {} not Lie\nhits: {}\n",
        r.family,
        r.points,
        r.evaluated,
        r.skipped_nonzero,
        r.skipped_jacobi,
        r.hits.len()
    );
    for h in &r.hits {
        let b: Vec<String> = h.binding.iter().map(|(k, v)| format!("{k}={}", fmt(*v))).collect();
        human.push_str(&format!("  {} kernel {}\n", b.join(" "), h.kernel_dim));
    }
    if let Some(m) = r.min_singular_value {
        human.push_str(&format!("min singular value off hits: {}\n", fmt(m)));
    }
    let j = round_all(serde_json::to_value(&r).map_err(|e| SpinError::Numerical(e.to_string()))?);
    Ok(Report { json: j, human, ok: true })
}

fn cmd_verify(seed: u64, claims: &[String], timing: bool) -> Result<Report> {
    let t = Instant::now();
    let mut report = verify_claims(seed, if claims.is_empty() { None } else { Some(claims) })?;
    if timing {
        report.elapsed_ms = Some(t.elapsed().as_millis() as u64);
    }
    let mut human = String::new();
    for c in &report.claims {
        let status = if c.status == crate::scan::ClaimStatus::Pass { "PASS" } else { "FAIL" };
        human.push_str(&format!("{status} {}\n", c.id));
    }
    for d in &report.discrepancies {
        human.push_str(&format!("NOTE {} reproduced={}: {}\n", d.id, d.reproduced, d.note));
    }
    let passed = report.claims.iter().filter(|c| c.status == crate::scan::ClaimStatus::Pass).count();
    human.push_str(&format!("{passed}/{} claims pass\n", report.claims.len()));
    if let Some(ms) = report.elapsed_ms {
        human.push_str(&format!("elapsed {ms} ms\n"));
    }
    let ok = report.all_pass();
    let json = serde_json::to_value(&report).map_err(|e| SpinError::Numerical(e.to_string()))?;
    Ok(Report { json, human, ok })
}

fn dispatch(cmd: &Command) -> Result<Report> {
    match cmd {
        Command::Algebra { input, check } => cmd_algebra(input, *check),
        Command::Dirac { input, squared, spectrum, kernel, tol, expect_kernel } => {
            cmd_dirac(input, *squared, *spectrum, *kernel, *tol, *expect_kernel)
        }
        Command::Invariants { input } => cmd_invariants(input),
        Command::Structure { input, choice, su2: _, su3, torsion, hypo, tol } => {
            cmd_structure(input, choice, *su3, *torsion, *hypo, *tol)
        }
        Command::Lift { input, choice, torus, check_balanced, tol } => {
            cmd_lift(input, choice, *torus, *check_balanced, *tol)
        }
        Command::Scan { family, ranges, params, tol } => cmd_scan(family, ranges, params, *tol),
        Command::VerifyPaper { seed, claims, timing } => cmd_verify(*seed, claims, *timing),
    }
}

fn with_schema(v: Value) -> Value {
    match v {
        Value::Object(mut o) => {
            o.insert("schema".into(), SCHEMA.into());
            Value::Object(o)
        }
        other => other,
    }
}

/// Parse `args` (including the program name), run, and write to `out` / `err`.
pub fn run_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = e.exit_code();
            let _ = if code == 0 { write!(out, "{e}") } else { write!(err, "{e}") };
            return code;
        }
    };
    match dispatch(&cli.command) {
        Ok(r) => {
            let _ = if cli.json {
                writeln!(out, "{}", serde_json::to_string_pretty(&with_schema(r.json)).expect("json"))
            } else {
                write!(out, "{}", r.human)
            };
            if r.ok {
                0
            } else {
                1
            }
        }
        Err(e) => {
            let code = if e.is_input_error() { 2 } else { 1 };
            if cli.json {
                let _ = writeln!(out, "{}", serde_json::to_string_pretty(&json!({"schema": SCHEMA, "error": e.to_string()})).expect("json"));
            }
            let _ = writeln!(err, "error: {e}");
            code
        }
    }
}

pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(args, &mut stdout.lock(), &mut stderr.lock())
}
