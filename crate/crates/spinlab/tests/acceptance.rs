//! One PASS/FAIL line per acceptance criterion. Lines marked `expected` check a variant of a
//! stated result as listed; they must fail, and the harness asserts that they do.

use std::time::Instant;

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use spinlab::algebra::{catalog, family, Bindings, FamilyGroup};
use spinlab::clifford::rep;
use spinlab::dirac::{assemble_dirac, kernel};
use spinlab::gstruct::mu_v;
use spinlab::scan::{verify_claims, verify_paper, ClaimStatus, VerificationReport};

struct Line {
    criterion: &'static str,
    label: String,
    pass: bool,
    expected_fail: bool,
}

#[derive(Default)]
struct Sheet {
    lines: Vec<Line>,
}

impl Sheet {
    fn check(&mut self, criterion: &'static str, label: impl Into<String>, pass: bool) {
        self.lines.push(Line { criterion, label: label.into(), pass, expected_fail: false });
    }

    fn expect_fail(&mut self, criterion: &'static str, label: impl Into<String>, pass: bool) {
        self.lines.push(Line { criterion, label: label.into(), pass, expected_fail: true });
    }

    fn print_and_assert(&self) {
        for l in &self.lines {
            let tag = if l.pass { "PASS" } else { "FAIL" };
            let note = if l.expected_fail { "  (expected: variant as listed)" } else { "" };
            println!("{tag} [{:>2}] {}{note}", l.criterion, l.label);
        }
        let wrong: Vec<&Line> = self.lines.iter().filter(|l| l.pass == l.expected_fail).collect();
        assert!(wrong.is_empty(), "unexpected outcomes: {:?}", wrong.iter().map(|l| &l.label).collect::<Vec<_>>());
    }
}

fn bind(pairs: &[(&str, f64)]) -> Bindings {
    pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect()
}

fn kdim(name: &str, p: &[(&str, f64)]) -> usize {
    let alg = family(name).unwrap().instantiate(&bind(p)).unwrap();
    let m = assemble_dirac(&alg, &rep(alg.dim()).unwrap()).unwrap();
    kernel(&m, 1e-8).unwrap().kernel_dim
}

fn claims_pass(r: &VerificationReport, prefix: &str) -> bool {
    let sel: Vec<_> = r.claims.iter().filter(|c| c.id.starts_with(prefix)).collect();
    !sel.is_empty() && sel.iter().all(|c| c.status == ClaimStatus::Pass)
}

fn listed_fails(r: &VerificationReport, id: &str) -> bool {
    !r.discrepancy(id).expect("discrepancy recorded").reproduced
}

#[test]
fn acceptance() {
    let mut s = Sheet::default();

    let t = Instant::now();
    let dim4 = verify_claims(0, Some(&["dim4/L3+A1".into(), "dim4/L4".into()])).unwrap();
    let dim4_time = t.elapsed().as_secs_f64();
    s.check("1", "dim 4: trivial kernel, 16D^2 = (mu12^2+mu13^2+l12^2) I on L4", dim4.all_pass());
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let l4 = family("L4").unwrap();
    let mut dev: f64 = 0.0;
    for _ in 0..20 {
        let p = l4.sample(&mut rng, 2.0);
        let m = assemble_dirac(&l4.instantiate(&p).unwrap(), &rep(4).unwrap()).unwrap();
        let c = p["mu12"].powi(2) + p["mu13"].powi(2) + p["l12"].powi(2);
        dev = dev.max((m.matrix() * m.matrix() - DMatrix::<f64>::identity(8, 8) * c).amax());
    }
    s.check("1", "dim 4: L4 square identity against the closed form", dev <= 1e-9);
    s.check("1", format!("dim 4: runtime {dim4_time:.2} s < 1 s"), dim4_time < 1.0);

    let t = Instant::now();
    let report = verify_paper(0);
    let suite_time = t.elapsed().as_secs_f64();

    s.check("2", "dim 5: (mu, v) table and 16D^2 = mu + v j1, 8 families x 20 bindings", claims_pass(&report, "dim5/v-table/"));
    let mut err: f64 = 0.0;
    for (name, p, v) in [
        ("N5,6", vec![("mu12", 0.7), ("mu34", -1.3)], [0.0, 0.0, 0.0, 0.0, 2.0 * 0.7 * -1.3]),
        ("N5,5", vec![("mu12", 1.1), ("mu13", 0.4)], [-2.0 * 1.1 * 0.4, 0.0, 0.0, 0.0, 0.0]),
        ("L4+A1", vec![("mu12", 0.5), ("l12", 0.3), ("l13", -1.5), ("mu14", 0.9)], [2.0 * 0.5 * 1.5, 0.0, 0.0, 0.0, 0.0]),
    ] {
        let inv = mu_v(&family(name).unwrap().instantiate(&bind(&p)).unwrap()).unwrap();
        let mu: f64 = p.iter().map(|(_, x)| x * x).sum();
        err = err.max((inv.mu - mu).abs());
        for i in 0..5 {
            err = err.max((inv.v[i] - v[i]).abs());
        }
    }
    s.check("2", "dim 5: worked (mu, v) values", err <= 1e-12);
    s.expect_fail("2", "dim 5: N5,3 row of the v-table as listed", listed_fails(&report, "dim5/v-table/N5,3/as-listed"));

    s.check("3", "dim 5: eigenvalues of 4D are -+sqrt(mu +- |v|), each twice", claims_pass(&report, "dim5/spectrum/"));

    s.check("4", "dim 5: harmonic iff the conditions hold (N5,6 N5,5 N5,4 N5,2 N5,1; N5,3 never)", claims_pass(&report, "dim5/harmonic/"));
    s.check("4", "dim 5: grid scan of N5,6 finds exactly |mu12| = |mu34|", claims_pass(&report, "dim5/scan/"));
    s.check(
        "4",
        "dim 5: N5,6 kernel 4 at mu12 = -mu34 = 1, 0 at mu34 = 2",
        kdim("N5,6", &[("mu12", 1.0), ("mu34", -1.0)]) == 4 && kdim("N5,6", &[("mu12", 1.0), ("mu34", 2.0)]) == 0,
    );
    s.expect_fail("4", "dim 5: N5,1 worked value mu23^2 as listed", listed_fails(&report, "dim5/harmonic/N5,1/listed-example"));

    s.check("5", "dim 5: v = -mu alpha# on every kernel spinor", claims_pass(&report, "dim5/alpha-v/"));

    s.check("6", "dim 5: SU(2) structures of the worked N5,6 and N5,5 examples", claims_pass(&report, "dim5/su2/"));
    s.expect_fail("6", "dim 5: N5,6 example triple as a quaternionic phase pattern", listed_fails(&report, "dim5/su2/N5,6/phase-pattern"));

    s.check(
        "7",
        "dim 5: Dirac and torsion component formulas against direct computation",
        claims_pass(&report, "dim5/dirac-components") && claims_pass(&report, "dim5/torsion-components"),
    );
    s.expect_fail("7", "dim 5: Dirac component formula with the listed sign", listed_fails(&report, "dim5/dirac-components/listed-sign"));
    s.expect_fail("7", "dim 5: tau_1 component formula with the listed epsilon", listed_fails(&report, "dim5/torsion-components/listed-epsilon"));

    s.check("8", "dim 6 decomposable: harmonic samples for every admitting family", claims_pass(&report, "dim6/harmonic/"));
    s.check("8", "dim 6 decomposable: L3+A3 and L4+A2 scans, >= 1e4 points, no hits, margin > 0.05", claims_pass(&report, "dim6/scan/"));
    s.expect_fail("8", "dim 6: L3+L3 branch 2 identity as displayed", listed_fails(&report, "dim6/harmonic/L3+L3/displayed-identity"));

    let t = Instant::now();
    let rows: Vec<_> = catalog().iter().filter(|f| f.group() == FamilyGroup::Dim6NonDecomposable).collect();
    let harmonic_rows = rows.iter().filter(|f| kdim(f.name(), &[]) > 0).count();
    let rows_time = t.elapsed().as_secs_f64();
    s.check("9", format!("dim 6 non-decomposable: {harmonic_rows}/{} rows harmonic", rows.len()), harmonic_rows == 24 && rows.len() == 24);
    s.check("9", format!("dim 6 non-decomposable: runtime {rows_time:.2} s < 5 s"), rows_time < 5.0);
    for name in ["N6,17", "N6,14", "N6,9", "N6,6"] {
        s.expect_fail(
            "9",
            format!("dim 6 non-decomposable: {name} instantiated verbatim"),
            listed_fails(&report, &format!("dim6/nondecomposable/{name}/as-listed")),
        );
    }

    s.check("10", "Spin(7) lift: harmonic lifts balanced, self-dual, Omega^Omega = 14 vol", claims_pass(&report, "spin7/lift/"));
    s.check("10", "Spin(7) lift: 20 non-harmonic controls have |tau1| > 1e-3", claims_pass(&report, "spin7/controls"));

    s.check("11", "representations: Clifford relations, quaternions, 2-form square identity, spinor identities", claims_pass(&report, "reps/"));

    let again = verify_paper(0);
    s.check("12", "verify-paper --seed 0 is byte-stable", report.to_json() == again.to_json());
    s.check("12", format!("verify-paper runtime {suite_time:.2} s < 60 s"), suite_time < 60.0);
    s.check("12", format!("all {} claims pass", report.claims.len()), report.all_pass());

    s.print_and_assert();
}
