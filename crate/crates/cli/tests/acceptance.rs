//! Acceptance suite: one PASS/FAIL line per criterion.

mod common;

use std::time::Instant;

use nijenhuis_cli::expr::{eval_trig, parse_ast, parse_expr, print_expr};
use nijenhuis_core::coeffring::{rat, GaussianRational as GR, TrigPoly};
use nijenhuis_core::complexes::{
    cohomology, lemma_check, phi_map, theorem313_crosscheck, Theory, Window,
};
use nijenhuis_core::derivations::{identity_suite, IDENTITY_NAMES};
use nijenhuis_core::dolbeault::Dolbeault;
use nijenhuis_core::frames::{multi_indices, FrameKind, VectorField};
use nijenhuis_core::linalg::{kernel_basis, ExactMatrix, SparseVec};
use nijenhuis_core::models::{
    abelian, catalog_defaults, example27, flat_kahler_torus, iwasawa, kodaira_thurston, t4_nonstandard,
    AlmostComplexModel,
};
use num_traits::{One, Zero};

type Outcome = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn sin(m: [i64; 4]) -> TrigPoly {
    TrigPoly::sin_mode(m.to_vec())
}

fn cos(m: [i64; 4]) -> TrigPoly {
    TrigPoly::cos_mode(m.to_vec())
}

fn cst(r: (i64, i64)) -> TrigPoly {
    TrigPoly::from_rational(4, rat(r.0, r.1))
}

fn dims(s: &AlmostComplexModel, theory: Theory, k: usize, ws: &[Window]) -> Result<Vec<usize>, String> {
    cohomology(s, theory, k, ws).map(|r| r.dims()).map_err(|e| e.to_string())
}

fn modes(ns: &[usize]) -> Vec<Window> {
    ns.iter().map(|&n| Window::Modes(n)).collect()
}

/// `N(e_i, e_j)` as a vector field, 1-based.
fn n_at(s: &AlmostComplexModel, i: usize, j: usize) -> VectorField {
    s.n.eval_frame(&[i - 1, j - 1])
}

fn field(s: &AlmostComplexModel, a: TrigPoly, b: TrigPoly) -> VectorField {
    let z = TrigPoly::zero(4);
    VectorField::new(&s.model, vec![a, b, z.clone(), z])
}

fn criterion_1() -> Outcome {
    let p = sin([1, 0, 0, 0]);
    let dp = p.try_partial(1).unwrap();
    let s = example27(p.clone()).map_err(|e| e.to_string())?;
    let zero = TrigPoly::zero(4);
    let expected = [
        ((1, 2), field(&s, zero.clone(), zero.clone())),
        ((1, 3), field(&s, zero.clone(), -&dp)),
        ((1, 4), field(&s, dp.clone(), zero.clone())),
        ((2, 3), field(&s, -&dp, zero.clone())),
        ((2, 4), field(&s, zero.clone(), -&dp)),
        ((3, 4), field(&s, zero.clone(), -&(&p * &dp))),
    ];
    for ((i, j), v) in &expected {
        ensure(n_at(&s, *i, *j) == *v, || format!("example27 N{i}{j} mismatch"))?;
    }
    // t4 fixtures: the required one plus two with both A and B nonzero
    let cases = [
        (sin([1, 0, 0, 0]), TrigPoly::zero(4)),
        (cos([0, 1, 0, 0]), sin([1, 0, 1, 0])),
        (&sin([1, 1, 0, 0]) + &cst((1, 2)), cos([2, 0, 0, 1])),
    ];
    for (f, g) in cases {
        let s = t4_nonstandard(f.clone(), g.clone()).map_err(|e| e.to_string())?;
        let a = &f.try_partial(2).unwrap() + &g.try_partial(1).unwrap();
        let b = &f.try_partial(1).unwrap() - &g.try_partial(2).unwrap();
        let n13 = field(&s, a.clone(), -&b);
        let n14 = field(&s, b.clone(), a.clone());
        let n34 = field(&s, &(&f * &a) - &(&g * &b), -&(&(&f * &b) + &(&g * &a)));
        let ok = n_at(&s, 1, 2).is_zero()
            && n_at(&s, 1, 3) == n13
            && n_at(&s, 2, 4) == n13
            && n_at(&s, 1, 4) == n14
            && n_at(&s, 2, 3) == n14.neg()
            && n_at(&s, 3, 4) == n34;
        ensure(ok, || format!("t4 fixture mismatch for f = {f}, g = {g}"))?;
    }
    Ok("example27 (p = sin x1) and t4 (A = 0, B = cos x1, plus 2 general f, g) match term for term".into())
}

fn criterion_2() -> Outcome {
    let mut total = 0;
    for s in catalog_defaults() {
        let rep = identity_suite(&s.j, 20, 2024, None).map_err(|e| e.to_string())?;
        ensure(rep.results.len() == IDENTITY_NAMES.len(), || "missing identity family".into())?;
        for r in &rep.results {
            ensure(r.passed, || format!("{}: {} failed: {:?}", s.name(), r.name, r.counterexample))?;
            total += r.checks;
        }
    }
    Ok(format!("7 families x 20 samples per degree on 6 catalog models, {total} exact checks"))
}

fn criterion_3() -> Outcome {
    let ps: Vec<(TrigPoly, bool)> = vec![
        (TrigPoly::zero(4), true),
        (cst((3, 2)), true),
        (sin([1, 0, 0, 0]), false),
        (cos([2, 0, 0, 0]), false),
        (&cst((1, 1)) + &sin([3, 0, 0, 0]), false),
    ];
    for (p, constant) in ps {
        let s = example27(p.clone()).map_err(|e| e.to_string())?;
        ensure(s.is_integrable() == constant, || format!("example27 p = {p}"))?;
    }
    let fs: Vec<(TrigPoly, bool)> = vec![
        (cst((1, 2)), true),
        (TrigPoly::zero(4), true),
        (sin([0, 0, 1, 0]), true),
        (&cos([0, 0, 1, 1]) + &cst((2, 1)), true),
        (sin([1, 0, 0, 0]), false),
        (cos([0, 1, 0, 0]), false),
        (sin([1, 0, 1, 0]), false),
    ];
    let mut count = 0;
    for (f, fc) in &fs {
        for (g, gc) in &fs {
            let s = t4_nonstandard(f.clone(), g.clone()).map_err(|e| e.to_string())?;
            ensure(s.is_integrable() == (*fc && *gc), || format!("t4 f = {f}, g = {g}"))?;
            count += 1;
        }
    }
    Ok(format!("example27: 5 parameters; t4: {count} (f, g) pairs; N = 0 exactly when independent of x1, x2"))
}

fn criterion_4() -> Outcome {
    let s = flat_kahler_torus(4).map_err(|e| e.to_string())?;
    let mut betti = Vec::new();
    for k in 0..=4 {
        let d = dims(&s, Theory::DeRham, k, &modes(&[1, 2]))?;
        ensure(d[0] == d[1], || format!("degree {k} differs across windows: {d:?}"))?;
        betti.push(d[0]);
    }
    ensure(betti == [1, 4, 6, 4, 1], || format!("got {betti:?}"))?;
    Ok(format!("T^4 de Rham = {betti:?} at N = 1, 2"))
}

fn criterion_5() -> Outcome {
    let s = example27(sin([1, 0, 0, 0])).map_err(|e| e.to_string())?;
    let rep = cohomology(&s, Theory::N, 1, &modes(&[1, 2, 3])).map_err(|e| e.to_string())?;
    ensure(rep.dims() == [2, 2, 2] && rep.stabilized, || format!("got {:?}", rep.dims()))?;
    Ok("dim H^1_N = [2, 2, 2] at N = 1, 2, 3, stabilized".into())
}

fn criterion_6() -> Outcome {
    let ws = modes(&[1, 2, 3]);
    let s = t4_nonstandard(sin([1, 0, 0, 0]), TrigPoly::zero(4)).map_err(|e| e.to_string())?;
    let a = dims(&s, Theory::J, 1, &ws)?;
    ensure(a == [2, 2, 2], || format!("nonintegrable: {a:?}"))?;
    let s = t4_nonstandard(cst((1, 2)), cst((2, 1))).map_err(|e| e.to_string())?;
    let b = dims(&s, Theory::J, 1, &ws)?;
    ensure(b == [4, 4, 4], || format!("constant f, g: {b:?}"))?;
    Ok(format!("H^1_J: f = sin x1, g = 0 -> {a:?}; f = 1/2, g = 2 -> {b:?}"))
}

fn default_windows(s: &AlmostComplexModel) -> Vec<Window> {
    match s.model.kind() {
        FrameKind::LieAlgebra => vec![Window::Invariant],
        FrameKind::CoordinateTorus => modes(&[1, 2]),
    }
}

fn criterion_7() -> Outcome {
    let models = catalog_defaults();
    for s in &models {
        let ws = default_windows(s);
        let j = dims(s, Theory::J, 0, &ws)?;
        let d = dims(s, Theory::DeRham, 0, &ws)?;
        ensure(j.iter().chain(&d).all(|&x| x == 1), || format!("{}: J {j:?}, dR {d:?}", s.name()))?;
    }
    Ok(format!("H^0_J = H^0_dR = 1 on all {} catalog models", models.len()))
}

fn criterion_8() -> Outcome {
    let tori = vec![
        flat_kahler_torus(4).map_err(|e| e.to_string())?,
        example27(cst((3, 1))).map_err(|e| e.to_string())?,
        t4_nonstandard(sin([0, 0, 1, 0]), cos([0, 0, 0, 1])).map_err(|e| e.to_string())?,
    ];
    for s in &tori {
        ensure(s.is_integrable(), || format!("{} should be integrable", s.name()))?;
        for k in 0..=4 {
            let n = dims(s, Theory::N, k, &modes(&[1, 2]))?;
            let d = dims(s, Theory::DeRham, k, &modes(&[1, 2]))?;
            ensure(n == d, || format!("{} degree {k}: N {n:?} vs dR {d:?}", s.name()))?;
        }
    }
    let lie = vec![
        abelian(4).map_err(|e| e.to_string())?,
        kodaira_thurston().map_err(|e| e.to_string())?,
        iwasawa().map_err(|e| e.to_string())?,
    ];
    for s in &lie {
        for k in 0..=s.dim() {
            let w = [Window::Invariant];
            let d = dims(s, Theory::DeRham, k, &w)?;
            let n = dims(s, Theory::N, k, &w)?;
            let t = dims(s, Theory::Ntwist, k, &w)?;
            ensure(n == d && t == d, || format!("{} degree {k}: dR {d:?}, N {n:?}, Ntwist {t:?}", s.name()))?;
        }
    }
    Ok("theory N = de Rham on 3 integrable tori (N = 1, 2, all degrees); N and Ntwist = de Rham on 3 invariant models".into())
}

/// `H^1_J` of the Iwasawa algebra from its structure equations alone:
/// `α = Σ a_i e^i` with `dα = 0` and `d(ι_J α) = 0` (on 1-forms
/// `L_J α = ι_J dα - d ι_J α`, and `d` of invariant functions vanishes).
fn iwasawa_h1j_oracle() -> usize {
    let pairs = multi_indices(6, 2);
    let row = |i: usize, j: usize| pairs.iter().position(|p| *p == [i, j]).unwrap();
    // de5 = e24 - e13, de6 = -e14 - e23 (0-based: e^4 and e^5)
    let mut d1 = vec![vec![GR::zero(); 6]; pairs.len()];
    d1[row(1, 3)][4] = GR::one();
    d1[row(0, 2)][4] = -GR::one();
    d1[row(0, 3)][5] = -GR::one();
    d1[row(1, 2)][5] = -GR::one();
    let d = ExactMatrix::from_dense(&d1);
    // ι_J e^a = e^a ∘ J with J e1 = e2, J e3 = e4, J e5 = e6
    let mut jt = vec![vec![GR::zero(); 6]; 6];
    for b in 0..3 {
        jt[2 * b][2 * b + 1] = -GR::one();
        jt[2 * b + 1][2 * b] = GR::one();
    }
    let jt = ExactMatrix::from_dense(&jt);
    let djt = d.mul(&jt);
    let rows: Vec<SparseVec> = d.row_vectors().iter().chain(djt.row_vectors()).cloned().collect();
    kernel_basis(&ExactMatrix::from_rows(6, rows)).dim()
}

fn criterion_9() -> Outcome {
    let s = iwasawa().map_err(|e| e.to_string())?;
    let w = [Window::Invariant];
    let b1 = dims(&s, Theory::DeRham, 1, &w)?[0];
    ensure(b1 == 4, || format!("b1 = {b1}"))?;
    let h1j = dims(&s, Theory::J, 1, &w)?[0];
    let oracle = iwasawa_h1j_oracle();
    ensure(h1j == oracle, || format!("H^1_J = {h1j} but the oracle gives {oracle}"))?;
    let phi = phi_map(&s, 1, Window::Invariant).map_err(|e| e.to_string())?;
    ensure(phi.injective, || "phi^1 not injective".into())?;
    let quotients: Vec<usize> =
        (0..=6).map(|k| lemma_check(&s, k, Window::Invariant)).collect::<Result<_, _>>().map_err(|e| e.to_string())?;
    let certifying = quotients.iter().position(|&q| q > 0).ok_or("no degree with nonzero quotient")?;
    const CLAIMED: usize = 2;
    let note = if h1j == CLAIMED {
        "agrees with the literature value 2".to_string()
    } else {
        format!("DISCREPANCY: literature states span{{dx1, dx3}} (dim {CLAIMED}), exact computation and oracle give {h1j}")
    };
    Ok(format!(
        "b1 = 4; H^1_J = {h1j} (oracle {oracle}), phi^1 injective (rank {}/{}); {note}; dL_J quotients {quotients:?}, certifying degree {certifying}",
        phi.rank, phi.target_dim
    ))
}

fn criterion_10() -> Outcome {
    let mut summary = Vec::new();
    for s in [abelian(4), kodaira_thurston(), iwasawa()] {
        let s = s.map_err(|e| e.to_string())?;
        let rep = theorem313_crosscheck(&s, Window::Invariant).map_err(|e| e.to_string())?;
        ensure(rep.passed(), || format!("{}: violations in degrees {:?}", s.name(), rep.violations))?;
        let q: Vec<usize> = rep.rows.iter().map(|r| r.lemma_quotient).collect();
        summary.push(format!("{} {q:?}", s.name()));
    }
    Ok(format!("equivalence holds in every degree; quotients: {}", summary.join(", ")))
}

fn criterion_11() -> Outcome {
    let s = iwasawa().map_err(|e| e.to_string())?;
    // construction verifies P² = I, L_J P = -iPd, d = ∂ + ∂̄, ∂² = ∂̄² = 0 exactly
    let d = Dolbeault::new(&s).map_err(|e| e.to_string())?;
    let rep = d.crosscheck().map_err(|e| e.to_string())?;
    for r in &rep.rows {
        ensure(r.twist_quotients.0 == r.twist_quotients.1, || format!("degree {}: {:?}", r.degree, r.twist_quotients))?;
        ensure(r.parity_interchanges, || format!("degree {}: P does not swap the subspaces", r.degree))?;
        ensure(r.agrees_with_ddbar, || format!("degree {}: psi criteria vs ddbar quotient disagree", r.degree))?;
        ensure(r.kernel_mismatches == 0, || format!("degree {}: del != delbar on ker L_J", r.degree))?;
    }
    let q: Vec<usize> = rep.rows.iter().map(|r| r.ddbar_quotient).collect();
    let h: Vec<usize> = rep.rows.iter().map(|r| r.dolbeault_dim).collect();
    Ok(format!("P^2 = I, L_J P = -iPd, twist quotients equal; ddbar quotients {q:?}; H_dbar {h:?}"))
}

fn criterion_12() -> Outcome {
    let corpus = common::corpus(200, 11);
    let points = common::sample_points(100, 5);
    let mut worst = 0f64;
    for text in &corpus {
        let ast = parse_ast(text, common::DIM).map_err(|e| format!("{text}: {e}"))?;
        let p = ast.to_trig(common::DIM);
        let printed = print_expr(&p).ok_or("printed form not real")?;
        let q = parse_expr(&printed, common::DIM).map_err(|e| format!("{printed}: {e}"))?;
        ensure(p == q, || format!("round trip changed {text}"))?;
        for x in &points {
            worst = worst.max((ast.eval_f64(x) - eval_trig(&p, x)).abs());
        }
    }
    ensure(worst < 1e-10, || format!("max deviation {worst:e}"))?;
    Ok(format!("200 expressions round-trip; max |delta| over 100 points each = {worst:.1e}"))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 12] = [
        ("Nijenhuis fixtures", criterion_1),
        ("identity suite on the catalog", criterion_2),
        ("integrability detection", criterion_3),
        ("truncated de Rham of T^4", criterion_4),
        ("H^1_N of the example27 torus", criterion_5),
        ("H^1_J of the t4 structures", criterion_6),
        ("H^0_J = H^0_dR", criterion_7),
        ("N / Ntwist agree with de Rham when integrable", criterion_8),
        ("Iwasawa invariant complex", criterion_9),
        ("dL_J-lemma vs phi criteria", criterion_10),
        ("Dolbeault layer on Iwasawa", criterion_11),
        ("expression parser", criterion_12),
    ];
    let mut failed = Vec::new();
    for (i, (name, f)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let r = f();
        let secs = t.elapsed().as_secs_f64();
        match r {
            Ok(detail) => println!("AC{:02} PASS {name} ({secs:.2}s): {detail}", i + 1),
            Err(why) => {
                println!("AC{:02} FAIL {name} ({secs:.2}s): {why}", i + 1);
                failed.push(i + 1);
            }
        }
    }
    if failed.is_empty() {
        println!("acceptance: all {} criteria passed", criteria.len());
    } else {
        println!("acceptance: failed criteria {failed:?}");
        std::process::exit(1);
    }
}
