//! Command-line front end: model specs, expression parsing, dispatch and
//! reports. [`run`] is the whole program minus process plumbing.

pub mod expr;
pub mod report;
pub mod spec;

use std::path::Path;

use clap::{Parser, Subcommand};
use nijenhuis_core::complexes::{
    cohomology, default_window, lemma_check, phi_map, theorem313_crosscheck, CohomologyReport, Theory, Window,
};
use nijenhuis_core::derivations::identity_suite;
use nijenhuis_core::dolbeault::Dolbeault;
use nijenhuis_core::frames::FrameKind;
use nijenhuis_core::models::{builtin, AlmostComplexModel, BuiltinParams, CATALOG};
use serde_json::json;

use crate::expr::parse_expr;
use crate::report::{emit_report, table, Format, Report};
use crate::spec::{load_spec, ModelSpec};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "nijenhuis", version, about = "Exact cohomology of almost complex structures")]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value = "text", global = true)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args, Debug, Clone, Default)]
struct ModelArgs {
    /// Built-in model name or path to a JSON model spec.
    target: String,
    /// Parameter p of example27 (a function of x1).
    #[arg(long)]
    p: Option<String>,
    /// Parameter f of t4.
    #[arg(long)]
    f: Option<String>,
    /// Parameter g of t4.
    #[arg(long)]
    g: Option<String>,
    /// Dimension of flat_kahler_torus / abelian.
    #[arg(long)]
    n: Option<usize>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Parse and validate a JSON model spec.
    Validate { spec: String },
    /// List the built-in models.
    ListModels,
    /// Print the Nijenhuis tensor and the integrability verdict.
    Nijenhuis {
        #[command(flatten)]
        model: ModelArgs,
    },
    /// Run the seeded identity suite.
    Identities {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, default_value_t = 20)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Cohomology dimensions over a range of windows.
    Cohomology {
        #[command(flatten)]
        model: ModelArgs,
        /// deRham, J, N, Ntwist or dolbeault.
        #[arg(long)]
        theory: String,
        #[arg(long)]
        degree: usize,
        /// Inclusive window range `N0..N1` or a single `N` (torus models).
        #[arg(long)]
        windows: Option<String>,
    },
    /// Quotient (im L_J ∩ ker d) / im dL_J.
    Lemma {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long)]
        degree: usize,
        #[arg(long)]
        windows: Option<String>,
    },
    /// Rank of the natural map H^k_J → H^k_dR.
    Phi {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long)]
        degree: usize,
        #[arg(long)]
        windows: Option<String>,
    },
    /// Degree-by-degree table comparing the dL_J quotient with the φ criteria
    /// (plus the Dolbeault table on integrable invariant models).
    Crosscheck {
        #[command(flatten)]
        model: ModelArgs,
        /// Single window for torus models.
        #[arg(long)]
        window: Option<usize>,
    },
    /// Parse an expression and print its exact normal form.
    Parse {
        expr: String,
        #[arg(long, default_value_t = 4)]
        dim: usize,
    },
}

/// Failure of one invocation.
struct Failure {
    code: i32,
    message: String,
}

fn input<E: std::fmt::Display>(e: E) -> Failure {
    Failure { code: EXIT_INPUT, message: format!("error: {e}") }
}

type Outcome = Result<(Report, i32), Failure>;

/// Runs the program on `argv` (including the program name) and returns the
/// exit code and everything that would be printed.
pub fn run<I, T>(argv: I) -> (i32, String)
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            return (code, e.to_string());
        }
    };
    let format = cli.format;
    match dispatch(cli.command) {
        Ok((report, code)) => (code, emit_report(&report, format)),
        Err(f) => match format {
            Format::Text => (f.code, f.message + "\n"),
            Format::Json => {
                let r = Report::new(json!({"error": f.message, "exit_code": f.code}), None, String::new());
                (f.code, emit_report(&r, Format::Json))
            }
        },
    }
}

fn dispatch(cmd: Command) -> Outcome {
    match cmd {
        Command::Validate { spec } => validate(&spec),
        Command::ListModels => Ok((list_models(), EXIT_OK)),
        Command::Nijenhuis { model } => nijenhuis(&resolve(&model)?.0),
        Command::Identities { model, samples, seed } => identities(&resolve(&model)?.0, samples, seed),
        Command::Cohomology { model, theory, degree, windows } => {
            let (s, spec_windows) = resolve(&model)?;
            if theory.eq_ignore_ascii_case("dolbeault") {
                return dolbeault_cmd(&s, degree);
            }
            let theory: Theory = theory.parse().map_err(input)?;
            let ws = windows_for(&s, windows.as_deref(), spec_windows)?;
            cohomology_cmd(&s, theory, degree, &ws)
        }
        Command::Lemma { model, degree, windows } => {
            let (s, spec_windows) = resolve(&model)?;
            let ws = windows_for(&s, windows.as_deref(), spec_windows)?;
            lemma_cmd(&s, degree, &ws)
        }
        Command::Phi { model, degree, windows } => {
            let (s, spec_windows) = resolve(&model)?;
            let ws = windows_for(&s, windows.as_deref(), spec_windows)?;
            phi_cmd(&s, degree, &ws)
        }
        Command::Crosscheck { model, window } => {
            let (s, _) = resolve(&model)?;
            let w = match (s.model.kind(), window) {
                (FrameKind::LieAlgebra, None) => Window::Invariant,
                (FrameKind::LieAlgebra, Some(_)) => return Err(input("windows apply only to torus models")),
                (FrameKind::CoordinateTorus, w) => Window::Modes(w.unwrap_or(1)),
            };
            crosscheck_cmd(&s, w)
        }
        Command::Parse { expr, dim } => {
            let p = parse_expr(&expr, dim).map_err(input)?;
            let printed = p.to_real_string().expect("parsed expressions are real");
            let text = format!("{printed}\n");
            Ok((Report::new(json!({"input": expr, "dim": dim, "normal_form": printed}), None, text), EXIT_OK))
        }
    }
}

/// Builds the model named by `args`: a spec file if the target is an
/// existing path or ends in `.json`, otherwise a built-in.
fn resolve(args: &ModelArgs) -> Result<(AlmostComplexModel, Option<Vec<Window>>), Failure> {
    let is_file = args.target.ends_with(".json") || Path::new(&args.target).is_file();
    if is_file {
        if args.p.is_some() || args.f.is_some() || args.g.is_some() || args.n.is_some() {
            return Err(input("model parameters apply only to built-in models"));
        }
        let loaded = load_spec(&args.target).map_err(input)?;
        return Ok((loaded.model, Some(loaded.windows)));
    }
    let parse = |t: &Option<String>| t.as_deref().map(|e| parse_expr(e, 4)).transpose();
    let params = BuiltinParams {
        p: parse(&args.p).map_err(input)?,
        f: parse(&args.f).map_err(input)?,
        g: parse(&args.g).map_err(input)?,
        n: args.n,
    };
    Ok((builtin(&args.target, &params).map_err(input)?, None))
}

/// Parses `N0..N1` (inclusive) or `N`.
pub fn parse_windows(text: &str) -> Result<Vec<usize>, String> {
    let bad = || format!("bad window range '{text}' (expected N0..N1 or N)");
    let num = |s: &str| s.trim().parse::<usize>().map_err(|_| bad());
    match text.split_once("..") {
        Some((a, b)) => {
            let (a, b) = (num(a)?, num(b.trim_start_matches('='))?);
            if a > b {
                return Err(bad());
            }
            Ok((a..=b).collect())
        }
        None => Ok(vec![num(text)?]),
    }
}

fn windows_for(s: &AlmostComplexModel, text: Option<&str>, from_spec: Option<Vec<Window>>) -> Result<Vec<Window>, Failure> {
    match (s.model.kind(), text) {
        (FrameKind::LieAlgebra, None) => Ok(vec![Window::Invariant]),
        (FrameKind::LieAlgebra, Some(_)) => Err(input("windows apply only to torus models")),
        (FrameKind::CoordinateTorus, Some(t)) => {
            Ok(parse_windows(t).map_err(input)?.into_iter().map(Window::Modes).collect())
        }
        (FrameKind::CoordinateTorus, None) => Ok(from_spec.unwrap_or_else(|| vec![default_window(&s.model)])),
    }
}

fn validate(path: &str) -> Outcome {
    let text = std::fs::read_to_string(path).map_err(|e| input(format!("cannot read {path}: {e}")))?;
    let loaded = ModelSpec::from_json(&text).and_then(|m| m.build()).map_err(input)?;
    let s = &loaded.model;
    let body = json!({
        "model": s.name(),
        "dim": s.dim(),
        "kind": s.model.kind(),
        "integrable": s.is_integrable(),
        "valid": true,
    });
    let text = format!(
        "{}: valid {:?} model of dimension {}; J is {}\n",
        s.name(),
        s.model.kind(),
        s.dim(),
        if s.is_integrable() { "integrable" } else { "not integrable" }
    );
    Ok((Report::new(body, None, text), EXIT_OK))
}

fn list_models() -> Report {
    let rows: Vec<Vec<String>> = CATALOG
        .iter()
        .map(|e| vec![e.name.to_string(), e.aliases.join(","), e.params.to_string(), e.origin.to_string()])
        .collect();
    let mut text = table(&["name", "aliases", "parameters", "origin"], &rows);
    for e in CATALOG {
        text.push_str(&format!("\n{}: {}", e.name, e.description));
    }
    text.push('\n');
    Report::new(json!({ "models": CATALOG }), None, text)
}

fn nijenhuis(s: &AlmostComplexModel) -> Outcome {
    let n = s.dim();
    let mut comps = Vec::new();
    let mut text = format!("model {}\n", s.name());
    for i in 0..n {
        for j in i + 1..n {
            let value: Vec<String> = (0..n).map(|r| s.n.part(r).component(&[i, j]).to_string()).collect();
            if value.iter().all(|v| v == "0") {
                continue;
            }
            let terms: Vec<String> = value
                .iter()
                .enumerate()
                .filter(|(_, v)| *v != "0")
                .map(|(r, v)| format!("({v}) e{}", r + 1))
                .collect();
            text.push_str(&format!("N(e{}, e{}) = {}\n", i + 1, j + 1, terms.join(" + ")));
            comps.push(json!({"i": i + 1, "j": j + 1, "value": value}));
        }
    }
    let integrable = s.is_integrable();
    text.push_str(if integrable { "N = 0: integrable\n" } else { "N != 0: not integrable\n" });
    let body = json!({"model": s.name(), "integrable": integrable, "components": comps});
    Ok((Report::new(body, None, text), EXIT_OK))
}

fn identities(s: &AlmostComplexModel, samples: usize, seed: u64) -> Outcome {
    let rep = identity_suite(&s.j, samples, seed, None).map_err(input)?;
    let rows: Vec<Vec<String>> = rep
        .results
        .iter()
        .map(|r| {
            vec![
                r.name.clone(),
                r.checks.to_string(),
                if r.passed { "pass".into() } else { "FAIL".into() },
                r.counterexample.clone().unwrap_or_default(),
            ]
        })
        .collect();
    let text = format!("model {} (seed {seed}, {samples} samples per degree)\n", s.name())
        + &table(&["identity", "checks", "result", "counterexample"], &rows);
    let code = if rep.all_passed() { EXIT_OK } else { EXIT_CHECK_FAILED };
    let mut body = serde_json::to_value(&rep).expect("serializable");
    body["passed"] = json!(rep.all_passed());
    Ok((Report::new(body, Some(seed), text), code))
}

fn window_rows(rep: &CohomologyReport) -> Vec<Vec<String>> {
    let opt = |o: Option<i64>| o.map_or("-".to_string(), |v| v.to_string());
    rep.windows
        .iter()
        .map(|w| {
            vec![
                w.window.to_string(),
                w.numerator_dim.to_string(),
                w.denominator_dim.to_string(),
                w.dim.to_string(),
                opt(w.codomain_window),
                opt(w.image_domain_window),
            ]
        })
        .collect()
}

const WINDOW_HEADER: [&str; 6] = ["N", "numerator", "denominator", "dim", "codomain N", "image-domain N"];

fn cohomology_cmd(s: &AlmostComplexModel, theory: Theory, k: usize, ws: &[Window]) -> Outcome {
    let rep = cohomology(s, theory, k, ws).map_err(input)?;
    let exact = ws.iter().all(|w| *w == Window::Invariant);
    let mut verdicts = json!({"exact": exact, "stabilized": rep.stabilized});
    let mut text = format!("H^{k}_{theory} of {}\n", s.name()) + &table(&WINDOW_HEADER, &window_rows(&rep));
    if theory == Theory::J {
        if let Some(&w) = ws.last() {
            let phi = phi_map(s, k, w).map_err(input)?;
            text.push_str(&format!(
                "phi^{k} at window {w}: rank {} ({} -> {}), injective {}, surjective {}\n",
                phi.rank, phi.source_dim, phi.target_dim, phi.injective, phi.surjective
            ));
            verdicts["phi"] = serde_json::to_value(&phi).expect("serializable");
        }
    }
    text.push_str(&format!(
        "{}\n",
        if exact {
            "exact (invariant complex)".to_string()
        } else if rep.stabilized {
            "stabilized over the last two windows (evidence, not proof)".to_string()
        } else {
            "not stabilized over the windows computed".to_string()
        }
    ));
    let reps: Vec<String> = rep.representatives.iter().map(|f| f.to_string()).collect();
    if !reps.is_empty() {
        text.push_str(&format!("representatives: {}\n", reps.join(", ")));
    }
    let mut body = serde_json::to_value(&rep).expect("serializable");
    body["verdicts"] = verdicts;
    body["representatives"] = json!(reps);
    Ok((Report::new(body, None, text), EXIT_OK))
}

fn dolbeault_cmd(s: &AlmostComplexModel, k: usize) -> Outcome {
    let d = Dolbeault::new(s).map_err(input)?;
    let (num, den) = d.dolbeault_parts(k).map_err(input)?;
    let psi = d.psi_map(k).map_err(input)?;
    let body = json!({
        "model": s.name(),
        "theory": "dolbeault",
        "degree": k,
        "windows": [{"N": "invariant", "numerator_dim": num, "denominator_dim": den, "dim": num - den}],
        "stabilized": true,
        "verdicts": {"exact": true, "psi": psi},
    });
    let text = format!(
        "H^{k}_dbar of {} (complex dimension): {} = {num} - {den}\npsi^{k}: rank {} ({} -> {}), injective {}, surjective {}\n",
        s.name(),
        num - den,
        psi.rank,
        psi.source_dim,
        psi.target_dim,
        psi.injective,
        psi.surjective
    );
    Ok((Report::new(body, None, text), EXIT_OK))
}

fn lemma_cmd(s: &AlmostComplexModel, k: usize, ws: &[Window]) -> Outcome {
    let mut rows = Vec::new();
    let mut out = Vec::new();
    for &w in ws {
        let q = lemma_check(s, k, w).map_err(input)?;
        rows.push(vec![w.to_string(), q.to_string()]);
        out.push(json!({"N": w, "dim": q}));
    }
    let holds = out.iter().all(|v| v["dim"] == 0);
    let text = format!("(im L_J ∩ ker d)/im dL_J in degree {k} of {}\n", s.name())
        + &table(&["N", "quotient dim"], &rows)
        + &format!("dL_J-lemma in degree {k}: {}\n", if holds { "holds" } else { "fails" });
    let body = json!({"model": s.name(), "degree": k, "windows": out, "verdicts": {"lemma_holds": holds}});
    Ok((Report::new(body, None, text), EXIT_OK))
}

fn phi_cmd(s: &AlmostComplexModel, k: usize, ws: &[Window]) -> Outcome {
    let mut rows = Vec::new();
    let mut out = Vec::new();
    for &w in ws {
        let m = phi_map(s, k, w).map_err(input)?;
        rows.push(vec![
            w.to_string(),
            m.rank.to_string(),
            m.source_dim.to_string(),
            m.target_dim.to_string(),
            m.injective.to_string(),
            m.surjective.to_string(),
        ]);
        let mut v = serde_json::to_value(&m).expect("serializable");
        v["N"] = json!(w);
        out.push(v);
    }
    let text = format!("phi^{k}: H^{k}_J -> H^{k}_dR on {}\n", s.name())
        + &table(&["N", "rank", "dim H_J", "dim H_dR", "injective", "surjective"], &rows);
    let body = json!({"model": s.name(), "degree": k, "windows": out});
    Ok((Report::new(body, None, text), EXIT_OK))
}

fn crosscheck_cmd(s: &AlmostComplexModel, w: Window) -> Outcome {
    let rep = theorem313_crosscheck(s, w).map_err(input)?;
    let yn = |b: bool| if b { "yes" } else { "no" }.to_string();
    let rows: Vec<Vec<String>> = rep
        .rows
        .iter()
        .map(|r| {
            vec![
                r.degree.to_string(),
                r.lemma_quotient.to_string(),
                yn(r.lemma_holds),
                yn(r.phi_injective),
                yn(r.phi_prev_surjective),
                yn(r.criteria_hold),
                yn(r.agree),
            ]
        })
        .collect();
    let mut text = format!("dL_J-lemma vs phi criteria on {} (window {w})\n", s.name())
        + &table(&["k", "quotient", "lemma", "phi^k inj", "phi^(k-1) surj", "criteria", "agree"], &rows);
    let mut ok = rep.passed();
    text.push_str(&format!("violations: {:?}\n", rep.violations));
    let mut body = serde_json::to_value(&rep).expect("serializable");
    body["passed"] = json!(rep.passed());
    if s.model.kind() == FrameKind::LieAlgebra && s.is_integrable() {
        let d = Dolbeault::new(s).map_err(input)?;
        let drep = d.crosscheck().map_err(input)?;
        let rows: Vec<Vec<String>> = drep
            .rows
            .iter()
            .map(|r| {
                vec![
                    r.degree.to_string(),
                    r.dolbeault_dim.to_string(),
                    format!("{}/{}->{}", r.psi.rank, r.psi.source_dim, r.psi.target_dim),
                    r.ddbar_quotient.to_string(),
                    r.psi_quotient.to_string(),
                    yn(r.psi_criteria_hold),
                    yn(r.agrees_with_ddbar),
                    format!("{}={}", r.twist_quotients.0, r.twist_quotients.1),
                    yn(r.parity_interchanges),
                ]
            })
            .collect();
        text.push_str("\nDolbeault layer (complex dimensions)\n");
        text.push_str(&table(
            &["k", "dim H_dbar", "psi rank", "ddbar quot", "psi quot", "psi criteria", "agree", "twist quots", "P swaps"],
            &rows,
        ));
        text.push_str(&format!("dolbeault checks: {}\n", if drep.passed() { "pass" } else { "FAIL" }));
        ok &= drep.passed();
        body["dolbeault"] = serde_json::to_value(&drep).expect("serializable");
        body["dolbeault"]["passed"] = json!(drep.passed());
    }
    Ok((Report::new(body, None, text), if ok { EXIT_OK } else { EXIT_CHECK_FAILED }))
}
