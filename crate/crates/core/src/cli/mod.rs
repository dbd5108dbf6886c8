//! Command surface: `normalize`, `eval`, `check`, `nilpotent`, `split`.

mod parse;

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

pub use parse::{parse_manifold, parse_web, print_manifold, print_web};

use crate::error::{Error, Result};
use crate::eval::{
    format_complex, phi_direct, split_check, tau_check, trial_seed, Representation, DEFAULT_TOLERANCE,
};
use crate::groups::MarkedManifoldSpec;
use crate::ideals::{buchberger_in, is_nilpotent, manifold_generators, DEFAULT_BUDGET};
use crate::polyring::{parse_poly, Poly, Ring};
use crate::skein::{build_ring_with_budget, normalize, random_web, relation_suite, suite_word_len, SkeinRing, Web, WebShape};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_RESOURCE: i32 = 3;

/// Random webs drawn by `check` for the route-consistency row.
const CHECK_WEBS: usize = 10;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Normalize,
    Eval,
    Check,
    Nilpotent,
    Split,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Normalize => "normalize",
            Command::Eval => "eval",
            Command::Check => "check",
            Command::Nilpotent => "nilpotent",
            Command::Split => "split",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Text,
    Structured,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SessionConfig {
    pub command: Command,
    pub manifold: Option<PathBuf>,
    /// Web expression, or a path to a file holding one.
    pub web: Option<String>,
    pub poly: Option<String>,
    /// Ideal generators separated by `;` (nilpotent only).
    pub ideal: Option<String>,
    /// Representation file for `eval` instead of sampled points.
    pub rep: Option<PathBuf>,
    pub seed: u64,
    pub trials: usize,
    pub budget: usize,
    pub tol: f64,
    pub format: Format,
}

impl SessionConfig {
    pub fn new(command: Command) -> Self {
        SessionConfig {
            command,
            manifold: None,
            web: None,
            poly: None,
            ideal: None,
            rep: None,
            seed: 0,
            trials: 20,
            budget: DEFAULT_BUDGET,
            tol: DEFAULT_TOLERANCE,
            format: Format::Text,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunOutput {
    pub code: i32,
    pub output: String,
}

/// Report produced by a verb: text lines, the structured body, and whether
/// every check in it passed.
struct Report {
    text: String,
    body: Value,
    passed: bool,
}

pub fn exit_code(e: &Error) -> i32 {
    if e.is_resource() {
        EXIT_RESOURCE
    } else {
        EXIT_INPUT
    }
}

fn error_kind(e: &Error) -> &'static str {
    match e {
        Error::Parse { .. } => "parse",
        Error::Budget { .. } => "budget",
        Error::TermCap { .. } => "term-cap",
        Error::SizeLimit(_) => "size-limit",
        Error::Io(_) => "io",
        Error::Unsupported(_) => "unsupported",
        _ => "invalid-input",
    }
}

pub fn run(config: &SessionConfig) -> RunOutput {
    let result = if config.trials == 0 || config.budget == 0 || !(config.tol > 0.0) {
        Err(Error::InvalidSpec("trials, budget and tol must be positive".into()))
    } else {
        match config.command {
            Command::Normalize => cmd_normalize(config),
            Command::Eval => cmd_eval(config),
            Command::Check => cmd_check(config),
            Command::Nilpotent => cmd_nilpotent(config),
            Command::Split => cmd_split(config),
        }
    };
    let name = config.command.name();
    match result {
        Ok(r) => {
            let code = if r.passed { EXIT_OK } else { EXIT_FAILED };
            let output = match config.format {
                Format::Text => r.text,
                Format::Structured => {
                    let mut body = json!({ "command": name, "status": if r.passed { "ok" } else { "failed" } });
                    if let (Value::Object(dst), Value::Object(src)) = (&mut body, r.body) {
                        dst.extend(src);
                    }
                    format!("{}\n", serde_json::to_string_pretty(&body).expect("json"))
                }
            };
            RunOutput { code, output }
        }
        Err(e) => {
            let output = match config.format {
                Format::Text => format!("error: {e}\n"),
                Format::Structured => {
                    let mut err = json!({ "kind": error_kind(&e), "message": e.to_string() });
                    if let Error::Parse { line, column, .. } = &e {
                        err["line"] = json!(line);
                        err["column"] = json!(column);
                    }
                    if let Error::Budget { reductions, partial } = &e {
                        err["reductions"] = json!(reductions);
                        err["partial_basis"] = json!(partial.iter().map(|p| p.to_string()).collect::<Vec<_>>());
                    }
                    let body = json!({ "command": name, "status": "error", "error": err });
                    format!("{}\n", serde_json::to_string_pretty(&body).expect("json"))
                }
            };
            RunOutput { code: exit_code(&e), output }
        }
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path)
        .map_err(|e| Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display()))))
}

fn load_spec(config: &SessionConfig) -> Result<MarkedManifoldSpec> {
    let path = config.manifold.as_ref().ok_or_else(|| Error::InvalidSpec("--manifold is required".into()))?;
    parse_manifold(&read(path)?)
}

fn load_web(config: &SessionConfig, spec: &MarkedManifoldSpec) -> Result<Web> {
    let arg = config.web.as_ref().ok_or_else(|| Error::InvalidWeb("--web is required".into()))?;
    let path = Path::new(arg);
    if path.is_file() {
        parse_web(&read(path)?, spec)
    } else {
        parse_web(arg, spec)
    }
}

fn cmd_normalize(config: &SessionConfig) -> Result<Report> {
    let spec = load_spec(config)?;
    let web = load_web(config, &spec)?;
    let sr = build_ring_with_budget(&spec, config.budget)?;
    let p = normalize(&sr, &web)?;
    Ok(Report { text: format!("{p}\n"), body: json!({ "poly": p.to_string() }), passed: true })
}

fn cmd_eval(config: &SessionConfig) -> Result<Report> {
    let spec = load_spec(config)?;
    let web = load_web(config, &spec)?;
    let mut text = String::new();
    let mut values = Vec::new();
    let mut emit = |label: Value, tag: String, rep: &Representation| -> Result<()> {
        let z = phi_direct(&spec, &web, rep)?;
        let _ = writeln!(text, "{tag}: {}", format_complex(z));
        values.push(json!({ "point": label, "value": format_complex(z), "re": z.re, "im": z.im }));
        Ok(())
    };
    if let Some(path) = &config.rep {
        let rep = Representation::from_json(&read(path)?)?.with_tolerance(config.tol);
        let report = rep.validate(&spec)?;
        if !report.ok {
            return Err(Error::InvalidSpec(format!(
                "representation misses the constraint surface (det residual {:.1e}, constraint residual {:.1e})",
                report.det_residual, report.constraint_residual
            )));
        }
        emit(json!(path.display().to_string()), "rep".into(), &rep)?;
    } else {
        for t in 0..config.trials {
            let s = trial_seed(config.seed, t);
            emit(json!(s), format!("seed {s}"), &Representation::sample(&spec, s)?)?;
        }
    }
    Ok(Report { text, body: json!({ "values": values }), passed: true })
}

fn cmd_check(config: &SessionConfig) -> Result<Report> {
    let spec = load_spec(config)?;
    let sr = build_ring_with_budget(&spec, config.budget)?;
    let mut text = format!("manifold {}\n", print_manifold(&spec));
    let mut rows = Vec::new();
    let mut passed = true;
    if spec.markings > 0 {
        let report = relation_suite(&sr, config.trials, config.seed)?;
        text.push_str(&report.to_string());
        for c in &report.checks {
            passed &= c.passed();
            rows.push(json!({ "name": c.name, "instances": c.instances, "passed": c.passed(), "failures": c.failures }));
        }
    } else {
        text.push_str("relation suite               SKIP (no interval marking)\n");
    }
    let route = route_row(config, &sr)?;
    let _ = writeln!(text, "{}", route.0);
    passed &= route.1.get("passed").and_then(Value::as_bool).unwrap_or(true);
    let _ = writeln!(text, "result: {}", if passed { "PASS" } else { "FAIL" });
    Ok(Report { text, body: json!({ "manifold": print_manifold(&spec), "relations": rows, "route": route.1 }), passed })
}

/// Route consistency on the given web, or on random webs when none is given.
fn route_row(config: &SessionConfig, sr: &SkeinRing) -> Result<(String, Value)> {
    let spec = sr.spec();
    let webs = match &config.web {
        Some(_) => vec![load_web(config, spec)?],
        None if spec.markings == 0 => Vec::new(),
        None => {
            let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
            (0..CHECK_WEBS)
                .map(|i| {
                    let shape = WebShape {
                        max_components: 3,
                        max_word_len: suite_word_len(spec.n),
                        max_letters: 6,
                        vertices: if spec.n <= 3 { i % 3 } else { 0 },
                    };
                    random_web(&mut rng, spec, &shape)
                })
                .collect()
        }
    };
    let label = "route consistency";
    if webs.is_empty() {
        return Ok((format!("{label:<28} SKIP (no webs)"), json!({ "skipped": "no webs" })));
    }
    let mut worst: f64 = 0.0;
    for w in &webs {
        match tau_check(sr, w, config.trials, config.seed) {
            Ok(r) => worst = worst.max(r.max_deviation),
            Err(Error::Unsupported(msg)) => {
                return Ok((format!("{label:<28} SKIP ({msg})"), json!({ "skipped": msg })));
            }
            Err(e) => return Err(e),
        }
    }
    let ok = worst <= config.tol;
    let text = format!(
        "{label:<28} {:>5} webs       {} (max deviation {worst:.1e})",
        webs.len(),
        if ok { "PASS" } else { "FAIL" }
    );
    Ok((text, json!({ "webs": webs.len(), "seeds": config.trials, "max_deviation": worst, "passed": ok })))
}

/// Identifiers in polynomial text, for the scratch ring of `nilpotent`.
fn scratch_names(texts: &[&str]) -> Vec<String> {
    let mut names: Vec<String> = Vec::new();
    for t in texts {
        let mut cur = String::new();
        for c in t.chars().chain(std::iter::once(' ')) {
            if c.is_ascii_alphanumeric() || c == '_' {
                cur.push(c);
            } else {
                if cur.starts_with(|c: char| c.is_ascii_alphabetic() || c == '_') && !names.contains(&cur) {
                    names.push(cur.clone());
                }
                cur.clear();
            }
        }
    }
    names.sort();
    names
}

fn split_ideal(text: &str) -> Vec<&str> {
    text.split(';').map(str::trim).filter(|s| !s.is_empty()).collect()
}

fn cmd_nilpotent(config: &SessionConfig) -> Result<Report> {
    let poly_text = config.poly.as_deref().ok_or_else(|| Error::InvalidSpec("--poly is required".into()))?;
    let ideal_texts = config.ideal.as_deref().map(split_ideal).unwrap_or_default();
    let (ring, mut gens) = match &config.manifold {
        Some(_) => {
            let spec = load_spec(config)?;
            let ring = spec.ring();
            let gens = manifold_generators(&spec, &ring)?;
            (ring, gens)
        }
        None => {
            if ideal_texts.is_empty() {
                return Err(Error::InvalidSpec("nilpotent needs --manifold or --ideal".into()));
            }
            let mut all = ideal_texts.clone();
            all.push(poly_text);
            let names = scratch_names(&all);
            let refs: Vec<&str> = names.iter().map(String::as_str).collect();
            (Ring::scratch(&refs), Vec::new())
        }
    };
    for t in &ideal_texts {
        gens.push(parse_poly(&ring, t)?);
    }
    let p: Poly = parse_poly(&ring, poly_text)?;
    let gb = buchberger_in(&ring, &gens, config.budget)?;
    let verdict = is_nilpotent(&p, &gb, config.budget)?;
    Ok(Report { text: format!("{verdict}\n"), body: json!({ "poly": p.to_string(), "nilpotent": verdict }), passed: true })
}

fn cmd_split(config: &SessionConfig) -> Result<Report> {
    let spec = load_spec(config)?;
    let web = load_web(config, &spec)?;
    let report = split_check(&spec, &web, config.trials, config.seed)?;
    let image = &report.image;
    let cut_ring = build_ring_with_budget(&image.cut, config.budget)?;
    let nf = image.normalize(&cut_ring)?;
    let ok = report.residual <= config.tol;
    let mut text = format!("cut: {}\n", print_manifold(&image.cut));
    let mut factors = Vec::new();
    for (i, f) in image.factors.iter().enumerate() {
        let _ = writeln!(text, "component {}: {} term(s)", i + 1, f.len());
        let mut terms = Vec::new();
        for t in f {
            let _ = writeln!(text, "  {:+} {}", t.coeff, print_web(&t.web));
            terms.push(json!({ "coeff": t.coeff, "web": print_web(&t.web) }));
        }
        factors.push(terms);
    }
    let _ = writeln!(text, "image normal form: {nf}");
    let _ = writeln!(text, "residual: {:.3e} over {} seed(s)", report.residual, report.trials);
    let _ = writeln!(text, "result: {}", if ok { "PASS" } else { "FAIL" });
    let body = json!({
        "cut": print_manifold(&image.cut),
        "components": factors,
        "normal_form": nf.to_string(),
        "residual": report.residual,
        "seeds": report.trials,
    });
    Ok(Report { text, body, passed: ok })
}
