//! Batch front end: loads algebra, twist and tensor files, runs one checker
//! and renders a text report plus a canonical JSON document.

use std::path::PathBuf;
use std::sync::Arc;

use serde_json::{json, Map, Value};

use gq_core::classical::{assemble_pi, classical_theta, schouten_jacobi, BivectorFile, Multivector};
use gq_core::dynamical::{
    bridge, build_gutt_twistor, check_equivalence, dyn_check, dyn_check_invariance, exchange_r,
    random_invariant_twists, DynTermFile, DynTwist,
};
use gq_core::fixtures;
use gq_core::groupoid::{check_twistor, HTensor, HTensorTermFile, TwistorReport};
use gq_core::io::{poly_to_terms, to_canonical_json};
use gq_core::lie::{LieAlgebraPair, Polarization};
use gq_core::rational::{format_rational, parse_rational};
use gq_core::report::{utensor_to_file, Residual, PASS_TEXT};
use gq_core::{CoeffMode, CoeffRing, Context, Error, Rational};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    CheckJacobi,
    Polarization,
    CheckDynTwist,
    CheckInvariance,
    GuttTwistor,
    Bridge,
    CheckTwistor,
    Equivalence,
    ExchangeR,
    ClassicalLimit,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::CheckJacobi => "check-jacobi",
            Command::Polarization => "polarization",
            Command::CheckDynTwist => "check-dyn-twist",
            Command::CheckInvariance => "check-invariance",
            Command::GuttTwistor => "gutt-twistor",
            Command::Bridge => "bridge",
            Command::CheckTwistor => "check-twistor",
            Command::Equivalence => "equivalence",
            Command::ExchangeR => "exchange-r",
            Command::ClassicalLimit => "classical-limit",
        }
    }
}

/// Where an input comes from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Source {
    File(PathBuf),
    Bundled(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ModeConfig {
    Exact,
    Jet { base_point: Vec<Rational>, degree: u32 },
}

#[derive(Clone, Debug)]
pub struct RunConfig {
    pub command: Command,
    pub order: u32,
    pub mode: ModeConfig,
    pub algebra: Option<Source>,
    pub twist: Option<Source>,
    pub tensor: Option<PathBuf>,
    pub theta: Option<PathBuf>,
    /// Random l-invariant inputs instead of a twist file.
    pub random: Option<usize>,
    pub seed: u64,
    pub coeff_degree: u32,
    pub leg_degree: u32,
    pub u_plus: Option<Vec<usize>>,
    pub u_minus: Option<Vec<usize>>,
    /// Artifact output (tensor or twist file), separate from the report.
    pub out: Option<PathBuf>,
}

impl RunConfig {
    pub fn new(command: Command) -> Self {
        RunConfig {
            command,
            order: 2,
            mode: ModeConfig::Exact,
            algebra: None,
            twist: None,
            tensor: None,
            theta: None,
            random: None,
            seed: 0,
            coeff_degree: 2,
            leg_degree: 2,
            u_plus: None,
            u_minus: None,
            out: None,
        }
    }
}

/// Exit code, human-readable text and the JSON report.
#[derive(Clone, Debug)]
pub struct Outcome {
    pub code: i32,
    pub text: String,
    pub json: Value,
}

impl Outcome {
    pub fn json_text(&self) -> String {
        to_canonical_json(&self.json).expect("reports serialize")
    }
}

/// Parses `"1,-2/3"` into a base point.
pub fn parse_point(s: &str) -> gq_core::Result<Vec<Rational>> {
    if s.trim().is_empty() {
        return Ok(Vec::new());
    }
    s.split(',').map(|t| parse_rational(t.trim())).collect()
}

/// Runs one command. Input errors become exit code 2 with the message in
/// both documents.
pub fn run(config: &RunConfig) -> Outcome {
    match execute(config) {
        Ok(out) => out,
        Err(e) => {
            let kind = match e {
                Error::Hypothesis(_) => "hypothesis",
                _ => "input",
            };
            Outcome {
                code: EXIT_INPUT,
                text: format!("error: {e}"),
                json: json!({ "command": config.command.name(), "status": "ERROR", "error": { "kind": kind, "message": e.to_string() } }),
            }
        }
    }
}

struct Section {
    name: &'static str,
    equation: &'static str,
    residual: Residual,
}

fn sections_json(sections: &[Section]) -> Value {
    let mut m = Map::new();
    for s in sections {
        m.insert(
            s.name.to_string(),
            json!({ "equation": s.equation, "residual": s.residual }),
        );
    }
    Value::Object(m)
}

fn sections_text(sections: &[Section]) -> String {
    sections
        .iter()
        .map(|s| {
            format!(
                "{}  [{}]\n  {}",
                s.name,
                s.equation,
                s.residual.render_text().replace('\n', "\n  ")
            )
        })
        .collect::<Vec<_>>()
        .join("\n")
}

fn status(pass: bool) -> (&'static str, i32) {
    if pass {
        ("PASS", EXIT_PASS)
    } else {
        ("FAIL", EXIT_FAIL)
    }
}

fn load_pair(config: &RunConfig) -> gq_core::Result<Arc<LieAlgebraPair>> {
    let pair = match &config.algebra {
        Some(Source::File(p)) => LieAlgebraPair::from_json(&std::fs::read_to_string(p)?)?,
        Some(Source::Bundled(name)) => LieAlgebraPair::from_json(fixtures::algebra_json(name)?)?,
        None => {
            return Err(Error::Format(
                "an algebra is required (--algebra PATH or --bundled NAME)".into(),
            ))
        }
    };
    Ok(Arc::new(pair))
}

fn context(config: &RunConfig, pair: Arc<LieAlgebraPair>) -> gq_core::Result<Context> {
    let mode = match &config.mode {
        ModeConfig::Exact => CoeffMode::Exact,
        ModeConfig::Jet { base_point, degree } => CoeffMode::jet(base_point.clone(), *degree),
    };
    Context::new(pair, config.order, mode)
}

fn load_twist(config: &RunConfig, ctx: &Context) -> gq_core::Result<DynTwist> {
    let text = match &config.twist {
        Some(Source::File(p)) => std::fs::read_to_string(p)?,
        Some(Source::Bundled(name)) => {
            let (alg, text) = fixtures::twist_json(name)?;
            if alg != ctx.pair().name() {
                return Err(Error::Format(format!("bundled twist {name} belongs to {alg}")));
            }
            text.to_string()
        }
        None => {
            return Err(Error::Format(
                "a twist is required (--twist PATH or --bundled-twist NAME)".into(),
            ))
        }
    };
    let terms: Vec<DynTermFile> = serde_json::from_str(&text)?;
    DynTwist::from_file(ctx, &terms)
}

/// The twists a command runs on: one loaded twist, or seeded random ones.
fn twists(config: &RunConfig, ctx: &Context) -> gq_core::Result<Vec<DynTwist>> {
    match config.random {
        Some(count) => {
            let exact = ctx.exact_twin()?;
            let fs = random_invariant_twists(&exact, config.seed, count, config.coeff_degree, config.leg_degree)?;
            fs.iter()
                .map(|f| {
                    let terms = f.to_file();
                    DynTwist::from_file(ctx, &terms)
                })
                .collect()
        }
        None => Ok(vec![load_twist(config, ctx)?]),
    }
}

fn mode_json(ctx: &Context) -> Value {
    match &ctx.ring().mode {
        CoeffMode::Exact => json!({ "kind": "exact" }),
        CoeffMode::Jet(spec) => json!({
            "kind": "jet",
            "basePoint": spec.base_point.iter().map(format_rational).collect::<Vec<_>>(),
            "degree": spec.degree,
        }),
    }
}

fn header(command: Command, pair: &LieAlgebraPair, ctx: Option<&Context>) -> Map<String, Value> {
    let mut m = Map::new();
    m.insert("command".into(), json!(command.name()));
    m.insert("algebra".into(), json!(pair.name()));
    if let Some(ctx) = ctx {
        m.insert("order".into(), json!(ctx.order()));
        m.insert("mode".into(), mode_json(ctx));
    }
    m
}

fn finish(mut doc: Map<String, Value>, pass: bool, title: String, body: String) -> Outcome {
    let (label, code) = status(pass);
    doc.insert("status".into(), json!(label));
    let text = if body.is_empty() {
        format!("{title}\n{label}")
    } else {
        format!("{title}\n{body}\n{label}")
    };
    Outcome {
        code,
        text,
        json: Value::Object(doc),
    }
}

fn write_artifact<T: serde::Serialize>(config: &RunConfig, value: &T) -> gq_core::Result<()> {
    if let Some(path) = &config.out {
        std::fs::write(path, to_canonical_json(value)? + "\n")?;
    }
    Ok(())
}

fn twistor_sections(ctx: &Context, rep: &TwistorReport) -> Vec<Section> {
    vec![
        Section {
            name: "cocycle",
            equation: "(Δ⊗id)F·(F⊗1) = (id⊗Δ)F·(1⊗F)",
            residual: Residual::from_h(ctx, &rep.cocycle_residual),
        },
        Section {
            name: "leftCounit",
            equation: "(ε⊗id)F = 1",
            residual: Residual::from_h(ctx, &rep.left_counit_residual),
        },
        Section {
            name: "rightCounit",
            equation: "(id⊗ε)F = 1",
            residual: Residual::from_h(ctx, &rep.right_counit_residual),
        },
    ]
}

fn twistor_outcome(config: &RunConfig, ctx: &Context, f: &HTensor, what: &str) -> gq_core::Result<Outcome> {
    let rep = check_twistor(ctx, f)?;
    let sections = twistor_sections(ctx, &rep);
    let mut doc = header(config.command, ctx.pair(), Some(ctx));
    doc.insert("checks".into(), sections_json(&sections));
    doc.insert("sharpInvertible".into(), json!(rep.sharp_invertible));
    doc.insert("tensorTerms".into(), json!(f.len()));
    let mut body = sections_text(&sections);
    body.push_str(&format!("\nF♯ invertible (ℏ⁰ part is 1⊗1): {}", rep.sharp_invertible));
    let title = format!(
        "{what} on {} at K = {}: {} terms",
        ctx.pair().name(),
        ctx.order(),
        f.len()
    );
    Ok(finish(doc, rep.passed() && rep.sharp_invertible, title, body))
}

fn execute(config: &RunConfig) -> gq_core::Result<Outcome> {
    if config.order == 0 {
        return Err(Error::Format("--order must be at least 1".into()));
    }
    let pair = load_pair(config)?;
    match config.command {
        Command::CheckJacobi => Ok(check_jacobi(config, &pair)),
        Command::Polarization => polarization(config, &pair),
        _ => {
            let ctx = context(config, pair)?;
            match config.command {
                Command::CheckDynTwist => check_dyn_twist(config, &ctx),
                Command::CheckInvariance => check_invariance(config, &ctx),
                Command::GuttTwistor => {
                    let gutt = build_gutt_twistor(&ctx)?;
                    write_artifact(config, &gutt.to_file())?;
                    twistor_outcome(config, &ctx, &gutt, "Gutt twistor")
                }
                Command::Bridge => {
                    let f = load_twist(config, &ctx)?;
                    let b = bridge(&ctx, &f)?;
                    write_artifact(config, &b.to_file())?;
                    twistor_outcome(config, &ctx, &b, "bridged twist")
                }
                Command::CheckTwistor => {
                    let f = match &config.tensor {
                        Some(path) => {
                            let terms: Vec<HTensorTermFile> = serde_json::from_str(&std::fs::read_to_string(path)?)?;
                            HTensor::from_file(&ctx, &terms)?
                        }
                        None => (*build_gutt_twistor(&ctx)?).clone(),
                    };
                    let what = if config.tensor.is_some() {
                        "tensor"
                    } else {
                        "Gutt twistor"
                    };
                    twistor_outcome(config, &ctx, &f, what)
                }
                Command::Equivalence => equivalence(config, &ctx),
                Command::ExchangeR => exchange(config, &ctx),
                Command::ClassicalLimit => classical_limit(config, &ctx),
                Command::CheckJacobi | Command::Polarization => unreachable!(),
            }
        }
    }
}

fn check_jacobi(config: &RunConfig, pair: &LieAlgebraPair) -> Outcome {
    let rep = pair.check_jacobi();
    let mut doc = header(config.command, pair, None);
    let violations: Vec<Value> = rep
        .violations
        .iter()
        .map(|v| {
            json!({
                "triple": v.names,
                "indices": v.triple,
                "residual": v.residual.iter().map(|(k, c)| (pair.basis_name(*k).to_string(), format_rational(c))).collect::<std::collections::BTreeMap<_, _>>(),
            })
        })
        .collect();
    doc.insert("violations".into(), json!(violations));
    let body = if rep.passed() {
        format!("  {PASS_TEXT}")
    } else {
        rep.violations
            .iter()
            .map(|v| {
                let res: Vec<String> = v
                    .residual
                    .iter()
                    .map(|(k, c)| format!("{} {}", format_rational(c), pair.basis_name(*k)))
                    .collect();
                format!(
                    "  violated on ({}, {}, {}): {}",
                    v.names[0],
                    v.names[1],
                    v.names[2],
                    res.join(" + ")
                )
            })
            .collect::<Vec<_>>()
            .join("\n")
    };
    let title = format!(
        "Jacobi identity [x,[y,z]] + [y,[z,x]] + [z,[x,y]] = 0 on {}",
        pair.name()
    );
    finish(doc, rep.passed(), title, body)
}

fn polarization(config: &RunConfig, pair: &LieAlgebraPair) -> gq_core::Result<Outcome> {
    let pol = match (&config.u_plus, &config.u_minus) {
        (Some(p), Some(m)) => Polarization::new(pair, p.clone(), m.clone())?,
        (None, None) => pair.polarization()?,
        _ => return Err(Error::InvalidPolarization("give both --u-plus and --u-minus".into())),
    };
    let coords = pair.coordinate_names();
    let omega = pol.omega_matrix();
    let nd = pol.nondegeneracy();
    let locus = pair.character_locus();
    let names = |idx: &[usize]| idx.iter().map(|&a| pair.basis_name(a).to_string()).collect::<Vec<_>>();
    let mut doc = header(config.command, pair, None);
    doc.insert("uPlus".into(), json!(names(pol.u_plus())));
    doc.insert("uMinus".into(), json!(names(pol.u_minus())));
    doc.insert(
        "omega".into(),
        json!(omega
            .iter()
            .map(|row| row.iter().map(poly_to_terms).collect::<Vec<_>>())
            .collect::<Vec<_>>()),
    );
    doc.insert("determinant".into(), json!(poly_to_terms(&nd.det)));
    doc.insert("nondegenerate".into(), json!(nd.nondegenerate()));
    doc.insert(
        "witness".into(),
        json!(nd
            .witness
            .as_ref()
            .map(|w| w.iter().map(format_rational).collect::<Vec<_>>())),
    );
    doc.insert(
        "characterLocus".into(),
        json!(locus
            .iter()
            .map(|v| v.iter().map(format_rational).collect::<Vec<_>>())
            .collect::<Vec<_>>()),
    );
    let rows: Vec<String> = omega
        .iter()
        .map(|row| {
            format!(
                "[{}]",
                row.iter()
                    .map(|p| p.display_with(&coords))
                    .collect::<Vec<_>>()
                    .join(", ")
            )
        })
        .collect();
    let mut body = vec![
        format!(
            "  u₊ = {{{}}}, u₋ = {{{}}}",
            names(pol.u_plus()).join(", "),
            names(pol.u_minus()).join(", ")
        ),
        format!("  ω(λ) = [{}]", rows.join(", ")),
        format!("  D(λ) = {}", nd.det.display_with(&coords)),
    ];
    match &nd.witness {
        Some(w) => {
            let pts: Vec<String> = w
                .iter()
                .zip(&coords)
                .map(|(v, c)| format!("{c} = {}", format_rational(v)))
                .collect();
            body.push(format!("  nondegenerate, witness {}", pts.join(", ")));
        }
        None => body.push("  degenerate: D(λ) vanishes identically".into()),
    }
    let locus_text: Vec<String> = locus
        .iter()
        .map(|v| format!("({})", v.iter().map(format_rational).collect::<Vec<_>>().join(", ")))
        .collect();
    body.push(format!(
        "  characters of l (basis of λ with λ([l,l]) = 0): {}",
        if locus_text.is_empty() {
            "none".into()
        } else {
            locus_text.join(", ")
        }
    ));
    let title = format!(
        "polarization of {}: ω(λ)(u, v) = λ([u, v]), D(λ) = det ω(λ)",
        pair.name()
    );
    Ok(finish(doc, nd.nondegenerate(), title, body.join("\n")))
}

fn dyn_sections(ctx: &Context, f: &DynTwist) -> gq_core::Result<(Vec<Section>, bool)> {
    let rep = dyn_check(ctx, f)?;
    let sections = vec![
        Section {
            name: "leftCounit",
            equation: "(id⊗ε⊗id)F = 1⊗1",
            residual: Residual::from_u(ctx, &rep.counit.left),
        },
        Section {
            name: "rightCounit",
            equation: "(id⊗id⊗ε)F = 1⊗1",
            residual: Residual::from_u(ctx, &rep.counit.right),
        },
        Section {
            name: "cocycle",
            equation: "(id⊗Δ⊗id)F ∗ F₁₂⁽³⁾ = (id⊗id⊗Δ)F ∗ F₂₃",
            residual: Residual::from_u(ctx, &rep.cocycle_residual),
        },
    ];
    Ok((sections, rep.passed()))
}

fn check_dyn_twist(config: &RunConfig, ctx: &Context) -> gq_core::Result<Outcome> {
    let f = load_twist(config, ctx)?;
    let (sections, pass) = dyn_sections(ctx, &f)?;
    let mut doc = header(config.command, ctx.pair(), Some(ctx));
    doc.insert("checks".into(), sections_json(&sections));
    let title = format!("dynamical twist on {} at K = {}", ctx.pair().name(), ctx.order());
    Ok(finish(doc, pass, title, sections_text(&sections)))
}

fn check_invariance(config: &RunConfig, ctx: &Context) -> gq_core::Result<Outcome> {
    let f = load_twist(config, ctx)?;
    let rep = dyn_check_invariance(ctx, &f)?;
    let mut doc = header(config.command, ctx.pair(), Some(ctx));
    let mut checks = Map::new();
    let mut lines = Vec::new();
    for (i, r) in rep.residuals.iter().enumerate() {
        let name = ctx.pair().basis_name(i).to_string();
        let res = Residual::from_u(ctx, r);
        lines.push(format!(
            "{name}  [ad*⊗1⊗1 (F) + [1⊗{name}⊗1 + 1⊗1⊗{name}, F] = 0]\n  {}",
            res.render_text().replace('\n', "\n  ")
        ));
        checks.insert(name, json!(res));
    }
    doc.insert("checks".into(), Value::Object(checks));
    let title = format!("l-invariance on {} at K = {}", ctx.pair().name(), ctx.order());
    Ok(finish(doc, rep.passed(), title, lines.join("\n")))
}

fn equivalence(config: &RunConfig, ctx: &Context) -> gq_core::Result<Outcome> {
    let fs = twists(config, ctx)?;
    let mut rows = Vec::new();
    let mut lines = vec![format!(
        "  {:>5}  {:>7}  {:>11}  {:>5}",
        "case", "dynPass", "twistorPass", "agree"
    )];
    let mut all_agree = true;
    for (i, f) in fs.iter().enumerate() {
        let rep = check_equivalence(ctx, f)?;
        all_agree &= rep.agree;
        lines.push(format!(
            "  {:>5}  {:>7}  {:>11}  {:>5}",
            i, rep.dyn_pass, rep.twistor_pass, rep.agree
        ));
        let mut row = Map::new();
        row.insert("case".into(), json!(i));
        row.insert("dynPass".into(), json!(rep.dyn_pass));
        row.insert("twistorPass".into(), json!(rep.twistor_pass));
        row.insert("agree".into(), json!(rep.agree));
        if !rep.agree || config.random.is_none() {
            row.insert(
                "dynCocycle".into(),
                json!(Residual::from_u(ctx, &rep.dynamical.cocycle_residual)),
            );
            row.insert(
                "twistorCocycle".into(),
                json!(Residual::from_h(ctx, &rep.twistor.cocycle_residual)),
            );
        }
        rows.push(Value::Object(row));
    }
    let mut doc = header(config.command, ctx.pair(), Some(ctx));
    doc.insert("cases".into(), json!(rows));
    if config.random.is_some() {
        doc.insert("seed".into(), json!(config.seed));
    }
    let title = format!(
        "dynamical-twist conditions versus twistor conditions of the bridged element on {} at K = {}",
        ctx.pair().name(),
        ctx.order()
    );
    Ok(finish(doc, all_agree, title, lines.join("\n")))
}

fn exchange(config: &RunConfig, ctx: &Context) -> gq_core::Result<Outcome> {
    let fs = twists(config, ctx)?;
    let mut cases = Vec::new();
    let mut lines = Vec::new();
    let mut pass = true;
    for (i, f) in fs.iter().enumerate() {
        let rep = exchange_r(ctx, f)?;
        let res = Residual::from_u(ctx, &rep.round_trip_residual);
        pass &= res.zero;
        lines.push(format!(
            "case {i}  [F₂₁ ∗ R = F]\n  {}",
            res.render_text().replace('\n', "\n  ")
        ));
        if config.random.is_none() {
            write_artifact(config, &utensor_to_file(&rep.r))?;
            lines.push(format!("  R =\n    {}", rep.r.display(ctx).replace('\n', "\n    ")));
        }
        cases.push(json!({ "r": utensor_to_file(&rep.r), "roundTrip": res }));
    }
    let mut doc = header(config.command, ctx.pair(), Some(ctx));
    doc.insert("cases".into(), json!(cases));
    if config.random.is_some() {
        doc.insert("seed".into(), json!(config.seed));
    }
    let title = format!(
        "exchange element R = F₂₁⁻¹ ∗ F on {} at K = {}",
        ctx.pair().name(),
        ctx.order()
    );
    Ok(finish(doc, pass, title, lines.join("\n")))
}

fn classical_limit(config: &RunConfig, ctx: &Context) -> gq_core::Result<Outcome> {
    let pair = ctx.pair();
    let theta = match (&config.theta, &config.twist) {
        (Some(path), _) => {
            let file: BivectorFile = serde_json::from_str(&std::fs::read_to_string(path)?)?;
            Multivector::from_file(pair, &file)?
        }
        (None, Some(_)) => classical_theta(ctx, &load_twist(config, ctx)?)?,
        (None, None) => Multivector::zero(&CoeffRing::exact(pair.dim_l())),
    };
    let pi = assemble_pi(pair, &theta)?;
    let rep = schouten_jacobi(pair, &pi)?;
    let res = Residual::from_multivector(pair, &rep.trivector);
    let mut doc = header(config.command, pair, Some(ctx));
    doc.insert("theta".into(), json!(theta.to_file(pair)));
    doc.insert("pi".into(), json!(pi.to_file(pair)));
    doc.insert("jacobi".into(), json!(res));
    let body = format!(
        "  θ = {}\n  π = {}\n  Jacobi identity of π (Schouten square)\n  {}",
        theta.display(pair),
        pi.display(pair),
        res.render_text().replace('\n', "\n  ")
    );
    let title = format!("classical limit on {}: π = π_l* + Σ dᵢ∧Xᵢ + θ", pair.name());
    Ok(finish(doc, res.zero, title, body))
}
