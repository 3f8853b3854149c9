//! The `probmodels` command line.
//!
//! Every command prints one JSON document. Exit status 0 means the
//! property holds or the construction succeeded, 1 means it fails and the
//! document carries a witness, 2 means the input could not be used.

pub mod files;

use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde_json::{json, Map, Value};

use crate::bell::{
    build_pr_box, check_bell_local, local_implies_separable_check, BellWitness, ClassicalEmbedding,
};
use crate::classicalize::{borelify, semiclassical_cover, FiniteBorelModel};
use crate::composites::{
    check_composite, is_separable_state, is_separable_weight, marginals_and_conditionals,
    minimal_ns_composite, product_space, Composite, NsAnalysis, NsPolytope, Side, SignallingWitness,
};
use crate::exactlp::{HullMembership, Rational};
use crate::morphisms::{
    compose_explanations, pullback_subquotient, Explanation, Morphism, MorphismError, PerspectivityCheck,
};
use crate::testspace::TestSpace;
use crate::weights::{enumerate_dispersion_free, full_weight_polytope_vertices, ProbModel, Weight};

use files::{
    embedding_from_value, event_map, field, labels_json, model_from_value, model_json, model_ref,
    morphism_from_value, morphism_json, morphism_ref, parse_json, pi_from_value, rational_json, read_text,
    render, space_json, vector_json, weight_from_value, weight_json, InputError, Source,
};

#[derive(Debug, Parser)]
#[command(name = "probmodels", version, about = "Exact computations with finite probabilistic models")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Parse a model and print its canonical form.
    Validate { model: PathBuf },
    /// List the dispersion-free weights of a model's test space.
    DfEnum { model: PathBuf },
    /// Vertices of the polytope of all weights on a model's test space.
    Vertices { model: PathBuf },
    /// The semiclassical cover of a model and its quotient map.
    Cover { model: PathBuf },
    /// The canonical classical explanation of a model.
    Borelify { model: PathBuf },
    /// A measure on dispersion-free cover states for each state generator,
    /// or for the weight in `--weight`.
    Decompose {
        model: PathBuf,
        #[arg(long)]
        weight: Option<PathBuf>,
    },
    /// Validate and classify a morphism file.
    MorphismCheck {
        morphism: PathBuf,
        /// Check perspectivity on every pair of perspective events.
        #[arg(long)]
        strict: bool,
    },
    /// Pull back an embedding and a quotient with a common target.
    Pullback { embedding: PathBuf, quotient: PathBuf },
    /// Compose two explanations, the first explaining the second's apex.
    ComposeExplanations { first: PathBuf, second: PathBuf },
    /// The product test space of two models.
    Product {
        left: PathBuf,
        right: PathBuf,
        /// Also list the vertices of the non-signalling state space.
        #[arg(long)]
        ns: bool,
    },
    /// Marginals and conditionals of a joint weight, or a signalling witness.
    NsCheck { joint: PathBuf },
    /// Separability of a joint weight, or of a state of a composite.
    SeparableCheck {
        joint: PathBuf,
        #[arg(long, num_args = 2, value_names = ["LEFT", "RIGHT"], conflicts_with = "composite")]
        parts: Option<Vec<PathBuf>>,
        #[arg(long)]
        composite: Option<PathBuf>,
    },
    /// Local tomography and strength of a composite.
    CompositeFlags { composite: PathBuf },
    /// Bell locality of a classical embedding of a composite.
    BellCheck {
        composite: PathBuf,
        /// Embedding file; defaults to the canonical one.
        #[arg(long)]
        embedding: Option<PathBuf>,
    },
    /// The PR box over two copies of {{x,y},{u,v}}.
    PrBox,
}

struct Io<'a> {
    stdin: &'a mut dyn Read,
}

impl Io<'_> {
    fn load(&mut self, path: &Path) -> Result<(Value, Source), InputError> {
        if path == Path::new("-") {
            let mut text = String::new();
            self.stdin
                .read_to_string(&mut text)
                .map_err(|e| InputError::Io { path: "<stdin>".into(), source: e })?;
            let src = Source::stdin();
            Ok((parse_json(&text, &src)?, src))
        } else {
            let src = Source::file(path);
            Ok((parse_json(&read_text(path)?, &src)?, src))
        }
    }

    fn model(&mut self, path: &Path) -> Result<ProbModel, InputError> {
        let (v, src) = self.load(path)?;
        model_from_value(&v, &src, "model")
    }
}

/// Runs one command and returns the exit status.
pub fn run<I, S>(args: I, stdin: &mut dyn Read, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let out: &mut dyn Write = if e.use_stderr() { stderr } else { stdout };
            let _ = write!(out, "{}", e.render());
            return code;
        }
    };
    let mut io = Io { stdin };
    match execute(cli.command, &mut io) {
        Ok((holds, doc)) => {
            let _ = stdout.write_all(render(&doc).as_bytes());
            if holds {
                0
            } else {
                1
            }
        }
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            2
        }
    }
}

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error(transparent)]
    Input(#[from] InputError),
    #[error("{0}")]
    Domain(String),
}

fn domain(e: impl std::fmt::Display) -> CliError {
    CliError::Domain(e.to_string())
}

type CmdResult = Result<(bool, Value), CliError>;

fn execute(cmd: Command, io: &mut Io) -> CmdResult {
    match cmd {
        Command::Validate { model } => {
            let m = io.model(&model)?;
            let s = m.space();
            Ok((
                true,
                json!({
                    "model": model_json(&m),
                    "semiclassical": s.is_semiclassical(),
                    "irredundant": s.is_irredundant(),
                    "counts": { "outcomes": s.outcome_count(), "tests": s.test_count(), "states": m.states().len() },
                }),
            ))
        }
        Command::DfEnum { model } => {
            let m = io.model(&model)?;
            let df = enumerate_dispersion_free(m.space());
            let weights: Vec<Value> = df.iter().map(|w| weight_json(m.space(), w)).collect();
            Ok((true, json!({ "count": df.len(), "weights": weights })))
        }
        Command::Vertices { model } => {
            let m = io.model(&model)?;
            let vs = full_weight_polytope_vertices(m.space());
            let df = enumerate_dispersion_free(m.space());
            let vertices: Vec<Value> = vs.iter().map(|w| weight_json(m.space(), w)).collect();
            Ok((true, json!({ "count": vs.len(), "vertices": vertices, "all_dispersion_free": vs == df })))
        }
        Command::Cover { model } => {
            let m = io.model(&model)?;
            let c = semiclassical_cover(&m);
            Ok((
                true,
                json!({ "cover": model_json(&c.model), "quotient": morphism_json(&c.quotient)["map"] }),
            ))
        }
        Command::Borelify { model } => borelify_cmd(&io.model(&model)?),
        Command::Decompose { model, weight } => {
            let m = io.model(&model)?;
            let weights = match weight {
                Some(p) => {
                    let (v, src) = io.load(&p)?;
                    vec![weight_from_value(m.space(), field(&v, &src, "weight")?, &src, "weight")?]
                }
                None => m.states().to_vec(),
            };
            decompose_cmd(&m, &weights)
        }
        Command::MorphismCheck { morphism, strict } => {
            let (v, src) = io.load(&morphism)?;
            let mode = if strict { PerspectivityCheck::AllEvents } else { PerspectivityCheck::Tests };
            let source = model_ref(&v, &src, "source")?;
            let target = model_ref(&v, &src, "target")?;
            let map = event_map(field(&v, &src, "map")?, &src, "map")?;
            match Morphism::from_labels(&source, &target, &map, mode) {
                Ok(phi) => Ok((true, json!({ "morphism": true, "class": class_json(&phi) }))),
                Err(
                    e @ (MorphismError::MapLength { .. }
                    | MorphismError::MissingOutcome(_)
                    | MorphismError::UnknownSourceOutcome(_)
                    | MorphismError::UnknownTargetOutcome(_)),
                ) => Err(domain(e)),
                Err(e) => Ok((false, json!({ "morphism": false, "violation": e.to_string() }))),
            }
        }
        Command::Pullback { embedding, quotient } => {
            let e = load_morphism(io, &embedding)?;
            let q = load_morphism(io, &quotient)?;
            let x = pullback_subquotient(&e, &q).map_err(domain)?;
            Ok((true, explanation_json(&x)))
        }
        Command::ComposeExplanations { first, second } => {
            let a = load_explanation(io, &first)?;
            let b = load_explanation(io, &second)?;
            let x = compose_explanations(&a, &b).map_err(domain)?;
            Ok((true, explanation_json(&x)))
        }
        Command::Product { left, right, ns } => {
            let (a, b) = (io.model(&left)?, io.model(&right)?);
            let mut doc = json!({ "space": space_json(&product_space(a.space(), b.space())) });
            if ns {
                let c = minimal_ns_composite(&a, &b);
                doc["ns_vertices"] = c.total().states().iter().map(|w| weight_json(c.product(), w)).collect();
            }
            Ok((true, doc))
        }
        Command::NsCheck { joint } => {
            let (v, src) = io.load(&joint)?;
            let (a, b) = (model_ref(&v, &src, "left")?, model_ref(&v, &src, "right")?);
            let p = product_space(a.space(), b.space());
            let w = weight_from_value(&p, field(&v, &src, "weight")?, &src, "weight")?;
            Ok(ns_json(&a, &b, &w))
        }
        Command::SeparableCheck { joint, parts, composite } => {
            let (v, src) = io.load(&joint)?;
            if let Some(c) = composite {
                let c = load_composite(io, &c)?;
                let w = weight_from_value(c.total().space(), field(&v, &src, "weight")?, &src, "weight")?;
                let m = is_separable_state(&c, &w).map_err(domain)?;
                let gens: Vec<Weight> = c.preparable_products();
                return Ok(membership_json(&m, c.product(), &gens, "preparable_products"));
            }
            let (a, b) = match parts {
                Some(p) => (io.model(&p[0])?, io.model(&p[1])?),
                None => (model_ref(&v, &src, "left")?, model_ref(&v, &src, "right")?),
            };
            let p = product_space(a.space(), b.space());
            let w = weight_from_value(&p, field(&v, &src, "weight")?, &src, "weight")?;
            let m = is_separable_weight(a.space(), b.space(), &w);
            let va = full_weight_polytope_vertices(a.space());
            let vb = full_weight_polytope_vertices(b.space());
            let gens: Vec<Weight> = va
                .iter()
                .flat_map(|x| vb.iter().map(move |y| crate::composites::product_weight(x, y)))
                .collect();
            Ok(membership_json(&m, &p, &gens, "products"))
        }
        Command::CompositeFlags { composite } => {
            let c = load_composite(io, &composite)?;
            let f = c.flags();
            Ok((
                true,
                json!({ "locally_tomographic": f.locally_tomographic, "strong": f.strong, "states": c.total().states().len() }),
            ))
        }
        Command::BellCheck { composite, embedding } => {
            let c = load_composite(io, &composite)?;
            let emb = match embedding {
                None => ClassicalEmbedding::canonical(&c).map_err(domain)?,
                Some(p) => {
                    let (v, src) = io.load(&p)?;
                    let cover = semiclassical_cover(c.total());
                    let (n, blocks) = embedding_from_value(cover.model.space(), &v, &src)?;
                    ClassicalEmbedding::new(&c, n, blocks).map_err(domain)?
                }
            };
            bell_cmd(&c, &emb)
        }
        Command::PrBox => {
            let pr = build_pr_box();
            let part = model_json(pr.composite.left());
            let p = pr.composite.product();
            Ok((
                true,
                json!({
                    "left": part,
                    "right": part,
                    "weight": weight_json(p, &pr.pr_box),
                    "components": [weight_json(p, &pr.omega), weight_json(p, &pr.omega_prime)],
                }),
            ))
        }
    }
}

fn load_morphism(io: &mut Io, path: &Path) -> Result<Morphism, CliError> {
    let (v, src) = io.load(path)?;
    Ok(morphism_from_value(&v, &src, PerspectivityCheck::Tests)?)
}

fn load_explanation(io: &mut Io, path: &Path) -> Result<Explanation, CliError> {
    let (v, src) = io.load(path)?;
    let q = morphism_ref(&v, &src, "quotient", PerspectivityCheck::Tests)?;
    let e = morphism_ref(&v, &src, "embedding", PerspectivityCheck::Tests)?;
    Explanation::new(q, e).map_err(domain)
}

fn load_composite(io: &mut Io, path: &Path) -> Result<Composite, CliError> {
    let (v, src) = io.load(path)?;
    let a = model_ref(&v, &src, "left")?;
    let b = model_ref(&v, &src, "right")?;
    let total = model_ref(&v, &src, "total")?;
    let pi = pi_from_value(&product_space(a.space(), b.space()), total.space(), v.get("pi"), &src)?;
    check_composite(&a, &b, &total, pi).map_err(domain)
}

fn class_json(phi: &Morphism) -> Value {
    let c = phi.classify();
    json!({
        "test_preserving": c.test_preserving,
        "positive": c.positive,
        "outcome_preserving": c.outcome_preserving,
        "injective": c.injective,
        "interpretation": c.interpretation,
        "embedding": c.embedding,
        "quotient": c.quotient,
    })
}

fn explanation_json(x: &Explanation) -> Value {
    json!({
        "apex": model_json(x.apex()),
        "quotient": morphism_json(x.quotient())["map"],
        "embedding": morphism_json(x.embedding())["map"],
        "explained": model_json(x.explained()),
        "explaining": model_json(x.explaining()),
    })
}

fn borelify_cmd(m: &ProbModel) -> CmdResult {
    let b = match borelify(m) {
        Ok(b) => b,
        Err(e) => return Ok((false, json!({ "rejected": e.to_string() }))),
    };
    let cover = b.cover.model.space();
    let map: Map<String, Value> = b
        .embedding
        .map()
        .iter()
        .enumerate()
        .map(|(i, blk)| (cover.outcome(i).to_string(), json!(blk.iter().collect::<Vec<_>>())))
        .collect();
    let points: Vec<Value> = b.classical().points().iter().map(|s| weight_json(cover, s)).collect();
    let measures = b.measures().map_err(domain)?;
    Ok((
        true,
        json!({
            "cover": model_json(&b.cover.model),
            "points": points,
            "embedding": map,
            "measures": measures.iter().map(|mu| vector_json(mu)).collect::<Vec<_>>(),
        }),
    ))
}

fn decompose_cmd(m: &ProbModel, weights: &[Weight]) -> CmdResult {
    let cover = semiclassical_cover(m);
    let classical = FiniteBorelModel::new(cover.model.clone());
    let lift =
        |w: &Weight| -> Vec<Rational> { cover.quotient.map().iter().map(|img| w.event_value(img)).collect() };
    let mut all = true;
    let rows: Vec<Value> = weights
        .iter()
        .map(|w| match classical.barycenter_measure(&lift(w)) {
            Ok(mu) => {
                let support: Map<String, Value> = mu
                    .iter()
                    .enumerate()
                    .filter(|(_, v)| !num_traits::Zero::is_zero(*v))
                    .map(|(s, v)| (s.to_string(), rational_json(v)))
                    .collect();
                json!({ "measure": support })
            }
            Err(e) => {
                all = false;
                json!({ "error": e.to_string() })
            }
        })
        .collect();
    let points: Vec<Value> = classical.points().iter().map(|s| weight_json(cover.model.space(), s)).collect();
    Ok((all, json!({ "points": points, "decompositions": rows })))
}

fn side_json(s: Side) -> &'static str {
    match s {
        Side::Left => "left",
        Side::Right => "right",
    }
}

fn signalling_json(w: &SignallingWitness) -> Value {
    json!({
        "side": side_json(w.side),
        "outcome": w.outcome.to_string(),
        "contexts": [
            w.contexts.0.iter().map(ToString::to_string).collect::<Vec<_>>(),
            w.contexts.1.iter().map(ToString::to_string).collect::<Vec<_>>(),
        ],
        "values": [rational_json(&w.values.0), rational_json(&w.values.1)],
    })
}

fn ns_json(a: &ProbModel, b: &ProbModel, w: &Weight) -> (bool, Value) {
    match marginals_and_conditionals(a.space(), b.space(), w) {
        NsAnalysis::Signalling(wit) => {
            (false, json!({ "non_signalling": false, "witness": signalling_json(&wit) }))
        }
        NsAnalysis::NonSignalling(m) => {
            let conds = |cs: &[(crate::outcome::Outcome, Weight)], space: &TestSpace| -> Value {
                Value::Object(cs.iter().map(|(o, c)| (o.to_string(), weight_json(space, c))).collect())
            };
            let in_ns = NsPolytope::new(a, b).contains(w.values());
            (
                true,
                json!({
                    "non_signalling": true,
                    "conditionals_are_states": in_ns,
                    "marginals": { "left": weight_json(a.space(), &m.left), "right": weight_json(b.space(), &m.right) },
                    "conditionals": {
                        "left_given_right": conds(&m.left_conditionals, a.space()),
                        "right_given_left": conds(&m.right_conditionals, b.space()),
                    },
                }),
            )
        }
    }
}

fn membership_json(m: &HullMembership, space: &TestSpace, gens: &[Weight], label: &str) -> (bool, Value) {
    match m {
        HullMembership::Member(cert) => {
            let mixture: Vec<Value> = cert
                .coefficients
                .iter()
                .map(|(i, l)| json!({ "coefficient": rational_json(l), "weight": weight_json(space, &gens[*i]) }))
                .collect();
            (true, json!({ "separable": true, "mixture": mixture, "generators": label }))
        }
        HullMembership::NotMember(h) => {
            let normal: Map<String, Value> = h
                .normal
                .iter()
                .enumerate()
                .filter(|(_, v)| !num_traits::Zero::is_zero(*v))
                .map(|(i, v)| (space.outcome(i).to_string(), rational_json(v)))
                .collect();
            (
                false,
                json!({
                    "separable": false,
                    "generators": label,
                    "certificate": { "normal": normal, "offset": rational_json(&h.offset) },
                }),
            )
        }
    }
}

fn bell_cmd(c: &Composite, emb: &ClassicalEmbedding) -> CmdResult {
    let v = check_bell_local(c, emb);
    let (a, b) = (c.left().space(), c.right().space());
    if v.local {
        let reports = local_implies_separable_check(c, emb).map_err(domain)?;
        let factors: Vec<Value> = v
            .factorization
            .iter()
            .map(|f| json!({ "point": f.point, "left": weight_json(a, &f.left), "right": weight_json(b, &f.right) }))
            .collect();
        let states: Vec<Value> = reports
            .iter()
            .map(|r| {
                json!({
                    "generator": r.generator,
                    "measure": r.measure.iter().map(|(s, m)| json!([s, rational_json(m)])).collect::<Vec<_>>(),
                    "mixture_verified": r.mixture_verified,
                    "separable": r.separable.is_member(),
                })
            })
            .collect();
        return Ok((
            true,
            json!({ "local": true, "points": v.point_count, "factorization": factors, "states": states }),
        ));
    }
    let contextual = v.witnesses.iter().filter(|w| matches!(w, BellWitness::Contextual { .. })).count();
    let signalling = v.witnesses.iter().filter(|w| w.is_signalling()).count();
    let first = |pred: &dyn Fn(&BellWitness) -> bool| {
        v.witnesses.iter().find(|w| pred(w)).map(|w| witness_json(c, w))
    };
    let examples: Vec<Value> = [
        first(&|w| w.is_signalling()),
        first(&|w| matches!(w, BellWitness::Entangled { signalling: None, .. })),
        first(&|w| matches!(w, BellWitness::Contextual { .. })),
    ]
    .into_iter()
    .flatten()
    .collect();
    Ok((
        false,
        json!({
            "local": false,
            "points": v.point_count,
            "nonlocal_points": v.witnesses.len(),
            "contextual_points": contextual,
            "signalling_points": signalling,
            "witnesses": examples,
        }),
    ))
}

fn witness_json(c: &Composite, w: &BellWitness) -> Value {
    match w {
        BellWitness::Contextual { point, outcome, tests } => {
            let total = c.total().space();
            json!({
                "point": point,
                "kind": "contextual",
                "outcome": outcome.to_string(),
                "tests": [labels_json(total, &total.test_event(tests.0)), labels_json(total, &total.test_event(tests.1))],
            })
        }
        BellWitness::Entangled { point, joint, minor, signalling } => json!({
            "point": point,
            "kind": "not_product",
            "joint": weight_json(c.product(), joint),
            "minor": {
                "rows": [minor.rows.0.to_string(), minor.rows.1.to_string()],
                "columns": [minor.columns.0.to_string(), minor.columns.1.to_string()],
                "determinant": rational_json(&minor.determinant),
            },
            "signalling": signalling.as_ref().map(signalling_json),
        }),
    }
}
