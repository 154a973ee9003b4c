//! Command-line surface: argument types and command implementations.

use std::fmt::Write as _;
use std::path::PathBuf;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use fricke_core::hnn::check_homomorphism;
use fricke_core::polyring::{Polynomial, Substitution, VarSet};
use fricke_core::quotients::{affine_witness, perm_witness};
use fricke_core::trace::{kappa, TraceContext};
use fricke_core::variety::{build_system, check_component, solve_triangular, SolveOutcome};
use fricke_core::words::{Alphabet, Endomorphism, FreeWord};
use fricke_core::{HnnPresentation, PresentationText};

use crate::verify::{verify_reference_computations, Expectations};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum OutputFormat {
    #[default]
    Plain,
    Json,
}

/// Exact computations on free groups, SL2 trace polynomials, trace
/// varieties, Stallings graphs, ascending HNN extensions, and finite
/// quotient witnesses.
#[derive(Debug, Parser)]
#[command(name = "fricke", version, about)]
pub struct Cli {
    /// Output format
    #[arg(long, global = true, value_enum, default_value_t)]
    pub format: OutputFormat,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Trace polynomial of a word in the generators a, b
    Trace {
        /// Word in the grammar `a b^-1 a^2 …` (use `1` for the identity)
        word: String,
    },
    /// The commutator-trace form p² + q² + r² − p·q·r − 2
    Kappa {
        /// Polynomial for tr(a) (default `x`)
        #[arg(default_value = "x")]
        px: String,
        /// Polynomial for tr(b) (default `y`)
        #[arg(default_value = "y")]
        py: String,
        /// Polynomial for tr(ab) (default `z`)
        #[arg(default_value = "z")]
        pz: String,
    },
    /// Trace variety of an endomorphism of the free group on a, b
    Variety {
        /// Images, e.g. `a -> a ; b -> [a,b]`
        phi: String,
        /// Run the triangular solver on the system
        #[arg(long)]
        solve: bool,
        /// Check a substitution against the system, e.g. `y=2; z=x`
        #[arg(long)]
        check: Option<String>,
    },
    /// Stallings graph queries for finitely generated subgroups of F(a, b)
    Subgroup {
        #[command(subcommand)]
        op: SubgroupOp,
    },
    /// Ascending HNN extension queries against a presentation file
    Hnn {
        /// Presentation file (gens/stable/phi lines, or gens/rel)
        file: PathBuf,
        #[command(subcommand)]
        op: HnnOp,
    },
    /// Find a finite quotient in which a word survives
    Separate {
        /// Presentation file
        file: PathBuf,
        /// The word to separate from the identity
        word: String,
        /// Search affine groups over Z/m for m up to this bound
        #[arg(long, value_name = "M_MAX")]
        affine: Option<u64>,
        /// Search symmetric groups on up to this many points
        #[arg(long, value_name = "N_MAX")]
        perm: Option<usize>,
    },
    /// Re-run the bundled reference computations and report each check
    VerifyPaper,
}

#[derive(Debug, Subcommand)]
pub enum SubgroupOp {
    /// Fold the generators and print the graph
    Fold {
        /// Semicolon-separated generator words, e.g. `a^2 ; b`
        #[arg(long)]
        gens: String,
    },
    /// Decide membership of a word
    Contains {
        #[arg(long)]
        gens: String,
        word: String,
    },
    /// Rank of the subgroup
    Rank {
        #[arg(long)]
        gens: String,
    },
    /// Express a member in the subgroup generators g1, g2, …
    Express {
        #[arg(long)]
        gens: String,
        word: String,
    },
}

#[derive(Debug, Subcommand)]
pub enum HnnOp {
    /// Reduced form t^-p · w · t^q of a word
    NormalForm { word: String },
    /// Decide equality of two words in the group
    Equal { left: String, right: String },
    /// Print the ascending HNN form of the presentation
    Rewrite,
    /// Check that generator images define a homomorphism from a finitely
    /// presented source group
    CheckHom {
        /// Source presentation file (gens + rel lines)
        #[arg(long)]
        source: PathBuf,
        /// Images of the source generators, e.g. `a -> b0 ; b -> b1 ; t -> t^2`
        #[arg(long)]
        images: String,
    },
}

/// Outcome of a command: rendered text, a JSON value, and whether a
/// requested check failed (exit code 1).
pub struct CmdResult {
    pub text: String,
    pub json: Value,
    pub check_failed: bool,
}

impl CmdResult {
    fn ok(text: impl Into<String>) -> Self {
        let text = text.into();
        let json = json!({ "status": "ok", "computed": text });
        CmdResult { text, json, check_failed: false }
    }
}

fn standard_alphabet() -> Alphabet {
    Alphabet::new(["a", "b"]).expect("static alphabet")
}

fn parse_gens(alphabet: &Alphabet, spec: &str) -> Result<Vec<FreeWord>> {
    spec.split(';')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| alphabet.parse_extended(s).map_err(|e| anyhow!("in generator `{s}`: {e}")))
        .collect()
}

fn load_presentation(path: &PathBuf) -> Result<PresentationText> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading presentation file {}", path.display()))?;
    PresentationText::parse(&text).map_err(|e| anyhow!("in {}: {e}", path.display()))
}

fn parse_endomorphism(spec: &str) -> Result<Endomorphism> {
    let alphabet = standard_alphabet();
    let images = fricke_core::presentations::parse_phi_spec(&alphabet, spec)?;
    Ok(Endomorphism::new(alphabet, images)?)
}

pub fn run(cli: &Cli) -> Result<CmdResult> {
    match &cli.command {
        Command::Trace { word } => {
            let alphabet = standard_alphabet();
            let w = alphabet.parse_extended(word)?;
            let mut ctx = TraceContext::new(alphabet)?;
            let poly = ctx.trace_poly(&w)?;
            Ok(CmdResult::ok(poly.to_string()))
        }
        Command::Kappa { px, py, pz } => {
            let vars = VarSet::xyz();
            let px = Polynomial::parse(&vars, px)?;
            let py = Polynomial::parse(&vars, py)?;
            let pz = Polynomial::parse(&vars, pz)?;
            Ok(CmdResult::ok(kappa(&px, &py, &pz).to_string()))
        }
        Command::Variety { phi, solve, check } => {
            let phi = parse_endomorphism(phi)?;
            let system = build_system(&phi)?;
            let mut text = String::new();
            for (i, eq) in system.equations().iter().enumerate() {
                writeln!(text, "E{} = {}", i + 1, eq).unwrap();
            }
            let mut json = json!({
                "status": "ok",
                "computed": {
                    "equations": system.equations().iter().map(|e| e.to_string()).collect::<Vec<_>>(),
                }
            });
            let mut check_failed = false;
            if let Some(subst) = check {
                let sigma = Substitution::parse(system.vars(), subst)?;
                let residuals: Vec<String> =
                    system.equations().iter().map(|e| e.substitute(&sigma).to_string()).collect();
                let passed = check_component(&system, &sigma);
                writeln!(text, "check {}: {}", sigma, if passed { "pass" } else { "fail" }).unwrap();
                if !passed {
                    writeln!(text, "residuals: {}", residuals.join("; ")).unwrap();
                    check_failed = true;
                }
                json["status"] = json!(if passed { "pass" } else { "fail" });
                json["expected"] = json!("0; 0; 0");
                json["computed"]["residuals"] = json!(residuals);
            }
            if *solve {
                match solve_triangular(&system) {
                    SolveOutcome::Components(components) => {
                        for (i, c) in components.iter().enumerate() {
                            writeln!(text, "component {}: {} (dimension {})", i + 1, c, c.dimension())
                                .unwrap();
                        }
                        json["computed"]["components"] =
                            json!(components.iter().map(|c| c.to_string()).collect::<Vec<_>>());
                    }
                    SolveOutcome::Unsolved { residual, dimension, .. } => {
                        writeln!(text, "Unsolved: {} constraints (dimension {})", residual.len(), dimension)
                            .unwrap();
                        json["computed"]["unsolved"] = json!({
                            "constraints": residual.iter().map(|e| e.to_string()).collect::<Vec<_>>(),
                            "dimension": dimension,
                        });
                    }
                }
            }
            Ok(CmdResult { text, json, check_failed })
        }
        Command::Subgroup { op } => run_subgroup(op),
        Command::Hnn { file, op } => run_hnn(file, op),
        Command::Separate { file, word, affine, perm } => {
            let pres = load_presentation(file)?.as_finite_presentation()?;
            let target = pres.alphabet.parse_extended(word)?;
            let witness = match (affine, perm) {
                (Some(m_max), None) => affine_witness(&pres, &target, *m_max)?,
                (None, Some(n_max)) => perm_witness(&pres, &target, *n_max)?,
                _ => bail!("exactly one of --affine M_MAX or --perm N_MAX is required"),
            };
            match witness {
                Some(found) => {
                    let text =
                        format!("{found}\norder: {}", found.target.order());
                    let json = json!({
                        "status": "ok",
                        "computed": found.to_string(),
                        "order": found.target.order().to_string(),
                    });
                    Ok(CmdResult { text, json, check_failed: false })
                }
                None => Ok(CmdResult {
                    text: "none".to_string(),
                    json: json!({ "status": "ok", "computed": "none" }),
                    check_failed: false,
                }),
            }
        }
        Command::VerifyPaper => {
            let report = verify_reference_computations(&Expectations::default());
            Ok(CmdResult {
                text: report.render_plain(),
                json: report.render_json(),
                check_failed: !report.passed(),
            })
        }
    }
}

fn run_subgroup(op: &SubgroupOp) -> Result<CmdResult> {
    let alphabet = standard_alphabet();
    match op {
        SubgroupOp::Fold { gens } => {
            let gens = parse_gens(&alphabet, gens)?;
            let graph = fricke_core::SubgroupGraph::build(&alphabet, &gens)?;
            let mut text = String::new();
            writeln!(text, "vertices: {}", graph.vertex_count()).unwrap();
            writeln!(text, "edges: {}", graph.edge_count()).unwrap();
            writeln!(text, "rank: {}", graph.rank()).unwrap();
            for (src, label, dst, decoration, in_tree) in graph.edges() {
                let marker = if in_tree { " [tree]" } else { "" };
                writeln!(text, "  {src} --{label}--> {dst}  ({decoration}){marker}").unwrap();
            }
            let json = json!({
                "status": "ok",
                "computed": {
                    "vertices": graph.vertex_count(),
                    "edges": graph.edge_count(),
                    "rank": graph.rank(),
                }
            });
            Ok(CmdResult { text, json, check_failed: false })
        }
        SubgroupOp::Contains { gens, word } => {
            let gens = parse_gens(&alphabet, gens)?;
            let graph = fricke_core::SubgroupGraph::build(&alphabet, &gens)?;
            let w = alphabet.parse_extended(word)?;
            Ok(CmdResult::ok(graph.contains(&w).to_string()))
        }
        SubgroupOp::Rank { gens } => {
            let gens = parse_gens(&alphabet, gens)?;
            let graph = fricke_core::SubgroupGraph::build(&alphabet, &gens)?;
            Ok(CmdResult::ok(graph.rank().to_string()))
        }
        SubgroupOp::Express { gens, word } => {
            let gens = parse_gens(&alphabet, gens)?;
            let graph = fricke_core::SubgroupGraph::build(&alphabet, &gens)?;
            let w = alphabet.parse_extended(word)?;
            let expr = graph.express(&w)?;
            Ok(CmdResult::ok(expr.to_string()))
        }
    }
}

fn run_hnn(file: &PathBuf, op: &HnnOp) -> Result<CmdResult> {
    let parsed = load_presentation(file)?;
    let pres = parsed.as_hnn()?;
    match op {
        HnnOp::NormalForm { word } => {
            let w = pres.parse_word(word)?;
            let nf = pres.normal_form(&w)?;
            Ok(CmdResult::ok(nf.to_string()))
        }
        HnnOp::Equal { left, right } => {
            let l = pres.parse_word(left)?;
            let r = pres.parse_word(right)?;
            Ok(CmdResult::ok(pres.equal(&l, &r)?.to_string()))
        }
        HnnOp::Rewrite => {
            let text = format!("gens: {}; phi: {}", pres.base_alphabet(), pres.endomorphism());
            Ok(CmdResult::ok(text))
        }
        HnnOp::CheckHom { source, images } => {
            let source_pres = load_presentation(source)?.as_finite_presentation()?;
            let image_words = parse_images(&source_pres.alphabet, &pres, images)?;
            let ok =
                check_homomorphism(&source_pres.alphabet, &source_pres.relators, &pres, &image_words)?;
            Ok(CmdResult::ok(ok.to_string()))
        }
    }
}

/// Parse `"a -> b0 ; t -> t^2"` where names come from the source alphabet
/// and images are words over the target presentation.
fn parse_images(
    source: &Alphabet,
    target: &HnnPresentation,
    spec: &str,
) -> Result<Vec<FreeWord>> {
    let mut images: Vec<Option<FreeWord>> = vec![None; source.size()];
    for part in spec.split(';') {
        let part = part.trim();
        if part.is_empty() {
            continue;
        }
        let (name, word) =
            part.split_once("->").ok_or_else(|| anyhow!("expected `gen -> word` in `{part}`"))?;
        let name = name.trim();
        let gen = source
            .index(name)
            .ok_or_else(|| anyhow!("unknown source generator `{name}`"))?;
        if images[gen].is_some() {
            bail!("duplicate image for `{name}`");
        }
        images[gen] = Some(target.parse_word(word)?);
    }
    images
        .into_iter()
        .enumerate()
        .map(|(i, img)| img.ok_or_else(|| anyhow!("missing image for `{}`", source.name(i))))
        .collect()
}
