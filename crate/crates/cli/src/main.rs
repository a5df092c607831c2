//! `torelli`: command-line front end for torelli-core.
//!
//! Exit codes: 0 success or equivalent, 1 invalid input, 2 a search cap was
//! hit, 3 decided negative (inequivalent, unequal, or a failed check).

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use torelli_core::checks::{self, Suite};
use torelli_core::connectivity::{cyclically_equivalent_with, three_edge_connectivization};
use torelli_core::delaunay::{decompositions_equivalent_with, delaunay_with, DelaunayDecomposition};
use torelli_core::doc::{self, Document, Kind, Reader};
use torelli_core::forms::{arithmetically_equivalent_with, QuadraticForm};
use torelli_core::moduli::{build_mg_poset_with, torelli_fibers_with, tropical_torelli_with};
use torelli_core::stable::compactified_fiber_equal;
use torelli_core::tropical::{graph_form, jacobian, tropical_3ec, tropical_cyclically_equivalent_with, tropicalize};
use torelli_core::{enumerate_stable_weighted_graphs_with, Error, Limits};

#[derive(Parser)]
#[command(name = "torelli", version, about = "Exact tropical and compactified Torelli combinatorics")]
struct Cli {
    /// Uniform cap for every exhaustive search.
    #[arg(long, global = true)]
    limit: Option<usize>,
    /// Accept non-reduced rationals in input, with a warning.
    #[arg(long, global = true)]
    normalize: bool,
    /// Write the output document here instead of stdout.
    #[arg(long, short, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// List stable weighted graphs of a genus up to isomorphism.
    Enumerate {
        #[arg(long)]
        genus: u32,
    },
    /// Gram matrix of the Jacobian of a tropical curve.
    Jacobian { curve: PathBuf },
    /// Delaunay decomposition of a form, or of a curve's or graph's Jacobian.
    Delaunay { input: PathBuf },
    /// 3-edge-connectivization of a graph or curve.
    #[command(name = "3ec")]
    ThreeEc { input: PathBuf },
    /// Tropical curve of a nodal model.
    Tropicalize { model: PathBuf },
    /// Decide one of the three equivalences between two inputs.
    Equiv {
        #[arg(long, value_enum)]
        mode: Mode,
        a: PathBuf,
        b: PathBuf,
    },
    /// Fiber partition of a genus, or the Torelli image of one curve.
    TorelliFibers {
        #[arg(long, conflicts_with = "curve", required_unless_present = "curve")]
        genus: Option<u32>,
        #[arg(long)]
        curve: Option<PathBuf>,
    },
    /// Compare two labeled stable models under the compactified criterion.
    CompactifiedFiber { a: PathBuf, b: PathBuf },
    /// Stratification poset of a genus.
    Poset {
        #[arg(long)]
        genus: u32,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Run an invariant battery.
    Check {
        #[arg(long)]
        suite: String,
        #[arg(long)]
        genus: u32,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Cyclic,
    Arithmetic,
    Delaunay,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Dot,
}

/// What a command produced: text for `--out`/stdout, a summary line for
/// stderr, and whether the answer was negative.
struct Outcome {
    text: String,
    note: Option<String>,
    negative: bool,
}

impl Outcome {
    fn doc(d: Document) -> Self {
        Outcome {
            text: d.emit(),
            note: None,
            negative: false,
        }
    }

    fn report(payload: Value, negative: bool) -> Self {
        Outcome {
            text: Document::new(Kind::Report, payload).emit(),
            note: None,
            negative,
        }
    }
}

enum Failure {
    Core(Error),
    Io(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

fn read(path: &Path) -> Result<Document, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
    Ok(Document::parse(&text)?)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let limits = cli.limit.map_or_else(Limits::default, Limits::uniform);
    let mut reader = if cli.normalize {
        Reader::normalizing()
    } else {
        Reader::strict()
    };
    let result = run(&cli.command, &limits, &mut reader);
    for w in &reader.warnings {
        eprintln!("warning: {w}");
    }
    let outcome = match result {
        Ok(o) => o,
        Err(Failure::Core(e)) => {
            eprintln!("error: {e}");
            return ExitCode::from(match e {
                Error::Validation(_) => 1,
                Error::Limit(_) => 2,
            });
        }
        Err(Failure::Io(msg)) => {
            eprintln!("error: {msg}");
            return ExitCode::from(1);
        }
    };
    match &cli.out {
        Some(path) => {
            if let Err(e) = fs::write(path, &outcome.text) {
                eprintln!("error: {}: {e}", path.display());
                return ExitCode::from(1);
            }
        }
        None => print!("{}", outcome.text),
    }
    if let Some(note) = &outcome.note {
        eprintln!("{note}");
    }
    ExitCode::from(if outcome.negative { 3 } else { 0 })
}

fn run(cmd: &Command, limits: &Limits, reader: &mut Reader) -> Result<Outcome, Failure> {
    match cmd {
        Command::Enumerate { genus } => {
            let graphs = enumerate_stable_weighted_graphs_with(*genus, limits)?;
            let mut o = Outcome::report(
                json!({
                    "genus": genus,
                    "count": graphs.len(),
                    "graphs": graphs.iter().map(doc::graph_value).collect::<Vec<_>>(),
                }),
                false,
            );
            o.note = Some(format!("count: {}", graphs.len()));
            Ok(o)
        }
        Command::Jacobian { curve } => {
            let c = reader.curve(&read(curve)?)?;
            Ok(Outcome::doc(doc::form_document(&jacobian(&c))))
        }
        Command::Delaunay { input } => {
            let q = read_form(&read(input)?, reader)?;
            let d = delaunay_with(&q, limits)?;
            let mut o = Outcome::doc(doc::delaunay_document(&d));
            o.note = Some(format!("f-vector: {:?}", d.f_vector()));
            Ok(o)
        }
        Command::ThreeEc { input } => {
            let d = read(input)?;
            Ok(Outcome::doc(match d.kind {
                Kind::Curve => doc::curve_document(&tropical_3ec(&reader.curve(&d)?)),
                _ => doc::graph_document(&three_edge_connectivization(&reader.graph(&d)?)),
            }))
        }
        Command::Tropicalize { model } => {
            let m = reader.model(&read(model)?)?;
            Ok(Outcome::doc(doc::curve_document(&tropicalize(&m))))
        }
        Command::Equiv { mode, a, b } => equiv(*mode, &read(a)?, &read(b)?, limits, reader),
        Command::TorelliFibers { genus, curve } => match (genus, curve) {
            (_, Some(path)) => {
                let c = reader.curve(&read(path)?)?;
                let t = tropical_torelli_with(&c, limits)?;
                Ok(Outcome::report(
                    json!({
                        "dimension": t.dimension,
                        "form": doc::form_value(&t.form),
                        "label": t.label,
                    }),
                    false,
                ))
            }
            (Some(g), None) => {
                let r = torelli_fibers_with(*g, limits)?;
                let classes: Vec<Value> = r
                    .classes
                    .iter()
                    .map(|c| {
                        json!({
                            "label": c.label,
                            "strata": c.strata,
                            "representative": doc::curve_value(&c.representative),
                        })
                    })
                    .collect();
                let mut o = Outcome::report(
                    json!({"genus": g, "classes": classes, "violations": r.violations}),
                    !r.violations.is_empty(),
                );
                o.note = Some(format!("classes: {}", r.classes.len()));
                Ok(o)
            }
            (None, None) => unreachable!("clap requires one of --genus/--curve"),
        },
        Command::CompactifiedFiber { a, b } => {
            let x1 = reader.curve_model(&read(a)?)?;
            let x2 = reader.curve_model(&read(b)?)?;
            let f = compactified_fiber_equal(&x1, &x2)?;
            Ok(Outcome::report(
                json!({
                    "equal": f.equal,
                    "blocks": [f.blocks[0].len(), f.blocks[1].len()],
                    "matching": f.matching,
                }),
                !f.equal,
            ))
        }
        Command::Poset { genus, format } => {
            let p = build_mg_poset_with(*genus, limits)?;
            let text = match format {
                Format::Json => doc::poset_document(&p).emit(),
                Format::Dot => doc::poset_dot(&p),
            };
            Ok(Outcome {
                text,
                note: Some(format!("strata: {}", p.len())),
                negative: false,
            })
        }
        Command::Check { suite, genus } => {
            let suite: Suite = suite.parse()?;
            let r = checks::run(suite, *genus, limits)?;
            let mut o = Outcome::report(
                json!({
                    "suite": r.suite.to_string(),
                    "genus": r.genus,
                    "checked": r.checked,
                    "passed": r.passed(),
                    "violations": r.violations,
                }),
                !r.passed(),
            );
            o.note = Some(format!(
                "{} genus {}: {} checked, {} violations",
                r.suite,
                r.genus,
                r.checked,
                r.violations.len()
            ));
            Ok(o)
        }
    }
}

/// A form document, or the Jacobian of a curve, or the unit form of a graph.
fn read_form(d: &Document, reader: &mut Reader) -> Result<QuadraticForm, Failure> {
    Ok(match d.kind {
        Kind::Form => reader.form(d)?,
        Kind::Curve => jacobian(&reader.curve(d)?),
        Kind::Graph => graph_form(&reader.graph(d)?),
        k => return Err(Error::Validation(format!("expected a form, curve or graph document, found {k:?}")).into()),
    })
}

fn delaunay_of(d: &Document, reader: &mut Reader, limits: &Limits) -> Result<DelaunayDecomposition, Failure> {
    Ok(delaunay_with(&read_form(d, reader)?, limits)?)
}

fn equiv(mode: Mode, a: &Document, b: &Document, limits: &Limits, reader: &mut Reader) -> Result<Outcome, Failure> {
    let (name, witness) = match mode {
        Mode::Cyclic => {
            if a.kind != b.kind {
                return Err(Error::Validation("cyclic equivalence needs two graphs or two curves".into()).into());
            }
            let map = if a.kind == Kind::Curve {
                tropical_cyclically_equivalent_with(&reader.curve(a)?, &reader.curve(b)?, limits)?
            } else {
                cyclically_equivalent_with(&reader.graph(a)?, &reader.graph(b)?, limits)?
            };
            ("cyclic", map.map(|m| json!({ "edge_map": m })))
        }
        Mode::Arithmetic => {
            let h = arithmetically_equivalent_with(&read_form(a, reader)?, &read_form(b, reader)?, limits)?;
            ("arithmetic", h.map(|h| json!({ "h": doc::integer_rows(&h) })))
        }
        Mode::Delaunay => {
            let (d1, d2) = (delaunay_of(a, reader, limits)?, delaunay_of(b, reader, limits)?);
            let rel = decompositions_equivalent_with(&d1, &d2, limits)?;
            (
                "delaunay",
                rel.map(|r| json!({ "h": doc::integer_rows(&r.witness) })),
            )
        }
    };
    let equivalent = witness.is_some();
    let mut o = Outcome::report(
        json!({ "mode": name, "equivalent": equivalent, "witness": witness }),
        !equivalent,
    );
    o.note = Some(if equivalent { "equivalent".into() } else { "not equivalent".into() });
    Ok(o)
}
