//! Command-line front end. Documents travel as canonical JSON; reports are
//! stable text. Exit codes: 0 success, 1 mathematical failure (an axiom or
//! property fails, with a witness in the report), 2 input error.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::Value;

use dgmod::duality::is_dualizable;
use dgmod::ext::is_semi_flat;
use dgmod::field::Field;
use dgmod::graded::GradedComplex;
use dgmod::instances::{corpus, corpus_names, run_theorem_suite};
use dgmod::json::{self, DocError};
use dgmod::limits::{
    colimit, factor_through_stage, lazard_factorize, recognize_fg_semifree, SemifreeVerdict,
};
use dgmod::module::{dual, hom_a, tensor_a, DGModule, ModuleError, ModuleMap};
use dgmod::report::ValidationReport;

#[derive(Parser)]
#[command(name = "dgmod", version, about = "Exact module-category computations over finite-dimensional DG-algebras")]
struct Cli {
    /// Require every input document to be over this field (Q or Fp:<p>).
    #[arg(long, global = true)]
    field: Option<String>,
    /// Write the JSON or text result to this path instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Check the axioms of an algebra, module, map, presentation, or system
    /// document and print a report.
    Validate { path: PathBuf },
    /// Decide dualizability of a module; prints the verdict with either the
    /// coevaluation witness or the failing condition.
    Dualizable { path: PathBuf },
    /// dim Ext^1(X, Y) for two modules over the same algebra.
    Ext1 { x: PathBuf, y: PathBuf },
    /// Degreewise homology dimensions of a module's underlying complex.
    Homology { path: PathBuf },
    /// Y (x)_A X for a right module Y and a left module X.
    Tensor { y: PathBuf, x: PathBuf },
    /// hom_A(X, Y) for two modules on the same side.
    Hom { x: PathBuf, y: PathBuf },
    /// The dual X* = hom_A(X, A).
    Dual { x: PathBuf },
    /// The colimit of a finite directed system, as a module document.
    Colimit { system: PathBuf },
    /// Factor a map u through a stage of a directed system (--system) or
    /// through a free module via the flatness certificate (--presentation).
    Factorize {
        /// A map document for u.
        map: PathBuf,
        /// Presentation document L1 -> L0 -> M of the target of u.
        #[arg(long, conflicts_with = "system")]
        presentation: Option<PathBuf>,
        /// System document whose colimit is the target of u.
        #[arg(long)]
        system: Option<PathBuf>,
    },
    /// Independently recheck a factorization document: validity of all three
    /// maps and the exact identity w . v = u.
    Verify { path: PathBuf },
    /// Battery-relative semi-flatness of a module.
    Semiflat {
        module: PathBuf,
        /// Battery document with short exact sequences and acyclic modules.
        #[arg(long)]
        battery: PathBuf,
    },
    /// Bounded search for a finite semi-free filtration.
    Semifree {
        module: PathBuf,
        /// Largest generator degree magnitude to try.
        #[arg(long, default_value_t = 3)]
        degree_bound: i64,
        /// Maximum filtration length.
        #[arg(long, default_value_t = 6)]
        length_bound: usize,
    },
    /// Run the frozen theorem suite for a named corpus (see `suite --list`).
    Suite {
        corpus: Option<String>,
        #[arg(long)]
        list: bool,
    },
}

enum Failure {
    /// Exit 1: the mathematics failed; the message is the report.
    Math(String),
    /// Exit 2: the input could not be used.
    Input(String),
}

impl From<DocError> for Failure {
    fn from(e: DocError) -> Failure {
        match e {
            DocError::Malformed(m) => Failure::Input(format!("malformed document: {m}")),
            DocError::Math(m) => Failure::Math(m),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut out = Output { path: cli.output.clone() };
    match run(&cli, &mut out) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Math(msg)) => {
            // mathematical failures still report to stdout; stderr is for
            // errors in using the tool
            println!("{}", msg.trim_end());
            ExitCode::from(1)
        }
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

struct Output {
    path: Option<PathBuf>,
}

impl Output {
    fn emit(&mut self, text: &str) -> Result<(), Failure> {
        match &self.path {
            Some(p) => std::fs::write(p, text)
                .map_err(|e| Failure::Input(format!("cannot write {}: {e}", p.display()))),
            None => {
                print!("{text}");
                Ok(())
            }
        }
    }

    fn emit_doc(&mut self, doc: &Value) -> Result<(), Failure> {
        self.emit(&json::render(doc))
    }
}

fn read_doc(path: &PathBuf, field_flag: &Option<String>) -> Result<Value, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::Input(format!("cannot read {}: {e}", path.display())))?;
    let doc: Value = serde_json::from_str(&text)
        .map_err(|e| Failure::Input(format!("{} is not valid JSON: {e}", path.display())))?;
    if let Some(tag) = field_flag {
        let want = Field::from_tag(tag)
            .map_err(|e| Failure::Input(format!("bad --field {tag:?}: {e}")))?;
        let got = doc
            .get("field")
            .and_then(Value::as_str)
            .ok_or_else(|| Failure::Input(format!("{} has no field tag", path.display())))?;
        if Field::from_tag(got).ok() != Some(want) {
            return Err(Failure::Input(format!(
                "{} is over {got}, but --field {tag} was required",
                path.display()
            )));
        }
    }
    Ok(doc)
}

fn require_pass(rep: &ValidationReport, what: &str) -> Result<(), Failure> {
    if rep.all_pass() {
        Ok(())
    } else {
        Err(Failure::Math(format!("{what} fails validation:\n{rep}")))
    }
}

fn load_module(path: &PathBuf, field_flag: &Option<String>) -> Result<DGModule, Failure> {
    let doc = read_doc(path, field_flag)?;
    let m = json::module_from_doc(&doc)?;
    require_pass(&m.validate(), &format!("module {}", path.display()))?;
    Ok(m)
}

fn load_map(path: &PathBuf, field_flag: &Option<String>) -> Result<ModuleMap, Failure> {
    let doc = read_doc(path, field_flag)?;
    let f = json::map_from_doc(&doc)?;
    require_pass(&f.source.validate(), "map source")?;
    require_pass(&f.target.validate(), "map target")?;
    if !f.is_valid() {
        return Err(Failure::Math(
            "map fails validation: not a degree-0 A-linear chain map".into(),
        ));
    }
    Ok(f)
}

fn complex_doc(field: Field, x: &GradedComplex) -> Value {
    let as_map = |entries: Vec<(i64, usize)>| {
        entries
            .into_iter()
            .map(|(n, d)| (n.to_string(), Value::from(d)))
            .collect::<serde_json::Map<_, _>>()
    };
    let payload = serde_json::json!({
        "dims": as_map(x.dims().iter().map(|(&n, &d)| (n, d)).collect()),
        "homology": as_map(x.homology().into_iter().collect()),
    });
    json::wrap(field, "complex", payload)
}

fn run(cli: &Cli, out: &mut Output) -> Result<(), Failure> {
    match &cli.cmd {
        Cmd::Validate { path } => cmd_validate(path, &cli.field, out),
        Cmd::Dualizable { path } => {
            let m = load_module(path, &cli.field)?;
            let v = is_dualizable(&m);
            let payload = serde_json::json!({
                "dualizable": v.dualizable,
                "failed_condition": v.failed_condition,
                "witness_coords": v.witness.as_ref().map(|w| {
                    (0..w.rows).map(|i| m.field().render(w.get(i, 0))).collect::<Vec<_>>()
                }),
            });
            let doc = json::wrap(m.field(), "verdict", payload);
            if v.dualizable {
                out.emit_doc(&doc)
            } else {
                Err(Failure::Math(json::render(&doc).trim_end().to_string()))
            }
        }
        Cmd::Ext1 { x, y } => {
            let xm = load_module(x, &cli.field)?;
            let ym = load_module(y, &cli.field)?;
            if xm.algebra.carrier != ym.algebra.carrier {
                return Err(Failure::Input("ext1 arguments live over different algebras".into()));
            }
            let n = dgmod::ext::ext1(&xm, &ym);
            out.emit_doc(&json::wrap(xm.field(), "dimension", serde_json::json!({ "ext1": n })))
        }
        Cmd::Homology { path } => {
            let m = load_module(path, &cli.field)?;
            out.emit_doc(&complex_doc(m.field(), &m.carrier))
        }
        Cmd::Tensor { y, x } => {
            let ym = load_module(y, &cli.field)?;
            let xm = load_module(x, &cli.field)?;
            if ym.algebra.carrier != xm.algebra.carrier {
                return Err(Failure::Input("tensor arguments live over different algebras".into()));
            }
            if !ym.has_right() || !xm.has_left() {
                return Err(Failure::Input(
                    "tensor needs a right module then a left module".into(),
                ));
            }
            let t = tensor_a(&ym, &xm);
            match &t.module {
                Some(m) => out.emit_doc(&json::module_to_doc(m)),
                None => out.emit_doc(&complex_doc(ym.field(), &t.complex)),
            }
        }
        Cmd::Hom { x, y } => {
            let xm = load_module(x, &cli.field)?;
            let ym = load_module(y, &cli.field)?;
            if xm.algebra.carrier != ym.algebra.carrier {
                return Err(Failure::Input("hom arguments live over different algebras".into()));
            }
            let same_side = (xm.has_left() && ym.has_left()) || (xm.has_right() && ym.has_right());
            if !same_side {
                return Err(Failure::Input("hom needs two modules on the same side".into()));
            }
            let h = hom_a(&xm, &ym);
            match &h.module {
                Some(m) => out.emit_doc(&json::module_to_doc(m)),
                None => out.emit_doc(&complex_doc(xm.field(), &h.complex)),
            }
        }
        Cmd::Dual { x } => {
            let xm = load_module(x, &cli.field)?;
            out.emit_doc(&json::module_to_doc(&dual(&xm).module))
        }
        Cmd::Colimit { system } => {
            let doc = read_doc(system, &cli.field)?;
            let d = json::system_from_doc(&doc)?;
            require_pass(&d.validate(), "directed system")?;
            out.emit_doc(&json::module_to_doc(&colimit(&d).module))
        }
        Cmd::Factorize { map, presentation, system } => {
            let u = load_map(map, &cli.field)?;
            match (presentation, system) {
                (Some(p), None) => {
                    let pdoc = read_doc(p, &cli.field)?;
                    let pres = json::presentation_from_doc(&pdoc)?;
                    require_pass(&pres.validate(), "presentation")?;
                    match lazard_factorize(&u, &pres) {
                        Ok(fact) => out.emit_doc(&json::factorization_to_doc(&fact, &u)),
                        Err(ModuleError::Usage(msg)) if msg.contains("not flat") => {
                            Err(Failure::Math(format!("operation requires {msg}")))
                        }
                        Err(e) => Err(Failure::Input(e.to_string())),
                    }
                }
                (None, Some(s)) => {
                    let sdoc = read_doc(s, &cli.field)?;
                    let d = json::system_from_doc(&sdoc)?;
                    require_pass(&d.validate(), "directed system")?;
                    let c = colimit(&d);
                    if u.target.carrier != c.module.carrier {
                        return Err(Failure::Input(
                            "the map's target is not the colimit of the system".into(),
                        ));
                    }
                    match factor_through_stage(&u, &d, &c) {
                        Some(fact) => out.emit_doc(&json::factorization_to_doc(&fact, &u)),
                        None => Err(Failure::Math(
                            "the map does not factor through any stage".into(),
                        )),
                    }
                }
                _ => Err(Failure::Input(
                    "factorize needs exactly one of --presentation or --system".into(),
                )),
            }
        }
        Cmd::Verify { path } => cmd_verify(path, &cli.field, out),
        Cmd::Semiflat { module, battery } => {
            let m = load_module(module, &cli.field)?;
            let bdoc = read_doc(battery, &cli.field)?;
            let b = json::battery_from_doc(&bdoc)?;
            for (i, s) in b.ses.iter().enumerate() {
                require_pass(&s.validate(), &format!("battery sequence {i}"))?;
            }
            for (i, a) in b.acyclics.iter().enumerate() {
                require_pass(&a.validate(), &format!("battery acyclic module {i}"))?;
                if !a.carrier.is_acyclic() {
                    return Err(Failure::Input(format!("battery module {i} is not acyclic")));
                }
            }
            let v = is_semi_flat(&m, &b.ses, &b.acyclics)
                .map_err(|e| Failure::Input(e.to_string()))?;
            let doc = json::wrap(
                m.field(),
                "verdict",
                serde_json::json!({
                    "semi_flat_on_battery": v.pass(),
                    "flat_on_battery": v.flat_on_battery,
                    "preserves_acyclicity_on_battery": v.preserves_acyclicity_on_battery,
                    "witness": v.witness,
                }),
            );
            if v.pass() {
                out.emit_doc(&doc)
            } else {
                Err(Failure::Math(json::render(&doc).trim_end().to_string()))
            }
        }
        Cmd::Semifree { module, degree_bound, length_bound } => {
            let m = load_module(module, &cli.field)?;
            if m.side == dgmod::module::Side::Bi {
                return Err(Failure::Input("semifree search needs a one-sided module".into()));
            }
            match recognize_fg_semifree(&m, *degree_bound, *length_bound) {
                SemifreeVerdict::Found(degs) => out.emit_doc(&json::wrap(
                    m.field(),
                    "verdict",
                    serde_json::json!({ "semifree": true, "generator_degrees": degs }),
                )),
                SemifreeVerdict::NotFoundWithinBounds => Err(Failure::Math(
                    "no finite semi-free filtration found within the given bounds".into(),
                )),
            }
        }
        Cmd::Suite { corpus: name, list } => {
            if *list {
                let mut text = String::new();
                for n in corpus_names() {
                    text.push_str(n);
                    text.push('\n');
                }
                return out.emit(&text);
            }
            let name = name
                .as_ref()
                .ok_or_else(|| Failure::Input("suite needs a corpus name or --list".into()))?;
            let c = corpus(name).map_err(|e| Failure::Input(e.to_string()))?;
            let rep = run_theorem_suite(&c);
            let text = rep.render();
            if rep.pass() {
                out.emit(&text)
            } else {
                Err(Failure::Math(text.trim_end().to_string()))
            }
        }
    }
}

fn cmd_validate(
    path: &PathBuf,
    field_flag: &Option<String>,
    out: &mut Output,
) -> Result<(), Failure> {
    let doc = read_doc(path, field_flag)?;
    let kind = json::document_kind(&doc).map_err(Failure::from)?.to_string();
    let rep = match kind.as_str() {
        "algebra" => {
            let (field, payload) = json::unwrap(&doc, "algebra")?;
            json::algebra_presentation_from_payload(field, payload)?.validate()
        }
        "module" => json::module_from_doc(&doc)?.validate(),
        "map" => {
            let f = json::map_from_doc(&doc)?;
            let mut rep = f.source.validate();
            for c in f.target.validate().checks {
                rep.checks.push(c);
            }
            rep.record(
                "map-is-a-module-map",
                (!f.is_valid()).then(|| "not a degree-0 A-linear chain map".into()),
            );
            rep
        }
        "presentation" => {
            let p = json::presentation_from_doc(&doc)?;
            p.validate()
        }
        "system" => {
            let d = json::system_from_doc(&doc)?;
            d.validate()
        }
        other => {
            return Err(Failure::Input(format!("cannot validate documents of kind {other:?}")))
        }
    };
    let text = format!("{rep}");
    if rep.all_pass() {
        out.emit(&text)
    } else {
        Err(Failure::Math(text.trim_end().to_string()))
    }
}

/// Rechecks a factorization document from scratch, trusting nothing from the
/// producer: the three maps must be valid module maps with matching endpoints
/// and the composite must equal u by direct matrix multiplication.
fn cmd_verify(
    path: &PathBuf,
    field_flag: &Option<String>,
    out: &mut Output,
) -> Result<(), Failure> {
    let doc = read_doc(path, field_flag)?;
    let fact = json::factorization_from_doc(&doc)?;
    let mut rep = ValidationReport::default();
    for (name, m) in [
        ("source-module", &fact.u.source),
        ("middle-module", &fact.v.target),
        ("target-module", &fact.u.target),
    ] {
        let r = m.validate();
        rep.record(
            name,
            r.first_failure()
                .map(|c| format!("{}: {}", c.name, c.witness.clone().unwrap_or_default())),
        );
    }
    rep.record("u-is-a-module-map", (!fact.u.is_valid()).then(|| "invalid".into()));
    rep.record("v-is-a-module-map", (!fact.v.is_valid()).then(|| "invalid".into()));
    rep.record("w-is-a-module-map", (!fact.w.is_valid()).then(|| "invalid".into()));
    rep.record(
        "endpoints-line-up",
        (fact.v.source.carrier != fact.u.source.carrier
            || fact.w.target.carrier != fact.u.target.carrier
            || fact.v.target.carrier != fact.w.source.carrier)
            .then(|| "v and w do not connect the source of u to its target".into()),
    );
    if rep.all_pass() {
        // composite check by raw matrix multiplication, degree by degree
        let mut mismatch = None;
        for n in fact.u.source.carrier.support() {
            let wv = fact.w.map.comp(n).mul(&fact.v.map.comp(n));
            if wv != fact.u.map.comp(n) {
                mismatch = Some(format!("w . v differs from u in degree {n}"));
                break;
            }
        }
        rep.record("composite-equals-u", mismatch);
    }
    let text = format!("{rep}");
    if rep.all_pass() {
        out.emit(&text)
    } else {
        Err(Failure::Math(text.trim_end().to_string()))
    }
}
