//! The `twobridge` command line.
//!
//! Every command prints one document to stdout: JSON by default, or an
//! aligned key/value table with `--format table`. All numeric values are
//! strings (`"p/q"`, `"3"`), so nothing passes through floating point.
//!
//! Exit codes: `0` ok, `2` invalid input, `3` not applicable (non-hyperbolic
//! link, odd denominator, meridional slope), `4` internal consistency fault.

use std::collections::BTreeMap;
use std::ffi::OsString;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use crate::census::{enumerate_census, note_identity_check, CensusEntry, CensusError};
use crate::classifier::{classify, ClassifyError, FamilyWitness, SurgeryClass};
use crate::diagram::{d_distance, lemma_family_check, DiagramError};
use crate::notation::{
    canonicalize_link, equivalent_links, mirror_link, parse_continued_fraction, parse_slope,
    slope_to_cf, CanonicalLink, NotationError, Slope,
};
use crate::selftest::{run_selftest, Fault, Level};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum Format {
    #[default]
    Json,
    Table,
}

#[derive(Debug, Parser)]
#[command(
    name = "twobridge",
    version,
    about = "Exceptional surgeries on components of two-bridge links"
)]
struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Classify surgery on one component of a two-bridge link.
    Classify {
        /// Link as "p/q" or a continued fraction "[b1,...,bn]".
        #[arg(long, allow_hyphen_values = true)]
        link: String,
        /// Surgery slope as "p/q" or an integer.
        #[arg(long, allow_hyphen_values = true)]
        slope: String,
    },
    /// Convert between a continued fraction and a slope.
    Convert {
        #[arg(
            long,
            allow_hyphen_values = true,
            conflicts_with = "slope",
            required_unless_present = "slope"
        )]
        cf: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        slope: Option<String>,
    },
    /// Decide whether two links are equivalent.
    Equiv {
        #[arg(long, allow_hyphen_values = true)]
        link: String,
        #[arg(long, allow_hyphen_values = true)]
        other: String,
    },
    /// Mirror image of a link.
    Mirror {
        #[arg(long, allow_hyphen_values = true)]
        link: String,
    },
    /// D-edge distance between two even-denominator slopes.
    Dist {
        #[arg(long, allow_hyphen_values = true)]
        from: String,
        #[arg(long, allow_hyphen_values = true)]
        to: String,
        /// Denominator bound (default: twice the larger endpoint denominator).
        #[arg(long)]
        bound: Option<i64>,
    },
    /// Compare length-2 D-path endpoints with the [2,n,-2] family.
    LemmaCheck {
        #[arg(long, default_value_t = 10)]
        n_bound: i64,
    },
    /// List every exceptional pair with link denominator up to --max-q.
    Census {
        #[arg(long, default_value_t = 24)]
        max_q: i64,
    },
    /// Verify [2w,1,2u] = [2w+1,-2u-1] together with the slope shift.
    NoteCheck {
        #[arg(long, default_value_t = 20)]
        bound: i64,
    },
    /// Run the built-in acceptance checks.
    Selftest {
        #[arg(long, value_enum, default_value_t = Level::Quick)]
        level: Level,
        #[arg(long, value_enum, hide = true)]
        inject_fault: Option<Fault>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Ok,
    InvalidInput,
    NotApplicable,
    InternalFault,
}

impl Status {
    pub const fn as_str(self) -> &'static str {
        match self {
            Status::Ok => "ok",
            Status::InvalidInput => "invalid_input",
            Status::NotApplicable => "not_applicable",
            Status::InternalFault => "internal_fault",
        }
    }

    pub const fn exit_code(self) -> i32 {
        match self {
            Status::Ok => 0,
            Status::InvalidInput => 2,
            Status::NotApplicable => 3,
            Status::InternalFault => 4,
        }
    }
}

/// The document produced by one invocation.
#[derive(Debug, Clone, PartialEq)]
pub struct CommandResult {
    pub status: Status,
    /// The full JSON document (`status` plus `result` or `error`).
    pub payload: Value,
    /// Exactly what is written to stdout.
    pub rendered: String,
}

impl CommandResult {
    pub fn exit_code(&self) -> i32 {
        self.status.exit_code()
    }
}

struct Failure {
    status: Status,
    reason: &'static str,
    message: String,
    details: Option<Value>,
}

impl Failure {
    fn new(status: Status, reason: &'static str, message: impl Into<String>) -> Self {
        Self {
            status,
            reason,
            message: message.into(),
            details: None,
        }
    }

    fn with_details(mut self, details: Value) -> Self {
        self.details = Some(details);
        self
    }
}

impl From<NotationError> for Failure {
    fn from(err: NotationError) -> Self {
        let (status, reason) = match err {
            NotationError::MalformedSlope(_)
            | NotationError::MalformedContinuedFraction(_)
            | NotationError::ZeroOverZero
            | NotationError::InvalidInfinity(_)
            | NotationError::EmptyContinuedFraction => (Status::InvalidInput, "malformed_input"),
            NotationError::Overflow => (Status::InvalidInput, "overflow"),
            NotationError::OddDenominator(_) => (Status::NotApplicable, "odd_denominator"),
            NotationError::DegenerateLink(_) => (Status::NotApplicable, "degenerate_link"),
            NotationError::InfiniteSlope(_) => (Status::NotApplicable, "meridional_slope"),
            NotationError::IntegerSlope(_) => (Status::NotApplicable, "integer_slope"),
        };
        Failure::new(status, reason, err.to_string())
    }
}

impl From<ClassifyError> for Failure {
    fn from(err: ClassifyError) -> Self {
        match err {
            ClassifyError::Notation(inner) => inner.into(),
            ClassifyError::NotHyperbolic(link) => {
                Failure::new(Status::NotApplicable, "not_hyperbolic", err.to_string()).with_details(
                    json!({
                        "canonical_link": link.to_string(),
                        "hyperbolic_link": false,
                    }),
                )
            }
            ClassifyError::MeridionalSlope => {
                Failure::new(Status::NotApplicable, "meridional_slope", err.to_string())
            }
            ClassifyError::InvalidWitness { .. } | ClassifyError::ConstraintGap { .. } => {
                Failure::new(Status::InternalFault, "inconsistent", err.to_string())
            }
        }
    }
}

impl From<DiagramError> for Failure {
    fn from(err: DiagramError) -> Self {
        let reason = match err {
            DiagramError::OddVertex(_) => "odd_denominator",
            DiagramError::BoundTooSmall { .. } => "bound_too_small",
            DiagramError::UnsupportedLength(_) => "unsupported_length",
            DiagramError::LemmaBound(_) => "bound_too_small",
        };
        let status = match err {
            DiagramError::OddVertex(_) => Status::NotApplicable,
            _ => Status::InvalidInput,
        };
        Failure::new(status, reason, err.to_string())
    }
}

impl From<CensusError> for Failure {
    fn from(err: CensusError) -> Self {
        match err {
            CensusError::BadBound(_) => {
                Failure::new(Status::InvalidInput, "bound_too_small", err.to_string())
            }
            CensusError::Classify(inner) => inner.into(),
            CensusError::Inconsistent { .. } | CensusError::Ambiguous { .. } => {
                Failure::new(Status::InternalFault, "inconsistent", err.to_string())
            }
        }
    }
}

/// Parses a link given as `"p/q"` or `"[b1,...,bn]"`.
pub fn parse_link_text(text: &str) -> Result<Slope, NotationError> {
    if text.trim_start().starts_with('[') {
        parse_continued_fraction(text)?.value()
    } else {
        parse_slope(text)
    }
}

fn canonical(text: &str) -> Result<CanonicalLink, Failure> {
    Ok(canonicalize_link(parse_link_text(text)?)?)
}

fn witness_json(w: &FamilyWitness) -> Value {
    let mut obj = Map::new();
    for (name, value) in [("w", w.w), ("v", w.v), ("u", w.u)] {
        if let Some(x) = value {
            obj.insert(name.to_string(), Value::String(x.to_string()));
        }
    }
    obj.insert("mirrored".to_string(), Value::Bool(w.mirrored));
    Value::Object(obj)
}

pub fn classification_json(class: &SurgeryClass) -> Value {
    let mut obj = Map::new();
    obj.insert("kind".into(), json!(class.kind().as_str()));
    if let Some(graph) = class.graph_manifold() {
        obj.insert("graph_manifold".into(), json!(graph));
    }
    if let Some(w) = class.witness() {
        obj.insert("family".into(), json!(w.family.as_str()));
        obj.insert("witness".into(), witness_json(w));
    }
    Value::Object(obj)
}

fn classification_document(
    link_input: &str,
    slope_input: &str,
    link: CanonicalLink,
    class: &SurgeryClass,
) -> Value {
    json!({
        "input": { "link": link_input, "slope": slope_input },
        "canonical_link": link.to_string(),
        "hyperbolic_link": link.is_hyperbolic(),
        "classification": classification_json(class),
    })
}

pub fn census_entry_json(entry: &CensusEntry) -> Value {
    let link = entry.link.to_string();
    let slope = entry.slope.to_string();
    classification_document(&link, &slope, entry.link, &entry.class)
}

fn strings<T: ToString>(items: impl IntoIterator<Item = T>) -> Value {
    Value::Array(
        items
            .into_iter()
            .map(|x| Value::String(x.to_string()))
            .collect(),
    )
}

/// A consistency report: a result when it holds, otherwise an internal fault
/// carrying the report as details.
fn checked(holds: bool, message: &str, report: Value) -> Result<(Status, Value), Failure> {
    if holds {
        Ok((Status::Ok, report))
    } else {
        Err(Failure::new(Status::InternalFault, "consistency_fault", message).with_details(report))
    }
}

fn execute(command: Command) -> Result<(Status, Value), Failure> {
    match command {
        Command::Classify { link, slope } => {
            let canonical_link = canonical(&link)?;
            let r = parse_slope(&slope)?;
            let class = classify(canonical_link, r)?;
            Ok((
                Status::Ok,
                classification_document(&link, &slope, canonical_link, &class),
            ))
        }
        Command::Convert { cf, slope } => {
            if let Some(text) = cf {
                let expansion = parse_continued_fraction(&text)?;
                let value = expansion.value()?;
                let mut out = json!({ "cf": expansion.to_string(), "slope": value.to_string() });
                if let Ok(link) = canonicalize_link(value) {
                    out["canonical_link"] = json!(link.to_string());
                }
                Ok((Status::Ok, out))
            } else {
                let text = slope.expect("clap requires --cf or --slope");
                let value = parse_slope(&text)?;
                let expansion = slope_to_cf(value)?;
                Ok((
                    Status::Ok,
                    json!({ "slope": value.to_string(), "cf": expansion.to_string() }),
                ))
            }
        }
        Command::Equiv { link, other } => {
            let a = canonical(&link)?;
            let b = canonical(&other)?;
            Ok((
                Status::Ok,
                json!({
                    "link": a.to_string(),
                    "other": b.to_string(),
                    "equivalent": equivalent_links(a, b),
                    "mirror_equivalent": equivalent_links(a, mirror_link(b)),
                }),
            ))
        }
        Command::Mirror { link } => {
            let a = canonical(&link)?;
            Ok((
                Status::Ok,
                json!({
                    "canonical_link": a.to_string(),
                    "mirror": mirror_link(a).to_string(),
                    "hyperbolic_link": a.is_hyperbolic(),
                }),
            ))
        }
        Command::Dist { from, to, bound } => {
            let a = parse_slope(&from)?;
            let b = parse_slope(&to)?;
            let bound = bound.unwrap_or_else(|| 2 * a.denominator().max(b.denominator()).max(1));
            let distance = d_distance(a, b, bound)?;
            Ok((
                Status::Ok,
                json!({
                    "from": a.to_string(),
                    "to": b.to_string(),
                    "bound": bound.to_string(),
                    "distance": distance.map_or_else(|| "unreachable".to_string(), |d| d.to_string()),
                }),
            ))
        }
        Command::LemmaCheck { n_bound } => {
            let report = lemma_family_check(n_bound)?;
            let holds = report.holds();
            checked(
                holds,
                "D-path endpoints and the [2,n,-2] family differ",
                json!({
                    "n_bound": n_bound.to_string(),
                    "holds": report.holds(),
                    "path_endpoints": strings(&report.path_endpoints),
                    "family": strings(&report.family),
                    "only_in_paths": strings(&report.only_in_paths),
                    "only_in_family": strings(&report.only_in_family),
                }),
            )
        }
        Command::Census { max_q } => {
            let entries = enumerate_census(max_q)?;
            Ok((
                Status::Ok,
                Value::Array(entries.iter().map(census_entry_json).collect()),
            ))
        }
        Command::NoteCheck { bound } => {
            if bound < 2 {
                return Err(Failure::new(
                    Status::InvalidInput,
                    "bound_too_small",
                    "note-check needs --bound >= 2",
                ));
            }
            let report = note_identity_check(bound);
            let failures: Vec<Value> = report
                .failures
                .iter()
                .map(|f| json!({ "w": f.w.to_string(), "u": f.u.to_string() }))
                .collect();
            checked(
                report.holds(),
                "note identity fails",
                json!({
                    "bound": bound.to_string(),
                    "checked": report.checked.to_string(),
                    "holds": report.holds(),
                    "failures": failures,
                }),
            )
        }
        Command::Selftest {
            level,
            inject_fault,
        } => {
            let report = run_selftest(level, inject_fault);
            let checks: Vec<Value> = report
                .checks
                .iter()
                .map(|c| json!({ "id": c.id, "name": c.name, "passed": c.passed, "detail": c.detail }))
                .collect();
            let failed: Vec<String> = report
                .checks
                .iter()
                .filter(|c| !c.passed)
                .map(|c| format!("{} {}", c.id, c.name))
                .collect();
            checked(
                report.passed(),
                &format!("failed checks: {}", failed.join(", ")),
                json!({ "level": level.as_str(), "passed": report.passed(), "checks": checks }),
            )
        }
    }
}

/// Runs one invocation; `argv[0]` is the program name.
pub fn run<I, T>(argv: I) -> CommandResult
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(err) => {
            use clap::error::ErrorKind;
            if matches!(
                err.kind(),
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion
            ) {
                return CommandResult {
                    status: Status::Ok,
                    payload: Value::Null,
                    rendered: err.to_string(),
                };
            }
            let message = err.render().to_string();
            let failure = Failure::new(Status::InvalidInput, "usage", message.trim_end());
            return finish(Format::Json, Err(failure));
        }
    };
    finish(cli.format, execute(cli.command))
}

fn finish(format: Format, outcome: Result<(Status, Value), Failure>) -> CommandResult {
    let (status, payload) = match outcome {
        Ok((status, result)) => (
            status,
            json!({ "status": status.as_str(), "result": result }),
        ),
        Err(failure) => {
            let mut error = json!({ "reason": failure.reason, "message": failure.message });
            if let Some(details) = failure.details {
                error["details"] = details;
            }
            (
                failure.status,
                json!({ "status": failure.status.as_str(), "error": error }),
            )
        }
    };
    let rendered = match format {
        Format::Json => {
            let mut text = serde_json::to_string_pretty(&payload).expect("JSON values serialize");
            text.push('\n');
            text
        }
        Format::Table => render_table(&payload),
    };
    CommandResult {
        status,
        payload,
        rendered,
    }
}

fn scalar(value: &Value) -> String {
    match value {
        Value::String(s) => s.clone(),
        Value::Array(items) => items.iter().map(scalar).collect::<Vec<_>>().join(" "),
        other => other.to_string(),
    }
}

fn flatten(prefix: &str, value: &Value, out: &mut BTreeMap<String, String>) {
    match value {
        Value::Object(map) => {
            for (key, inner) in map {
                let path = if prefix.is_empty() {
                    key.clone()
                } else {
                    format!("{prefix}.{key}")
                };
                flatten(&path, inner, out);
            }
        }
        Value::Array(items) if items.iter().any(Value::is_object) => {
            for (i, inner) in items.iter().enumerate() {
                flatten(&format!("{prefix}[{i}]"), inner, out);
            }
        }
        other => {
            out.insert(prefix.to_string(), scalar(other));
        }
    }
}

/// Aligned text rendering: key/value lines for objects, columns for a
/// top-level array of objects (the census).
fn render_table(payload: &Value) -> String {
    let mut text = String::new();
    if let Some(rows) = payload.get("result").and_then(Value::as_array) {
        let flat: Vec<BTreeMap<String, String>> = rows
            .iter()
            .map(|row| {
                let mut out = BTreeMap::new();
                flatten("", row, &mut out);
                out
            })
            .collect();
        let columns = [
            "canonical_link",
            "input.slope",
            "classification.kind",
            "classification.graph_manifold",
            "classification.family",
            "classification.witness.w",
            "classification.witness.v",
            "classification.witness.u",
            "classification.witness.mirrored",
        ];
        let headers = [
            "link", "slope", "kind", "graph", "family", "w", "v", "u", "mirrored",
        ];
        let cell = |row: &BTreeMap<String, String>, col: &str| {
            row.get(col).cloned().unwrap_or_else(|| "-".into())
        };
        let widths: Vec<usize> = columns
            .iter()
            .zip(headers)
            .map(|(col, head)| {
                flat.iter()
                    .map(|r| cell(r, col).len())
                    .max()
                    .unwrap_or(0)
                    .max(head.len())
            })
            .collect();
        let line = |cells: Vec<String>| {
            let padded: Vec<String> = cells
                .iter()
                .zip(&widths)
                .map(|(c, w)| format!("{c:<w$}"))
                .collect();
            padded.join("  ").trim_end().to_string() + "\n"
        };
        text.push_str(&line(headers.iter().map(|h| h.to_string()).collect()));
        for row in &flat {
            text.push_str(&line(columns.iter().map(|c| cell(row, c)).collect()));
        }
        return text;
    }
    let mut flat = BTreeMap::new();
    flatten("", payload, &mut flat);
    let width = flat.keys().map(String::len).max().unwrap_or(0);
    for (key, value) in flat {
        text.push_str(&format!("{key:<width$}  {value}\n"));
    }
    text
}

/// Checks a classification document against the published schema. Returns a
/// description of the first violation.
pub fn validate_classification_document(doc: &Value) -> Result<(), String> {
    let obj = doc.as_object().ok_or("document is not an object")?;
    let allowed = [
        "input",
        "canonical_link",
        "hyperbolic_link",
        "classification",
    ];
    if let Some(key) = obj.keys().find(|k| !allowed.contains(&k.as_str())) {
        return Err(format!("unexpected key {key:?}"));
    }
    let input = obj
        .get("input")
        .and_then(Value::as_object)
        .ok_or("missing input object")?;
    for key in ["link", "slope"] {
        input
            .get(key)
            .and_then(Value::as_str)
            .ok_or(format!("input.{key} must be a string"))?;
    }
    if input.len() != 2 {
        return Err("input has extra keys".into());
    }
    let link = obj
        .get("canonical_link")
        .and_then(Value::as_str)
        .ok_or("canonical_link must be a string")?;
    let is_fraction = link
        .split_once('/')
        .is_some_and(|(p, q)| p.parse::<i64>().is_ok() && q.parse::<i64>().is_ok());
    if !is_fraction {
        return Err(format!("canonical_link {link:?} is not p/q"));
    }
    obj.get("hyperbolic_link")
        .and_then(Value::as_bool)
        .ok_or("hyperbolic_link must be a boolean")?;
    let class = obj
        .get("classification")
        .and_then(Value::as_object)
        .ok_or("missing classification object")?;
    let kind = class
        .get("kind")
        .and_then(Value::as_str)
        .ok_or("classification.kind must be a string")?;
    let family = class
        .get("family")
        .map(|f| f.as_str().ok_or("family must be a string"))
        .transpose()?;
    let graph = class
        .get("graph_manifold")
        .map(|g| g.as_bool().ok_or("graph_manifold must be a boolean"))
        .transpose()?;
    let witness = class.get("witness");
    match kind {
        "hyperbolic" => {
            if family.is_some() || graph.is_some() || witness.is_some() {
                return Err("hyperbolic classification carries a witness".into());
            }
        }
        "toroidal" | "small_seifert" => {
            let family = family.ok_or("exceptional classification without family")?;
            let toroidal = matches!(family, "T2a" | "T2b" | "T2c");
            let seifert = matches!(family, "S3a" | "S3b" | "S3c" | "S3d");
            if (kind == "toroidal" && !toroidal) || (kind == "small_seifert" && !seifert) {
                return Err(format!("family {family} does not match kind {kind}"));
            }
            match (kind, graph) {
                ("toroidal", Some(g)) if g != matches!(family, "T2a" | "T2b") => {
                    return Err("graph_manifold disagrees with family".into())
                }
                ("toroidal", None) => {
                    return Err("toroidal classification without graph_manifold".into())
                }
                ("small_seifert", Some(_)) => {
                    return Err("graph_manifold on a small Seifert outcome".into())
                }
                _ => {}
            }
            let witness = witness
                .and_then(Value::as_object)
                .ok_or("missing witness object")?;
            witness
                .get("mirrored")
                .and_then(Value::as_bool)
                .ok_or("witness.mirrored must be a boolean")?;
            for (key, value) in witness {
                match key.as_str() {
                    "mirrored" => {}
                    "w" | "v" | "u" => {
                        let text = value
                            .as_str()
                            .ok_or(format!("witness.{key} must be a string"))?;
                        text.parse::<i64>()
                            .map_err(|_| format!("witness.{key} is not an integer"))?;
                    }
                    other => return Err(format!("unexpected witness key {other:?}")),
                }
            }
        }
        other => return Err(format!("unknown kind {other:?}")),
    }
    if class
        .keys()
        .any(|k| !["kind", "graph_manifold", "family", "witness"].contains(&k.as_str()))
    {
        return Err("classification has extra keys".into());
    }
    Ok(())
}
