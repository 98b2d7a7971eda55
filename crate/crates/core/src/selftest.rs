//! Built-in acceptance checks, driven by `twobridge selftest`.
//!
//! `quick` runs AC1 to AC4 at reduced bounds. `full` runs AC1 to AC8. A
//! hidden `--inject-fault` option corrupts one check's view of the results so
//! that the failure path can be exercised.

use clap::ValueEnum;

use crate::census::{
    audit_disjointness, brute_force_classify, enumerate_census, family_instances,
    note_identity_check,
};
use crate::classifier::{classify, family_instance, Family, Kind, SurgeryClass};
use crate::cli::{parse_link_text, run, validate_classification_document, Status};
use crate::diagram::{d_distance, lemma_family_check, lemma_family_link};
use crate::notation::{
    canonicalize_link, cf_to_slope, mirror_link, slope_to_cf, CanonicalLink, ContinuedFraction,
    Slope,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Level {
    Quick,
    Full,
}

impl Level {
    pub const fn as_str(self) -> &'static str {
        match self {
            Level::Quick => "quick",
            Level::Full => "full",
        }
    }
}

/// Deliberate corruptions used as negative controls.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Fault {
    /// Perturbs one continued fraction in AC1.
    BreakRoundTrip,
    /// Flips the graph-manifold flag seen by AC3.
    FlipGraphFlag,
    /// Adds a relabelled duplicate family instance in AC4.
    SeedCollision,
    /// Corrupts one oracle answer in AC6.
    OracleDisagreement,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckResult {
    pub id: &'static str,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SelfTestReport {
    pub level: Level,
    pub checks: Vec<CheckResult>,
}

impl SelfTestReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

type Outcome = Result<String, String>;

pub fn run_selftest(level: Level, fault: Option<Fault>) -> SelfTestReport {
    let full = level == Level::Full;
    let mut checks = Vec::new();
    let mut record = |id, name, outcome: Outcome| {
        let (passed, detail) = match outcome {
            Ok(d) => (true, d),
            Err(d) => (false, d),
        };
        checks.push(CheckResult {
            id,
            name,
            passed,
            detail,
        });
    };
    let faulty = |f| fault == Some(f);

    record(
        "AC1",
        "continued fraction round trip",
        ac1(if full { 200 } else { 60 }, faulty(Fault::BreakRoundTrip)),
    );
    record(
        "AC2",
        "convention validator",
        ac2(if full { 50 } else { 12 }),
    );
    record(
        "AC3",
        "golden classifications",
        ac3(faulty(Fault::FlipGraphFlag)),
    );
    record(
        "AC4",
        "family disjointness",
        ac4(if full { 10 } else { 6 }, faulty(Fault::SeedCollision)),
    );
    if full {
        record("AC5", "note identity", ac5(20));
        record(
            "AC6",
            "oracle equivalence",
            ac6(60, 30, faulty(Fault::OracleDisagreement)),
        );
        record("AC7", "symmetry suite", ac7(40));
        record("AC8", "cli contract", ac8());
    }
    SelfTestReport { level, checks }
}

pub fn ac1(max_q: i64, fault: bool) -> Outcome {
    let mut checked = 0;
    for q in 2..=max_q {
        for p in 1..q {
            if num_integer::gcd(p, q) != 1 {
                continue;
            }
            let s = Slope::new(p, q).map_err(|e| e.to_string())?;
            let mut cf = slope_to_cf(s).map_err(|e| format!("{s}: {e}"))?;
            if fault && checked == 0 {
                let mut entries = cf.entries().to_vec();
                *entries.last_mut().expect("nonempty") += 1;
                cf = ContinuedFraction::new(entries).map_err(|e| e.to_string())?;
            }
            let back = cf_to_slope(&cf).map_err(|e| format!("{cf}: {e}"))?;
            if back != s {
                return Err(format!("round trip broken: {s} -> {cf} -> {back}"));
            }
            checked += 1;
        }
    }
    Ok(format!("{checked} slopes with q <= {max_q}"))
}

pub fn ac2(n_bound: i64) -> Outcome {
    let infinity = Slope::INFINITY;
    for n in (2..=n_bound).flat_map(|n| [n, -n]) {
        let link =
            lemma_family_link(n).ok_or(format!("[2,{n},-2] is not an even-denominator link"))?;
        let distance =
            d_distance(infinity, link.slope(), link.denominator()).map_err(|e| e.to_string())?;
        if distance != Some(2) {
            return Err(format!(
                "[2,{n},-2] = {link} lies at D-distance {distance:?} from 1/0"
            ));
        }
    }
    let report = lemma_family_check(n_bound).map_err(|e| e.to_string())?;
    if !report.holds() {
        return Err(format!(
            "D-path endpoints differ from [2,n,-2]: only in paths {:?}, only in family {:?}",
            report
                .only_in_paths
                .iter()
                .map(ToString::to_string)
                .collect::<Vec<_>>(),
            report
                .only_in_family
                .iter()
                .map(ToString::to_string)
                .collect::<Vec<_>>(),
        ));
    }
    Ok(format!(
        "2 <= |n| <= {n_bound}, {} endpoints",
        report.path_endpoints.len()
    ))
}

/// (link, slope, kind, graph flag, family); `None` kind means not applicable.
type Golden = (
    &'static str,
    &'static str,
    Option<Kind>,
    Option<bool>,
    Option<Family>,
);

const GOLDEN: &[Golden] = &[
    (
        "[2,3,-2]",
        "0",
        Some(Kind::Toroidal),
        Some(true),
        Some(Family::T2a),
    ),
    (
        "[4,1,4]",
        "-4",
        Some(Kind::Toroidal),
        Some(true),
        Some(Family::T2b),
    ),
    (
        "[6,3,6]",
        "-6",
        Some(Kind::Toroidal),
        Some(false),
        Some(Family::T2c),
    ),
    (
        "[3,-3]",
        "-1",
        Some(Kind::SmallSeifert),
        None,
        Some(Family::S3c),
    ),
    (
        "[3,5]",
        "2",
        Some(Kind::SmallSeifert),
        None,
        Some(Family::S3a),
    ),
    (
        "[5,3]",
        "-3",
        Some(Kind::SmallSeifert),
        None,
        Some(Family::S3b),
    ),
    (
        "[5,7]",
        "1",
        Some(Kind::SmallSeifert),
        None,
        Some(Family::S3d),
    ),
    (
        "5/24",
        "-5",
        Some(Kind::SmallSeifert),
        None,
        Some(Family::S3d),
    ),
    ("[2,3,-2]", "7", Some(Kind::Hyperbolic), None, None),
    ("[2,3,-2]", "1/2", Some(Kind::Hyperbolic), None, None),
    ("[6,3,6]", "-13/2", Some(Kind::Hyperbolic), None, None),
    ("1/2", "3", None, None, None),
];

pub fn ac3(fault: bool) -> Outcome {
    for &(link_text, slope_text, kind, graph, family) in GOLDEN {
        let case = format!("({link_text}, {slope_text})");
        let parsed = parse_link_text(link_text).map_err(|e| format!("{case}: {e}"))?;
        let r = crate::notation::parse_slope(slope_text).map_err(|e| format!("{case}: {e}"))?;
        let result = canonicalize_link(parsed)
            .map_err(Into::into)
            .and_then(|l| classify(l, r));
        let Some(kind) = kind else {
            if result.is_ok() {
                return Err(format!("{case}: expected not_applicable, got {result:?}"));
            }
            continue;
        };
        let class = result.map_err(|e| format!("{case}: {e}"))?;
        let mut seen_graph = class.graph_manifold();
        if fault && seen_graph.is_some() {
            seen_graph = seen_graph.map(|g| !g);
        }
        if class.kind() != kind
            || seen_graph != graph
            || class.witness().map(|w| w.family) != family
        {
            return Err(format!(
                "{case}: expected {} graph={graph:?} family={family:?}, got {} graph={seen_graph:?} family={:?}",
                kind.as_str(),
                class.kind().as_str(),
                class.witness().map(|w| w.family)
            ));
        }
    }
    Ok(format!("{} cases", GOLDEN.len()))
}

pub fn ac4(param_bound: i64, fault: bool) -> Outcome {
    let mut instances =
        family_instances(param_bound).map_err(|e| format!("constraint filter fired: {e}"))?;
    for instance in &instances {
        let (link, _) = family_instance(&instance.witness).map_err(|e| e.to_string())?;
        if !link.is_hyperbolic() || link.denominator() % 2 != 0 {
            return Err(format!("{} reconstructs to {link}", instance.witness));
        }
    }
    if fault {
        let mut twin = instances[0];
        twin.witness.family = if twin.witness.family == Family::S3d {
            Family::S3a
        } else {
            Family::S3d
        };
        instances.push(twin);
    }
    let report = audit_disjointness(&instances);
    if let Some(c) = report.collisions.first() {
        return Err(format!(
            "({}, {}) lies in families {:?}",
            c.link,
            c.slope,
            c.families.iter().map(|f| f.as_str()).collect::<Vec<_>>()
        ));
    }
    Ok(format!(
        "{} instances with parameters <= {param_bound}",
        report.instances
    ))
}

pub fn ac5(bound: i64) -> Outcome {
    let report = note_identity_check(bound);
    match report.failures.first() {
        None => Ok(format!("{} parameter pairs", report.checked)),
        Some(f) => Err(format!("identity fails at w={}, u={}", f.w, f.u)),
    }
}

pub fn ac6(max_q: i64, max_r: i64, fault: bool) -> Outcome {
    let mut checked = 0usize;
    for q in (2..=max_q).step_by(2) {
        for p in 1..q {
            if num_integer::gcd(p, q) != 1 {
                continue;
            }
            let link = canonicalize_link(Slope::new(p, q).map_err(|e| e.to_string())?)
                .map_err(|e| e.to_string())?;
            if !link.is_hyperbolic() {
                continue;
            }
            for r in -max_r..=max_r {
                let r = Slope::integer(r);
                let fast = classify(link, r).map_err(|e| format!("classify({link}, {r}): {e}"))?;
                let mut slow = brute_force_classify(link, r, 2)
                    .map_err(|e| format!("oracle({link}, {r}): {e}"))?;
                if fault && checked == 0 {
                    slow = SurgeryClass::Hyperbolic;
                    if fast == slow {
                        slow = SurgeryClass::SmallSeifert {
                            witness: crate::classifier::FamilyWitness::s3c(),
                        };
                    }
                }
                if fast.outcome() != slow.outcome() {
                    return Err(format!(
                        "classify and oracle disagree at ({link}, {r}): {:?} vs {:?}",
                        fast.outcome(),
                        slow.outcome()
                    ));
                }
                checked += 1;
            }
        }
    }
    Ok(format!("{checked} pairs with q <= {max_q}, |r| <= {max_r}"))
}

fn describe(class: &SurgeryClass) -> (Kind, Option<bool>, Option<Family>) {
    let (kind, graph) = class.outcome();
    (kind, graph, class.witness().map(|w| w.family))
}

pub fn ac7(max_q: i64) -> Outcome {
    let entries = enumerate_census(max_q).map_err(|e| e.to_string())?;
    let mut checked = 0;
    let check = |link: CanonicalLink, r: Slope| -> Result<(), String> {
        let base = classify(link, r).map_err(|e| e.to_string())?;
        let inverse = classify(link.inverse(), r).map_err(|e| e.to_string())?;
        let mirrored = classify(mirror_link(link), -r).map_err(|e| e.to_string())?;
        if describe(&base) != describe(&inverse) {
            return Err(format!("({link}, {r}) changes under p -> p^-1"));
        }
        if describe(&base) != describe(&mirrored) {
            return Err(format!("({link}, {r}) is not mirror covariant"));
        }
        Ok(())
    };
    for entry in &entries {
        check(entry.link, entry.slope)?;
        checked += 1;
    }
    Ok(format!("{checked} census entries with q <= {max_q}"))
}

const CLI_EXAMPLES: &[(&[&str], Status)] = &[
    (
        &[
            "classify", "--link", "[2,3,-2]", "--slope", "0", "--format", "json",
        ],
        Status::Ok,
    ),
    (&["convert", "--cf", "[6,3,6]"], Status::Ok),
    (
        &["classify", "--link", "1/2", "--slope", "3"],
        Status::NotApplicable,
    ),
];

pub fn ac8() -> Outcome {
    for &(args, expected) in CLI_EXAMPLES {
        let argv = || std::iter::once("twobridge").chain(args.iter().copied());
        let first = run(argv());
        let second = run(argv());
        let line = args.join(" ");
        if first.rendered != second.rendered {
            return Err(format!("`{line}` output is not deterministic"));
        }
        if first.status != expected {
            return Err(format!(
                "`{line}` returned {} (exit {})",
                first.status.as_str(),
                first.exit_code()
            ));
        }
        serde_json::from_str::<serde_json::Value>(&first.rendered)
            .map_err(|e| format!("`{line}`: {e}"))?;
        if first.payload["status"] != first.status.as_str() {
            return Err(format!("`{line}` status field disagrees with exit code"));
        }
    }
    let classify_doc = &run(std::iter::once("twobridge").chain(CLI_EXAMPLES[0].0.iter().copied()))
        .payload["result"];
    validate_classification_document(classify_doc).map_err(|e| format!("schema: {e}"))?;
    let c = &classify_doc["classification"];
    if c["kind"] != "toroidal" || c["graph_manifold"] != true || c["family"] != "T2a" {
        return Err(format!("unexpected classification {c}"));
    }
    let convert = run(std::iter::once("twobridge").chain(CLI_EXAMPLES[1].0.iter().copied()));
    if convert.payload["result"]["slope"] != "19/120" {
        return Err("convert --cf [6,3,6] is not 19/120".into());
    }
    let failure = run(std::iter::once("twobridge").chain(CLI_EXAMPLES[2].0.iter().copied()));
    if failure.payload["error"]["reason"] != "not_hyperbolic" || failure.exit_code() != 3 {
        return Err("classify --link 1/2 did not report not_hyperbolic with exit 3".into());
    }
    Ok(format!("{} examples", CLI_EXAMPLES.len()))
}
