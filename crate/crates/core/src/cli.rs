//! The `ptheory` command line.
//!
//! Exit codes: 0 success, 1 I/O or fitting failure, 2 malformed theory,
//! joint table or arguments, 3 theory not uniquely predictive, 4 malformed
//! situation or a conditioning event of probability zero.

use std::collections::BTreeSet;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use num_rational::BigRational;
use serde_json::{json, Map, Value as Json};

use crate::arith::{Probability, Scalar};
use crate::dsl::{self, parse_situation, render_situation};
use crate::oracle::{self, Conditioning, ConstraintSet, FitOptions, JointTable, OracleError};
use crate::pci::{self, Prediction, TraceNode};
use crate::schema::{Domain, FeatureDef, FeatureKind, FeatureSet, Schema, Value, ValueHierarchy};
use crate::theory::{PredictiveTheory, Rule, ValidationReport, ValidationStatus, DEFAULT_ENUMERATION_CAP};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_INVALID: i32 = 3;
pub const EXIT_SITUATION: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "ptheory", version, about = "Query, validate and check uniquely predictive theories")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Predict the target distribution for a situation.
    Query(QueryArgs),
    /// Check that every reachable MSR set is separable.
    Validate(ValidateArgs),
    /// Compare PCI with the exact conditional of a joint table.
    Oracle(OracleArgs),
    /// Fit the maximum-entropy joint consistent with a theory's rules.
    Fit(FitArgs),
    /// Reprint a theory file in canonical layout.
    Fmt(FmtArgs),
}

#[derive(Debug, Args)]
pub struct QueryArgs {
    pub theory: PathBuf,
    /// Comma-separated `feature=value` pairs.
    pub situation: String,
    /// Print the derivation tree.
    #[arg(long)]
    pub trace: bool,
    #[arg(long)]
    pub json: bool,
    /// Skip the uniquely-predictive check.
    #[arg(long)]
    pub skip_validate: bool,
    /// Use floating point instead of exact rationals.
    #[arg(long)]
    pub float: bool,
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    pub theory: PathBuf,
    #[arg(long)]
    pub json: bool,
    /// Maximum number of representative situations to enumerate.
    #[arg(long, default_value_t = DEFAULT_ENUMERATION_CAP)]
    pub cap: u64,
}

#[derive(Debug, Args)]
pub struct OracleArgs {
    /// Joint distribution as CSV; the last value column is the target.
    #[arg(long)]
    pub joint: PathBuf,
    /// Theory whose rule contexts are used.
    #[arg(long, conflicts_with = "contexts", required_unless_present = "contexts")]
    pub theory: Option<PathBuf>,
    /// Rule contexts as `;`-separated situations; a default rule is added.
    #[arg(long)]
    pub contexts: Option<String>,
    /// Use the theory's own probabilities instead of reading them off the joint.
    #[arg(long, requires = "theory")]
    pub keep_probabilities: bool,
    /// Situation to predict, written as for `query`.
    #[arg(long)]
    pub situation: String,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct FitArgs {
    pub theory: PathBuf,
    /// Write the table here instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Largest tolerated constraint violation.
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    #[arg(long, default_value_t = 100_000)]
    pub max_sweeps: usize,
}

#[derive(Debug, Args)]
pub struct FmtArgs {
    pub theory: PathBuf,
}

/// A failure with its exit code and message.
struct Exit(i32, String);

type Outcome = Result<(), Exit>;

/// Runs the command line with explicit arguments and streams, returning the
/// exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_PARSE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { err.write_all(text.as_bytes()) } else { out.write_all(text.as_bytes()) };
            return code;
        }
    };
    let result = match &cli.command {
        Command::Query(a) => query(a, out, err),
        Command::Validate(a) => validate(a, out),
        Command::Oracle(a) => run_oracle(a, out),
        Command::Fit(a) => fit(a, out),
        Command::Fmt(a) => format(a, out),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(Exit(code, message)) => {
            let _ = writeln!(err, "error: {message}");
            code
        }
    }
}

fn read(path: &Path) -> Result<String, Exit> {
    fs::read_to_string(path).map_err(|e| Exit(EXIT_FAILURE, format!("{}: {e}", path.display())))
}

fn load(path: &Path) -> Result<PredictiveTheory, Exit> {
    dsl::load_theory(&read(path)?).map_err(|e| Exit(EXIT_PARSE, format!("{}:{e}", path.display())))
}

fn io(e: std::io::Error) -> Exit {
    Exit(EXIT_FAILURE, e.to_string())
}

fn scalar_json<S: Scalar>(s: &S) -> Json {
    if S::EXACT {
        Json::String(s.render())
    } else {
        json!(s.to_f64())
    }
}

fn dist_json<S: Scalar>(d: &[(Value, S)]) -> Json {
    Json::Object(d.iter().map(|(v, p)| (v.to_string(), scalar_json(p))).collect::<Map<_, _>>())
}

/// Descending probability, ties in value order.
fn sorted<S: Scalar>(theory: &PredictiveTheory, d: &[(Value, S)]) -> Vec<(Value, S)> {
    let mut d = d.to_vec();
    let domain = theory.target_domain();
    d.sort_by(|(va, pa), (vb, pb)| {
        pb.partial_cmp(pa).unwrap_or(std::cmp::Ordering::Equal).then_with(|| domain.rank(va).cmp(&domain.rank(vb)))
    });
    d
}

fn schema_text(s: &Schema) -> String {
    if s.is_empty() {
        "(empty)".into()
    } else {
        render_situation(s)
    }
}

/// JSON form of one trace node.
pub fn trace_json<S: Scalar>(theory: &PredictiveTheory, node: &TraceNode<S>) -> Json {
    let (ordering, shared, unique) = match &node.ordering {
        Some(o) => (
            json!(theory.names(&o.rules)),
            json!(o.splits.iter().map(|s| schema_text(&s.shared)).collect::<Vec<_>>()),
            json!(o.splits.iter().map(|s| s.unique.clone()).collect::<Vec<_>>()),
        ),
        None => (Json::Null, json!([]), json!([])),
    };
    let raw = node
        .terms
        .iter()
        .map(|t| {
            json!({
                "value": t.value.to_string(),
                "numerator": scalar_json(&t.numerator),
                "denominator": scalar_json(&t.denominator),
                "raw": scalar_json(&t.raw),
                "common": t.common,
            })
        })
        .collect::<Vec<_>>();
    let denominators = node
        .denominators
        .iter()
        .map(|d| {
            json!({
                "schema": schema_text(&d.schema),
                "distribution": dist_json(&d.distribution),
                "trace": d.trace.as_ref().map(|t| trace_json(theory, t)),
            })
        })
        .collect::<Vec<_>>();
    let fallback = node.fallback.as_ref().map(|fb| {
        json!({
            "kind": fb.kind.as_str(),
            "schema": schema_text(&fb.schema),
            "trace": fb.sub.as_ref().map(|t| trace_json(theory, t)),
        })
    });
    json!({
        "situation": schema_text(&node.situation),
        "msr_ids": node.msr_ids,
        "ordering": ordering,
        "shared": shared,
        "unique": unique,
        "raw": raw,
        "normalization": scalar_json(&node.normalization),
        "fallback": fallback,
        "denominators": denominators,
        "flags": node.flags.iter().map(|f| f.as_str()).collect::<Vec<_>>(),
        "result": dist_json(&node.result),
    })
}

fn render_trace<S: Scalar>(theory: &PredictiveTheory, node: &TraceNode<S>, indent: usize, out: &mut String) {
    let pad = "  ".repeat(indent);
    let line = |out: &mut String, s: String| {
        out.push_str(&pad);
        out.push_str(&s);
        out.push('\n');
    };
    line(out, format!("situation: {}", schema_text(&node.situation)));
    line(out, format!("  msrs: {}", node.msr_ids.join(", ")));
    if let Some(o) = &node.ordering {
        line(out, format!("  ordering: {}", theory.names(&o.rules).join(", ")));
        for (k, s) in o.splits.iter().enumerate() {
            line(
                out,
                format!(
                    "    {}: shared {{{}}} unique [{}]",
                    theory.rule(o.rules[k]).name,
                    schema_text(&s.shared),
                    s.unique.join(", ")
                ),
            );
        }
    }
    for d in &node.denominators {
        let dist = d.distribution.iter().map(|(v, p)| format!("{v} {}", p.render())).collect::<Vec<_>>().join(", ");
        line(out, format!("  denominator {{{}}}: {dist}", schema_text(&d.schema)));
        match &d.trace {
            Some(t) => render_trace(theory, t, indent + 2, out),
            None => line(out, "    (default rule)".into()),
        }
    }
    if node.ordering.is_some() {
        for t in &node.terms {
            line(
                out,
                format!(
                    "  raw {}: {} / {} = {}{}",
                    t.value,
                    t.numerator.render(),
                    t.denominator.render(),
                    t.raw.render(),
                    if t.common { "" } else { " (not common)" }
                ),
            );
        }
        if node.fallback.is_none() {
            line(out, format!("  normalization: {}", node.normalization.render()));
        }
    }
    if let Some(fb) = &node.fallback {
        line(out, format!("  fallback ({}) to {{{}}}", fb.kind.as_str(), schema_text(&fb.schema)));
        match &fb.sub {
            Some(t) => render_trace(theory, t, indent + 2, out),
            None => line(out, "    (default rule)".into()),
        }
    }
    if !node.flags.is_empty() {
        line(out, format!("  flags: {}", node.flags.iter().map(|f| f.as_str()).collect::<Vec<_>>().join(", ")));
    }
    let result = node.result.iter().map(|(v, p)| format!("{v} {}", p.render())).collect::<Vec<_>>().join(", ");
    line(out, format!("  result: {result}"));
}

/// Plain-text derivation tree.
pub fn trace_text<S: Scalar>(theory: &PredictiveTheory, node: &TraceNode<S>) -> String {
    let mut s = String::new();
    render_trace(theory, node, 0, &mut s);
    s
}

fn query(a: &QueryArgs, out: &mut dyn Write, err: &mut dyn Write) -> Outcome {
    let theory = load(&a.theory)?;
    if !a.skip_validate {
        let report = theory.check_uniquely_predictive(DEFAULT_ENUMERATION_CAP);
        match report.status {
            ValidationStatus::Valid => {}
            ValidationStatus::Invalid => {
                let v = &report.violations[0];
                return Err(Exit(
                    EXIT_INVALID,
                    format!(
                        "theory is not uniquely predictive: MSR set {{{}}} at {}",
                        theory.names(&v.msrs).join(", "),
                        schema_text(&v.witness)
                    ),
                ));
            }
            ValidationStatus::Incomplete => {
                writeln!(err, "warning: validation stopped at the enumeration cap").map_err(io)?;
            }
        }
    }
    let situation = parse_situation(&theory, &a.situation).map_err(|e| Exit(EXIT_SITUATION, e.to_string()))?;
    if a.float {
        emit_query(&theory, &pci::predict::<f64>(&theory, &situation), a, out)
    } else {
        emit_query(&theory, &pci::predict::<BigRational>(&theory, &situation), a, out)
    }
}

fn emit_query<S: Scalar>(theory: &PredictiveTheory, p: &Prediction<S>, a: &QueryArgs, out: &mut dyn Write) -> Outcome {
    let dist = sorted(theory, &p.distribution);
    let flags: Vec<&str> = p.flags().iter().map(|f| f.as_str()).collect();
    if a.json {
        let mut doc = json!({
            "situation": schema_text(&p.trace.situation),
            "target": theory.target(),
            "mode": if S::EXACT { "exact" } else { "float" },
            "distribution": dist.iter().map(|(v, q)| json!({"value": v.to_string(), "probability": scalar_json(q)})).collect::<Vec<_>>(),
            "flags": flags,
        });
        if a.trace {
            doc["trace"] = trace_json(theory, &p.trace);
        }
        writeln!(out, "{}", serde_json::to_string_pretty(&doc).expect("json")).map_err(io)?;
        return Ok(());
    }
    for (v, q) in &dist {
        if S::EXACT {
            writeln!(out, "{}={v}: {} ({:.6})", theory.target(), q.render(), q.to_f64()).map_err(io)?;
        } else {
            writeln!(out, "{}={v}: {}", theory.target(), q.render()).map_err(io)?;
        }
    }
    if !flags.is_empty() {
        writeln!(out, "flags: {}", flags.join(", ")).map_err(io)?;
    }
    if a.trace {
        write!(out, "\n{}", trace_text(theory, &p.trace)).map_err(io)?;
    }
    Ok(())
}

/// JSON form of a validation report.
pub fn report_json(theory: &PredictiveTheory, r: &ValidationReport) -> Json {
    json!({
        "status": r.status.to_string(),
        "violations": r.violations.iter().map(|v| json!({
            "msrs": theory.names(&v.msrs),
            "witness": schema_text(&v.witness),
        })).collect::<Vec<_>>(),
        "stats": {
            "rules": r.stats.rule_count,
            "dag_depth": r.stats.dag_depth,
            "situations_enumerated": r.stats.situations_enumerated,
            "distinct_msr_sets": r.stats.distinct_msr_sets,
            "complete": r.stats.complete,
        },
    })
}

fn validate(a: &ValidateArgs, out: &mut dyn Write) -> Outcome {
    let theory = load(&a.theory)?;
    let r = theory.check_uniquely_predictive(a.cap);
    if a.json {
        writeln!(out, "{}", serde_json::to_string_pretty(&report_json(&theory, &r)).expect("json")).map_err(io)?;
    } else {
        writeln!(out, "status: {}", r.status).map_err(io)?;
        for v in &r.violations {
            writeln!(
                out,
                "violation: MSR set {{{}}} is not separable; witness {}",
                theory.names(&v.msrs).join(", "),
                schema_text(&v.witness)
            )
            .map_err(io)?;
        }
        let s = &r.stats;
        writeln!(
            out,
            "rules: {}, dag depth: {}, situations enumerated: {}, distinct MSR sets: {}, complete: {}",
            s.rule_count, s.dag_depth, s.situations_enumerated, s.distinct_msr_sets, s.complete
        )
        .map_err(io)?;
    }
    match r.status {
        ValidationStatus::Valid => Ok(()),
        ValidationStatus::Invalid => Err(Exit(EXIT_INVALID, "theory is not uniquely predictive".into())),
        ValidationStatus::Incomplete => Err(Exit(EXIT_INVALID, "enumeration cap reached before completion".into())),
    }
}

fn oracle_exit(e: OracleError) -> Exit {
    match e {
        OracleError::ZeroProbability(_) => Exit(EXIT_SITUATION, e.to_string()),
        OracleError::NonConvergence { .. } | OracleError::Inconsistent { .. } => Exit(EXIT_FAILURE, e.to_string()),
        _ => Exit(EXIT_PARSE, e.to_string()),
    }
}

/// Rules with the given contexts whose distributions are the joint's exact
/// conditionals.
fn rules_from_table(joint: &JointTable<BigRational>, contexts: &[(String, Schema)]) -> Result<Vec<Rule>, Exit> {
    contexts
        .iter()
        .map(|(name, ctx)| {
            let dist = joint.exact_conditional(ctx).map_err(oracle_exit)?;
            Ok(Rule::new(name.clone(), ctx.clone(), dist.into_iter().map(|(v, p)| (v, Probability::Exact(p))).collect()))
        })
        .collect()
}

fn features_of_table(joint: &JointTable<BigRational>) -> Result<FeatureSet, Exit> {
    let defs = joint
        .features()
        .iter()
        .map(|f| {
            let values = f.values.iter().map(Value::to_string).collect();
            FeatureDef::new(f.name.clone(), Domain::Enum(values), FeatureKind::World)
        })
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| Exit(EXIT_PARSE, e.to_string()))?;
    FeatureSet::new(defs, ValueHierarchy::new()).map_err(|e| Exit(EXIT_PARSE, e.to_string()))
}

fn oracle_theory(a: &OracleArgs, joint: &JointTable<BigRational>) -> Result<PredictiveTheory, Exit> {
    let target = joint.target().name.clone();
    let build = |features: FeatureSet, rules: Vec<Rule>| {
        PredictiveTheory::build(features, &target, rules).map_err(|e| Exit(EXIT_PARSE, e.to_string()))
    };
    if let Some(path) = &a.theory {
        let theory = load(path)?;
        if theory.target() != target {
            return Err(Exit(
                EXIT_PARSE,
                format!("theory target `{}` differs from the joint's target column `{target}`", theory.target()),
            ));
        }
        if a.keep_probabilities {
            return Ok(theory);
        }
        let contexts: Vec<(String, Schema)> = theory.rules().iter().map(|r| (r.name.clone(), r.context.clone())).collect();
        return build(theory.features().clone(), rules_from_table(joint, &contexts)?);
    }
    let features = features_of_table(joint)?;
    let mut contexts = vec![("prior".to_string(), Schema::new())];
    let scaffold = build(features.clone(), rules_from_table(joint, &contexts)?)?;
    for (i, text) in a.contexts.as_deref().unwrap_or("").split(';').enumerate() {
        let ctx = parse_situation(&scaffold, text.trim()).map_err(|e| Exit(EXIT_PARSE, format!("context {}: {e}", i + 1)))?;
        if !contexts.iter().any(|(_, c)| *c == ctx) {
            contexts.push((format!("c{}", i + 1), ctx));
        }
    }
    build(features, rules_from_table(joint, &contexts)?)
}

struct AssumptionCheck {
    rule: String,
    unique: Vec<String>,
    rest: Vec<String>,
    shared: Schema,
    with_target: bool,
    report: Option<oracle::IndependenceReport>,
}

/// The independence assumptions behind each split of the top-level ordering:
/// the rule's unique features are independent of the features only later
/// rules mention, given the shared features, and again given the target too.
fn assumption_checks(
    theory: &PredictiveTheory,
    node: &TraceNode<BigRational>,
    joint: &JointTable<BigRational>,
    tol: f64,
) -> Result<Vec<AssumptionCheck>, Exit> {
    let Some(ordering) = &node.ordering else { return Ok(Vec::new()) };
    let mut out = Vec::new();
    for (k, split) in ordering.splits.iter().enumerate() {
        let shared: BTreeSet<&str> = split.shared.features().collect();
        let unique: BTreeSet<&str> = split.unique.iter().map(String::as_str).collect();
        let rest: BTreeSet<&str> = ordering.rules[k + 1..]
            .iter()
            .flat_map(|&r| theory.rule(r).context.features())
            .filter(|f| !shared.contains(f) && !unique.contains(f))
            .collect();
        for with_target in [false, true] {
            let given = Conditioning {
                features: if with_target { vec![theory.target().to_string()] } else { Vec::new() },
                event: split.shared.clone(),
            };
            let u: Vec<&str> = unique.iter().copied().collect();
            let r: Vec<&str> = rest.iter().copied().collect();
            let report = if u.is_empty() || r.is_empty() {
                None
            } else {
                Some(oracle::independence_holds(joint, &u, &r, &given, tol).map_err(oracle_exit)?)
            };
            out.push(AssumptionCheck {
                rule: theory.rule(ordering.rules[k]).name.clone(),
                unique: u.iter().map(|s| s.to_string()).collect(),
                rest: r.iter().map(|s| s.to_string()).collect(),
                shared: split.shared.clone(),
                with_target,
                report,
            });
        }
    }
    Ok(out)
}

fn run_oracle(a: &OracleArgs, out: &mut dyn Write) -> Outcome {
    let file = fs::File::open(&a.joint).map_err(|e| Exit(EXIT_FAILURE, format!("{}: {e}", a.joint.display())))?;
    let joint = oracle::read_csv(file).map_err(|e| Exit(EXIT_PARSE, format!("{}: {e}", a.joint.display())))?;
    let theory = oracle_theory(a, &joint)?;
    let situation = parse_situation(&theory, &a.situation).map_err(|e| Exit(EXIT_SITUATION, e.to_string()))?;
    let exact = joint.exact_conditional(&situation).map_err(oracle_exit)?;
    let prediction = pci::predict::<BigRational>(&theory, &situation);
    let tol = 1e-12;
    let checks = assumption_checks(&theory, &prediction.trace, &joint, tol)?;

    let rows: Vec<(Value, BigRational, BigRational, f64)> = exact
        .iter()
        .map(|(v, p)| {
            let q = prediction.probability(v);
            let diff = (p.to_f64() - q.to_f64()).abs();
            (v.clone(), p.clone(), q, diff)
        })
        .collect();
    let max_diff = rows.iter().map(|r| r.3).fold(0.0, f64::max);
    let flags: Vec<&str> = prediction.flags().iter().map(|f| f.as_str()).collect();

    if a.json {
        let doc = json!({
            "situation": schema_text(&situation),
            "target": theory.target(),
            "rules": theory.rules().iter().map(|r| json!({"id": r.name, "context": schema_text(&r.context)})).collect::<Vec<_>>(),
            "values": rows.iter().map(|(v, p, q, d)| json!({
                "value": v.to_string(),
                "exact": scalar_json(p),
                "pci": scalar_json(q),
                "abs_difference": d,
            })).collect::<Vec<_>>(),
            "max_abs_difference": max_diff,
            "flags": flags,
            "independence": checks.iter().map(|c| json!({
                "rule": c.rule,
                "unique": c.unique,
                "rest": c.rest,
                "shared": schema_text(&c.shared),
                "given_target": c.with_target,
                "holds": c.report.as_ref().is_none_or(|r| r.holds),
                "max_deviation": c.report.as_ref().map_or(0.0, |r| r.max_deviation),
                "slices_skipped": c.report.as_ref().map_or(0, |r| r.slices_skipped),
            })).collect::<Vec<_>>(),
        });
        writeln!(out, "{}", serde_json::to_string_pretty(&doc).expect("json")).map_err(io)?;
        return Ok(());
    }

    writeln!(out, "situation: {}", schema_text(&situation)).map_err(io)?;
    writeln!(out, "msrs: {}", prediction.trace.msr_ids.join(", ")).map_err(io)?;
    writeln!(out, "{:<12} {:>24} {:>24} {:>12}", "value", "exact", "pci", "|diff|").map_err(io)?;
    for (v, p, q, d) in &rows {
        writeln!(out, "{:<12} {:>24.15} {:>24.15} {:>12.3e}", v.to_string(), p.to_f64(), q.to_f64(), d).map_err(io)?;
    }
    writeln!(out, "max |diff|: {max_diff:.3e}").map_err(io)?;
    if !flags.is_empty() {
        writeln!(out, "flags: {}", flags.join(", ")).map_err(io)?;
    }
    for c in &checks {
        let given = if c.with_target {
            format!("{}, {}", theory.target(), schema_text(&c.shared))
        } else {
            schema_text(&c.shared)
        };
        let verdict = match &c.report {
            None => "holds (nothing to separate)".to_string(),
            Some(r) => format!(
                "{} (max deviation {:.3e}, {} zero slices skipped)",
                if r.holds { "holds" } else { "FAILS" },
                r.max_deviation,
                r.slices_skipped
            ),
        };
        writeln!(
            out,
            "independence for {}: [{}] vs [{}] given {}: {verdict}",
            c.rule,
            c.unique.join(", "),
            c.rest.join(", "),
            given
        )
        .map_err(io)?;
    }
    Ok(())
}

fn fit(a: &FitArgs, out: &mut dyn Write) -> Outcome {
    let theory = load(&a.theory)?;
    let space = oracle::space_from_theory(&theory).map_err(oracle_exit)?;
    let constraints = ConstraintSet::from_theory(&theory);
    let options = FitOptions { tolerance: a.tol, max_sweeps: a.max_sweeps };
    let (table, _) = oracle::me_fit(space, &constraints, options).map_err(oracle_exit)?;
    match &a.out {
        Some(path) => {
            let file = fs::File::create(path).map_err(io)?;
            table.write_csv(file).map_err(oracle_exit)
        }
        None => table.write_csv(out).map_err(oracle_exit),
    }
}

fn format(a: &FmtArgs, out: &mut dyn Write) -> Outcome {
    let text = read(&a.theory)?;
    let doc = dsl::parse_theory(&text).map_err(|e| Exit(EXIT_PARSE, format!("{}:{e}", a.theory.display())))?;
    out.write_all(dsl::print_theory(&doc).as_bytes()).map_err(io)
}
