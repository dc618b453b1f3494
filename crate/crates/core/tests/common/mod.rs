#![allow(dead_code)]

use std::path::PathBuf;

use num_rational::BigRational;
use predictive_theory::arith::Probability;
use predictive_theory::schema::{Domain, FeatureDef, FeatureKind, FeatureSet, ValueHierarchy};
use predictive_theory::{PredictiveTheory, Rule, Schema, Value};
use rand::seq::SliceRandom;
use rand::Rng;

pub fn corpus_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("corpus")
}

pub fn corpus(name: &str) -> String {
    std::fs::read_to_string(corpus_dir().join(name)).unwrap()
}

pub fn corpus_theory(name: &str) -> PredictiveTheory {
    predictive_theory::load_theory(&corpus(name)).unwrap()
}

pub fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

pub fn t() -> Value {
    Value::atom("true")
}

pub fn f() -> Value {
    Value::atom("false")
}

pub fn bool_value(b: bool) -> Value {
    if b {
        t()
    } else {
        f()
    }
}

pub fn feature_names(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("x{i}")).collect()
}

pub fn boolean_features(names: &[String], target_values: &[&str]) -> FeatureSet {
    let mut defs: Vec<FeatureDef> = names.iter().map(|n| FeatureDef::boolean(n.as_str())).collect();
    defs.push(
        FeatureDef::new("G", Domain::Enum(target_values.iter().map(|s| s.to_string()).collect()), FeatureKind::World)
            .unwrap(),
    );
    FeatureSet::new(defs, ValueHierarchy::new()).unwrap()
}

/// A random distribution over `values` in multiples of 1/`grain`, zeros
/// allowed.
pub fn random_distribution(rng: &mut impl Rng, values: &[&str], grain: i64) -> Vec<(Value, Probability)> {
    let mut cuts: Vec<i64> = (0..values.len() - 1).map(|_| rng.gen_range(0..=grain)).collect();
    cuts.push(0);
    cuts.push(grain);
    cuts.sort_unstable();
    values
        .iter()
        .zip(cuts.windows(2))
        .map(|(v, w)| (Value::atom(*v), Probability::exact(w[1] - w[0], grain)))
        .collect()
}

/// A random strictly positive distribution.
pub fn positive_distribution(rng: &mut impl Rng, values: &[&str]) -> Vec<(Value, Probability)> {
    let weights: Vec<i64> = values.iter().map(|_| rng.gen_range(1..=20)).collect();
    let total: i64 = weights.iter().sum();
    values.iter().zip(weights).map(|(v, w)| (Value::atom(*v), Probability::exact(w, total))).collect()
}

/// A random theory over Boolean features: a default rule plus up to
/// `max_rules - 1` distinct contexts, each binding a random subset of the
/// features to random values.
pub fn random_theory(rng: &mut impl Rng, n_features: usize, max_rules: usize, target_values: &[&str]) -> PredictiveTheory {
    let names = feature_names(n_features);
    let features = boolean_features(&names, target_values);
    let mut contexts = vec![Schema::new()];
    let wanted = rng.gen_range(1..=max_rules);
    let mut attempts = 0;
    while contexts.len() < wanted && attempts < 100 {
        attempts += 1;
        let size = rng.gen_range(1..=n_features.min(3));
        let mut chosen = names.clone();
        chosen.shuffle(rng);
        let ctx = chosen[..size].iter().fold(Schema::new(), |s, n| s.with_value(n.as_str(), bool_value(rng.gen_bool(0.7))));
        if !contexts.contains(&ctx) {
            contexts.push(ctx);
        }
    }
    let rules = contexts
        .into_iter()
        .enumerate()
        .map(|(i, c)| Rule::new(format!("r{i}"), c, random_distribution(rng, target_values, 10)))
        .collect();
    PredictiveTheory::build(features, "G", rules).unwrap()
}

/// Every situation over Boolean features: each feature true, false or
/// unknown.
pub fn all_situations(names: &[String]) -> Vec<Schema> {
    let mut out = vec![Schema::new()];
    for n in names {
        let mut next = Vec::with_capacity(out.len() * 3);
        for s in &out {
            next.push(s.clone());
            next.push(s.clone().with_value(n.as_str(), t()));
            next.push(s.clone().with_value(n.as_str(), f()));
        }
        out = next;
    }
    out
}

pub fn random_situation(rng: &mut impl Rng, names: &[String]) -> Schema {
    names.iter().fold(Schema::new(), |s, n| match rng.gen_range(0..3) {
        0 => s,
        1 => s.with_value(n.as_str(), t()),
        _ => s.with_value(n.as_str(), f()),
    })
}

/// A CLI invocation with a recorded expected output.
pub struct GoldenCase {
    pub name: &'static str,
    pub args: Vec<&'static str>,
    pub exit: i32,
}

fn case(name: &'static str, exit: i32, args: &[&'static str]) -> GoldenCase {
    GoldenCase { name, args: args.to_vec(), exit }
}

/// Paths are relative to the crate root.
pub fn golden_cases() -> Vec<GoldenCase> {
    const F6: &str = "corpus/worked-example.theory";
    const ALL: &str = "A=true,B=true,C=true,D=true";
    vec![
        case("query-worked-example", 0, &["query", F6, ALL]),
        case("query-worked-example-trace", 0, &["query", F6, ALL, "--trace"]),
        case("query-worked-example-json", 0, &["query", F6, ALL, "--json", "--trace"]),
        case("query-worked-example-float", 0, &["query", F6, ALL, "--float", "--json"]),
        case("query-worked-example-single-msr", 0, &["query", F6, "A=true,D=true", "--trace"]),
        case("query-munch", 0, &["query", "corpus/munch.theory", "action=munch"]),
        case("query-ralph", 0, &["query", "corpus/ralph.theory", "action=move-forward,vision=any-object,distance=2,nasty-smell=15", "--trace"]),
        case("query-zero-sum", 0, &["query", "corpus/zero-sum.theory", "A=true,B=true,C=true", "--trace"]),
        case("query-pairwise-triangle-invalid", 3, &["query", "corpus/pairwise-triangle.theory", "tall=true,blond=true,blue-eyed=true"]),
        case("query-pairwise-triangle-skip-validate", 0, &["query", "corpus/pairwise-triangle.theory", "tall=true,blond=true,blue-eyed=true", "--skip-validate", "--json", "--trace"]),
        case("query-unknown-value", 4, &["query", F6, "A=maybe"]),
        case("query-target-bound", 4, &["query", F6, "G=true"]),
        case("query-situation-syntax", 4, &["query", F6, "A=true B=true"]),
        case("query-truncated", 2, &["query", "tests/fixtures/truncated.theory", "A=true"]),
        case("query-bad-sum", 2, &["query", "tests/fixtures/bad-sum.theory", "A=true"]),
        case("query-missing-file", 1, &["query", "tests/fixtures/absent.theory", "A=true"]),
        case("validate-overlapping-pairs", 0, &["validate", "corpus/overlapping-pairs.theory"]),
        case("validate-pairwise-triangle", 3, &["validate", "corpus/pairwise-triangle.theory"]),
        case("validate-pairwise-triangle-json", 3, &["validate", "corpus/pairwise-triangle.theory", "--json"]),
        case("validate-independent-features", 0, &["validate", "corpus/independent-features.theory"]),
        case("validate-default-only", 0, &["validate", "corpus/default-only.theory", "--json"]),
        case("validate-ralph-capped", 3, &["validate", "corpus/ralph.theory", "--cap", "10"]),
        case("oracle-uniform", 0, &["oracle", "--joint", "corpus/uniform.csv", "--theory", F6, "--situation", ALL]),
        case("oracle-dependent", 0, &["oracle", "--joint", "corpus/dependent.csv", "--theory", "corpus/overlapping-pairs.theory", "--situation", "tall=true,blond=true,blue-eyed=true"]),
        case("oracle-dependent-json", 0, &["oracle", "--joint", "corpus/dependent.csv", "--contexts", "blond=true;tall=true,blond=true;blond=true,blue-eyed=true", "--situation", "tall=true,blond=true,blue-eyed=true", "--json"]),
        case("oracle-zero-probability", 4, &["oracle", "--joint", "corpus/a-always.csv", "--contexts", "A=true", "--situation", "A=false"]),
        case("oracle-bad-csv", 2, &["oracle", "--joint", "tests/fixtures/bad-probability.csv", "--contexts", "A=true", "--situation", "A=true"]),
        case("fit-munch", 0, &["fit", "corpus/munch.theory"]),
        case("fmt-ralph", 0, &["fmt", "corpus/ralph.theory"]),
        case("fmt-truncated", 2, &["fmt", "tests/fixtures/truncated.theory"]),
        case("bad-arguments", 2, &["query"]),
    ]
}

pub fn golden_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(format!("{name}.txt"))
}

pub fn render_golden(code: i32, stdout: &[u8], stderr: &[u8]) -> String {
    format!(
        "exit: {code}\n--- stdout\n{}--- stderr\n{}",
        String::from_utf8_lossy(stdout),
        String::from_utf8_lossy(stderr)
    )
}

/// A theory file reproducing a Boolean theory built in code.
pub fn theory_text(th: &PredictiveTheory) -> String {
    let mut s = String::new();
    for def in th.features().defs() {
        let values = match &def.domain {
            Domain::Enum(v) => v.join(", "),
            d => panic!("unexpected domain {d:?}"),
        };
        s.push_str(&format!("feature {} values {{ {values} }}\n", def.name));
    }
    s.push_str(&format!("target {}\n", th.target()));
    for r in th.rules() {
        let ctx = r.context.bindings().iter().map(|(k, v)| format!("{k} = {v}")).collect::<Vec<_>>().join(", ");
        let dist = r.distribution.iter().map(|(v, p)| format!("{v}: {p}")).collect::<Vec<_>>().join(", ");
        s.push_str(&format!("rule {} {{ {ctx} }} -> {{ {dist} }}\n", r.name));
    }
    s
}
