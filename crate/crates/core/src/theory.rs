//! Rules, predictive theories and the structure PCI relies on.
//!
//! A [`PredictiveTheory`] is a set of rules over one target feature, one of
//! which has the empty context. Rules are arranged in a specificity DAG
//! (children strictly more specific than their parents). For a situation,
//! the most specific satisfied rules form the MSR set; a theory is uniquely
//! predictive when every MSR set any situation can produce admits a
//! separable ordering.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_rational::BigRational;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::arith::Probability;
use crate::schema::{Domain, FeatureSet, Interval, Schema, SchemaError, Value, ValueSet};

/// Tolerance for float distribution sums. Exact distributions must sum to
/// exactly one.
pub const SUM_TOLERANCE: f64 = 1e-9;

/// Default bound on the number of representative situations enumerated by
/// [`PredictiveTheory::check_uniquely_predictive`].
pub const DEFAULT_ENUMERATION_CAP: u64 = 1_000_000;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TheoryError {
    #[error("a theory needs at least one rule")]
    NoRules,
    #[error("target feature `{0}` is not declared")]
    UnknownTarget(String),
    #[error("no default rule (a rule with an empty context)")]
    MissingDefault,
    #[error("rules `{first}` and `{second}` have the same context")]
    DuplicateContext { first: String, second: String },
    #[error("rule name `{0}` is used more than once")]
    DuplicateRuleName(String),
    #[error("rule `{rule}`: context mentions the target feature `{target}`")]
    TargetInContext { rule: String, target: String },
    #[error("rule `{rule}`: {source}")]
    Context { rule: String, source: SchemaError },
    #[error("rule `{rule}` has an empty distribution")]
    EmptyDistribution { rule: String },
    #[error("rule `{rule}`: `{value}` is not a value of the target feature")]
    TargetValueOutOfDomain { rule: String, value: String },
    #[error("rule `{rule}` lists target value `{value}` more than once")]
    DuplicateTargetValue { rule: String, value: String },
    #[error("rule `{rule}`: probability {value} is outside [0, 1]")]
    ProbabilityOutOfRange { rule: String, value: String },
    #[error("rule `{rule}`: probabilities sum to {sum}, not 1")]
    BadSum { rule: String, sum: String },
}

/// A conditional distribution of the target feature given a context.
#[derive(Debug, Clone, PartialEq)]
pub struct Rule {
    pub name: String,
    pub context: Schema,
    pub distribution: Vec<(Value, Probability)>,
}

impl Rule {
    pub fn new(name: impl Into<String>, context: Schema, distribution: Vec<(Value, Probability)>) -> Self {
        Rule { name: name.into(), context, distribution }
    }

    pub fn is_default(&self) -> bool {
        self.context.is_empty()
    }

    pub fn probability_of(&self, v: &Value) -> Option<&Probability> {
        self.distribution.iter().find(|(x, _)| x == v).map(|(_, p)| p)
    }
}

/// A validated rule set with its specificity DAG.
#[derive(Debug, Clone)]
pub struct PredictiveTheory {
    features: FeatureSet,
    target: String,
    rules: Vec<Rule>,
    parents: Vec<Vec<usize>>,
    children: Vec<Vec<usize>>,
    default_rule: usize,
}

impl PredictiveTheory {
    /// Validates the rules and builds the specificity DAG as the transitive
    /// reduction of strict implication between contexts.
    pub fn build(features: FeatureSet, target: &str, rules: Vec<Rule>) -> Result<Self, TheoryError> {
        if rules.is_empty() {
            return Err(TheoryError::NoRules);
        }
        let target_def = features.get(target).ok_or_else(|| TheoryError::UnknownTarget(target.into()))?;
        let target_domain = target_def.domain.clone();

        let mut names = BTreeSet::new();
        let mut rules = rules;
        for rule in &mut rules {
            if !names.insert(rule.name.clone()) {
                return Err(TheoryError::DuplicateRuleName(rule.name.clone()));
            }
            if rule.context.get(target).is_some() {
                return Err(TheoryError::TargetInContext { rule: rule.name.clone(), target: target.into() });
            }
            features
                .check_schema(&rule.context)
                .map_err(|source| TheoryError::Context { rule: rule.name.clone(), source })?;
            rule.context = features.canonicalize(&rule.context);
            check_distribution(rule, &target_domain)?;
        }
        for i in 0..rules.len() {
            for j in 0..i {
                if rules[i].context == rules[j].context {
                    return Err(TheoryError::DuplicateContext {
                        first: rules[j].name.clone(),
                        second: rules[i].name.clone(),
                    });
                }
            }
        }
        let default_rule = rules.iter().position(Rule::is_default).ok_or(TheoryError::MissingDefault)?;

        let n = rules.len();
        let below = |c: usize, p: usize| rules[c].context.more_specific_than(&rules[p].context);
        let mut parents = vec![Vec::new(); n];
        let mut children = vec![Vec::new(); n];
        let pairs = (0..n).flat_map(|c| (0..n).map(move |p| (c, p)));
        for (c, p) in pairs {
            if c == p || !below(c, p) {
                continue;
            }
            let covered = (0..n).any(|k| k != c && k != p && below(c, k) && below(k, p));
            if !covered {
                parents[c].push(p);
                children[p].push(c);
            }
        }
        Ok(PredictiveTheory { features, target: target.into(), rules, parents, children, default_rule })
    }

    pub fn features(&self) -> &FeatureSet {
        &self.features
    }

    pub fn target(&self) -> &str {
        &self.target
    }

    pub fn target_domain(&self) -> &Domain {
        &self.features.get(&self.target).expect("target checked at build time").domain
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    pub fn rule(&self, index: usize) -> &Rule {
        &self.rules[index]
    }

    pub fn rule_index(&self, name: &str) -> Option<usize> {
        self.rules.iter().position(|r| r.name == name)
    }

    pub fn default_rule(&self) -> usize {
        self.default_rule
    }

    pub fn parents(&self, index: usize) -> &[usize] {
        &self.parents[index]
    }

    pub fn children(&self, index: usize) -> &[usize] {
        &self.children[index]
    }

    /// Length in edges of the longest root-to-leaf path of the DAG.
    pub fn dag_depth(&self) -> usize {
        let mut memo = vec![None; self.rules.len()];
        (0..self.rules.len()).map(|i| self.depth_of(i, &mut memo)).max().unwrap_or(0)
    }

    fn depth_of(&self, i: usize, memo: &mut Vec<Option<usize>>) -> usize {
        if let Some(d) = memo[i] {
            return d;
        }
        let d = self.parents[i].iter().map(|&p| self.depth_of(p, memo) + 1).max().unwrap_or(0);
        memo[i] = Some(d);
        d
    }

    pub fn names(&self, indices: &[usize]) -> Vec<String> {
        indices.iter().map(|&i| self.rules[i].name.clone()).collect()
    }

    /// The most specific rules satisfied by `situation`, ascending by rule
    /// index. Never empty, since the default rule is always satisfied.
    pub fn msr_set(&self, situation: &Schema) -> Vec<usize> {
        let satisfied: Vec<bool> = self.rules.iter().map(|r| situation.satisfies(&r.context)).collect();
        (0..self.rules.len())
            .filter(|&i| satisfied[i] && !self.children[i].iter().any(|&c| satisfied[c]))
            .collect()
    }

    /// How `rule` splits against `rest`, or `None` when it shares features
    /// with more than one rule of `rest`.
    pub fn split_against(&self, rule: usize, rest: &[usize]) -> Option<Split> {
        let ctx = &self.rules[rule].context;
        let mut partner = None;
        let mut shared = Schema::new();
        let mut unique = Vec::new();
        for (feature, set) in ctx.bindings() {
            let sharing: Vec<(usize, ValueSet)> = rest
                .iter()
                .filter(|&&k| k != rule)
                .filter_map(|&k| {
                    let common = self.rules[k].context.get(feature)?.intersection(set);
                    (!common.is_empty()).then_some((k, common))
                })
                .collect();
            match sharing.as_slice() {
                [] => unique.push(feature.clone()),
                [(k, common)] => {
                    if partner.is_some_and(|p| p != *k) {
                        return None;
                    }
                    partner = Some(*k);
                    shared.bind(feature.clone(), common.clone());
                }
                _ => return None,
            }
        }
        Some(Split { partner, shared, unique })
    }

    /// Orders an MSR set so that each rule is separable given the rules after
    /// it, picking the lowest-index separable rule at every step.
    pub fn separable_ordering(&self, msrs: &[usize]) -> Result<MsrOrdering, NotSeparable> {
        let mut remaining: Vec<usize> = msrs.to_vec();
        remaining.sort_unstable();
        remaining.dedup();
        let mut rules = Vec::with_capacity(remaining.len());
        let mut splits = Vec::new();
        while remaining.len() > 1 {
            let pick = remaining.iter().enumerate().find_map(|(pos, &r)| {
                let rest: Vec<usize> = remaining.iter().copied().filter(|&k| k != r).collect();
                self.split_against(r, &rest).map(|s| (pos, r, s))
            });
            match pick {
                Some((pos, r, split)) => {
                    remaining.remove(pos);
                    rules.push(r);
                    splits.push(split);
                }
                None => return Err(NotSeparable { residual: remaining }),
            }
        }
        rules.extend(remaining);
        Ok(MsrOrdering { rules, splits })
    }

    /// Every valid separable ordering of an MSR set.
    pub fn all_orderings(&self, msrs: &[usize]) -> Vec<MsrOrdering> {
        let mut out = Vec::new();
        let mut prefix = MsrOrdering { rules: Vec::new(), splits: Vec::new() };
        self.extend_orderings(msrs.to_vec(), &mut prefix, &mut out);
        out
    }

    fn extend_orderings(&self, remaining: Vec<usize>, prefix: &mut MsrOrdering, out: &mut Vec<MsrOrdering>) {
        if remaining.len() <= 1 {
            let mut done = prefix.clone();
            done.rules.extend(remaining);
            out.push(done);
            return;
        }
        for &r in &remaining {
            let rest: Vec<usize> = remaining.iter().copied().filter(|&k| k != r).collect();
            if let Some(split) = self.split_against(r, &rest) {
                prefix.rules.push(r);
                prefix.splits.push(split);
                self.extend_orderings(rest, prefix, out);
                prefix.rules.pop();
                prefix.splits.pop();
            }
        }
    }

    /// Enumerates one representative situation per cell of the partition the
    /// contexts induce, computes each MSR set and checks it is separable.
    pub fn check_uniquely_predictive(&self, cap: u64) -> ValidationReport {
        let axes = self.situation_axes();
        let total = axes.iter().try_fold(1u64, |acc, (_, opts)| acc.checked_mul(opts.len() as u64));
        let limit = total.map_or(cap, |t| t.min(cap));
        let complete = total.is_some_and(|t| t <= cap);

        let mut seen: BTreeMap<Vec<usize>, Schema> = BTreeMap::new();
        let mut counters = vec![0usize; axes.len()];
        let mut enumerated = 0u64;
        while enumerated < limit {
            let mut situation = Schema::new();
            for ((feature, opts), &c) in axes.iter().zip(&counters) {
                if let Some(set) = &opts[c] {
                    situation.bind(feature.clone(), set.clone());
                }
            }
            enumerated += 1;
            seen.entry(self.msr_set(&situation)).or_insert(situation);

            // Mixed-radix increment, last axis fastest.
            let mut axis = axes.len();
            loop {
                if axis == 0 {
                    break;
                }
                axis -= 1;
                counters[axis] += 1;
                if counters[axis] < axes[axis].1.len() {
                    break;
                }
                counters[axis] = 0;
            }
        }

        let violations: Vec<Violation> = seen
            .iter()
            .filter(|(msrs, _)| self.separable_ordering(msrs).is_err())
            .map(|(msrs, witness)| Violation { msrs: msrs.clone(), witness: witness.clone() })
            .collect();
        let status = if !violations.is_empty() {
            ValidationStatus::Invalid
        } else if complete {
            ValidationStatus::Valid
        } else {
            ValidationStatus::Incomplete
        };
        ValidationReport {
            status,
            violations,
            stats: ValidationStats {
                rule_count: self.rules.len(),
                dag_depth: self.dag_depth(),
                situations_enumerated: enumerated,
                distinct_msr_sets: seen.len(),
                complete,
            },
        }
    }

    /// For every feature used in some context: the unbound option followed by
    /// one representative value per atom of the Boolean algebra generated by
    /// the value sets the contexts use for it (residual atom included).
    fn situation_axes(&self) -> Vec<(String, Vec<Option<ValueSet>>)> {
        let mut occurring: BTreeMap<&str, BTreeSet<&ValueSet>> = BTreeMap::new();
        for rule in &self.rules {
            for (f, set) in rule.context.bindings() {
                occurring.entry(f.as_str()).or_default().insert(set);
            }
        }
        occurring
            .into_iter()
            .map(|(feature, sets)| {
                let domain = &self.features.get(feature).expect("checked at build time").domain;
                let sets: Vec<&ValueSet> = sets.into_iter().collect();
                let mut opts = vec![None];
                opts.extend(partition_representatives(domain, &sets).into_iter().map(|v| Some(ValueSet::singleton(&v))));
                (feature.to_string(), opts)
            })
            .collect()
    }
}

fn check_distribution(rule: &mut Rule, target: &Domain) -> Result<(), TheoryError> {
    if rule.distribution.is_empty() {
        return Err(TheoryError::EmptyDistribution { rule: rule.name.clone() });
    }
    let mut seen = BTreeSet::new();
    for (v, p) in &mut rule.distribution {
        let canonical = target.normalize(v).ok_or_else(|| TheoryError::TargetValueOutOfDomain {
            rule: rule.name.clone(),
            value: v.to_string(),
        })?;
        *v = canonical;
        if !seen.insert(v.clone()) {
            return Err(TheoryError::DuplicateTargetValue { rule: rule.name.clone(), value: v.to_string() });
        }
        if !p.in_unit_interval() {
            return Err(TheoryError::ProbabilityOutOfRange { rule: rule.name.clone(), value: p.to_string() });
        }
    }
    let exact: Option<Vec<&BigRational>> = rule.distribution.iter().map(|(_, p)| p.as_exact()).collect();
    match exact {
        Some(ps) => {
            let sum = ps.into_iter().fold(BigRational::zero(), |acc, p| acc + p);
            if !sum.is_one() {
                return Err(TheoryError::BadSum { rule: rule.name.clone(), sum: crate::arith::render_rational(&sum) });
            }
        }
        None => {
            let sum: f64 = rule.distribution.iter().map(|(_, p)| p.to_f64()).sum();
            if (sum - 1.0).abs() > SUM_TOLERANCE {
                return Err(TheoryError::BadSum { rule: rule.name.clone(), sum: sum.to_string() });
            }
        }
    }
    rule.distribution.sort_by_key(|(v, _)| target.rank(v));
    Ok(())
}

/// One representative value per non-empty atom of the Boolean algebra
/// generated by `sets` within `domain`.
pub(crate) fn partition_representatives(domain: &Domain, sets: &[&ValueSet]) -> Vec<Value> {
    let signature = |v: &Value| -> Vec<bool> { sets.iter().map(|s| s.contains(v)).collect() };
    let mut seen = BTreeSet::new();
    let mut reps = Vec::new();
    let mut consider = |v: Value| {
        if seen.insert(signature(&v)) {
            reps.push(v);
        }
    };
    match domain {
        Domain::Enum(vals) => vals.iter().for_each(|v| consider(Value::Atom(v.clone()))),
        Domain::Int { lo, hi } => {
            let mut breaks: BTreeSet<i64> = BTreeSet::from([*lo]);
            for set in sets {
                if let ValueSet::Ints(ivs) = set {
                    for Interval { lo: a, hi: b } in ivs {
                        breaks.insert(*a);
                        if let Some(b) = b.and_then(|b| b.checked_add(1)) {
                            breaks.insert(b);
                        }
                    }
                }
            }
            let in_domain = |x: i64| x >= *lo && hi.is_none_or(|h| x <= h);
            breaks.into_iter().filter(|&x| in_domain(x)).for_each(|x| consider(Value::Int(x)));
        }
    }
    reps
}

/// How one rule of an ordering splits against the rules after it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Split {
    /// The single later rule this rule shares features with, if any.
    pub partner: Option<usize>,
    /// The shared features, bound to the intersection of both value sets.
    pub shared: Schema,
    /// Features shared with no later rule.
    pub unique: Vec<String>,
}

/// An MSR set ordered so that each rule is separable given those after it.
/// `splits[i]` belongs to `rules[i]`; the last rule has no split.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MsrOrdering {
    pub rules: Vec<usize>,
    pub splits: Vec<Split>,
}

impl MsrOrdering {
    pub fn len(&self) -> usize {
        self.rules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("no rule among {residual:?} is separable from the others")]
pub struct NotSeparable {
    pub residual: Vec<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ValidationStatus {
    Valid,
    Invalid,
    /// The enumeration cap was hit before any violation was found.
    Incomplete,
}

impl fmt::Display for ValidationStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ValidationStatus::Valid => "valid",
            ValidationStatus::Invalid => "invalid",
            ValidationStatus::Incomplete => "incomplete",
        })
    }
}

/// An MSR set that no ordering makes separable, with a situation producing it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub msrs: Vec<usize>,
    pub witness: Schema,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidationStats {
    pub rule_count: usize,
    pub dag_depth: usize,
    pub situations_enumerated: u64,
    pub distinct_msr_sets: usize,
    pub complete: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidationReport {
    pub status: ValidationStatus,
    pub violations: Vec<Violation>,
    pub stats: ValidationStats,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.status == ValidationStatus::Valid
    }
}
