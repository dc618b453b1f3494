//! Probability Combination using Independence.
//!
//! For a situation, PCI finds the MSR set, orders it so each rule is
//! separable from those after it, and combines the rules' distributions as
//!
//! ```text
//! P(v | S) ∝ ∏_i P(v | C_i) / ∏_{j<n} P(v | f_j^s)
//! ```
//!
//! where each denominator is itself a PCI prediction for the shared schema
//! `f_j^s`. Only values every MSR gives non-zero probability are scored.
//! Raw scores are normalized; when they are all zero, or the MSR set has no
//! separable ordering, prediction falls back to the shared features of the
//! whole MSR set. Every step is recorded in a [`TraceNode`].

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::arith::Scalar;
use crate::schema::{shared_features, Schema, Value};
use crate::theory::{MsrOrdering, PredictiveTheory};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PciError {
    #[error("ordering covers rules {given:?} but the situation's MSR set is {expected:?}")]
    OrderingMismatch { given: Vec<usize>, expected: Vec<usize> },
    #[error("ordering is not separable")]
    InvalidOrdering,
}

/// Heuristic events, recorded on the trace node where they happened.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Flag {
    /// Every raw score was zero; fell back to the shared features.
    ZeroSumFallback,
    /// The MSR set had no separable ordering; fell back to the shared features.
    NonSeparableFallback,
    /// A sub-query would have reproduced the caller's MSR set; the default
    /// rule was used instead.
    RecursionGuard,
    /// A denominator was zero for a value every MSR supports; that value
    /// scored zero.
    DivisionShield,
}

impl Flag {
    pub fn as_str(&self) -> &'static str {
        match self {
            Flag::ZeroSumFallback => "zero-sum-fallback",
            Flag::NonSeparableFallback => "non-separable-fallback",
            Flag::RecursionGuard => "recursion-guard",
            Flag::DivisionShield => "division-shield",
        }
    }
}

impl fmt::Display for Flag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FallbackKind {
    ZeroSum,
    NonSeparable,
}

impl FallbackKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            FallbackKind::ZeroSum => "zero-sum",
            FallbackKind::NonSeparable => "non-separable",
        }
    }
}

/// Where a fallback went. `sub` is `None` when the recursion guard replaced
/// the sub-query by the default rule.
#[derive(Debug, Clone)]
pub struct Fallback<S> {
    pub kind: FallbackKind,
    pub schema: Schema,
    pub sub: Option<Box<TraceNode<S>>>,
}

/// One value's line of the combination.
#[derive(Debug, Clone, PartialEq)]
pub struct Term<S> {
    pub value: Value,
    /// Product of the MSR probabilities.
    pub numerator: S,
    /// Product of the denominator probabilities.
    pub denominator: S,
    /// `numerator / denominator`, or zero for values not common to every MSR
    /// and for shielded values.
    pub raw: S,
    pub common: bool,
}

/// A denominator sub-query. `trace` is `None` when the recursion guard
/// substituted the default rule.
#[derive(Debug, Clone)]
pub struct Denominator<S> {
    pub schema: Schema,
    pub distribution: Vec<(Value, S)>,
    pub trace: Option<TraceNode<S>>,
}

/// One PCI evaluation.
#[derive(Debug, Clone)]
pub struct TraceNode<S> {
    pub situation: Schema,
    pub msrs: Vec<usize>,
    pub msr_ids: Vec<String>,
    /// `None` for a single MSR and for non-separable sets.
    pub ordering: Option<MsrOrdering>,
    pub denominators: Vec<Denominator<S>>,
    pub terms: Vec<Term<S>>,
    /// Sum of the raw scores the result was divided by.
    pub normalization: S,
    pub fallback: Option<Fallback<S>>,
    pub flags: Vec<Flag>,
    pub result: Vec<(Value, S)>,
}

impl<S> TraceNode<S> {
    /// Flags of this node and every node below it, deduplicated.
    pub fn all_flags(&self) -> BTreeSet<Flag> {
        let mut out = BTreeSet::new();
        self.visit(&mut |n| out.extend(n.flags.iter().copied()));
        out
    }

    /// Pre-order walk over the node and its sub-queries.
    pub fn visit<'a>(&'a self, f: &mut impl FnMut(&'a TraceNode<S>)) {
        f(self);
        for d in &self.denominators {
            if let Some(t) = &d.trace {
                t.visit(f);
            }
        }
        if let Some(sub) = self.fallback.as_ref().and_then(|fb| fb.sub.as_ref()) {
            sub.visit(f);
        }
    }

    /// Longest chain of nested sub-queries, counting this node.
    pub fn depth(&self) -> usize {
        let below = self
            .denominators
            .iter()
            .filter_map(|d| d.trace.as_ref())
            .chain(self.fallback.as_ref().and_then(|fb| fb.sub.as_deref()))
            .map(TraceNode::depth)
            .max()
            .unwrap_or(0);
        below + 1
    }
}

/// A predicted distribution with its derivation.
#[derive(Debug, Clone)]
pub struct Prediction<S> {
    pub distribution: Vec<(Value, S)>,
    pub trace: TraceNode<S>,
}

impl<S: Scalar> Prediction<S> {
    pub fn probability(&self, v: &Value) -> S {
        lookup(&self.distribution, v)
    }

    pub fn flags(&self) -> BTreeSet<Flag> {
        self.trace.all_flags()
    }

    pub fn is_heuristic(&self) -> bool {
        !self.flags().is_empty()
    }
}

fn lookup<S: Scalar>(dist: &[(Value, S)], v: &Value) -> S {
    dist.iter().find(|(x, _)| x == v).map_or_else(S::zero, |(_, p)| p.clone())
}

/// Predicts the target distribution for `situation`.
pub fn predict<S: Scalar>(theory: &PredictiveTheory, situation: &Schema) -> Prediction<S> {
    let trace = Engine { theory }.evaluate(situation, None, 0);
    Prediction { distribution: trace.result.clone(), trace }
}

/// Like [`predict`] but combines the top-level MSR set in the given order
/// instead of the greedy one. Sub-queries still use the greedy order.
pub fn predict_with_ordering<S: Scalar>(
    theory: &PredictiveTheory,
    situation: &Schema,
    ordering: &MsrOrdering,
) -> Result<Prediction<S>, PciError> {
    let expected = theory.msr_set(situation);
    let mut given = ordering.rules.clone();
    given.sort_unstable();
    if given != expected {
        return Err(PciError::OrderingMismatch { given: ordering.rules.clone(), expected });
    }
    if ordering.splits.len() + 1 != ordering.rules.len().max(1) {
        return Err(PciError::InvalidOrdering);
    }
    for (i, split) in ordering.splits.iter().enumerate() {
        if theory.split_against(ordering.rules[i], &ordering.rules[i + 1..]).as_ref() != Some(split) {
            return Err(PciError::InvalidOrdering);
        }
    }
    let trace = Engine { theory }.evaluate(situation, Some(ordering), 0);
    Ok(Prediction { distribution: trace.result.clone(), trace })
}

/// Combines MSR distributions (in ordering order) with the denominator
/// distributions. With one rule this is the identity.
pub fn combine<S: Scalar>(rules: &[Vec<(Value, S)>], denominators: &[Vec<(Value, S)>]) -> Vec<Term<S>> {
    let mut values: Vec<Value> = Vec::new();
    for dist in rules {
        for (v, _) in dist {
            if !values.contains(v) {
                values.push(v.clone());
            }
        }
    }
    values
        .into_iter()
        .map(|value| {
            let probs: Vec<S> = rules.iter().map(|d| lookup(d, &value)).collect();
            let common = probs.iter().all(|p| !p.is_zero());
            let numerator = probs.into_iter().fold(S::one(), |acc, p| acc * p);
            let denominator = denominators.iter().fold(S::one(), |acc, d| acc * lookup(d, &value));
            let raw = if common && !denominator.is_zero() {
                numerator.clone() / denominator.clone()
            } else {
                S::zero()
            };
            Term { value, numerator, denominator, raw, common }
        })
        .collect()
}

struct Engine<'t> {
    theory: &'t PredictiveTheory,
}

impl Engine<'_> {
    fn rule_distribution<S: Scalar>(&self, index: usize) -> Vec<(Value, S)> {
        self.theory.rule(index).distribution.iter().map(|(v, p)| (v.clone(), S::from_probability(p))).collect()
    }

    fn prior<S: Scalar>(&self) -> Vec<(Value, S)> {
        self.rule_distribution(self.theory.default_rule())
    }

    fn evaluate<S: Scalar>(&self, situation: &Schema, forced: Option<&MsrOrdering>, depth: usize) -> TraceNode<S> {
        let msrs = self.theory.msr_set(situation);
        let mut node = TraceNode {
            situation: situation.clone(),
            msr_ids: self.theory.names(&msrs),
            msrs,
            ordering: None,
            denominators: Vec::new(),
            terms: Vec::new(),
            normalization: S::one(),
            fallback: None,
            flags: Vec::new(),
            result: Vec::new(),
        };

        if node.msrs.len() == 1 {
            let dist = self.rule_distribution::<S>(node.msrs[0]);
            node.terms = combine(std::slice::from_ref(&dist), &[]);
            node.result = dist;
            return node;
        }

        let ordering = match forced {
            Some(o) => o.clone(),
            None => match self.theory.separable_ordering(&node.msrs) {
                Ok(o) => o,
                Err(_) => {
                    self.fall_back(&mut node, FallbackKind::NonSeparable, depth);
                    return node;
                }
            },
        };

        let mut denominators = Vec::with_capacity(ordering.splits.len());
        for split in &ordering.splits {
            let (distribution, trace) = self.sub_query(&split.shared, &node.msrs, depth, &mut node.flags);
            denominators.push(Denominator { schema: split.shared.clone(), distribution, trace });
        }
        let numerators: Vec<Vec<(Value, S)>> = ordering.rules.iter().map(|&r| self.rule_distribution(r)).collect();
        let denominator_dists: Vec<Vec<(Value, S)>> = denominators.iter().map(|d| d.distribution.clone()).collect();
        node.terms = combine(&numerators, &denominator_dists);
        node.denominators = denominators;
        node.ordering = Some(ordering);
        if node.terms.iter().any(|t| t.common && t.denominator.is_zero()) {
            node.flags.push(Flag::DivisionShield);
        }

        let total = node.terms.iter().fold(S::zero(), |acc, t| acc + t.raw.clone());
        if total.is_zero() {
            self.fall_back(&mut node, FallbackKind::ZeroSum, depth);
            return node;
        }
        node.result = node.terms.iter().map(|t| (t.value.clone(), t.raw.clone() / total.clone())).collect();
        node.normalization = total;
        node
    }

    /// Evaluates `schema` as a sub-query, or substitutes the default rule
    /// when doing so would not make progress.
    fn sub_query<S: Scalar>(
        &self,
        schema: &Schema,
        caller_msrs: &[usize],
        depth: usize,
        flags: &mut Vec<Flag>,
    ) -> (Vec<(Value, S)>, Option<TraceNode<S>>) {
        let stalls = self.theory.msr_set(schema) == caller_msrs || depth > self.theory.rules().len();
        if stalls {
            if !flags.contains(&Flag::RecursionGuard) {
                flags.push(Flag::RecursionGuard);
            }
            return (self.prior(), None);
        }
        let sub = self.evaluate::<S>(schema, None, depth + 1);
        (sub.result.clone(), Some(sub))
    }

    fn fall_back<S: Scalar>(&self, node: &mut TraceNode<S>, kind: FallbackKind, depth: usize) {
        node.flags.push(match kind {
            FallbackKind::ZeroSum => Flag::ZeroSumFallback,
            FallbackKind::NonSeparable => Flag::NonSeparableFallback,
        });
        let contexts: Vec<&Schema> = node.msrs.iter().map(|&r| &self.theory.rule(r).context).collect();
        let schema = shared_features(&contexts);
        let (result, sub) = self.sub_query(&schema, &node.msrs, depth, &mut node.flags);
        node.result = result;
        node.terms.iter_mut().for_each(|t| t.raw = S::zero());
        node.fallback = Some(Fallback { kind, schema, sub: sub.map(Box::new) });
    }
}
