//! Brute-force ground truth over explicit joint tables.
//!
//! Nothing here calls into the PCI engine: conditionals are read straight
//! off the table, and the maximum-entropy fit is plain iterative
//! proportional fitting. That independence is what lets these routines
//! falsify the engine.

use std::collections::BTreeMap;
use std::io::{Read, Write};

use num_rational::BigRational;
use thiserror::Error;

use crate::arith::{parse_rational, Probability, Scalar};
use crate::schema::{Domain, Schema, Value};
use crate::theory::{PredictiveTheory, Rule};

/// Largest joint table the oracle will build.
pub const MAX_ATOMS: usize = 1 << 12;

const TABLE_SUM_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OracleError {
    #[error("joint table would have {0} atoms (limit {MAX_ATOMS})")]
    TooManyAtoms(u128),
    #[error("feature `{0}` has no values")]
    EmptyFeature(String),
    #[error("feature `{0}` has an unbounded domain")]
    UnboundedDomain(String),
    #[error("expected {expected} probabilities, got {got}")]
    ShapeMismatch { expected: usize, got: usize },
    #[error("negative probability in joint table")]
    Negative,
    #[error("joint table sums to {0}, not 1")]
    BadSum(f64),
    #[error("feature `{0}` is not part of the joint table")]
    UnknownFeature(String),
    #[error("`{value}` is not a value of `{feature}` in the joint table")]
    UnknownValue { feature: String, value: String },
    #[error("conditioning event `{0}` has probability zero")]
    ZeroProbability(String),
    #[error("constraint {index} cannot be satisfied (its slice has no mass to move)")]
    Inconsistent { index: usize },
    #[error("no convergence after {sweeps} sweeps (max violation {max_violation:e})")]
    NonConvergence { sweeps: usize, max_violation: f64 },
    #[error("csv: {0}")]
    Csv(String),
}

/// A ground feature of the joint table and its values in table order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleFeature {
    pub name: String,
    pub values: Vec<Value>,
}

impl OracleFeature {
    pub fn new(name: impl Into<String>, values: Vec<Value>) -> Self {
        OracleFeature { name: name.into(), values }
    }

    pub fn boolean(name: impl Into<String>) -> Self {
        OracleFeature::new(name, vec![Value::atom("true"), Value::atom("false")])
    }
}

/// The ground feature space of a theory: every non-target feature in
/// declaration order, then the target.
pub fn space_from_theory(theory: &PredictiveTheory) -> Result<Vec<OracleFeature>, OracleError> {
    let mut out = Vec::new();
    let mut target = None;
    for def in theory.features().defs() {
        let values = match &def.domain {
            Domain::Int { hi: None, .. } => return Err(OracleError::UnboundedDomain(def.name.clone())),
            d => d.values().unwrap_or_default(),
        };
        let f = OracleFeature::new(def.name.clone(), values);
        if def.name == theory.target() {
            target = Some(f);
        } else {
            out.push(f);
        }
    }
    out.extend(target);
    Ok(out)
}

/// An explicit joint distribution. The last feature is the target; rows are
/// in mixed-radix order with the first feature most significant.
#[derive(Debug, Clone, PartialEq)]
pub struct JointTable<S> {
    features: Vec<OracleFeature>,
    probs: Vec<S>,
}

fn atom_count(features: &[OracleFeature]) -> Result<usize, OracleError> {
    let mut n: u128 = 1;
    for f in features {
        if f.values.is_empty() {
            return Err(OracleError::EmptyFeature(f.name.clone()));
        }
        n = n.saturating_mul(f.values.len() as u128);
        if n > MAX_ATOMS as u128 {
            return Err(OracleError::TooManyAtoms(n));
        }
    }
    Ok(n as usize)
}

impl<S: Scalar> JointTable<S> {
    pub fn new(features: Vec<OracleFeature>, probs: Vec<S>) -> Result<Self, OracleError> {
        let expected = atom_count(&features)?;
        if probs.len() != expected {
            return Err(OracleError::ShapeMismatch { expected, got: probs.len() });
        }
        if probs.iter().any(|p| *p < S::zero()) {
            return Err(OracleError::Negative);
        }
        let sum: f64 = probs.iter().map(Scalar::to_f64).sum();
        if (sum - 1.0).abs() > TABLE_SUM_TOLERANCE {
            return Err(OracleError::BadSum(sum));
        }
        Ok(JointTable { features, probs })
    }

    pub fn uniform(features: Vec<OracleFeature>) -> Result<Self, OracleError> {
        let n = atom_count(&features)?;
        let p = S::one() / S::from_f64(n as f64);
        JointTable::new(features, vec![p; n])
    }

    pub fn features(&self) -> &[OracleFeature] {
        &self.features
    }

    pub fn target(&self) -> &OracleFeature {
        self.features.last().expect("tables have at least one feature")
    }

    pub fn probabilities(&self) -> &[S] {
        &self.probs
    }

    pub fn atom_count(&self) -> usize {
        self.probs.len()
    }

    /// Value indices of row `i`, one per feature.
    pub fn assignment(&self, mut i: usize) -> Vec<usize> {
        let mut out = vec![0; self.features.len()];
        for (k, f) in self.features.iter().enumerate().rev() {
            out[k] = i % f.values.len();
            i /= f.values.len();
        }
        out
    }

    fn feature_index(&self, name: &str) -> Result<usize, OracleError> {
        self.features
            .iter()
            .position(|f| f.name == name)
            .ok_or_else(|| OracleError::UnknownFeature(name.into()))
    }

    /// Row mask of the atoms satisfying `schema`.
    pub fn mask(&self, schema: &Schema) -> Result<Vec<bool>, OracleError> {
        let mut checks = Vec::new();
        for (name, set) in schema.bindings() {
            let k = self.feature_index(name)?;
            let allowed: Vec<bool> = self.features[k].values.iter().map(|v| set.contains(v)).collect();
            checks.push((k, allowed));
        }
        Ok((0..self.probs.len())
            .map(|i| {
                let a = self.assignment(i);
                checks.iter().all(|(k, allowed)| allowed[a[*k]])
            })
            .collect())
    }

    pub fn probability_of(&self, schema: &Schema) -> Result<S, OracleError> {
        let mask = self.mask(schema)?;
        Ok(self.probs.iter().zip(mask).filter(|(_, m)| *m).fold(S::zero(), |acc, (p, _)| acc + p.clone()))
    }

    /// `P(target | given)` read off the table.
    pub fn exact_conditional(&self, given: &Schema) -> Result<Vec<(Value, S)>, OracleError> {
        let mask = self.mask(given)?;
        let t = self.features.len() - 1;
        let mut joint = vec![S::zero(); self.target().values.len()];
        let mut total = S::zero();
        for (i, p) in self.probs.iter().enumerate() {
            if mask[i] {
                let a = self.assignment(i);
                joint[a[t]] = joint[a[t]].clone() + p.clone();
                total = total + p.clone();
            }
        }
        if total.is_zero() {
            return Err(OracleError::ZeroProbability(given.to_string()));
        }
        Ok(self.target().values.iter().cloned().zip(joint.into_iter().map(|j| j / total.clone())).collect())
    }

    /// Shannon entropy in nats.
    pub fn entropy(&self) -> f64 {
        self.probs
            .iter()
            .map(Scalar::to_f64)
            .filter(|p| *p > 0.0)
            .map(|p| -p * p.ln())
            .sum()
    }

    pub fn to_f64(&self) -> JointTable<f64> {
        JointTable { features: self.features.clone(), probs: self.probs.iter().map(Scalar::to_f64).collect() }
    }

    /// Writes the table as CSV: a header of feature names and `probability`,
    /// then one row per atom.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<(), OracleError> {
        let mut out = csv::Writer::from_writer(w);
        let mut header: Vec<String> = self.features.iter().map(|f| f.name.clone()).collect();
        header.push("probability".into());
        out.write_record(&header).map_err(|e| OracleError::Csv(e.to_string()))?;
        for (i, p) in self.probs.iter().enumerate() {
            let mut row: Vec<String> =
                self.assignment(i).iter().zip(&self.features).map(|(&k, f)| f.values[k].to_string()).collect();
            row.push(p.render());
            out.write_record(&row).map_err(|e| OracleError::Csv(e.to_string()))?;
        }
        out.flush().map_err(|e| OracleError::Csv(e.to_string()))
    }
}

/// Reads a CSV joint table. Probabilities may be decimals or `p/q`
/// fractions and are kept exact. Every combination of the values seen in
/// each column must appear exactly once.
pub fn read_csv<R: Read>(r: R) -> Result<JointTable<BigRational>, OracleError> {
    let csv_err = |e: csv::Error| OracleError::Csv(e.to_string());
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(r);
    let header = reader.headers().map_err(csv_err)?.clone();
    if header.len() < 2 {
        return Err(OracleError::Csv("need at least a target column and a probability column".into()));
    }
    let n_features = header.len() - 1;
    let mut features: Vec<OracleFeature> =
        header.iter().take(n_features).map(|n| OracleFeature::new(n, Vec::new())).collect();
    let mut rows: Vec<(Vec<usize>, BigRational)> = Vec::new();
    for record in reader.records() {
        let record = record.map_err(csv_err)?;
        let mut idx = Vec::with_capacity(n_features);
        for (k, field) in record.iter().take(n_features).enumerate() {
            let v = field.parse::<i64>().map(Value::Int).unwrap_or_else(|_| Value::atom(field));
            let values = &mut features[k].values;
            let pos = values.iter().position(|x| *x == v).unwrap_or_else(|| {
                values.push(v);
                values.len() - 1
            });
            idx.push(pos);
        }
        let field = &record[n_features];
        let p = parse_rational(field).ok_or_else(|| OracleError::Csv(format!("bad probability `{field}`")))?;
        rows.push((idx, p));
    }
    let n = atom_count(&features)?;
    if rows.len() != n {
        return Err(OracleError::ShapeMismatch { expected: n, got: rows.len() });
    }
    let mut probs: Vec<Option<BigRational>> = vec![None; n];
    for (idx, p) in rows {
        let flat = idx.iter().zip(&features).fold(0usize, |acc, (&i, f)| acc * f.values.len() + i);
        if probs[flat].replace(p).is_some() {
            return Err(OracleError::Csv("an atom appears more than once".into()));
        }
    }
    JointTable::new(features, probs.into_iter().map(|p| p.expect("every row filled")).collect())
}

/// `P(target = value | context) = probability`.
#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    pub context: Schema,
    pub value: Value,
    pub probability: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConstraintSet {
    pub constraints: Vec<Constraint>,
}

impl ConstraintSet {
    /// One constraint per (rule, target value), in rule order.
    pub fn from_theory(theory: &PredictiveTheory) -> Self {
        let constraints = theory
            .rules()
            .iter()
            .flat_map(|r| {
                r.distribution.iter().map(|(v, p)| Constraint {
                    context: r.context.clone(),
                    value: v.clone(),
                    probability: p.to_f64(),
                })
            })
            .collect();
        ConstraintSet { constraints }
    }

    /// Groups consecutive constraints on the same context into rules named
    /// by `name(i)` for the i-th context.
    pub fn to_rules(&self, name: impl Fn(usize, &Schema) -> String) -> Vec<Rule> {
        let mut rules: Vec<Rule> = Vec::new();
        for c in &self.constraints {
            match rules.last_mut() {
                Some(last) if last.context == c.context => {
                    last.distribution.push((c.value.clone(), Probability::Float(c.probability)))
                }
                _ => rules.push(Rule::new(
                    name(rules.len(), &c.context),
                    c.context.clone(),
                    vec![(c.value.clone(), Probability::Float(c.probability))],
                )),
            }
        }
        rules
    }
}

/// The exact conditional target distribution of each context, as constraints.
pub fn rules_from_joint<S: Scalar>(joint: &JointTable<S>, contexts: &[Schema]) -> Result<ConstraintSet, OracleError> {
    let mut constraints = Vec::new();
    for ctx in contexts {
        for (value, p) in joint.exact_conditional(ctx)? {
            constraints.push(Constraint { context: ctx.clone(), value, probability: p.to_f64() });
        }
    }
    Ok(ConstraintSet { constraints })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitOptions {
    pub tolerance: f64,
    pub max_sweeps: usize,
}

impl Default for FitOptions {
    fn default() -> Self {
        FitOptions { tolerance: 1e-10, max_sweeps: 100_000 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitReport {
    pub sweeps: usize,
    pub max_violation: f64,
}

/// Maximum-entropy joint over `space` satisfying every constraint, by
/// iterative proportional fitting from the uniform table.
pub fn me_fit(
    space: Vec<OracleFeature>,
    constraints: &ConstraintSet,
    options: FitOptions,
) -> Result<(JointTable<f64>, FitReport), OracleError> {
    ipf(JointTable::uniform(space)?, constraints, options)
}

struct Prepared {
    in_context: Vec<bool>,
    on_value: Vec<bool>,
    probability: f64,
}

/// Iterative proportional fitting from `initial`. Each step is the exact
/// I-projection onto one constraint; constraints are cycled in order.
/// Starting from the uniform table the limit is the maximum-entropy table.
pub fn ipf(
    initial: JointTable<f64>,
    constraints: &ConstraintSet,
    options: FitOptions,
) -> Result<(JointTable<f64>, FitReport), OracleError> {
    let mut table = initial;
    let t = table.features.len() - 1;
    let target = table.target().clone();
    let prepared: Vec<Prepared> = constraints
        .constraints
        .iter()
        .map(|c| {
            let v = target.values.iter().position(|x| same_value(x, &c.value)).ok_or_else(|| {
                OracleError::UnknownValue { feature: target.name.clone(), value: c.value.to_string() }
            })?;
            let in_context = table.mask(&c.context)?;
            let on_value = (0..table.probs.len()).map(|i| table.assignment(i)[t] == v).collect();
            Ok(Prepared { in_context, on_value, probability: c.probability })
        })
        .collect::<Result<_, OracleError>>()?;

    let violation = |probs: &[f64]| -> Result<f64, OracleError> {
        let mut worst: f64 = 0.0;
        for (index, c) in prepared.iter().enumerate() {
            let (a, b) = slice_mass(probs, c);
            if a + b <= 0.0 {
                return Err(OracleError::Inconsistent { index });
            }
            worst = worst.max((a / (a + b) - c.probability).abs());
        }
        Ok(worst)
    };

    for sweep in 0..options.max_sweeps {
        let worst = violation(&table.probs)?;
        if worst < options.tolerance {
            return Ok((table, FitReport { sweeps: sweep, max_violation: worst }));
        }
        for (index, c) in prepared.iter().enumerate() {
            project(&mut table.probs, c).ok_or(OracleError::Inconsistent { index })?;
        }
    }
    let worst = violation(&table.probs)?;
    if worst < options.tolerance {
        Ok((table, FitReport { sweeps: options.max_sweeps, max_violation: worst }))
    } else {
        Err(OracleError::NonConvergence { sweeps: options.max_sweeps, max_violation: worst })
    }
}

// `5` and the atom `"5"` name the same value.
fn same_value(a: &Value, b: &Value) -> bool {
    a == b || a.to_string() == b.to_string()
}

fn slice_mass(probs: &[f64], c: &Prepared) -> (f64, f64) {
    let mut a = 0.0;
    let mut b = 0.0;
    for (i, p) in probs.iter().enumerate() {
        if c.in_context[i] {
            if c.on_value[i] {
                a += p;
            } else {
                b += p;
            }
        }
    }
    (a, b)
}

fn project(probs: &mut [f64], c: &Prepared) -> Option<()> {
    let (a, b) = slice_mass(probs, c);
    let p = c.probability;
    let (on, off) = if p <= 0.0 {
        if b <= 0.0 {
            return None;
        }
        (0.0, 1.0)
    } else if p >= 1.0 {
        if a <= 0.0 {
            return None;
        }
        (1.0, 0.0)
    } else {
        if a <= 0.0 || b <= 0.0 {
            return None;
        }
        let lambda = (p * b / ((1.0 - p) * a)).ln();
        ((lambda * (1.0 - p)).exp(), (-lambda * p).exp())
    };
    let mut total = 0.0;
    for (i, q) in probs.iter_mut().enumerate() {
        if c.in_context[i] {
            *q *= if c.on_value[i] { on } else { off };
        }
        total += *q;
    }
    if !(total.is_finite() && total > 0.0) {
        return None;
    }
    probs.iter_mut().for_each(|q| *q /= total);
    Some(())
}

/// What an independence test conditions on: every value combination of
/// `features`, each intersected with `event`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Conditioning {
    pub features: Vec<String>,
    pub event: Schema,
}

impl Conditioning {
    pub fn event(event: Schema) -> Self {
        Conditioning { features: Vec::new(), event }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IndependenceReport {
    pub holds: bool,
    /// Largest `|P(a∧b|slice) − P(a|slice)·P(b|slice)|` seen.
    pub max_deviation: f64,
    pub slices_checked: usize,
    /// Slices with zero probability, skipped.
    pub slices_skipped: usize,
}

/// Tests `a ⊥ b | given` on the table within `tol`.
pub fn independence_holds<S: Scalar>(
    joint: &JointTable<S>,
    a: &[&str],
    b: &[&str],
    given: &Conditioning,
    tol: f64,
) -> Result<IndependenceReport, OracleError> {
    let idx = |names: &[&str]| -> Result<Vec<usize>, OracleError> {
        names.iter().map(|n| joint.feature_index(n)).collect()
    };
    let (ai, bi) = (idx(a)?, idx(b)?);
    let given_names: Vec<&str> = given.features.iter().map(String::as_str).collect();
    let gi = idx(&given_names)?;
    let event = joint.mask(&given.event)?;

    type Key = Vec<usize>;
    // Per slice: total mass, joint masses of (a, b), marginals of a and of b.
    type Slice<S> = (S, BTreeMap<(Key, Key), S>, BTreeMap<Key, S>, BTreeMap<Key, S>);
    let mut slices: BTreeMap<Key, Slice<S>> = BTreeMap::new();
    let pick = |asg: &[usize], which: &[usize]| -> Key { which.iter().map(|&k| asg[k]).collect() };
    for (i, p) in joint.probs.iter().enumerate() {
        let asg = joint.assignment(i);
        let entry = slices
            .entry(pick(&asg, &gi))
            .or_insert_with(|| (S::zero(), BTreeMap::new(), BTreeMap::new(), BTreeMap::new()));
        if !event[i] {
            continue;
        }
        let (ka, kb) = (pick(&asg, &ai), pick(&asg, &bi));
        entry.0 = entry.0.clone() + p.clone();
        let ab = entry.1.entry((ka.clone(), kb.clone())).or_insert_with(S::zero);
        *ab = ab.clone() + p.clone();
        let pa = entry.2.entry(ka).or_insert_with(S::zero);
        *pa = pa.clone() + p.clone();
        let pb = entry.3.entry(kb).or_insert_with(S::zero);
        *pb = pb.clone() + p.clone();
    }

    let mut report = IndependenceReport { holds: true, max_deviation: 0.0, slices_checked: 0, slices_skipped: 0 };
    for (total, ab, pa, pb) in slices.into_values() {
        if total.is_zero() {
            report.slices_skipped += 1;
            continue;
        }
        report.slices_checked += 1;
        for (ka, va) in &pa {
            for (kb, vb) in &pb {
                let joint_p = ab.get(&(ka.clone(), kb.clone())).cloned().unwrap_or_else(S::zero) / total.clone();
                let product = (va.clone() / total.clone()) * (vb.clone() / total.clone());
                let dev = (joint_p - product).to_f64().abs();
                report.max_deviation = report.max_deviation.max(dev);
            }
        }
    }
    report.holds = report.max_deviation <= tol;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn booleans(names: &[&str]) -> Vec<OracleFeature> {
        names.iter().map(|n| OracleFeature::boolean(*n)).collect()
    }

    fn t(f: &str) -> Schema {
        Schema::new().with_value(f, Value::atom("true"))
    }

    #[test]
    fn uniform_conditionals_are_half() {
        let j = JointTable::<f64>::uniform(booleans(&["A", "B", "C", "G"])).unwrap();
        for given in [Schema::new(), t("A"), t("A").with_value("C", Value::atom("false"))] {
            let c = j.exact_conditional(&given).unwrap();
            assert!((c[0].1 - 0.5).abs() < 1e-15);
        }
    }

    #[test]
    fn definitional_conditional() {
        // P(Y ∧ G) = 0.1, P(Y) = 0.4
        let j = JointTable::new(booleans(&["Y", "G"]), vec![0.1, 0.3, 0.2, 0.4]).unwrap();
        let c = j.exact_conditional(&t("Y")).unwrap();
        assert!((c[0].1 - 0.25).abs() < 1e-15);
        assert!((c[1].1 - 0.75).abs() < 1e-15);
    }

    #[test]
    fn zero_probability_conditioning() {
        let j = JointTable::new(booleans(&["Y", "G"]), vec![0.0, 0.0, 0.5, 0.5]).unwrap();
        assert!(matches!(j.exact_conditional(&t("Y")), Err(OracleError::ZeroProbability(_))));
    }

    #[test]
    fn table_invariants() {
        assert!(matches!(JointTable::new(booleans(&["G"]), vec![0.5]), Err(OracleError::ShapeMismatch { .. })));
        assert!(matches!(JointTable::new(booleans(&["G"]), vec![0.5, 0.6]), Err(OracleError::BadSum(_))));
        assert!(matches!(JointTable::new(booleans(&["G"]), vec![1.5, -0.5]), Err(OracleError::Negative)));
        let names: Vec<String> = (0..13).map(|i| format!("f{i}")).collect();
        let refs: Vec<&str> = names.iter().map(String::as_str).collect();
        assert!(matches!(JointTable::<f64>::uniform(booleans(&refs)), Err(OracleError::TooManyAtoms(_))));
    }

    #[test]
    fn me_fit_without_constraints_is_uniform() {
        let (j, report) = me_fit(booleans(&["A", "G"]), &ConstraintSet::default(), FitOptions::default()).unwrap();
        assert_eq!(report.sweeps, 0);
        assert!(j.probabilities().iter().all(|p| (p - 0.25).abs() < 1e-15));
    }

    #[test]
    fn me_fit_single_prior() {
        let cs = ConstraintSet {
            constraints: vec![Constraint { context: Schema::new(), value: Value::atom("true"), probability: 0.2 }],
        };
        let (j, _) = me_fit(booleans(&["G"]), &cs, FitOptions::default()).unwrap();
        assert!((j.probabilities()[0] - 0.2).abs() < 1e-12);
        assert!((j.probabilities()[1] - 0.8).abs() < 1e-12);
    }

    #[test]
    fn me_fit_rejects_contradictions() {
        let cs = ConstraintSet {
            constraints: vec![
                Constraint { context: t("A"), value: Value::atom("true"), probability: 0.2 },
                Constraint { context: t("A"), value: Value::atom("true"), probability: 0.8 },
            ],
        };
        let err = me_fit(booleans(&["A", "G"]), &cs, FitOptions { tolerance: 1e-10, max_sweeps: 200 }).unwrap_err();
        assert!(matches!(err, OracleError::NonConvergence { .. }));

        let impossible = ConstraintSet {
            constraints: vec![
                Constraint { context: t("A"), value: Value::atom("true"), probability: 1.0 },
                Constraint { context: t("A"), value: Value::atom("true"), probability: 0.0 },
            ],
        };
        let err = me_fit(booleans(&["A", "G"]), &impossible, FitOptions::default()).unwrap_err();
        assert!(matches!(err, OracleError::Inconsistent { .. }));
    }

    #[test]
    fn independence_checks() {
        // product of P(a) = 0.3 and P(b) = 0.6
        let pa = [0.3, 0.7];
        let pb = [0.6, 0.4];
        let probs: Vec<f64> = (0..4).map(|i| pa[i / 2] * pb[i % 2]).collect();
        let j = JointTable::new(booleans(&["a", "b"]), probs).unwrap();
        let r = independence_holds(&j, &["a"], &["b"], &Conditioning::default(), 1e-12).unwrap();
        assert!(r.holds);
        let correlated = JointTable::new(booleans(&["a", "b"]), vec![0.5, 0.0, 0.0, 0.5]).unwrap();
        let r = independence_holds(&correlated, &["a"], &["b"], &Conditioning::default(), 1e-12).unwrap();
        assert!(!r.holds);
        assert!((r.max_deviation - 0.25).abs() < 1e-15);
    }

    #[test]
    fn zero_slices_are_skipped() {
        let j = JointTable::new(booleans(&["c", "a", "b"]), vec![0.25, 0.25, 0.25, 0.25, 0.0, 0.0, 0.0, 0.0]).unwrap();
        let given = Conditioning { features: vec!["c".into()], event: Schema::new() };
        let r = independence_holds(&j, &["a"], &["b"], &given, 1e-12).unwrap();
        assert_eq!(r.slices_skipped, 1);
        assert_eq!(r.slices_checked, 1);
        assert!(r.holds);
    }

    #[test]
    fn rules_from_joint_examples() {
        let uniform = JointTable::<f64>::uniform(booleans(&["A", "G"])).unwrap();
        let cs = rules_from_joint(&uniform, &[t("A")]).unwrap();
        assert!(cs.constraints.iter().all(|c| (c.probability - 0.5).abs() < 1e-15));
        // G = A
        let det = JointTable::new(booleans(&["A", "G"]), vec![0.5, 0.0, 0.0, 0.5]).unwrap();
        let cs = rules_from_joint(&det, &[t("A")]).unwrap();
        assert_eq!(cs.constraints[0].probability, 1.0);
        assert_eq!(cs.constraints[1].probability, 0.0);
    }

    #[test]
    fn csv_round_trip() {
        let j = JointTable::new(booleans(&["A", "G"]), vec![0.1, 0.2, 0.3, 0.4]).unwrap();
        let mut buf = Vec::new();
        j.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("A,G,probability\ntrue,true,0.1\n"));
        let back = read_csv(buf.as_slice()).unwrap().to_f64();
        assert_eq!(back, j);
    }

    #[test]
    fn csv_fractions_and_shape_errors() {
        let text = "A,G,probability\ntrue,true,1/8\ntrue,false,1/8\nfalse,true,1/4\nfalse,false,1/2\n";
        let j = read_csv(text.as_bytes()).unwrap();
        let c = j.exact_conditional(&t("A")).unwrap();
        assert_eq!(c[0].1, BigRational::new(1.into(), 2.into()));
        let missing = "A,G,probability\ntrue,true,1/2\nfalse,false,1/2\n";
        assert!(matches!(read_csv(missing.as_bytes()), Err(OracleError::ShapeMismatch { .. })));
        let dup = "A,G,probability\ntrue,true,1/4\ntrue,true,1/4\nfalse,true,1/4\nfalse,false,1/4\n";
        assert!(matches!(read_csv(dup.as_bytes()), Err(OracleError::Csv(_))));
    }
}
