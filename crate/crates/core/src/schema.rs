//! Features, value sets and schemata.
//!
//! A [`Schema`] is a conjunction of feature specifications, each binding one
//! feature to a set of admissible values. Value sets may be internal
//! disjunctions (`wall | food`, `1..3`, a hierarchy node) but a schema can
//! never express a disjunction across features. Everything is canonicalized
//! on construction so structural equality is semantic equality.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SchemaError {
    #[error("feature `{0}` has an empty value enumeration")]
    EmptyEnumeration(String),
    #[error("feature `{feature}` lists value `{value}` more than once")]
    DuplicateValue { feature: String, value: String },
    #[error("feature `{feature}` has an empty integer domain {lo}..{hi}")]
    EmptyIntDomain { feature: String, lo: i64, hi: i64 },
    #[error("feature `{0}` is declared more than once")]
    DuplicateFeature(String),
    #[error("more than one action feature declared (`{0}` and `{1}`)")]
    MultipleActionFeatures(String, String),
    #[error("unknown feature `{0}`")]
    UnknownFeature(String),
    #[error("feature `{feature}` has no value or hierarchy node `{value}`")]
    UnknownValue { feature: String, value: String },
    #[error("hierarchy node `{node}` of feature `{feature}` shadows a value of the same name")]
    NodeShadowsValue { feature: String, node: String },
    #[error("hierarchy node `{node}` of feature `{feature}` is defined more than once")]
    DuplicateNode { feature: String, node: String },
    #[error("hierarchy node `{node}` of feature `{feature}` refers to itself")]
    CyclicNode { feature: String, node: String },
    #[error("value expression for feature `{0}` denotes no values")]
    EmptyExpansion(String),
    #[error("value `{value}` lies outside the domain of feature `{feature}`")]
    OutOfDomain { feature: String, value: String },
    #[error("`{value}` is not a valid value kind for feature `{feature}`")]
    KindMismatch { feature: String, value: String },
}

/// An atomic feature value.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Value {
    Atom(String),
    Int(i64),
}

impl Value {
    pub fn atom(s: impl Into<String>) -> Self {
        Value::Atom(s.into())
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Atom(a) => f.write_str(a),
            Value::Int(i) => write!(f, "{i}"),
        }
    }
}

/// One element of a value expression, before expansion.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum ValueItem {
    /// An atomic value or a hierarchy node.
    Name(String),
    Int(i64),
    /// Inclusive integer range; `hi = None` is unbounded.
    Range { lo: i64, hi: Option<i64> },
}

impl fmt::Display for ValueItem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ValueItem::Name(n) => f.write_str(n),
            ValueItem::Int(i) => write!(f, "{i}"),
            ValueItem::Range { lo, hi: Some(hi) } => write!(f, "{lo}..{hi}"),
            ValueItem::Range { lo, hi: None } => write!(f, "{lo}..inf"),
        }
    }
}

/// Inclusive integer interval with an optional unbounded upper end.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Interval {
    pub lo: i64,
    pub hi: Option<i64>,
}

impl Interval {
    pub fn new(lo: i64, hi: Option<i64>) -> Self {
        Interval { lo, hi }
    }

    pub fn point(v: i64) -> Self {
        Interval { lo: v, hi: Some(v) }
    }

    fn is_empty(&self) -> bool {
        matches!(self.hi, Some(hi) if hi < self.lo)
    }

    fn contains(&self, v: i64) -> bool {
        v >= self.lo && self.hi.is_none_or(|hi| v <= hi)
    }

    fn covers(&self, other: &Interval) -> bool {
        other.lo >= self.lo
            && match (self.hi, other.hi) {
                (None, _) => true,
                (Some(_), None) => false,
                (Some(a), Some(b)) => b <= a,
            }
    }

    fn intersect(&self, other: &Interval) -> Option<Interval> {
        let lo = self.lo.max(other.lo);
        let hi = match (self.hi, other.hi) {
            (None, h) | (h, None) => h,
            (Some(a), Some(b)) => Some(a.min(b)),
        };
        let iv = Interval { lo, hi };
        (!iv.is_empty()).then_some(iv)
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.hi {
            Some(hi) if hi == self.lo => write!(f, "{}", self.lo),
            Some(hi) => write!(f, "{}..{}", self.lo, hi),
            None => write!(f, "{}..inf", self.lo),
        }
    }
}

/// A canonical set of values of one feature.
///
/// Atom sets are sorted; interval sets are sorted, disjoint and maximal
/// (adjacent integer intervals are merged).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ValueSet {
    Atoms(BTreeSet<String>),
    Ints(Vec<Interval>),
}

impl ValueSet {
    pub fn atoms<I, S>(atoms: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        ValueSet::Atoms(atoms.into_iter().map(Into::into).collect())
    }

    pub fn ints(intervals: impl IntoIterator<Item = Interval>) -> Self {
        let mut ivs: Vec<Interval> = intervals.into_iter().filter(|iv| !iv.is_empty()).collect();
        ivs.sort();
        let mut merged: Vec<Interval> = Vec::with_capacity(ivs.len());
        for iv in ivs {
            match merged.last_mut() {
                Some(last) => match last.hi {
                    None => {}
                    Some(hi) if (iv.lo as i128) <= hi as i128 + 1 => {
                        last.hi = iv.hi.map(|h| h.max(hi));
                    }
                    Some(_) => merged.push(iv),
                },
                None => merged.push(iv),
            }
        }
        ValueSet::Ints(merged)
    }

    pub fn singleton(v: &Value) -> Self {
        match v {
            Value::Atom(a) => ValueSet::atoms([a.clone()]),
            Value::Int(i) => ValueSet::Ints(vec![Interval::point(*i)]),
        }
    }

    pub fn is_empty(&self) -> bool {
        match self {
            ValueSet::Atoms(a) => a.is_empty(),
            ValueSet::Ints(ivs) => ivs.is_empty(),
        }
    }

    /// Membership. Integers and their decimal spellings are interchangeable,
    /// so an enumeration of `{1, 2, 3}` contains `Value::Int(2)`.
    pub fn contains(&self, v: &Value) -> bool {
        match (self, v) {
            (ValueSet::Atoms(a), Value::Atom(x)) => a.contains(x),
            (ValueSet::Atoms(a), Value::Int(i)) => a.contains(&i.to_string()),
            (ValueSet::Ints(ivs), Value::Int(i)) => ivs.iter().any(|iv| iv.contains(*i)),
            (ValueSet::Ints(ivs), Value::Atom(x)) => {
                x.parse::<i64>().is_ok_and(|i| ivs.iter().any(|iv| iv.contains(i)))
            }
        }
    }

    pub fn is_subset(&self, other: &ValueSet) -> bool {
        match (self, other) {
            (ValueSet::Atoms(a), ValueSet::Atoms(b)) => a.is_subset(b),
            (ValueSet::Ints(a), ValueSet::Ints(b)) => {
                a.iter().all(|iv| b.iter().any(|outer| outer.covers(iv)))
            }
            _ => self.is_empty(),
        }
    }

    /// Intersection; sets of different kinds have an empty intersection.
    pub fn intersection(&self, other: &ValueSet) -> ValueSet {
        match (self, other) {
            (ValueSet::Atoms(a), ValueSet::Atoms(b)) => {
                ValueSet::Atoms(a.intersection(b).cloned().collect())
            }
            (ValueSet::Ints(a), ValueSet::Ints(b)) => ValueSet::ints(
                a.iter().flat_map(|x| b.iter().filter_map(move |y| x.intersect(y))),
            ),
            (ValueSet::Atoms(_), _) => ValueSet::Atoms(BTreeSet::new()),
            (ValueSet::Ints(_), _) => ValueSet::Ints(Vec::new()),
        }
    }

    fn union_with(&mut self, other: ValueSet) {
        match (self, other) {
            (ValueSet::Atoms(a), ValueSet::Atoms(b)) => a.extend(b),
            (this @ ValueSet::Ints(_), ValueSet::Ints(b)) => {
                let ValueSet::Ints(a) = this else { unreachable!() };
                let all: Vec<Interval> = a.iter().copied().chain(b).collect();
                *this = ValueSet::ints(all);
            }
            _ => {}
        }
    }

    /// The single value of a singleton set.
    pub fn as_singleton(&self) -> Option<Value> {
        match self {
            ValueSet::Atoms(a) if a.len() == 1 => a.iter().next().map(|s| Value::Atom(s.clone())),
            ValueSet::Ints(ivs) if ivs.len() == 1 && ivs[0].hi == Some(ivs[0].lo) => {
                Some(Value::Int(ivs[0].lo))
            }
            _ => None,
        }
    }
}

impl fmt::Display for ValueSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = match self {
            ValueSet::Atoms(a) => a.iter().cloned().collect(),
            ValueSet::Ints(ivs) => ivs.iter().map(ToString::to_string).collect(),
        };
        f.write_str(&parts.join("|"))
    }
}

/// The values a feature can take.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Domain {
    /// Finite enumeration, in declaration order.
    Enum(Vec<String>),
    /// Integers in `lo..=hi`; `hi = None` is unbounded.
    Int { lo: i64, hi: Option<i64> },
}

impl Domain {
    pub fn full_set(&self) -> ValueSet {
        match self {
            Domain::Enum(vals) => ValueSet::atoms(vals.iter().cloned()),
            Domain::Int { lo, hi } => ValueSet::ints([Interval::new(*lo, *hi)]),
        }
    }

    /// Values in domain order, or `None` for an unbounded integer domain.
    pub fn values(&self) -> Option<Vec<Value>> {
        match self {
            Domain::Enum(vals) => Some(vals.iter().map(|v| Value::Atom(v.clone())).collect()),
            Domain::Int { lo, hi: Some(hi) } => Some((*lo..=*hi).map(Value::Int).collect()),
            Domain::Int { hi: None, .. } => None,
        }
    }

    /// Canonical spelling of `v` in this domain, if it belongs to it.
    pub fn normalize(&self, v: &Value) -> Option<Value> {
        match (self, v) {
            (Domain::Enum(vals), Value::Atom(a)) => vals.contains(a).then(|| v.clone()),
            (Domain::Enum(vals), Value::Int(i)) => {
                let s = i.to_string();
                vals.contains(&s).then_some(Value::Atom(s))
            }
            (Domain::Int { lo, hi }, Value::Int(i)) => {
                Interval::new(*lo, *hi).contains(*i).then(|| v.clone())
            }
            (Domain::Int { .. }, Value::Atom(a)) => {
                a.parse::<i64>().ok().and_then(|i| self.normalize(&Value::Int(i)))
            }
        }
    }

    /// Position of a value in domain order, used for deterministic sorting.
    pub fn rank(&self, v: &Value) -> Option<i128> {
        match (self, self.normalize(v)?) {
            (Domain::Enum(vals), Value::Atom(a)) => vals.iter().position(|x| *x == a).map(|p| p as i128),
            (Domain::Int { .. }, Value::Int(i)) => Some(i as i128),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FeatureKind {
    World,
    Action,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FeatureDef {
    pub name: String,
    pub domain: Domain,
    pub kind: FeatureKind,
}

impl FeatureDef {
    pub fn new(name: impl Into<String>, domain: Domain, kind: FeatureKind) -> Result<Self, SchemaError> {
        let name = name.into();
        match &domain {
            Domain::Enum(vals) => {
                if vals.is_empty() {
                    return Err(SchemaError::EmptyEnumeration(name));
                }
                let mut seen = BTreeSet::new();
                for v in vals {
                    if !seen.insert(v) {
                        return Err(SchemaError::DuplicateValue { feature: name, value: v.clone() });
                    }
                }
            }
            Domain::Int { lo, hi: Some(hi) } if hi < lo => {
                return Err(SchemaError::EmptyIntDomain { feature: name, lo: *lo, hi: *hi });
            }
            Domain::Int { .. } => {}
        }
        Ok(FeatureDef { name, domain, kind })
    }

    pub fn boolean(name: impl Into<String>) -> Self {
        FeatureDef {
            name: name.into(),
            domain: Domain::Enum(vec!["true".into(), "false".into()]),
            kind: FeatureKind::World,
        }
    }
}

/// Named internal nodes per feature, each a list of values, ranges or
/// other nodes.
pub type ValueHierarchy = BTreeMap<String, BTreeMap<String, Vec<ValueItem>>>;

/// Whether a schema is a rule's conditioning context or a query situation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Role {
    Context,
    Situation,
}

/// Feature declarations plus value hierarchies: the vocabulary schemata are
/// written in.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FeatureSet {
    defs: Vec<FeatureDef>,
    hierarchy: ValueHierarchy,
}

impl FeatureSet {
    pub fn new(defs: Vec<FeatureDef>, hierarchy: ValueHierarchy) -> Result<Self, SchemaError> {
        let mut names = BTreeSet::new();
        let mut action: Option<&str> = None;
        for d in &defs {
            if !names.insert(d.name.as_str()) {
                return Err(SchemaError::DuplicateFeature(d.name.clone()));
            }
            if d.kind == FeatureKind::Action {
                if let Some(first) = action {
                    return Err(SchemaError::MultipleActionFeatures(first.into(), d.name.clone()));
                }
                action = Some(&d.name);
            }
        }
        let set = FeatureSet { defs, hierarchy };
        for (feature, nodes) in &set.hierarchy {
            let def = set.get(feature).ok_or_else(|| SchemaError::UnknownFeature(feature.clone()))?;
            for node in nodes.keys() {
                if let Domain::Enum(vals) = &def.domain {
                    if vals.contains(node) {
                        return Err(SchemaError::NodeShadowsValue {
                            feature: feature.clone(),
                            node: node.clone(),
                        });
                    }
                }
                set.expand(feature, &[ValueItem::Name(node.clone())])?;
            }
        }
        Ok(set)
    }

    pub fn defs(&self) -> &[FeatureDef] {
        &self.defs
    }

    pub fn hierarchy(&self) -> &ValueHierarchy {
        &self.hierarchy
    }

    pub fn get(&self, name: &str) -> Option<&FeatureDef> {
        self.defs.iter().find(|d| d.name == name)
    }

    pub fn action_feature(&self) -> Option<&FeatureDef> {
        self.defs.iter().find(|d| d.kind == FeatureKind::Action)
    }

    /// Expands a value expression for `feature` into its canonical value set.
    pub fn expand(&self, feature: &str, expr: &[ValueItem]) -> Result<ValueSet, SchemaError> {
        let def = self.get(feature).ok_or_else(|| SchemaError::UnknownFeature(feature.into()))?;
        let mut stack = Vec::new();
        let set = self.expand_items(def, expr, &mut stack)?;
        if set.is_empty() {
            return Err(SchemaError::EmptyExpansion(feature.into()));
        }
        Ok(set)
    }

    fn expand_items(
        &self,
        def: &FeatureDef,
        items: &[ValueItem],
        stack: &mut Vec<String>,
    ) -> Result<ValueSet, SchemaError> {
        let mut acc = match def.domain {
            Domain::Enum(_) => ValueSet::Atoms(BTreeSet::new()),
            Domain::Int { .. } => ValueSet::Ints(Vec::new()),
        };
        for item in items {
            let part = match (&def.domain, item) {
                (Domain::Enum(vals), ValueItem::Name(n)) if vals.contains(n) => ValueSet::atoms([n.clone()]),
                (Domain::Enum(vals), ValueItem::Int(i)) if vals.contains(&i.to_string()) => {
                    ValueSet::atoms([i.to_string()])
                }
                (Domain::Enum(_), ValueItem::Range { .. }) => {
                    return Err(SchemaError::KindMismatch {
                        feature: def.name.clone(),
                        value: item.to_string(),
                    })
                }
                (Domain::Int { lo, hi }, ValueItem::Int(i)) => {
                    if !Interval::new(*lo, *hi).contains(*i) {
                        return Err(SchemaError::OutOfDomain { feature: def.name.clone(), value: i.to_string() });
                    }
                    ValueSet::ints([Interval::point(*i)])
                }
                (Domain::Int { lo, hi }, ValueItem::Range { lo: a, hi: b }) => {
                    let iv = Interval::new(*a, *b);
                    if iv.is_empty() {
                        return Err(SchemaError::EmptyExpansion(def.name.clone()));
                    }
                    if !Interval::new(*lo, *hi).covers(&iv) {
                        return Err(SchemaError::OutOfDomain { feature: def.name.clone(), value: iv.to_string() });
                    }
                    ValueSet::ints([iv])
                }
                (_, ValueItem::Name(n)) => self.expand_node(def, n, stack)?,
                (Domain::Enum(_), ValueItem::Int(i)) => self.expand_node(def, &i.to_string(), stack)?,
            };
            acc.union_with(part);
        }
        Ok(acc)
    }

    fn expand_node(&self, def: &FeatureDef, node: &str, stack: &mut Vec<String>) -> Result<ValueSet, SchemaError> {
        let items = self
            .hierarchy
            .get(&def.name)
            .and_then(|nodes| nodes.get(node))
            .ok_or_else(|| SchemaError::UnknownValue { feature: def.name.clone(), value: node.into() })?;
        if stack.iter().any(|n| n == node) {
            return Err(SchemaError::CyclicNode { feature: def.name.clone(), node: node.into() });
        }
        stack.push(node.to_string());
        let set = self.expand_items(def, items, stack)?;
        stack.pop();
        if set.is_empty() {
            return Err(SchemaError::EmptyExpansion(def.name.clone()));
        }
        Ok(set)
    }

    /// Checks that every binding names a declared feature and is a non-empty
    /// subset of its domain.
    pub fn check_schema(&self, schema: &Schema) -> Result<(), SchemaError> {
        for (name, set) in schema.bindings() {
            let def = self.get(name).ok_or_else(|| SchemaError::UnknownFeature(name.clone()))?;
            if set.is_empty() {
                return Err(SchemaError::EmptyExpansion(name.clone()));
            }
            if !set.is_subset(&def.domain.full_set()) {
                return Err(SchemaError::OutOfDomain { feature: name.clone(), value: set.to_string() });
            }
        }
        Ok(())
    }

    /// Drops bindings that allow the whole domain; they carry no
    /// information and would otherwise defeat syntactic implication.
    pub fn canonicalize(&self, schema: &Schema) -> Schema {
        let mut out = Schema::new();
        for (name, set) in schema.bindings() {
            let full = self.get(name).is_some_and(|d| d.domain.full_set().is_subset(set));
            if !full {
                out.bind(name.clone(), set.clone());
            }
        }
        out
    }

    /// Shared features of a list of schemata, where a situation that leaves
    /// the action feature unbound implicitly allows every action.
    pub fn shared_features(&self, schemata: &[(&Schema, Role)]) -> Schema {
        let action = self.action_feature().map(|d| (d.name.as_str(), d.domain.full_set()));
        shared_with(schemata, action.as_ref().map(|(n, s)| (*n, s)))
    }
}

/// A conjunction of feature specifications. Features that are not bound are
/// unconstrained by a context and unknown in a situation.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Schema {
    bindings: BTreeMap<String, ValueSet>,
}

impl Schema {
    pub fn new() -> Self {
        Schema::default()
    }

    /// Builder-style binding; replaces any previous binding of the feature.
    pub fn with(mut self, feature: impl Into<String>, set: ValueSet) -> Self {
        self.bind(feature, set);
        self
    }

    /// Binds a feature to a single value.
    pub fn with_value(self, feature: impl Into<String>, v: Value) -> Self {
        let set = ValueSet::singleton(&v);
        self.with(feature, set)
    }

    pub fn bind(&mut self, feature: impl Into<String>, set: ValueSet) {
        self.bindings.insert(feature.into(), set);
    }

    pub fn get(&self, feature: &str) -> Option<&ValueSet> {
        self.bindings.get(feature)
    }

    pub fn bindings(&self) -> &BTreeMap<String, ValueSet> {
        &self.bindings
    }

    pub fn features(&self) -> impl Iterator<Item = &str> {
        self.bindings.keys().map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.bindings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bindings.is_empty()
    }

    /// `self → other`: every feature `other` constrains is constrained by
    /// `self` to a subset.
    pub fn implies(&self, other: &Schema) -> bool {
        other
            .bindings
            .iter()
            .all(|(f, set)| self.bindings.get(f).is_some_and(|mine| mine.is_subset(set)))
    }

    /// Strictly more specific: implies but is not equal.
    pub fn more_specific_than(&self, other: &Schema) -> bool {
        self != other && self.implies(other)
    }

    /// Whether a situation satisfies a conditioning context. A context that
    /// constrains a feature the situation leaves unknown is not satisfied.
    pub fn satisfies(&self, context: &Schema) -> bool {
        self.implies(context)
    }

    /// The sub-schema restricted to the given features.
    pub fn restrict<'a>(&self, features: impl IntoIterator<Item = &'a str>) -> Schema {
        let mut out = Schema::new();
        for f in features {
            if let Some(set) = self.bindings.get(f) {
                out.bind(f, set.clone());
            }
        }
        out
    }
}

impl fmt::Display for Schema {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.bindings.is_empty() {
            return f.write_str("(empty)");
        }
        let parts: Vec<String> = self.bindings.iter().map(|(k, v)| format!("{k}={v}")).collect();
        f.write_str(&parts.join(", "))
    }
}

/// Features present in every schema whose value sets intersect, bound to the
/// intersection. No feature is implicit here; see
/// [`FeatureSet::shared_features`] for the situation form.
pub fn shared_features(schemata: &[&Schema]) -> Schema {
    let tagged: Vec<(&Schema, Role)> = schemata.iter().map(|s| (*s, Role::Context)).collect();
    shared_with(&tagged, None)
}

fn shared_with(schemata: &[(&Schema, Role)], action: Option<(&str, &ValueSet)>) -> Schema {
    let mut out = Schema::new();
    let candidates: BTreeSet<&str> = schemata.iter().flat_map(|(s, _)| s.features()).collect();
    'features: for f in candidates {
        let mut acc: Option<ValueSet> = None;
        for (s, role) in schemata {
            let set = match (s.get(f), action) {
                (Some(set), _) => set,
                (None, Some((name, full))) if *role == Role::Situation && name == f => full,
                (None, _) => continue 'features,
            };
            acc = Some(match acc {
                None => set.clone(),
                Some(a) => a.intersection(set),
            });
        }
        if let Some(set) = acc.filter(|s| !s.is_empty()) {
            out.bind(f, set);
        }
    }
    out
}
