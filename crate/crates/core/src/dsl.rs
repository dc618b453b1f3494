//! The theory file language.
//!
//! ```text
//! # comments run to end of line
//! feature A values { true, false }
//! feature age values int 0..inf
//! action feature action values { munch, sleep }
//! hierarchy colour: warm = { red, orange }
//! target G
//! rule r1 { A = true, age = 18..64 | 70 } -> { true: 1/2, false: 0.5 }
//! rule -> { true: 1/5, false: 4/5 }
//! ```
//!
//! Distribution entries may also be written `G: true @ 1/2`, naming the
//! target explicitly. Rules without an id get `r1`, `r2`, ... by position.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_rational::BigRational;
use thiserror::Error;

use crate::arith::{parse_rational, render_rational, Probability};
use crate::schema::{Domain, FeatureDef, FeatureKind, FeatureSet, Schema, SchemaError, Value, ValueItem};
use crate::theory::{PredictiveTheory, Rule, TheoryError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Span {
    pub line: usize,
    pub col: usize,
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Number(String),
    LBrace,
    RBrace,
    Comma,
    Colon,
    Eq,
    Arrow,
    DotDot,
    Pipe,
    Slash,
    At,
    Star,
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Number(s) => format!("number `{s}`"),
            Tok::Eof => "end of input".into(),
            other => format!("`{}`", other.symbol()),
        }
    }

    fn symbol(&self) -> &'static str {
        match self {
            Tok::LBrace => "{",
            Tok::RBrace => "}",
            Tok::Comma => ",",
            Tok::Colon => ":",
            Tok::Eq => "=",
            Tok::Arrow => "->",
            Tok::DotDot => "..",
            Tok::Pipe => "|",
            Tok::Slash => "/",
            Tok::At => "@",
            Tok::Star => "*",
            Tok::Ident(_) => "identifier",
            Tok::Number(_) => "number",
            Tok::Eof => "end of input",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{col}: syntax error: expected {}, found {found}", expected.join(" or "))]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub expected: Vec<String>,
    pub found: String,
}

impl ParseError {
    pub fn span(&self) -> Span {
        Span { line: self.line, col: self.col }
    }
}

fn lex(text: &str) -> Result<Vec<(Tok, Span)>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0, 1, 1);
    let ident_start = |c: char| c.is_alphabetic() || c == '_';
    let ident_char = |c: char| c.is_alphanumeric() || c == '_';
    while i < chars.len() {
        let c = chars[i];
        let span = Span { line, col };
        let peek = |k: usize| chars.get(i + k).copied();
        let (tok, len) = match c {
            '\n' => {
                i += 1;
                line += 1;
                col = 1;
                continue;
            }
            c if c.is_whitespace() => {
                i += 1;
                col += 1;
                continue;
            }
            '#' => {
                while i < chars.len() && chars[i] != '\n' {
                    i += 1;
                }
                continue;
            }
            '{' => (Tok::LBrace, 1),
            '}' => (Tok::RBrace, 1),
            ',' => (Tok::Comma, 1),
            ':' => (Tok::Colon, 1),
            '=' => (Tok::Eq, 1),
            '|' => (Tok::Pipe, 1),
            '/' => (Tok::Slash, 1),
            '@' => (Tok::At, 1),
            '*' => (Tok::Star, 1),
            '-' if peek(1) == Some('>') => (Tok::Arrow, 2),
            '.' if peek(1) == Some('.') => (Tok::DotDot, 2),
            c if c.is_ascii_digit()
                || (c == '-' && peek(1).is_some_and(|d| d.is_ascii_digit() || d == '.'))
                || (c == '.' && peek(1).is_some_and(|d| d.is_ascii_digit())) =>
            {
                let mut j = i + 1;
                while j < chars.len() && chars[j].is_ascii_digit() {
                    j += 1;
                }
                if chars.get(j) == Some(&'.') && chars.get(j + 1).is_some_and(|d| d.is_ascii_digit()) {
                    j += 1;
                    while j < chars.len() && chars[j].is_ascii_digit() {
                        j += 1;
                    }
                }
                let s: String = chars[i..j].iter().collect();
                if s == "-" || s == "-." {
                    return Err(ParseError {
                        line,
                        col,
                        expected: vec!["number".into()],
                        found: format!("`{s}`"),
                    });
                }
                (Tok::Number(s), j - i)
            }
            c if ident_start(c) => {
                let mut j = i + 1;
                while j < chars.len()
                    && (ident_char(chars[j]) || (chars[j] == '-' && chars.get(j + 1).is_some_and(|&d| ident_char(d))))
                {
                    j += 1;
                }
                (Tok::Ident(chars[i..j].iter().collect()), j - i)
            }
            other => {
                return Err(ParseError {
                    line,
                    col,
                    expected: vec!["a token".into()],
                    found: format!("`{other}`"),
                })
            }
        };
        out.push((tok, span));
        i += len;
        col += len;
    }
    out.push((Tok::Eof, Span { line, col }));
    Ok(out)
}

/// A parsed theory file. Spans are kept alongside the items and are not
/// part of equality.
#[derive(Debug, Clone, Default)]
pub struct TheoryDocument {
    pub items: Vec<Item>,
    pub spans: Vec<Span>,
}

impl PartialEq for TheoryDocument {
    fn eq(&self, other: &Self) -> bool {
        self.items == other.items
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Item {
    Feature(FeatureDecl),
    Hierarchy(HierarchyDecl),
    Target(String),
    Rule(RuleDecl),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FeatureDecl {
    pub name: String,
    pub action: bool,
    pub domain: DomainDecl,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DomainDecl {
    Values(Vec<String>),
    Int { lo: i64, hi: Option<i64> },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HierarchyDecl {
    pub feature: String,
    pub node: String,
    pub members: Vec<ValueItem>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RuleDecl {
    pub id: Option<String>,
    /// `None` when the braces were omitted.
    pub context: Option<Vec<Binding>>,
    pub distribution: Vec<DistEntry>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Binding {
    pub feature: String,
    pub expr: Vec<ValueItem>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DistEntry {
    /// Set for the `feature: value @ p` spelling.
    pub feature: Option<String>,
    pub value: Value,
    pub prob: ProbLiteral,
}

/// A probability literal with its original spelling.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProbLiteral {
    pub text: String,
    pub value: BigRational,
}

struct Parser {
    toks: Vec<(Tok, Span)>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn peek_at(&self, k: usize) -> &Tok {
        &self.toks[(self.pos + k).min(self.toks.len() - 1)].0
    }

    fn span(&self) -> Span {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error(&self, expected: &[&str]) -> ParseError {
        let Span { line, col } = self.span();
        ParseError { line, col, expected: expected.iter().map(|s| s.to_string()).collect(), found: self.peek().describe() }
    }

    fn expect(&mut self, tok: Tok) -> Result<(), ParseError> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            Err(self.error(&[&format!("`{}`", tok.symbol())]))
        }
    }

    fn keyword(&mut self, kw: &str) -> Result<(), ParseError> {
        match self.peek() {
            Tok::Ident(s) if s == kw => {
                self.bump();
                Ok(())
            }
            _ => Err(self.error(&[&format!("`{kw}`")])),
        }
    }

    fn ident(&mut self, what: &str) -> Result<String, ParseError> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                self.bump();
                Ok(s)
            }
            _ => Err(self.error(&[what])),
        }
    }

    fn int(&mut self) -> Result<i64, ParseError> {
        match self.peek().clone() {
            Tok::Number(s) => match s.parse() {
                Ok(i) => {
                    self.bump();
                    Ok(i)
                }
                Err(_) => Err(self.error(&["integer"])),
            },
            _ => Err(self.error(&["integer"])),
        }
    }

    fn document(&mut self) -> Result<TheoryDocument, ParseError> {
        let mut doc = TheoryDocument::default();
        loop {
            let span = self.span();
            let item = match self.peek() {
                Tok::Eof => return Ok(doc),
                Tok::Ident(s) => match s.as_str() {
                    "feature" => Item::Feature(self.feature(false)?),
                    "action" if self.peek_at(1) == &Tok::Ident("feature".into()) => {
                        self.bump();
                        Item::Feature(self.feature(true)?)
                    }
                    "hierarchy" => Item::Hierarchy(self.hierarchy()?),
                    "target" => {
                        self.bump();
                        Item::Target(self.ident("feature name")?)
                    }
                    "rule" => Item::Rule(self.rule()?),
                    _ => return Err(self.error(&["`feature`", "`action`", "`hierarchy`", "`target`", "`rule`"])),
                },
                _ => return Err(self.error(&["`feature`", "`action`", "`hierarchy`", "`target`", "`rule`"])),
            };
            doc.items.push(item);
            doc.spans.push(span);
        }
    }

    fn feature(&mut self, action: bool) -> Result<FeatureDecl, ParseError> {
        self.keyword("feature")?;
        let name = self.ident("feature name")?;
        self.keyword("values")?;
        let domain = match self.peek() {
            Tok::LBrace => {
                self.bump();
                let mut values = vec![self.atom()?];
                while *self.peek() == Tok::Comma {
                    self.bump();
                    values.push(self.atom()?);
                }
                self.expect(Tok::RBrace)?;
                DomainDecl::Values(values)
            }
            Tok::Ident(s) if s == "int" => {
                self.bump();
                let lo = self.int()?;
                self.expect(Tok::DotDot)?;
                let hi = self.upper_bound()?;
                DomainDecl::Int { lo, hi }
            }
            _ => return Err(self.error(&["`{`", "`int`"])),
        };
        Ok(FeatureDecl { name, action, domain })
    }

    fn upper_bound(&mut self) -> Result<Option<i64>, ParseError> {
        match self.peek() {
            Tok::Ident(s) if s == "inf" => {
                self.bump();
                Ok(None)
            }
            Tok::Number(_) => self.int().map(Some),
            _ => Err(self.error(&["integer", "`inf`"])),
        }
    }

    fn atom(&mut self) -> Result<String, ParseError> {
        match self.peek().clone() {
            Tok::Ident(s) | Tok::Number(s) => {
                self.bump();
                Ok(s)
            }
            _ => Err(self.error(&["value"])),
        }
    }

    fn hierarchy(&mut self) -> Result<HierarchyDecl, ParseError> {
        self.keyword("hierarchy")?;
        let feature = self.ident("feature name")?;
        self.expect(Tok::Colon)?;
        let node = self.ident("node name")?;
        self.expect(Tok::Eq)?;
        self.expect(Tok::LBrace)?;
        let mut members = vec![self.value_item()?];
        while *self.peek() == Tok::Comma {
            self.bump();
            members.push(self.value_item()?);
        }
        self.expect(Tok::RBrace)?;
        Ok(HierarchyDecl { feature, node, members })
    }

    fn value_item(&mut self) -> Result<ValueItem, ParseError> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                self.bump();
                Ok(ValueItem::Name(s))
            }
            Tok::Number(s) => {
                let Ok(lo) = s.parse::<i64>() else {
                    self.bump();
                    return Ok(ValueItem::Name(s));
                };
                self.bump();
                if *self.peek() == Tok::DotDot {
                    self.bump();
                    let hi = self.upper_bound()?;
                    Ok(ValueItem::Range { lo, hi })
                } else {
                    Ok(ValueItem::Int(lo))
                }
            }
            _ => Err(self.error(&["value", "node", "interval"])),
        }
    }

    fn value_expr(&mut self) -> Result<Vec<ValueItem>, ParseError> {
        let mut items = vec![self.value_item()?];
        while *self.peek() == Tok::Pipe {
            self.bump();
            items.push(self.value_item()?);
        }
        Ok(items)
    }

    fn rule(&mut self) -> Result<RuleDecl, ParseError> {
        self.keyword("rule")?;
        let id = match self.peek() {
            Tok::Ident(_) => Some(self.ident("rule id")?),
            _ => None,
        };
        let context = match self.peek() {
            Tok::LBrace => {
                self.bump();
                let mut bindings = Vec::new();
                if *self.peek() != Tok::RBrace {
                    bindings.push(self.binding()?);
                    while *self.peek() == Tok::Comma {
                        self.bump();
                        bindings.push(self.binding()?);
                    }
                }
                self.expect(Tok::RBrace)?;
                Some(bindings)
            }
            Tok::Arrow => None,
            _ if id.is_none() => return Err(self.error(&["rule id", "`{`", "`->`"])),
            _ => return Err(self.error(&["`{`", "`->`"])),
        };
        self.expect(Tok::Arrow)?;
        self.expect(Tok::LBrace)?;
        let mut distribution = vec![self.entry()?];
        while *self.peek() == Tok::Comma {
            self.bump();
            distribution.push(self.entry()?);
        }
        self.expect(Tok::RBrace)?;
        Ok(RuleDecl { id, context, distribution })
    }

    fn binding(&mut self) -> Result<Binding, ParseError> {
        let feature = self.ident("feature name")?;
        self.expect(Tok::Eq)?;
        Ok(Binding { feature, expr: self.value_expr()? })
    }

    fn entry(&mut self) -> Result<DistEntry, ParseError> {
        let first = self.atom()?;
        self.expect(Tok::Colon)?;
        if matches!(self.peek(), Tok::Ident(_)) || matches!(self.peek_at(1), Tok::At) {
            let value = value_of(&self.atom()?);
            self.expect(Tok::At)?;
            return Ok(DistEntry { feature: Some(first), value, prob: self.prob()? });
        }
        Ok(DistEntry { feature: None, value: value_of(&first), prob: self.prob()? })
    }

    fn prob(&mut self) -> Result<ProbLiteral, ParseError> {
        let Tok::Number(n) = self.peek().clone() else {
            return Err(self.error(&["probability"]));
        };
        let start = self.span();
        self.bump();
        let text = if *self.peek() == Tok::Slash {
            self.bump();
            let Tok::Number(d) = self.peek().clone() else {
                return Err(self.error(&["denominator"]));
            };
            self.bump();
            format!("{n}/{d}")
        } else {
            n
        };
        let value = parse_rational(&text).ok_or_else(|| ParseError {
            line: start.line,
            col: start.col,
            expected: vec!["probability".into()],
            found: format!("`{text}`"),
        })?;
        Ok(ProbLiteral { text, value })
    }
}

fn value_of(s: &str) -> Value {
    s.parse::<i64>().map(Value::Int).unwrap_or_else(|_| Value::atom(s))
}

pub fn parse_theory(text: &str) -> Result<TheoryDocument, ParseError> {
    Parser { toks: lex(text)?, pos: 0 }.document()
}

fn join<T>(items: &[T], sep: &str, f: impl Fn(&T) -> String) -> String {
    items.iter().map(f).collect::<Vec<_>>().join(sep)
}

/// Renders a document with one declaration per line.
pub fn print_theory(doc: &TheoryDocument) -> String {
    let mut out = String::new();
    for item in &doc.items {
        let line = match item {
            Item::Feature(f) => {
                let domain = match &f.domain {
                    DomainDecl::Values(vs) => format!("{{ {} }}", vs.join(", ")),
                    DomainDecl::Int { lo, hi: Some(hi) } => format!("int {lo}..{hi}"),
                    DomainDecl::Int { lo, hi: None } => format!("int {lo}..inf"),
                };
                format!("{}feature {} values {}", if f.action { "action " } else { "" }, f.name, domain)
            }
            Item::Hierarchy(h) => {
                format!("hierarchy {}: {} = {{ {} }}", h.feature, h.node, join(&h.members, ", ", |m| m.to_string()))
            }
            Item::Target(t) => format!("target {t}"),
            Item::Rule(r) => {
                let mut s = String::from("rule");
                if let Some(id) = &r.id {
                    s.push(' ');
                    s.push_str(id);
                }
                match &r.context {
                    Some(b) if b.is_empty() => s.push_str(" { }"),
                    Some(b) => {
                        let body = join(b, ", ", |b| format!("{} = {}", b.feature, join(&b.expr, " | ", |i| i.to_string())));
                        s.push_str(&format!(" {{ {body} }}"));
                    }
                    None => {}
                }
                let dist = join(&r.distribution, ", ", |e| match &e.feature {
                    Some(f) => format!("{f}: {} @ {}", e.value, e.prob.text),
                    None => format!("{}: {}", e.value, e.prob.text),
                });
                format!("{s} -> {{ {dist} }}")
            }
        };
        out.push_str(&line);
        out.push('\n');
    }
    out
}

/// A semantic error found while turning a document into a theory.
#[derive(Debug, Clone, PartialEq, Error)]
#[error("{span}: {message}")]
pub struct BuildError {
    pub span: Span,
    pub message: String,
}

/// Builds the feature set and rules a document declares and validates them
/// into a [`PredictiveTheory`].
pub fn build_theory(doc: &TheoryDocument) -> Result<PredictiveTheory, BuildError> {
    let at = |i: usize, message: String| BuildError {
        span: doc.spans.get(i).copied().unwrap_or(Span { line: 1, col: 1 }),
        message,
    };
    let end = doc.spans.len().saturating_sub(1);

    let mut defs = Vec::new();
    let mut hierarchy: BTreeMap<String, BTreeMap<String, Vec<ValueItem>>> = BTreeMap::new();
    for (i, item) in doc.items.iter().enumerate() {
        match item {
            Item::Feature(f) => {
                let domain = match &f.domain {
                    DomainDecl::Values(vs) => Domain::Enum(vs.clone()),
                    DomainDecl::Int { lo, hi } => Domain::Int { lo: *lo, hi: *hi },
                };
                let kind = if f.action { FeatureKind::Action } else { FeatureKind::World };
                defs.push(FeatureDef::new(f.name.clone(), domain, kind).map_err(|e| at(i, e.to_string()))?);
                FeatureSet::new(defs.clone(), BTreeMap::new()).map_err(|e| at(i, e.to_string()))?;
            }
            Item::Hierarchy(h) => {
                let nodes = hierarchy.entry(h.feature.clone()).or_default();
                if nodes.insert(h.node.clone(), h.members.clone()).is_some() {
                    return Err(at(i, SchemaError::DuplicateNode { feature: h.feature.clone(), node: h.node.clone() }.to_string()));
                }
            }
            _ => {}
        }
    }
    let features = FeatureSet::new(defs, hierarchy).map_err(|e| {
        let culprit = doc.items.iter().rposition(|it| matches!(it, Item::Hierarchy(_))).unwrap_or(end);
        at(culprit, e.to_string())
    })?;

    let mut target: Option<(usize, &str)> = None;
    for (i, item) in doc.items.iter().enumerate() {
        if let Item::Target(t) = item {
            if target.is_some() {
                return Err(at(i, "target declared more than once".into()));
            }
            if features.get(t).is_none() {
                return Err(at(i, TheoryError::UnknownTarget(t.clone()).to_string()));
            }
            target = Some((i, t));
        }
    }
    let Some((_, target)) = target else {
        return Err(at(end, "no target declaration".into()));
    };

    let explicit: BTreeSet<&str> = doc
        .items
        .iter()
        .filter_map(|it| match it {
            Item::Rule(RuleDecl { id: Some(id), .. }) => Some(id.as_str()),
            _ => None,
        })
        .collect();
    let mut next_auto = 0;
    let mut rules = Vec::new();
    let mut rule_items = Vec::new();
    for (i, item) in doc.items.iter().enumerate() {
        let Item::Rule(r) = item else { continue };
        let name = match &r.id {
            Some(id) => id.clone(),
            None => loop {
                next_auto += 1;
                let candidate = format!("r{next_auto}");
                if !explicit.contains(candidate.as_str()) {
                    break candidate;
                }
            },
        };
        let mut context = Schema::new();
        for b in r.context.iter().flatten() {
            if context.get(&b.feature).is_some() {
                return Err(at(i, format!("rule `{name}` binds `{}` twice", b.feature)));
            }
            let set = features.expand(&b.feature, &b.expr).map_err(|e| at(i, format!("rule `{name}`: {e}")))?;
            context.bind(b.feature.clone(), set);
        }
        let mut distribution = Vec::new();
        for e in &r.distribution {
            if let Some(f) = &e.feature {
                if f != target {
                    return Err(at(i, format!("rule `{name}`: distribution names `{f}`, but the target is `{target}`")));
                }
            }
            distribution.push((e.value.clone(), Probability::Exact(e.prob.value.clone())));
        }
        rules.push(Rule::new(name, context, distribution));
        rule_items.push(i);
    }

    PredictiveTheory::build(features, target, rules.clone()).map_err(|e| {
        let culprit = rule_name_of(&e)
            .and_then(|n| rules.iter().position(|r| r.name == n))
            .map(|k| rule_items[k])
            .unwrap_or(end);
        at(culprit, e.to_string())
    })
}

fn rule_name_of(e: &TheoryError) -> Option<&str> {
    match e {
        TheoryError::DuplicateContext { second: rule, .. }
        | TheoryError::TargetInContext { rule, .. }
        | TheoryError::Context { rule, .. }
        | TheoryError::EmptyDistribution { rule }
        | TheoryError::TargetValueOutOfDomain { rule, .. }
        | TheoryError::DuplicateTargetValue { rule, .. }
        | TheoryError::ProbabilityOutOfRange { rule, .. }
        | TheoryError::BadSum { rule, .. }
        | TheoryError::DuplicateRuleName(rule) => Some(rule),
        TheoryError::NoRules | TheoryError::UnknownTarget(_) | TheoryError::MissingDefault => None,
    }
}

/// Either stage of loading a theory file.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum LoadError {
    #[error("{0}")]
    Parse(#[from] ParseError),
    #[error("{0}")]
    Build(#[from] BuildError),
}

impl LoadError {
    pub fn span(&self) -> Span {
        match self {
            LoadError::Parse(e) => e.span(),
            LoadError::Build(e) => e.span,
        }
    }
}

pub fn load_theory(text: &str) -> Result<PredictiveTheory, LoadError> {
    Ok(build_theory(&parse_theory(text)?)?)
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SituationError {
    #[error("situation, column {col}: expected {expected}, found {found}")]
    Syntax { col: usize, expected: String, found: String },
    #[error("situation binds `{0}` more than once")]
    DuplicateBinding(String),
    #[error("situation binds the target feature `{0}`")]
    TargetBound(String),
    #[error("situation: {0}")]
    Schema(#[from] SchemaError),
}

/// Parses `feature=value, feature=a|b, feature=*`. Unmentioned features and
/// `*` are unknown.
pub fn parse_situation(theory: &PredictiveTheory, text: &str) -> Result<Schema, SituationError> {
    let syntax = |e: ParseError| SituationError::Syntax { col: e.col, expected: e.expected.join(" or "), found: e.found };
    let mut p = Parser { toks: lex(text).map_err(syntax)?, pos: 0 };
    let mut schema = Schema::new();
    let mut seen = BTreeSet::new();
    if *p.peek() == Tok::Eof {
        return Ok(schema);
    }
    loop {
        let feature = p.ident("feature name").map_err(syntax)?;
        p.expect(Tok::Eq).map_err(syntax)?;
        if !seen.insert(feature.clone()) {
            return Err(SituationError::DuplicateBinding(feature));
        }
        if feature == theory.target() {
            return Err(SituationError::TargetBound(feature));
        }
        if theory.features().get(&feature).is_none() {
            return Err(SchemaError::UnknownFeature(feature).into());
        }
        if *p.peek() == Tok::Star {
            p.bump();
        } else {
            let expr = p.value_expr().map_err(syntax)?;
            schema.bind(feature.clone(), theory.features().expand(&feature, &expr)?);
        }
        match p.peek() {
            Tok::Eof => return Ok(theory.features().canonicalize(&schema)),
            Tok::Comma => {
                p.bump();
            }
            _ => return Err(syntax(p.error(&["`,`", "end of input"]))),
        }
    }
}

/// A situation in the syntax [`parse_situation`] reads.
pub fn render_situation(s: &Schema) -> String {
    s.bindings().iter().map(|(k, v)| format!("{k}={v}")).collect::<Vec<_>>().join(",")
}

/// Renders an exact probability as a literal.
pub fn prob_literal(r: &BigRational) -> ProbLiteral {
    ProbLiteral { text: render_rational(r), value: r.clone() }
}
