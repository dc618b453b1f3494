mod common;

use std::collections::BTreeSet;

use common::*;
use num_rational::BigRational;
use num_traits::{One, Zero};
use predictive_theory::schema::{
    shared_features, Domain, FeatureDef, FeatureKind, FeatureSet, Interval, ValueHierarchy, ValueItem,
};
use predictive_theory::{load_theory, parse_theory, predict, print_theory, PredictiveTheory, Schema, Value, ValueSet};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const COLOURS: [&str; 3] = ["red", "green", "blue"];

/// Ground assignments over x ∈ {true, false}, colour ∈ COLOURS, n ∈ 0..=4.
fn grounds() -> Vec<Schema> {
    let mut out = Vec::new();
    for x in [true, false] {
        for c in COLOURS {
            for n in 0..=4 {
                out.push(
                    Schema::new()
                        .with_value("x", bool_value(x))
                        .with_value("colour", Value::atom(c))
                        .with_value("n", Value::Int(n)),
                );
            }
        }
    }
    out
}

fn bool_set() -> impl Strategy<Value = Option<ValueSet>> {
    prop_oneof![
        Just(None),
        Just(Some(ValueSet::atoms(["true"]))),
        Just(Some(ValueSet::atoms(["false"]))),
        Just(Some(ValueSet::atoms(["true", "false"]))),
    ]
}

fn colour_set() -> impl Strategy<Value = Option<ValueSet>> {
    prop::option::of(prop::sample::subsequence(COLOURS.to_vec(), 1..=3).prop_map(ValueSet::atoms))
}

fn int_set() -> impl Strategy<Value = Option<ValueSet>> {
    prop::option::of(
        prop::collection::vec((0i64..=4, 0i64..=2), 1..=2)
            .prop_map(|v| ValueSet::ints(v.into_iter().map(|(lo, w)| Interval::new(lo, Some((lo + w).min(4)))))),
    )
}

fn ground_features() -> FeatureSet {
    let defs = vec![
        FeatureDef::boolean("x"),
        FeatureDef::new("colour", Domain::Enum(COLOURS.iter().map(|s| s.to_string()).collect()), FeatureKind::World)
            .unwrap(),
        FeatureDef::new("n", Domain::Int { lo: 0, hi: Some(4) }, FeatureKind::World).unwrap(),
    ];
    FeatureSet::new(defs, ValueHierarchy::new()).unwrap()
}

/// Schemata in canonical form: no binding allows a whole domain.
fn schema() -> impl Strategy<Value = Schema> {
    raw_schema().prop_map(|s| ground_features().canonicalize(&s))
}

fn raw_schema() -> impl Strategy<Value = Schema> {
    (bool_set(), colour_set(), int_set()).prop_map(|(x, c, n)| {
        let mut s = Schema::new();
        if let Some(x) = x {
            s.bind("x", x);
        }
        if let Some(c) = c {
            s.bind("colour", c);
        }
        if let Some(n) = n {
            s.bind("n", n);
        }
        s
    })
}

fn denotation(s: &Schema) -> BTreeSet<usize> {
    grounds().iter().enumerate().filter(|(_, g)| g.satisfies(s)).map(|(i, _)| i).collect()
}

proptest! {
    #[test]
    fn implication_matches_ground_enumeration(a in schema(), b in schema()) {
        let semantic = denotation(&a).is_subset(&denotation(&b));
        prop_assert_eq!(a.implies(&b), semantic);
    }

    #[test]
    fn canonical_form_keeps_the_denotation(a in raw_schema()) {
        let c = ground_features().canonicalize(&a);
        prop_assert_eq!(denotation(&c), denotation(&a));
        prop_assert_eq!(ground_features().canonicalize(&c), c);
    }

    #[test]
    fn implication_is_a_preorder(a in schema(), b in schema(), c in schema()) {
        prop_assert!(a.implies(&a));
        if a.implies(&b) && b.implies(&c) {
            prop_assert!(a.implies(&c));
        }
        prop_assert!(a.implies(&Schema::new()));
    }

    #[test]
    fn shared_features_are_implied_by_both(a in schema(), b in schema()) {
        let s = shared_features(&[&a, &b]);
        prop_assert_eq!(&s, &shared_features(&[&b, &a]));
        for (name, set) in s.bindings() {
            prop_assert!(!set.is_empty());
            prop_assert!(set.is_subset(a.get(name).unwrap()));
            prop_assert!(set.is_subset(b.get(name).unwrap()));
        }
    }

    #[test]
    fn intersection_is_meet(a in colour_set(), b in colour_set()) {
        if let (Some(a), Some(b)) = (a, b) {
            let i = a.intersection(&b);
            prop_assert_eq!(&i, &b.intersection(&a));
            for c in COLOURS {
                let v = Value::atom(c);
                prop_assert_eq!(i.contains(&v), a.contains(&v) && b.contains(&v));
            }
        }
    }

    #[test]
    fn expansion_is_idempotent(items in prop::collection::vec(0usize..5, 1..4)) {
        let fs = hierarchy_features();
        let names = ["red", "green", "blue", "warm", "any"];
        let expr: Vec<ValueItem> = items.iter().map(|&i| ValueItem::Name(names[i].into())).collect();
        let once = fs.expand("colour", &expr).unwrap();
        let ValueSet::Atoms(atoms) = &once else { panic!("enum feature expanded to ints") };
        let again: Vec<ValueItem> = atoms.iter().map(|a| ValueItem::Name(a.clone())).collect();
        prop_assert_eq!(fs.expand("colour", &again).unwrap(), once);
    }

    #[test]
    fn msr_sets_are_antichains_covering_satisfied_rules(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let th = random_theory(&mut rng, 4, 8, &["true", "false"]);
        let s = random_situation(&mut rng, &feature_names(4));
        let msrs = th.msr_set(&s);
        prop_assert!(!msrs.is_empty());
        for &m in &msrs {
            prop_assert!(s.satisfies(&th.rule(m).context));
            for &k in &msrs {
                prop_assert!(m == k || !th.rule(m).context.more_specific_than(&th.rule(k).context));
            }
        }
        for (i, r) in th.rules().iter().enumerate() {
            if s.satisfies(&r.context) {
                prop_assert!(msrs.iter().any(|&m| th.rule(m).context.implies(&r.context)), "rule {} uncovered", i);
            }
        }
    }

    #[test]
    fn validation_agrees_with_brute_force(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = 1 + (seed % 3) as usize;
        let th = random_theory(&mut rng, n, 5, &["true", "false"]);
        let brute = all_situations(&feature_names(n)).iter().all(|s| separable_by_search(&th, &th.msr_set(s)));
        let report = th.check_uniquely_predictive(1_000_000);
        prop_assert!(report.stats.complete);
        prop_assert_eq!(report.is_valid(), brute);
        for v in &report.violations {
            prop_assert_eq!(th.msr_set(&v.witness), v.msrs.clone());
        }
    }

    #[test]
    fn predictions_are_distributions(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let th = random_theory(&mut rng, 5, 8, &["a", "b", "c"]);
        let s = random_situation(&mut rng, &feature_names(5));
        let p = predict::<BigRational>(&th, &s);
        let total = p.distribution.iter().fold(BigRational::zero(), |acc, (_, q)| acc + q.clone());
        prop_assert!(total.is_one());
        prop_assert!(p.distribution.iter().all(|(_, q)| *q >= BigRational::zero()));
        let f = predict::<f64>(&th, &s);
        for (v, q) in &p.distribution {
            let x: f64 = predictive_theory::Scalar::to_f64(q);
            prop_assert!((x - f.probability(v)).abs() < 1e-9);
        }
    }

    #[test]
    fn theory_files_round_trip(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let th = random_theory(&mut rng, 4, 8, &["true", "false"]);
        let text = theory_text(&th);
        let doc = parse_theory(&text).unwrap();
        let printed = print_theory(&doc);
        prop_assert_eq!(parse_theory(&printed).unwrap(), doc);
        let back = load_theory(&printed).unwrap();
        prop_assert_eq!(back.rules(), th.rules());
    }
}

fn hierarchy_features() -> FeatureSet {
    let mut h = ValueHierarchy::new();
    let nodes = h.entry("colour".into()).or_default();
    nodes.insert("warm".into(), vec![ValueItem::Name("red".into())]);
    nodes.insert("any".into(), vec![ValueItem::Name("warm".into()), ValueItem::Name("green".into()), ValueItem::Name("blue".into())]);
    let colour = FeatureDef::new("colour", Domain::Enum(COLOURS.iter().map(|s| s.to_string()).collect()), FeatureKind::World).unwrap();
    FeatureSet::new(vec![colour], h).unwrap()
}

/// Separability by trying every order, written independently of the
/// greedy search: rule i may go next when the remaining rules it shares a
/// feature with (present in both, overlapping values) number at most one.
fn separable_by_search(th: &PredictiveTheory, msrs: &[usize]) -> bool {
    if msrs.len() <= 1 {
        return true;
    }
    msrs.iter().any(|&r| {
        let rest: Vec<usize> = msrs.iter().copied().filter(|&k| k != r).collect();
        let ctx = &th.rule(r).context;
        let sharing = rest
            .iter()
            .filter(|&&k| {
                let other = &th.rule(k).context;
                ctx.bindings().iter().any(|(f, a)| other.get(f).is_some_and(|b| !a.intersection(b).is_empty()))
            })
            .count();
        sharing <= 1 && separable_by_search(th, &rest)
    })
}
