//! Uniquely predictive theories and Probability Combination using
//! Independence (PCI).
//!
//! A theory is a set of rules, each giving the distribution of one target
//! feature under a conditioning context. [`theory::PredictiveTheory`] checks
//! and indexes rules, [`pci::predict`] combines the most specific applicable
//! rules into a prediction, and [`oracle`] provides brute-force joint tables
//! to check those predictions against. [`dsl`] reads and writes theory files.

pub mod arith;
pub mod cli;
pub mod dsl;
pub mod oracle;
pub mod pci;
pub mod schema;
pub mod theory;

pub use arith::{Probability, Scalar};
pub use dsl::{load_theory, parse_situation, parse_theory, print_theory};
pub use pci::{predict, Flag, Prediction};
pub use schema::{FeatureSet, Schema, Value, ValueSet};
pub use theory::{PredictiveTheory, Rule, ValidationReport, ValidationStatus};
