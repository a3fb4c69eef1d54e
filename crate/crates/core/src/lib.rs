//! Core library for representing and evaluating rationale-based
//! explanations of fact-verification predictions.
//!
//! Explanations come in three formats of increasing structure:
//!
//! * **free-form** — an ordered sequence of propositions;
//! * **deductive** — propositions connected by a binary relation, e.g. a
//!   chain of facts leading to the prediction;
//! * **argumentative** — a bipolar argumentation framework of arguments
//!   linked by attack and support relations.
//!
//! On top of the representations the crate provides boolean property
//! checks with structural witnesses (coherence, non-circularity, weak and
//! strong relevance, non-redundancy, dialectical non-circularity,
//! dialectical faithfulness, acceptability) and graded metrics
//! (`coh`, `rel_weak`, `rel_strong`, `red`, `acc`, and circularity in two
//! readings), together with corpus streaming, deterministic report
//! serialization, and a seeded document generator for property-based
//! testing.

pub mod argsem;
pub mod config;
pub mod corpus;
pub mod error;
pub mod generator;
pub mod graph;
pub mod metrics;
pub mod model;
pub mod oracle;
pub mod pipeline;
pub mod report;

pub use config::EvalConfig;
pub use error::EvalError;
pub use model::{
    ArgumentativeExplanation, DeductiveExplanation, ExplanationDocument, ExplanationFormat,
    FreeFormExplanation, InputRecord, Prediction, Proposition,
};
pub use oracle::{build_oracle, TextOracle};
