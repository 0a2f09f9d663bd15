//! Mechanised naive axiomatic class theory.
//!
//! The crate is organised bottom-up: [`formula`] is the shared language,
//! [`enumerate`] produces the canonical formula stream, [`stratify`] decides
//! NF stratification, [`schema`] instantiates axiom systems, [`prover`] is the
//! budgeted tableau engine, [`model`] gives finite-universe semantics,
//! [`sa`] classifies self-application verdicts and [`ledger`] runs the
//! quarantined enumeration experiment.

pub mod enumerate;
pub mod formula;
pub mod ledger;
pub mod model;
pub mod prover;
pub mod sa;
pub mod schema;
pub mod stratify;
