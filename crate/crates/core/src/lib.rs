//! Mining, labeling, switching and evaluation for pronoun resolution
//! benchmarks built from two-candidate sentences.

pub mod annotation;
pub mod binio;
mod edit;
pub mod error;
pub mod evaluation;
pub mod ingest;
pub mod labeling;
pub mod lexicon;
pub mod mining;
pub mod model;
pub mod resolvers;
pub mod resources;
pub mod switching;
pub mod tagging;
pub mod text;

pub use error::{Error, Result};
pub use lexicon::{Gender, GenderLexicon};
pub use model::{
    AntecedentId, Choice, MentionSpan, Prediction, ProblemInstance, PronounGender, RejectReason,
    SentenceRecord, Stage, Verdict,
};
