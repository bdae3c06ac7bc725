use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invariant violation in instance `{id}`: {reason}")]
    InvariantViolation { id: String, reason: String },

    #[error("parse error at byte {offset}: {message}")]
    Parse { offset: usize, message: String },

    #[error("tagger unavailable: {0}")]
    TaggerUnavailable(String),

    #[error("cannot train a tagger on empty data")]
    EmptyTrainingData,

    #[error("no unambiguous {0} name available for replacement")]
    NoReplacementAvailable(String),

    #[error("candidate occurrences overlap in `{0}`")]
    OverlappingOccurrences(String),

    #[error("candidates of `{0}` share the same surface form")]
    IdenticalCandidates(String),

    #[error("external adapter protocol error on line {line}: {message}")]
    AdapterProtocol { line: usize, message: String },

    #[error("prediction refers to unknown instance `{0}`")]
    UnknownInstanceId(String),

    #[error("no prediction for instance `{0}`")]
    MissingPrediction(String),

    #[error("`{switched}` is not the switched counterpart of `{original}`")]
    MisalignedPair { original: String, switched: String },

    #[error("corpus is empty")]
    EmptyCorpus,

    #[error("item {item} has {found} ratings, expected {expected}")]
    InconsistentRaterCount {
        item: usize,
        expected: u32,
        found: u32,
    },

    #[error("annotation sample is empty")]
    EmptySample,

    #[error("agreement matrix is empty")]
    EmptyMatrix,

    #[error("unknown annotator `{0}`")]
    UnknownAnnotator(String),

    #[error("unknown candidate `{0}`")]
    UnknownCandidate(String),

    #[error("malformed label `{0}`")]
    MalformedLabel(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("bad model file: {0}")]
    Model(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
