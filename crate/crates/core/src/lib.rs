//! Soft-ethics preference elicitation.
//!
//! Agents answer morally loaded scenarios with a yes/no response and a 1–5
//! justification over four parameters. Feedback whose justification agrees
//! with the response (see [`soundness`]) is turned into graded dispositions
//! ([`elicitation`]), collected into per-agent profiles ([`profile`]) that
//! predict the agent's choice on unseen scenarios of the same category.
//!
//! Aggregated quantities are generic over a [`Scalar`]; the aliases below
//! fix the two instantiations used in practice.

pub mod corpus;
pub mod elicitation;
pub mod error;
pub mod model;
pub mod profile;
pub mod scalar;
pub mod session;
pub mod soundness;
pub mod store;

pub use corpus::{builtin_corpus, load_corpus, Corpus, CorpusError, CorpusFormat};
pub use elicitation::{
    elicit, render_counterfactual, Disposition, Manifestation, Pole, PoleLabelTable,
};
pub use error::{Error, Result, Violation};
pub use model::{
    category_of, validate_feedback, validate_scenario, AgentId, Category, Dimension, Feedback,
    Justification, ParameterId, Polarity, RawFeedback, RawScenario, Response, ScaleValue, Scenario,
};
pub use profile::{DispositionSummary, DominantPole, PredictedResponse, Prediction, Profile};
pub use scalar::Scalar;
pub use session::{Next, Session, SessionExport, Submission};
pub use soundness::{
    band_of, expected_band, sound, SoundnessConfig, SoundnessVerdict, ValueBand, Verdict,
};
pub use store::{Store, StoreOptions};

pub use num_rational::Rational64;

/// Summary with exact rational mean and consistency.
pub type ExactSummary = DispositionSummary<Rational64>;
pub type FloatSummary = DispositionSummary<f64>;
/// Prediction with exact rational confidence.
pub type ExactPrediction = Prediction<Rational64>;
pub type FloatPrediction = Prediction<f64>;
