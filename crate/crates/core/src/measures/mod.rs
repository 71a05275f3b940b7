//! Concrete information measures.

pub mod period;
pub mod shannon;
pub mod subspace;
pub mod vocab;

pub use period::{LogValue, PeriodMeasure, PeriodObservations};
pub use shannon::{random_distribution, JointTable, ShannonMeasure, StructuralModel};
pub use subspace::SubspaceFixture;
pub use vocab::{tokenize, Stopwords, VocabMeasure, WordSetObservations, DEFAULT_STOPWORDS};
