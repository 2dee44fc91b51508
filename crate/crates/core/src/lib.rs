//! Scientometric ranking over a paper / author / venue graph.
//!
//! The crate ingests a publication corpus, derives the citation, authorship
//! and venueship networks, and computes seven author-level metrics:
//!
//! | Kind | Construction |
//! |------|--------------|
//! | CC | citations of each paper credited in full to every co-author |
//! | BCC | citations of each paper split equally among co-authors |
//! | CV | paper PageRank on the citation graph, split equally among co-authors |
//! | Influence | PageRank on the author walk `author -> own paper -> cited paper -> its author` |
//! | Followers | PageRank on the binary "has cited" author graph |
//! | Connections | PageRank on the co-authorship graph |
//! | Exposure | joint author + venue PageRank mixing the walks above |
//!
//! Scores are turned into rank tables, letter grades and institution
//! rankings, and a handful of analysis datasets (h-index, similarity and
//! publication-year scatters) can be exported.

pub mod analysis;
pub mod corpus;
pub mod error;
pub mod export;
pub mod grading;
pub mod institutions;
pub mod metrics;
pub mod pipeline;
pub mod ranker;
pub mod sparse;
pub mod synth;

pub use corpus::{Corpus, CorpusPaths, DomainView, ValidationReport, ViewScope};
pub use error::{Error, Result};
pub use grading::{GradeAssignment, GradingScheme, LetterGrade, RankingTable};
pub use metrics::{MetricConfig, MetricKind, MetricVector};
pub use ranker::{PowerIterationConfig, RankVector, Teleport, TransitionOperator};
