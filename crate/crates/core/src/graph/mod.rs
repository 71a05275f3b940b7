//! Directed acyclic graphs and the Markov conditions of information measures.

mod dag;
mod markov;

pub use dag::{all_dags, Dag, ENUMERATION_LIMIT};
pub use markov::{
    ancestral_sets, decomposition_report, extend_graph, functional_model_check, global_markov_report,
    local_markov_report, markov_report, DecompositionEntry, EnumerationGuard, ExtendedDag, FunctionalReport,
    FunctionalTolerances, GlobalEntry, LocalEntry, MarkovReport,
};
