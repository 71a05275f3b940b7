//! PC-style structure search over a pluggable independence oracle.

mod oracle;
mod pattern;
mod search;

pub use oracle::{
    calls_to_csv, write_calls_csv, Budgeted, DSepOracle, IndependenceOracle, LoggingOracle, MeasureOracle, OracleCall,
    ReplayOracle,
};
pub use pattern::{cpdag, markov_equivalence_class, Pattern, PatternEdge};
pub use search::{
    orient_v_structures, pc_skeleton, pc_skeleton_partial, propagate_orientations, run_pc, PcConfig, SearchScope,
    Skeleton,
};
