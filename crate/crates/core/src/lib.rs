//! Wirtinger numbers of virtual-link Gauss diagrams, with the bridge-number
//! bounds that surround them: diagram bridge count from above; elementary
//! ideals, parity projection and quandle counts from below; and welded
//! unknotting for one-overbridge knots.
//!
//! ```
//! use vwirtinger::{parse_gauss_code, wirtinger_number, SearchLimits};
//!
//! let trefoil = parse_gauss_code("O1-U2-O3-U1-O2-U3-").unwrap();
//! let w = wirtinger_number(&trefoil, SearchLimits::default()).unwrap();
//! assert_eq!((w.omega, trefoil.bridge_count()), (2, 3));
//! ```

pub mod batch;
pub mod coloring;
pub mod gauss;
pub mod group;
pub mod laurent;
pub mod parity;
pub mod quandle;
pub mod welded;

pub use batch::{
    ingest_table, parse_table, run_pipeline, write_results, write_results_to, Format, PipelineConfig, ResultRecord,
    Status, TableEntry,
};
pub use coloring::{
    apply_coloring_moves, lemma_witness, verify_coloring_sequence, verify_height_certificate, wirtinger_number,
    ColoringSequence, SearchError, SearchLimits, WirtingerResult, WorklistOrder,
};
pub use gauss::{parse_gauss_code, GaussDiagram, GaussError};
pub use group::{
    alexander_matrix, elementary_ideal_generators, ideal_lower_bound, properness_certificate, wirtinger_presentation,
    DEFAULT_PRIME_BOUND,
};
pub use laurent::Laurent;
pub use parity::{gaussian_parity, iterated_parity_projection, parity_lower_bound, parity_projection};
pub use quandle::{count_colorings, FiniteQuandle};
pub use welded::{is_one_overbridge, replay_certificate, welded_unknot_certificate, UnknottingCertificate};
