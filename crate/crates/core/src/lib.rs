//! Flip distance between triangulations of a planar point set.
//!
//! * [`geometry`]: exact integer predicates and point sets.
//! * [`triangulation`]: the triangulation value type and the flip primitive.
//! * [`flipdag`]: flip sequences, their dependency DAG, and reordering checks.
//! * [`solver`]: the parameterized search deciding whether `k` flips suffice.
//! * [`oracle`]: breadth-first search over the flip graph as ground truth.
//! * [`instances`]: generators and the instance / flip-list text formats.
//! * [`cli`]: the `flipdist` command-line front end.

pub mod cli;
pub mod flipdag;
pub mod geometry;
pub mod instances;
pub mod oracle;
pub mod solver;
pub mod triangulation;

pub use flipdag::{build_dag, check_reordering, topological_sorts_sample, FlipDag, FlipSequence};
pub use geometry::{Point, PointSet};
pub use instances::Instance;
pub use oracle::{bfs_distance, enumerate_all, graph_stats, FlipGraphStats};
pub use solver::{decide_equals, exists_sequence, flip_distance_upto, solve_upto, SearchOptions, Witness};
pub use triangulation::{Edge, FlipRecord, Triangle, Triangulation, TriangulationError};
