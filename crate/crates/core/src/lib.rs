//! Exact thinness of trees.
//!
//! - [`tree`]: trees, rooted views, dangling trees, generators.
//! - [`engine`]: O(n log n) thinness via critical vertex lists.
//! - [`layout`]: an optimal consistent solution (order plus partition).
//! - [`certify`]: consistency checks and brute-force oracles.
//! - [`bounds`]: closed forms, upper bounds, the almost-leaves construction.

pub mod bounds;
pub mod certify;
pub mod engine;
pub mod layout;
pub mod tree;

pub use certify::{check_consistent, Caps, Violation};
pub use engine::{compute_thinness, Critical, InfoTable, SubtreeInfo};
pub use layout::{consistent_solution, ConsistentSolution};
pub use tree::{parse_edge_list, root_at, RootedTree, Tree, TreeError};
