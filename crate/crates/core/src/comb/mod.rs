//! Set partitions, quotient graphs, marked Dyck words and partition sums.

pub mod dyck;
pub mod graph;
pub mod partition;
pub mod vn;

pub use dyck::{enumerate_marked_dyck, even_cactus_cycles, md_of_partition, MarkedDyckWord, Step};
pub use graph::{cycle_decomposition, quotient_graph, CycleDecomposition, QuotientGraph};
pub use partition::{all_partitions, enumerate_partitions, SetPartition};
pub use vn::{delta, expected_trace_polynomial, vn_exact, vn_limit, InclusionExclusion, NormalizedSum};
