//! Decoding propagated labels into an alignment: exact top-k cosine
//! retrieval, dense and sparse Sinkhorn, a Hungarian reference solver and
//! argmax extraction.

mod extract;
mod hungarian;
mod sim;
mod sinkhorn;

pub use extract::{col_argmax, extract_alignment, row_argmax, AlignedPair, ExtractMode};
pub use hungarian::{hungarian, Assignment};
pub use sim::{cosine_matrix, topk_retrieve, Ranked, SparseSim};
pub use sinkhorn::{sinkhorn_dense, sinkhorn_sparse, TransportPlan};
