//! Non-neural entity alignment between two knowledge graphs.
//!
//! Seed pairs receive shared random unit vectors as labels, labels spread
//! over each graph through three sparse views of its triples, and the
//! concatenated per-round labels are matched with top-k cosine retrieval and
//! sparse Sinkhorn iteration.
//!
//! ```no_run
//! use lightalign::kg::{load_dataset, SplitSpec};
//! use lightalign::pipeline::{run, AlignConfig};
//!
//! let data = load_dataset("data/zh_en", &SplitSpec::Ratio { ratio: 0.3, seed: 0 })?;
//! let result = run(&data, &AlignConfig::default(), None)?;
//! println!("hits@1 {:.3}", result.metrics.hits1);
//! # Ok::<(), lightalign::Error>(())
//! ```

pub mod cli;
pub mod decode;
mod error;
pub mod kg;
pub mod labels;
pub mod pipeline;
pub mod propagate;
pub mod synth;
pub mod trace;

pub use error::{Error, Result};
