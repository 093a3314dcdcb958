//! Resilient repeat-free strings over `Z_q`, substitution and deletion
//! channels, greedy reconstruction from k-mer multisets, a coset codec and
//! the bound calculators that go with them.

pub mod bounds;
pub mod channels;
pub mod codec;
pub mod error;
pub mod generator;
pub mod harness;
pub mod reconstruct;
pub mod repeatfree;
pub mod strings;

pub use channels::{NoiseKind, NoiseMode, NoiseSpec};
pub use error::{Error, Result};
pub use generator::{Certifier, CosetStrategy, Method};
pub use repeatfree::WorkBudget;
pub use strings::{ChannelParams, IndexSet, KmerMultiset, ObservablePair, RingString};
