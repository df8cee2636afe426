//! Countable loop graphs ("loop systems") of prescribed Gurevich entropy and period.
//!
//! A [`spectrum::LoopSpectrum`] lists how many simple loops of each length hang off a
//! distinguished root vertex. From a base β > 1 the [`spectrum`] module builds a spectrum
//! whose graph is positive recurrent with entropy `log β`; deleting one loop gives a
//! transient graph of the same entropy. The [`classifier`] certifies either verdict with
//! interval arithmetic, the [`graph`] module realizes finite truncations (optionally
//! lifted to period p), and the [`oracle`] module counts paths exactly for cross-checks.

pub mod classifier;
pub mod error;
pub mod format;
pub mod graph;
pub mod numerics;
pub mod oracle;
pub mod spectrum;
pub mod verify;

pub use error::{Error, Result};
