//! Bubble clustering decoding for planar surface codes.
//!
//! - [`lattice`]: code geometry, syndromes and logical checks.
//! - [`noise`]: depolarizing code-capacity noise.
//! - [`bc`]: the bubble clustering decoder.
//! - [`reference`]: exact small-instance matching and a greedy baseline.
//! - [`verify`]: exhaustive and sampled correctness suites.
//! - [`harness`]: logical error rate and timing experiments.
//!
//! ```
//! use bubblecode_core::{BcConfig, BubbleDecoder, QubitSet, Side, SurfaceCode};
//!
//! let code = SurfaceCode::new(5).unwrap();
//! let error = QubitSet::from_sorted(vec![6, 7]);
//! let syndrome = code.syndrome_of(&error, Side::Primal);
//! let mut decoder = BubbleDecoder::new(code.clone(), BcConfig::default());
//! let correction = decoder.decode(&syndrome).unwrap();
//! let residual = error.symmetric_difference(&correction);
//! assert!(!code.is_logical_failure(&residual, Side::Primal).unwrap());
//! ```

pub mod bc;
pub mod decoder;
pub mod error;
pub mod harness;
pub mod lattice;
pub mod noise;
pub mod reference;
pub mod stats;
pub mod verify;

pub use bc::{bubble_radius, decode_side, BcConfig, BubbleDecoder, DecodeReport};
pub use decoder::{decoder_label, Decoder, DecoderKind};
pub use error::{Error, Result};
pub use lattice::{Boundary, BoundaryQuery, QubitSet, Side, Syndrome, SurfaceCode};
pub use noise::{DepolarizingChannel, PauliError};
