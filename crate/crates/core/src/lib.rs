//! Information rates of the sparse Gaussian linear channel `Y = A H X + W`,
//! where `X = S ⊙ U` is a Bernoulli-Gaussian source whose sparsity pattern `S`
//! may carry memory through a magnetization-only pattern law.
//!
//! Two independent routes compute the per-symbol input-output rate `I1`:
//!
//! * [`replica`] — the scalar fixed-point characterization (effective SNR `eta`
//!   plus a scalar AWGN mutual information term),
//! * [`rigorous`] — the saddle-point formula built from random-matrix
//!   auxiliary functions and a two-Gaussian mixture expectation.
//!
//! The conditional rate `I2` (support known) has the closed form in
//! [`shannon_transform`]. Small-dimension Monte-Carlo ground truth for both
//! lives in [`oracle`]. Achievable rates for channel coding, wiretap, and MAC
//! scenarios are thin compositions of these and live in [`rates`].
//!
//! All rates are in nats internally; conversion to bits is left to callers at
//! the serialization boundary.

pub mod error;
pub mod model;
pub mod oracle;
pub mod quad;
pub mod rates;
pub mod replica;
pub mod rigorous;
pub mod scalar_channel;
pub mod shannon_transform;

pub use error::{Error, Result};
pub use model::{binary_entropy, ChannelParams, SparsityLaw};
pub use rates::{RateReport, Route, WiretapParams};
pub use replica::ReplicaSolution;
pub use rigorous::SaddlePoint;
pub use shannon_transform::I2Report;
