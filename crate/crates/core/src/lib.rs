//! Static MDL prediction over countable Bernoulli classes.
//!
//! The crate computes *exact* expected square losses of three predictors
//! (static MDL selection, maximum likelihood, and the Bayes mixture) on
//! finite truncations of countable parameter classes, together with the
//! machinery needed to compare them with known loss bounds:
//!
//! - [`dyadic`]: exact finite binary fractions, used for parameters and
//!   interval endpoints.
//! - [`coding`]: complexity assignments `Kw(θ)` (bits), including the
//!   canonical prefix code on finite binary fractions.
//! - [`info`]: KL divergence, binomial probabilities and the inequality
//!   suites relating them.
//! - [`model`]: parameter classes and the three predictors.
//! - [`loss`]: the exact-expectation loss engine and its big-rational oracle.
//! - [`intervals`]: the nested dyadic interval construction around the true
//!   parameter, complexity gaps, and spacing-condition checkers.
//! - [`scenarios`]: named class constructors.
//! - [`experiment`]: config parsing and the experiment runner used by the
//!   `mdlb` binary.

pub mod coding;
pub mod dyadic;
pub mod error;
pub mod experiment;
pub mod info;
pub mod intervals;
pub mod loss;
pub mod model;
pub mod numeric;
pub mod scenarios;

pub use dyadic::Dyadic;
pub use error::{Error, Result};
pub use model::{ParamClass, Predictor, SufficientStat};
