//! Finite-precision p-adic computations for modular forms.
//!
//! Everything here works in `Z/p^k` with the precision `k` carried on each
//! value. The crate provides four layers:
//!
//! * scalar arithmetic: [`padic`] (elements of `Z/p^k` with valuations,
//!   Hensel roots, Teichmuller lifts, the p-adic logarithm) and [`cyclo`]
//!   (the ring `Z[zeta_{p^m}]` modulo `p^k`), unified by [`scalar`];
//! * function spaces on `Z_p` and `Q_p^x`: [`locfn`] (locally constant
//!   functions and Mahler transforms), [`charfn`] (smooth characters and
//!   character tails), [`kirillov`] (shell-plus-tail functions on
//!   `Q_p^x \ {0}`);
//! * truncated q-expansions and their operators: [`qexp`] (Hecke, theta,
//!   twists, the p-power circle action) and [`newform`] (eigenform data
//!   ingestion);
//! * linear algebra and representation bookkeeping: [`howell`] and
//!   [`ordinary`] (the `U_p` matrix and the ordinary projector),
//!   [`smoothrep`] (Kirillov models of smooth `GL_2(Q_p)`-representations).
//!
//! All values are immutable after construction and freely shareable across
//! threads.

pub mod charfn;
pub mod cyclo;
pub mod error;
pub mod howell;
pub mod kirillov;
pub mod locfn;
pub mod newform;
pub mod ordinary;
pub mod padic;
pub mod qexp;
pub mod sampling;
pub mod scalar;
pub mod smoothrep;

pub use error::CoreError;
