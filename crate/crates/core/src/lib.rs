//! Real interpolation with a function parameter on approximation spaces:
//! approximation numbers, functions of class B and their Boyd indices,
//! symmetric norming functions, Lorentz–Marcinkiewicz and `Φ`-type
//! quasi-norms, Peetre's K-functional over sequence couples, and numerical
//! checks of the reiteration identities built from them.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod approx_spaces;
pub mod boyd;
pub mod cli;
pub mod error;
pub mod io;
pub mod kfunc;
pub mod numeric;
pub mod operators;
pub mod parse;
pub mod sequences;
pub mod snorm;
pub mod verify;

pub use error::{Error, Result};
