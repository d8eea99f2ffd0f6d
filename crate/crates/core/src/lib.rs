pub mod beliefs;
pub mod error;
pub mod exact;
pub mod form;
pub mod harness;
pub mod io;
pub mod lp;
pub mod designers;
pub mod mechanism;
pub mod verifier;
