//! Controllability analysis for right-invariant control systems on `U(n)` and
//! `SU(n)`: Lie closure, su(n) pair criteria, tensor-product extensions,
//! bang-bang schedule evaluation, Grassmann state controllability and the
//! spectrum classification of discrete states.

pub mod cli;
pub mod error;
pub mod grassmann;
pub mod io;
pub mod lie;
pub mod linalg;
pub mod reach;
pub mod states;
pub mod su;
pub mod tensor;
pub mod words;

pub use error::{Error, Result};
pub use lie::{AlgebraBasis, Ambient, Controllability, GeneratorSystem};
pub use linalg::CMatrix;
pub use words::ControlWord;
