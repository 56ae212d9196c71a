pub mod check;
pub mod cli;
pub mod error;
pub mod flow;
pub mod fock;
pub mod linalg;
pub mod modes;
pub mod n2;
pub mod report;
pub mod series;
pub mod suite;
pub mod text;
pub mod window;

pub use error::{Error, Result};
