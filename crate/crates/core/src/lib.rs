pub mod acceptance;
pub mod backends;
pub mod diagram;
pub mod error;
pub mod grammar;
pub mod lambda;
pub mod logic;
pub mod montague;
pub mod peirce;
pub mod random;
pub mod types;

pub use error::{Error, Result};
