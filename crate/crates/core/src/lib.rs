pub mod bargmann;
pub mod envelope;
pub mod error;
pub mod hrt;
pub mod quadrature;
pub mod sampling;
pub mod search;
pub mod signal;
pub mod stft;
pub mod symplectic;
pub mod uncertainty;

pub use error::{Error, Result};
