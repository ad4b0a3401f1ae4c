pub mod error;
pub mod fem;
pub mod harness;
pub mod mittag_leffler;
pub mod numerics;
pub mod reference_oracle;
pub mod sinc_contour;
pub mod special;
pub mod time_convolution;

pub use error::{Error, Result};
