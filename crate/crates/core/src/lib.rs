//! Exact certification of germs in the Siegel upper half space H2 as
//! Lagrangian loci.
//!
//! Everything is computed over truncated power series with coefficients in
//! Q(i). A successful run produces a certificate holding a closed coframe
//! and a cubic-form-valued section whose residuals are exactly zero up to
//! the certified jet order, and the certificate can be re-verified
//! independently of how it was built.

pub mod ck;
pub mod cubic;
pub mod error;
pub mod exact;
pub mod germ;
pub mod pipeline;
pub mod series;

pub use error::{Error, Result};
