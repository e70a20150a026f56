//! Gauss's continued fraction for ratios of hypergeometric functions, the
//! asymptotics of its truncation error, and a discrete Laplace method for
//! sums of gamma-function products with a large parameter.

pub mod asym;
pub mod cf;
pub mod cli;
pub mod decompose;
pub mod dlm;
pub mod error;
pub mod hyp2f1;
pub mod oracle;
pub mod params;
pub mod scaled;
pub mod special;

pub use error::{Error, Result};
pub use hyp2f1::{EvalContext, FrobeniusKind};
pub use params::{ParamTriple, ShiftVector};
pub use scaled::Scaled;

// The guide's code blocks run as doc-tests, one module per chapter.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/continued-fraction.md")]
    mod continued_fraction {}
    #[doc = include_str!("../../../book/src/truncation-error.md")]
    mod truncation_error {}
    #[doc = include_str!("../../../book/src/recurrence.md")]
    mod recurrence {}
    #[doc = include_str!("../../../book/src/laplace.md")]
    mod laplace {}
    #[doc = include_str!("../../../book/src/decomposition.md")]
    mod decomposition {}
    #[doc = include_str!("../../../book/src/oracle.md")]
    mod oracle {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
