//! Constraint store specialised to the triangle query `R(A,B), S(B,C), T(A,C)`
//! under the attribute order `A, B, C`.

mod cds;
mod dyadic;

pub use cds::TriangleCds;
pub use dyadic::{dyadic_decompose, DyadicError, DyadicNode, DyadicTree};
