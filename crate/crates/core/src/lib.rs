//! A natural-join engine that alternates between proposing candidate tuples
//! and recording the gaps it finds around them.

pub mod cds;
pub mod certlab;
pub mod engine;
pub mod probe;
pub mod querygraph;
pub mod storage;
pub mod triangle;
pub mod value;

pub use value::{Ext, Value};
