pub mod error;
pub mod groups;
pub mod kazhdan;
pub mod lemma51;
pub mod net;
pub mod report;
pub mod rng;
pub mod roundgroup;
pub mod so3;
pub mod stats;
pub mod words;

pub use error::{Error, Result};
