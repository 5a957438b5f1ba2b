//! Library for auditing silently-evolved methods: API methods whose body
//! changed between two releases while their doc comment stayed the same.

pub mod corpus;
pub mod error;
pub mod evolution;
pub mod extract;
pub mod lexer;
pub mod model;
pub mod report;
pub mod semdiff;
pub mod stats;
pub mod usage;

pub use error::{Error, Result};
