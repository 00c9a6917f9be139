pub mod analysis;
pub mod bench;
pub mod common;
pub mod curriculum;
pub mod data;
pub mod simplify;
pub mod tokenizer;
