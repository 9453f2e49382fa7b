//! Diversity-based regression test prioritisation.
//!
//! The pipeline: extract test cases from JVM class files or source text
//! ([`classfile`], [`corpus`]), measure pairwise dissimilarity with string
//! distances ([`distance`]) or MinHash sketches ([`lsh`]), reorder the suite
//! ([`prioritize`]), and score the resulting order against fault data
//! ([`evaluate`]).

pub mod classfile;
pub mod corpus;
pub mod distance;
pub mod evaluate;
pub mod lsh;
pub mod prioritize;
