pub mod exactseq;
pub mod mpball;
pub mod analytic;
pub mod dsl;
pub mod engine;
