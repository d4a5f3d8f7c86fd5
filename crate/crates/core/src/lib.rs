pub mod arith;
pub mod lemmas;
pub mod report;
pub mod search;
