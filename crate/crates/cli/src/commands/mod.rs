pub mod decay;
pub mod lemma;
pub mod solve;
pub mod validate;
