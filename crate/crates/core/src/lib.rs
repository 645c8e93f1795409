pub mod codec;
pub mod crossing;
pub mod dfa;
pub mod experiment;
pub mod langs;
pub mod machine;
pub mod rewrite;
