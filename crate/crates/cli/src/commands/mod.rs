pub mod bounds;
pub mod plan;
pub mod simulate;
pub mod sweep;
