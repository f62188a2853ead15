pub mod geometry;
pub mod dsl;
pub mod causality;
pub mod surgery;
pub mod scenario;
