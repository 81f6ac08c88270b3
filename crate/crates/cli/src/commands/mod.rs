pub mod benchmark;
pub mod cluster;
pub mod evaluate;
pub mod generate;
pub mod grid;
