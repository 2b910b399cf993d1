pub mod lattice;
pub mod root_datum;
pub mod chevalley;
pub mod gamma;
pub mod folding;
pub mod duality;
pub mod classes;
pub mod catalog;
pub mod cli;
