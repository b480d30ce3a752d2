pub mod algebra;
pub mod cli;
pub mod cochains;
pub mod cohomology;
pub mod combinatorics;
pub mod rational;
pub mod psido;
pub mod report;
