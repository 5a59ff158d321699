//! Concrete independence-oracle backends: undirected-graph separation,
//! exact Gaussian, thresholded sample Gaussian, and explicit tables.

mod gaussian;
mod graph;
mod sample;
mod table;

pub use gaussian::{
    matrix_to_csv, non_graphical_gaussian, parse_matrix_csv, CovarianceSpec, ExactGaussianOracle,
    MatrixKind,
};
pub use graph::{SeparationOracle, UndirectedGraph};
pub use sample::{parse_samples_csv, SampleGaussianOracle, SampleMatrix};
pub use table::{studeny_graphoid, TableGraphoid, TableOracle};
