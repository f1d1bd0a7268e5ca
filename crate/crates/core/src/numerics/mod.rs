//! Dense complex linear algebra kernel.

pub mod expm;
pub mod layout;
pub mod linalg;
pub mod matrix;
pub mod random;
pub mod states;

pub use expm::matexp;
pub use layout::{embed_operator, partial_trace, swap_registers, RegisterLayout};
pub use linalg::{hermitian_eigenvalues, schatten_norm, trace_distance_matrices};
pub use matrix::{mat_vec, ComplexMatrix, C64, I, ONE, ZERO};
pub use random::{random_density_matrix, random_hermitian, random_pure_state, random_unit_hs_operator};
pub use states::{
    maximally_entangled_state, maximally_entangled_vector, project_to_density, swap_matrix, trace_distance,
    DensityMatrix, Projected, StateVector,
};
