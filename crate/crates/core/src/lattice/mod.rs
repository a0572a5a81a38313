//! Z-lattices inside `Mat(g,h;K) ≅ Q^{2gh}` and the finite groups `G1`, `G2`.

mod group;
pub mod intmat;
mod lattice;

pub use group::{
    character_phase, character_phase_with, character_sum, compute_g1, compute_g1_capped, compute_g2, compute_g2_capped,
    orthogonality_check, quotient_group, ring_integrality_sides, FiniteAbelianGroup, OrthogonalityReport, Pairing,
    DEFAULT_GROUP_CAP,
};
pub use lattice::{
    integral_basis, lattice_image, lattice_intersect, matrix_coordinates, matrix_from_coordinates, IntLattice,
};
