//! Equivariant K-theory of complete symmetric varieties of minimal rank,
//! computed exactly from their torus-fixed-point combinatorics.

pub mod lattice;
pub mod root_datum;
pub mod group_ring;
pub mod fan;
pub mod kring;
pub mod catalog;
pub mod sampling;
pub mod verify;
