//! Exact enumerative computations for nodal curves on surfaces.
//!
//! Node polynomials, Severi degrees of the plane, polydiagonal equivalences in
//! a truncated intersection ring, Kazarian multisingularity counts, and the
//! quasi-modular series that govern the generating function of node counts.
//! All arithmetic is exact.

pub mod bell;
pub mod check;
pub mod chow;
pub mod enumerator;
pub mod exact;
pub mod kazarian;
pub mod partition;
pub mod qseries;
pub mod surface;

pub use bell::{bell_transform, complete_bell, eval_complete_bell, partial_bell, SparsePoly};
pub use chow::{
    c_correction_p2, critical_class, excess_a1a2_p2, multiple_point_degree, pushforward_to_y, q_general, q_p2_closed,
    q_p2_extraction, GradedClass, LinearForm, P2Class,
};
pub use enumerator::{a_form, node_count, node_polynomial, ratio_table, severi_degree_p2, ATable, NodeLinearForm, NodePolynomial};
pub use exact::{binomial, factorial, BigInt, Rational, UniPolyD};
pub use kazarian::{count_multisingular, s_alpha, KazarianTable, Label, MultisingularityType};
pub use partition::{enumerate_partitions, mobius_coefficient, signature_count, SetPartition, Signature};
pub use qseries::{gyz_channel_residual, Channel, PowerSeries};
pub use surface::ChernNumbers;
