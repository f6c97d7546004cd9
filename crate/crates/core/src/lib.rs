//! Numerical and combinatorial laboratory for composite symplectic Dehn
//! twists: the model twist on T*S^n, plumbings of sphere cotangent bundles,
//! their reduction to linked twist maps on a flat band surface, hyperbolicity
//! measurements, and Floer rank growth through torus mapping classes.

pub mod error;
pub mod hyperbolicity;
pub mod linalg;
pub mod linked_twist;
pub mod mcg_floer;
pub mod plumbing;
pub mod twist_core;

pub use error::{Result, TwistError};
pub use hyperbolicity::{
    entropy_lower_bound, finite_time_lyapunov, orbit_statistics, periodic_point_spectrum, return_statistics,
    shear_product_bound, stable_curve, stable_direction, EntropyEstimate, GridSpec, LyapunovRecord, OrbitStatistics,
    PeriodicSpectrum, ReturnFrequencies, ShearBound, StableLeafSample,
};
pub use linked_twist::{composite_map, composite_map_inverse, twist_map, Cocycle2, FlatPoint, FlatSurface};
pub use mcg_floer::{
    chain_stretch_factor, classify, composite_matrix, growth_rate, hf_rank_sequence, hf_rank_square_twist,
    intersection_number_torus, ChainConfig, Classification, HomClass, MappingClass2, RankSequence,
};
pub use plumbing::{
    composite_twist, composite_twist_inverse, lift_from_flat, reduce_to_flat, AmbientPoint, LagrangianLeaf,
    PlumbingConfig,
};
pub use twist_core::{dehn_twist, EquatorAngle, SphereCotangentPoint, TwistProfile};
