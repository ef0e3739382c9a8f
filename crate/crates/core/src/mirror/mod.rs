//! Construction of grids that decode both straight and transposed.
//!
//! [`construct_double_sided`] is the entry point. It pins both payloads,
//! chooses which codewords per side are left to error correction and
//! solves the remaining constraints over GF(2), falling back to a seeded
//! randomised search when no allocation is consistent.

pub mod alloc;
pub mod brute;
pub mod construct;
pub mod solve;
pub mod system;

pub use alloc::enumerate_error_allocations;
pub use brute::{brute_force_search, BruteForceHit, BruteForceMiss, Damage};
pub use construct::{
    analytic_search, construct_double_sided, message_bits, mirror_format, probe_capacity,
    ConstructionError, ConstructionReport, Diagnostics, FillPolicy, Method, MirrorOptions,
};
pub use solve::{solve_gf2, FreeBitPolicy, LinearSystem, RowTag, Solution};
pub use system::{
    build_constraint_system, side_views, ConstraintSystem, ErrorAllocation, FeasibilityScreen,
    SideView, SpanCache, SystemError,
};
