//! Finite-field verification of torsion obstruction arguments on genus-one
//! modular curves: point tables, twist structures, Atkin-Lehner orbits,
//! Frobenius traces and cusp combinatorics.

pub mod curve;
pub mod cusps;
pub mod expr;
pub mod field;
pub mod models;
pub mod obstruction;
pub mod report;
pub mod trace;
pub mod twists;
