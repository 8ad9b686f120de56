//! Closed-form reference implementations used as ground truth by tests and
//! by the CLI verification mode: special-relativity kinematics on flat
//! spacetime, and the polar-chart plane with its Cartesian detour.

pub mod polar;
pub mod sr;
