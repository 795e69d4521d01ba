//! Pseudo-spectral simulation of 2D nonhomogeneous incompressible MHD on the
//! periodic torus, with a harness that evaluates the energy identity, density
//! bounds, blow-up functionals and logarithmic Sobolev probes on trajectories.

pub mod spectral;
pub mod lp;
pub mod random;
pub mod snapshot;
pub mod solver;
pub mod estimates;
pub mod calibration;
pub mod cli;
