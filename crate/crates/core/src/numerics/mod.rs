//! Numerical building blocks shared by the physics modules.

pub mod bessel;
pub mod quad;
pub mod rk;
pub mod roots;
