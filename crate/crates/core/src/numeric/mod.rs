//! Certified arithmetic substrate: exact dyadic numbers, midpoint-radius
//! enclosures, quadratic surds, continued fractions, and the slope type the
//! word and expansion layers are built on.

pub mod ball;
pub mod cf;
pub mod dyadic;
pub mod render;
pub mod slope;
pub mod surd;

pub use ball::RealBall;
pub use cf::CfStream;
pub use dyadic::{Dyadic, Round};
pub use slope::{Intercept, Slope};
pub use surd::QuadraticSurd;
