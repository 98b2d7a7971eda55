//! Exceptional Dehn surgeries on one component of a hyperbolic two-bridge
//! link, decided with exact integer arithmetic.
//!
//! * [`notation`]: slopes, continued fractions, link normal forms.
//! * [`diagram`]: D-edge paths from `1/0` and the `[2, n, -2]` family check.
//! * [`classifier`]: the toroidal and small Seifert families and [`classify`].
//! * [`census`]: enumeration, audits and a brute-force oracle.
//! * [`cli`] and [`selftest`]: the `twobridge` command-line tool.

pub mod census;
pub mod classifier;
pub mod cli;
pub mod diagram;
pub mod notation;
pub mod selftest;

pub use classifier::{classify, ClassifyError, Family, FamilyWitness, Kind, SurgeryClass};
pub use notation::{CanonicalLink, ContinuedFraction, NotationError, Slope};
