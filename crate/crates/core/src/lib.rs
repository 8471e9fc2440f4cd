//! Exact Heegaard Floer correction terms of lens spaces, trefoil fillings and
//! L-space surgeries, plus an exhaustive search for half-integral surgeries
//! that produce T- or I-type spherical space forms.

pub mod cli;
pub mod knots;
pub mod lens;
pub mod matcher;
pub mod numtheory;
pub mod spaceform;

pub use knots::{AlexPoly, KnotSpec, TorsionSeq};
pub use lens::{LensSpace, SpinIdx};
pub use matcher::{run_search, MatchResult, SearchOptions};
pub use numtheory::Rational;
pub use spaceform::{Sign, TrefoilFilling};
