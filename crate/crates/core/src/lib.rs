//! Exact root-system toolkit for divergence certificates of torus orbits in
//! representations of reductive groups.

pub mod canonical;
pub mod certify;
pub mod error;
pub mod linalg;
pub mod diophantine;
pub mod rational;
pub mod repweights;
pub mod rootcore;
pub mod slprobe;
pub mod torus;
pub mod weyl;

pub use certify::{DivergenceCertificate, FactorReport, VerificationReport, Verdict};
pub use error::{Error, Result};
pub use rational::Rational;
pub use rootcore::{Character, RootSystem, RootVector, TorusVector, Weight};
pub use weyl::{WeylElement, WeylGroup};
