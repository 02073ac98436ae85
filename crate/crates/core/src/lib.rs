//! Exact characteristic-class calculus in bigraded ring cohomology theories
//! with coefficients in ℤ/ℓ.
//!
//! The crate models cohomology rings of projective spaces, products,
//! Grassmannians and projective bundles as finitely presented quotient rings,
//! evaluates multiplicative genera through the splitting principle, applies
//! ring operations given by characteristic series, computes proper
//! pushforwards, and checks Wu, Riemann–Roch and vanishing identities on
//! concrete instances.

pub mod catalog;
pub mod cli;
pub mod chern;
pub mod coeff;
pub mod error;
pub mod expr;
pub mod linalg;
pub mod operations;
pub mod pushforward;
pub mod ring;
pub mod series;
pub mod spaces;
pub mod symmetric;
pub mod verify;
pub mod workspace;

pub use coeff::{Coeff, Prime};
pub use error::{Error, Result};
pub use ring::{Bidegree, Elem, GenRole, Generator, Monomial, Poly, Presentation, RingCtx};
pub use series::Series;
