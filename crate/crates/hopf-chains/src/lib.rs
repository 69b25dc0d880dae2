//! Markov chains whose transition matrices are Doob transforms of descent
//! operators `m∆_P` on combinatorial Hopf algebras, in exact rational arithmetic.
//!
//! ```
//! use hopf_chains::prelude::*;
//!
//! let h = Hopf::new(Fqsym);
//! let p = OperatorKind::Ter.distribution(3).unwrap();
//! let spec = ChainSpec::new(&h, p, permutation_states(3, 100).unwrap());
//! let k = spec.build_transition_matrix().unwrap();
//! let id = Permutation::identity(3);
//! let row = k.distribution_at_time(&id, 1).unwrap();
//! assert_eq!(row.len(), 3);
//! ```

pub mod algebras;
pub mod catalog;
pub mod chain;
pub mod composition;
pub mod element;
pub mod error;
pub mod hopf;
pub mod linalg;
pub mod rational;
pub mod sim;
pub mod spectral;
pub mod verify;

pub mod prelude {
    pub use crate::algebras::*;
    pub use crate::chain::{ChainSpec, TransitionMatrix};
    pub use crate::composition::{
        compose_descent, internal_product, CompositionSum, OperatorKind, Orientation, PieceDistribution,
        WeakComposition,
    };
    pub use crate::element::Element;
    pub use crate::error::{Error, Result};
    pub use crate::hopf::{Hopf, HopfAlgebra, StateCodec};
    pub use crate::rational::{fmt_rational, int, parse_rational, rat, Rational};
}
