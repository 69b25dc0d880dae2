//! Named chains: employee firing on trees, the to-do list, card shuffles and rock chipping.

pub mod rock;
pub mod shuffle;
pub mod todo;
pub mod tree;

use std::fmt;
use std::sync::Arc;

use crate::rational::Rational;

/// A named function on states, optionally registered as a right eigenfunction.
#[derive(Clone)]
pub struct Observable<B> {
    pub name: String,
    eval: Arc<dyn Fn(&B) -> Rational + Send + Sync>,
    pub eigenvalue: Option<Rational>,
}

impl<B> Observable<B> {
    pub fn new(name: impl Into<String>, eval: impl Fn(&B) -> Rational + Send + Sync + 'static) -> Self {
        Observable { name: name.into(), eval: Arc::new(eval), eigenvalue: None }
    }

    pub fn with_eigenvalue(mut self, beta: Rational) -> Self {
        self.eigenvalue = Some(beta);
        self
    }

    pub fn eval(&self, x: &B) -> Rational {
        (self.eval)(x)
    }
}

impl<B> fmt::Debug for Observable<B> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Observable").field("name", &self.name).field("eigenvalue", &self.eigenvalue).finish()
    }
}
