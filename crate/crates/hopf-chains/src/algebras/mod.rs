//! Concrete Hopf algebras and their state enumerations.

mod ck;
mod fqsym;
mod shuffle;
mod syme;
mod words;

pub use ck::{unlabelled_forests, Arena, ConnesKreimer, Forest, Tree};
pub use fqsym::{Fqsym, FqsymDual};
pub use shuffle::{deck_states, FreeAssociative, ShuffleAlgebra};
pub use syme::{partitions, IntPartition, SymE};
pub use words::{all_words, multiset_permutations, permutations, standardise, Permutation, Word};

use crate::error::{Error, Result};

/// Default limit on state-space size.
pub const DEFAULT_STATE_CAP: usize = 5000;

pub(crate) fn check_cap<T>(states: Vec<T>, cap: usize) -> Result<Vec<T>> {
    if states.len() > cap {
        return Err(Error::CapExceeded { cap });
    }
    Ok(states)
}

/// `S_n` in lexicographic order, refusing more than `cap` states.
pub fn permutation_states(n: usize, cap: usize) -> Result<Vec<Permutation>> {
    let mut count: usize = 1;
    for k in 2..=n {
        count = count.saturating_mul(k);
        if count > cap {
            return Err(Error::CapExceeded { cap });
        }
    }
    Ok(permutations(n))
}

/// Rearrangements of a deck multiset.
pub fn deck_word_states(deck: &[u32], cap: usize) -> Result<Vec<Word>> {
    let mut sorted = deck.to_vec();
    sorted.sort_unstable();
    let mut count = crate::rational::factorial(deck.len());
    for run in sorted.chunk_by(|a, b| a == b) {
        count /= crate::rational::factorial(run.len());
    }
    if count > cap.into() {
        return Err(Error::CapExceeded { cap });
    }
    Ok(deck_states(deck))
}

pub fn partition_states(n: usize, cap: usize) -> Result<Vec<IntPartition>> {
    check_cap(partitions(n), cap)
}
