//! Executable forms of the identities relating essential images, preimages,
//! invariance, recurrence, tail sets and exactness.
//!
//! Each `check_*` function evaluates one family of identities on a given
//! map or system and returns the first violation found. Quantifiers over a
//! single set are exhaustive; quantifiers over pairs are exhaustive up to
//! [`PAIR_EXHAUSTIVE_ATOMS`] atoms and otherwise run over a fixed family of
//! partners (see [`partners`]).

use std::fmt;

use rand::Rng;

use crate::measure::{MSet, Space};

mod maps;
mod markov;
mod oracle;
mod systems;
mod tail;

pub use maps::{check_composition, check_map_laws, check_oracle_support};
pub use markov::{check_markov_laws, MARKOV_DEPTHS};
pub use oracle::check_oracle_agreement;
pub use systems::check_system_laws;
pub use tail::check_tail_laws;

/// Largest atom count for which every set is enumerated.
pub const SET_EXHAUSTIVE_ATOMS: usize = 10;
/// Largest atom count for which every pair of sets is enumerated.
pub const PAIR_EXHAUSTIVE_ATOMS: usize = 5;
/// Random partners added to the fixed partner family.
pub const RANDOM_PARTNERS: usize = 16;

/// A failed identity: which one, and on what input.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub law: &'static str,
    pub detail: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.law, self.detail)
    }
}

impl std::error::Error for Violation {}

pub type LawResult = std::result::Result<(), Violation>;

pub(crate) fn fail(law: &'static str, detail: impl Into<String>) -> LawResult {
    Err(Violation {
        law,
        detail: detail.into(),
    })
}

/// Fails with `law` unless `cond` holds; `detail` is only built on failure.
pub(crate) fn ensure(cond: bool, law: &'static str, detail: impl FnOnce() -> String) -> LawResult {
    if cond {
        Ok(())
    } else {
        fail(law, detail())
    }
}

/// Lifts a library error into a violation of `law`.
pub(crate) fn lift<T>(r: crate::Result<T>, law: &'static str) -> std::result::Result<T, Violation> {
    r.map_err(|e| Violation {
        law,
        detail: e.to_string(),
    })
}

/// Every set of the space, indexed by atom mask.
pub fn all_sets(space: &Space) -> Vec<MSet> {
    let n = space.num_atoms();
    assert!(n <= SET_EXHAUSTIVE_ATOMS, "{n} atoms is too many to enumerate");
    (0..1u64 << n).map(|m| space.from_mask(m)).collect()
}

/// Second arguments for pair quantifiers: every set when the space is small,
/// otherwise `∅`, `X`, each atom, each atom complement and
/// [`RANDOM_PARTNERS`] random sets.
pub fn partners<R: Rng>(space: &Space, rng: &mut R) -> Vec<MSet> {
    let n = space.num_atoms();
    if n <= PAIR_EXHAUSTIVE_ATOMS {
        return all_sets(space);
    }
    let mut out = vec![space.empty(), space.full()];
    for a in 0..n {
        out.push(space.atom(a));
        out.push(space.complement(&space.atom(a)));
    }
    for _ in 0..RANDOM_PARTNERS {
        out.push(space.from_atoms((0..n).filter(|_| rng.gen_bool(0.5))));
    }
    out
}

pub(crate) fn show(space: &Space, a: &MSet) -> String {
    format!("{{{}}}", space.display_set(a))
}
