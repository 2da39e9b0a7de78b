//! Eventually periodic orbits of deterministic maps on finite state spaces.
//!
//! On a finite lattice every orbit `x, f(x), f²(x), …` enters a cycle after a
//! preperiod. A statement "for all n ≥ 0" about such an orbit holds iff it
//! holds on the preperiod plus one full period, so every quantifier over
//! time in this crate is decided on that window.

use std::collections::HashMap;
use std::hash::Hash;

use num_integer::Integer;

/// An eventually periodic sequence `pre[0], …, pre[k-1], period[0], …`,
/// repeating `period` forever.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Orbit<T> {
    pub pre: Vec<T>,
    pub period: Vec<T>,
}

impl<T> Orbit<T> {
    /// Wraps an explicit preperiod and (nonempty) period.
    pub fn new(pre: Vec<T>, period: Vec<T>) -> Self {
        assert!(!period.is_empty(), "period must be nonempty");
        Orbit { pre, period }
    }

    pub fn preperiod(&self) -> usize {
        self.pre.len()
    }

    pub fn period_len(&self) -> usize {
        self.period.len()
    }

    /// Length of the window `pre ++ period`.
    pub fn window(&self) -> usize {
        self.pre.len() + self.period.len()
    }

    /// The n-th term.
    pub fn get(&self, n: usize) -> &T {
        if n < self.pre.len() {
            &self.pre[n]
        } else {
            &self.period[(n - self.pre.len()) % self.period.len()]
        }
    }

    /// Every value taken at some time `n ≥ from`.
    pub fn values_from(&self, from: usize) -> impl Iterator<Item = &T> {
        let end = from.max(self.pre.len()) + self.period.len();
        (from..end).map(move |n| self.get(n))
    }

    /// Every value of the sequence, preperiod first.
    pub fn iter(&self) -> impl Iterator<Item = &T> {
        self.pre.iter().chain(self.period.iter())
    }

    pub fn map<U>(&self, mut f: impl FnMut(&T) -> U) -> Orbit<U> {
        Orbit {
            pre: self.pre.iter().map(&mut f).collect(),
            period: self.period.iter().map(&mut f).collect(),
        }
    }

    /// Shifts the sequence by one: `(xₙ₊₁)ₙ`.
    pub fn shifted(&self) -> Orbit<T>
    where
        T: Clone,
    {
        if self.pre.is_empty() {
            let mut period = self.period.clone();
            period.rotate_left(1);
            Orbit::new(Vec::new(), period)
        } else {
            Orbit::new(self.pre[1..].to_vec(), self.period.clone())
        }
    }
}

/// Iterates `step` from `start` until the first repeated value.
pub fn orbit<T, F>(start: T, mut step: F) -> Orbit<T>
where
    T: Clone + Eq + Hash,
    F: FnMut(&T) -> T,
{
    let mut seen: HashMap<T, usize> = HashMap::new();
    let mut seq = Vec::new();
    let mut cur = start;
    loop {
        if let Some(&first) = seen.get(&cur) {
            let period = seq.split_off(first);
            return Orbit::new(seq, period);
        }
        let next = step(&cur);
        seen.insert(cur.clone(), seq.len());
        seq.push(cur);
        cur = next;
    }
}

/// Smallest `N` such that checking times `0..N` covers every joint state of
/// two eventually periodic sequences.
pub fn joint_window<T, U>(a: &Orbit<T>, b: &Orbit<U>) -> usize {
    a.preperiod().max(b.preperiod()) + a.period_len().lcm(&b.period_len())
}
