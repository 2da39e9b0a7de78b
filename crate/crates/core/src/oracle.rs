//! Brute-force reference answers by enumerating every measurable set.
//!
//! Each mode transcribes a definition directly and relies on nothing beyond
//! [`crate::measure`], so agreement with the fast paths in `images`,
//! `dynamics` and `tail` is a meaningful cross-check. Sets are handled as
//! `u64` atom masks internally.

use std::collections::HashSet;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::measure::{MSet, MeasurableMap, Rat, Space};

/// Largest enumeration, as a power of two.
pub const LIMIT_BITS: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OracleMode {
    MinimalSupport,
    InvariantSets,
    ForwardInvariantSets,
    WanderingSearch,
    TailSets,
    SeparatedPairs,
    NonsingularMax,
}

impl OracleMode {
    pub const ALL: [OracleMode; 7] = [
        OracleMode::MinimalSupport,
        OracleMode::InvariantSets,
        OracleMode::ForwardInvariantSets,
        OracleMode::WanderingSearch,
        OracleMode::TailSets,
        OracleMode::SeparatedPairs,
        OracleMode::NonsingularMax,
    ];

    pub fn name(self) -> &'static str {
        match self {
            OracleMode::MinimalSupport => "minimal_support",
            OracleMode::InvariantSets => "invariant_sets",
            OracleMode::ForwardInvariantSets => "forward_invariant_sets",
            OracleMode::WanderingSearch => "wandering_search",
            OracleMode::TailSets => "tail_sets",
            OracleMode::SeparatedPairs => "separated_pairs",
            OracleMode::NonsingularMax => "nonsingular_max",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|m| m.name() == name)
    }
}

#[derive(Debug, Clone)]
pub struct OracleRequest<'a> {
    pub map: &'a MeasurableMap,
    pub mode: OracleMode,
    /// The set `A` for `minimal_support` (default `X`) and for
    /// `separated_pairs` (list the sets separated from `A`).
    pub payload: Option<MSet>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OracleAnswer {
    Set(MSet),
    MaybeSet(Option<MSet>),
    Sets(Vec<MSet>),
    Pairs(Vec<(MSet, MSet)>),
}

pub fn brute_force(req: &OracleRequest<'_>) -> Result<OracleAnswer> {
    let map = req.map;
    Ok(match req.mode {
        OracleMode::MinimalSupport => {
            let a = req.payload.clone().unwrap_or_else(|| map.domain().full());
            OracleAnswer::Set(minimal_support(map, &a)?)
        }
        OracleMode::InvariantSets => OracleAnswer::Sets(invariant_sets(map)?),
        OracleMode::ForwardInvariantSets => OracleAnswer::Sets(forward_invariant_sets(map)?),
        OracleMode::WanderingSearch => OracleAnswer::MaybeSet(wandering_search(map)?),
        OracleMode::TailSets => OracleAnswer::Sets(tail_sets(map)?),
        OracleMode::SeparatedPairs => match &req.payload {
            Some(a) => OracleAnswer::Sets(separated_from(map, a)?),
            None => OracleAnswer::Pairs(separated_pairs(map)?),
        },
        OracleMode::NonsingularMax => OracleAnswer::Set(nonsingular_max(map)?),
    })
}

fn cap(bits: usize) -> Result<()> {
    if bits > LIMIT_BITS {
        Err(Error::TooLarge {
            bits,
            limit: LIMIT_BITS,
        })
    } else {
        Ok(())
    }
}

/// Mask-level view of a space.
struct Table {
    n: usize,
    weight: Vec<Rat>,
    positive: u64,
}

impl Table {
    fn of(space: &Space) -> Self {
        let n = space.num_atoms();
        Table {
            n,
            weight: (0..n).map(|a| space.atom_weight(a).clone()).collect(),
            positive: space.positive_part().mask(),
        }
    }

    fn sets(&self) -> std::ops::Range<u64> {
        0..1u64 << self.n
    }

    fn measure(&self, m: u64) -> Rat {
        (0..self.n).filter(|a| m >> a & 1 == 1).map(|a| &self.weight[a]).sum()
    }

    fn null(&self, m: u64) -> bool {
        m & self.positive == 0
    }

    fn sub(&self, a: u64, b: u64) -> bool {
        self.null(a & !b)
    }

    fn eq(&self, a: u64, b: u64) -> bool {
        self.null(a ^ b)
    }
}

/// Exact preimage of every codomain atom, as a domain mask.
fn preimage_table(map: &MeasurableMap) -> Vec<u64> {
    let cod = map.codomain();
    (0..cod.num_atoms())
        .map(|b| map.preimage(&cod.atom(b)).expect("same space").mask())
        .collect()
}

fn preimage_mask(table: &[u64], b: u64) -> u64 {
    (0..table.len())
        .filter(|&i| b >> i & 1 == 1)
        .fold(0, |m, i| m | table[i])
}

fn endomap(map: &MeasurableMap) -> Result<()> {
    if map.is_endomap() {
        Ok(())
    } else {
        Err(Error::NotEndomap)
    }
}

/// The λ′-minimal measurable support of `λ|_A ∘ T⁻¹`, canonical.
pub fn minimal_support(map: &MeasurableMap, a: &MSet) -> Result<MSet> {
    let dom = map.domain();
    let cod = map.codomain();
    dom.check(a)?;
    cap(cod.num_atoms())?;
    let d = Table::of(dom);
    let c = Table::of(cod);
    let pre = preimage_table(map);
    let am = a.mask();
    let full = (1u64 << c.n) - 1;
    // C′ supports the pushforward iff λ(A ∩ T⁻¹(C′ᶜ)) = 0
    let supports: Vec<u64> = c
        .sets()
        .filter(|&s| d.measure(am & preimage_mask(&pre, full & !s)).is_zero())
        .collect();
    let best = *supports
        .iter()
        .min_by(|x, y| c.measure(**x).cmp(&c.measure(**y)).then(x.cmp(y)))
        .expect("the whole codomain is a support");
    if !supports.iter().all(|&s| c.sub(best, s)) {
        return Err(Error::CrossCheck("no λ′-minimal support".into()));
    }
    Ok(cod.from_mask(best & c.positive))
}

fn filter_sets(map: &MeasurableMap, keep: impl Fn(&Table, u64, u64) -> bool) -> Result<Vec<MSet>> {
    endomap(map)?;
    let x = map.domain();
    cap(x.num_atoms())?;
    let t = Table::of(x);
    let pre = preimage_table(map);
    Ok(t.sets()
        .filter(|&m| keep(&t, m, preimage_mask(&pre, m)))
        .map(|m| x.from_mask(m))
        .collect())
}

/// Every set with `A ≐ T⁻¹A`.
pub fn invariant_sets(map: &MeasurableMap) -> Result<Vec<MSet>> {
    filter_sets(map, |t, a, pre| t.eq(a, pre))
}

/// Every set with `A ⊆̇ T⁻¹A`.
pub fn forward_invariant_sets(map: &MeasurableMap) -> Result<Vec<MSet>> {
    filter_sets(map, |t, a, pre| t.sub(a, pre))
}

/// The positive set of lowest mask with `A ∩ T⁻ⁿA ≐ ∅` for every `n ≥ 1`.
pub fn wandering_search(map: &MeasurableMap) -> Result<Option<MSet>> {
    endomap(map)?;
    let x = map.domain();
    cap(x.num_atoms())?;
    let t = Table::of(x);
    let pre = preimage_table(map);
    let found = t.sets().filter(|&a| !t.null(a)).find(|&a| {
        let mut seen = HashSet::new();
        let mut cur = preimage_mask(&pre, a);
        while seen.insert(cur) {
            if !t.null(a & cur) {
                return false;
            }
            cur = preimage_mask(&pre, cur);
        }
        true
    });
    Ok(found.map(|m| x.from_mask(m)))
}

/// Atom-map powers `f⁰, f¹, …` up to the first repeat.
fn powers(map: &MeasurableMap) -> Vec<Vec<usize>> {
    let n = map.domain().num_atoms();
    let f: Vec<usize> = (0..n).map(|a| map.atom_image(a)).collect();
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..n).collect();
    while seen.insert(cur.clone()) {
        let next = cur.iter().map(|&a| f[a]).collect();
        out.push(cur);
        cur = next;
    }
    out
}

/// Every set equal mod λ to a member of `T⁻ⁿ𝒜` for all `n`.
pub fn tail_sets(map: &MeasurableMap) -> Result<Vec<MSet>> {
    endomap(map)?;
    let x = map.domain();
    cap(x.num_atoms())?;
    let t = Table::of(x);
    let ps = powers(map);
    // B ∈ T⁻ⁿ𝒜 iff B is a union of fibres of fⁿ
    let members: Vec<u64> = t
        .sets()
        .filter(|&b| {
            ps.iter().all(|p| {
                (0..t.n).all(|i| {
                    (0..t.n).all(|j| p[i] != p[j] || (b >> i & 1) == (b >> j & 1))
                })
            })
        })
        .collect();
    Ok(t.sets()
        .filter(|&a| members.iter().any(|&b| t.eq(a, b)))
        .map(|m| x.from_mask(m))
        .collect())
}

/// For each power `fⁿ`, the smallest admissible witness `Aₙ` for every set:
/// the atoms `fⁿ(a)` with `a ⊆ A` positive.
fn witness_tables(map: &MeasurableMap, t: &Table) -> Vec<Vec<u64>> {
    powers(map)
        .iter()
        .map(|p| {
            let mut w = vec![0u64; 1 << t.n];
            for m in 1..1u64 << t.n {
                let low = m.trailing_zeros() as usize;
                let bit = if t.positive >> low & 1 == 1 { 1 << p[low] } else { 0 };
                w[m as usize] = w[(m & (m - 1)) as usize] | bit;
            }
            w
        })
        .collect()
}

/// Whether for every `n` some `Aₙ` has `A ⊆̇ T⁻ⁿAₙ` and `B ⊆̇ T⁻ⁿ(Aₙ)ᶜ`.
/// Taking `Aₙ` smallest makes `(Aₙ)ᶜ` largest, so one candidate suffices.
fn separated(t: &Table, powers: &[Vec<usize>], witnesses: &[Vec<u64>], a: u64, b: u64) -> bool {
    powers.iter().zip(witnesses).all(|(p, w)| {
        let an = w[a as usize];
        (0..t.n).all(|i| b >> i & 1 == 0 || t.positive >> i & 1 == 0 || an >> p[i] & 1 == 0)
    })
}

/// All pairs of positive sets that remain separated.
pub fn separated_pairs(map: &MeasurableMap) -> Result<Vec<(MSet, MSet)>> {
    Ok(separated_pair_masks(map)?
        .into_iter()
        .map(|(a, b)| (map.domain().from_mask(a), map.domain().from_mask(b)))
        .collect())
}

/// [`separated_pairs`] as atom masks.
pub fn separated_pair_masks(map: &MeasurableMap) -> Result<Vec<(u64, u64)>> {
    endomap(map)?;
    let x = map.domain();
    cap(2 * x.num_atoms())?;
    let t = Table::of(x);
    let ps = powers(map);
    let ws = witness_tables(map, &t);
    let positive: Vec<u64> = t.sets().filter(|&m| !t.null(m)).collect();
    let mut out = Vec::new();
    for &a in &positive {
        for &b in &positive {
            if separated(&t, &ps, &ws, a, b) {
                out.push((a, b));
            }
        }
    }
    Ok(out)
}

/// Every set (positive or not) remaining separated from `a`.
pub fn separated_from(map: &MeasurableMap, a: &MSet) -> Result<Vec<MSet>> {
    endomap(map)?;
    let x = map.domain();
    x.check(a)?;
    cap(x.num_atoms())?;
    let t = Table::of(x);
    let ps = powers(map);
    let ws = witness_tables(map, &t);
    let am = a.mask();
    Ok(t.sets()
        .filter(|&b| separated(&t, &ps, &ws, am, b))
        .map(|m| x.from_mask(m))
        .collect())
}

/// The largest set `A` on which `T` restricts to a nonsingular system:
/// `A ⊆̇ T⁻¹A`, and for every atom `b ⊆ A`, `λ(b) > 0` iff
/// `λ(A ∩ T⁻¹b) > 0`. Canonical.
pub fn nonsingular_max(map: &MeasurableMap) -> Result<MSet> {
    endomap(map)?;
    let x = map.domain();
    cap(x.num_atoms())?;
    let t = Table::of(x);
    let pre = preimage_table(map);
    let good: Vec<u64> = t
        .sets()
        .filter(|&a| {
            t.sub(a, preimage_mask(&pre, a))
                && (0..t.n)
                    .filter(|&b| a >> b & 1 == 1)
                    .all(|b| (t.positive >> b & 1 == 1) == !t.null(a & pre[b]))
        })
        .collect();
    let best = *good
        .iter()
        .max_by(|p, q| t.measure(**p).cmp(&t.measure(**q)).then(q.cmp(p)))
        .expect("∅ qualifies");
    if !good.iter().all(|&g| t.sub(g, best)) {
        return Err(Error::CrossCheck("no largest nonsingular set".into()));
    }
    Ok(x.from_mask(best & t.positive))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn minimal_support_of_null_set_is_empty() {
        let e = fixtures::ex1a();
        assert!(minimal_support(e.map(), &e.space().atom(1)).unwrap().is_empty());
        assert_eq!(minimal_support(e.map(), &e.space().full()).unwrap(), e.space().atom(0));
    }

    #[test]
    fn rot3_invariant_sets_are_trivial() {
        let r = fixtures::rot3();
        let sets = invariant_sets(r.map()).unwrap();
        assert_eq!(sets, vec![r.space().empty(), r.space().full()]);
    }

    #[test]
    fn grid_nonsingular_max() {
        let g = fixtures::grid(2);
        assert_eq!(nonsingular_max(g.map()).unwrap(), g.space().atom(4));
    }

    #[test]
    fn wandering_and_separation() {
        let c = fixtures::collapse();
        assert_eq!(wandering_search(c.map()).unwrap(), Some(c.space().atom(0)));
        assert_eq!(wandering_search(fixtures::rot3().map()).unwrap(), None);
        let r = fixtures::rot3();
        let pairs = separated_pair_masks(r.map()).unwrap();
        assert!(pairs.contains(&(0b001, 0b010)));
        assert!(!pairs.contains(&(0b011, 0b010)));
        assert_eq!(tail_sets(r.map()).unwrap().len(), 8);
        assert_eq!(tail_sets(c.map()).unwrap().len(), 2);
    }

    #[test]
    fn size_cap() {
        let g = fixtures::grid(6);
        assert_eq!(g.space().num_atoms(), 23);
        assert_eq!(
            invariant_sets(g.map()).unwrap_err(),
            Error::TooLarge { bits: 23, limit: 20 }
        );
        let g = fixtures::grid(4);
        assert!(matches!(separated_pairs(g.map()), Err(Error::TooLarge { bits: 24, .. })));
    }
}
