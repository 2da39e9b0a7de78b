//! Agreement of the fast algorithms with brute-force enumeration.

use rand::Rng;

use super::{ensure, lift, show, LawResult, SET_EXHAUSTIVE_ATOMS};
use crate::dynamics::{DynSystem, InvarianceKind};
use crate::measure::MSet;
use crate::oracle::{self, LIMIT_BITS};
use crate::tail;

/// Random sets compared by minimal support beyond [`SET_EXHAUSTIVE_ATOMS`].
const SUPPORT_SAMPLES: usize = 64;

/// Essential images, nonsingular part, invariant and forward invariant sets,
/// tail sets and separated pairs agree with the oracle. Requires at most
/// [`LIMIT_BITS`] atoms.
pub fn check_oracle_agreement<R: Rng>(s: &DynSystem, rng: &mut R) -> LawResult {
    let x = s.space().clone();
    let n = x.num_atoms();
    let map = s.map();
    let every: Vec<MSet> = (0..1u64 << n).map(|m| x.from_mask(m)).collect();

    let probes: Vec<MSet> = if n <= SET_EXHAUSTIVE_ATOMS {
        every.clone()
    } else {
        let mut v = vec![x.empty(), x.full()];
        v.extend((0..n).map(|a| x.atom(a)));
        v.extend((0..SUPPORT_SAMPLES).map(|_| x.from_atoms((0..n).filter(|_| rng.gen_bool(0.5)))));
        v
    };
    super::check_oracle_support(map, &probes)?;

    let part = s.nonsingular_part();
    let best = lift(oracle::nonsingular_max(map), "oracle")?;
    ensure(part.set == best, "nonsingular part agrees with the oracle", || {
        format!("{} vs {}", show(&x, &part.set), show(&x, &best))
    })?;

    let membership = |sets: Vec<MSet>| {
        let mut v = vec![false; every.len()];
        for a in sets {
            v[a.mask() as usize] = true;
        }
        v
    };
    let inv = membership(lift(oracle::invariant_sets(map), "oracle")?);
    let fwd = membership(lift(oracle::forward_invariant_sets(map), "oracle")?);
    let tails = membership(lift(oracle::tail_sets(map), "oracle")?);
    let algebra = tail::tail_algebra(s);
    for a in &every {
        let m = a.mask() as usize;
        let i = lift(s.invariance_check(a, InvarianceKind::Full), "invariance")?;
        let f = lift(s.invariance_check(a, InvarianceKind::Forward), "forward invariance")?;
        ensure(i == inv[m] && f == fwd[m], "invariance agrees with the oracle", || show(&x, a))?;
        ensure(
            algebra.contains_mod_null(s, a) == tails[m],
            "tail sets agree with the oracle",
            || show(&x, a),
        )?;
    }

    // tail hulls of sets are unions of the hulls of their atoms
    let mut atom_hulls = Vec::with_capacity(n);
    for a in 0..n {
        atom_hulls.push(lift(tail::tail_hull(s, &x.atom(a)), "tail hull")?.mask());
    }
    let positive = x.positive_part().mask();
    let hull_of = |m: u64| {
        (0..n)
            .filter(|&a| m >> a & 1 == 1)
            .fold(0u64, |u, a| u | atom_hulls[a])
    };
    let hulls: Vec<u64> = (0..1u64 << n).map(hull_of).collect();
    let separated = |a: u64, b: u64| hulls[a as usize] & hulls[b as usize] & positive == 0;
    if 2 * n <= LIMIT_BITS {
        let slow = lift(oracle::separated_pair_masks(map), "oracle")?;
        let fast: Vec<(u64, u64)> = (0..1u64 << n)
            .filter(|&a| a & positive != 0)
            .flat_map(|a| {
                (0..1u64 << n)
                    .filter(move |&b| b & positive != 0)
                    .map(move |b| (a, b))
            })
            .filter(|&(a, b)| separated(a, b))
            .collect();
        ensure(fast == slow, "separated pairs agree with the oracle", || {
            format!("{} fast, {} oracle", fast.len(), slow.len())
        })?;
    } else {
        for a in 0..n {
            let slow: Vec<u64> = lift(oracle::separated_from(map, &x.atom(a)), "oracle")?
                .iter()
                .map(MSet::mask)
                .collect();
            let fast: Vec<u64> = (0..1u64 << n).filter(|&b| separated(1 << a, b)).collect();
            ensure(fast == slow, "sets separated from an atom agree with the oracle", || {
                x.atom_name(a).to_string()
            })?;
        }
    }
    Ok(())
}
