//! Identities for invariance, hulls, nonsingularity, recurrence and
//! conservative ergodicity of a system.

use num_traits::Zero;

use super::{all_sets, check_composition, ensure, lift, show, LawResult};
use crate::dynamics::{DynSystem, HullKind, InvarianceKind};
use crate::images;
use crate::measure::MSet;
use crate::oracle;

/// Union over `n ≥ 1` of `T̂ⁿA`, and the lim sup (union over the cycle).
fn forward_unions(s: &DynSystem, a: &MSet) -> (MSet, MSet) {
    let x = s.space();
    let o = s.image_orbit(a);
    let after = o.values_from(1).fold(x.empty(), |u, p| u.union(p));
    let limsup = o.period.iter().fold(x.empty(), |u, p| u.union(p));
    (after, limsup)
}

/// Every identity about a single system, exhaustively over all sets.
/// Requires at most 10 atoms.
pub fn check_system_laws(s: &DynSystem) -> LawResult {
    let x = s.space().clone();
    let map = s.map();
    let sets = all_sets(&x);
    let full = x.full();
    let class = lift(s.classify(), "classification")?;

    // nonsingularity
    let tx = s.image(&full);
    let pushed = lift(images::pushforward(map, &full), "pushforward")?;
    let equivalent = (0..x.num_atoms()).all(|b| x.is_positive_atom(b) == !pushed[b].is_zero());
    ensure(
        class.nonsingular == x.ae_eq(&tx, &full) && class.nonsingular == equivalent,
        "nonsingular iff T̂X ≐ X iff λ∘T⁻¹ ≃ λ",
        String::new,
    )?;

    let mut recurrent_all = true;
    let mut limsup_all = true;
    let mut complement_closed = true;
    let mut ce_union = true;
    let mut ce_limsup = true;
    let mut ce_absorbing = true;
    let fwd_sets = lift(oracle::forward_invariant_sets(map), "oracle")?;
    let inv_sets = lift(oracle::invariant_sets(map), "oracle")?;
    for a in &sets {
        let positive = !x.is_null(a);
        let by_pre = s.is_wandering_by_preimages(a);
        ensure(by_pre == s.is_wandering_by_images(a), "wandering tests agree", || show(&x, a))?;
        let fwd = lift(s.invariance_check(a, InvarianceKind::Forward), "forward invariance")?;
        let inv = lift(s.invariance_check(a, InvarianceKind::Full), "invariance")?;
        ensure(!inv || fwd, "invariant sets are forward invariant", || show(&x, a))?;

        let (after, limsup) = forward_unions(s, a);
        recurrent_all &= x.ae_subset(a, &after);
        limsup_all &= x.ae_subset(a, &limsup);
        let ac = x.complement(a);
        if x.ae_subset(&s.image(a), a) {
            complement_closed &= x.ae_subset(&s.image(&ac), &ac);
        }
        if positive {
            ce_union &= x.ae_eq(&after, &full);
            ce_limsup &= x.ae_eq(&limsup, &full);
            if x.ae_subset(&s.image(a), a) {
                ce_absorbing &= x.ae_eq(a, &full);
            }
        }

        // hulls are the least (forward) invariant sets containing A
        for (kind, family) in [(HullKind::Forward, &fwd_sets), (HullKind::Invariant, &inv_sets)] {
            let h = lift(s.hull(a, kind), "hull")?;
            ensure(family.iter().any(|z| x.ae_eq(z, &h)), "hull is invariant", || show(&x, a))?;
            ensure(
                family
                    .iter()
                    .filter(|z| x.ae_subset(a, z))
                    .all(|z| x.ae_subset(&h, z)),
                "hull minimality",
                || show(&x, a),
            )?;
        }
    }
    let wandering = lift(oracle::wandering_search(map), "oracle")?;
    let conservative = class.conservative;
    ensure(
        conservative == wandering.is_none()
            && conservative == recurrent_all
            && conservative == limsup_all
            && conservative == complement_closed,
        "conservativity characterizations agree",
        || {
            format!(
                "classify {conservative}, oracle {}, ⋃T̂ⁿ {recurrent_all}, lim sup {limsup_all}, complements {complement_closed}",
                wandering.is_none()
            )
        },
    )?;
    ensure(!conservative || class.nonsingular, "conservative ⇒ nonsingular", String::new)?;

    let ce = conservative && class.ergodic;
    ensure(
        ce == ce_union && ce == ce_limsup && ce == ce_absorbing,
        "conservative ergodic characterizations agree",
        || format!("classify {ce}, ⋃T̂ⁿ {ce_union}, lim sup {ce_limsup}, absorbing {ce_absorbing}"),
    )?;
    let trivial = inv_sets
        .iter()
        .all(|z| x.is_null(z) || x.is_null(&x.complement(z)));
    ensure(class.ergodic == trivial, "ergodic iff invariant sets are trivial", String::new)?;

    // nonsingular part
    let part = s.nonsingular_part();
    let best = lift(oracle::nonsingular_max(map), "oracle")?;
    ensure(x.ae_eq(&part.set, &best), "nonsingular part is the largest nonsingular set", || {
        format!("{} vs {}", show(&x, &part.set), show(&x, &best))
    })?;
    ensure(x.ae_eq(&s.image(&part.set), &part.set), "T̂ fixes the nonsingular part", String::new)?;
    ensure(
        part.chain.windows(2).all(|w| w[1].is_subset(&w[0]) && w[1] != w[0]),
        "nonsingular chain strictly decreases",
        String::new,
    )?;
    for a in &sets {
        if x.ae_eq(&s.image(a), a) {
            ensure(x.ae_subset(a, &part.set), "nonsingular sets lie in the nonsingular part", || {
                show(&x, a)
            })?;
        }
    }
    let sub = lift(s.restrict(&part.set), "restriction")?;
    let sub_class = lift(sub.classify(), "classification")?;
    ensure(sub_class.nonsingular, "restriction to the nonsingular part is nonsingular", String::new)?;

    // powers of T̂ agree with images under powers of T
    let mut power = map.clone();
    for n in 2..=3 {
        check_composition(&power, map)?;
        power = lift(power.then(map), "composition")?;
        for a in &sets {
            let direct = lift(images::essential_image(&power, a), "essential_image")?;
            ensure(x.ae_eq(&direct, &s.image_power(a, n)), "(Tⁿ)^A ≐ T̂ⁿA", || show(&x, a))?;
        }
    }
    Ok(())
}
