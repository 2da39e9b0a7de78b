//! Identities for a single null-preserving map `T: X → X′`.

use std::sync::Arc;

use num_traits::Zero;
use rand::Rng;

use super::{all_sets, ensure, lift, partners, show, LawResult};
use crate::images::{self, Density};
use crate::measure::{rat, MSet, MeasurableMap, Rat, Space};
use crate::oracle;
use crate::random;

/// Smallest `M′` with `A ⊆̇ T⁻¹M′`: the targets of the positive atoms of `A`.
fn smallest_target(map: &MeasurableMap, a: &MSet) -> MSet {
    let dom = map.domain();
    map.codomain().from_atoms(
        a.atoms()
            .filter(|&i| dom.is_positive_atom(i))
            .map(|i| map.atom_image(i)),
    )
}

fn random_factors<R: Rng>(rng: &mut R, space: &Space) -> Vec<Rat> {
    (0..space.num_points())
        .map(|_| rat(rng.gen_range(1..=5), rng.gen_range(1..=5)))
        .collect()
}

/// Positivity, monotonicity, the image/preimage adjunction, section and
/// retraction identities, finite unions and intersections, independence of
/// the version of `T` and of equivalent rescalings, agreement with the
/// transfer operator and with set images, and the axiomatic
/// characterization.
pub fn check_map_laws<R: Rng>(map: &MeasurableMap, rng: &mut R) -> LawResult {
    let x = map.domain().clone();
    let y = map.codomain().clone();
    let xs = all_sets(&x);
    let ys = all_sets(&y);
    let x_partners = partners(&x, rng);
    let y_partners = partners(&y, rng);
    let img: Vec<MSet> = xs
        .iter()
        .map(|a| lift(images::essential_image(map, a), "essential_image"))
        .collect::<Result<_, _>>()?;
    let pre: Vec<MSet> = ys
        .iter()
        .map(|b| lift(map.preimage(b), "preimage"))
        .collect::<Result<_, _>>()?;
    let image = |a: &MSet| &img[a.mask() as usize];
    let preimage = |b: &MSet| &pre[b.mask() as usize];
    let tx = image(&x.full()).clone();

    for (a, ta) in xs.iter().zip(&img) {
        ensure(x.is_null(a) == y.is_null(ta), "positivity", || show(&x, a))?;
        ensure(x.ae_subset(a, preimage(ta)), "A ⊆̇ T⁻¹T̂A", || show(&x, a))?;
        let via = lift(images::essential_image_via_transfer(map, a), "transfer")?;
        ensure(&via == ta, "T̂A ≐ {T̂1_A > 0}", || show(&x, a))?;
        let union = a
            .atoms()
            .fold(y.empty(), |u, i| u.union(image(&x.atom(i))));
        ensure(&union == ta, "T̂ of a union of atoms", || show(&x, a))?;
        lift(images::set_image_report(map, a), "set image report")?;
    }

    for (b, tb) in ys.iter().zip(&pre) {
        ensure(
            x.is_null(tb) == y.is_null(&tx.intersection(b)),
            "backward positivity",
            || show(&y, b),
        )?;
        ensure(
            y.ae_eq(image(tb), &tx.intersection(b)),
            "T̂T⁻¹B′ ≐ T̂X ∩ B′",
            || show(&y, b),
        )?;
        ensure(
            x.ae_eq(preimage(&tx.intersection(b)), tb),
            "T⁻¹(T̂X ∩ B′) ≐ T⁻¹B′",
            || show(&y, b),
        )?;
        ensure(
            preimage(&y.complement(b)) == &x.complement(tb),
            "T⁻¹ commutes with complements",
            || show(&y, b),
        )?;
        for c in &y_partners {
            let (tc, ta_c) = (preimage(c), tx.intersection(c));
            ensure(
                x.ae_subset(tb, tc) == y.ae_subset(&tx.intersection(b), &ta_c),
                "T⁻¹A′ ⊆̇ T⁻¹B′ iff T̂X∩A′ ⊆̇ T̂X∩B′",
                || format!("{} {}", show(&y, b), show(&y, c)),
            )?;
            ensure(
                preimage(&b.union(c)) == &tb.union(tc)
                    && preimage(&b.intersection(c)) == &tb.intersection(tc),
                "T⁻¹ distributes over ∪ and ∩",
                || format!("{} {}", show(&y, b), show(&y, c)),
            )?;
            if y.ae_subset(b, c) {
                ensure(x.ae_subset(tb, tc), "T⁻¹ is monotone", || {
                    format!("{} {}", show(&y, b), show(&y, c))
                })?;
            }
        }
    }

    for (a, ta) in xs.iter().zip(&img) {
        for b in &x_partners {
            let tb = image(b);
            let pair = || format!("{} {}", show(&x, a), show(&x, b));
            if x.ae_eq(a, b) {
                ensure(y.ae_eq(ta, tb), "A ≐ B ⇒ T̂A ≐ T̂B", pair)?;
            }
            if x.ae_subset(a, b) {
                ensure(y.ae_subset(ta, tb), "A ⊆̇ B ⇒ T̂A ⊆̇ T̂B", pair)?;
            }
            ensure(image(&a.union(b)) == &ta.union(tb), "T̂(A ∪ B) ≐ T̂A ∪ T̂B", pair)?;
            ensure(
                y.ae_subset(image(&a.intersection(b)), &ta.intersection(tb)),
                "T̂(A ∩ B) ⊆̇ T̂A ∩ T̂B",
                pair,
            )?;
            let m = smallest_target(map, a);
            let split = x.ae_subset(b, &x.complement(preimage(&m)));
            ensure(
                split == y.is_null(&ta.intersection(tb)),
                "∃M′ separating A, B iff T̂A ∩ T̂B ≐ ∅",
                pair,
            )?;
        }
        for b in &y_partners {
            let tb = preimage(b);
            let pair = || format!("{} {}", show(&x, a), show(&y, b));
            ensure(
                x.ae_subset(a, tb) == y.ae_subset(ta, b),
                "A ⊆̇ T⁻¹B′ iff T̂A ⊆̇ B′",
                pair,
            )?;
            if x.ae_eq(a, tb) {
                ensure(x.ae_eq(a, preimage(ta)), "A ≐ T⁻¹B′ ⇒ A ≐ T⁻¹T̂A", pair)?;
            }
            ensure(
                y.ae_eq(image(&a.intersection(tb)), &ta.intersection(b)),
                "T̂(A ∩ T⁻¹B′) ≐ T̂A ∩ B′",
                pair,
            )?;
        }
    }

    // transfer duality on a random density against every atom indicator
    let u = lift(
        Density::new(&x, (0..x.num_atoms()).map(|_| random::random_weight(rng)).collect()),
        "density",
    )?;
    let tu = lift(images::transfer_density(map, &u), "transfer")?;
    for b in 0..y.num_atoms() {
        let lhs = u.integral(&x, preimage(&y.atom(b)));
        let rhs = tu.integral(&y, &y.atom(b));
        ensure(lhs == rhs, "transfer duality", || format!("atom {}", y.atom_name(b)))?;
        if !y.is_positive_atom(b) {
            ensure(tu.value(b).is_zero(), "transfer vanishes on null atoms", || {
                y.atom_name(b).to_string()
            })?;
        }
    }

    // measurable images without ambitious null sets: T̂A ≐ TA
    if images::find_ambitious_null_set(map).is_none() {
        for (a, ta) in xs.iter().zip(&img) {
            let pts = lift(map.point_image_set(a), "point image")?;
            if y.is_atom_union(&pts) {
                ensure(y.ae_eq(ta, &y.hull_of_points(&pts)), "T̂A ≐ TA", || show(&x, a))?;
            }
        }
    }
    let purged = lift(images::purge_ambitious_null_sets(map), "purge")?;
    ensure(
        images::find_ambitious_null_set(&purged.map).is_none() && x.ae_eq(&purged.kept, &x.full()),
        "purged map has no ambitious null sets",
        String::new,
    )?;

    // a version of T that differs on null points
    let version = random::reroute_null_points(rng, map);
    for (a, ta) in xs.iter().zip(&img) {
        let tv = lift(images::essential_image(&version, a), "essential_image")?;
        ensure(&tv == ta, "T̂ ignores changes of T on null sets", || show(&x, a))?;
    }

    // equivalent rescalings of λ and λ′
    let x2 = Arc::new(lift(x.reweighted(&random_factors(rng, &x)), "reweight")?);
    let y2 = if map.is_endomap() {
        x2.clone()
    } else {
        Arc::new(lift(y.reweighted(&random_factors(rng, &y)), "reweight")?)
    };
    let scaled = lift(map.rebased(x2.clone(), y2.clone()), "rebase")?;
    for (a, ta) in xs.iter().zip(&img) {
        let ts = lift(images::essential_image(&scaled, &x2.transport(a)), "essential_image")?;
        ensure(ts.mask() == ta.mask(), "T̂ ignores equivalent rescaling", || show(&x, a))?;
    }

    if x.num_atoms() <= 8 {
        let r = lift(images::verify_image_axioms(map, &img), "image axioms")?;
        ensure(r.holds && r.agrees_with_essential_image, "T̂ satisfies the image axioms", || {
            format!("{:?}", r.violation)
        })?;
    }
    Ok(())
}

/// `(T′∘T)^A ≐ T̂′T̂A` for every `A`.
pub fn check_composition(t: &MeasurableMap, next: &MeasurableMap) -> LawResult {
    let composed = lift(t.then(next), "composition")?;
    let x = t.domain();
    let z = next.codomain();
    for a in all_sets(x) {
        let direct = lift(images::essential_image(&composed, &a), "essential_image")?;
        let mid = lift(images::essential_image(t, &a), "essential_image")?;
        let stepwise = lift(images::essential_image(next, &mid), "essential_image")?;
        ensure(z.ae_eq(&direct, &stepwise), "(T′∘T)^A ≐ T̂′T̂A", || show(x, &a))?;
    }
    Ok(())
}

/// The fast essential image equals the brute-force minimal support on each
/// of `sets`.
pub fn check_oracle_support(map: &MeasurableMap, sets: &[MSet]) -> LawResult {
    for a in sets {
        let fast = lift(images::essential_image(map, a), "essential_image")?;
        let slow = lift(oracle::minimal_support(map, a), "oracle")?;
        ensure(fast == slow, "essential image equals minimal support", || {
            show(map.domain(), a)
        })?;
    }
    Ok(())
}
