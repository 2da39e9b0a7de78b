//! Identities for tail sets, corridors, separation, tail hulls and
//! exactness.

use num_traits::{One, Zero};
use rand::Rng;

use super::{all_sets, ensure, lift, partners, show, LawResult};
use crate::dynamics::{DynSystem, InvarianceKind};
use crate::measure::{rat, MSet, Rat, Space};
use crate::oracle;
use crate::orbit::{joint_window, orbit, Orbit};
use crate::tail::{self, Corridor};

/// Largest atom count at which separated pairs are enumerated by the oracle.
const PAIR_ORACLE_ATOMS: usize = 6;

/// Invariant probabilities carried by the cycles of the atom map: uniform
/// on each cycle, and the even mixture of all cycles.
fn cycle_measures(s: &DynSystem) -> Vec<Vec<Rat>> {
    let f = s.atom_map();
    let n = f.len();
    let mut cycles: Vec<Vec<usize>> = Vec::new();
    for a in 0..n {
        let o = orbit(a, |&b| f[b]);
        let mut c = o.period.clone();
        c.sort_unstable();
        if !cycles.contains(&c) {
            cycles.push(c);
        }
    }
    let x = s.space();
    cycles.retain(|c| x.is_positive_atom(c[0]));
    let uniform = |c: &[usize], scale: &Rat| {
        let mut mu = vec![Rat::zero(); n];
        for &a in c {
            mu[a] += scale / Rat::from_integer((c.len() as i64).into());
        }
        mu
    };
    let mut out: Vec<Vec<Rat>> = cycles.iter().map(|c| uniform(c, &Rat::one())).collect();
    if cycles.len() > 1 {
        let share = rat(1, cycles.len() as i64);
        let mut mix = vec![Rat::zero(); n];
        for c in &cycles {
            for (m, v) in mix.iter_mut().zip(uniform(c, &share)) {
                *m += v;
            }
        }
        out.push(mix);
    }
    out
}

fn complement_terms(s: &DynSystem, terms: &Orbit<MSet>) -> Orbit<MSet> {
    terms.map(|t| s.space().complement(t))
}

/// Every identity about tail sets and exactness. Quantifiers over one set
/// are exhaustive; pairs use [`partners`]. Requires at most 10 atoms.
pub fn check_tail_laws<R: Rng>(s: &DynSystem, rng: &mut R) -> LawResult {
    let x = s.space().clone();
    let n = x.num_atoms();
    let map = s.map();
    let sets = all_sets(&x);
    let positive = x.positive_part().mask();
    let class = lift(s.classify(), "classification")?;

    let algebra = tail::tail_algebra(s);
    let cover = algebra.blocks.iter().fold(x.empty(), |u, b| {
        assert!(u.intersection(b).is_empty());
        u.union(b)
    });
    ensure(cover == x.full(), "tail blocks partition X", String::new)?;

    let oracle_tails: Vec<u64> = lift(oracle::tail_sets(map), "oracle")?
        .iter()
        .map(MSet::mask)
        .collect();
    let mut is_tail = vec![false; sets.len()];
    let mut hulls = Vec::with_capacity(sets.len());
    for a in &sets {
        hulls.push(lift(tail::tail_hull(s, a), "tail hull")?);
    }
    let hull = |a: &MSet| &hulls[a.mask() as usize];
    let full_orbit = s.image_orbit(&x.full());

    for a in &sets {
        let m = a.mask() as usize;
        let t = lift(tail::is_tail_set(s, a), "tail membership")?;
        is_tail[m] = t;
        let images = s.image_orbit(a);
        let largest = largest_candidate(&images, &full_orbit, &x);
        let corridor = tail::is_corridor(s, a, &images) || tail::is_corridor(s, a, &largest);
        let pullback = tail::is_fixed_by_pullback(s, a);
        let ac = x.complement(a);
        let self_sep = tail::separated_by_orbit(s, a, &ac);
        ensure(
            t == corridor && t == pullback && t == self_sep,
            "tail set characterizations agree",
            || format!("{}: tail {t}, corridor {corridor}, pullback {pullback}, separated {self_sep}", show(&x, a)),
        )?;

        // tail hull: a tail set containing A, least among tail sets
        let h = hull(a);
        ensure(x.ae_subset(a, h), "A ⊆̇ A^≀", || show(&x, a))?;
        ensure(oracle_tails.contains(&h.mask()), "A^≀ is a tail set", || show(&x, a))?;
        let am = a.mask() & positive;
        for &c in &oracle_tails {
            if am & !c == 0 {
                ensure(h.mask() & positive & !c == 0, "A^≀ is the least tail set ⊇̇ A", || {
                    show(&x, a)
                })?;
            }
        }
        // (T̂A)^≀ ⊆̇ T̂(A^≀) holds only inside T̂X; outside it may fail
        // when T is singular
        let ta = s.image(a);
        ensure(x.ae_eq(&s.preimage(hull(&ta)), h), "T⁻¹(T̂A)^≀ ≐ A^≀", || show(&x, a))?;
        ensure(
            x.ae_subset(&hull(&ta).intersection(full_orbit.get(1)), &s.image(h)),
            "(T̂A)^≀ ∩ T̂X ⊆̇ T̂(A^≀)",
            || show(&x, a),
        )?;
        if class.nonsingular {
            ensure(x.ae_subset(hull(&ta), &s.image(h)), "(T̂A)^≀ ⊆̇ T̂(A^≀)", || show(&x, a))?;
        }
        let outside = x.complement(h);
        ensure(tail::separated_by_orbit(s, a, &outside), "A and (A^≀)ᶜ remain separated", || {
            show(&x, a)
        })?;
        for c in lift(oracle::separated_from(map, a), "oracle")? {
            ensure(x.ae_subset(&c, &outside), "(A^≀)ᶜ is the largest set separated from A", || {
                format!("{} {}", show(&x, a), show(&x, &c))
            })?;
        }

        if t {
            corridor_laws(s, a, class.nonsingular)?;
        }
    }

    let oracle_set: Vec<bool> = (0..sets.len() as u64).map(|m| oracle_tails.contains(&m)).collect();
    ensure(is_tail == oracle_set, "tail sets agree with the oracle", String::new)?;

    // three ways of remaining separated
    let others = partners(&x, rng);
    for a in &sets {
        for b in &others {
            let by_orbit = tail::separated_by_orbit(s, a, b);
            let by_hulls = x.is_null(&hull(a).intersection(hull(b)));
            let (am, bm) = (a.mask() & positive, b.mask() & positive);
            let by_tail = oracle_tails.iter().any(|&c| am & !c == 0 && bm & c == 0);
            ensure(
                by_orbit == by_hulls && by_orbit == by_tail,
                "separation characterizations agree",
                || format!("{} {}: orbit {by_orbit}, hulls {by_hulls}, tail set {by_tail}", show(&x, a), show(&x, b)),
            )?;
        }
    }

    // exactness
    let report = lift(tail::exactness_report(s, None), "exactness")?;
    ensure(report.exact == algebra.is_trivial(s), "exact iff tail algebra trivial", String::new)?;
    if n <= PAIR_ORACLE_ATOMS {
        let pairs = lift(oracle::separated_pair_masks(map), "oracle")?;
        ensure(
            report.exact == pairs.is_empty(),
            "exact iff no positive sets remain separated",
            || format!("exact {}, {} separated pairs", report.exact, pairs.len()),
        )?;
    }
    ensure(report.criterion.exhaustive, "separation criterion is exhaustive", String::new)?;
    ensure(
        report.exact == (class.ergodic && report.criterion.holds),
        "exact iff ergodic and no positive set remains separated from its image",
        String::new,
    )?;
    if report.limsup_full {
        ensure(
            class.nonsingular && class.conservative && report.exact,
            "lim sup full ⇒ nonsingular, conservative and exact",
            String::new,
        )?;
    }

    let all_tails_invariant = oracle_tails.iter().all(|&m| {
        s.invariance_check(&x.from_mask(m), InvarianceKind::Full)
            .expect("same space")
    });
    let no_self_separated = sets
        .iter()
        .all(|a| x.is_null(a) || !tail::separated_by_orbit(s, a, &s.image(a)));
    ensure(
        all_tails_invariant == no_self_separated,
        "tail sets invariant iff no positive set remains separated from its image",
        || format!("invariant {all_tails_invariant}, unseparated {no_self_separated}"),
    )?;

    for mu in cycle_measures(s) {
        let r = lift(tail::exactness_report(s, Some(&mu)), "image growth")?;
        let limits = r.image_growth.expect("μ supplied");
        ensure(
            r.exact == limits.iter().all(|(_, l)| l.is_one()),
            "exact iff μ(T̂ⁿa) → 1 for every positive atom",
            String::new,
        )?;
        for (a, limit) in &limits {
            let measure = |m: &MSet| m.atoms().map(|b| &mu[b]).sum::<Rat>();
            ensure(&measure(hull(&x.atom(*a))) == limit, "μ(T̂ⁿa) → μ(a^≀)", || {
                x.atom_name(*a).to_string()
            })?;
        }
    }
    Ok(())
}

/// The sequence `T̂ⁿA ∪ (T̂ⁿX)ᶜ` over the joint orbit of both image orbits.
fn largest_candidate(images: &Orbit<MSet>, full: &Orbit<MSet>, x: &Space) -> Orbit<MSet> {
    let window = joint_window(images, full);
    let pre = images.preperiod().max(full.preperiod());
    let seq: Vec<MSet> = (0..window)
        .map(|k| x.canonical(&images.get(k).union(&x.complement(full.get(k)))))
        .collect();
    Orbit::new(seq[..pre].to_vec(), seq[pre..].to_vec())
}

/// Bounds, verification, closure under complements and preimages, and
/// propagation of tail sets under nonsingular maps.
fn corridor_laws(s: &DynSystem, a: &MSet, nonsingular: bool) -> LawResult {
    let x = s.space();
    let bounds = lift(tail::corridor_bounds(s, a), "corridor bounds")?;
    for c in [&bounds.smallest, &bounds.largest] {
        ensure(lift(tail::verify_corridor(s, a, &c.terms), "corridor")?, "bounds are corridors", || {
            show(x, a)
        })?;
        let Corridor { entrance, terms } = c;
        let ac = x.complement(entrance);
        ensure(
            tail::is_corridor(s, &ac, &complement_terms(s, terms)),
            "complements of a corridor form a corridor",
            || show(x, a),
        )?;
        for m in 1..=2 {
            let pulled = terms.map(|t| s.preimage_power(t, m));
            ensure(
                tail::is_corridor(s, &s.preimage_power(entrance, m), &pulled),
                "preimages of a corridor form a corridor",
                || format!("{} m={m}", show(x, a)),
            )?;
        }
    }
    if nonsingular {
        let window = joint_window(&bounds.smallest.terms, &bounds.largest.terms);
        ensure(
            (0..window).all(|k| x.ae_eq(bounds.smallest.terms.get(k), bounds.largest.terms.get(k))),
            "nonsingular corridors are unique mod λ",
            || show(x, a),
        )?;
        let ta = s.image(a);
        ensure(
            lift(tail::is_tail_set(s, &ta), "tail membership")?
                && tail::is_corridor(s, &ta, &s.image_orbit(a).shifted()),
            "T̂ of a tail set is a tail set",
            || show(x, a),
        )?;
    }
    Ok(())
}
