//! Tail σ-algebra, tail sets, corridors, separation and exactness.
//!
//! `T⁻ⁿ𝒜` is the partition of atoms into fibres of `fⁿ`, where `f` is the
//! map induced on atoms. Statements quantified over all `n ≥ 0` that mix
//! `T⁻ⁿ` with a set sequence are decided on the joint orbit of `fⁿ` and the
//! sequence: both are eventually periodic, so every joint state occurs
//! before `max(preperiods) + lcm(periods)`.

use std::collections::HashMap;

use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};

use crate::dynamics::DynSystem;
use crate::error::{Error, Result};
use crate::measure::{MSet, Rat};
use crate::orbit::{joint_window, orbit, Orbit};

/// The stabilized algebra `⋂ₙ T⁻ⁿ𝒜`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TailAlgebra {
    /// Blocks ordered by their lowest atom.
    pub blocks: Vec<MSet>,
    /// Number of coarsening steps before the first flat step.
    pub depth: usize,
}

impl TailAlgebra {
    /// Whether every block is null or conull.
    pub fn is_trivial(&self, s: &DynSystem) -> bool {
        let x = s.space();
        self.blocks
            .iter()
            .all(|b| x.is_null(b) || x.is_null(&x.complement(b)))
    }

    /// Whether `a` agrees mod λ with a union of blocks.
    pub fn contains_mod_null(&self, s: &DynSystem, a: &MSet) -> bool {
        let x = s.space();
        self.blocks.iter().all(|b| {
            x.is_null(&b.intersection(a)) || x.is_null(&b.difference(a))
        })
    }
}

fn relabel(labels: &[usize]) -> Vec<usize> {
    let mut seen = HashMap::new();
    labels
        .iter()
        .map(|l| {
            let next = seen.len();
            *seen.entry(*l).or_insert(next)
        })
        .collect()
}

pub fn tail_algebra(s: &DynSystem) -> TailAlgebra {
    let f = s.atom_map();
    let n = f.len();
    let mut labels: Vec<usize> = (0..n).collect();
    let mut depth = 0;
    loop {
        let next = relabel(&(0..n).map(|a| labels[f[a]]).collect::<Vec<_>>());
        if next == labels {
            break;
        }
        labels = next;
        depth += 1;
        assert!(depth <= n, "tail algebra must stabilise within #atoms steps");
    }
    let x = s.space();
    let count = labels.iter().max().map_or(0, |m| m + 1);
    let blocks = (0..count)
        .map(|l| x.from_atoms((0..n).filter(|&a| labels[a] == l)))
        .collect();
    TailAlgebra { blocks, depth }
}

/// `T⁻ᵐT̂ᵐA` for every `m` in the joint window, in order.
fn pulled_back_images(s: &DynSystem, a: &MSet) -> Vec<MSet> {
    let images = s.image_orbit(a);
    let powers = s.power_orbit();
    let window = joint_window(&images, &powers);
    (0..window)
        .map(|m| s.preimage_by_power(powers.get(m), images.get(m)))
        .collect()
}

/// The smallest tail set containing `A` mod λ, canonical. Computed as
/// `⋃ₘ T⁻ᵐT̂ᵐA` and as the union of tail blocks meeting `A` positively.
pub fn tail_hull(s: &DynSystem, a: &MSet) -> Result<MSet> {
    let x = s.space();
    x.check(a)?;
    let by_images = pulled_back_images(s, a)
        .iter()
        .fold(x.empty(), |u, p| u.union(p));
    let by_images = x.canonical(&by_images);
    let by_blocks = tail_algebra(s)
        .blocks
        .iter()
        .filter(|b| !x.is_null(&b.intersection(a)))
        .fold(x.empty(), |u, b| u.union(b));
    let by_blocks = x.canonical(&by_blocks);
    if by_images != by_blocks {
        return Err(Error::CrossCheck(format!(
            "tail hull of {}: {} by images, {} by blocks",
            x.display_set(a),
            x.display_set(&by_images),
            x.display_set(&by_blocks)
        )));
    }
    Ok(by_images)
}

/// `A ≐ T⁻ⁿT̂ⁿA` for all `n ≥ 0`.
pub fn is_fixed_by_pullback(s: &DynSystem, a: &MSet) -> bool {
    let x = s.space();
    pulled_back_images(s, a).iter().all(|p| x.ae_eq(p, a))
}

/// Whether `A` is a tail set, decided via its tail hull, via `A ≐ T⁻ⁿT̂ⁿA`,
/// and via the tail algebra; the three must agree.
pub fn is_tail_set(s: &DynSystem, a: &MSet) -> Result<bool> {
    let x = s.space();
    let by_hull = x.ae_eq(a, &tail_hull(s, a)?);
    let by_pullback = is_fixed_by_pullback(s, a);
    let by_algebra = tail_algebra(s).contains_mod_null(s, a);
    if by_hull != by_pullback || by_hull != by_algebra {
        return Err(Error::CrossCheck(format!(
            "tail membership of {}: hull {by_hull}, pullback {by_pullback}, algebra {by_algebra}",
            x.display_set(a)
        )));
    }
    Ok(by_hull)
}

/// `T̂ⁿA ∩ T̂ⁿB ≐ ∅` for all `n ≥ 0`, without the tail-hull cross-check.
pub fn separated_by_orbit(s: &DynSystem, a: &MSet, b: &MSet) -> bool {
    let x = s.space();
    let start = (x.canonical(a), x.canonical(b));
    let pairs = orbit(start, |(p, q)| (s.image(p), s.image(q)));
    let separated = pairs.iter().all(|(p, q)| x.is_null(&p.intersection(q)));
    separated
}

/// Whether `A` and `B` remain separated, by the pair orbit and by disjointness
/// of their tail hulls.
pub fn remain_separated(s: &DynSystem, a: &MSet, b: &MSet) -> Result<bool> {
    let x = s.space();
    x.check(a)?;
    x.check(b)?;
    let by_orbit = separated_by_orbit(s, a, b);
    let by_hulls = x.is_null(&tail_hull(s, a)?.intersection(&tail_hull(s, b)?));
    if by_orbit != by_hulls {
        return Err(Error::CrossCheck(format!(
            "separation of {} and {} differs between orbit and hulls",
            x.display_set(a),
            x.display_set(b)
        )));
    }
    Ok(by_orbit)
}

/// The sets `Mₙ = T̂ⁿA`: any `B` separated from `A` satisfies
/// `B ⊆̇ T⁻ⁿ(Mₙ)ᶜ` for every `n`.
pub fn separation_witnesses(s: &DynSystem, a: &MSet) -> Orbit<MSet> {
    s.image_orbit(a)
}

/// A sequence `(Aₙ)` with `A ≐ T⁻ⁿAₙ` for all `n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Corridor {
    pub entrance: MSet,
    pub terms: Orbit<MSet>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorridorBounds {
    /// `(T̂ⁿA)ₙ`
    pub smallest: Corridor,
    /// `(T̂ⁿA ∪ (T̂ⁿX)ᶜ)ₙ`
    pub largest: Corridor,
}

/// The smallest and largest corridors with entrance `a`, which must be a
/// tail set.
pub fn corridor_bounds(s: &DynSystem, a: &MSet) -> Result<CorridorBounds> {
    if !is_tail_set(s, a)? {
        return Err(Error::NotATailSet);
    }
    let x = s.space();
    let start = (x.canonical(a), x.positive_part());
    let pairs = orbit(start, |(p, q)| (s.image(p), s.image(q)));
    let largest = pairs.map(|(p, q)| x.canonical(&p.union(&x.complement(q))));
    let smallest = pairs.map(|(p, _)| p.clone());
    let bounds = CorridorBounds {
        smallest: Corridor {
            entrance: a.clone(),
            terms: compact(smallest),
        },
        largest: Corridor {
            entrance: a.clone(),
            terms: compact(largest),
        },
    };
    for c in [&bounds.smallest, &bounds.largest] {
        if !is_corridor(s, a, &c.terms) {
            return Err(Error::CrossCheck("corridor bound fails the definition".into()));
        }
    }
    Ok(bounds)
}

/// Re-detects preperiod and period of a sequence derived from a longer
/// orbit, so the representation is minimal.
fn compact(o: Orbit<MSet>) -> Orbit<MSet> {
    let seq: Vec<MSet> = o.iter().cloned().collect();
    let n = seq.len();
    // the tail from index o.preperiod() is periodic with period o.period_len()
    let mut pre = o.preperiod();
    let mut period = o.period_len();
    for p in 1..=period {
        if period.is_multiple_of(p) && (0..period).all(|i| o.get(pre + i) == o.get(pre + (i % p))) {
            period = p;
            break;
        }
    }
    while pre > 0 && o.get(pre - 1) == o.get(pre - 1 + period) {
        pre -= 1;
    }
    debug_assert!(pre + period <= n);
    Orbit::new(seq[..pre].to_vec(), seq[pre..pre + period].to_vec())
}

/// Whether `A ≐ T⁻ⁿAₙ` for every `n`.
pub fn is_corridor(s: &DynSystem, a: &MSet, terms: &Orbit<MSet>) -> bool {
    let x = s.space();
    let powers = s.power_orbit();
    let window = joint_window(terms, &powers);
    (0..window).all(|n| x.ae_eq(a, &s.preimage_by_power(powers.get(n), terms.get(n))))
}

/// Checks `terms` against the corridor definition and against the sandwich
/// `T̂ⁿA ⊆̇ Aₙ ⊆̇ T̂ⁿA ∪ (T̂ⁿX)ᶜ`; the two must agree.
pub fn verify_corridor(s: &DynSystem, a: &MSet, terms: &Orbit<MSet>) -> Result<bool> {
    let x = s.space();
    x.check(a)?;
    for t in terms.iter() {
        x.check(t)?;
    }
    if !is_tail_set(s, a)? {
        return Err(Error::NotATailSet);
    }
    let by_definition = is_corridor(s, a, terms);
    let pairs = orbit((x.canonical(a), x.positive_part()), |(p, q)| {
        (s.image(p), s.image(q))
    });
    let window = joint_window(terms, &pairs);
    let by_sandwich = (0..window).all(|n| {
        let (img, full) = pairs.get(n);
        let t = terms.get(n);
        x.ae_subset(img, t) && x.ae_subset(t, &img.union(&x.complement(full)))
    });
    if by_definition != by_sandwich {
        return Err(Error::CrossCheck(
            "corridor definition and sandwich bounds disagree".into(),
        ));
    }
    Ok(by_definition)
}

/// Outcome of the separation criterion for exactness.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeparationCriterion {
    pub ergodic: bool,
    /// A positive set remaining separated from its own image, if one was
    /// found.
    pub self_separated: Option<MSet>,
    /// Whether every set was examined rather than a sample.
    pub exhaustive: bool,
    /// `ergodic` and no self-separated positive set.
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExactnessReport {
    pub exact: bool,
    pub tail: TailAlgebra,
    /// Lowest pair of positive atoms remaining separated.
    pub separated_pair: Option<(usize, usize)>,
    pub limsup_full: bool,
    /// A positive atom with `lim sup λ(T̂ⁿa) < λ(X)`.
    pub limsup_witness: Option<usize>,
    /// `(atom, μ(tail hull of atom))` for each positive atom, when an
    /// invariant probability was supplied.
    pub image_growth: Option<Vec<(usize, Rat)>>,
    pub criterion: SeparationCriterion,
}

/// Family size up to which the separation criterion is checked on every
/// set.
pub const CRITERION_EXHAUSTIVE_ATOMS: usize = 10;
pub const CRITERION_SAMPLES: usize = 10_000;
const CRITERION_SEED: u64 = 0x5eed;

/// Checks that per-atom masses `mu` form an invariant probability
/// absolutely continuous with respect to λ.
pub fn validate_invariant_probability(s: &DynSystem, mu: &[Rat]) -> Result<()> {
    let x = s.space();
    if mu.len() != x.num_atoms() {
        return Err(Error::TableIncomplete {
            expected: x.num_atoms(),
            found: mu.len(),
        });
    }
    if let Some(a) = mu.iter().position(|m| m < &Rat::zero()) {
        return Err(Error::NegativeWeight(x.atom_name(a).to_string()));
    }
    if let Some(a) = (0..mu.len()).find(|&a| !x.is_positive_atom(a) && !mu[a].is_zero()) {
        return Err(Error::NotAbsolutelyContinuous(x.atom_name(a).to_string()));
    }
    if !mu.iter().sum::<Rat>().is_one() {
        return Err(Error::NotProbability);
    }
    let mut pushed = vec![Rat::zero(); mu.len()];
    for (a, &b) in s.atom_map().iter().enumerate() {
        pushed[b] += &mu[a];
    }
    if let Some(b) = (0..mu.len()).find(|&b| pushed[b] != mu[b]) {
        return Err(Error::NotInvariant(x.atom_name(b).to_string()));
    }
    Ok(())
}

/// Exactness with its equivalent characterizations, lim sup fullness, and
/// (given an invariant probability `mu` as per-atom masses) image growth.
pub fn exactness_report(s: &DynSystem, mu: Option<&[Rat]>) -> Result<ExactnessReport> {
    let x = s.space();
    if let Some(mu) = mu {
        validate_invariant_probability(s, mu)?;
    }
    let tail = tail_algebra(s);
    let exact = tail.is_trivial(s);
    let positive: Vec<usize> = (0..x.num_atoms()).filter(|&a| x.is_positive_atom(a)).collect();

    let mut separated_pair = None;
    'outer: for (i, &a) in positive.iter().enumerate() {
        for &b in &positive[i + 1..] {
            if remain_separated(s, &x.atom(a), &x.atom(b))? {
                separated_pair = Some((a, b));
                break 'outer;
            }
        }
    }
    let mut hulls = Vec::with_capacity(positive.len());
    for &a in &positive {
        hulls.push((a, tail_hull(s, &x.atom(a))?));
    }
    let all_hulls_full = hulls.iter().all(|(_, h)| x.ae_eq(h, &x.full()));
    if exact == separated_pair.is_some() || exact != all_hulls_full {
        return Err(Error::CrossCheck("exactness characterizations disagree".into()));
    }

    let full = x.positive_part();
    let limsup_witness = positive.iter().copied().find(|&a| {
        let o = s.image_orbit(&x.atom(a));
        !o.period.iter().any(|p| p == &full)
    });
    let limsup_full = limsup_witness.is_none();
    let class = s.classify()?;
    if limsup_full && !(class.nonsingular && class.conservative && exact) {
        return Err(Error::CrossCheck(
            "lim sup full system is not nonsingular, conservative and exact".into(),
        ));
    }

    let image_growth = match mu {
        None => None,
        Some(mu) => {
            let measure = |m: &MSet| m.atoms().map(|a| &mu[a]).sum::<Rat>();
            let mut limits = Vec::with_capacity(hulls.len());
            for (a, hull) in &hulls {
                let o = s.image_orbit(&x.atom(*a));
                let values: Vec<Rat> = o.iter().map(measure).collect();
                if values.windows(2).any(|w| w[0] > w[1]) {
                    return Err(Error::CrossCheck("μ(T̂ⁿa) is not nondecreasing".into()));
                }
                let limit = measure(&o.period[0]);
                if limit != measure(hull) {
                    return Err(Error::CrossCheck(
                        "image growth limit differs from the tail hull measure".into(),
                    ));
                }
                limits.push((*a, limit));
            }
            if exact != limits.iter().all(|(_, l)| l.is_one()) {
                return Err(Error::CrossCheck(
                    "exactness differs from full image growth".into(),
                ));
            }
            Some(limits)
        }
    };

    let criterion = separation_criterion(s, class.ergodic);
    if criterion.holds != exact && (criterion.exhaustive || exact) {
        return Err(Error::CrossCheck(
            "exactness differs from the separation criterion".into(),
        ));
    }

    Ok(ExactnessReport {
        exact,
        tail,
        separated_pair,
        limsup_full,
        limsup_witness,
        image_growth,
        criterion,
    })
}

/// Searches for a positive set remaining separated from its image, over
/// every set when there are at most 2¹⁰ of them and otherwise over all atoms
/// plus a seeded uniform sample.
pub fn separation_criterion(s: &DynSystem, ergodic: bool) -> SeparationCriterion {
    let x = s.space();
    let n = x.num_atoms();
    let exhaustive = n <= CRITERION_EXHAUSTIVE_ATOMS;
    let self_separated = |a: &MSet| !x.is_null(a) && separated_by_orbit(s, a, &s.image(a));
    let found = if exhaustive {
        (1..1u64 << n).map(|m| x.from_mask(m)).find(self_separated)
    } else {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(CRITERION_SEED);
        (0..n)
            .map(|a| x.atom(a))
            .chain((0..CRITERION_SAMPLES).map(|_| x.from_atoms((0..n).filter(|_| rng.gen_bool(0.5)))))
            .find(self_separated)
    };
    SeparationCriterion {
        ergodic,
        holds: ergodic && found.is_none(),
        self_separated: found,
        exhaustive,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::measure::rat;

    #[test]
    fn tail_algebra_examples() {
        let r = fixtures::rot3();
        let t = tail_algebra(&r);
        assert_eq!((t.blocks.len(), t.depth), (3, 0));
        let c = fixtures::collapse();
        let t = tail_algebra(&c);
        assert_eq!(t.blocks, vec![c.space().full()]);
        assert_eq!(t.depth, 1);
        let g = fixtures::grid(2);
        let t = tail_algebra(&g);
        assert_eq!(t.blocks, vec![g.space().full()]);
        assert_eq!(t.depth, 3);
    }

    #[test]
    fn tail_hull_examples() {
        let c = fixtures::collapse();
        let x = c.space();
        assert_eq!(tail_hull(&c, &x.atom(0)).unwrap(), x.full());
        // the fixed image {3} alone does not reach the hull; T⁻¹{3} = X does
        assert_eq!(tail_hull(&c, &x.atom(2)).unwrap(), x.full());
        let r = fixtures::rot3();
        assert_eq!(tail_hull(&r, &r.space().atom(0)).unwrap(), r.space().atom(0));
        let e = fixtures::ex1a();
        assert!(tail_hull(&e, &e.space().atom(1)).unwrap().is_empty());
    }

    #[test]
    fn tail_set_examples() {
        let r = fixtures::rot3();
        assert!(is_tail_set(&r, &r.space().atom(0)).unwrap());
        let c = fixtures::collapse();
        assert!(!is_tail_set(&c, &c.space().atom(2)).unwrap());
        let k = fixtures::count2();
        let x = k.space();
        assert!(is_tail_set(&k, &x.full()).unwrap());
        assert!(!is_tail_set(&k, &x.atom(0)).unwrap());
        assert!(x.ae_eq(&x.atom(0), &k.image(&x.full())));
    }

    #[test]
    fn separation_examples() {
        let r = fixtures::rot3();
        assert!(remain_separated(&r, &r.space().atom(0), &r.space().atom(1)).unwrap());
        let c = fixtures::collapse();
        assert!(!remain_separated(&c, &c.space().atom(0), &c.space().atom(1)).unwrap());
        let e = fixtures::ex1a();
        assert!(remain_separated(&e, &e.space().atom(0), &e.space().atom(1)).unwrap());
    }

    #[test]
    fn corridor_examples() {
        let r = fixtures::rot3();
        let x = r.space();
        let b = corridor_bounds(&r, &x.atom(0)).unwrap();
        let expect = Orbit::new(vec![], vec![x.atom(0), x.atom(1), x.atom(2)]);
        assert_eq!(b.smallest.terms, expect);
        assert_eq!(b.largest.terms, expect);
        let bad = Orbit::new(vec![x.atom(0)], vec![x.atom(2)]);
        assert!(!verify_corridor(&r, &x.atom(0), &bad).unwrap());

        let k = fixtures::count2();
        let x = k.space();
        let b = corridor_bounds(&k, &x.full()).unwrap();
        assert_eq!(b.largest.terms, Orbit::new(vec![], vec![x.full()]));
        let seq = Orbit::new(vec![x.full()], vec![x.atom(0)]);
        assert!(verify_corridor(&k, &x.full(), &seq).unwrap());
        let shifted = seq.shifted();
        assert!(!is_corridor(&k, shifted.get(0), &shifted));
        assert_eq!(corridor_bounds(&k, &x.atom(0)).unwrap_err(), Error::NotATailSet);
    }

    #[test]
    fn exactness_examples() {
        let r = fixtures::rot3();
        let rep = exactness_report(&r, None).unwrap();
        assert!(!rep.exact && !rep.limsup_full);
        assert_eq!(rep.separated_pair, Some((0, 1)));

        let c = fixtures::collapse();
        let mu = [rat(0, 1), rat(0, 1), rat(1, 1)];
        let rep = exactness_report(&c, Some(&mu)).unwrap();
        assert!(rep.exact);
        assert_eq!(rep.image_growth.as_ref().unwrap()[0], (0, rat(1, 1)));

        let g = fixtures::grid(2);
        let rep = exactness_report(&g, None).unwrap();
        assert!(rep.exact && !rep.limsup_full);
        assert!(!g.classify().unwrap().conservative);
    }

    #[test]
    fn invalid_measures_are_rejected() {
        let c = fixtures::collapse();
        let not_inv = [rat(1, 1), rat(0, 1), rat(0, 1)];
        assert_eq!(
            exactness_report(&c, Some(&not_inv)).unwrap_err(),
            Error::NotInvariant("1".into())
        );
        let e = fixtures::ex1a();
        let singular = [rat(0, 1), rat(1, 1)];
        assert_eq!(
            exactness_report(&e, Some(&singular)).unwrap_err(),
            Error::NotAbsolutelyContinuous("1".into())
        );
        let half = [rat(0, 1), rat(0, 1), rat(1, 2)];
        assert_eq!(exactness_report(&c, Some(&half)).unwrap_err(), Error::NotProbability);
    }
}
