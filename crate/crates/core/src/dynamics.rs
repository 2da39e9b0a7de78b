//! Endomap systems: invariance, hulls, the nonsingular part, wandering sets,
//! conservativity, ergodicity and the image-size modulus.
//!
//! Quantifiers over all sets are reduced to atoms where a lattice argument
//! allows it: a positive wandering set contains a positive wandering atom,
//! and a nontrivial invariant set contains a positive atom whose invariant
//! hull is nontrivial.

use std::sync::Arc;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::images;
use crate::measure::{MSet, MeasurableMap, Rat, Space};
use crate::orbit::{orbit, Orbit};

/// A null-preserving endomap `T: X → X`.
#[derive(Debug, Clone)]
pub struct DynSystem {
    map: MeasurableMap,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InvarianceKind {
    /// `A ⊆̇ T⁻¹A`
    Forward,
    /// `A ≐ T⁻¹A`
    Full,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HullKind {
    Forward,
    Invariant,
}

impl DynSystem {
    pub fn new(map: MeasurableMap) -> Result<Self> {
        if !map.is_endomap() {
            return Err(Error::NotEndomap);
        }
        Ok(DynSystem { map })
    }

    pub fn from_points(space: Space, image_of: Vec<usize>) -> Result<Self> {
        DynSystem::new(MeasurableMap::endomap(Arc::new(space), image_of)?)
    }

    pub fn space(&self) -> &Arc<Space> {
        self.map.domain()
    }

    pub fn map(&self) -> &MeasurableMap {
        &self.map
    }

    pub fn name(&self) -> &str {
        self.space().name()
    }

    /// The map induced on atoms.
    pub fn atom_map(&self) -> &[usize] {
        self.map.atom_images()
    }

    /// `T̂A` (canonical). Panics if `a` belongs to another space.
    pub fn image(&self, a: &MSet) -> MSet {
        assert_eq!(a.space(), self.space().id(), "set belongs to another space");
        images::image_unchecked(&self.map, a)
    }

    /// `T⁻¹A`, exact. Panics if `a` belongs to another space.
    pub fn preimage(&self, a: &MSet) -> MSet {
        assert_eq!(a.space(), self.space().id(), "set belongs to another space");
        self.map.preimage_unchecked(a)
    }

    /// `T̂ⁿA`.
    pub fn image_power(&self, a: &MSet, n: usize) -> MSet {
        let mut cur = self.space().canonical(a);
        for _ in 0..n {
            cur = self.image(&cur);
        }
        cur
    }

    /// `T⁻ⁿA`.
    pub fn preimage_power(&self, a: &MSet, n: usize) -> MSet {
        let mut cur = a.clone();
        for _ in 0..n {
            cur = self.preimage(&cur);
        }
        cur
    }

    /// The orbit `(T̂ⁿA)ₙ` starting at the canonical version of `A`.
    pub fn image_orbit(&self, a: &MSet) -> Orbit<MSet> {
        orbit(self.space().canonical(a), |c| self.image(c))
    }

    /// The orbit `(T⁻ⁿA)ₙ` of exact preimages.
    pub fn preimage_orbit(&self, a: &MSet) -> Orbit<MSet> {
        orbit(a.clone(), |c| self.preimage(c))
    }

    /// The orbit of atom-map powers `(fⁿ)ₙ`, starting at the identity.
    pub fn power_orbit(&self) -> Orbit<Vec<usize>> {
        let f = self.atom_map();
        let id: Vec<usize> = (0..f.len()).collect();
        orbit(id, |g| g.iter().map(|&a| f[a]).collect())
    }

    /// `T⁻ⁿB` computed from the atom-map power `fⁿ`.
    pub fn preimage_by_power(&self, power: &[usize], b: &MSet) -> MSet {
        self.space()
            .from_atoms((0..power.len()).filter(|&a| b.contains(power[a])))
    }

    /// Tests forward invariance or invariance of `a` by preimages and by
    /// essential images, and fails if the two routes disagree.
    pub fn invariance_check(&self, a: &MSet, kind: InvarianceKind) -> Result<bool> {
        let x = self.space();
        x.check(a)?;
        let pre = self.preimage(a);
        let img = self.image(a);
        let (by_preimage, by_image) = match kind {
            InvarianceKind::Forward => (x.ae_subset(a, &pre), x.ae_subset(&img, a)),
            InvarianceKind::Full => {
                let ac = x.complement(a);
                (
                    x.ae_eq(a, &pre),
                    x.ae_subset(&img, a) && x.ae_subset(&self.image(&ac), &ac),
                )
            }
        };
        if by_preimage != by_image {
            return Err(Error::CrossCheck(format!(
                "{kind:?} invariance of {} differs between preimage and image tests",
                x.display_set(a)
            )));
        }
        Ok(by_preimage)
    }

    /// Forward invariant hull `⋃ T̂ᵐA` or invariant hull of `a`, canonical.
    pub fn hull(&self, a: &MSet, kind: HullKind) -> Result<MSet> {
        let x = self.space();
        x.check(a)?;
        let mut cur = x.canonical(a);
        loop {
            let next = cur.union(&self.image(&cur));
            if next == cur {
                break;
            }
            cur = next;
        }
        if kind == HullKind::Invariant {
            loop {
                let next = cur.union(&self.preimage(&cur));
                if next == cur {
                    break;
                }
                cur = next;
            }
        }
        Ok(x.canonical(&cur))
    }

    /// The largest set `L` with `T̂L ≐ L`, with the chain `X ⊋ T̂X ⊋ … ⊋ L`
    /// of canonical sets that leads to it.
    pub fn nonsingular_part(&self) -> NonsingularPart {
        let x = self.space();
        let mut chain = vec![x.positive_part()];
        loop {
            let last = chain.last().expect("nonempty");
            let next = self.image(last);
            if &next == last {
                break;
            }
            assert!(next.is_subset(last), "T̂ⁿX must decrease");
            chain.push(next);
        }
        assert!(chain.len() <= x.num_atoms() + 1);
        NonsingularPart {
            set: chain.last().expect("nonempty").clone(),
            chain,
        }
    }

    /// `a ∩ T⁻ⁿa ≐ ∅` for all `n ≥ 1`.
    pub fn is_wandering_by_preimages(&self, a: &MSet) -> bool {
        let x = self.space();
        let o = self.preimage_orbit(a);
        let wandering = o.values_from(1).all(|p| x.is_null(&a.intersection(p)));
        wandering
    }

    /// `a ∩ T̂ⁿa ≐ ∅` for all `n ≥ 1`.
    pub fn is_wandering_by_images(&self, a: &MSet) -> bool {
        let x = self.space();
        let o = self.image_orbit(a);
        let wandering = o.values_from(1).all(|p| x.is_null(&a.intersection(p)));
        wandering
    }

    /// `a ⊆̇ ⋃_{n≥1} T⁻ⁿa`.
    pub fn is_recurrent(&self, a: &MSet) -> bool {
        let x = self.space();
        let o = self.preimage_orbit(a);
        let union = o.values_from(1).fold(x.empty(), |u, p| u.union(p));
        x.ae_subset(a, &union)
    }

    /// Decides nonsingularity, conservativity and ergodicity, with the
    /// lowest-index witness for each property that fails.
    pub fn classify(&self) -> Result<Classification> {
        let x = self.space();
        let full_image = self.image(&x.full());
        let nonsingular = x.ae_eq(&full_image, &x.full());
        let singular_witness = images::singular_atom(&self.map).map(|a| x.atom(a));
        if nonsingular != singular_witness.is_none() {
            return Err(Error::CrossCheck("nonsingularity witness disagrees".into()));
        }

        let positive: Vec<usize> = (0..x.num_atoms()).filter(|&a| x.is_positive_atom(a)).collect();
        let mut wandering_witness = None;
        for &a in &positive {
            let atom = x.atom(a);
            let by_pre = self.is_wandering_by_preimages(&atom);
            if by_pre != self.is_wandering_by_images(&atom) || by_pre == self.is_recurrent(&atom) {
                return Err(Error::CrossCheck(format!(
                    "wandering tests disagree on atom {}",
                    x.atom_name(a)
                )));
            }
            if by_pre {
                wandering_witness = Some(atom);
                break;
            }
        }
        let conservative = wandering_witness.is_none();

        let mut invariant_witness = None;
        for &a in &positive {
            let h = self.hull(&x.atom(a), HullKind::Invariant)?;
            if !x.is_null(&x.complement(&h)) {
                invariant_witness = Some(h);
                break;
            }
        }
        let ergodic = invariant_witness.is_none();

        Ok(Classification {
            nonsingular,
            conservative,
            ergodic,
            singular_witness,
            wandering_witness,
            invariant_witness,
        })
    }

    /// Restriction to a forward invariant set `a`. Atoms of `a` mapped
    /// outside `a` (necessarily null) are sent to an added weight-zero sink
    /// atom that maps to itself.
    pub fn restrict(&self, a: &MSet) -> Result<DynSystem> {
        let x = self.space();
        x.check(a)?;
        if !self.invariance_check(a, InvarianceKind::Forward)? {
            return Err(Error::NotForwardInvariant);
        }
        let f = self.atom_map();
        let leaving: Vec<usize> = a.atoms().filter(|&i| !a.contains(f[i])).collect();
        let kept_points: Vec<usize> = x.points_of(a).ones().collect();
        let mut points: Vec<(String, Rat)> = kept_points
            .iter()
            .map(|&p| (x.point_name(p).to_string(), x.point_weight(p).clone()))
            .collect();
        let mut atoms: Vec<(String, Vec<String>)> = a
            .atoms()
            .map(|i| {
                let pts = x.atom_points(i).iter().map(|&p| x.point_name(p).to_string()).collect();
                (x.atom_name(i).to_string(), pts)
            })
            .collect();
        let sink = if leaving.is_empty() {
            None
        } else {
            let mut name = "⊥".to_string();
            while x.point_index(&name).is_some() || x.atom_index(&name).is_some() {
                name.push('′');
            }
            points.push((name.clone(), Rat::zero()));
            atoms.push((name.clone(), vec![name]));
            Some(points.len() - 1)
        };
        let new_index = |p: usize| kept_points.binary_search(&p).ok();
        let mut image_of: Vec<usize> = kept_points
            .iter()
            .map(|&p| match new_index(self.map.point_image(p)) {
                Some(q) if a.contains(x.atom_of(self.map.point_image(p))) => q,
                _ => sink.expect("sink exists when an atom leaves"),
            })
            .collect();
        if let Some(s) = sink {
            image_of.push(s);
        }
        let space = Space::new(x.name(), points, atoms)?;
        DynSystem::from_points(space, image_of)
    }

    /// The same system with `λ` rescaled to a probability.
    pub fn normalized(&self) -> Result<DynSystem> {
        let space = Arc::new(self.space().normalized()?);
        DynSystem::new(self.map.rebased(space.clone(), space)?)
    }

    /// The smallest `δ*` such that some positive `A` with `λ(Aᶜ) = δ*` has
    /// `λ(T̂A) < 1 − ε`, or [`Modulus::Unbounded`] if no positive set
    /// violates the bound. Every `A` with `λ(Aᶜ) < δ*` has `λ(T̂A) ≥ 1 − ε`.
    pub fn image_size_modulus(&self, epsilon: &Rat) -> Result<Modulus> {
        let x = self.space();
        if !(epsilon > &Rat::zero() && epsilon < &Rat::one()) {
            return Err(Error::InvalidEpsilon);
        }
        if !x.total().is_one() {
            return Err(Error::NotNormalized);
        }
        if !self.classify()?.nonsingular {
            return Err(Error::NotNonsingular);
        }
        let n = x.num_atoms();
        if n > MODULUS_ATOM_LIMIT {
            return Err(Error::TooManyAtoms {
                atoms: n,
                limit: MODULUS_ATOM_LIMIT,
            });
        }
        let f = self.atom_map();
        let weight: Vec<Rat> = (0..n).map(|a| x.atom_weight(a).clone()).collect();
        let threshold = Rat::one() - epsilon;
        let mut best: Option<Rat> = None;
        for mask in 0..1u64 << n {
            let mut image = 0u64;
            let mut mass = Rat::zero();
            for a in (0..n).filter(|&a| mask >> a & 1 == 1) {
                mass += &weight[a];
                if x.is_positive_atom(a) {
                    image |= 1 << f[a];
                }
            }
            let image_mass: Rat = (0..n).filter(|&b| image >> b & 1 == 1).map(|b| &weight[b]).sum();
            // null sets always violate the bound and only ever give δ* = 1
            if image_mass < threshold && !mass.is_zero() {
                let co = Rat::one() - mass;
                if best.as_ref().is_none_or(|b| &co < b) {
                    best = Some(co);
                }
            }
        }
        Ok(best.map_or(Modulus::Unbounded, Modulus::Bounded))
    }
}

pub const MODULUS_ATOM_LIMIT: usize = 20;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Modulus {
    Bounded(Rat),
    Unbounded,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NonsingularPart {
    pub set: MSet,
    /// `X, T̂X, T̂²X, …` up to the first repeat, strictly decreasing.
    pub chain: Vec<MSet>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Classification {
    pub nonsingular: bool,
    pub conservative: bool,
    pub ergodic: bool,
    /// A positive atom outside `T̂X`.
    pub singular_witness: Option<MSet>,
    /// A positive wandering atom.
    pub wandering_witness: Option<MSet>,
    /// An invariant set that is neither null nor conull.
    pub invariant_witness: Option<MSet>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::measure::rat;

    #[test]
    fn invariance_examples() {
        let c = fixtures::collapse();
        let x = c.space();
        assert!(c.invariance_check(&x.atom(2), InvarianceKind::Forward).unwrap());
        assert!(!c.invariance_check(&x.atom(2), InvarianceKind::Full).unwrap());
        let r = fixtures::rot3();
        assert!(r.invariance_check(&r.space().full(), InvarianceKind::Full).unwrap());
        assert!(!r.invariance_check(&r.space().atom(0), InvarianceKind::Forward).unwrap());
    }

    #[test]
    fn hull_examples() {
        let c = fixtures::collapse();
        let x = c.space();
        assert_eq!(c.hull(&x.atom(0), HullKind::Forward).unwrap(), x.from_atoms([0, 2]));
        assert_eq!(c.hull(&x.atom(0), HullKind::Invariant).unwrap(), x.full());
        let r = fixtures::rot3();
        assert_eq!(r.hull(&r.space().full(), HullKind::Forward).unwrap(), r.space().full());
        let g = fixtures::grid(2);
        assert_eq!(g.hull(&g.space().atom(4), HullKind::Invariant).unwrap(), g.space().full());
    }

    #[test]
    fn nonsingular_part_of_grid() {
        let g = fixtures::grid(2);
        let x = g.space();
        let part = g.nonsingular_part();
        let chain: Vec<String> = part.chain.iter().map(|s| x.display_set(s)).collect();
        assert_eq!(
            chain,
            [
                "(1,1) (1,2) (2,2) (1,0) (0,0)",
                "(1,2) (1,0) (0,0)",
                "(1,0) (0,0)",
                "(0,0)"
            ]
        );
        let r = fixtures::rot3();
        assert_eq!(r.nonsingular_part().set, r.space().full());
        let c = fixtures::collapse();
        assert_eq!(c.nonsingular_part().set, c.space().atom(2));
    }

    #[test]
    fn classification_examples() {
        let r = fixtures::rot3().classify().unwrap();
        assert!(r.nonsingular && r.conservative && r.ergodic);
        let c = fixtures::collapse();
        let k = c.classify().unwrap();
        assert!(!k.nonsingular && !k.conservative && k.ergodic);
        assert_eq!(k.singular_witness, Some(c.space().atom(0)));
        assert_eq!(k.wandering_witness, Some(c.space().atom(0)));
        let e = fixtures::ex1a().classify().unwrap();
        assert!(e.nonsingular && e.conservative && e.ergodic);
    }

    #[test]
    fn modulus_examples() {
        let r = fixtures::rot3().normalized().unwrap();
        assert_eq!(r.image_size_modulus(&rat(1, 5)).unwrap(), Modulus::Bounded(rat(1, 3)));
        assert_eq!(r.image_size_modulus(&rat(1, 1)).unwrap_err(), Error::InvalidEpsilon);
        assert_eq!(
            fixtures::rot3().image_size_modulus(&rat(1, 5)).unwrap_err(),
            Error::NotNormalized
        );
        let one = DynSystem::from_points(
            Space::discrete("P", vec![("p".into(), rat(1, 1))]).unwrap(),
            vec![0],
        )
        .unwrap();
        assert_eq!(one.image_size_modulus(&rat(1, 2)).unwrap(), Modulus::Unbounded);
        let c = fixtures::collapse();
        assert_eq!(c.image_size_modulus(&rat(1, 2)).unwrap_err(), Error::NotNonsingular);
    }

    #[test]
    fn restriction_to_nonsingular_part_is_nonsingular() {
        let g = fixtures::grid(3);
        let part = g.nonsingular_part().set;
        let r = g.restrict(&part).unwrap();
        assert!(r.classify().unwrap().nonsingular);
        assert_eq!(r.space().num_points(), 1);

        let e = fixtures::ex1a();
        // {0, 1}: the null atom 1 maps into 0, so nothing leaves
        let r = e.restrict(&e.space().full()).unwrap();
        assert_eq!(r.space().num_points(), 2);
        assert_eq!(
            e.restrict(&e.space().atom(1)).unwrap().space().num_points(),
            2,
            "null atom leaving the set is sent to the sink"
        );
        let rot = fixtures::rot3();
        assert_eq!(rot.restrict(&rot.space().atom(0)).unwrap_err(), Error::NotForwardInvariant);
    }
}
