//! Finite measure spaces with partition σ-algebras, measurable sets and
//! measurable null-preserving maps.
//!
//! A [`Space`] is a finite list of weighted points together with a partition
//! of the points into atoms. Every measurable set is a union of atoms, so an
//! [`MSet`] is stored as a bitset over atom indices. All measure values are
//! exact rationals.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use fixedbitset::FixedBitSet;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};

/// Exact rational number used for every weight and measure value.
pub type Rat = BigRational;

/// Shorthand for `n/d` as a [`Rat`].
pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

static NEXT_SPACE_ID: AtomicU64 = AtomicU64::new(1);

/// Identity tag shared by a space and every set built on it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SpaceId(u64);

impl SpaceId {
    fn fresh() -> Self {
        SpaceId(NEXT_SPACE_ID.fetch_add(1, Ordering::Relaxed))
    }
}

/// A finite measure space `(X, 𝒜, λ)` with `𝒜` generated by a partition.
#[derive(Debug, Clone)]
pub struct Space {
    id: SpaceId,
    name: String,
    points: Vec<String>,
    weights: Vec<Rat>,
    atoms: Vec<Vec<usize>>,
    atom_names: Vec<String>,
    atom_of: Vec<usize>,
    atom_weights: Vec<Rat>,
    positive: FixedBitSet,
}

impl Space {
    /// Builds a space from weighted points and an explicit partition given by
    /// point names. Atoms are ordered by the position of their first point in
    /// the point list; points keep their input order inside an atom.
    pub fn new(
        name: impl Into<String>,
        points: Vec<(String, Rat)>,
        atoms: Vec<(String, Vec<String>)>,
    ) -> Result<Self> {
        let mut index = HashMap::with_capacity(points.len());
        for (i, (p, w)) in points.iter().enumerate() {
            if index.insert(p.clone(), i).is_some() {
                return Err(Error::DuplicatePoint(p.clone()));
            }
            if w.is_negative() {
                return Err(Error::NegativeWeight(p.clone()));
            }
        }

        let mut owner: Vec<Option<usize>> = vec![None; points.len()];
        let mut blocks = Vec::with_capacity(atoms.len());
        let mut seen_names = HashSet::new();
        for (k, (atom_name, members)) in atoms.iter().enumerate() {
            if !seen_names.insert(atom_name.as_str()) {
                return Err(Error::DuplicateAtom(atom_name.clone()));
            }
            if members.is_empty() {
                return Err(Error::EmptyAtom(atom_name.clone()));
            }
            let mut block = Vec::with_capacity(members.len());
            for p in members {
                let &i = index.get(p).ok_or_else(|| Error::UnknownPoint(p.clone()))?;
                if owner[i].is_some() {
                    return Err(Error::PartitionOverlap(p.clone()));
                }
                owner[i] = Some(k);
                block.push(i);
            }
            block.sort_unstable();
            blocks.push((atom_name.clone(), block));
        }
        if let Some(i) = owner.iter().position(Option::is_none) {
            return Err(Error::PartitionGap(points[i].0.clone()));
        }
        blocks.sort_by_key(|(_, b)| b[0]);

        let (names, weights): (Vec<String>, Vec<Rat>) = points.into_iter().unzip();
        let mut atom_of = vec![0; names.len()];
        let mut atom_weights = Vec::with_capacity(blocks.len());
        let mut positive = FixedBitSet::with_capacity(blocks.len());
        let mut atom_names = Vec::with_capacity(blocks.len());
        let mut atom_points = Vec::with_capacity(blocks.len());
        for (a, (atom_name, block)) in blocks.into_iter().enumerate() {
            let mut w = Rat::zero();
            for &p in &block {
                atom_of[p] = a;
                w += &weights[p];
            }
            if w.is_positive() {
                positive.insert(a);
            }
            atom_weights.push(w);
            atom_names.push(atom_name);
            atom_points.push(block);
        }

        Ok(Space {
            id: SpaceId::fresh(),
            name: name.into(),
            points: names,
            weights,
            atoms: atom_points,
            atom_names,
            atom_of,
            atom_weights,
            positive,
        })
    }

    /// A space whose σ-algebra is the power set: every point is its own atom,
    /// named after the point.
    pub fn discrete(name: impl Into<String>, points: Vec<(String, Rat)>) -> Result<Self> {
        let atoms = points
            .iter()
            .map(|(p, _)| (p.clone(), vec![p.clone()]))
            .collect();
        Space::new(name, points, atoms)
    }

    pub fn id(&self) -> SpaceId {
        self.id
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn num_points(&self) -> usize {
        self.points.len()
    }

    pub fn num_atoms(&self) -> usize {
        self.atoms.len()
    }

    pub fn point_name(&self, p: usize) -> &str {
        &self.points[p]
    }

    pub fn point_weight(&self, p: usize) -> &Rat {
        &self.weights[p]
    }

    pub fn point_index(&self, name: &str) -> Option<usize> {
        self.points.iter().position(|p| p == name)
    }

    pub fn atom_name(&self, a: usize) -> &str {
        &self.atom_names[a]
    }

    pub fn atom_index(&self, name: &str) -> Option<usize> {
        self.atom_names.iter().position(|n| n == name)
    }

    pub fn atom_points(&self, a: usize) -> &[usize] {
        &self.atoms[a]
    }

    pub fn atom_of(&self, p: usize) -> usize {
        self.atom_of[p]
    }

    pub fn atom_weight(&self, a: usize) -> &Rat {
        &self.atom_weights[a]
    }

    pub fn is_positive_atom(&self, a: usize) -> bool {
        self.positive.contains(a)
    }

    /// λ(X).
    pub fn total(&self) -> Rat {
        self.atom_weights.iter().sum()
    }

    pub fn empty(&self) -> MSet {
        MSet {
            space: self.id,
            members: FixedBitSet::with_capacity(self.num_atoms()),
        }
    }

    pub fn full(&self) -> MSet {
        let mut s = self.empty();
        s.members.insert_range(..);
        s
    }

    pub fn atom(&self, a: usize) -> MSet {
        let mut s = self.empty();
        s.members.insert(a);
        s
    }

    pub fn from_atoms(&self, atoms: impl IntoIterator<Item = usize>) -> MSet {
        let mut s = self.empty();
        for a in atoms {
            s.members.insert(a);
        }
        s
    }

    /// The set whose atoms are the set bits of `mask` (atom 0 is bit 0).
    pub fn from_mask(&self, mask: u64) -> MSet {
        self.from_atoms((0..self.num_atoms().min(64)).filter(|a| mask >> a & 1 == 1))
    }

    /// Union of all atoms of positive weight (the canonical version of `X`).
    pub fn positive_part(&self) -> MSet {
        MSet {
            space: self.id,
            members: self.positive.clone(),
        }
    }

    /// Union of all atoms of weight zero.
    pub fn null_part(&self) -> MSet {
        self.complement(&self.positive_part())
    }

    /// Re-tags a set built on another space with the same atom count.
    pub fn transport(&self, a: &MSet) -> MSet {
        assert_eq!(a.members.len(), self.num_atoms(), "atom count differs");
        MSet {
            space: self.id,
            members: a.members.clone(),
        }
    }

    pub fn check(&self, a: &MSet) -> Result<()> {
        if a.space == self.id {
            Ok(())
        } else {
            Err(Error::SpaceMismatch)
        }
    }

    pub fn complement(&self, a: &MSet) -> MSet {
        debug_assert_eq!(a.space, self.id);
        let mut c = a.clone();
        c.members.toggle_range(..);
        c
    }

    /// The representative of `a` mod λ that contains no null atoms.
    pub fn canonical(&self, a: &MSet) -> MSet {
        debug_assert_eq!(a.space, self.id);
        let mut c = a.clone();
        c.members.intersect_with(&self.positive);
        c
    }

    /// λ(A), the sum of the weights of all points in the atoms of `a`.
    pub fn measure(&self, a: &MSet) -> Rat {
        assert_eq!(a.space, self.id, "set belongs to another space");
        a.members.ones().map(|i| &self.atom_weights[i]).sum()
    }

    pub fn is_null(&self, a: &MSet) -> bool {
        debug_assert_eq!(a.space, self.id);
        a.members.is_disjoint(&self.positive)
    }

    /// `A ⊆̇ B`, i.e. λ(A ∖ B) = 0.
    pub fn ae_subset(&self, a: &MSet, b: &MSet) -> bool {
        debug_assert_eq!(a.space, self.id);
        debug_assert_eq!(b.space, self.id);
        a.members
            .ones()
            .all(|i| b.members.contains(i) || !self.positive.contains(i))
    }

    /// `A ≐ B`, i.e. λ(A △ B) = 0.
    pub fn ae_eq(&self, a: &MSet, b: &MSet) -> bool {
        self.ae_subset(a, b) && self.ae_subset(b, a)
    }

    pub fn ae_relation(&self, a: &MSet, b: &MSet, rel: AeRelation) -> Result<bool> {
        self.check(a)?;
        match rel {
            AeRelation::Null => Ok(self.is_null(a)),
            AeRelation::Eq => {
                self.check(b)?;
                Ok(self.ae_eq(a, b))
            }
            AeRelation::Subset => {
                self.check(b)?;
                Ok(self.ae_subset(a, b))
            }
        }
    }

    /// Indicator over points of the atoms in `a`.
    pub fn points_of(&self, a: &MSet) -> FixedBitSet {
        let mut pts = FixedBitSet::with_capacity(self.num_points());
        for i in a.members.ones() {
            for &p in &self.atoms[i] {
                pts.insert(p);
            }
        }
        pts
    }

    /// Smallest atom union containing the point set `pts`.
    pub fn hull_of_points(&self, pts: &FixedBitSet) -> MSet {
        self.from_atoms(pts.ones().map(|p| self.atom_of[p]))
    }

    /// Whether the point set `pts` is a union of atoms.
    pub fn is_atom_union(&self, pts: &FixedBitSet) -> bool {
        let hull = self.hull_of_points(pts);
        hull.members
            .ones()
            .all(|a| self.atoms[a].iter().all(|&p| pts.contains(p)))
    }

    /// Outer measure of a point set: the measure of its measurable hull.
    pub fn outer_measure(&self, pts: &FixedBitSet) -> Rat {
        self.measure(&self.hull_of_points(pts))
    }

    /// A copy of this space with each point weight multiplied by the
    /// corresponding factor. The copy gets a fresh identity.
    pub fn reweighted(&self, factors: &[Rat]) -> Result<Space> {
        assert_eq!(factors.len(), self.num_points());
        let points = self
            .points
            .iter()
            .zip(&self.weights)
            .zip(factors)
            .map(|((p, w), f)| (p.clone(), w * f))
            .collect();
        Space::new(self.name.clone(), points, self.partition_by_name())
    }

    /// This space rescaled to total mass 1.
    pub fn normalized(&self) -> Result<Space> {
        let total = self.total();
        if total.is_zero() {
            return Err(Error::NotNormalized);
        }
        let factor = total.recip();
        self.reweighted(&vec![factor; self.num_points()])
    }

    /// Weighted points in input order.
    pub fn weighted_points(&self) -> Vec<(String, Rat)> {
        self.points.iter().cloned().zip(self.weights.iter().cloned()).collect()
    }

    /// Atoms as `(name, point names)` in atom order.
    pub fn partition_by_name(&self) -> Vec<(String, Vec<String>)> {
        self.atoms
            .iter()
            .zip(&self.atom_names)
            .map(|(b, n)| (n.clone(), b.iter().map(|&p| self.points[p].clone()).collect()))
            .collect()
    }

    /// Atom names of `a` in ascending atom order.
    pub fn names(&self, a: &MSet) -> Vec<String> {
        a.atoms().map(|i| self.atom_names[i].clone()).collect()
    }

    /// Space-separated atom names, or `∅`.
    pub fn display_set(&self, a: &MSet) -> String {
        if a.is_empty() {
            "∅".to_string()
        } else {
            self.names(a).join(" ")
        }
    }
}

/// Relation tested by [`Space::ae_relation`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AeRelation {
    /// `A ≐ B`
    Eq,
    /// `A ⊆̇ B`
    Subset,
    /// `λ(A) = 0`; the second argument is ignored.
    Null,
}

/// A measurable set, stored as the set of its atoms.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct MSet {
    space: SpaceId,
    members: FixedBitSet,
}

impl MSet {
    pub fn space(&self) -> SpaceId {
        self.space
    }

    pub fn contains(&self, atom: usize) -> bool {
        self.members.contains(atom)
    }

    pub fn insert(&mut self, atom: usize) {
        self.members.insert(atom);
    }

    /// Atom indices in ascending order.
    pub fn atoms(&self) -> fixedbitset::Ones<'_> {
        self.members.ones()
    }

    pub fn len(&self) -> usize {
        self.members.count_ones(..)
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_clear()
    }

    /// Bitmask of the first 64 atoms.
    pub fn mask(&self) -> u64 {
        self.atoms().take_while(|&a| a < 64).fold(0, |m, a| m | 1 << a)
    }

    pub fn union(&self, other: &MSet) -> MSet {
        assert_eq!(self.space, other.space, "set belongs to another space");
        let mut s = self.clone();
        s.members.union_with(&other.members);
        s
    }

    pub fn intersection(&self, other: &MSet) -> MSet {
        assert_eq!(self.space, other.space, "set belongs to another space");
        let mut s = self.clone();
        s.members.intersect_with(&other.members);
        s
    }

    pub fn difference(&self, other: &MSet) -> MSet {
        assert_eq!(self.space, other.space, "set belongs to another space");
        let mut s = self.clone();
        s.members.difference_with(&other.members);
        s
    }

    pub fn is_subset(&self, other: &MSet) -> bool {
        self.members.is_subset(&other.members)
    }
}

impl fmt::Debug for MSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.atoms()).finish()
    }
}

/// A measurable, null-preserving map `T: X → X′` given pointwise.
#[derive(Debug, Clone)]
pub struct MeasurableMap {
    domain: Arc<Space>,
    codomain: Arc<Space>,
    image_of: Vec<usize>,
    atom_image: Vec<usize>,
}

impl MeasurableMap {
    /// Validates `image_of` (point index → codomain point index) and builds
    /// the map.
    pub fn new(domain: Arc<Space>, codomain: Arc<Space>, image_of: Vec<usize>) -> Result<Self> {
        let atom_image = validate_map(&domain, &codomain, &image_of)?;
        Ok(MeasurableMap {
            domain,
            codomain,
            image_of,
            atom_image,
        })
    }

    /// Builds an endomap of `space`.
    pub fn endomap(space: Arc<Space>, image_of: Vec<usize>) -> Result<Self> {
        MeasurableMap::new(space.clone(), space, image_of)
    }

    pub fn domain(&self) -> &Arc<Space> {
        &self.domain
    }

    pub fn codomain(&self) -> &Arc<Space> {
        &self.codomain
    }

    pub fn is_endomap(&self) -> bool {
        self.domain.id() == self.codomain.id()
    }

    pub fn image_of(&self) -> &[usize] {
        &self.image_of
    }

    pub fn point_image(&self, p: usize) -> usize {
        self.image_of[p]
    }

    /// The codomain atom receiving the whole of domain atom `a`.
    pub fn atom_image(&self, a: usize) -> usize {
        self.atom_image[a]
    }

    pub fn atom_images(&self) -> &[usize] {
        &self.atom_image
    }

    /// The exact set-theoretic preimage `T⁻¹B`.
    pub fn preimage(&self, b: &MSet) -> Result<MSet> {
        self.codomain.check(b)?;
        Ok(self.preimage_unchecked(b))
    }

    pub(crate) fn preimage_unchecked(&self, b: &MSet) -> MSet {
        self.domain
            .from_atoms((0..self.domain.num_atoms()).filter(|&a| b.contains(self.atom_image[a])))
    }

    /// The exact point image `T(A)` as a set of codomain points.
    pub fn point_image_set(&self, a: &MSet) -> Result<FixedBitSet> {
        self.domain.check(a)?;
        let mut pts = FixedBitSet::with_capacity(self.codomain.num_points());
        for p in self.domain.points_of(a).ones() {
            pts.insert(self.image_of[p]);
        }
        Ok(pts)
    }

    /// `next ∘ self`.
    pub fn then(&self, next: &MeasurableMap) -> Result<MeasurableMap> {
        if self.codomain.id() != next.domain.id() {
            return Err(Error::SpaceMismatch);
        }
        let image_of = self.image_of.iter().map(|&q| next.image_of[q]).collect();
        MeasurableMap::new(self.domain.clone(), next.codomain.clone(), image_of)
    }

    /// The same point map on the same points with new domain and codomain
    /// spaces (e.g. after reweighting).
    pub fn rebased(&self, domain: Arc<Space>, codomain: Arc<Space>) -> Result<MeasurableMap> {
        MeasurableMap::new(domain, codomain, self.image_of.clone())
    }
}

/// Checks measurability and null-preservation of a point map and returns the
/// induced map on atoms.
pub fn validate_map(domain: &Space, codomain: &Space, image_of: &[usize]) -> Result<Vec<usize>> {
    if image_of.len() != domain.num_points() {
        return Err(Error::MapArity {
            expected: domain.num_points(),
            found: image_of.len(),
        });
    }
    if let Some(&q) = image_of.iter().find(|&&q| q >= codomain.num_points()) {
        return Err(Error::UnknownPoint(format!("#{q}")));
    }
    let mut atom_image = Vec::with_capacity(domain.num_atoms());
    for a in 0..domain.num_atoms() {
        let pts = domain.atom_points(a);
        let target = codomain.atom_of(image_of[pts[0]]);
        if let Some(&p) = pts.iter().find(|&&p| codomain.atom_of(image_of[p]) != target) {
            let other = codomain.atom_of(image_of[p]);
            let offending = target.min(other);
            return Err(Error::NotMeasurable(codomain.atom_name(offending).to_string()));
        }
        atom_image.push(target);
    }
    for b in 0..codomain.num_atoms() {
        if codomain.is_positive_atom(b) {
            continue;
        }
        let offends = (0..domain.num_atoms())
            .any(|a| atom_image[a] == b && domain.is_positive_atom(a));
        if offends {
            return Err(Error::NotNullPreserving(codomain.atom_name(b).to_string()));
        }
    }
    Ok(atom_image)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pts(spec: &[(&str, i64, i64)]) -> Vec<(String, Rat)> {
        spec.iter().map(|&(p, n, d)| (p.to_string(), rat(n, d))).collect()
    }

    fn atoms(spec: &[(&str, &[&str])]) -> Vec<(String, Vec<String>)> {
        spec.iter()
            .map(|(n, ps)| (n.to_string(), ps.iter().map(|p| p.to_string()).collect()))
            .collect()
    }

    #[test]
    fn validate_accepts_well_formed_space() {
        let s = Space::discrete("X", pts(&[("a", 1, 2), ("b", 1, 2)])).unwrap();
        assert_eq!(s.num_atoms(), 2);
        assert_eq!(s.total(), rat(1, 1));
    }

    #[test]
    fn validate_rejects_bad_spaces() {
        assert_eq!(
            Space::discrete("X", pts(&[("a", -1, 3)])).unwrap_err(),
            Error::NegativeWeight("a".into())
        );
        let err = Space::new(
            "X",
            pts(&[("a", 1, 2), ("b", 1, 2)]),
            atoms(&[("A", &["a", "b"]), ("B", &["b"])]),
        )
        .unwrap_err();
        assert_eq!(err, Error::PartitionOverlap("b".into()));
        let err = Space::new("X", pts(&[("a", 1, 2), ("b", 1, 2)]), atoms(&[("A", &["a"])]))
            .unwrap_err();
        assert_eq!(err, Error::PartitionGap("b".into()));
        let err = Space::discrete("X", pts(&[("a", 1, 2), ("a", 1, 2)])).unwrap_err();
        assert_eq!(err, Error::DuplicatePoint("a".into()));
        let err = Space::new("X", pts(&[("a", 1, 1)]), atoms(&[("A", &["a"]), ("B", &[])]))
            .unwrap_err();
        assert_eq!(err, Error::EmptyAtom("B".into()));
    }

    #[test]
    fn atoms_follow_point_order() {
        let s = Space::new(
            "X",
            pts(&[("a", 1, 1), ("b", 1, 1), ("c", 1, 1)]),
            atoms(&[("C", &["c"]), ("AB", &["b", "a"])]),
        )
        .unwrap();
        assert_eq!(s.atom_name(0), "AB");
        assert_eq!(s.atom_points(0), &[0, 1]);
        assert_eq!(s.atom_name(1), "C");
    }

    #[test]
    fn measure_and_relations() {
        let ex = Space::discrete("X", pts(&[("0", 1, 1), ("1", 0, 1)])).unwrap();
        let a = ex.atom(1);
        assert_eq!(ex.measure(&a), rat(0, 1));
        assert!(ex.ae_relation(&a, &ex.empty(), AeRelation::Eq).unwrap());
        assert_eq!(ex.measure(&ex.empty()), rat(0, 1));

        let rot = Space::discrete("R", pts(&[("0", 1, 1), ("1", 1, 1), ("2", 1, 1)])).unwrap();
        assert_eq!(rot.measure(&rot.from_atoms([0, 2])), rat(2, 1));
        assert!(!rot.ae_relation(&rot.atom(0), &rot.atom(1), AeRelation::Subset).unwrap());
        assert!(rot.ae_subset(&rot.atom(2), &rot.atom(2)));
        assert_eq!(
            rot.ae_relation(&rot.atom(0), &ex.atom(0), AeRelation::Eq),
            Err(Error::SpaceMismatch)
        );
    }

    #[test]
    fn preimage_of_collapse() {
        let s = Arc::new(
            Space::discrete("C", pts(&[("1", 1, 4), ("2", 1, 4), ("3", 1, 2)])).unwrap(),
        );
        let t = MeasurableMap::endomap(s.clone(), vec![2, 2, 2]).unwrap();
        assert_eq!(t.preimage(&s.atom(2)).unwrap(), s.full());
        assert!(t.preimage(&s.atom(0)).unwrap().is_empty());
    }

    #[test]
    fn map_validation() {
        let x = Arc::new(Space::discrete("X", pts(&[("0", 1, 1), ("1", 0, 1)])).unwrap());
        assert!(MeasurableMap::endomap(x.clone(), vec![0, 0]).is_ok());

        // identity onto the trivial algebra is measurable
        let fine = Arc::new(Space::discrete("X", pts(&[("0", 1, 2), ("1", 1, 2)])).unwrap());
        let coarse = Arc::new(
            Space::new("Y", pts(&[("0", 1, 2), ("1", 1, 2)]), atoms(&[("Y", &["0", "1"])]))
                .unwrap(),
        );
        assert!(MeasurableMap::new(fine.clone(), coarse.clone(), vec![0, 1]).is_ok());
        // but the identity from the trivial algebra to the power set is not
        assert_eq!(
            MeasurableMap::new(coarse, fine, vec![0, 1]).unwrap_err(),
            Error::NotMeasurable("0".into())
        );

        // a weight-1 point sent onto a null atom
        let y = Arc::new(Space::discrete("Y", pts(&[("p", 1, 1), ("z", 0, 1)])).unwrap());
        assert_eq!(
            MeasurableMap::endomap(y, vec![1, 0]).unwrap_err(),
            Error::NotNullPreserving("z".into())
        );
    }
}
