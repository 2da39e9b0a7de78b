//! Essential images, the transfer operator on densities, and how essential
//! images compare with ordinary set images.
//!
//! For a null-preserving map `T` and a measurable `A`, the essential image
//! `T̂A` is the smallest measurable support (mod λ′) of the pushforward
//! `λ|_A ∘ T⁻¹`. On a finite partition space this is exactly the set of
//! codomain atoms `a′` with `λ(A ∩ T⁻¹a′) > 0`, which is what
//! [`essential_image`] returns.

use fixedbitset::FixedBitSet;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::measure::{MSet, MeasurableMap, Rat, Space, SpaceId};

/// `T̂A`, returned without null atoms.
pub fn essential_image(map: &MeasurableMap, a: &MSet) -> Result<MSet> {
    map.domain().check(a)?;
    Ok(image_unchecked(map, a))
}

pub(crate) fn image_unchecked(map: &MeasurableMap, a: &MSet) -> MSet {
    let dom = map.domain();
    map.codomain().from_atoms(
        a.atoms()
            .filter(|&i| dom.is_positive_atom(i))
            .map(|i| map.atom_image(i)),
    )
}

/// λ(A ∩ T⁻¹a′) for every codomain atom `a′`.
pub fn pushforward(map: &MeasurableMap, a: &MSet) -> Result<Vec<Rat>> {
    map.domain().check(a)?;
    let dom = map.domain();
    let mut mass = vec![Rat::zero(); map.codomain().num_atoms()];
    for i in a.atoms() {
        mass[map.atom_image(i)] += dom.atom_weight(i);
    }
    Ok(mass)
}

/// The positive codomain atom of lowest index outside `T̂X`, if any. Such an
/// atom has positive measure but carries no pushforward mass, so its
/// existence is exactly the failure of `λ ∘ T⁻¹ ≃ λ′`.
pub fn singular_atom(map: &MeasurableMap) -> Option<usize> {
    let full = image_unchecked(map, &map.domain().full());
    let cod = map.codomain();
    (0..cod.num_atoms()).find(|&b| cod.is_positive_atom(b) && !full.contains(b))
}

/// A nonnegative density with respect to λ, constant on atoms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Density {
    space: SpaceId,
    values: Vec<Rat>,
}

impl Density {
    /// Builds a density from per-atom values. Values on null atoms are
    /// replaced by 0.
    pub fn new(space: &Space, values: Vec<Rat>) -> Result<Self> {
        if values.len() != space.num_atoms() {
            return Err(Error::TableIncomplete {
                expected: space.num_atoms(),
                found: values.len(),
            });
        }
        if let Some(a) = values.iter().position(|v| v.is_negative()) {
            return Err(Error::NegativeWeight(space.atom_name(a).to_string()));
        }
        let mut d = Density {
            space: space.id(),
            values,
        };
        d.zero_on_null(space);
        Ok(d)
    }

    /// Per-atom values taken as given, including nonzero values on null
    /// atoms. Used where such values must be reported rather than hidden.
    pub fn raw(space: &Space, values: Vec<Rat>) -> Result<Self> {
        if values.len() != space.num_atoms() {
            return Err(Error::TableIncomplete {
                expected: space.num_atoms(),
                found: values.len(),
            });
        }
        Ok(Density {
            space: space.id(),
            values,
        })
    }

    pub fn zero(space: &Space) -> Self {
        Density {
            space: space.id(),
            values: vec![Rat::zero(); space.num_atoms()],
        }
    }

    /// `1_A`.
    pub fn indicator(space: &Space, a: &MSet) -> Result<Self> {
        space.check(a)?;
        let values = (0..space.num_atoms())
            .map(|i| if a.contains(i) { Rat::from_integer(1.into()) } else { Rat::zero() })
            .collect();
        Density::new(space, values)
    }

    fn zero_on_null(&mut self, space: &Space) {
        for (i, v) in self.values.iter_mut().enumerate() {
            if !space.is_positive_atom(i) {
                *v = Rat::zero();
            }
        }
    }

    pub fn space(&self) -> SpaceId {
        self.space
    }

    pub fn value(&self, atom: usize) -> &Rat {
        &self.values[atom]
    }

    pub fn values(&self) -> &[Rat] {
        &self.values
    }

    /// `{u > 0}` as a measurable set.
    pub fn support(&self, space: &Space) -> MSet {
        space.from_atoms((0..self.values.len()).filter(|&i| self.values[i].is_positive()))
    }

    /// `∫_A u dλ`.
    pub fn integral(&self, space: &Space, a: &MSet) -> Rat {
        a.atoms().map(|i| &self.values[i] * space.atom_weight(i)).sum()
    }
}

/// The transfer operator: the density of `(u·λ) ∘ T⁻¹` with respect to λ′,
/// with value 0 on null atoms.
pub fn transfer_density(map: &MeasurableMap, u: &Density) -> Result<Density> {
    let dom = map.domain();
    let cod = map.codomain();
    if u.space != dom.id() {
        return Err(Error::SpaceMismatch);
    }
    let mut mass = vec![Rat::zero(); cod.num_atoms()];
    for p in 0..dom.num_points() {
        let a = dom.atom_of(p);
        mass[cod.atom_of(map.point_image(p))] += u.value(a) * dom.point_weight(p);
    }
    let values = mass
        .into_iter()
        .enumerate()
        .map(|(b, m)| {
            let w = cod.atom_weight(b);
            if w.is_zero() {
                Rat::zero()
            } else {
                m / w
            }
        })
        .collect();
    Density::new(cod, values)
}

/// `{T̂1_A > 0}`.
pub fn essential_image_via_transfer(map: &MeasurableMap, a: &MSet) -> Result<MSet> {
    let u = Density::indicator(map.domain(), a)?;
    Ok(transfer_density(map, &u)?.support(map.codomain()))
}

/// Side-by-side comparison of the set image `T(A)` with `T̂A`.
#[derive(Debug, Clone)]
pub struct ImageReport {
    /// The exact point image `T(A)`.
    pub set_image_points: FixedBitSet,
    /// Whether `T(A)` is a union of codomain atoms.
    pub is_measurable: bool,
    /// Smallest atom union containing `T(A)`.
    pub measurable_hull: MSet,
    pub essential_image: MSet,
    /// `A∘ = A ∩ T⁻¹T̂A`, a version of `A` with measurable image.
    pub normal_version: MSet,
    /// `T(A∘)` as points. When `T(A)` is measurable this is a measurable
    /// version of `T̂A`; otherwise no such guarantee exists.
    pub normal_image_points: FixedBitSet,
}

pub fn set_image_report(map: &MeasurableMap, a: &MSet) -> Result<ImageReport> {
    let cod = map.codomain();
    let set_image_points = map.point_image_set(a)?;
    let is_measurable = cod.is_atom_union(&set_image_points);
    let measurable_hull = cod.hull_of_points(&set_image_points);
    let essential_image = image_unchecked(map, a);
    let normal_version = a.intersection(&map.preimage_unchecked(&essential_image));
    let normal_image_points = map.point_image_set(&normal_version)?;
    let report = ImageReport {
        set_image_points,
        is_measurable,
        measurable_hull,
        essential_image,
        normal_version,
        normal_image_points,
    };

    let dom = map.domain();
    if !cod.ae_subset(&report.essential_image, &report.measurable_hull) {
        return Err(Error::CrossCheck("essential image escapes the measurable hull".into()));
    }
    if !dom.ae_eq(&report.normal_version, a) {
        return Err(Error::CrossCheck("A∘ is not a version of A".into()));
    }
    if report.is_measurable {
        if !cod.ae_subset(&report.essential_image, &report.measurable_hull) {
            return Err(Error::CrossCheck("T̂A escapes the measurable image TA".into()));
        }
        if !cod.is_atom_union(&report.normal_image_points) {
            return Err(Error::CrossCheck("T(A∘) is not measurable".into()));
        }
        let normal_image = cod.hull_of_points(&report.normal_image_points);
        if !cod.ae_eq(&normal_image, &report.essential_image) {
            return Err(Error::CrossCheck("T(A∘) is not a version of T̂A".into()));
        }
    }
    Ok(report)
}

/// The maximal null set `N` (all null domain atoms) if its set image has
/// positive outer measure. Any ambitious null set lies inside `N`, so `None`
/// means there are none.
pub fn find_ambitious_null_set(map: &MeasurableMap) -> Option<MSet> {
    let dom = map.domain();
    let null = dom.null_part();
    if null.is_empty() {
        return None;
    }
    let image = map.point_image_set(&null).expect("same space");
    map.codomain()
        .outer_measure(&image)
        .is_positive()
        .then_some(null)
}

/// Result of removing the null atoms from the domain of a map.
#[derive(Debug, Clone)]
pub struct Purged {
    /// `Y`, the union of the positive domain atoms (a version of `X`).
    pub kept: MSet,
    /// `T|_Y : Y → X′`.
    pub map: MeasurableMap,
}

/// Restricts `map` to the union of its positive domain atoms. The restricted
/// map has no nonempty null sets, hence no ambitious null sets.
pub fn purge_ambitious_null_sets(map: &MeasurableMap) -> Result<Purged> {
    let dom = map.domain();
    let kept = dom.positive_part();
    let pts = dom.points_of(&kept);
    let points: Vec<(String, Rat)> = pts
        .ones()
        .map(|p| (dom.point_name(p).to_string(), dom.point_weight(p).clone()))
        .collect();
    let atoms = kept
        .atoms()
        .map(|a| {
            let names = dom
                .atom_points(a)
                .iter()
                .map(|&p| dom.point_name(p).to_string())
                .collect();
            (dom.atom_name(a).to_string(), names)
        })
        .collect();
    let restricted = std::sync::Arc::new(Space::new(dom.name(), points, atoms)?);
    let image_of = pts.ones().map(|p| map.point_image(p)).collect();
    let codomain = if map.is_endomap() {
        // only possible when nothing was removed
        if dom.null_part().is_empty() {
            restricted.clone()
        } else {
            map.codomain().clone()
        }
    } else {
        map.codomain().clone()
    };
    let map = MeasurableMap::new(restricted, codomain, image_of)?;
    Ok(Purged { kept, map })
}

/// Which axiom a candidate image operator violates first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AxiomViolation {
    /// `λ(A) > 0` iff `λ′(ŤA) > 0` fails at `set`.
    Positivity { set: MSet },
    /// `A ⊆̇ B` but not `ŤA ⊆̇ ŤB`.
    Monotonicity { smaller: MSet, larger: MSet },
    /// `Ť(T⁻¹B′) ⊆̇ B′` fails at `target`.
    PreimageContainment { target: MSet },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AxiomReport {
    pub holds: bool,
    pub violation: Option<AxiomViolation>,
    /// Whether the candidate agrees with `T̂` mod λ′ on every set.
    pub agrees_with_essential_image: bool,
}

/// Largest domain handled by [`verify_image_axioms`].
pub const AXIOM_ATOM_LIMIT: usize = 16;

/// Checks whether the set map `candidate` (indexed by atom bitmask of the
/// domain set) is positivity preserving, monotone mod λ and satisfies
/// `Ť(T⁻¹B′) ⊆̇ B′`. Such a map must agree with `T̂` mod λ′; the report
/// records that comparison separately, and a map passing the axioms while
/// disagreeing is reported as a cross-check failure.
pub fn verify_image_axioms(map: &MeasurableMap, candidate: &[MSet]) -> Result<AxiomReport> {
    let dom = map.domain();
    let cod = map.codomain();
    let n = dom.num_atoms();
    if n > AXIOM_ATOM_LIMIT {
        return Err(Error::TooManyAtoms {
            atoms: n,
            limit: AXIOM_ATOM_LIMIT,
        });
    }
    if cod.num_atoms() > 64 {
        return Err(Error::TooManyAtoms {
            atoms: cod.num_atoms(),
            limit: 64,
        });
    }
    let size = 1usize << n;
    if candidate.len() != size {
        return Err(Error::TableIncomplete {
            expected: size,
            found: candidate.len(),
        });
    }
    for c in candidate {
        cod.check(c)?;
    }

    let dom_pos = dom.positive_part().mask();
    let cod_pos = cod.positive_part().mask();
    let table: Vec<u64> = candidate.iter().map(MSet::mask).collect();
    let sub_cod = |x: u64, y: u64| x & !y & cod_pos == 0;

    let violation = (|| {
        for (m, &img) in table.iter().enumerate() {
            let positive = m as u64 & dom_pos != 0;
            if positive != (img & cod_pos != 0) {
                return Some(AxiomViolation::Positivity {
                    set: dom.from_mask(m as u64),
                });
            }
        }
        for a in 0..size as u64 {
            for b in 0..size as u64 {
                if a & !b & dom_pos == 0 && !sub_cod(table[a as usize], table[b as usize]) {
                    return Some(AxiomViolation::Monotonicity {
                        smaller: dom.from_mask(a),
                        larger: dom.from_mask(b),
                    });
                }
            }
        }
        for target in 0..1u64 << cod.num_atoms() {
            let pre = (0..n)
                .filter(|&i| target >> map.atom_image(i) & 1 == 1)
                .fold(0u64, |m, i| m | 1 << i);
            if !sub_cod(table[pre as usize], target) {
                return Some(AxiomViolation::PreimageContainment {
                    target: cod.from_mask(target),
                });
            }
        }
        None
    })();

    let agrees = (0..size as u64).all(|m| {
        let ess = image_unchecked(map, &dom.from_mask(m)).mask();
        sub_cod(table[m as usize], ess) && sub_cod(ess, table[m as usize])
    });
    let holds = violation.is_none();
    if holds && !agrees {
        return Err(Error::CrossCheck(
            "candidate satisfies the image axioms but differs from the essential image".into(),
        ));
    }
    Ok(AxiomReport {
        holds,
        violation,
        agrees_with_essential_image: agrees,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::measure::rat;

    #[test]
    fn ex1a_null_set_has_empty_essential_image() {
        let s = fixtures::ex1a();
        let t = s.map();
        let x = t.domain();
        let a = x.atom(1);
        assert!(essential_image(t, &a).unwrap().is_empty());
        assert!(essential_image(t, &x.empty()).unwrap().is_empty());
        let image = t.point_image_set(&a).unwrap();
        assert_eq!(x.outer_measure(&image), rat(1, 1));
    }

    #[test]
    fn transfer_on_ex1a_and_zero() {
        let s = fixtures::ex1a();
        let t = s.map();
        let x = t.domain();
        let u = Density::indicator(x, &x.full()).unwrap();
        let v = transfer_density(t, &u).unwrap();
        assert_eq!(v.values(), &[rat(1, 1), rat(0, 1)]);
        let z = transfer_density(t, &Density::zero(x)).unwrap();
        assert_eq!(z, Density::zero(x));
    }

    #[test]
    fn transfer_duality_holds_for_atom_tests() {
        let s = fixtures::collapse();
        let t = s.map();
        let x = t.domain();
        let u = Density::new(x, vec![rat(2, 1), rat(1, 3), rat(5, 7)]).unwrap();
        let v = transfer_density(t, &u).unwrap();
        for b in 0..x.num_atoms() {
            // ∫ 1_b∘T · u dλ = ∫ 1_b · T̂u dλ
            let lhs = u.integral(x, &t.preimage(&x.atom(b)).unwrap());
            let rhs = v.integral(x, &x.atom(b));
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn via_transfer_matches_direct() {
        let s = fixtures::rot3();
        let t = s.map();
        let x = t.domain();
        assert_eq!(essential_image_via_transfer(t, &x.atom(0)).unwrap(), x.atom(1));
        let e = fixtures::ex1a();
        assert!(essential_image_via_transfer(e.map(), &e.space().atom(1)).unwrap().is_empty());
    }

    #[test]
    fn set_image_reports() {
        let e = fixtures::ex1a();
        let r = set_image_report(e.map(), &e.space().atom(1)).unwrap();
        assert!(r.is_measurable);
        assert_eq!(r.set_image_points.ones().collect::<Vec<_>>(), vec![0]);
        assert!(r.essential_image.is_empty());
        assert!(r.normal_version.is_empty());
        assert_eq!(r.normal_image_points.count_ones(..), 0);

        let rot = fixtures::rot3();
        let x = rot.space();
        let r = set_image_report(rot.map(), &x.from_atoms([0, 1])).unwrap();
        assert!(r.is_measurable);
        assert_eq!(r.essential_image, x.from_atoms([1, 2]));
        assert_eq!(r.normal_version, x.from_atoms([0, 1]));

        let id = fixtures::identity_to_trivial();
        let r = set_image_report(&id, &id.domain().atom(0)).unwrap();
        assert!(!r.is_measurable);
        assert_eq!(r.measurable_hull, id.codomain().full());
        assert_eq!(r.essential_image, id.codomain().full());
    }

    #[test]
    fn ambitious_null_sets() {
        let e = fixtures::ex1a();
        assert_eq!(find_ambitious_null_set(e.map()), Some(e.space().atom(1)));
        let purged = purge_ambitious_null_sets(e.map()).unwrap();
        assert_eq!(purged.kept, e.space().atom(0));
        assert_eq!(purged.map.domain().num_points(), 1);
        assert_eq!(purged.map.domain().point_name(0), "0");
        assert_eq!(find_ambitious_null_set(&purged.map), None);

        assert_eq!(find_ambitious_null_set(fixtures::rot3().map()), None);
        assert_eq!(find_ambitious_null_set(fixtures::grid(2).map()), None);
    }

    #[test]
    fn axioms_accept_essential_image_and_reject_constant_full() {
        let s = fixtures::rot3();
        let t = s.map();
        let x = t.domain();
        let table: Vec<MSet> = (0..8).map(|m| essential_image(t, &x.from_mask(m)).unwrap()).collect();
        let r = verify_image_axioms(t, &table).unwrap();
        assert!(r.holds && r.agrees_with_essential_image);

        let full: Vec<MSet> = (0..8).map(|_| x.full()).collect();
        let r = verify_image_axioms(t, &full).unwrap();
        assert!(!r.holds);
        assert_eq!(r.violation, Some(AxiomViolation::Positivity { set: x.empty() }));

        assert_eq!(
            verify_image_axioms(t, &table[..7]).unwrap_err(),
            Error::TableIncomplete { expected: 8, found: 7 }
        );
    }

    #[test]
    fn axioms_reject_large_domains() {
        let s = fixtures::grid(6);
        let err = verify_image_axioms(s.map(), &[]).unwrap_err();
        assert!(matches!(err, Error::TooManyAtoms { .. }));
    }

    #[test]
    fn singular_atom_detects_missing_mass() {
        assert_eq!(singular_atom(fixtures::collapse().map()), Some(0));
        assert_eq!(singular_atom(fixtures::rot3().map()), None);
    }
}
