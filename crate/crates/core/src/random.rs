//! Seeded generators of random valid spaces, maps, systems and Markov
//! models for property tests.
//!
//! Maps are drawn at the level of atoms, so every generated point map is
//! measurable; null preservation is enforced by sending positive atoms only
//! to positive atoms.

use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::dynamics::DynSystem;
use crate::markov::MarkovModel;
use crate::measure::{rat, MeasurableMap, Rat, Space};

/// A random weight: zero with probability 1/4, else a small positive
/// fraction.
pub fn random_weight<R: Rng>(rng: &mut R) -> Rat {
    if rng.gen_ratio(1, 4) {
        rat(0, 1)
    } else {
        rat(rng.gen_range(1..=4), rng.gen_range(1..=3))
    }
}

/// A space with `atoms` atoms of one or two points each. At least one atom
/// is positive.
pub fn random_space<R: Rng>(rng: &mut R, name: &str, atoms: usize) -> Space {
    assert!(atoms > 0);
    let mut points = Vec::new();
    let mut blocks = Vec::new();
    let forced = rng.gen_range(0..atoms);
    for a in 0..atoms {
        let size = if rng.gen_ratio(1, 3) { 2 } else { 1 };
        let mut names = Vec::with_capacity(size);
        for k in 0..size {
            let p = format!("p{a}_{k}");
            let mut w = random_weight(rng);
            if a == forced && k == 0 && w == rat(0, 1) {
                w = rat(1, 1);
            }
            points.push((p.clone(), w));
            names.push(p);
        }
        blocks.push((format!("a{a}"), names));
    }
    Space::new(name, points, blocks).expect("generated space is valid")
}

/// Point map realizing the atom map `f`: each point of atom `a` goes to a
/// random point of atom `f[a]` of `codomain`.
fn realize<R: Rng>(rng: &mut R, domain: &Space, codomain: &Space, f: &[usize]) -> Vec<usize> {
    (0..domain.num_points())
        .map(|p| {
            let target = codomain.atom_points(f[domain.atom_of(p)]);
            *target.choose(rng).expect("atoms are nonempty")
        })
        .collect()
}

fn random_atom_map<R: Rng>(rng: &mut R, domain: &Space, codomain: &Space) -> Vec<usize> {
    let positive: Vec<usize> = (0..codomain.num_atoms())
        .filter(|&b| codomain.is_positive_atom(b))
        .collect();
    (0..domain.num_atoms())
        .map(|a| {
            if domain.is_positive_atom(a) {
                *positive.choose(rng).expect("a positive codomain atom")
            } else {
                rng.gen_range(0..codomain.num_atoms())
            }
        })
        .collect()
}

/// A random null-preserving map between two random spaces.
pub fn random_map<R: Rng>(rng: &mut R, dom_atoms: usize, cod_atoms: usize) -> MeasurableMap {
    let domain = Arc::new(random_space(rng, "X", dom_atoms));
    let codomain = Arc::new(random_space(rng, "Y", cod_atoms));
    random_map_between(rng, domain, codomain)
}

/// A random null-preserving map between the given spaces.
pub fn random_map_between<R: Rng>(
    rng: &mut R,
    domain: Arc<Space>,
    codomain: Arc<Space>,
) -> MeasurableMap {
    let f = random_atom_map(rng, &domain, &codomain);
    let image_of = realize(rng, &domain, &codomain, &f);
    MeasurableMap::new(domain, codomain, image_of).expect("generated map is valid")
}

/// A random null-preserving endomap on a space with `atoms` atoms.
pub fn random_system<R: Rng>(rng: &mut R, atoms: usize) -> DynSystem {
    let space = Arc::new(random_space(rng, "R", atoms));
    let f = random_atom_map(rng, &space, &space);
    let image_of = realize(rng, &space, &space, &f);
    DynSystem::new(MeasurableMap::endomap(space, image_of).expect("generated map is valid"))
        .expect("endomap")
}

/// A random nonsingular endomap: positive atoms are permuted, null atoms go
/// anywhere.
pub fn random_nonsingular_system<R: Rng>(rng: &mut R, atoms: usize) -> DynSystem {
    let space = Arc::new(random_space(rng, "R", atoms));
    let positive: Vec<usize> = (0..atoms).filter(|&a| space.is_positive_atom(a)).collect();
    let mut shuffled = positive.clone();
    shuffled.shuffle(rng);
    let mut f: Vec<usize> = (0..atoms).map(|_| rng.gen_range(0..atoms)).collect();
    for (&a, &b) in positive.iter().zip(&shuffled) {
        f[a] = b;
    }
    let image_of = realize(rng, &space, &space, &f);
    DynSystem::new(MeasurableMap::endomap(space, image_of).expect("generated map is valid"))
        .expect("endomap")
}

/// A copy of `map` with every point of weight zero sent to a random point
/// of the same target atom, or anywhere when its whole atom is null.
/// Agrees with `map` almost everywhere.
pub fn reroute_null_points<R: Rng>(rng: &mut R, map: &MeasurableMap) -> MeasurableMap {
    let dom = map.domain();
    let cod = map.codomain();
    let f: Vec<usize> = (0..dom.num_atoms())
        .map(|a| {
            if dom.is_positive_atom(a) {
                map.atom_image(a)
            } else {
                rng.gen_range(0..cod.num_atoms())
            }
        })
        .collect();
    let image_of = (0..dom.num_points())
        .map(|p| {
            let a = dom.atom_of(p);
            if dom.is_positive_atom(a) && rng.gen_ratio(1, 2) {
                map.point_image(p)
            } else {
                *cod.atom_points(f[a]).choose(rng).expect("nonempty")
            }
        })
        .collect();
    MeasurableMap::new(dom.clone(), cod.clone(), image_of).expect("rerouted map is valid")
}

/// A stationary irreducible model on `states` states. A positive cycle
/// through all states makes it irreducible; other entries are positive
/// with probability 1/2.
pub fn random_stationary_model<R: Rng>(rng: &mut R, states: usize) -> MarkovModel {
    assert!(states > 0);
    let trans: Vec<Vec<Rat>> = (0..states)
        .map(|i| {
            let raw: Vec<i64> = (0..states)
                .map(|j| {
                    if j == (i + 1) % states || rng.gen_bool(0.5) {
                        rng.gen_range(1..=4)
                    } else {
                        0
                    }
                })
                .collect();
            let total: i64 = raw.iter().sum();
            raw.iter().map(|&v| rat(v, total)).collect()
        })
        .collect();
    let init = MarkovModel::stationary_distribution(&trans).expect("irreducible");
    let names = (1..=states).map(|i| i.to_string()).collect();
    MarkovModel::new(names, init, trans).expect("generated model is valid")
}
