use essimg::laws::{self, SET_EXHAUSTIVE_ATOMS};
use essimg::{fixtures, markov, random};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn small_fixtures() -> Vec<essimg::DynSystem> {
    fixtures::systems()
        .into_iter()
        .filter(|s| s.space().num_atoms() <= SET_EXHAUSTIVE_ATOMS)
        .collect()
}

#[test]
fn fixtures_satisfy_every_law() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for s in small_fixtures() {
        let name = s.name().to_string();
        laws::check_map_laws(s.map(), &mut rng).unwrap_or_else(|v| panic!("{name}: {v}"));
        laws::check_system_laws(&s).unwrap_or_else(|v| panic!("{name}: {v}"));
        laws::check_tail_laws(&s, &mut rng).unwrap_or_else(|v| panic!("{name}: {v}"));
    }
    laws::check_map_laws(&fixtures::identity_to_trivial(), &mut rng).unwrap();
}

#[test]
fn random_systems_satisfy_every_law() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for k in 0..60 {
        let atoms = 1 + k % 10;
        let s = if k % 2 == 0 {
            random::random_system(&mut rng, atoms)
        } else {
            random::random_nonsingular_system(&mut rng, atoms)
        };
        let ctx = format!("system {k} ({atoms} atoms)");
        laws::check_map_laws(s.map(), &mut rng).unwrap_or_else(|v| panic!("{ctx}: {v}"));
        laws::check_system_laws(&s).unwrap_or_else(|v| panic!("{ctx}: {v}"));
        laws::check_tail_laws(&s, &mut rng).unwrap_or_else(|v| panic!("{ctx}: {v}"));
    }
}

#[test]
fn random_maps_between_spaces_satisfy_map_laws() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for k in 0..40 {
        let (d, c) = (1 + k % 6, 1 + (k / 6) % 5);
        let t = random::random_map(&mut rng, d, c);
        laws::check_map_laws(&t, &mut rng).unwrap_or_else(|v| panic!("map {k}: {v}"));
        let z = std::sync::Arc::new(random::random_space(&mut rng, "Z", 1 + k % 4));
        let next = random::random_map_between(&mut rng, t.codomain().clone(), z);
        laws::check_composition(&t, &next).unwrap_or_else(|v| panic!("map {k}: {v}"));
    }
}

#[test]
fn markov_models_satisfy_cylinder_laws() {
    for m in [fixtures::markov2(), fixtures::csmc_a(), fixtures::csmc_b()] {
        laws::check_markov_laws(&m).unwrap();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for k in 0..20 {
        let m = random::random_stationary_model(&mut rng, 1 + k % 5);
        laws::check_markov_laws(&m).unwrap_or_else(|v| panic!("model {k}: {v}"));
    }
}

#[test]
fn cylinder_systems_satisfy_map_laws() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for m in [fixtures::markov2(), fixtures::csmc_a(), fixtures::csmc_b()] {
        let sys = markov::build_cylinder_system(&m, 2).unwrap();
        laws::check_map_laws(sys.map(), &mut rng).unwrap();
    }
}
