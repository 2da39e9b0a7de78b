use essimg::laws;
use essimg::{fixtures, random};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn fixtures_agree_with_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for s in fixtures::systems() {
        laws::check_oracle_agreement(&s, &mut rng).unwrap_or_else(|v| panic!("{}: {v}", s.name()));
    }
}

#[test]
fn random_systems_agree_with_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for k in 0..40 {
        let atoms = rng.gen_range(1..=12);
        let s = if k % 2 == 0 {
            random::random_system(&mut rng, atoms)
        } else {
            random::random_nonsingular_system(&mut rng, atoms)
        };
        laws::check_oracle_agreement(&s, &mut rng)
            .unwrap_or_else(|v| panic!("system {k} ({atoms} atoms): {v}"));
    }
}

#[test]
fn oracle_refuses_large_spaces() {
    let s = fixtures::grid(6);
    let err = essimg::oracle::tail_sets(s.map()).unwrap_err();
    assert!(matches!(err, essimg::Error::TooLarge { .. }));
}
