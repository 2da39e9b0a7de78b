//! Small named systems used throughout the tests and shipped by the CLI.

use std::sync::Arc;

use crate::dynamics::DynSystem;
use crate::markov::MarkovModel;
use crate::measure::{rat, MeasurableMap, Rat, Space};

fn discrete_system(name: &str, weights: &[Rat], names: &[&str], image: &[usize]) -> DynSystem {
    let points = names
        .iter()
        .zip(weights)
        .map(|(n, w)| (n.to_string(), w.clone()))
        .collect();
    let space = Arc::new(Space::discrete(name, points).expect("fixture space"));
    DynSystem::new(MeasurableMap::endomap(space, image.to_vec()).expect("fixture map"))
        .expect("fixture system")
}

/// Two points, all mass on `0`, everything mapped to `0`.
pub fn ex1a() -> DynSystem {
    discrete_system("EX1A", &[rat(1, 1), rat(0, 1)], &["0", "1"], &[0, 0])
}

/// Counting measure on `{0, 1}`, everything mapped to `0`.
pub fn count2() -> DynSystem {
    discrete_system("COUNT2", &[rat(1, 1), rat(1, 1)], &["0", "1"], &[0, 0])
}

/// Rotation `x ↦ x+1 mod 3` with unit weights.
pub fn rot3() -> DynSystem {
    let w = vec![rat(1, 1); 3];
    discrete_system("ROT3", &w, &["0", "1", "2"], &[1, 2, 0])
}

/// Points `1, 2, 3` with weights `1/4, 1/4, 1/2`, all mapped to `3`.
pub fn collapse() -> DynSystem {
    discrete_system(
        "COLLAPSE",
        &[rat(1, 4), rat(1, 4), rat(1, 2)],
        &["1", "2", "3"],
        &[2, 2, 2],
    )
}

/// Names of the points of [`grid`] in their canonical order: `(m,n)` for
/// `n = 1..=N`, `m = 1..=n`, then `(1,0)` and `(0,0)`.
pub fn grid_points(n: usize) -> Vec<(usize, usize)> {
    let mut pts = Vec::new();
    for col in 1..=n {
        for m in 1..=col {
            pts.push((m, col));
        }
    }
    pts.push((1, 0));
    pts.push((0, 0));
    pts
}

pub fn grid_point_name((m, n): (usize, usize)) -> String {
    format!("({m},{n})")
}

/// Image of a grid point: `(m,n) ↦ (m−1,n)` for `m > 1`, `(1,n) ↦ (1,0)`,
/// `(1,0), (0,0) ↦ (0,0)`.
pub fn grid_step((m, n): (usize, usize)) -> (usize, usize) {
    match (m, n) {
        (1, 0) | (0, 0) => (0, 0),
        (1, _) => (1, 0),
        _ => (m - 1, n),
    }
}

/// The truncation `1 ≤ m ≤ n ≤ N` of the grid system, with counting
/// measure.
pub fn grid(n: usize) -> DynSystem {
    let pts = grid_points(n);
    let names: Vec<String> = pts.iter().map(|&p| grid_point_name(p)).collect();
    let refs: Vec<&str> = names.iter().map(String::as_str).collect();
    let image: Vec<usize> = pts
        .iter()
        .map(|&p| {
            let q = grid_step(p);
            pts.iter().position(|&r| r == q).expect("grid is closed")
        })
        .collect();
    let w = vec![rat(1, 1); pts.len()];
    discrete_system(&format!("GRID{n}"), &w, &refs, &image)
}

/// The identity on two points of weight `1/2`, from the power set onto the
/// trivial σ-algebra.
pub fn identity_to_trivial() -> MeasurableMap {
    let points = vec![("0".to_string(), rat(1, 2)), ("1".to_string(), rat(1, 2))];
    let fine = Arc::new(Space::discrete("ID", points.clone()).expect("fixture"));
    let coarse = Arc::new(
        Space::new("ID′", points, vec![("X′".into(), vec!["0".into(), "1".into()])])
            .expect("fixture"),
    );
    MeasurableMap::new(fine, coarse, vec![0, 1]).expect("fixture")
}

fn model(states: &[&str], init: Vec<Rat>, trans: Vec<Vec<Rat>>) -> MarkovModel {
    MarkovModel::new(states.iter().map(|s| s.to_string()).collect(), init, trans)
        .expect("fixture model")
}

/// States `1, 2`, `P = [[1/2, 1/2], [1, 0]]`, stationary law `(2/3, 1/3)`.
pub fn markov2() -> MarkovModel {
    model(
        &["1", "2"],
        vec![rat(2, 3), rat(1, 3)],
        vec![vec![rat(1, 2), rat(1, 2)], vec![rat(1, 1), rat(0, 1)]],
    )
}

/// Two states that never communicate, started uniformly.
pub fn csmc_a() -> MarkovModel {
    model(
        &["0", "1"],
        vec![rat(1, 2), rat(1, 2)],
        vec![vec![rat(1, 1), rat(0, 1)], vec![rat(0, 1), rat(1, 1)]],
    )
}

/// Uniform start; `0` and `1` are absorbing and `2` splits evenly between
/// them, so no mass ever arrives at `2`.
pub fn csmc_b() -> MarkovModel {
    let third = rat(1, 3);
    model(
        &["0", "1", "2"],
        vec![third.clone(), third.clone(), third],
        vec![
            vec![rat(1, 1), rat(0, 1), rat(0, 1)],
            vec![rat(0, 1), rat(1, 1), rat(0, 1)],
            vec![rat(1, 2), rat(1, 2), rat(0, 1)],
        ],
    )
}

/// All endomap fixtures by name.
pub fn systems() -> Vec<DynSystem> {
    vec![ex1a(), count2(), rot3(), collapse(), grid(2), grid(3), grid(4)]
}
