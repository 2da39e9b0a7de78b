//! Finite-state Markov measures on cylinder algebras.
//!
//! A model over states `I` gives the words of length `m` the weights
//! `init(i₀)·P(i₀,i₁)⋯P(i_{m−2},i_{m−1})`. Dropping the first symbol maps
//! words of length `m` onto words of length `m − 1`; that two-space map is
//! the finite shadow of the one-sided shift on cylinders of depth `m`.

use std::sync::Arc;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::images::{self, Density};
use crate::measure::{MSet, MeasurableMap, Rat, Space};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MarkovModel {
    states: Vec<String>,
    init: Vec<Rat>,
    trans: Vec<Vec<Rat>>,
}

impl MarkovModel {
    /// Validates shapes, signs, `Σ init = 1`, and that every row reachable
    /// from the initial support sums to 1.
    pub fn new(states: Vec<String>, init: Vec<Rat>, trans: Vec<Vec<Rat>>) -> Result<Self> {
        let k = states.len();
        if k == 0 {
            return Err(Error::InvalidModel("no states".into()));
        }
        for (i, s) in states.iter().enumerate() {
            if states[..i].contains(s) {
                return Err(Error::InvalidModel(format!("duplicate state `{s}`")));
            }
        }
        if init.len() != k {
            return Err(Error::InvalidModel(format!(
                "initial law has {} entries for {k} states",
                init.len()
            )));
        }
        if trans.len() != k || trans.iter().any(|r| r.len() != k) {
            return Err(Error::InvalidModel(format!("transition matrix is not {k}×{k}")));
        }
        if init.iter().chain(trans.iter().flatten()).any(Signed::is_negative) {
            return Err(Error::InvalidModel("negative probability".into()));
        }
        if !init.iter().sum::<Rat>().is_one() {
            return Err(Error::InvalidModel("initial law does not sum to 1".into()));
        }
        let model = MarkovModel { states, init, trans };
        for i in model.reachable() {
            if !model.trans[i].iter().sum::<Rat>().is_one() {
                return Err(Error::InvalidModel(format!(
                    "row `{}` does not sum to 1",
                    model.states[i]
                )));
            }
        }
        Ok(model)
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn init(&self) -> &[Rat] {
        &self.init
    }

    pub fn trans(&self) -> &[Vec<Rat>] {
        &self.trans
    }

    pub fn p(&self, i: usize, j: usize) -> &Rat {
        &self.trans[i][j]
    }

    /// States reachable with positive probability from the initial law, in
    /// index order.
    pub fn reachable(&self) -> Vec<usize> {
        let k = self.num_states();
        let mut seen = vec![false; k];
        let mut stack: Vec<usize> = (0..k).filter(|&i| self.init[i].is_positive()).collect();
        for &i in &stack {
            seen[i] = true;
        }
        while let Some(i) = stack.pop() {
            for j in 0..k {
                if !seen[j] && self.trans[i][j].is_positive() {
                    seen[j] = true;
                    stack.push(j);
                }
            }
        }
        (0..k).filter(|&i| seen[i]).collect()
    }

    /// `init · P = init`.
    pub fn is_stationary(&self) -> bool {
        let k = self.num_states();
        (0..k).all(|j| {
            let v: Rat = (0..k).map(|i| &self.init[i] * &self.trans[i][j]).sum();
            v == self.init[j]
        })
    }

    /// Whether the graph of positive transitions is strongly connected.
    pub fn is_irreducible(&self) -> bool {
        let k = self.num_states();
        let reach = |from: usize, forward: bool| {
            let mut seen = vec![false; k];
            seen[from] = true;
            let mut stack = vec![from];
            while let Some(i) = stack.pop() {
                for j in 0..k {
                    let edge = if forward { &self.trans[i][j] } else { &self.trans[j][i] };
                    if !seen[j] && edge.is_positive() {
                        seen[j] = true;
                        stack.push(j);
                    }
                }
            }
            seen.into_iter().all(|b| b)
        };
        reach(0, true) && reach(0, false)
    }

    /// The stationary law of an irreducible stochastic matrix, by exact
    /// Gaussian elimination on `π(P − I) = 0`, `Σπ = 1`.
    pub fn stationary_distribution(trans: &[Vec<Rat>]) -> Option<Vec<Rat>> {
        let k = trans.len();
        // rows: equations; columns: unknowns π_0..π_{k-1} and the right-hand side
        let mut m: Vec<Vec<Rat>> = (0..k)
            .map(|j| {
                let mut row: Vec<Rat> = (0..k)
                    .map(|i| {
                        let delta = if i == j { Rat::one() } else { Rat::zero() };
                        &trans[i][j] - delta
                    })
                    .collect();
                row.push(Rat::zero());
                row
            })
            .collect();
        // one balance equation is redundant; replace the last by normalization
        m[k - 1] = vec![Rat::one(); k + 1];
        for col in 0..k {
            let pivot = (col..k).find(|&r| !m[r][col].is_zero())?;
            m.swap(col, pivot);
            let inv = m[col][col].recip();
            for c in col..=k {
                m[col][c] = &m[col][c] * &inv;
            }
            for r in 0..k {
                if r != col && !m[r][col].is_zero() {
                    let factor = m[r][col].clone();
                    for c in col..=k {
                        let d = &factor * &m[col][c];
                        m[r][c] -= d;
                    }
                }
            }
        }
        Some(m.into_iter().map(|row| row[k].clone()).collect())
    }

    /// Weight of a word under the model.
    pub fn word_weight(&self, word: &[usize]) -> Rat {
        let Some((&first, _)) = word.split_first() else {
            return Rat::one();
        };
        word.windows(2)
            .fold(self.init[first].clone(), |w, p| w * &self.trans[p[0]][p[1]])
    }

    /// Label of a word, e.g. `[1,2]`.
    pub fn word_name(&self, word: &[usize]) -> String {
        let parts: Vec<&str> = word.iter().map(|&i| self.states[i].as_str()).collect();
        format!("[{}]", parts.join(","))
    }

    pub fn state_index(&self, name: &str) -> Option<usize> {
        self.states.iter().position(|s| s == name)
    }
}

/// All words of length `m` in lexicographic order of state indices.
fn words(k: usize, m: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for _ in 0..m {
        out = out
            .into_iter()
            .flat_map(|w| {
                (0..k).map(move |i| {
                    let mut v = w.clone();
                    v.push(i);
                    v
                })
            })
            .collect();
    }
    out
}

fn word_space(model: &MarkovModel, name: String, words: &[Vec<usize>]) -> Result<Space> {
    let points = words
        .iter()
        .map(|w| (model.word_name(w), model.word_weight(w)))
        .collect();
    Space::discrete(name, points)
}

/// The drop-first-symbol map from depth-`m` to depth-`(m−1)` cylinders.
#[derive(Debug, Clone)]
pub struct CylinderSystem {
    model: MarkovModel,
    depth: usize,
    domain_words: Vec<Vec<usize>>,
    codomain_words: Vec<Vec<usize>>,
    map: MeasurableMap,
}

/// Compiles `model` at depth `m ≥ 2`. Fails with the offending word if the
/// shift is not null-preserving at this depth.
pub fn build_cylinder_system(model: &MarkovModel, m: usize) -> Result<CylinderSystem> {
    if m < 2 {
        return Err(Error::DepthTooSmall);
    }
    let k = model.num_states();
    let domain_words = words(k, m);
    let codomain_words = words(k, m - 1);
    let domain = Arc::new(word_space(model, format!("depth {m}"), &domain_words)?);
    let codomain = Arc::new(word_space(model, format!("depth {}", m - 1), &codomain_words)?);
    // the tail of word w, read as a base-k number, is its index at depth m-1
    let image_of = (0..domain_words.len()).map(|w| w % codomain_words.len()).collect();
    let map = MeasurableMap::new(domain, codomain, image_of)?;
    Ok(CylinderSystem {
        model: model.clone(),
        depth: m,
        domain_words,
        codomain_words,
        map,
    })
}

impl CylinderSystem {
    pub fn model(&self) -> &MarkovModel {
        &self.model
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn map(&self) -> &MeasurableMap {
        &self.map
    }

    pub fn domain_words(&self) -> &[Vec<usize>] {
        &self.domain_words
    }

    pub fn codomain_words(&self) -> &[Vec<usize>] {
        &self.codomain_words
    }

    /// The depth-`m` cylinder of words starting with `prefix`.
    pub fn cylinder(&self, prefix: &[usize]) -> MSet {
        let dom = self.map.domain();
        dom.from_atoms((0..self.domain_words.len()).filter(|&w| self.domain_words[w].starts_with(prefix)))
    }

    /// The depth-`(m−1)` cylinder of words starting with `prefix`.
    pub fn codomain_cylinder(&self, prefix: &[usize]) -> MSet {
        let cod = self.map.codomain();
        cod.from_atoms(
            (0..self.codomain_words.len()).filter(|&w| self.codomain_words[w].starts_with(prefix)),
        )
    }

    /// `T̂A` for a union `A` of depth-`m` words.
    pub fn cylinder_image(&self, a: &MSet) -> Result<MSet> {
        images::essential_image(&self.map, a)
    }

    /// `⋃_{j : P(i,j) > 0} [j]` at depth `m − 1`, without null words.
    pub fn predicted_image(&self, i: usize) -> MSet {
        let cod = self.map.codomain();
        let targets: Vec<usize> = (0..self.model.num_states())
            .filter(|&j| self.model.p(i, j).is_positive())
            .collect();
        let u = targets
            .iter()
            .fold(cod.empty(), |u, &j| u.union(&self.codomain_cylinder(&[j])));
        cod.canonical(&u)
    }

    /// Whether the pushforward of the depth-`m` weights is the depth-`(m−1)`
    /// weights.
    pub fn preserves_measure(&self) -> bool {
        preserves_measure(&self.map)
    }

    /// The drop-last-symbol map between the same two spaces, which always
    /// preserves the measure.
    pub fn drop_last(&self) -> Result<MeasurableMap> {
        let n = self.codomain_words.len();
        let k = self.model.num_states();
        let image_of = (0..self.domain_words.len()).map(|w| w / k % n).collect();
        MeasurableMap::new(self.map.domain().clone(), self.map.codomain().clone(), image_of)
    }

    /// A state `i` whose cylinder is a nontrivial invariant split:
    /// `[i]ₘ ≐ T⁻¹[i]ₘ₋₁` with both `[i]ₘ` and its complement positive.
    pub fn invariant_cylinder(&self) -> Option<usize> {
        let dom = self.map.domain();
        (0..self.model.num_states()).find(|&i| {
            let c = self.cylinder(&[i]);
            let pre = self.map.preimage(&self.codomain_cylinder(&[i])).expect("same space");
            dom.ae_eq(&c, &pre) && !dom.is_null(&c) && !dom.is_null(&dom.complement(&c))
        })
    }
}

/// Whether `λ ∘ T⁻¹ = λ′` exactly.
pub fn preserves_measure(map: &MeasurableMap) -> bool {
    let pushed = images::pushforward(map, &map.domain().full()).expect("same space");
    let cod = map.codomain();
    (0..cod.num_atoms()).all(|b| &pushed[b] == cod.atom_weight(b))
}

/// One transition coefficient of the transfer density of `1_{[i]}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Coefficient {
    pub target: usize,
    /// Value of the exact transfer density on `[target]`.
    pub density: Rat,
    /// `P(i,j) / p_j`.
    pub naive: Rat,
    /// `p_i · P(i,j) / p_j`.
    pub corrected: Rat,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StateFormulas {
    pub state: usize,
    pub image: MSet,
    pub predicted: MSet,
    pub support_ok: bool,
    pub coefficients: Vec<Coefficient>,
    /// `density / naive` is the same on every `[j]`.
    pub proportional: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FormulaReport {
    pub states: Vec<StateFormulas>,
    pub holds: bool,
}

/// Compares the image of each cylinder `[i]` with the predicted support and
/// the transfer density of `1_{[i]}` with the closed-form coefficients.
pub fn verify_markov_formulas(model: &MarkovModel, m: usize) -> Result<FormulaReport> {
    if !model.is_stationary() {
        return Err(Error::NotStationary);
    }
    if !model.is_irreducible() {
        return Err(Error::NotIrreducible);
    }
    let sys = build_cylinder_system(model, m)?;
    let cod = sys.map.codomain();
    let k = model.num_states();
    let p = model.init();
    let mut states = Vec::with_capacity(k);
    for i in 0..k {
        let cyl = sys.cylinder(&[i]);
        let image = sys.cylinder_image(&cyl)?;
        let predicted = sys.predicted_image(i);
        let density = images::transfer_density(&sys.map, &Density::indicator(sys.map.domain(), &cyl)?)?;
        let mut coefficients = Vec::with_capacity(k);
        for j in 0..k {
            let cj = sys.codomain_cylinder(&[j]);
            let values: Vec<&Rat> = cj
                .atoms()
                .filter(|&w| cod.is_positive_atom(w))
                .map(|w| density.value(w))
                .collect();
            let Some(&first) = values.first() else { continue };
            if values.iter().any(|v| *v != first) {
                return Err(Error::CrossCheck(format!(
                    "transfer density of [{}] is not constant on [{}]",
                    model.states[i], model.states[j]
                )));
            }
            let naive = model.p(i, j) / &p[j];
            let corrected = &p[i] * &naive;
            if first != &corrected {
                return Err(Error::CrossCheck("transfer density differs from p_i·p_ij/p_j".into()));
            }
            coefficients.push(Coefficient {
                target: j,
                density: first.clone(),
                naive,
                corrected,
            });
        }
        // one common ratio density / naive across all targets
        let ratios: Vec<Rat> = coefficients
            .iter()
            .filter(|c| c.naive.is_positive())
            .map(|c| &c.density / &c.naive)
            .collect();
        let proportional = ratios.windows(2).all(|w| w[0] == w[1])
            && coefficients
                .iter()
                .all(|c| c.naive.is_positive() || c.density.is_zero());
        states.push(StateFormulas {
            state: i,
            support_ok: image == predicted,
            image,
            predicted,
            coefficients,
            proportional,
        });
    }
    let holds = states.iter().all(|s| s.support_ok && s.proportional);
    Ok(FormulaReport { states, holds })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::measure::rat;

    #[test]
    fn markov2_weights() {
        let m = fixtures::markov2();
        assert!(m.is_stationary() && m.is_irreducible());
        let sys = build_cylinder_system(&m, 2).unwrap();
        let dom = sys.map().domain();
        let w: Vec<Rat> = (0..4).map(|a| dom.atom_weight(a).clone()).collect();
        assert_eq!(w, [rat(1, 3), rat(1, 3), rat(1, 3), rat(0, 1)]);
        assert_eq!(dom.atom_name(1), "[1,2]");
        let cod = sys.map().codomain();
        assert_eq!(cod.atom_weight(0), &rat(2, 3));
        assert!(sys.preserves_measure());
        assert!(preserves_measure(&sys.drop_last().unwrap()));
    }

    #[test]
    fn markov2_images_and_density() {
        let m = fixtures::markov2();
        let sys = build_cylinder_system(&m, 2).unwrap();
        let cod = sys.map().codomain();
        let one = sys.cylinder_image(&sys.cylinder(&[0])).unwrap();
        assert_eq!(cod.display_set(&one), "[1] [2]");
        let two = sys.cylinder_image(&sys.cylinder(&[1])).unwrap();
        assert_eq!(cod.display_set(&two), "[1]");
        assert!(sys.cylinder_image(&sys.map().domain().empty()).unwrap().is_empty());

        let u = Density::indicator(sys.map().domain(), &sys.cylinder(&[0])).unwrap();
        let v = images::transfer_density(sys.map(), &u).unwrap();
        assert_eq!(v.values(), &[rat(1, 2), rat(1, 1)]);
        assert_eq!(
            images::essential_image_via_transfer(sys.map(), &sys.cylinder(&[0])).unwrap(),
            cod.full()
        );
    }

    #[test]
    fn formula_report() {
        let r = verify_markov_formulas(&fixtures::markov2(), 2).unwrap();
        assert!(r.holds);
        let c = &r.states[0].coefficients;
        assert_eq!((c[0].density.clone(), c[1].density.clone()), (rat(1, 2), rat(1, 1)));
        // the naive coefficient for [1] is p_11/p_1 = 3/4
        assert_eq!(c[0].naive, rat(3, 4));
        assert!(verify_markov_formulas(&fixtures::markov2(), 3).unwrap().holds);
    }

    #[test]
    fn csmc_examples() {
        let a = fixtures::csmc_a();
        assert_eq!(verify_markov_formulas(&a, 2).unwrap_err(), Error::NotIrreducible);
        let sys = build_cylinder_system(&a, 2).unwrap();
        assert_eq!(sys.invariant_cylinder(), Some(0));

        let b = fixtures::csmc_b();
        let sys = build_cylinder_system(&b, 2).unwrap();
        let w = images::singular_atom(sys.map()).unwrap();
        let cod = sys.map().codomain();
        assert_eq!(cod.atom_name(w), "[2]");
        assert_eq!(cod.atom_weight(w), &rat(1, 3));
        assert_eq!(verify_markov_formulas(&b, 2).unwrap_err(), Error::NotStationary);
    }

    #[test]
    fn depth_and_model_errors() {
        assert_eq!(build_cylinder_system(&fixtures::markov2(), 1).unwrap_err(), Error::DepthTooSmall);
        let bad = MarkovModel::new(
            vec!["a".into()],
            vec![rat(1, 2)],
            vec![vec![rat(1, 1)]],
        );
        assert!(matches!(bad, Err(Error::InvalidModel(_))));
        let shift = MarkovModel::new(
            vec!["0".into(), "1".into()],
            vec![rat(1, 1), rat(0, 1)],
            vec![vec![rat(0, 1), rat(1, 1)], vec![rat(0, 1), rat(1, 1)]],
        )
        .unwrap();
        // words [0,1] positive maps onto [1], which is null at depth 1
        assert_eq!(
            build_cylinder_system(&shift, 2).unwrap_err(),
            Error::NotNullPreserving("[1]".into())
        );
    }

    #[test]
    fn stationary_distribution_solves_balance() {
        let m = fixtures::markov2();
        let pi = MarkovModel::stationary_distribution(m.trans()).unwrap();
        assert_eq!(pi, [rat(2, 3), rat(1, 3)]);
    }
}
