//! Identities for cylinder systems compiled from Markov models.

use num_traits::One;

use super::{ensure, lift, LawResult};
use crate::markov::{self, build_cylinder_system, MarkovModel};
use crate::measure::Rat;

/// Depths at which every model is compiled.
pub const MARKOV_DEPTHS: [usize; 2] = [2, 3];

/// Weights form a probability at each depth, the drop-last map preserves
/// them, the shift preserves them when the model is stationary, and cylinder
/// images have the predicted support.
pub fn check_markov_laws(model: &MarkovModel) -> LawResult {
    let good = model.is_stationary() && model.is_irreducible();
    for m in MARKOV_DEPTHS {
        let sys = lift(build_cylinder_system(model, m), "cylinder system")?;
        let dom = sys.map().domain();
        let cod = sys.map().codomain();
        ensure(dom.total().is_one() && cod.total().is_one(), "word weights sum to 1", || {
            format!("depth {m}")
        })?;
        let drop_last = lift(sys.drop_last(), "drop last")?;
        ensure(markov::preserves_measure(&drop_last), "word weights are consistent", || {
            format!("depth {m}")
        })?;
        if model.is_stationary() {
            ensure(sys.preserves_measure(), "the shift preserves a stationary measure", || {
                format!("depth {m}")
            })?;
        }
        for i in 0..model.num_states() {
            let image = lift(sys.cylinder_image(&sys.cylinder(&[i])), "cylinder image")?;
            let predicted = sys.predicted_image(i);
            ensure(cod.ae_subset(&image, &predicted), "T̂[i] ⊆̇ ⋃ [j] over P(i,j) > 0", || {
                format!("state {} depth {m}", model.states()[i])
            })?;
            if good {
                ensure(image == predicted, "T̂[i] ≐ ⋃ [j] over P(i,j) > 0", || {
                    format!("state {} depth {m}", model.states()[i])
                })?;
            }
        }
        if good {
            let report = lift(markov::verify_markov_formulas(model, m), "transfer formulas")?;
            ensure(report.states.iter().all(|s| s.support_ok), "formula report supports", || {
                format!("depth {m}")
            })?;
            for s in &report.states {
                let total: Rat = s.coefficients.iter().map(|c| &c.density * &model.init()[c.target]).sum();
                ensure(total == model.init()[s.state], "transfer density integrates to p_i", || {
                    format!("state {} depth {m}", model.states()[s.state])
                })?;
            }
        }
    }
    Ok(())
}
