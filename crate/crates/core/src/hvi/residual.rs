use crate::error::{check_len, Result};
use crate::evolve::Trajectory;
use crate::linalg::dot;
use crate::lpspace::{theta_nodes, SpectralState};
use crate::scalar::Real;
use crate::spectral::SpectralModel;

use super::fixed_point::ForcingField;
use super::potential::Potential;

/// Worst signed violation of `⟨H g(t), v*⟩ ≤ ∫_0^π F⁰(t, θ, q(t)(θ); (H* v*)(θ)) dθ`
/// over every node and every test direction `v*`.
///
/// Both sides use the θ-grid quadrature, so a forcing that selects from
/// `∂F(t, θ, q(t)(θ))` at every sample gives a violation at roundoff level.
pub fn hvi_residual<T: Real>(
    model: &SpectralModel<T>,
    q: &Trajectory<T>,
    g: &ForcingField<T>,
    pot: &Potential<T>,
    test_directions: &[SpectralState<T>],
) -> Result<T> {
    let basis = model.basis();
    let n = model.n_modes();
    check_len(q.states().len(), g.nodes())?;
    let theta = theta_nodes::<T>(basis.n_theta());
    let h = basis.step();
    let hg = g
        .coefficients(basis)?
        .iter()
        .map(|c| model.apply_h(c))
        .collect::<Result<Vec<_>>>()?;
    let mut dirs = Vec::with_capacity(test_directions.len());
    for v in test_directions {
        check_len(n, v.len())?;
        dirs.push(basis.expand(model.apply_h_star(v)?.coeffs())?);
    }
    let mut worst = T::neg_infinity();
    for (k, state) in q.states().iter().enumerate() {
        let t = q.grid().node(k);
        let r = basis.expand(state.coeffs())?;
        for (v, w) in test_directions.iter().zip(&dirs) {
            let lhs = dot(hg[k].coeffs(), v.coeffs());
            let rhs = r
                .iter()
                .zip(w)
                .enumerate()
                .map(|(j, (&rj, &wj))| pot.subdifferential(t, theta[j], rj).support(wj))
                .fold(T::zero(), |a, b| a + b)
                * h;
            worst = worst.max(lhs - rhs);
        }
    }
    Ok(if test_directions.is_empty() { T::zero() } else { worst })
}
