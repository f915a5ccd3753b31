//! Generalized advantage estimation over one trajectory segment.

use super::PpoError;

/// `A_t = Σ_{i≥t} (γλ)^{i−t} δ_i` with `δ_i = r_i + γ V(s_{i+1}) − V(s_i)`.
/// `bootstrap` is `V(s_T)` for a truncated segment and 0 at a terminal state.
pub fn gae(
    rewards: &[f64],
    values: &[f64],
    bootstrap: f64,
    gamma: f64,
    lambda: f64,
) -> Result<Vec<f64>, PpoError> {
    if rewards.len() != values.len() {
        return Err(PpoError::Dimension(format!(
            "{} rewards but {} values",
            rewards.len(),
            values.len()
        )));
    }
    let mut advantages = vec![0.0; rewards.len()];
    let mut next_value = bootstrap;
    let mut acc = 0.0;
    for t in (0..rewards.len()).rev() {
        let delta = rewards[t] + gamma * next_value - values[t];
        acc = delta + gamma * lambda * acc;
        advantages[t] = acc;
        next_value = values[t];
    }
    Ok(advantages)
}
