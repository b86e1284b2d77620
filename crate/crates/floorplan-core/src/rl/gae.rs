//! Generalized advantage estimation with the post-SA global reward as the
//! terminal value bootstrap.

use crate::error::{Error, Result};

/// delta_t = r_t + gamma * V_{t+1} - V_t with V_T := terminal_value;
/// A_t = sum_k (gamma * lambda)^k delta_{t+k}; returns_t = A_t + V_t.
pub fn compute_gae(
    rewards: &[f64],
    values: &[f64],
    terminal_value: f64,
    gamma: f64,
    lambda: f64,
) -> Result<(Vec<f64>, Vec<f64>)> {
    if rewards.is_empty() {
        return Err(Error::InvalidArgument("empty trajectory".into()));
    }
    if rewards.len() != values.len() {
        return Err(Error::InvalidArgument(format!(
            "{} rewards vs {} values",
            rewards.len(),
            values.len()
        )));
    }
    let n = rewards.len();
    let mut advantages = vec![0.0; n];
    let mut acc = 0.0;
    for t in (0..n).rev() {
        let next_value = if t + 1 < n { values[t + 1] } else { terminal_value };
        let delta = rewards[t] + gamma * next_value - values[t];
        acc = delta + gamma * lambda * acc;
        advantages[t] = acc;
    }
    let returns = advantages.iter().zip(values).map(|(a, v)| a + v).collect();
    Ok((advantages, returns))
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Independent double-loop oracle: A_t = sum_k (gamma lambda)^k delta_{t+k}.
    fn gae_oracle(
        rewards: &[f64],
        values: &[f64],
        terminal: f64,
        gamma: f64,
        lambda: f64,
    ) -> Vec<f64> {
        let n = rewards.len();
        let delta: Vec<f64> = (0..n)
            .map(|t| {
                let next = if t + 1 < n { values[t + 1] } else { terminal };
                rewards[t] + gamma * next - values[t]
            })
            .collect();
        (0..n)
            .map(|t| {
                (t..n)
                    .map(|u| (gamma * lambda).powi((u - t) as i32) * delta[u])
                    .sum()
            })
            .collect()
    }

    const REWARDS: [f64; 5] = [0.5, -1.25, 2.0, 0.0, 0.75];
    const VALUES: [f64; 5] = [0.1, 0.4, -0.3, 1.2, 0.6];

    #[test]
    fn matches_double_loop_oracle() {
        let (adv, ret) = compute_gae(&REWARDS, &VALUES, 3.5, 0.97, 0.9).unwrap();
        let oracle = gae_oracle(&REWARDS, &VALUES, 3.5, 0.97, 0.9);
        for (a, o) in adv.iter().zip(&oracle) {
            assert!((a - o).abs() < 1e-12);
        }
        for (r, (a, v)) in ret.iter().zip(adv.iter().zip(&VALUES)) {
            assert_eq!(*r, a + v);
        }
    }

    #[test]
    fn lambda_one_gamma_one_telescopes() {
        // A_t = sum_{i >= t} r_i + terminal - V_t
        let terminal = -0.8;
        let (adv, _) = compute_gae(&REWARDS, &VALUES, terminal, 1.0, 1.0).unwrap();
        for t in 0..REWARDS.len() {
            let want: f64 = REWARDS[t..].iter().sum::<f64>() + terminal - VALUES[t];
            assert!((adv[t] - want).abs() < 1e-9, "t = {t}: {} vs {want}", adv[t]);
        }
    }

    #[test]
    fn lambda_zero_is_one_step_td() {
        let (adv, _) = compute_gae(&REWARDS, &VALUES, 3.5, 0.99, 0.0).unwrap();
        for t in 0..REWARDS.len() {
            let next = if t + 1 < REWARDS.len() { VALUES[t + 1] } else { 3.5 };
            let delta = REWARDS[t] + 0.99 * next - VALUES[t];
            assert!((adv[t] - delta).abs() < 1e-12);
        }
    }

    #[test]
    fn terminal_value_reconstruction_identity() {
        // at lambda = 1: returns_t = sum_{i=t}^{r-1} gamma^{i-t} r_i +
        // gamma^{r-t} * V_r, to 1e-9 relative
        let gamma = 0.99;
        let terminal = 2.25;
        let (_, returns) = compute_gae(&REWARDS, &VALUES, terminal, gamma, 1.0).unwrap();
        let n = REWARDS.len();
        for t in 0..n {
            let direct: f64 = (t..n).map(|i| gamma.powi((i - t) as i32) * REWARDS[i]).sum::<f64>()
                + gamma.powi((n - t) as i32) * terminal;
            let rel = (returns[t] - direct).abs() / direct.abs().max(1e-12);
            assert!(rel < 1e-9, "t = {t}: {} vs {direct}", returns[t]);
        }
    }

    #[test]
    fn empty_trajectory_errors() {
        assert!(compute_gae(&[], &[], 0.0, 0.99, 0.95).is_err());
    }
}
