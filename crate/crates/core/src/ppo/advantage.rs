/// Generalised advantage estimation over one episode.
///
/// `delta_t = r_t + gamma V_{t+1} - V_t` with `V_T = terminal_value`, and
/// `A_t = delta_t + gamma lambda A_{t+1}`. Returns `(advantages, returns)` with
/// `returns = advantages + values`.
pub fn compute_gae(
    rewards: &[f64],
    values: &[f64],
    terminal_value: f64,
    gamma: f64,
    lambda: f64,
) -> (Vec<f64>, Vec<f64>) {
    assert_eq!(rewards.len(), values.len(), "rewards and values must align");
    let n = rewards.len();
    let mut adv = vec![0.0; n];
    let mut next_adv = 0.0;
    let mut next_value = terminal_value;
    for t in (0..n).rev() {
        let delta = rewards[t] + gamma * next_value - values[t];
        next_adv = delta + gamma * lambda * next_adv;
        adv[t] = next_adv;
        next_value = values[t];
    }
    let returns = adv.iter().zip(values).map(|(a, v)| a + v).collect();
    (adv, returns)
}

/// `A_t = r_t - V(s_t)`, returns equal to the rewards.
pub fn reward_minus_value(rewards: &[f64], values: &[f64]) -> (Vec<f64>, Vec<f64>) {
    assert_eq!(rewards.len(), values.len(), "rewards and values must align");
    let adv = rewards.iter().zip(values).map(|(r, v)| r - v).collect();
    (adv, rewards.to_vec())
}
