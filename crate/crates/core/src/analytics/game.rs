use std::collections::BTreeMap;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::AnalyticsError;
use crate::seed;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    /// Hider: k distinct nodes uniformly at random. Seeker: a uniformly
    /// random query order.
    Uniform,
    /// Hider: nodes 0..k. Seeker: nodes in index order.
    Sequential,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GameStats {
    pub nodes: usize,
    pub hidden: usize,
    pub trials: u64,
    pub budget: u64,
    pub mean: f64,
    /// Standard error of the mean.
    pub std_error: f64,
    /// Game length L → number of trials.
    pub histogram: BTreeMap<u64, u64>,
    /// Trials in which the budget ran out before everything was found.
    pub exhausted: u64,
}

fn play(n: usize, k: usize, hider: Strategy, seeker: Strategy, budget: u64, rng: &mut impl Rng) -> (u64, bool) {
    if k == 0 {
        // nothing can ever be found, so the seeker spends the whole budget
        return (budget, true);
    }
    let mut hidden = vec![false; n];
    match hider {
        Strategy::Uniform => {
            for i in rand::seq::index::sample(rng, n, k) {
                hidden[i] = true;
            }
        }
        Strategy::Sequential => hidden[..k].iter_mut().for_each(|h| *h = true),
    }
    let mut order: Vec<usize> = (0..n).collect();
    let mut left = k;
    for step in 0..n.min(budget as usize) {
        if seeker == Strategy::Uniform {
            let j = rng.gen_range(step..n);
            order.swap(step, j);
        }
        if hidden[order[step]] {
            left -= 1;
            if left == 0 {
                return (step as u64 + 1, false);
            }
        }
    }
    (budget, true)
}

/// Simulates the hide-and-seek game: the hider places `k` objects on `n`
/// nodes, the seeker queries one node per unit of cost until all are found.
/// L is the number of queries, or `budget` when the objects are not all
/// found within it (always the case for k = 0). Trial t draws from its own
/// derived stream, so results are independent of scheduling.
pub fn seek_simulate(
    n: usize,
    k: usize,
    hider: Strategy,
    seeker: Strategy,
    trials: u64,
    seed: u64,
    budget: u64,
) -> Result<GameStats, AnalyticsError> {
    if k > n {
        return Err(AnalyticsError::Game(format!("cannot hide {k} objects on {n} nodes")));
    }
    if budget == 0 || trials == 0 {
        return Err(AnalyticsError::Game("budget and trials must be at least 1".into()));
    }
    let (histogram, exhausted) = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = seed::rng(seed, "trial", t);
            play(n, k, hider, seeker, budget, &mut rng)
        })
        .fold(
            || (BTreeMap::new(), 0u64),
            |(mut h, e), (l, ex)| {
                *h.entry(l).or_insert(0u64) += 1;
                (h, e + ex as u64)
            },
        )
        .reduce(
            || (BTreeMap::new(), 0u64),
            |(mut a, ea), (b, eb)| {
                for (l, c) in b {
                    *a.entry(l).or_insert(0) += c;
                }
                (a, ea + eb)
            },
        );
    let tf = trials as f64;
    let mean = histogram.iter().map(|(&l, &c)| l as f64 * c as f64).sum::<f64>() / tf;
    let var = if trials > 1 {
        histogram.iter().map(|(&l, &c)| c as f64 * (l as f64 - mean).powi(2)).sum::<f64>() / (tf - 1.0)
    } else {
        0.0
    };
    Ok(GameStats { nodes: n, hidden: k, trials, budget, mean, std_error: (var / tf).sqrt(), histogram, exhausted })
}

/// E[L] under uniform strategies with an unlimited budget, k ≥ 1: the
/// expected position of the last of k random nodes in a random order,
/// k(n+1)/(k+1).
pub fn expected_game_length(n: usize, k: usize) -> f64 {
    assert!(k >= 1 && k <= n, "need 1 <= k <= n");
    k as f64 * (n as f64 + 1.0) / (k as f64 + 1.0)
}


#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn boundary_cases() {
        let s = seek_simulate(10, 0, Strategy::Uniform, Strategy::Uniform, 50, 1, 37).unwrap();
        assert_eq!(s.histogram, BTreeMap::from([(37, 50)]));
        let s = seek_simulate(10, 10, Strategy::Uniform, Strategy::Uniform, 50, 1, 100).unwrap();
        assert_eq!(s.histogram, BTreeMap::from([(10, 50)]));
        let s = seek_simulate(10, 3, Strategy::Sequential, Strategy::Sequential, 5, 1, 100).unwrap();
        assert_eq!(s.mean, 3.0);
        assert!(seek_simulate(3, 4, Strategy::Uniform, Strategy::Uniform, 5, 1, 10).is_err());
    }

    #[test]
    fn budget_caps_length() {
        let s = seek_simulate(100, 1, Strategy::Uniform, Strategy::Uniform, 2000, 4, 10).unwrap();
        assert!(s.histogram.keys().all(|&l| l <= 10));
        assert!(s.exhausted > 0);
    }

    #[test]
    fn deterministic() {
        let a = seek_simulate(30, 2, Strategy::Uniform, Strategy::Uniform, 500, 9, 1000).unwrap();
        assert_eq!(a, seek_simulate(30, 2, Strategy::Uniform, Strategy::Uniform, 500, 9, 1000).unwrap());
    }
}
