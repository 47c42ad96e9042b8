use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use super::AnalyticsError;

/// Per-circuit rare/regular net counts and the largest trigger width.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StrategyProfile {
    /// `(r_i, g_i)`: rare and regular net counts of circuit i.
    pub circuits: Vec<(u64, u64)>,
    /// Largest trigger width M.
    pub max_width: u64,
}

/// C(n, k), zero when k > n.
pub fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::from(0u32);
    }
    let k = k.min(n - k);
    let mut acc = BigUint::from(1u32);
    for i in 0..k {
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}

/// Number of distinct triggers an attacker can choose from:
/// Σ_{q=2..M} Σ_{p=0..q} Σ_i C(r_i, p)·C(g_i, q−p).
pub fn ht_space_size(profile: &StrategyProfile) -> Result<BigUint, AnalyticsError> {
    if profile.max_width < 2 {
        return Err(AnalyticsError::Profile(format!("max trigger width {} is below 2", profile.max_width)));
    }
    let mut total = BigUint::from(0u32);
    for q in 2..=profile.max_width {
        for p in 0..=q {
            for &(r, g) in &profile.circuits {
                total += binomial(r, p) * binomial(g, q - p);
            }
        }
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn size(circuits: Vec<(u64, u64)>, m: u64) -> BigUint {
        ht_space_size(&StrategyProfile { circuits, max_width: m }).unwrap()
    }

    #[test]
    fn small_profiles() {
        assert_eq!(size(vec![(3, 2)], 2), BigUint::from(10u32));
        assert_eq!(size(vec![(3, 2)], 3), BigUint::from(20u32));
        assert_eq!(size(vec![(0, 0)], 7), BigUint::from(0u32));
        assert!(ht_space_size(&StrategyProfile { circuits: vec![], max_width: 1 }).is_err());
    }

    #[test]
    fn large_counts_are_exact() {
        // C(200, 100) needs more than 128 bits
        let c = binomial(200, 100);
        assert!(c.bits() > 128);
        assert_eq!(c.to_string(), "90548514656103281165404177077484163874504589675413336841320");
    }
}
