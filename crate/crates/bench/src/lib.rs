//! Deterministic workloads shared by the benchmarks.

use ld_core::OutcomeSpace;

/// A space of `n` outcomes with distinct positive weights summing to one.
pub fn graded_space(n: usize) -> OutcomeSpace {
    let total = (n * (n + 1) / 2) as f64;
    let weights: Vec<f64> = (1..=n).map(|i| i as f64 / total).collect();
    OutcomeSpace::numbered(&weights).expect("graded weights are valid")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn graded_space_is_normalised() {
        let s = graded_space(20);
        assert_eq!(s.len(), 20);
        assert!((s.total_weight() - 1.0).abs() < 1e-12);
    }
}
