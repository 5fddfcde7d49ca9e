/// Pairwise summation in a fixed split order, so the rounding pattern depends
/// only on the slice length.
pub(crate) fn pairwise(values: &[f64]) -> f64 {
    const LEAF: usize = 8;
    if values.len() <= LEAF {
        let mut acc = 0.0;
        for v in values {
            acc += v;
        }
        return acc;
    }
    let (lo, hi) = values.split_at(values.len() / 2);
    pairwise(lo) + pairwise(hi)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matches_naive_sum_on_integers() {
        let v: alloc::vec::Vec<f64> = (1..=1000).map(|i| i as f64).collect();
        assert_eq!(pairwise(&v), 500_500.0);
        assert_eq!(pairwise(&[]), 0.0);
    }
}
