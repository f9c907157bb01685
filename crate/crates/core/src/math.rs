//! Small numeric helpers shared by the models.

use alloc::vec::Vec;
use rand_core::RngCore;

#[inline]
pub fn ln(x: f64) -> f64 {
    libm::log(x)
}

#[inline]
pub fn exp(x: f64) -> f64 {
    libm::exp(x)
}

/// `ln Σ exp(x_i)`, computed stably.
///
/// The partial terms are summed in sorted order so the result does not
/// depend on the order of `xs`. All `-inf` inputs (or an empty slice) give
/// `-inf`.
pub fn log_sum_exp(xs: &[f64]) -> f64 {
    let max = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    if max == f64::INFINITY {
        return f64::INFINITY;
    }
    let mut terms: Vec<f64> = xs.iter().map(|&x| exp(x - max)).collect();
    max + ln(sorted_sum(&mut terms))
}

/// Sums after sorting ascending; order-independent for a given multiset.
pub fn sorted_sum(xs: &mut [f64]) -> f64 {
    xs.sort_unstable_by(f64::total_cmp);
    xs.iter().sum()
}

/// Uniform draw in `[0, 1)` with 53 bits of precision.
#[inline]
pub fn uniform<R: RngCore>(rng: &mut R) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Uniform integer in `[0, n)`, `n > 0`, by rejection (no modulo bias).
pub fn uniform_index<R: RngCore>(rng: &mut R, n: usize) -> usize {
    debug_assert!(n > 0);
    let n = n as u64;
    let zone = u64::MAX - (u64::MAX % n);
    loop {
        let v = rng.next_u64();
        if v < zone {
            return (v % n) as usize;
        }
    }
}

/// Draws an index with probability proportional to `weights` by walking the
/// cumulative sum in index order. Weights must be non-negative with a
/// positive total.
pub fn sample_weighted<R: RngCore>(rng: &mut R, weights: &[f64]) -> usize {
    sample_weighted_in_order(rng, weights, 0..weights.len())
}

/// Like [`sample_weighted`] but walks the cumulative sum in the given index
/// order.
pub fn sample_weighted_in_order<R, I>(rng: &mut R, weights: &[f64], order: I) -> usize
where
    R: RngCore,
    I: IntoIterator<Item = usize> + Clone,
{
    let total: f64 = order.clone().into_iter().map(|i| weights[i]).sum();
    let target = uniform(rng) * total;
    let mut cum = 0.0;
    let mut last_positive = None;
    for i in order {
        let w = weights[i];
        if w > 0.0 {
            last_positive = Some(i);
        }
        cum += w;
        if target < cum {
            return i;
        }
    }
    // rounding can leave target == total
    last_positive.unwrap_or(0)
}

/// Fills `out` with a draw from the symmetric Dirichlet(1), i.e. a uniform
/// point on the simplex.
pub fn dirichlet_ones<R: RngCore>(rng: &mut R, out: &mut [f64]) {
    let mut total = 0.0;
    for v in out.iter_mut() {
        // 1 - U lies in (0, 1], so the log is finite
        *v = -ln(1.0 - uniform(rng));
        total += *v;
    }
    if total > 0.0 {
        out.iter_mut().for_each(|v| *v /= total);
    } else {
        let n = out.len() as f64;
        out.iter_mut().for_each(|v| *v = 1.0 / n);
    }
}

/// Index of the largest entry; ties go to the lowest index. NaN entries are
/// never selected over a number.
pub fn argmax(xs: &[f64]) -> usize {
    let mut best = 0;
    for (i, &x) in xs.iter().enumerate().skip(1) {
        if x > xs[best] || (xs[best].is_nan() && !x.is_nan()) {
            best = i;
        }
    }
    best
}
