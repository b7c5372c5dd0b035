//! Variation pipeline: mating pool selection, DE mutation, polynomial mutation, repair.

use rand::seq::index::sample;
use rand::Rng;

use crate::decomposition::WeightSet;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VariationParams {
    /// DE scale factor.
    pub de_f: f64,
    /// Polynomial mutation distribution index.
    pub eta_m: f64,
    /// Per-variable polynomial mutation probability.
    pub pm_prob: f64,
    /// Probability of mating inside the neighbourhood.
    pub delta: f64,
}

/// Indices eligible as DE donors for one subproblem.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MatingPool<'a> {
    Neighborhood(&'a [usize]),
    Population(usize),
}

impl MatingPool<'_> {
    pub fn to_vec(&self) -> Vec<usize> {
        match *self {
            MatingPool::Neighborhood(n) => n.to_vec(),
            MatingPool::Population(n) => (0..n).collect(),
        }
    }

    pub fn is_neighborhood(&self) -> bool {
        matches!(self, MatingPool::Neighborhood(_))
    }
}

/// With probability `delta` the neighbourhood of `i`, otherwise the whole population.
pub fn select_pool<'a, T, R: Rng + ?Sized>(
    i: usize,
    weights: &'a WeightSet<T>,
    delta: f64,
    rng: &mut R,
) -> MatingPool<'a> {
    if rng.random::<f64>() < delta {
        MatingPool::Neighborhood(&weights.neighborhoods[i])
    } else {
        MatingPool::Population(weights.vectors.len())
    }
}

/// `x_i + F * (x_b - x_c)` with distinct donors `b`, `c` drawn from `pool \ {i}`.
pub fn de_mutation<T: Scalar, S: AsRef<[T]>, R: Rng + ?Sized>(
    target: usize,
    pool: &[usize],
    xs: &[S],
    de_f: f64,
    rng: &mut R,
) -> Result<Vec<T>> {
    let mut donors: Vec<usize> = pool.iter().copied().filter(|&k| k != target).collect();
    donors.sort_unstable();
    donors.dedup();
    if donors.len() < 2 {
        return Err(Error::usage(format!(
            "DE needs two donors besides {target}, pool offers {}",
            donors.len()
        )));
    }
    let picks = sample(rng, donors.len(), 2);
    let (b, c) = (donors[picks.index(0)], donors[picks.index(1)]);
    Ok(de_combine(
        xs[target].as_ref(),
        xs[b].as_ref(),
        xs[c].as_ref(),
        T::lit(de_f),
    ))
}

pub(crate) fn de_combine<T: Scalar>(base: &[T], b: &[T], c: &[T], f: T) -> Vec<T> {
    base.iter()
        .zip(b.iter().zip(c))
        .map(|(&xi, (&xb, &xc))| xi + f * (xb - xc))
        .collect()
}

/// Bounded polynomial mutation. Every coordinate is perturbed with probability
/// `pm_prob`; the perturbation never crosses the variable's bounds when the
/// coordinate starts inside them. Coordinates outside the box take the
/// perturbation of their nearest in-box position.
pub fn polynomial_mutation<T: Scalar, R: Rng + ?Sized>(
    x: &[T],
    bounds: &[(T, T)],
    eta_m: f64,
    pm_prob: f64,
    rng: &mut R,
) -> Vec<T> {
    let mut y = x.to_vec();
    let exponent = eta_m + 1.0;
    let mut_pow = 1.0 / exponent;
    for (yj, &(lo, hi)) in y.iter_mut().zip(bounds) {
        if rng.random::<f64>() >= pm_prob {
            continue;
        }
        let (lo_f, hi_f) = (lo.to_f64_lossy(), hi.to_f64_lossy());
        let span = hi_f - lo_f;
        if span <= 0.0 {
            continue;
        }
        let cur = yj.to_f64_lossy();
        let d1 = ((cur - lo_f) / span).clamp(0.0, 1.0);
        let d2 = ((hi_f - cur) / span).clamp(0.0, 1.0);
        let r: f64 = rng.random();
        let dq = if r < 0.5 {
            let val = 2.0 * r + (1.0 - 2.0 * r) * (1.0 - d1).powf(exponent);
            val.powf(mut_pow) - 1.0
        } else {
            let val = 2.0 * (1.0 - r) + 2.0 * (r - 0.5) * (1.0 - d2).powf(exponent);
            1.0 - val.powf(mut_pow)
        };
        let moved = T::lit(cur + dq * span);
        *yj = if cur >= lo_f && cur <= hi_f {
            moved.max(lo).min(hi)
        } else {
            moved
        };
    }
    y
}

/// Clips every coordinate into its `[lower, upper]` interval.
pub fn repair_bounds<T: Scalar>(x: &[T], bounds: &[(T, T)]) -> Vec<T> {
    x.iter().zip(bounds).map(|(&v, &(lo, hi))| v.max(lo).min(hi)).collect()
}

/// DE, then polynomial mutation, then repair, for subproblem `target`.
pub fn vary<T: Scalar, S: AsRef<[T]>, R: Rng + ?Sized>(
    target: usize,
    pool: &[usize],
    xs: &[S],
    bounds: &[(T, T)],
    params: &VariationParams,
    rng: &mut R,
) -> Result<Vec<T>> {
    let v = de_mutation(target, pool, xs, params.de_f, rng)?;
    let v = polynomial_mutation(&v, bounds, params.eta_m, params.pm_prob, rng);
    Ok(repair_bounds(&v, bounds))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decomposition::gen_sld;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn weights(n: usize, t: usize) -> WeightSet<f64> {
        WeightSet::new(gen_sld(2, n - 1), t).unwrap()
    }

    #[test]
    fn pool_branches() {
        let w = weights(10, 3);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..100 {
            assert!(select_pool(4, &w, 1.0, &mut rng).is_neighborhood());
        }
        let draws = 10_000;
        let whole = (0..draws)
            .filter(|_| !select_pool(4, &w, 0.1, &mut rng).is_neighborhood())
            .count();
        let freq = whole as f64 / draws as f64;
        assert!((freq - 0.9).abs() <= 0.02, "{freq}");

        let full = weights(6, 6);
        let mut a = select_pool(2, &full, 1.0, &mut rng).to_vec();
        a.sort();
        assert_eq!(a, select_pool(2, &full, 0.0, &mut rng).to_vec());
    }

    #[test]
    fn de_examples() {
        assert_eq!(de_combine(&[0.0, 0.0], &[1.0, 1.0], &[0.0, 0.0], 0.5), vec![0.5, 0.5]);
        assert_eq!(de_combine(&[0.3, 0.7], &[0.2, 0.1], &[0.2, 0.1], 0.9), vec![0.3, 0.7]);
        let xs = vec![vec![0.0], vec![1.0], vec![2.0]];
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(de_mutation(0, &[0, 1], &xs, 0.5, &mut rng).is_err());
        assert!(de_mutation(0, &[0, 1, 1], &xs, 0.5, &mut rng).is_err());
        let v = de_mutation(0, &[0, 1, 2], &xs, 0.5, &mut rng).unwrap();
        assert!(v == vec![0.5] || v == vec![-0.5]);
    }

    #[test]
    fn de_difference_symmetric() {
        // Drawing (b, c) uniformly makes x_b - x_c symmetric: the sample of
        // F-scaled differences and of its negation share their moments.
        let xs: Vec<Vec<f64>> = (0..8).map(|k| vec![(k * k) as f64 * 0.1]).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let n = 40_000;
        let samples: Vec<f64> = (0..n)
            .map(|_| de_mutation(0, &(0..8).collect::<Vec<_>>(), &xs, 0.7, &mut rng).unwrap()[0])
            .collect();
        let mean = samples.iter().sum::<f64>() / n as f64;
        let third = samples.iter().map(|s| s.powi(3)).sum::<f64>() / n as f64;
        let sd = (samples.iter().map(|s| s * s).sum::<f64>() / n as f64).sqrt();
        assert!(mean.abs() < 0.03 * sd, "mean {mean}");
        assert!(third.abs() < 0.05 * sd.powi(3), "skew {third}");
    }

    #[test]
    fn polynomial_mutation_properties() {
        let bounds = vec![(0.0, 1.0); 4];
        let x = vec![0.1, 0.5, 0.9, 0.0];
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        assert_eq!(polynomial_mutation(&x, &bounds, 20.0, 0.0, &mut rng), x);

        let spread = |eta: f64| {
            let mut rng = ChaCha8Rng::seed_from_u64(99);
            (0..10_000)
                .map(|_| {
                    let y = polynomial_mutation(&[0.5f64], &[(0.0, 1.0)], eta, 1.0, &mut rng);
                    (y[0] - 0.5).abs()
                })
                .sum::<f64>()
                / 10_000.0
        };
        assert!(spread(100.0) < spread(1.0));

        for _ in 0..5_000 {
            let y = polynomial_mutation(&[0.0, 1.0], &[(0.0, 1.0); 2], 1.0, 1.0, &mut rng);
            assert!(y[0] >= 0.0 && y[1] <= 1.0 && y[0] <= 1.0 && y[1] >= 0.0);
        }
    }

    #[test]
    fn repair_examples() {
        let b = vec![(0.0, 1.0), (-2.0, 2.0)];
        assert_eq!(repair_bounds(&[0.4, -1.0], &b), vec![0.4, -1.0]);
        assert_eq!(repair_bounds(&[1.7, -3.0], &b), vec![1.0, -2.0]);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..1000 {
            let x = [rng.random_range(-10.0..10.0), rng.random_range(-10.0..10.0)];
            let y = repair_bounds(&x, &b);
            assert!(y.iter().zip(&b).all(|(&v, &(lo, hi))| v >= lo && v <= hi));
        }
    }

    #[test]
    fn pipeline_in_bounds_and_deterministic() {
        let bounds = vec![(0.0, 1.0); 3];
        let xs: Vec<Vec<f64>> = (0..6).map(|k| vec![k as f64 / 5.0; 3]).collect();
        let params = VariationParams {
            de_f: 1.0,
            eta_m: 20.0,
            pm_prob: 0.5,
            delta: 0.9,
        };
        let pool: Vec<usize> = (0..6).collect();
        let run = |seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..200)
                .map(|i| vary(i % 6, &pool, &xs, &bounds, &params, &mut rng).unwrap())
                .collect::<Vec<_>>()
        };
        let a = run(5);
        assert_eq!(a, run(5));
        assert!(a.iter().flatten().all(|&v| (0.0..=1.0).contains(&v)));
    }
}
