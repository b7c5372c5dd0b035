//! Aggregation functions, ideal point tracking and the dynamic penalty.

use crate::error::{check_len, Result};
use crate::scalar::Scalar;

/// Floor applied to zero weights before taking reciprocals in AWT.
pub const AWT_EPSILON: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Aggregation {
    /// Weighted Tchebycheff.
    Wt,
    /// Adjusted weighted Tchebycheff.
    Awt,
}

impl Aggregation {
    /// Weights that [`wt`] should be evaluated with for this aggregation.
    pub fn effective_weights<T: Scalar>(self, lambda: &[T]) -> Vec<T> {
        match self {
            Aggregation::Wt => lambda.to_vec(),
            Aggregation::Awt => adjusted_weights(lambda),
        }
    }

    pub fn evaluate<T: Scalar>(self, f_scaled: &[T], lambda: &[T], z: &[T]) -> Result<T> {
        match self {
            Aggregation::Wt => wt(f_scaled, lambda, z),
            Aggregation::Awt => awt(f_scaled, lambda, z),
        }
    }
}

/// `max_j lambda_j * |f_j - z_j|`.
pub fn wt<T: Scalar>(f_scaled: &[T], lambda: &[T], z: &[T]) -> Result<T> {
    check_len(f_scaled.len(), lambda.len())?;
    check_len(f_scaled.len(), z.len())?;
    Ok(wt_unchecked(f_scaled, lambda, z))
}

#[inline]
pub(crate) fn wt_unchecked<T: Scalar>(f: &[T], lambda: &[T], z: &[T]) -> T {
    f.iter()
        .zip(lambda)
        .zip(z)
        .fold(T::zero(), |acc, ((&fj, &lj), &zj)| acc.max(lj * (fj - zj).abs()))
}

/// Reciprocal weights, floored at [`AWT_EPSILON`], renormalised to sum to one.
pub fn adjusted_weights<T: Scalar>(lambda: &[T]) -> Vec<T> {
    let eps = T::lit(AWT_EPSILON);
    let inv: Vec<T> = lambda.iter().map(|&l| T::one() / l.max(eps)).collect();
    let total: T = inv.iter().copied().sum();
    inv.into_iter().map(|r| r / total).collect()
}

/// Weighted Tchebycheff with [`adjusted_weights`].
pub fn awt<T: Scalar>(f_scaled: &[T], lambda: &[T], z: &[T]) -> Result<T> {
    check_len(f_scaled.len(), lambda.len())?;
    wt(f_scaled, &adjusted_weights(lambda), z)
}

/// Dynamic penalty constants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PenaltySchedule {
    pub c: f64,
    pub alpha: f64,
}

impl Default for PenaltySchedule {
    fn default() -> Self {
        Self { c: 5.0, alpha: 2.0 }
    }
}

impl PenaltySchedule {
    /// Multiplier `(C * t)^alpha` applied to the violation at generation `t`.
    pub fn factor<T: Scalar>(&self, generation: u64) -> T {
        T::lit((self.c * generation as f64).powf(self.alpha))
    }
}

/// `g_agg + (C * t)^alpha * v`.
pub fn penalized<T: Scalar>(g_agg: T, generation: u64, v: T, sched: &PenaltySchedule) -> T {
    if v == T::zero() {
        return g_agg;
    }
    g_agg + sched.factor::<T>(generation) * v
}

/// Running component-wise minimum of observed objective vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct IdealPoint<T> {
    pub z: Vec<T>,
}

impl<T: Scalar> IdealPoint<T> {
    pub fn new(m: usize) -> Self {
        Self {
            z: vec![T::infinity(); m],
        }
    }

    pub fn observe(&mut self, f: &[T]) {
        for (zj, &fj) in self.z.iter_mut().zip(f) {
            *zj = zj.min(fj);
        }
    }
}

/// `z'_j = min(z_j, f_j)`.
pub fn update_ideal<T: Scalar>(z: &[T], f_scaled: &[T]) -> Result<Vec<T>> {
    check_len(z.len(), f_scaled.len())?;
    Ok(z.iter().zip(f_scaled).map(|(&a, &b)| a.min(b)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn wt_examples() {
        assert_eq!(wt(&[1.0, 3.0], &[0.5, 0.5], &[0.0, 0.0]).unwrap(), 1.5);
        assert_eq!(wt(&[0.4, 0.2], &[0.3, 0.7], &[0.4, 0.2]).unwrap(), 0.0);
        assert_eq!(wt(&[0.3, 0.9], &[1.0, 0.0], &[0.0, 0.0]).unwrap(), 0.3);
        assert!(wt(&[0.3], &[1.0, 0.0], &[0.0, 0.0]).is_err());
    }

    #[test]
    fn awt_examples() {
        assert_eq!(adjusted_weights(&[0.5, 0.5]), vec![0.5, 0.5]);
        let f = [0.7, 0.1];
        assert_eq!(
            awt(&f, &[0.5, 0.5], &[0.0, 0.0]).unwrap(),
            wt(&f, &[0.5, 0.5], &[0.0, 0.0]).unwrap()
        );
        let adj = adjusted_weights(&[0.8f64, 0.2]);
        assert!((adj[0] - 0.2).abs() < 1e-15 && (adj[1] - 0.8).abs() < 1e-15);
        assert!((awt(&[1.0f64, 1.0], &[0.8, 0.2], &[0.0, 0.0]).unwrap() - 0.8).abs() < 1e-15);
        assert_eq!(awt(&[0.2, 0.6], &[0.8, 0.2], &[0.2, 0.6]).unwrap(), 0.0);
        // corner weights are floored instead of dividing by zero
        let corner = adjusted_weights(&[1.0f64, 0.0]);
        assert!(corner.iter().all(|w| w.is_finite()));
        assert!(corner[1] > corner[0]);
    }

    #[test]
    fn penalty_examples() {
        let s = PenaltySchedule::default();
        assert_eq!(penalized(1.25, 7, 0.0, &s), 1.25);
        assert!((penalized(1.0f64, 1, 0.1, &s) - 3.5).abs() < 1e-12);
        assert_eq!(penalized(1.0, 0, 4.0, &s), 1.0);
    }

    #[test]
    fn ideal_examples() {
        assert_eq!(update_ideal(&[0.5, 0.5], &[0.2, 0.9]).unwrap(), vec![0.2, 0.5]);
        assert_eq!(update_ideal(&[0.5, 0.5], &[0.6, 0.9]).unwrap(), vec![0.5, 0.5]);
        let history = [[0.4, 0.9], [0.7, 0.1], [0.2, 0.6], [0.3, 0.3]];
        let mut z = IdealPoint::new(2);
        let mut folded = vec![f64::INFINITY; 2];
        for h in &history {
            z.observe(h);
            folded = update_ideal(&folded, h).unwrap();
        }
        let batch: Vec<f64> = (0..2)
            .map(|j| history.iter().map(|h| h[j]).fold(f64::INFINITY, f64::min))
            .collect();
        assert_eq!(z.z, batch);
        assert_eq!(folded, batch);
    }

    proptest! {
        #[test]
        fn aggregations_nonnegative_and_monotone(
            f in prop::collection::vec(0.0f64..1.0, 3),
            w in prop::collection::vec(0.0f64..1.0, 3),
            bump in 0.0f64..0.5,
            j in 0usize..3,
        ) {
            let z = [0.0; 3];
            let mut g = f.clone();
            g[j] += bump;
            for agg in [Aggregation::Wt, Aggregation::Awt] {
                let a = agg.evaluate(&f, &w, &z).unwrap();
                let b = agg.evaluate(&g, &w, &z).unwrap();
                prop_assert!(a >= 0.0);
                prop_assert!(b >= a);
            }
        }

        #[test]
        fn penalty_strictly_increasing_in_violation(g in 0.0f64..2.0, t in 1u64..500, v in 0.0f64..10.0, dv in 1e-6f64..1.0) {
            let s = PenaltySchedule::default();
            prop_assert!(penalized(g, t, v + dv, &s) > penalized(g, t, v, &s));
            // feasible never loses to infeasible with equal aggregation
            prop_assert!(penalized(g, t, 0.0, &s) < penalized(g, t, dv, &s));
        }
    }
}
