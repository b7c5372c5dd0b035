//! Constrained multiobjective problem interface and the built-in test problems.

use std::sync::Arc;

use crate::error::{check_len, Error, Result};
use crate::scalar::Scalar;

/// Static description of a problem.
#[derive(Debug, Clone, PartialEq)]
pub struct ProblemSpec<T> {
    pub name: String,
    pub dim: usize,
    /// Number of objectives.
    pub m: usize,
    /// Per-variable `(lower, upper)`.
    pub bounds: Vec<(T, T)>,
    pub n_constraints: usize,
    /// Ideal and nadir of the true Pareto front, when known. Used as fixed
    /// normalisation bounds by metrics that compare different runs.
    pub reference_bounds: Option<(Vec<T>, Vec<T>)>,
}

impl<T: Scalar> ProblemSpec<T> {
    pub fn validate(&self) -> Result<()> {
        if self.m < 2 {
            return Err(Error::InvalidConfig(format!("{}: m must be >= 2", self.name)));
        }
        check_len(self.dim, self.bounds.len())?;
        if let Some((i, _)) = self
            .bounds
            .iter()
            .enumerate()
            .find(|(_, (lo, hi))| lo.partial_cmp(hi) != Some(std::cmp::Ordering::Less))
        {
            return Err(Error::InvalidConfig(format!(
                "{}: variable {i} has lower >= upper",
                self.name
            )));
        }
        Ok(())
    }

    pub fn contains(&self, x: &[T]) -> bool {
        x.len() == self.dim && x.iter().zip(&self.bounds).all(|(&v, &(lo, hi))| v >= lo && v <= hi)
    }
}

/// Objective and constraint values; constraints follow `g_i(x) <= 0` is feasible.
#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation<T> {
    pub f: Vec<T>,
    pub g: Vec<T>,
}

/// A (possibly user supplied) constrained multiobjective problem. Implementations
/// must be pure.
pub trait Problem<T: Scalar>: Send + Sync {
    fn spec(&self) -> &ProblemSpec<T>;

    /// Evaluates a point already known to be inside the bounds.
    fn evaluate_in_bounds(&self, x: &[T]) -> Evaluation<T>;

    /// Analytic Pareto front of a bi-objective problem parametrised over `t in [0, 1]`.
    fn pareto_front_point(&self, _t: T) -> Option<Vec<T>> {
        None
    }
}

/// Checked evaluation; the caller repairs out-of-box points first.
pub fn evaluate<T: Scalar>(problem: &dyn Problem<T>, x: &[T]) -> Result<Evaluation<T>> {
    let spec = problem.spec();
    check_len(spec.dim, x.len())?;
    if !spec.contains(x) {
        return Err(Error::usage(format!("{}: point outside bounds", spec.name)));
    }
    Ok(problem.evaluate_in_bounds(x))
}

/// Sum of the positive parts of `g`.
pub fn total_violation<T: Scalar>(g: &[T]) -> T {
    g.iter().fold(T::zero(), |acc, &gi| acc + gi.max(T::zero()))
}

/// Per-objective `[min, max]` box used for linear scaling.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalingBounds<T> {
    pub lower: Vec<T>,
    pub upper: Vec<T>,
}

impl<T: Scalar> ScalingBounds<T> {
    pub fn empty(m: usize) -> Self {
        Self {
            lower: vec![T::infinity(); m],
            upper: vec![T::neg_infinity(); m],
        }
    }

    pub fn from_points<'a, I>(m: usize, points: I) -> Self
    where
        I: IntoIterator<Item = &'a [T]>,
    {
        let mut b = Self::empty(m);
        for p in points {
            b.include(p);
        }
        b
    }

    pub fn include(&mut self, f: &[T]) {
        for (j, &v) in f.iter().enumerate() {
            self.lower[j] = self.lower[j].min(v);
            self.upper[j] = self.upper[j].max(v);
        }
    }

    pub fn is_empty(&self) -> bool {
        self.lower.iter().zip(&self.upper).any(|(l, u)| l > u)
    }

    /// `(f - min) / (max - min)`, or `0` on a degenerate axis.
    pub fn scale(&self, f: &[T]) -> Vec<T> {
        f.iter()
            .enumerate()
            .map(|(j, &v)| {
                let range = self.upper[j] - self.lower[j];
                if range > T::zero() {
                    (v - self.lower[j]) / range
                } else {
                    T::zero()
                }
            })
            .collect()
    }

    pub fn scale_into(&self, f: &[T], out: &mut Vec<T>) {
        out.clear();
        out.extend(f.iter().enumerate().map(|(j, &v)| {
            let range = self.upper[j] - self.lower[j];
            if range > T::zero() {
                (v - self.lower[j]) / range
            } else {
                T::zero()
            }
        }));
    }
}

/// Linear scaling of every objective to `[0, 1]` using the min/max of the set itself.
pub fn scale_objectives<T: Scalar>(points: &[Vec<T>]) -> Vec<Vec<T>> {
    let Some(first) = points.first() else {
        return Vec::new();
    };
    let bounds = ScalingBounds::from_points(first.len(), points.iter().map(Vec::as_slice));
    points.iter().map(|p| bounds.scale(p)).collect()
}

/// `n` points of the analytic front, evenly spaced in the front parameter.
pub fn pf_sample<T: Scalar>(problem: &dyn Problem<T>, n: usize) -> Option<Vec<Vec<T>>> {
    problem.pareto_front_point(T::zero())?;
    let denom = T::from_usize_lossy(n.saturating_sub(1).max(1));
    (0..n)
        .map(|i| problem.pareto_front_point(T::from_usize_lossy(i) / denom))
        .collect()
}

/// Euclidean distance from `f` to the analytic front, measured after scaling
/// with the problem's reference bounds (raw objectives when none are given).
pub fn pf_distance<T: Scalar>(problem: &dyn Problem<T>, f: &[T]) -> Option<T> {
    problem.pareto_front_point(T::zero())?;
    let norm = |v: &[T]| -> Vec<T> {
        match &problem.spec().reference_bounds {
            Some((lo, hi)) => ScalingBounds {
                lower: lo.clone(),
                upper: hi.clone(),
            }
            .scale(v),
            None => v.to_vec(),
        }
    };
    let target = norm(f);
    let dist_at = |t: T| -> T {
        let p = norm(&problem.pareto_front_point(t).expect("front defined on [0, 1]"));
        p.iter()
            .zip(&target)
            .map(|(&a, &b)| (a - b) * (a - b))
            .sum::<T>()
            .sqrt()
    };

    const GRID: usize = 2000;
    let step = T::one() / T::from_usize_lossy(GRID);
    let (mut best_i, mut best) = (0, dist_at(T::zero()));
    for i in 1..=GRID {
        let d = dist_at(T::from_usize_lossy(i) * step);
        if d < best {
            best = d;
            best_i = i;
        }
    }
    // golden-section refinement inside the bracketing grid cells
    let mut lo = T::from_usize_lossy(best_i.saturating_sub(1)) * step;
    let mut hi = (T::from_usize_lossy(best_i + 1) * step).min(T::one());
    let ratio = T::lit(0.618_033_988_749_894_8);
    for _ in 0..60 {
        let a = hi - ratio * (hi - lo);
        let b = lo + ratio * (hi - lo);
        if dist_at(a) < dist_at(b) {
            hi = b;
        } else {
            lo = a;
        }
    }
    Some(best.min(dist_at((lo + hi) / T::lit(2.0))))
}

/// ZDT1: convex front `f2 = 1 - sqrt(f1)`, unconstrained.
#[derive(Debug, Clone)]
pub struct Zdt1<T> {
    spec: ProblemSpec<T>,
}

impl<T: Scalar> Zdt1<T> {
    pub fn new(dim: usize) -> Self {
        assert!(dim >= 2, "ZDT1 needs at least two variables");
        Self {
            spec: ProblemSpec {
                name: "zdt1".into(),
                dim,
                m: 2,
                bounds: vec![(T::zero(), T::one()); dim],
                n_constraints: 0,
                reference_bounds: Some((vec![T::zero(); 2], vec![T::one(); 2])),
            },
        }
    }
}

impl<T: Scalar> Problem<T> for Zdt1<T> {
    fn spec(&self) -> &ProblemSpec<T> {
        &self.spec
    }

    fn evaluate_in_bounds(&self, x: &[T]) -> Evaluation<T> {
        let f1 = x[0];
        let tail = &x[1..];
        let mean = tail.iter().copied().sum::<T>() / T::from_usize_lossy(tail.len());
        let g = T::one() + T::lit(9.0) * mean;
        let f2 = g * (T::one() - (f1 / g).sqrt());
        Evaluation {
            f: vec![f1, f2],
            g: Vec::new(),
        }
    }

    fn pareto_front_point(&self, t: T) -> Option<Vec<T>> {
        Some(vec![t, T::one() - t.sqrt()])
    }
}

/// Binh and Korn: two quadratic objectives and two constraints.
#[derive(Debug, Clone)]
pub struct BinhKorn<T> {
    spec: ProblemSpec<T>,
}

impl<T: Scalar> Default for BinhKorn<T> {
    fn default() -> Self {
        Self {
            spec: ProblemSpec {
                name: "binh_korn".into(),
                dim: 2,
                m: 2,
                bounds: vec![(T::zero(), T::lit(5.0)), (T::zero(), T::lit(3.0))],
                n_constraints: 2,
                reference_bounds: Some((vec![T::zero(), T::lit(4.0)], vec![T::lit(136.0), T::lit(50.0)])),
            },
        }
    }
}

impl<T: Scalar> Problem<T> for BinhKorn<T> {
    fn spec(&self) -> &ProblemSpec<T> {
        &self.spec
    }

    fn evaluate_in_bounds(&self, x: &[T]) -> Evaluation<T> {
        let (a, b) = (x[0], x[1]);
        let four = T::lit(4.0);
        let five = T::lit(5.0);
        let f1 = four * a * a + four * b * b;
        let f2 = (a - five).powi(2) + (b - five).powi(2);
        let g1 = (a - five).powi(2) + b * b - T::lit(25.0);
        let g2 = T::lit(7.7) - ((a - T::lit(8.0)).powi(2) + (b + T::lit(3.0)).powi(2));
        Evaluation {
            f: vec![f1, f2],
            g: vec![g1, g2],
        }
    }
}

/// Tanaka: identity objectives with a wavy, disconnected feasible region.
#[derive(Debug, Clone)]
pub struct Tanaka<T> {
    spec: ProblemSpec<T>,
}

impl<T: Scalar> Default for Tanaka<T> {
    fn default() -> Self {
        let pi = T::lit(std::f64::consts::PI);
        Self {
            spec: ProblemSpec {
                name: "tanaka".into(),
                dim: 2,
                m: 2,
                bounds: vec![(T::zero(), pi), (T::zero(), pi)],
                n_constraints: 2,
                reference_bounds: None,
            },
        }
    }
}

impl<T: Scalar> Problem<T> for Tanaka<T> {
    fn spec(&self) -> &ProblemSpec<T> {
        &self.spec
    }

    fn evaluate_in_bounds(&self, x: &[T]) -> Evaluation<T> {
        let (a, b) = (x[0], x[1]);
        let half = T::lit(0.5);
        // atan2 extends atan(a / b) continuously to b = 0
        let wave = T::lit(0.1) * (T::lit(16.0) * a.atan2(b)).cos();
        let g1 = T::one() + wave - a * a - b * b;
        let g2 = (a - half).powi(2) + (b - half).powi(2) - half;
        Evaluation {
            f: vec![a, b],
            g: vec![g1, g2],
        }
    }
}

/// Names accepted by [`by_name`].
pub const BUILTIN_PROBLEMS: [&str; 3] = ["zdt1", "binh_korn", "tanaka"];

/// Built-in problem lookup. `zdt1` accepts an optional `:dim` suffix (default 30).
pub fn by_name<T: Scalar>(name: &str) -> Option<Arc<dyn Problem<T>>> {
    let (base, arg) = match name.split_once(':') {
        Some((b, a)) => (b, Some(a)),
        None => (name, None),
    };
    match (base, arg) {
        ("zdt1", None) => Some(Arc::new(Zdt1::new(30))),
        ("zdt1", Some(d)) => d.parse().ok().filter(|&d| d >= 2).map(|d| Arc::new(Zdt1::new(d)) as _),
        ("binh_korn", None) => Some(Arc::new(BinhKorn::default())),
        ("tanaka", None) => Some(Arc::new(Tanaka::default())),
        _ => None,
    }
}
