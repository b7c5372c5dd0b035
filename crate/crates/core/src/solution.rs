//! Solutions, Pareto dominance and the nondominated set.

use crate::error::{check_len, Result};
use crate::scalar::Scalar;

/// One evaluated point.
#[derive(Debug, Clone, PartialEq)]
pub struct Solution<T> {
    /// Decision variables on the problem's native scale.
    pub x: Vec<T>,
    /// Raw objective values (minimisation).
    pub f: Vec<T>,
    /// Objectives scaled with the bounds of the generation that last touched this solution.
    pub f_scaled: Vec<T>,
    /// Total constraint violation, `0` when feasible.
    pub v: T,
    /// Global evaluation counter at creation (1-based).
    pub eval_index: u64,
    pub run_id: u64,
}

impl<T: Scalar> Solution<T> {
    pub fn new(x: Vec<T>, f: Vec<T>, v: T, eval_index: u64, run_id: u64) -> Self {
        let f_scaled = vec![T::zero(); f.len()];
        Self {
            x,
            f,
            f_scaled,
            v,
            eval_index,
            run_id,
        }
    }

    pub fn is_feasible(&self) -> bool {
        self.v == T::zero()
    }
}

/// Pareto dominance under minimisation: `a <= b` everywhere and `a != b`.
pub fn dominates<T: Scalar>(a: &[T], b: &[T]) -> Result<bool> {
    check_len(a.len(), b.len())?;
    Ok(dominates_unchecked(a, b))
}

#[inline]
pub(crate) fn dominates_unchecked<T: Scalar>(a: &[T], b: &[T]) -> bool {
    let mut strictly = false;
    for (&ai, &bi) in a.iter().zip(b) {
        if ai > bi {
            return false;
        }
        if ai < bi {
            strictly = true;
        }
    }
    strictly
}

/// Constrained dominance: feasible beats infeasible, lower violation beats
/// higher, and objective dominance decides between equals.
pub fn constrained_dominates<T: Scalar>(a: &Solution<T>, b: &Solution<T>) -> bool {
    match (a.is_feasible(), b.is_feasible()) {
        (true, false) => true,
        (false, true) => false,
        (false, false) if a.v != b.v => a.v < b.v,
        _ => dominates_unchecked(&a.f, &b.f),
    }
}

/// Mutually nondominated solutions.
#[derive(Debug, Clone, PartialEq)]
pub struct ParetoSet<T> {
    members: Vec<Solution<T>>,
}

impl<T> Default for ParetoSet<T> {
    fn default() -> Self {
        Self { members: Vec::new() }
    }
}

impl<T: Scalar> ParetoSet<T> {
    pub fn new() -> Self {
        Self::default()
    }

    /// Wraps members the caller knows to be mutually nondominated.
    pub(crate) fn from_members(members: Vec<Solution<T>>) -> Self {
        Self { members }
    }

    pub fn members(&self) -> &[Solution<T>] {
        &self.members
    }

    pub fn into_members(self) -> Vec<Solution<T>> {
        self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Solution<T>> {
        self.members.iter()
    }

    pub fn objectives(&self) -> Vec<Vec<T>> {
        self.members.iter().map(|s| s.f.clone()).collect()
    }

    /// Archive insertion under constrained dominance. Returns `true` when the
    /// candidate was kept. An identical objective vector already present keeps
    /// the earlier entry.
    pub fn insert(&mut self, candidate: Solution<T>) -> bool {
        for m in &self.members {
            if constrained_dominates(m, &candidate) {
                return false;
            }
            if m.f == candidate.f
                && m.is_feasible() == candidate.is_feasible()
                && m.v == candidate.v
                && m.eval_index <= candidate.eval_index
            {
                return false;
            }
        }
        self.members
            .retain(|m| !(constrained_dominates(&candidate, m) || (m.f == candidate.f && m.v == candidate.v)));
        self.members.push(candidate);
        true
    }
}

/// The subset of `points` not dominated (in objective space) by any other
/// point. Duplicated objective vectors keep the entry with the smallest
/// `eval_index`, then the earliest position.
pub fn nondominated_filter<T: Scalar>(points: &[Solution<T>]) -> ParetoSet<T> {
    let mut members = Vec::new();
    'outer: for (i, p) in points.iter().enumerate() {
        for (j, q) in points.iter().enumerate() {
            if i == j {
                continue;
            }
            if dominates_unchecked(&q.f, &p.f) {
                continue 'outer;
            }
            if q.f == p.f && (q.eval_index, j) < (p.eval_index, i) {
                continue 'outer;
            }
        }
        members.push(p.clone());
    }
    ParetoSet { members }
}

/// Indices of the nondominated vectors among `points` (duplicates keep the
/// first), in ascending order. Points are visited in lexicographic order, so a
/// point only needs checking against the front kept so far; two objectives
/// reduce to a single sweep.
pub fn nondominated_indices<T: Scalar>(points: &[Vec<T>]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..points.len()).collect();
    order.sort_by(|&a, &b| {
        points[a]
            .iter()
            .zip(&points[b])
            .map(|(x, y)| x.partial_cmp(y).unwrap_or(std::cmp::Ordering::Equal))
            .find(|o| o.is_ne())
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.cmp(&b))
    });
    let mut kept: Vec<usize> = Vec::new();
    if points.first().is_some_and(|p| p.len() == 2) {
        let mut best = T::infinity();
        for i in order {
            if points[i][1] < best {
                best = points[i][1];
                kept.push(i);
            }
        }
    } else {
        for i in order {
            let p = &points[i];
            if !kept
                .iter()
                .any(|&k| dominates_unchecked(&points[k], p) || points[k] == *p)
            {
                kept.push(i);
            }
        }
    }
    kept.sort_unstable();
    kept
}

/// Nondominated reference set answering "is this point dominated" queries,
/// in logarithmic time for two objectives.
#[derive(Debug, Clone, PartialEq)]
pub struct Front<T> {
    /// Sorted by the first objective; the second then strictly decreases.
    points: Vec<Vec<T>>,
}

impl<T: Scalar> Front<T> {
    pub fn new(points: &[Vec<T>]) -> Self {
        let mut front: Vec<Vec<T>> = nondominated_indices(points)
            .into_iter()
            .map(|i| points[i].clone())
            .collect();
        front.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
        Self { points: front }
    }

    pub fn points(&self) -> &[Vec<T>] {
        &self.points
    }

    pub fn dominates(&self, p: &[T]) -> bool {
        if p.len() != 2 {
            return self.points.iter().any(|q| dominates_unchecked(q, p));
        }
        // the last point with q1 <= p1 has the smallest q2 among those
        let k = self.points.partition_point(|q| q[0] <= p[0]);
        k > 0 && dominates_unchecked(&self.points[k - 1], p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn sol(f: &[f64], eval: u64) -> Solution<f64> {
        Solution::new(vec![], f.to_vec(), 0.0, eval, 0)
    }

    #[test]
    fn dominance_examples() {
        assert!(dominates(&[0.0, 0.0], &[1.0, 1.0]).unwrap());
        assert!(!dominates(&[0.0, 1.0], &[0.0, 1.0]).unwrap());
        assert!(!dominates(&[0.0, 1.0], &[1.0, 0.0]).unwrap());
        assert!(dominates(&[0.0, 1.0], &[1.0]).is_err());
    }

    #[test]
    fn filter_examples() {
        let pts = vec![sol(&[0.0, 1.0], 1), sol(&[1.0, 0.0], 2), sol(&[1.0, 1.0], 3)];
        let set = nondominated_filter(&pts);
        assert_eq!(set.objectives(), vec![vec![0.0, 1.0], vec![1.0, 0.0]]);

        let single = nondominated_filter(&pts[..1]);
        assert_eq!(single.members(), &pts[..1]);

        assert!(nondominated_filter::<f64>(&[]).is_empty());
    }

    #[test]
    fn duplicates_keep_earliest_eval_index() {
        let pts = vec![sol(&[0.5, 0.5], 9), sol(&[0.5, 0.5], 4), sol(&[0.5, 0.5], 7)];
        let set = nondominated_filter(&pts);
        assert_eq!(set.len(), 1);
        assert_eq!(set.members()[0].eval_index, 4);
    }

    fn brute_force(points: &[Solution<f64>]) -> Vec<usize> {
        let mut keep = Vec::new();
        for i in 0..points.len() {
            let mut dominated = false;
            for j in 0..points.len() {
                let a = &points[j].f;
                let b = &points[i].f;
                let le = a.iter().zip(b).all(|(x, y)| x <= y);
                let lt = a.iter().zip(b).any(|(x, y)| x < y);
                if le && lt {
                    dominated = true;
                }
            }
            if !dominated {
                keep.push(i);
            }
        }
        keep
    }

    #[test]
    fn filter_matches_pairwise_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let pts: Vec<_> = (0..50)
                .map(|k| sol(&[rng.random::<f64>(), rng.random::<f64>()], k))
                .collect();
            let expected: Vec<_> = brute_force(&pts).into_iter().map(|i| pts[i].clone()).collect();
            assert_eq!(nondominated_filter(&pts).members(), &expected[..]);
        }
    }

    #[test]
    fn archive_prefers_feasible_and_stays_nondominated() {
        let mut uea = ParetoSet::new();
        let mut infeasible = sol(&[0.0, 0.0], 1);
        infeasible.v = 0.3;
        assert!(uea.insert(infeasible));
        assert!(uea.insert(sol(&[1.0, 1.0], 2)));
        assert_eq!(uea.len(), 1);
        assert!(uea.members()[0].is_feasible());
        assert!(uea.insert(sol(&[0.5, 2.0], 3)));
        assert!(!uea.insert(sol(&[1.0, 1.0], 4)));
        assert!(uea.insert(sol(&[0.5, 0.5], 5)));
        assert_eq!(uea.objectives(), vec![vec![0.5, 0.5]]);
    }

    fn small_front() -> impl Strategy<Value = Vec<Vec<f64>>> {
        prop::collection::vec(prop::collection::vec(0u8..6, 3), 1..25)
            .prop_map(|v| v.into_iter().map(|p| p.into_iter().map(f64::from).collect()).collect())
    }

    fn brute_indices(points: &[Vec<f64>]) -> Vec<usize> {
        (0..points.len())
            .filter(|&i| {
                points
                    .iter()
                    .enumerate()
                    .all(|(j, q)| j == i || !(dominates_unchecked(q, &points[i]) || (j < i && *q == points[i])))
            })
            .collect()
    }

    proptest! {
        #[test]
        fn indices_match_pairwise_oracle(
            m in 1usize..5,
            raw in prop::collection::vec(prop::collection::vec(0u8..6, 4), 0..40),
        ) {
            let points: Vec<Vec<f64>> = raw.iter().map(|p| p[..m].iter().map(|&v| v as f64).collect()).collect();
            prop_assert_eq!(nondominated_indices(&points), brute_indices(&points));
        }

        #[test]
        fn front_queries_match_linear_scan(
            m in 2usize..4,
            raw in prop::collection::vec(prop::collection::vec(0u8..8, 3), 0..40),
            probe in prop::collection::vec(prop::collection::vec(0u8..8, 3), 1..20),
        ) {
            let cut = |v: &Vec<u8>| v[..m].iter().map(|&x| x as f64).collect::<Vec<f64>>();
            let points: Vec<Vec<f64>> = raw.iter().map(cut).collect();
            let front = Front::new(&points);
            for p in probe.iter().map(cut) {
                prop_assert_eq!(front.dominates(&p), points.iter().any(|q| dominates_unchecked(q, &p)));
            }
        }

        #[test]
        fn dominance_irreflexive_and_transitive(pts in small_front()) {
            for a in &pts {
                prop_assert!(!dominates(a, a).unwrap());
                for b in &pts {
                    for c in &pts {
                        if dominates(a, b).unwrap() && dominates(b, c).unwrap() {
                            prop_assert!(dominates(a, c).unwrap());
                        }
                    }
                }
            }
        }

        #[test]
        fn filter_idempotent_and_covering(pts in small_front()) {
            let sols: Vec<_> = pts.iter().enumerate().map(|(i, f)| sol(f, i as u64)).collect();
            let once = nondominated_filter(&sols);
            let twice = nondominated_filter(once.members());
            prop_assert_eq!(&once, &twice);
            for s in &sols {
                if !once.members().contains(s) {
                    prop_assert!(once.iter().any(|k| dominates(&k.f, &s.f).unwrap() || k.f == s.f));
                }
            }
        }

        #[test]
        fn archive_mutually_nondominated(pts in small_front(), viol in prop::collection::vec(0u8..3, 25)) {
            let mut uea = ParetoSet::new();
            for (i, f) in pts.iter().enumerate() {
                let mut s = sol(f, i as u64);
                s.v = f64::from(viol[i]) * 0.5;
                uea.insert(s);
            }
            for a in uea.iter() {
                for b in uea.iter() {
                    prop_assert!(!constrained_dominates(a, b));
                }
            }
        }
    }
}
