//! Performance metrics: hypervolume, anytime HV, population variance and
//! Pareto-front membership counts.

use std::collections::HashSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{check_len, Error, Result};
use crate::problems::{pf_distance, Problem, ScalingBounds};
use crate::runlog::{RunLog, RunLogRecord};
use crate::scalar::Scalar;
use crate::solution::{nondominated_indices, ParetoSet, Solution};

/// Per-objective reference coordinate in scaled space.
pub const REFERENCE_COORD: f64 = 1.1;
pub const MC_SAMPLES: usize = 1_000_000;
pub const MC_SEED: u64 = 0x5eed_0f4f;
pub const CHECKPOINT_STEP: u64 = 1000;
/// Distance to the analytic front, in scaled space, under which a point counts as optimal.
pub const PF_EPSILON: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HvEstimate<T> {
    pub value: T,
    /// Zero for exact computations.
    pub std_error: T,
}

impl<T: Scalar> HvEstimate<T> {
    fn exact(value: T) -> Self {
        Self {
            value,
            std_error: T::zero(),
        }
    }
}

pub fn reference_point<T: Scalar>(m: usize) -> Vec<T> {
    vec![T::lit(REFERENCE_COORD); m]
}

fn clip_to_reference<T: Scalar>(front: &[Vec<T>], reference: &[T]) -> Result<Vec<Vec<T>>> {
    for p in front {
        check_len(reference.len(), p.len())?;
    }
    let inside: Vec<Vec<T>> = front
        .iter()
        .filter(|p| p.iter().zip(reference).all(|(a, r)| a < r))
        .cloned()
        .collect();
    let keep = nondominated_indices(&inside);
    Ok(keep.into_iter().map(|i| inside[i].clone()).collect())
}

fn hv2<T: Scalar>(mut pts: Vec<[T; 2]>, r: [T; 2]) -> T {
    pts.sort_by(|a, b| a[0].partial_cmp(&b[0]).unwrap().then(a[1].partial_cmp(&b[1]).unwrap()));
    let mut area = T::zero();
    let mut ceiling = r[1];
    for p in pts {
        if p[1] < ceiling {
            area += (r[0] - p[0]) * (ceiling - p[1]);
            ceiling = p[1];
        }
    }
    area
}

fn exact_rec<T: Scalar>(pts: &[Vec<T>], r: &[T]) -> T {
    let m = r.len();
    if pts.is_empty() {
        return T::zero();
    }
    if m == 1 {
        return r[0] - pts.iter().map(|p| p[0]).fold(T::infinity(), T::min);
    }
    if m == 2 {
        return hv2(pts.iter().map(|p| [p[0], p[1]]).collect(), [r[0], r[1]]);
    }
    // slice along the last objective
    let last = m - 1;
    let mut order: Vec<&Vec<T>> = pts.iter().collect();
    order.sort_by(|a, b| a[last].partial_cmp(&b[last]).unwrap());
    let mut volume = T::zero();
    let mut active: Vec<Vec<T>> = Vec::with_capacity(order.len());
    for (k, p) in order.iter().enumerate() {
        active.push(p[..last].to_vec());
        let top = order.get(k + 1).map_or(r[last], |q| q[last]);
        let depth = top - p[last];
        if depth > T::zero() {
            volume += exact_rec(&active, &r[..last]) * depth;
        }
    }
    volume
}

/// Exact hypervolume dominated by `front` and bounded by `reference`, any `m`.
/// Points not strictly better than the reference in every objective are dropped.
pub fn hypervolume_exact<T: Scalar>(front: &[Vec<T>], reference: &[T]) -> Result<T> {
    let pts = clip_to_reference(front, reference)?;
    Ok(exact_rec(&pts, reference))
}

/// Monte Carlo hypervolume with uniform samples in the box spanned by the
/// front's componentwise minimum and the reference point.
pub fn hypervolume_mc<T: Scalar, R: Rng + ?Sized>(
    front: &[Vec<T>],
    reference: &[T],
    samples: usize,
    rng: &mut R,
) -> Result<HvEstimate<T>> {
    let pts = clip_to_reference(front, reference)?;
    if pts.is_empty() || samples == 0 {
        return Ok(HvEstimate::exact(T::zero()));
    }
    let m = reference.len();
    let lower: Vec<f64> = (0..m)
        .map(|j| pts.iter().map(|p| p[j].to_f64_lossy()).fold(f64::INFINITY, f64::min))
        .collect();
    let upper: Vec<f64> = reference.iter().map(|r| r.to_f64_lossy()).collect();
    let pts64: Vec<Vec<f64>> = pts
        .iter()
        .map(|p| p.iter().map(|v| v.to_f64_lossy()).collect())
        .collect();
    let box_volume: f64 = lower.iter().zip(&upper).map(|(l, u)| u - l).product();
    let mut s = vec![0.0; m];
    let mut hits = 0usize;
    for _ in 0..samples {
        for j in 0..m {
            s[j] = lower[j] + rng.random::<f64>() * (upper[j] - lower[j]);
        }
        if pts64.iter().any(|p| p.iter().zip(&s).all(|(a, b)| a <= b)) {
            hits += 1;
        }
    }
    let frac = hits as f64 / samples as f64;
    let se = box_volume * (frac * (1.0 - frac) / samples as f64).sqrt();
    Ok(HvEstimate {
        value: T::lit(box_volume * frac),
        std_error: T::lit(se),
    })
}

/// Hypervolume of a scaled front: exact for two and three objectives, Monte
/// Carlo with [`MC_SAMPLES`] deterministic samples beyond. An empty front has volume 0.
pub fn hypervolume<T: Scalar>(front: &[Vec<T>], reference: &[T]) -> Result<HvEstimate<T>> {
    if reference.len() <= 3 {
        hypervolume_exact(front, reference).map(HvEstimate::exact)
    } else {
        hypervolume_mc(front, reference, MC_SAMPLES, &mut ChaCha8Rng::seed_from_u64(MC_SEED))
    }
}

/// `hv / 1.1^m`, the fraction of the largest attainable volume.
pub fn hv_ratio<T: Scalar>(hv: T, m: usize) -> T {
    hv / T::lit(REFERENCE_COORD).powi(m as i32)
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnytimeCurve<T> {
    pub checkpoints: Vec<(u64, T)>,
    /// Sum of the checkpoint volumes.
    pub auc: T,
}

/// Replays the archive records of a log into the archive they describe.
pub fn archive_from_log<T: Scalar>(log: &RunLog<T>) -> ParetoSet<T> {
    // every logged insertion was undominated by the archive of its time, and that
    // archive covers all earlier insertions, so the replay keeps exactly the
    // constrained-nondominated records
    let records: Vec<&RunLogRecord<T>> = log.archive_records().collect();
    let feasible = records.iter().any(|r| r.feasible);
    let least_v = records.iter().map(|r| r.v).fold(T::infinity(), |a, b| a.min(b));
    let pool: Vec<&RunLogRecord<T>> = records
        .into_iter()
        .filter(|r| if feasible { r.feasible } else { r.v == least_v })
        .collect();
    let f: Vec<Vec<T>> = pool.iter().map(|r| r.f.clone()).collect();
    ParetoSet::from_members(
        nondominated_indices(&f)
            .into_iter()
            .map(|i| {
                let r = pool[i];
                Solution::new(r.x.clone(), r.f.clone(), r.v, r.eval_index, r.run_id)
            })
            .collect(),
    )
}

/// Population records of the last logged generation.
pub fn last_snapshot<T: Scalar>(log: &RunLog<T>) -> Vec<&RunLogRecord<T>> {
    let Some(last) = log.population_records().map(|r| r.generation).max() else {
        return Vec::new();
    };
    log.population_records().filter(|r| r.generation == last).collect()
}

/// Feasible objective vectors of the log's archive that are nondominated among themselves.
pub fn final_archive_front<T: Scalar>(log: &RunLog<T>) -> Vec<Vec<T>> {
    let feasible: Vec<Vec<T>> = log
        .archive_records()
        .filter(|r| r.feasible)
        .map(|r| r.f.clone())
        .collect();
    nondominated_indices(&feasible)
        .into_iter()
        .map(|i| feasible[i].clone())
        .collect()
}

/// Scaling bounds of the final archive front; empty when nothing feasible was found.
pub fn final_bounds<T: Scalar>(log: &RunLog<T>, m: usize) -> ScalingBounds<T> {
    let front = final_archive_front(log);
    ScalingBounds::from_points(m, front.iter().map(Vec::as_slice))
}

/// Archive hypervolume at every `step` evaluations up to `budget`, all
/// checkpoints scaled with the same `bounds` so the curve is comparable along
/// its length. Only feasible archive records contribute.
pub fn anytime_hv<T: Scalar>(
    log: &RunLog<T>,
    reference: &[T],
    bounds: &ScalingBounds<T>,
    budget: u64,
    step: u64,
) -> Result<AnytimeCurve<T>> {
    if step == 0 {
        return Err(Error::usage("checkpoint step must be positive"));
    }
    let mut records: Vec<(u64, Vec<T>)> = log
        .archive_records()
        .filter(|r| r.feasible)
        .map(|r| (r.eval_index, bounds.scale(&r.f)))
        .collect();
    records.sort_by_key(|r| r.0);

    let mut front: Vec<Vec<T>> = Vec::new();
    let mut next = 0;
    let mut checkpoints = Vec::new();
    let mut e = step;
    while e <= budget {
        let before = next;
        while next < records.len() && records[next].0 <= e {
            front.push(records[next].1.clone());
            next += 1;
        }
        let hv = match checkpoints.last() {
            Some(&(_, prev)) if next == before => prev,
            _ => {
                front = nondominated_indices(&front)
                    .into_iter()
                    .map(|i| front[i].clone())
                    .collect();
                hypervolume(&front, reference)?.value
            }
        };
        checkpoints.push((e, hv));
        e += step;
    }
    let auc = checkpoints.iter().map(|c| c.1).sum();
    Ok(AnytimeCurve { checkpoints, auc })
}

/// Mean over dimensions of the per-dimension sample variance of
/// bound-normalised decision variables. Fewer than two solutions give 0.
pub fn population_variance<T: Scalar>(xs: &[Vec<T>], bounds: &[(T, T)]) -> Result<T> {
    if xs.len() < 2 || bounds.is_empty() {
        return Ok(T::zero());
    }
    for x in xs {
        check_len(bounds.len(), x.len())?;
    }
    let n = T::from_usize_lossy(xs.len());
    let mut total = T::zero();
    for (j, &(lo, hi)) in bounds.iter().enumerate() {
        let range = hi - lo;
        let vals: Vec<T> = xs.iter().map(|x| (x[j] - lo) / range).collect();
        let mean = vals.iter().copied().sum::<T>() / n;
        total += vals.iter().map(|&v| (v - mean) * (v - mean)).sum::<T>() / (n - T::one());
    }
    Ok(total / T::from_usize_lossy(bounds.len()))
}

/// Archive members on the Pareto front. With an analytic front: feasible members
/// within [`PF_EPSILON`] of it. Otherwise: feasible members not dominated by any
/// point of `pool`, the union of all compared archives.
pub fn count_pf<T: Scalar>(archive: &ParetoSet<T>, problem: &dyn Problem<T>, pool: Option<&[Vec<T>]>) -> Result<usize> {
    let eps = T::lit(PF_EPSILON);
    if problem.pareto_front_point(T::zero()).is_some() {
        return Ok(archive
            .iter()
            .filter(|s| s.is_feasible())
            .filter(|s| pf_distance(problem, &s.f).is_some_and(|d| d <= eps))
            .count());
    }
    let pool = pool.ok_or_else(|| {
        Error::usage(format!(
            "{} has no analytic front; a pooled reference set is required",
            problem.spec().name
        ))
    })?;
    // the archive joins the pool, so survivors are exactly the members on the joint front
    let mut joint: Vec<Vec<T>> = pool.to_vec();
    joint.extend(archive.iter().filter(|s| s.is_feasible()).map(|s| s.f.clone()));
    let front: HashSet<Vec<u64>> = nondominated_indices(&joint)
        .into_iter()
        .map(|i| bit_key(&joint[i]))
        .collect();
    Ok(archive
        .iter()
        .filter(|s| s.is_feasible() && front.contains(&bit_key(&s.f)))
        .count())
}

pub(crate) fn bit_key<T: Scalar>(f: &[T]) -> Vec<u64> {
    f.iter().map(|v| v.to_f64_lossy().to_bits()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::{pf_sample, Tanaka, Zdt1};
    use crate::runlog::{RunLogRecord, ARCHIVE_SENTINEL};
    use crate::solution::Solution;
    use proptest::prelude::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn hv_examples() {
        let r2 = reference_point::<f64>(2);
        let r3 = reference_point::<f64>(3);
        assert!(close(hypervolume(&[vec![0.0, 0.0]], &r2).unwrap().value, 1.21, 1e-12));
        assert!(close(
            hypervolume(&[vec![0.0, 0.0, 0.0]], &r3).unwrap().value,
            1.331,
            1e-12
        ));
        let front = [vec![0.0, 1.0], vec![0.5, 0.5], vec![1.0, 0.0]];
        // 1.1*0.1 + 0.6*0.5 + 0.1*0.5
        assert!(close(hypervolume(&front, &r2).unwrap().value, 0.46, 1e-12));
        assert_eq!(hypervolume::<f64>(&[], &r2).unwrap().value, 0.0);
        // points beyond the reference contribute nothing
        assert_eq!(hypervolume(&[vec![1.2, 0.0]], &r2).unwrap().value, 0.0);
        assert_eq!(hypervolume(&[vec![1.1, 0.0]], &r2).unwrap().value, 0.0);
        assert!(hypervolume(&[vec![0.0]], &r2).is_err());
    }

    #[test]
    fn hv_f32() {
        let v = hypervolume(&[vec![0.0f32, 0.0]], &reference_point::<f32>(2))
            .unwrap()
            .value;
        assert!((v - 1.21).abs() < 1e-6);
    }

    #[test]
    fn four_objectives_use_monte_carlo() {
        let r4 = reference_point::<f64>(4);
        let pts = vec![vec![0.2, 0.3, 0.5, 0.1], vec![0.6, 0.1, 0.2, 0.4]];
        let exact = hypervolume_exact(&pts, &r4).unwrap();
        let mc = hypervolume(&pts, &r4).unwrap();
        assert!(mc.std_error > 0.0);
        assert!((mc.value - exact).abs() <= 3.0 * mc.std_error);
        // inclusion-exclusion oracle for two boxes
        let vol = |p: &[f64]| p.iter().map(|a| 1.1 - a).product::<f64>();
        let meet: Vec<f64> = pts[0].iter().zip(&pts[1]).map(|(a, b)| a.max(*b)).collect();
        assert!(close(exact, vol(&pts[0]) + vol(&pts[1]) - vol(&meet), 1e-12));
    }

    #[test]
    fn exact_matches_grid_oracle_3d() {
        // count lattice cells covered by the union of boxes
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..10 {
            let pts: Vec<Vec<f64>> = (0..6)
                .map(|_| (0..3).map(|_| rng.random_range(0..10) as f64 / 10.0).collect())
                .collect();
            let mut cells = 0;
            for a in 0..11 {
                for b in 0..11 {
                    for c in 0..11 {
                        let centre = [a as f64 / 10.0 + 0.05, b as f64 / 10.0 + 0.05, c as f64 / 10.0 + 0.05];
                        if pts.iter().any(|p| p.iter().zip(&centre).all(|(x, y)| x <= y)) {
                            cells += 1;
                        }
                    }
                }
            }
            let hv = hypervolume(&pts, &reference_point(3)).unwrap().value;
            assert!(close(hv, cells as f64 * 1e-3, 1e-9), "{hv} vs {cells}");
        }
    }

    #[test]
    fn ratio_examples() {
        assert!(close(hv_ratio(1.21, 2), 1.0, 1e-15));
        assert_eq!(hv_ratio(0.0, 3), 0.0);
        assert!(close(hv_ratio(0.605, 2), 0.5, 1e-15));
        assert!(close(hv_ratio(1.331, 3), 1.0, 1e-15));
    }

    fn archive_record(eval: u64, f: Vec<f64>, feasible: bool) -> RunLogRecord<f64> {
        RunLogRecord {
            run_id: 0,
            generation: eval / 100,
            eval_index: eval,
            subproblem_id: ARCHIVE_SENTINEL,
            x: vec![0.0],
            f,
            v: if feasible { 0.0 } else { 1.0 },
            feasible,
        }
    }

    #[test]
    fn anytime_single_point() {
        let mut log = RunLog::new();
        log.records.push(archive_record(1500, vec![0.5, 0.5], true));
        let bounds = ScalingBounds {
            lower: vec![0.0, 0.0],
            upper: vec![1.0, 1.0],
        };
        let c = anytime_hv(&log, &reference_point(2), &bounds, 4000, CHECKPOINT_STEP).unwrap();
        let e: Vec<u64> = c.checkpoints.iter().map(|c| c.0).collect();
        assert_eq!(e, vec![1000, 2000, 3000, 4000]);
        assert_eq!(c.checkpoints[0].1, 0.0);
        assert!(c.checkpoints[1..].iter().all(|c| close(c.1, 0.36, 1e-12)));
        assert!(close(c.auc, 1.08, 1e-12));
        assert!(anytime_hv(&log, &reference_point(2), &bounds, 4000, 0).is_err());
    }

    #[test]
    fn anytime_ignores_infeasible_and_population_records() {
        let mut log = RunLog::new();
        log.records.push(archive_record(10, vec![0.0, 0.0], false));
        let mut pop = archive_record(20, vec![0.0, 0.0], true);
        pop.subproblem_id = 3;
        log.records.push(pop);
        let bounds = ScalingBounds {
            lower: vec![0.0, 0.0],
            upper: vec![1.0, 1.0],
        };
        let c = anytime_hv(&log, &reference_point(2), &bounds, 2000, 1000).unwrap();
        assert!(c.checkpoints.iter().all(|c| c.1 == 0.0));
    }

    #[test]
    fn final_front_scaling() {
        let mut log = RunLog::new();
        log.records.push(archive_record(1, vec![4.0, 9.0], true));
        log.records.push(archive_record(2, vec![2.0, 3.0], true));
        log.records.push(archive_record(3, vec![3.0, 2.0], true));
        log.records.push(archive_record(4, vec![0.0, 0.0], false));
        let b = final_bounds(&log, 2);
        assert_eq!(b.lower, vec![2.0, 2.0]);
        assert_eq!(b.upper, vec![3.0, 3.0]);
    }

    #[test]
    fn archive_replay_matches_engine() {
        let p = Zdt1::<f64>::new(6);
        let c = crate::config::AlgoConfig {
            budget: 2000,
            ..crate::config::AlgoConfig::auto_moead()
        };
        let out = crate::engine::run(&c, &p, &crate::engine::RunOptions::default()).unwrap();
        let key = |a: &ParetoSet<f64>| {
            a.iter()
                .map(|s| (s.eval_index, s.f.clone(), s.x.clone()))
                .collect::<Vec<_>>()
        };
        assert_eq!(key(&archive_from_log(&out.log)), key(&out.archive));
        let last = last_snapshot(&out.log);
        assert!(!last.is_empty());
        assert!(last.iter().all(|r| r.generation == out.stats.generations));
    }

    #[test]
    fn variance_examples() {
        let b = vec![(0.0, 1.0); 3];
        assert_eq!(population_variance(&[vec![0.3; 3], vec![0.3; 3]], &b).unwrap(), 0.0);
        assert!(close(
            population_variance(&[vec![0.0; 3], vec![1.0; 3]], &b).unwrap(),
            0.5,
            1e-15
        ));
        assert_eq!(population_variance(&[vec![0.0; 3]], &b).unwrap(), 0.0);
        // bounds normalisation
        let wide = vec![(-2.0, 2.0); 2];
        assert!(close(
            population_variance(&[vec![-2.0, -2.0], vec![2.0, 2.0]], &wide).unwrap(),
            0.5,
            1e-15
        ));
        // sample variance oracle
        let xs = vec![vec![0.1, 0.9], vec![0.4, 0.2], vec![0.7, 0.6]];
        let var = |v: [f64; 3]| {
            let m = v.iter().sum::<f64>() / 3.0;
            v.iter().map(|a| (a - m).powi(2)).sum::<f64>() / 2.0
        };
        let want = (var([0.1, 0.4, 0.7]) + var([0.9, 0.2, 0.6])) / 2.0;
        assert!(close(population_variance(&xs, &b[..2]).unwrap(), want, 1e-15));
    }

    fn solution(f: Vec<f64>, v: f64) -> Solution<f64> {
        Solution::new(vec![0.0], f, v, 0, 0)
    }

    #[test]
    fn count_pf_with_oracle() {
        let p = Zdt1::<f64>::new(30);
        let mut on = ParetoSet::new();
        for f in pf_sample(&p, 50).unwrap() {
            on.insert(solution(f, 0.0));
        }
        assert_eq!(count_pf(&on, &p, None).unwrap(), on.len());

        let mut off = ParetoSet::new();
        for i in 0..20 {
            let f1 = i as f64 / 19.0;
            off.insert(solution(vec![f1, 1.0 - f1.sqrt() + 0.1], 0.0));
        }
        assert_eq!(count_pf(&off, &p, None).unwrap(), 0);
    }

    #[test]
    fn count_pf_with_pool() {
        let p = Tanaka::<f64>::default();
        let mut a = ParetoSet::new();
        a.insert(solution(vec![1.0, 1.0], 0.0));
        a.insert(solution(vec![0.5, 2.0], 0.0));
        assert!(count_pf(&a, &p, None).is_err());
        let pool = vec![vec![0.9, 0.9], vec![0.5, 2.0]];
        assert_eq!(count_pf(&a, &p, Some(&pool)).unwrap(), 1);
        let dominating = vec![vec![0.1, 0.1]];
        assert_eq!(count_pf(&a, &p, Some(&dominating)).unwrap(), 0);
    }

    fn front_strategy(m: usize) -> impl Strategy<Value = Vec<Vec<f64>>> {
        prop::collection::vec(prop::collection::vec(0.0..1.0f64, m), 1..20)
    }

    proptest! {
        #[test]
        fn adding_points_never_decreases_hv(front in front_strategy(2), extra in prop::collection::vec(0.0..1.2f64, 2)) {
            let r = reference_point(2);
            let base = hypervolume(&front, &r).unwrap().value;
            let mut more = front.clone();
            more.push(extra);
            prop_assert!(hypervolume(&more, &r).unwrap().value >= base - 1e-15);
        }

        #[test]
        fn dominated_points_do_not_matter(front in front_strategy(3)) {
            let r = reference_point(3);
            let keep: Vec<Vec<f64>> = nondominated_indices(&front).into_iter().map(|i| front[i].clone()).collect();
            let a = hypervolume(&front, &r).unwrap().value;
            let b = hypervolume(&keep, &r).unwrap().value;
            prop_assert!((a - b).abs() < 1e-12);
        }

        #[test]
        fn ratio_in_unit_interval(front in front_strategy(3)) {
            let ratio = hv_ratio(hypervolume(&front, &reference_point(3)).unwrap().value, 3);
            prop_assert!((0.0..=1.0).contains(&ratio));
        }

        #[test]
        fn variance_permutation_invariant(xs in prop::collection::vec(prop::collection::vec(0.0..1.0f64, 4), 2..10)) {
            let b = vec![(0.0, 1.0); 4];
            let permuted: Vec<Vec<f64>> = xs.iter().map(|x| vec![x[2], x[0], x[3], x[1]]).collect();
            let a = population_variance(&xs, &b).unwrap();
            let c = population_variance(&permuted, &b).unwrap();
            prop_assert!((a - c).abs() < 1e-12);
        }
    }
}
