//! Weight vectors on the unit simplex and the neighbourhood structure between them.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Decomposition vectors with their `T`-nearest neighbourhoods.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightSet<T> {
    pub vectors: Vec<Vec<T>>,
    pub neighborhoods: Vec<Vec<usize>>,
}

impl<T: Scalar> WeightSet<T> {
    pub fn new(vectors: Vec<Vec<T>>, t: usize) -> Result<Self> {
        let neighborhoods = neighborhoods(&vectors, t)?;
        Ok(Self { vectors, neighborhoods })
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }
}

fn binomial(n: u64, k: u64) -> u128 {
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * u128::from(n - i) / u128::from(i + 1))
}

/// Number of simplex-lattice points for `m` objectives and lattice parameter `h`.
pub fn sld_count(m: usize, h: usize) -> u128 {
    binomial((h + m - 1) as u64, (m - 1) as u64)
}

/// Every vector `(k_1/h, ..., k_m/h)` with `sum k_i = h`, in lexicographic order of `k`.
pub fn gen_sld<T: Scalar>(m: usize, h: usize) -> Vec<Vec<T>> {
    assert!(m >= 2 && h >= 1, "simplex lattice needs m >= 2 and h >= 1");
    let mut out = Vec::with_capacity(sld_count(m, h) as usize);
    let mut ks = vec![0usize; m];
    lattice(0, h, &mut ks, &mut out, T::from_usize_lossy(h));
    out
}

fn lattice<T: Scalar>(pos: usize, left: usize, ks: &mut [usize], out: &mut Vec<Vec<T>>, h: T) {
    if pos == ks.len() - 1 {
        ks[pos] = left;
        out.push(ks.iter().map(|&k| T::from_usize_lossy(k) / h).collect());
        return;
    }
    for k in 0..=left {
        ks[pos] = k;
        lattice(pos + 1, left - k, ks, out, h);
    }
}

/// Smallest lattice with at least `n` points, truncated to its first `n`
/// vectors. Returns the vectors and the lattice parameter used.
pub fn sld_for_size<T: Scalar>(m: usize, n: usize) -> (Vec<Vec<T>>, usize) {
    let mut h = 1;
    while sld_count(m, h) < n as u128 {
        h += 1;
    }
    let mut v = gen_sld(m, h);
    v.truncate(n);
    (v, h)
}

/// Joe and Kuo (new-joe-kuo-6.21201) parameters `(s, a, m_1..m_s)` for
/// dimensions 2 to 4; dimension 1 is van der Corput.
const JOE_KUO: [(u32, u32, &[u32]); 3] = [(1, 0, &[1]), (2, 1, &[1, 3]), (3, 1, &[1, 3, 1])];

/// Gray-code Sobol generator over 32-bit integers, up to four dimensions.
#[derive(Debug, Clone)]
pub struct Sobol {
    directions: Vec<[u32; 32]>,
    state: Vec<u32>,
    index: u32,
}

impl Sobol {
    pub const MAX_DIMS: usize = 4;

    pub fn new(dims: usize) -> Self {
        assert!((1..=Self::MAX_DIMS).contains(&dims), "Sobol supports 1..=4 dimensions");
        let mut directions = Vec::with_capacity(dims);
        let mut vdc = [0u32; 32];
        for (i, v) in vdc.iter_mut().enumerate() {
            *v = 1 << (31 - i);
        }
        directions.push(vdc);
        for &(s, a, m) in JOE_KUO.iter().take(dims - 1) {
            let s = s as usize;
            let mut v = [0u32; 32];
            for i in 0..s {
                v[i] = m[i] << (31 - i);
            }
            for i in s..32 {
                v[i] = v[i - s] ^ (v[i - s] >> s);
                for k in 1..s {
                    if (a >> (s - 1 - k)) & 1 == 1 {
                        v[i] ^= v[i - k];
                    }
                }
            }
            directions.push(v);
        }
        Self {
            directions,
            state: vec![0; dims],
            index: 0,
        }
    }

    /// Next point as raw 32-bit fractions. The first point is the origin.
    pub fn next_raw(&mut self) -> Vec<u32> {
        let out = self.state.clone();
        let c = self.index.trailing_ones() as usize;
        for (x, dir) in self.state.iter_mut().zip(&self.directions) {
            *x ^= dir[c.min(31)];
        }
        self.index = self.index.wrapping_add(1);
        out
    }
}

/// Maps a point of `[0,1)^{m-1}` onto the unit simplex through the inverse
/// conditional distribution of the uniform simplex. The map is injective in
/// the first coordinate, so distinct sequence points stay distinct.
pub fn unit_cube_to_simplex<T: Scalar>(u: &[T]) -> Vec<T> {
    let m = u.len() + 1;
    let mut rest = T::one();
    let mut w = Vec::with_capacity(m);
    for (k, &uk) in u.iter().enumerate() {
        let remaining_dims = T::from_usize_lossy(m - 1 - k);
        let xk = rest * (T::one() - uk.powf(T::one() / remaining_dims));
        w.push(xk);
        rest -= xk;
    }
    w.push(rest.max(T::zero()));
    w
}

/// First `n` points of an `(m-1)`-dimensional Sobol sequence, digitally shifted
/// by a seed-derived XOR mask and mapped onto the simplex.
pub fn gen_sobol<T: Scalar>(m: usize, n: usize, seed: u64) -> Vec<Vec<T>> {
    assert!(
        (2..=Sobol::MAX_DIMS + 1).contains(&m),
        "Sobol weights support 2..=5 objectives"
    );
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let shift: Vec<u32> = (0..m - 1).map(|_| rng.random()).collect();
    let mut sobol = Sobol::new(m - 1);
    let scale = T::lit(2f64.powi(-32));
    (0..n)
        .map(|_| {
            let u: Vec<T> = sobol
                .next_raw()
                .iter()
                .zip(&shift)
                .map(|(&x, &s)| T::from_u32(x ^ s).expect("u32 fits") * scale)
                .collect();
            unit_cube_to_simplex(&u)
        })
        .collect()
}

/// For every vector, the indices of its `t` nearest vectors (Euclidean),
/// itself included; ties go to the lower index.
pub fn neighborhoods<T: Scalar>(vectors: &[Vec<T>], t: usize) -> Result<Vec<Vec<usize>>> {
    if t == 0 || t > vectors.len() {
        return Err(Error::usage(format!(
            "neighbourhood size {t} must be in 1..={}",
            vectors.len()
        )));
    }
    let n = vectors.len();
    let mut dist = vec![T::zero(); n * n];
    for i in 0..n {
        for j in i + 1..n {
            let d: T = vectors[i]
                .iter()
                .zip(&vectors[j])
                .map(|(&a, &b)| (a - b) * (a - b))
                .sum();
            dist[i * n + j] = d;
            dist[j * n + i] = d;
        }
    }
    Ok((0..n)
        .map(|i| {
            let mut idx: Vec<usize> = (0..n).collect();
            idx.sort_by(|&a, &b| {
                dist[i * n + a]
                    .partial_cmp(&dist[i * n + b])
                    .expect("finite distances")
                    .then(a.cmp(&b))
            });
            idx.truncate(t);
            idx
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sums_to_one(v: &[Vec<f64>]) -> bool {
        v.iter()
            .all(|w| (w.iter().sum::<f64>() - 1.0).abs() <= 1e-12 && w.iter().all(|&x| x >= 0.0))
    }

    fn brute_lattice(m: usize, h: usize) -> usize {
        // enumerate all of {0..h}^m and count those summing to h
        let mut count = 0;
        let total = (h + 1).pow(m as u32);
        for code in 0..total {
            let mut c = code;
            let mut s = 0;
            for _ in 0..m {
                s += c % (h + 1);
                c /= h + 1;
            }
            if s == h {
                count += 1;
            }
        }
        count
    }

    #[test]
    fn sld_examples() {
        let v: Vec<Vec<f64>> = gen_sld(2, 4);
        assert_eq!(
            v,
            vec![
                vec![0.0, 1.0],
                vec![0.25, 0.75],
                vec![0.5, 0.5],
                vec![0.75, 0.25],
                vec![1.0, 0.0]
            ]
        );
        assert_eq!(gen_sld::<f64>(3, 2).len(), 6);
        assert_eq!(brute_lattice(3, 2), 6);
        for (m, h) in [(2, 7), (3, 5), (4, 3), (5, 2)] {
            assert_eq!(gen_sld::<f64>(m, h).len(), brute_lattice(m, h));
            assert_eq!(sld_count(m, h) as usize, brute_lattice(m, h));
        }
        let (w, h) = sld_for_size::<f64>(2, 100);
        assert_eq!((w.len(), h), (100, 99));
        let (w, h) = sld_for_size::<f64>(3, 100);
        assert_eq!((w.len(), h), (100, 13));
        assert!(sums_to_one(&w));
    }

    #[test]
    fn sld_vectors_distinct() {
        let v: Vec<Vec<f64>> = gen_sld(3, 12);
        for i in 0..v.len() {
            for j in i + 1..v.len() {
                assert_ne!(v[i], v[j]);
            }
        }
    }

    #[test]
    fn sobol_first_points_match_published_table() {
        let mut s = Sobol::new(3);
        let to_f = |p: Vec<u32>| p.into_iter().map(|x| x as f64 / 2f64.powi(32)).collect::<Vec<_>>();
        assert_eq!(to_f(s.next_raw()), vec![0.0, 0.0, 0.0]);
        assert_eq!(to_f(s.next_raw()), vec![0.5, 0.5, 0.5]);
        // Gray-code order visits the same set as the natural order
        let mut next_two = vec![to_f(s.next_raw()), to_f(s.next_raw())];
        next_two.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert_eq!(next_two, vec![vec![0.25, 0.75, 0.75], vec![0.75, 0.25, 0.25]]);
    }

    #[test]
    fn sobol_weights_on_simplex_and_deterministic() {
        for m in 2..=5 {
            let w: Vec<Vec<f64>> = gen_sobol(m, 257, 7);
            assert!(sums_to_one(&w));
            assert_eq!(w, gen_sobol::<f64>(m, 257, 7));
        }
        assert_eq!(gen_sobol::<f64>(3, 1, 1), gen_sobol::<f64>(3, 1, 1));
        assert_eq!(gen_sobol::<f64>(3, 1, 1)[0], gen_sobol::<f64>(3, 10, 1)[0]);
    }

    #[test]
    fn sobol_weights_distinct() {
        let mut w: Vec<Vec<f64>> = gen_sobol(3, 1 << 16, 3);
        w.sort_by(|a, b| a.partial_cmp(b).unwrap());
        w.dedup();
        assert_eq!(w.len(), 1 << 16);
    }

    fn star_discrepancy(mut xs: Vec<f64>) -> f64 {
        xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let n = xs.len() as f64;
        xs.iter()
            .enumerate()
            .map(|(i, &x)| ((i as f64 + 1.0) / n - x).max(x - i as f64 / n))
            .fold(0.0, f64::max)
    }

    #[test]
    fn sobol_beats_random_discrepancy() {
        for seed in 0..5 {
            let w: Vec<Vec<f64>> = gen_sobol(2, 1000, seed);
            let sobol = star_discrepancy(w.iter().map(|v| v[0]).collect());
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let random = star_discrepancy((0..1000).map(|_| rng.random::<f64>()).collect());
            assert!(sobol < random, "seed {seed}: {sobol} vs {random}");
        }
    }

    #[test]
    fn neighborhood_examples() {
        let v: Vec<Vec<f64>> = gen_sld(2, 4);
        let nb = neighborhoods(&v, 2).unwrap();
        assert_eq!(nb[0], vec![0, 1]);
        // middle vector: 1 and 3 tie, lower index first
        assert_eq!(nb[2], vec![2, 1]);
        let full = neighborhoods(&v, 5).unwrap();
        assert!(full.iter().all(|n| {
            let mut s = n.clone();
            s.sort();
            s == vec![0, 1, 2, 3, 4]
        }));
        let own = neighborhoods(&v, 1).unwrap();
        assert!(own.iter().enumerate().all(|(i, n)| n == &vec![i]));
        assert!(neighborhoods(&v, 6).is_err());
        assert!(neighborhoods(&v, 0).is_err());
    }

    #[test]
    fn neighborhoods_match_brute_force() {
        let v: Vec<Vec<f64>> = gen_sobol(3, 40, 9);
        let nb = neighborhoods(&v, 7).unwrap();
        for i in 0..v.len() {
            let mut all: Vec<(f64, usize)> = (0..v.len())
                .map(|j| {
                    let d = v[i].iter().zip(&v[j]).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
                    (d, j)
                })
                .collect();
            all.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let expected: Vec<usize> = all.iter().take(7).map(|&(_, j)| j).collect();
            assert_eq!(nb[i], expected);
            assert_eq!(nb[i][0], i);
        }
        assert_eq!(nb, neighborhoods(&v, 7).unwrap());
    }
}
