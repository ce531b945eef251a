//! Perron eigendata of 0/1 matrices, admissible-word growth, and the
//! entropy formulas.

use std::f64::consts::PI;

use num_bigint::{BigInt, BigUint};
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::format::csv_row;

pub const PERRON_TOL: f64 = 1e-12;
pub const PERRON_MAX_ITER: usize = 100_000;

/// Square matrix of zeros and ones, stored row-major.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ZeroOneMatrix {
    size: usize,
    entries: Vec<u8>,
}

impl ZeroOneMatrix {
    pub fn zeros(size: usize) -> Self {
        Self {
            size,
            entries: vec![0; size * size],
        }
    }

    pub fn from_rows(rows: &[Vec<u8>]) -> Result<Self> {
        let size = rows.len();
        let mut m = Self::zeros(size);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != size {
                return Err(Error::InvalidArgument(format!("row {} has {} entries, expected {size}", i + 1, row.len())));
            }
            for (j, &e) in row.iter().enumerate() {
                if e > 1 {
                    return Err(Error::InvalidArgument(format!("entry ({}, {}) is {e}", i + 1, j + 1)));
                }
                m.set(i, j, e == 1);
            }
        }
        Ok(m)
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        self.entries[i * self.size + j] == 1
    }

    pub fn set(&mut self, i: usize, j: usize, value: bool) {
        self.entries[i * self.size + j] = value as u8;
    }

    pub fn row(&self, i: usize) -> &[u8] {
        &self.entries[i * self.size..(i + 1) * self.size]
    }

    pub fn rows(&self) -> Vec<Vec<u8>> {
        (0..self.size).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn row_sums(&self) -> Vec<usize> {
        (0..self.size).map(|i| self.row(i).iter().map(|&e| e as usize).sum()).collect()
    }

    /// `true` when the ones in every row form one contiguous cyclic block.
    pub fn rows_cyclically_contiguous(&self) -> bool {
        (0..self.size).all(|i| {
            let row = self.row(i);
            // count 0 -> 1 transitions around the cycle
            let starts = (0..self.size).filter(|&j| row[j] == 1 && row[(j + self.size - 1) % self.size] == 0).count();
            let ones = row.iter().filter(|&&e| e == 1).count();
            starts == 1 || (ones == self.size && self.size > 0)
        })
    }

    /// Strong connectivity of the directed graph `i → j` iff `m_ij = 1`.
    pub fn is_irreducible(&self) -> bool {
        if self.size == 0 {
            return false;
        }
        self.reaches_all(false) && self.reaches_all(true)
    }

    fn reaches_all(&self, transpose: bool) -> bool {
        let mut seen = vec![false; self.size];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(i) = stack.pop() {
            let reachable: Vec<usize> =
                (0..self.size).filter(|&j| if transpose { self.get(j, i) } else { self.get(i, j) }).collect();
            for j in reachable {
                if !std::mem::replace(&mut seen[j], true) {
                    stack.push(j);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    /// Deletes the listed rows and the same-numbered columns.
    pub fn without(&self, removed: &[usize]) -> Self {
        let keep: Vec<usize> = (0..self.size).filter(|i| !removed.contains(i)).collect();
        let mut m = Self::zeros(keep.len());
        for (a, &i) in keep.iter().enumerate() {
            for (b, &j) in keep.iter().enumerate() {
                m.set(a, b, self.get(i, j));
            }
        }
        m
    }

    pub fn mul_vec(&self, v: &[f64]) -> Vec<f64> {
        (0..self.size)
            .map(|i| self.row(i).iter().zip(v).filter(|(&e, _)| e == 1).map(|(_, &x)| x).sum())
            .collect()
    }

    /// Rows of comma-separated 0/1 entries.
    pub fn to_csv(&self) -> String {
        let mut s = String::new();
        for i in 0..self.size {
            let row: Vec<&str> = self.row(i).iter().map(|&e| if e == 1 { "1" } else { "0" }).collect();
            s.push_str(&row.join(","));
            s.push('\n');
        }
        s
    }

    /// Plain portable bitmap (P1), one pixel per entry, black for 1.
    pub fn to_pbm(&self) -> String {
        let mut s = format!("P1\n{} {}\n", self.size, self.size);
        for i in 0..self.size {
            let row: Vec<&str> = self.row(i).iter().map(|&e| if e == 1 { "1" } else { "0" }).collect();
            s.push_str(&row.join(" "));
            s.push('\n');
        }
        s
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct PerronPair {
    pub lambda: f64,
    /// Positive eigenvector scaled to maximum entry 1.
    pub vector: Vec<f64>,
    pub iterations: usize,
    pub residual: f64,
}

/// Perron eigenpair by power iteration from the all-ones vector.
pub fn perron(m: &ZeroOneMatrix) -> Result<PerronPair> {
    perron_from(m, &vec![1.0; m.size()])
}

/// Power iteration on `M + I` (primitive whenever `M` is irreducible)
/// from a positive start vector. Stops when `‖Mv - λv‖_∞ ≤ 1e-12` with `v`
/// max-normalized.
pub fn perron_from(m: &ZeroOneMatrix, start: &[f64]) -> Result<PerronPair> {
    if !m.is_irreducible() {
        return Err(Error::NotIrreducible);
    }
    if start.len() != m.size() || start.iter().any(|&x| x.is_nan() || x <= 0.0) {
        return Err(Error::InvalidArgument("start vector must be positive with one entry per row".into()));
    }
    let normalize = |v: &mut Vec<f64>| {
        let top = v.iter().cloned().fold(0.0, f64::max);
        v.iter_mut().for_each(|x| *x /= top);
    };
    let mut v = start.to_vec();
    normalize(&mut v);
    let mut residual = f64::INFINITY;
    let mut lambda = 0.0;
    for it in 1..=PERRON_MAX_ITER {
        let mv = m.mul_vec(&v);
        lambda = mv.iter().sum::<f64>() / v.iter().sum::<f64>();
        residual = mv.iter().zip(&v).map(|(a, b)| (a - lambda * b).abs()).fold(0.0, f64::max);
        if residual <= PERRON_TOL {
            if lambda <= 1.0 + 1e-12 {
                return Err(Error::NotExpanding(lambda));
            }
            return Ok(PerronPair {
                lambda,
                vector: v,
                iterations: it,
                residual,
            });
        }
        v = mv.iter().zip(&v).map(|(a, b)| a + b).collect();
        normalize(&mut v);
    }
    if lambda <= 1.0 + 1e-9 {
        return Err(Error::NotExpanding(lambda));
    }
    Err(Error::NoConvergence(residual))
}

/// `log(4g - 3 + √((4g-3)² - 1))`.
pub fn h_top_formula(genus: usize) -> f64 {
    rigidity_lambda(genus).ln()
}

/// `4g - 3 + √((4g-3)² - 1)`.
pub fn rigidity_lambda(genus: usize) -> f64 {
    let a = 4.0 * genus as f64 - 3.0;
    a + (a * a - 1.0).sqrt()
}

/// Number of admissible words of each length `1..=n_max`: the entry sum of `M^{n-1}`.
pub fn word_growth(m: &ZeroOneMatrix, n_max: usize) -> Vec<BigUint> {
    let mut x: Vec<BigUint> = vec![BigUint::from(1u8); m.size()];
    let mut counts = Vec::with_capacity(n_max);
    for n in 1..=n_max {
        counts.push(x.iter().sum());
        if n < n_max {
            x = (0..m.size())
                .map(|i| {
                    m.row(i)
                        .iter()
                        .zip(&x)
                        .filter(|(&e, _)| e == 1)
                        .map(|(_, c)| c)
                        .sum()
                })
                .collect();
        }
    }
    counts
}

/// `a / b` for big integers, scaled down first so both fit in `f64`.
pub fn big_ratio(a: &BigUint, b: &BigUint) -> f64 {
    let shift = a.bits().max(b.bits()).saturating_sub(1000);
    let a = (a >> shift).to_f64().unwrap_or(f64::INFINITY);
    let b = (b >> shift).to_f64().unwrap_or(f64::INFINITY);
    a / b
}

/// Integer coefficients `c_0, …, c_n` of `det(xI - M)` (with `c_n = 1`),
/// by exact Faddeev–LeVerrier recursion.
pub fn characteristic_polynomial(m: &ZeroOneMatrix) -> Vec<BigInt> {
    let n = m.size();
    let a: Vec<Vec<BigInt>> = (0..n)
        .map(|i| m.row(i).iter().map(|&e| BigInt::from(e)).collect())
        .collect();
    let mut coeffs = vec![BigInt::zero(); n + 1];
    coeffs[n] = BigInt::from(1);
    let mut mk: Vec<Vec<BigInt>> = vec![vec![BigInt::zero(); n]; n];
    for k in 1..=n {
        // M_k = A M_{k-1} + c_{n-k+1} I
        let mut next = matmul(&a, &mk);
        for (i, row) in next.iter_mut().enumerate() {
            row[i] += &coeffs[n - k + 1];
        }
        mk = next;
        let am = matmul(&a, &mk);
        let trace: BigInt = (0..n).map(|i| am[i][i].clone()).sum();
        coeffs[n - k] = -trace / BigInt::from(k);
    }
    coeffs
}

fn matmul(a: &[Vec<BigInt>], b: &[Vec<BigInt>]) -> Vec<Vec<BigInt>> {
    let n = a.len();
    (0..n)
        .into_par_iter()
        .map(|i| {
            (0..n)
                .map(|j| {
                    let mut s = BigInt::zero();
                    for (k, aik) in a[i].iter().enumerate() {
                        if !aik.is_zero() {
                            s += aik * &b[k][j];
                        }
                    }
                    s
                })
                .collect()
        })
        .collect()
}

/// `true` when `Σ_i c_i · count(n + i) = 0` for every window of the sequence.
pub fn satisfies_recurrence(counts: &[BigUint], coeffs: &[BigInt]) -> bool {
    let d = coeffs.len() - 1;
    counts.windows(d + 1).all(|w| {
        let s: BigInt = w.iter().zip(coeffs).map(|(x, c)| c * BigInt::from(x.clone())).sum();
        s.is_zero()
    })
}

/// `π²(4g - 4) / perimeter`.
pub fn h_mu_from_perimeter(genus: usize, perimeter: f64) -> Result<f64> {
    if perimeter.is_nan() || perimeter <= 0.0 {
        return Err(Error::InvalidArgument(format!("perimeter must be positive, got {perimeter}")));
    }
    Ok(PI * PI * (4.0 * genus as f64 - 4.0) / perimeter)
}

/// Largest measure-theoretic entropy in genus `g`, attained by the regular polygon.
pub fn h_max(genus: usize) -> f64 {
    let g = genus as f64;
    let side = (1.0 + 2.0 * (PI / (4.0 * g - 2.0)).cos()).acosh();
    PI * PI * (4.0 * g - 4.0) / ((8.0 * g - 4.0) * side)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EntropyRow {
    pub g: usize,
    pub h_top: f64,
    #[serde(rename = "H")]
    pub h_max: f64,
}

pub fn entropy_table(g_min: usize, g_max: usize) -> Result<Vec<EntropyRow>> {
    if g_min < 2 || g_min > g_max || g_max > 1000 {
        return Err(Error::InvalidArgument(format!("genus range {g_min}..{g_max} outside 2 <= min <= max <= 1000")));
    }
    Ok((g_min..=g_max)
        .into_par_iter()
        .map(|g| EntropyRow {
            g,
            h_top: h_top_formula(g),
            h_max: h_max(g),
        })
        .collect())
}

pub fn entropy_csv(rows: &[EntropyRow]) -> String {
    let mut s = String::from("g,h_top,H\n");
    for r in rows {
        s.push_str(&format!("{},{}\n", r.g, csv_row(&[r.h_top, r.h_max])));
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn cycle(n: usize) -> ZeroOneMatrix {
        let mut m = ZeroOneMatrix::zeros(n);
        for i in 0..n {
            m.set(i, (i + 1) % n, true);
        }
        m
    }

    fn golden_mean() -> ZeroOneMatrix {
        ZeroOneMatrix::from_rows(&[vec![1, 1], vec![1, 0]]).unwrap()
    }

    #[test]
    fn permutation_not_expanding() {
        assert!(matches!(perron(&cycle(5)), Err(Error::NotExpanding(_))));
    }

    #[test]
    fn reducible_rejected() {
        let m = ZeroOneMatrix::from_rows(&[vec![1, 1], vec![0, 1]]).unwrap();
        assert!(matches!(perron(&m), Err(Error::NotIrreducible)));
    }

    #[test]
    fn golden_mean_eigenpair() {
        let p = perron(&golden_mean()).unwrap();
        let phi = (1.0 + 5f64.sqrt()) / 2.0;
        assert!((p.lambda - phi).abs() < 1e-12);
        assert!((p.vector[1] - 1.0 / phi).abs() < 1e-12);
    }

    #[test]
    fn restart_stability() {
        let m = golden_mean();
        let base = perron(&m).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..10 {
            let start: Vec<f64> = (0..2).map(|_| rng.gen_range(0.1..10.0)).collect();
            let p = perron_from(&m, &start).unwrap();
            assert!((p.lambda - base.lambda).abs() < 1e-11);
            assert!(p.vector.iter().zip(&base.vector).all(|(a, b)| (a - b).abs() < 1e-9));
        }
    }

    #[test]
    fn word_growth_fibonacci() {
        let c = word_growth(&golden_mean(), 10);
        let want = [2u32, 3, 5, 8, 13, 21, 34, 55, 89, 144];
        assert_eq!(c, want.iter().map(|&x| BigUint::from(x)).collect::<Vec<_>>());
        let poly = characteristic_polynomial(&golden_mean());
        assert_eq!(poly, vec![BigInt::from(-1), BigInt::from(-1), BigInt::from(1)]);
        assert!(satisfies_recurrence(&c, &poly));
    }

    #[test]
    fn characteristic_polynomial_of_cycle() {
        // x^4 - 1
        let p = characteristic_polynomial(&cycle(4));
        let want: Vec<BigInt> = [-1, 0, 0, 0, 1].iter().map(|&x| BigInt::from(x)).collect();
        assert_eq!(p, want);
    }

    #[test]
    fn formulas() {
        assert!((h_top_formula(2) - (5.0 + 2.0 * 6f64.sqrt()).ln()).abs() < 1e-15);
        assert!((h_top_formula(2) - 2.29243).abs() < 1e-5);
        assert!((h_top_formula(3) - (9.0 + 4.0 * 5f64.sqrt()).ln()).abs() < 1e-14);
        assert!((h_top_formula(3) - 2.88727).abs() < 1e-5);
        assert!((h_max(2) - 1.978).abs() < 1e-3);
        let per = 12.0 * (1.0 + 3f64.sqrt()).acosh();
        assert!((h_mu_from_perimeter(2, per).unwrap() - h_max(2)).abs() < 1e-12);
        let h1 = h_mu_from_perimeter(3, 7.0).unwrap();
        let h2 = h_mu_from_perimeter(3, 14.0).unwrap();
        assert_eq!(h1, 2.0 * h2);
        assert!(h_mu_from_perimeter(2, 0.0).is_err());
    }

    #[test]
    fn entropy_table_shape() {
        let rows = entropy_table(2, 100).unwrap();
        assert_eq!(rows.len(), 99);
        assert_eq!(rows[0].g, 2);
        assert!((rows[0].h_top - 2.2924).abs() < 1e-4);
        assert!((rows[0].h_max - 1.9784).abs() < 1e-4);
        for w in rows.windows(2) {
            assert!(w[1].h_top > w[0].h_top && w[1].h_max > w[0].h_max);
        }
        assert!(rows.iter().all(|r| r.h_top > r.h_max));
        let last = rows.last().unwrap();
        assert!((last.h_top - (8.0 * 100.0 - 6.0f64).ln()).abs() < 1e-4);
        assert_eq!(entropy_csv(&entropy_table(2, 4).unwrap()).lines().count(), 4);
        assert!(entropy_table(1, 3).is_err());
    }

    #[test]
    fn contiguity_and_pbm() {
        let m = ZeroOneMatrix::from_rows(&[vec![1, 0, 1], vec![0, 1, 1], vec![1, 1, 1]]).unwrap();
        assert!(m.rows_cyclically_contiguous());
        let m2 = ZeroOneMatrix::from_rows(&[vec![1, 0, 1, 0], vec![0; 4], vec![1; 4], vec![1; 4]]).unwrap();
        assert!(!m2.rows_cyclically_contiguous());
        assert!(m.to_pbm().starts_with("P1\n3 3\n1 0 1\n"));
        assert_eq!(m.without(&[1]).rows(), vec![vec![1, 1], vec![1, 1]]);
    }
}
