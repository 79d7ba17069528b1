//! Exact matrix permanents and the classical simulation cost model.
//!
//! Two exact engines are provided: a permutation-sum oracle for tiny
//! matrices and a Gray-code Ryser engine with incremental row sums
//! (O(n) work per subset, O(n 2^n) total). Normalized permanents
//! perm(A)/n! are carried in the log domain so uniform-overlap matrices
//! can be evaluated to n well beyond 200 without under/overflow.

use crate::matrix::ComplexMatrix;
use crate::{is_zero, ln_factorial, map_ordered, Error, Result};
use num_complex::Complex64;

/// Permutation-sum engine cap: 9! terms is the largest the oracle evaluates
/// in reasonable time.
pub const NAIVE_CAP: usize = 9;
/// Ryser engine cap: 2^30 subsets keeps worst-case calls within a time
/// budget suitable for tests.
pub const RYSER_CAP: usize = 30;

/// perm(A)/n! in the log domain.
///
/// `log_magnitude` is ln|perm(A)/n!| (-inf when the permanent vanishes) and
/// `phase` is the unit-modulus phase factor (1 for nonnegative real input).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormalizedPermanent {
    pub log_magnitude: f64,
    pub phase: Complex64,
}

impl NormalizedPermanent {
    /// Materializes the value; may under/overflow for |log_magnitude|
    /// beyond ~709. Prefer `log_magnitude` for large n.
    pub fn value(&self) -> Complex64 {
        self.phase * self.log_magnitude.exp()
    }

    pub fn magnitude(&self) -> f64 {
        self.log_magnitude.exp()
    }
}

/// Permanent by direct sum over all n! permutations. Oracle-grade: exact up
/// to floating rounding, refuses n > 9.
pub fn perm_naive(m: &ComplexMatrix) -> Result<Complex64> {
    let n = m.n();
    if n > NAIVE_CAP {
        return Err(Error::DimensionCap {
            n,
            cap: NAIVE_CAP,
            engine: "naive",
        });
    }
    let mut sum = Complex64::ZERO;
    let mut used = vec![false; n];
    fn rec(
        m: &ComplexMatrix,
        row: usize,
        used: &mut [bool],
        acc: Complex64,
        sum: &mut Complex64,
    ) {
        let n = m.n();
        if row == n {
            *sum += acc;
            return;
        }
        for j in 0..n {
            if !used[j] {
                used[j] = true;
                rec(m, row + 1, used, acc * m.get(row, j), sum);
                used[j] = false;
            }
        }
    }
    rec(m, 0, &mut used, Complex64::ONE, &mut sum);
    Ok(sum)
}

/// Permanent by Ryser's inclusion-exclusion with Gray-code subset ordering.
///
/// The subset lattice is split into chunks whose boundaries depend only on
/// n; with the `parallel` feature the chunks are evaluated on the rayon
/// pool and reduced in fixed chunk order, so the result is identical for
/// every thread count.
pub fn perm_ryser(m: &ComplexMatrix) -> Result<Complex64> {
    let n = m.n();
    if n > RYSER_CAP {
        return Err(Error::DimensionCap {
            n,
            cap: RYSER_CAP,
            engine: "ryser",
        });
    }
    let cols = m.columns();
    let last: u64 = (1u64 << n) - 1;
    let chunk_len: u64 = 1u64 << n.min(16);
    let starts: Vec<u64> = (1..=last).step_by(chunk_len as usize).collect();
    let partials = map_ordered(starts, |start| {
        ryser_chunk(&cols, start, (start + chunk_len - 1).min(last))
    });
    let sum: Complex64 = partials.into_iter().sum();
    Ok(if n.is_multiple_of(2) { sum } else { -sum })
}

/// Sum of Ryser terms for subset indices `start..=end` (binary-reflected
/// Gray code of the index encodes the column subset).
fn ryser_chunk(cols: &[Vec<Complex64>], start: u64, end: u64) -> Complex64 {
    let n = cols.len();
    let mut row_sums = vec![Complex64::ZERO; n];
    // Row sums for the subset preceding the chunk.
    let g0 = (start - 1) ^ ((start - 1) >> 1);
    for (j, col) in cols.iter().enumerate() {
        if g0 >> j & 1 == 1 {
            for (sum, &c) in row_sums.iter_mut().zip(col) {
                *sum += c;
            }
        }
    }
    let mut acc = Complex64::ZERO;
    for k in start..=end {
        let j = k.trailing_zeros() as usize;
        let g = k ^ (k >> 1);
        if g >> j & 1 == 1 {
            for i in 0..n {
                row_sums[i] += cols[j][i];
            }
        } else {
            for i in 0..n {
                row_sums[i] -= cols[j][i];
            }
        }
        let mut prod = Complex64::ONE;
        for &s in &row_sums {
            prod *= s;
        }
        if g.count_ones() % 2 == 0 {
            acc += prod;
        } else {
            acc -= prod;
        }
    }
    acc
}

/// perm(A)/n! with the division performed in the log domain.
pub fn perm_normalized(m: &ComplexMatrix) -> Result<NormalizedPermanent> {
    let p = perm_ryser(m)?;
    if is_zero(p) {
        return Ok(NormalizedPermanent {
            log_magnitude: f64::NEG_INFINITY,
            phase: Complex64::ONE,
        });
    }
    let r = p.norm();
    Ok(NormalizedPermanent {
        log_magnitude: r.ln() - ln_factorial(m.n()),
        phase: p / r,
    })
}

/// Ratios D_m/m! of derangement numbers to factorials, via the stable form
/// of D_m = (m-1)(D_{m-1} + D_{m-2}); every ratio lies in [0, 1].
fn derangement_ratios(n: usize) -> Vec<f64> {
    let mut r = Vec::with_capacity(n + 1);
    r.push(1.0);
    if n >= 1 {
        r.push(0.0);
    }
    for m in 2..=n {
        let v = ((m - 1) as f64 * r[m - 1] + r[m - 2]) / m as f64;
        r.push(v);
    }
    r
}

/// perm(S)/n! for the uniform-overlap matrix S = (1-x) I + x J (unit
/// diagonal, off-diagonal x), by the fixed-point expansion
/// sum_m D_m x^m / (m! (n-m)!) evaluated in the log domain. Valid for any
/// n >= 1 and x in [0, 1].
pub fn perm_uniform_normalized(n: usize, x: f64) -> Result<NormalizedPermanent> {
    if n == 0 {
        return Err(Error::EmptyMatrix);
    }
    crate::check_range("x", x, 0.0, 1.0)?;
    let phase = Complex64::ONE;
    if x == 0.0 {
        // Only the m = 0 term survives: perm(I)/n! = 1/n!.
        return Ok(NormalizedPermanent {
            log_magnitude: -ln_factorial(n),
            phase,
        });
    }
    if x == 1.0 {
        // perm(J)/n! = 1; keep the endpoint exact.
        return Ok(NormalizedPermanent {
            log_magnitude: 0.0,
            phase,
        });
    }
    let ratios = derangement_ratios(n);
    let ln_x = x.ln();
    let mut logs = Vec::with_capacity(n + 1);
    for (m, &r) in ratios.iter().enumerate() {
        if r > 0.0 {
            logs.push(r.ln() + m as f64 * ln_x - ln_factorial(n - m));
        }
    }
    let max = logs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let sum: f64 = logs.iter().map(|&l| (l - max).exp()).sum();
    Ok(NormalizedPermanent {
        log_magnitude: max + sum.ln(),
        phase,
    })
}

/// FLOP-count model c * k^a * 2^k for one k-dimensional permanent.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CostModel {
    pub c: f64,
    pub a: f64,
}

impl Default for CostModel {
    fn default() -> Self {
        Self { c: 1.0, a: 1.0 }
    }
}

/// FLOPs to evaluate one k-dimensional permanent under the cost model.
pub fn classical_flops(k: usize, cost: CostModel) -> f64 {
    cost.c * (k as f64).powf(cost.a) * (k as f64).exp2()
}
