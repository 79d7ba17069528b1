//! Small-scale boson-sampling probability engine.
//!
//! Output probabilities for ideal and fully distinguishable photons are
//! evaluated through matrix permanents of network submatrices; a
//! brute-force oracle handles uniform partial distinguishability by
//! decomposing each photon into a shared and a unique internal component.
//! Collision-free statistics and the coupon-collector event estimate close
//! out the module.

use crate::matrix::ComplexMatrix;
use crate::permanent::perm_ryser;
use crate::{ln_factorial, Error, Result};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// Photon counts per optical mode.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct ModeConfiguration {
    occupations: Vec<u32>,
}

impl ModeConfiguration {
    pub fn new(occupations: Vec<u32>) -> Result<Self> {
        if occupations.is_empty() {
            return Err(Error::InvalidInput(
                "a mode configuration needs at least one mode".into(),
            ));
        }
        Ok(Self { occupations })
    }

    pub fn modes(&self) -> usize {
        self.occupations.len()
    }

    pub fn photons(&self) -> u32 {
        self.occupations.iter().sum()
    }

    pub fn occupations(&self) -> &[u32] {
        &self.occupations
    }

    /// One mode index per photon, ascending.
    pub fn slots(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.photons() as usize);
        for (mode, &count) in self.occupations.iter().enumerate() {
            out.extend(std::iter::repeat_n(mode, count as usize));
        }
        out
    }

    /// True when no mode holds more than one photon.
    pub fn is_collision_free(&self) -> bool {
        self.occupations.iter().all(|&c| c <= 1)
    }

    /// Dash-separated occupation label, e.g. `1-0-2`.
    pub fn label(&self) -> String {
        self.occupations
            .iter()
            .map(|c| c.to_string())
            .collect::<Vec<_>>()
            .join("-")
    }

    /// prod_m k_m! as a float.
    fn multiplicity(&self) -> f64 {
        self.occupations
            .iter()
            .map(|&c| (1..=c as u64).product::<u64>() as f64)
            .product()
    }
}

/// All occupation vectors of `photons` photons over `modes` modes, in
/// ascending lexicographic order. There are C(modes+photons-1, photons).
pub fn enumerate_outputs(modes: usize, photons: u32) -> Vec<ModeConfiguration> {
    fn rec(modes_left: usize, photons_left: u32, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if modes_left == 1 {
            prefix.push(photons_left);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for k in 0..=photons_left {
            prefix.push(k);
            rec(modes_left - 1, photons_left - k, prefix, out);
            prefix.pop();
        }
    }
    let mut raw = Vec::new();
    rec(modes, photons, &mut Vec::new(), &mut raw);
    raw.into_iter()
        .map(|occ| ModeConfiguration::new(occ).expect("modes >= 1"))
        .collect()
}

/// M x M unitary transfer matrix of a linear optical network.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryNetwork {
    dim: usize,
    entries: Vec<Complex64>,
}

/// Max |U†U - I| accepted by the constructor.
pub const UNITARITY_TOL: f64 = 1e-10;

impl UnitaryNetwork {
    pub fn new(dim: usize, entries: Vec<Complex64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::EmptyMatrix);
        }
        if entries.len() != dim * dim {
            return Err(Error::InvalidInput(format!(
                "expected {} entries for a {dim}x{dim} unitary, got {}",
                dim * dim,
                entries.len()
            )));
        }
        let u = Self { dim, entries };
        let dev = u.unitarity_deviation();
        if dev > UNITARITY_TOL {
            return Err(Error::NotUnitary(dev));
        }
        Ok(u)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.entries[i * self.dim + j]
    }

    pub fn unitarity_deviation(&self) -> f64 {
        let n = self.dim;
        let mut max = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                let mut dot = Complex64::ZERO;
                for k in 0..n {
                    dot += self.get(k, i).conj() * self.get(k, j);
                }
                let target = if i == j { Complex64::ONE } else { Complex64::ZERO };
                max = max.max((dot - target).norm());
            }
        }
        max
    }

    /// Balanced two-mode coupler, the Hong-Ou-Mandel workhorse.
    pub fn balanced_coupler() -> Self {
        let r = std::f64::consts::FRAC_1_SQRT_2;
        Self::new(
            2,
            vec![
                Complex64::new(r, 0.0),
                Complex64::new(r, 0.0),
                Complex64::new(r, 0.0),
                Complex64::new(-r, 0.0),
            ],
        )
        .expect("balanced coupler is unitary")
    }
}

/// Haar-random unitary: QR of a complex Ginibre matrix via twice-applied
/// modified Gram-Schmidt. The column norms make the triangular factor's
/// diagonal real positive, which is the phase convention that yields the
/// Haar measure. Deterministic per seed.
pub fn haar_unitary(modes: usize, seed: u64) -> UnitaryNetwork {
    assert!(modes >= 1, "haar_unitary requires at least one mode");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut draw = || -> f64 { StandardNormal.sample(&mut rng) };
    let scale = std::f64::consts::FRAC_1_SQRT_2;
    let mut cols: Vec<Vec<Complex64>> = (0..modes)
        .map(|_| {
            (0..modes)
                .map(|_| Complex64::new(draw() * scale, draw() * scale))
                .collect()
        })
        .collect();
    for j in 0..modes {
        let (done, rest) = cols.split_at_mut(j);
        let v = &mut rest[0];
        for _ in 0..2 {
            for q in done.iter() {
                let proj: Complex64 = q
                    .iter()
                    .zip(v.iter())
                    .map(|(&qi, &vi)| qi.conj() * vi)
                    .sum();
                for (vi, &qi) in v.iter_mut().zip(q.iter()) {
                    *vi -= proj * qi;
                }
            }
        }
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        for vi in v.iter_mut() {
            *vi /= norm;
        }
    }
    let mut entries = vec![Complex64::ZERO; modes * modes];
    for (j, col) in cols.iter().enumerate() {
        for (i, &z) in col.iter().enumerate() {
            entries[i * modes + j] = z;
        }
    }
    UnitaryNetwork::new(modes, entries).expect("Gram-Schmidt output is unitary")
}

/// Interference cap for the probability engine: permanents up to 8x8.
pub const PROB_PHOTON_CAP: u32 = 8;
/// Brute-force oracle caps.
pub const ORACLE_PHOTON_CAP: u32 = 5;
pub const ORACLE_MODE_CAP: usize = 8;

fn check_configs(
    u: &UnitaryNetwork,
    input: &ModeConfiguration,
    output: &ModeConfiguration,
) -> Result<()> {
    if input.modes() != u.dim() {
        return Err(Error::ModeMismatch {
            network: u.dim(),
            config: input.modes(),
        });
    }
    if output.modes() != u.dim() {
        return Err(Error::ModeMismatch {
            network: u.dim(),
            config: output.modes(),
        });
    }
    if input.photons() != output.photons() {
        return Err(Error::PhotonMismatch {
            input: input.photons(),
            output: output.photons(),
        });
    }
    if input.photons() > PROB_PHOTON_CAP {
        return Err(Error::DimensionCap {
            n: input.photons() as usize,
            cap: PROB_PHOTON_CAP as usize,
            engine: "interference",
        });
    }
    Ok(())
}

/// Network submatrix with one row per output photon and one column per
/// input photon.
fn submatrix(u: &UnitaryNetwork, out_slots: &[usize], in_slots: &[usize]) -> ComplexMatrix {
    let n = out_slots.len();
    let entries = out_slots
        .iter()
        .flat_map(|&t| in_slots.iter().map(move |&s| (t, s)))
        .map(|(t, s)| u.get(t, s))
        .collect();
    ComplexMatrix::new(n, entries).expect("submatrix is square")
}

/// Detection probability for perfectly indistinguishable photons:
/// |perm(U[out|in])|^2 / (mu(in) mu(out)).
pub fn prob_ideal(
    u: &UnitaryNetwork,
    input: &ModeConfiguration,
    output: &ModeConfiguration,
) -> Result<f64> {
    check_configs(u, input, output)?;
    prob_ideal_slots(u, &input.slots(), output)
}

fn prob_ideal_slots(
    u: &UnitaryNetwork,
    in_slots: &[usize],
    output: &ModeConfiguration,
) -> Result<f64> {
    if in_slots.is_empty() {
        return Ok(1.0);
    }
    let sub = submatrix(u, &output.slots(), in_slots);
    let p = perm_ryser(&sub)?;
    let mut mu_in = 1.0;
    {
        // mu of the input slot list = product of multiplicities of repeated slots
        let mut counts: BTreeMap<usize, u32> = BTreeMap::new();
        for &s in in_slots {
            *counts.entry(s).or_insert(0) += 1;
        }
        for (_, c) in counts {
            mu_in *= (1..=c as u64).product::<u64>() as f64;
        }
    }
    Ok(p.norm_sqr() / (mu_in * output.multiplicity()))
}

/// Detection probability for fully distinguishable photons:
/// perm(|U[out|in]|^2) / mu(out), the classical multinomial routing law.
pub fn prob_distinguishable(
    u: &UnitaryNetwork,
    input: &ModeConfiguration,
    output: &ModeConfiguration,
) -> Result<f64> {
    check_configs(u, input, output)?;
    if input.photons() == 0 {
        return Ok(1.0);
    }
    let sub = submatrix(u, &output.slots(), &input.slots());
    let abs2 = ComplexMatrix::new(
        sub.n(),
        sub.entries()
            .iter()
            .map(|z| Complex64::new(z.norm_sqr(), 0.0))
            .collect(),
    )?;
    let p = perm_ryser(&abs2)?;
    Ok(p.re / output.multiplicity())
}

/// Exact output distribution for partially distinguishable photons with a
/// uniform overlap matrix (S_ij = x off-diagonal).
///
/// Each photon's internal state is split as sqrt(x)|common> +
/// sqrt(1-x)|unique_i>. Orthogonality of the unique components kills every
/// cross term between sector assignments, so the distribution is the
/// mixture over subsets C of photons assigned to the common sector, with
/// weight x^|C| (1-x)^(N-|C|): photons in C interfere coherently and the
/// rest route classically. Entries are returned in ascending lexicographic
/// output order.
pub fn brute_force_distribution(
    u: &UnitaryNetwork,
    input: &ModeConfiguration,
    s: &crate::distinguishability::DistinguishabilityMatrix,
) -> Result<Vec<(ModeConfiguration, f64)>> {
    let n = input.photons();
    let m = u.dim();
    if input.modes() != m {
        return Err(Error::ModeMismatch {
            network: m,
            config: input.modes(),
        });
    }
    if n > ORACLE_PHOTON_CAP {
        return Err(Error::DimensionCap {
            n: n as usize,
            cap: ORACLE_PHOTON_CAP as usize,
            engine: "brute-force oracle (photons)",
        });
    }
    if m > ORACLE_MODE_CAP {
        return Err(Error::DimensionCap {
            n: m,
            cap: ORACLE_MODE_CAP,
            engine: "brute-force oracle (modes)",
        });
    }
    if s.n() != n as usize {
        return Err(Error::InvalidInput(format!(
            "overlap matrix is {}x{} but the input carries {} photons",
            s.n(),
            s.n(),
            n
        )));
    }
    let x = s.uniform_off_diagonal().ok_or(Error::OracleNeedsUniform)?;

    let photon_slots = input.slots();
    let nu = n as usize;
    let mut acc: BTreeMap<Vec<u32>, f64> = BTreeMap::new();
    for mask in 0u32..(1 << nu) {
        let size = mask.count_ones();
        let weight = x.powi(size as i32) * (1.0 - x).powi((n - size) as i32);
        if weight == 0.0 {
            continue;
        }
        // Coherent group first, then each excluded photon classically.
        let common: Vec<usize> = (0..nu)
            .filter(|&i| mask >> i & 1 == 1)
            .map(|i| photon_slots[i])
            .collect();
        let mut sector: BTreeMap<Vec<u32>, f64> = BTreeMap::new();
        sector.insert(vec![0; m], 1.0);
        if !common.is_empty() {
            sector = convolve(u, sector, &common, true)?;
        }
        for (i, &slot) in photon_slots.iter().enumerate() {
            if mask >> i & 1 == 0 {
                sector = convolve(u, sector, &[slot], false)?;
            }
        }
        for (occ, p) in sector {
            *acc.entry(occ).or_insert(0.0) += weight * p;
        }
    }
    enumerate_outputs(m, n)
        .into_iter()
        .map(|cfg| {
            let p = acc.get(cfg.occupations()).copied().unwrap_or(0.0);
            Ok((cfg, p))
        })
        .collect()
}

/// Convolves a partial occupation distribution with the output distribution
/// of one photon group (coherent for the common sector, trivially for a
/// single classical photon).
fn convolve(
    u: &UnitaryNetwork,
    base: BTreeMap<Vec<u32>, f64>,
    group_slots: &[usize],
    coherent: bool,
) -> Result<BTreeMap<Vec<u32>, f64>> {
    let m = u.dim();
    let group: Vec<(Vec<u32>, f64)> = if coherent {
        enumerate_outputs(m, group_slots.len() as u32)
            .into_iter()
            .map(|cfg| {
                let p = prob_ideal_slots(u, group_slots, &cfg)?;
                Ok((cfg.occupations().to_vec(), p))
            })
            .collect::<Result<_>>()?
    } else {
        let s = group_slots[0];
        (0..m)
            .map(|t| {
                let mut occ = vec![0u32; m];
                occ[t] = 1;
                (occ, u.get(t, s).norm_sqr())
            })
            .collect()
    };
    let mut out = BTreeMap::new();
    for (occ1, p1) in &base {
        for (occ2, p2) in &group {
            let joined: Vec<u32> = occ1.iter().zip(occ2).map(|(a, b)| a + b).collect();
            *out.entry(joined).or_insert(0.0) += p1 * p2;
        }
    }
    Ok(out)
}

/// Probability that N photons in M Haar-random modes land collision-free:
/// C(M,N)/C(M+N-1,N), evaluated through log-gamma.
pub fn collision_free_prob(modes: usize, photons: usize) -> Result<f64> {
    if photons < 1 || modes < photons {
        return Err(Error::InvalidInput(format!(
            "collision-free probability needs M >= N >= 1 (got M = {modes}, N = {photons})"
        )));
    }
    let (m, n) = (modes, photons);
    Ok((ln_factorial(m) + ln_factorial(m - 1) - ln_factorial(m - n) - ln_factorial(m + n - 1))
        .exp())
}

/// Logarithm base for the coupon-collector estimate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum LogBase {
    #[default]
    #[serde(rename = "ln")]
    Natural,
    #[serde(rename = "log2")]
    Two,
    #[serde(rename = "log10")]
    Ten,
}

impl LogBase {
    fn log(&self, v: f64) -> f64 {
        match self {
            LogBase::Natural => v.ln(),
            LogBase::Two => v.log2(),
            LogBase::Ten => v.log10(),
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            LogBase::Natural => "ln",
            LogBase::Two => "log2",
            LogBase::Ten => "log10",
        }
    }
}

/// Coupon-collector estimate of the multiphoton events needed to sample
/// every output mode at least once: M log(M) / N.
pub fn coupon_collector_events(modes: usize, photons: usize, base: LogBase) -> f64 {
    modes as f64 * base.log(modes as f64) / photons as f64
}

/// Renders an output distribution as CSV: dash-separated occupation
/// labels and probabilities, in the order given.
pub fn distribution_to_csv(dist: &[(ModeConfiguration, f64)]) -> String {
    let mut out = String::from("occupation,probability\n");
    for (cfg, p) in dist {
        out.push_str(&cfg.label());
        out.push(',');
        out.push_str(&crate::table::format_f64(*p));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distinguishability::DistinguishabilityMatrix;

    fn cfg(occ: &[u32]) -> ModeConfiguration {
        ModeConfiguration::new(occ.to_vec()).unwrap()
    }

    #[test]
    fn enumeration_is_lexicographic_and_complete() {
        let outs = enumerate_outputs(3, 2);
        let labels: Vec<String> = outs.iter().map(|c| c.label()).collect();
        assert_eq!(labels, ["0-0-2", "0-1-1", "0-2-0", "1-0-1", "1-1-0", "2-0-0"]);
    }

    #[test]
    fn haar_unitary_properties() {
        let u1 = haar_unitary(1, 5);
        assert!((u1.get(0, 0).norm() - 1.0).abs() < 1e-12);
        for (m, seed) in [(2, 0), (4, 7), (9, 123), (16, 9999)] {
            let u = haar_unitary(m, seed);
            assert!(u.unitarity_deviation() <= UNITARITY_TOL, "m = {m}");
        }
        assert_eq!(haar_unitary(6, 17), haar_unitary(6, 17));
        assert_ne!(haar_unitary(6, 17), haar_unitary(6, 18));
    }

    #[test]
    fn single_photon_trivial_network() {
        let u = UnitaryNetwork::new(1, vec![Complex64::ONE]).unwrap();
        let one = cfg(&[1]);
        assert_eq!(prob_ideal(&u, &one, &one).unwrap(), 1.0);
        assert_eq!(prob_distinguishable(&u, &one, &one).unwrap(), 1.0);
    }

    #[test]
    fn hom_dip_on_balanced_coupler() {
        let u = UnitaryNetwork::balanced_coupler();
        let input = cfg(&[1, 1]);
        let coincidence = prob_ideal(&u, &input, &cfg(&[1, 1])).unwrap();
        assert!(coincidence.abs() <= 1e-12, "{coincidence}");
        let classical = prob_distinguishable(&u, &input, &cfg(&[1, 1])).unwrap();
        assert!((classical - 0.5).abs() <= 1e-12);
        // Bunched outcomes absorb the ideal probability.
        assert!((prob_ideal(&u, &input, &cfg(&[2, 0])).unwrap() - 0.5).abs() < 1e-12);
        assert!((prob_ideal(&u, &input, &cfg(&[0, 2])).unwrap() - 0.5).abs() < 1e-12);
        assert!((prob_distinguishable(&u, &input, &cfg(&[2, 0])).unwrap() - 0.25).abs() < 1e-12);
    }

    #[test]
    fn collision_input_normalization() {
        // Two photons entering the same port split evenly.
        let u = UnitaryNetwork::balanced_coupler();
        let input = cfg(&[2, 0]);
        let p11 = prob_ideal(&u, &input, &cfg(&[1, 1])).unwrap();
        let p20 = prob_ideal(&u, &input, &cfg(&[2, 0])).unwrap();
        let p02 = prob_ideal(&u, &input, &cfg(&[0, 2])).unwrap();
        assert!((p11 - 0.5).abs() < 1e-12);
        assert!((p20 - 0.25).abs() < 1e-12);
        assert!((p11 + p20 + p02 - 1.0).abs() < 1e-12);
        let q11 = prob_distinguishable(&u, &input, &cfg(&[1, 1])).unwrap();
        let q20 = prob_distinguishable(&u, &input, &cfg(&[2, 0])).unwrap();
        let q02 = prob_distinguishable(&u, &input, &cfg(&[0, 2])).unwrap();
        assert!((q11 - 0.5).abs() < 1e-12 && (q20 - 0.25).abs() < 1e-12);
        assert!((q11 + q20 + q02 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn distributions_normalize_on_random_networks() {
        for seed in 0..10u64 {
            let u = haar_unitary(4, seed);
            let input = cfg(&[1, 1, 0, 0]);
            let mut sum_id = 0.0;
            let mut sum_dist = 0.0;
            for out in enumerate_outputs(4, 2) {
                sum_id += prob_ideal(&u, &input, &out).unwrap();
                sum_dist += prob_distinguishable(&u, &input, &out).unwrap();
            }
            assert!((sum_id - 1.0).abs() < 1e-9, "seed {seed}: {sum_id}");
            assert!((sum_dist - 1.0).abs() < 1e-9, "seed {seed}: {sum_dist}");
        }
    }

    #[test]
    fn ideal_equals_distinguishable_for_one_photon() {
        let u = haar_unitary(5, 3);
        let mut occ = vec![0u32; 5];
        occ[2] = 1;
        let input = ModeConfiguration::new(occ).unwrap();
        for out in enumerate_outputs(5, 1) {
            let a = prob_ideal(&u, &input, &out).unwrap();
            let b = prob_distinguishable(&u, &input, &out).unwrap();
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn mismatched_totals_rejected() {
        let u = UnitaryNetwork::balanced_coupler();
        let err = prob_ideal(&u, &cfg(&[1, 1]), &cfg(&[1, 0]));
        assert!(matches!(err, Err(Error::PhotonMismatch { .. })));
    }

    #[test]
    fn brute_force_limits_reproduce_ideal_and_distinguishable() {
        let u = haar_unitary(5, 21);
        let input = cfg(&[1, 1, 1, 0, 0]);
        let ideal_s = DistinguishabilityMatrix::uniform_overlap(3, 1.0).unwrap();
        for (out, p) in brute_force_distribution(&u, &input, &ideal_s).unwrap() {
            let expect = prob_ideal(&u, &input, &out).unwrap();
            assert!((p - expect).abs() < 1e-12, "{}", out.label());
        }
        let dist_s = DistinguishabilityMatrix::uniform_overlap(3, 0.0).unwrap();
        for (out, p) in brute_force_distribution(&u, &input, &dist_s).unwrap() {
            let expect = prob_distinguishable(&u, &input, &out).unwrap();
            assert!((p - expect).abs() < 1e-12, "{}", out.label());
        }
    }

    #[test]
    fn brute_force_respects_bound() {
        let u = haar_unitary(5, 4);
        let input = cfg(&[1, 1, 1, 0, 0]);
        let s = DistinguishabilityMatrix::uniform_overlap(3, 0.9f64.sqrt()).unwrap();
        let dist = brute_force_distribution(&u, &input, &s).unwrap();
        let total: f64 = dist.iter().map(|(_, p)| p).sum();
        assert!((total - 1.0).abs() < 1e-9);
        let mut exact = 0.0;
        for (out, p) in &dist {
            exact += 0.5 * (prob_ideal(&u, &input, out).unwrap() - p).abs();
        }
        let bound = crate::distinguishability::variational_distance_bound(&s).unwrap();
        assert!(exact <= bound + 1e-12, "exact {exact} > bound {bound}");
    }

    #[test]
    fn brute_force_rejects_non_uniform() {
        let u = haar_unitary(4, 0);
        let input = cfg(&[1, 1, 1, 0]);
        let entries = vec![
            1.0, 0.9, 0.8, //
            0.9, 1.0, 0.9, //
            0.8, 0.9, 1.0,
        ];
        let s = DistinguishabilityMatrix::new(3, entries).unwrap();
        assert!(matches!(
            brute_force_distribution(&u, &input, &s),
            Err(Error::OracleNeedsUniform)
        ));
    }

    /// Exact binomial coefficient in integer arithmetic; the stepwise
    /// division keeps every intermediate integral.
    fn binom_exact(n: u128, k: u128) -> u128 {
        let mut c: u128 = 1;
        for i in 1..=k {
            c = c * (n - k + i) / i;
        }
        c
    }

    #[test]
    fn collision_free_reference_points() {
        assert!((collision_free_prob(1, 1).unwrap() - 1.0).abs() < 1e-12);
        assert!((collision_free_prob(2, 2).unwrap() - 1.0 / 3.0).abs() < 1e-12);
        let exact = binom_exact(60, 20) as f64 / binom_exact(79, 20) as f64;
        let got = collision_free_prob(60, 20).unwrap();
        assert!((got - exact).abs() / exact < 1e-12, "{got} vs {exact}");
        assert!(collision_free_prob(3, 4).is_err());
    }

    #[test]
    fn collision_free_monotonicity() {
        for n in [2usize, 5, 10] {
            let mut prev = 0.0;
            for m in n..(n + 30) {
                let p = collision_free_prob(m, n).unwrap();
                assert!(p > prev, "m={m} n={n}");
                assert!(p > 0.0 && p <= 1.0);
                prev = p;
            }
        }
        for m in [30usize, 60] {
            let mut prev = 2.0;
            for n in 1..=m.min(25) {
                let p = collision_free_prob(m, n).unwrap();
                assert!(p < prev, "m={m} n={n}");
                prev = p;
            }
        }
    }

    #[test]
    fn distribution_csv_layout() {
        let u = UnitaryNetwork::balanced_coupler();
        let input = cfg(&[1, 1]);
        let s = DistinguishabilityMatrix::uniform_overlap(2, 0.0).unwrap();
        let dist = brute_force_distribution(&u, &input, &s).unwrap();
        let csv = distribution_to_csv(&dist);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "occupation,probability");
        let parsed: Vec<(&str, f64)> = lines[1..]
            .iter()
            .map(|l| {
                let (label, p) = l.split_once(',').unwrap();
                (label, p.parse().unwrap())
            })
            .collect();
        assert_eq!(parsed[0].0, "0-2");
        assert_eq!(parsed[1].0, "1-1");
        assert_eq!(parsed[2].0, "2-0");
        assert!((parsed[0].1 - 0.25).abs() < 1e-12);
        assert!((parsed[1].1 - 0.5).abs() < 1e-12);
    }

    #[test]
    fn coupon_collector_reference_points() {
        let v = coupon_collector_events(60, 20, LogBase::Natural);
        assert!((v - 12.283033686666302).abs() < 1e-9);
        let v = coupon_collector_events(2916, 54, LogBase::Natural);
        assert!((v - 430.81027702894164).abs() < 1e-6);
        // Base variants scale by 1/ln(base).
        let two = coupon_collector_events(60, 20, LogBase::Two);
        assert!((two - 12.283033686666302 / 2f64.ln()).abs() < 1e-9);
        let ten = coupon_collector_events(60, 20, LogBase::Ten);
        assert!((ten - 12.283033686666302 / 10f64.ln()).abs() < 1e-9);
    }
}
