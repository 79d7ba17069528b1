//! Photon-overlap matrices and the variational-distance bound.
//!
//! The overlap matrix S has unit diagonal and S_ij = sqrt(V_ij), where V_ij
//! is the pairwise HOM visibility; entries are real nonnegative because only
//! |S_ij|^2 is measured. The variational distance between a partially
//! distinguishable sampler and the ideal one is bounded by 1 - perm(S)/N!.

use crate::matrix::ComplexMatrix;
use crate::permanent::{self, RYSER_CAP};
use crate::{check_range, Error, Result};
use serde::{Deserialize, Serialize};

/// Symmetric overlap matrix with unit diagonal and entries in [0, 1].
#[derive(Debug, Clone, PartialEq)]
pub struct DistinguishabilityMatrix {
    n: usize,
    entries: Vec<f64>,
}

/// Off-diagonal entries matching to within this tolerance count as uniform,
/// which routes evaluation to the closed-form permanent.
const UNIFORM_TOL: f64 = 1e-12;

impl DistinguishabilityMatrix {
    pub fn new(n: usize, entries: Vec<f64>) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyMatrix);
        }
        if entries.len() != n * n {
            return Err(Error::InvalidInput(format!(
                "expected {} entries for a {n}x{n} overlap matrix, got {}",
                n * n,
                entries.len()
            )));
        }
        for i in 0..n {
            if entries[i * n + i] != 1.0 {
                return Err(Error::InvalidInput(format!(
                    "overlap matrix diagonal must be exactly 1 (entry {i},{i} = {})",
                    entries[i * n + i]
                )));
            }
            for j in 0..n {
                let s = entries[i * n + j];
                check_range("S_ij", s, 0.0, 1.0)?;
                if (s - entries[j * n + i]).abs() != 0.0 {
                    return Err(Error::InvalidInput(format!(
                        "overlap matrix must be symmetric (entries {i},{j} and {j},{i} differ)"
                    )));
                }
            }
        }
        Ok(Self { n, entries })
    }

    /// Uniform overlap: S_ij = s off-diagonal, 1 on the diagonal.
    pub fn uniform_overlap(n: usize, s: f64) -> Result<Self> {
        check_range("overlap", s, 0.0, 1.0)?;
        let mut entries = vec![s; n * n];
        for i in 0..n {
            entries[i * n + i] = 1.0;
        }
        Self::new(n, entries)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn overlap(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.n + j]
    }

    /// Pairwise visibility V_ij = S_ij^2.
    pub fn visibility(&self, i: usize, j: usize) -> f64 {
        self.overlap(i, j).powi(2)
    }

    /// Some(x) when every off-diagonal entry equals x (within 1e-12), which
    /// unlocks the closed-form permanent for any n.
    pub fn uniform_off_diagonal(&self) -> Option<f64> {
        if self.n == 1 {
            return Some(1.0);
        }
        let x = self.overlap(0, 1);
        for i in 0..self.n {
            for j in 0..self.n {
                if i != j && (self.overlap(i, j) - x).abs() > UNIFORM_TOL {
                    return None;
                }
            }
        }
        Some(x)
    }

    pub fn to_complex_matrix(&self) -> ComplexMatrix {
        ComplexMatrix::from_real_rows(
            (0..self.n)
                .map(|i| (0..self.n).map(|j| self.overlap(i, j)).collect())
                .collect(),
        )
        .expect("overlap matrix is square and finite")
    }
}

/// Functional form of the pairwise visibility over a pulse train.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DecayKind {
    Uniform,
    Geometric,
    Linear,
}

/// V_ij = v0 * f(|i-j|) with f given by `kind`:
/// uniform f = 1, geometric f(d) = (1-rate)^d, linear f(d) = max(0, 1 - rate*d).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DecayModel {
    pub kind: DecayKind,
    pub v0: f64,
    #[serde(default)]
    pub rate: f64,
}

impl DecayModel {
    pub fn uniform(v0: f64) -> Self {
        Self {
            kind: DecayKind::Uniform,
            v0,
            rate: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        check_range("v0", self.v0, 0.0, 1.0)?;
        match self.kind {
            DecayKind::Uniform => Ok(()),
            DecayKind::Geometric => check_range("rate", self.rate, 0.0, 1.0).map(|_| ()),
            DecayKind::Linear => {
                if self.rate < 0.0 || !self.rate.is_finite() {
                    return Err(Error::OutOfRange {
                        name: "rate",
                        value: self.rate,
                        lo: 0.0,
                        hi: f64::INFINITY,
                    });
                }
                Ok(())
            }
        }
    }

    fn factor(&self, distance: usize) -> f64 {
        match self.kind {
            DecayKind::Uniform => 1.0,
            DecayKind::Geometric => (1.0 - self.rate).powi(distance as i32),
            DecayKind::Linear => (1.0 - self.rate * distance as f64).max(0.0),
        }
    }

    /// Short deterministic label used in output metadata.
    pub fn label(&self) -> String {
        match self.kind {
            DecayKind::Uniform => format!("uniform(v0={})", self.v0),
            DecayKind::Geometric => format!("geometric(v0={},rate={})", self.v0, self.rate),
            DecayKind::Linear => format!("linear(v0={},rate={})", self.v0, self.rate),
        }
    }
}

/// Overlap matrix for a source with uniform pairwise visibility V:
/// S_ij = sqrt(V) off the diagonal.
pub fn build_uniform(n: usize, v: f64) -> Result<DistinguishabilityMatrix> {
    check_range("V", v, 0.0, 1.0)?;
    DistinguishabilityMatrix::uniform_overlap(n, v.sqrt())
}

/// Overlap matrix for a source whose visibility decays with pulse
/// separation |i-j| per the model; visibilities are clipped to [0, 1].
pub fn build_decaying(n: usize, model: &DecayModel) -> Result<DistinguishabilityMatrix> {
    model.validate()?;
    if n == 0 {
        return Err(Error::EmptyMatrix);
    }
    let mut entries = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            entries[i * n + j] = if i == j {
                1.0
            } else {
                let v = (model.v0 * model.factor(i.abs_diff(j))).clamp(0.0, 1.0);
                v.sqrt()
            };
        }
    }
    DistinguishabilityMatrix::new(n, entries)
}

/// Upper bound D = 1 - perm(S)/n! on the variational distance from the
/// ideal sampler. Uniform matrices use the closed form (any n); general
/// matrices go through the Ryser engine (n <= 30).
pub fn variational_distance_bound(s: &DistinguishabilityMatrix) -> Result<f64> {
    let log_norm = if let Some(x) = s.uniform_off_diagonal() {
        permanent::perm_uniform_normalized(s.n(), x)?.log_magnitude
    } else if s.n() <= RYSER_CAP {
        permanent::perm_normalized(&s.to_complex_matrix())?.log_magnitude
    } else {
        return Err(Error::NonUniformTooLarge {
            n: s.n(),
            cap: RYSER_CAP,
        });
    };
    // 1 - e^log computed as -expm1 so V = 1 gives exactly 0.
    Ok((-f64::exp_m1(log_norm)).clamp(0.0, 1.0))
}

/// Variational distance between ideal and fully distinguishable samplers
/// over Haar-averaged networks: (n-1)/n.
pub fn distance_distinguishable(n: usize) -> f64 {
    if n == 0 {
        return 0.0;
    }
    (n as f64 - 1.0) / n as f64
}

/// Separation Delta = 1 - D_bound/D_dist, clipped to [0, 1]. At n = 1 both
/// distances vanish and the separation is taken as 1 (nothing to
/// distinguish).
pub fn delta_separation(s: &DistinguishabilityMatrix) -> Result<f64> {
    let d_dist = distance_distinguishable(s.n());
    if d_dist == 0.0 {
        return Ok(1.0);
    }
    let d = variational_distance_bound(s)?;
    Ok((1.0 - d / d_dist).clamp(0.0, 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn build_uniform_values() {
        let s = build_uniform(3, 1.0).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(s.overlap(i, j), 1.0);
            }
        }
        let s = build_uniform(2, 0.0).unwrap();
        assert_eq!(s.overlap(0, 1), 0.0);
        assert_eq!(s.overlap(0, 0), 1.0);
        let s = build_uniform(2, 0.96).unwrap();
        assert!((s.overlap(0, 1) - 0.9798).abs() < 5e-5);
        assert!((s.overlap(0, 1) - 0.96f64.sqrt()).abs() < 1e-15);
        assert!(build_uniform(2, 1.2).is_err());
    }

    #[test]
    fn build_decaying_matches_examples() {
        let geo0 = DecayModel {
            kind: DecayKind::Geometric,
            v0: 0.7,
            rate: 0.0,
        };
        let a = build_decaying(5, &geo0).unwrap();
        let b = build_uniform(5, 0.7).unwrap();
        assert_eq!(a, b);

        let lin = DecayModel {
            kind: DecayKind::Linear,
            v0: 1.0,
            rate: 0.3,
        };
        let s = build_decaying(6, &lin).unwrap();
        assert!((s.visibility(0, 5) - 0.0f64.max(1.0 - 0.3 * 5.0)).abs() < 1e-12);

        let geo = DecayModel {
            kind: DecayKind::Geometric,
            v0: 0.9,
            rate: 0.05,
        };
        let s = build_decaying(4, &geo).unwrap();
        assert!((s.visibility(0, 3) - 0.9 * 0.95f64.powi(3)).abs() < 1e-12);

        let bad = DecayModel {
            kind: DecayKind::Geometric,
            v0: 0.9,
            rate: 1.5,
        };
        assert!(build_decaying(4, &bad).is_err());
    }

    #[test]
    fn distance_bound_reference_points() {
        // All-ones (V = 1): ideal photons, D = 0 exactly.
        let s = build_uniform(7, 1.0).unwrap();
        assert_eq!(variational_distance_bound(&s).unwrap(), 0.0);
        // Identity overlap at n = 2: 1 - 1/2! = 0.5.
        let s = DistinguishabilityMatrix::uniform_overlap(2, 0.0).unwrap();
        assert!((variational_distance_bound(&s).unwrap() - 0.5).abs() < 1e-14);
        // Large-n uniform: closed form reachable far beyond the Ryser cap.
        let s = build_uniform(54, 0.96).unwrap();
        let d = variational_distance_bound(&s).unwrap();
        assert!((0.50..=0.70).contains(&d), "D = {d}");
        // Recorded value from the closed-form evaluation.
        assert!((d - 0.660938).abs() < 5e-6, "D = {d}");
    }

    #[test]
    fn general_matrix_routes_through_ryser() {
        let geo = DecayModel {
            kind: DecayKind::Geometric,
            v0: 0.9,
            rate: 0.05,
        };
        let s = build_decaying(6, &geo).unwrap();
        assert!(s.uniform_off_diagonal().is_none());
        let d = variational_distance_bound(&s).unwrap();
        assert!(d > 0.0 && d < 1.0);
        let big = build_decaying(31, &geo).unwrap();
        assert!(matches!(
            variational_distance_bound(&big),
            Err(Error::NonUniformTooLarge { n: 31, cap: 30 })
        ));
    }

    #[test]
    fn distance_monotone_in_pairwise_visibility() {
        // Lowering any single V_ij must not decrease the bound.
        let n = 5;
        let base = build_uniform(n, 0.9).unwrap();
        let d0 = variational_distance_bound(&base).unwrap();
        for i in 0..n {
            for j in (i + 1)..n {
                let mut entries: Vec<f64> = (0..n * n)
                    .map(|k| base.overlap(k / n, k % n))
                    .collect();
                entries[i * n + j] -= 0.05;
                entries[j * n + i] -= 0.05;
                let perturbed = DistinguishabilityMatrix::new(n, entries).unwrap();
                let d = variational_distance_bound(&perturbed).unwrap();
                assert!(d >= d0 - 1e-12, "({i},{j}): {d} < {d0}");
            }
        }
    }

    #[test]
    fn distinguishable_distance_values() {
        assert_eq!(distance_distinguishable(1), 0.0);
        assert_eq!(distance_distinguishable(2), 0.5);
        assert!((distance_distinguishable(54) - 53.0 / 54.0).abs() < 1e-15);
    }

    #[test]
    fn separation_reference_points() {
        let ideal = build_uniform(9, 1.0).unwrap();
        assert_eq!(delta_separation(&ideal).unwrap(), 1.0);
        // Identity overlap at n = 2: D = 0.5 = D_dist, separation 0.
        let s = DistinguishabilityMatrix::uniform_overlap(2, 0.0).unwrap();
        assert!(delta_separation(&s).unwrap().abs() < 1e-14);
        let s = build_uniform(54, 0.96).unwrap();
        let delta = delta_separation(&s).unwrap();
        assert!((0.30..=0.50).contains(&delta), "delta = {delta}");
        // n = 1: nothing to distinguish.
        let s = build_uniform(1, 0.4).unwrap();
        assert_eq!(delta_separation(&s).unwrap(), 1.0);
    }

    #[test]
    fn separation_monotone_in_n() {
        let mut prev = f64::INFINITY;
        for n in [2usize, 5, 10, 20, 54, 90, 120] {
            let s = build_uniform(n, 0.96).unwrap();
            let delta = delta_separation(&s).unwrap();
            assert!(delta <= prev + 1e-12, "n = {n}");
            prev = delta;
        }
    }
}
