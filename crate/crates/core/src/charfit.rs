//! Source-characterization analytics: HOM visibility extraction and
//! correction, purity relations, beta-factor and lifetime fits,
//! propagation-loss and grating efficiencies, and the efficiency budget.

use crate::fitting::{fit_multi_start, Problem};
use crate::table::CsvData;
use crate::{check_range, Error, Result};

// ---------------------------------------------------------------------------
// Purity relations
// ---------------------------------------------------------------------------

/// g2(0) = 2 xi - xi^2 from the single-photon impurity xi (residual laser
/// to signal intensity ratio).
pub fn g2_from_impurity(xi: f64) -> Result<f64> {
    check_range("xi", xi, 0.0, 1.0)?;
    Ok(2.0 * xi - xi * xi)
}

/// Inverse of `g2_from_impurity`: the root in [0, 1].
pub fn impurity_from_g2(g2: f64) -> Result<f64> {
    check_range("g2", g2, 0.0, 1.0)?;
    Ok(1.0 - (1.0 - g2).sqrt())
}

// ---------------------------------------------------------------------------
// HOM fringe fit and visibility correction
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HomPoint {
    pub theta_deg: f64,
    pub a0: f64,
    pub sigma: Option<f64>,
}

/// Polarization-scan record: normalized zero-delay peak amplitude versus
/// half-wave-plate angle, plus the interferometer calibration.
#[derive(Debug, Clone, PartialEq)]
pub struct HomScan {
    pub points: Vec<HomPoint>,
    /// Beam-splitter intensity reflectance and transmittance.
    pub r: f64,
    pub t: f64,
    /// Classical-visibility defect: (1 - epsilon) is the classical
    /// interference visibility achieved during alignment.
    pub epsilon: f64,
    pub g2: f64,
}

impl HomScan {
    pub fn new(points: Vec<HomPoint>, r: f64, t: f64, epsilon: f64, g2: f64) -> Result<Self> {
        for p in &points {
            if p.a0 < 0.0 {
                return Err(Error::OutOfRange {
                    name: "a0",
                    value: p.a0,
                    lo: 0.0,
                    hi: f64::INFINITY,
                });
            }
            if let Some(s) = p.sigma {
                if !(s > 0.0) {
                    return Err(Error::OutOfRange {
                        name: "sigma",
                        value: s,
                        lo: 0.0,
                        hi: f64::INFINITY,
                    });
                }
            }
        }
        check_range("R", r, 0.0, 1.0)?;
        check_range("T", t, 0.0, 1.0)?;
        check_range("epsilon", epsilon, 0.0, 1.0 - 1e-12)?;
        check_range("g2", g2, 0.0, 1.0 - 1e-12)?;
        Ok(Self {
            points,
            r,
            t,
            epsilon,
            g2,
        })
    }

    /// Lossless-splitter sanity check; a warning, not an error.
    pub fn splitter_imbalanced(&self) -> bool {
        !(0.99..=1.01).contains(&(self.r + self.t))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HomFit {
    pub a_m: f64,
    pub a_c: f64,
    /// Half-wave-plate offset, normalized to [0, 180) degrees.
    pub phi_deg: f64,
    pub v_raw: f64,
    pub residual_norm: f64,
    pub iterations: usize,
}

/// Fits A0(theta) = A_m - A_c sin^2(2 theta + phi) by weighted damped
/// Gauss-Newton with multi-start over phi. The fringe contrast is
/// parameterized as A_c = v * A_m, which enforces 0 <= A_c <= A_m and
/// makes V_raw = A_c/A_m a direct fit parameter.
pub fn fit_hom_scan(scan: &HomScan) -> Result<HomFit> {
    if scan.points.len() < 4 {
        return Err(Error::InvalidInput(format!(
            "HOM fit needs at least 4 points, got {}",
            scan.points.len()
        )));
    }
    let span = scan
        .points
        .iter()
        .map(|p| p.theta_deg)
        .fold(f64::NEG_INFINITY, f64::max)
        - scan
            .points
            .iter()
            .map(|p| p.theta_deg)
            .fold(f64::INFINITY, f64::min);
    if span < 45.0 {
        return Err(Error::InvalidInput(format!(
            "HOM scan spans only {span:.1} degrees; at least 45 are needed"
        )));
    }
    let x: Vec<f64> = scan.points.iter().map(|p| p.theta_deg).collect();
    let y: Vec<f64> = scan.points.iter().map(|p| p.a0).collect();
    let weights: Option<Vec<f64>> = scan
        .points
        .iter()
        .map(|p| p.sigma.map(|s| 1.0 / (s * s)))
        .collect();
    let model = |p: &[f64], theta: f64| {
        let s = ((2.0 * theta + p[2]).to_radians()).sin();
        p[0] * (1.0 - p[1] * s * s)
    };
    let a_m0 = y.iter().cloned().fold(f64::NEG_INFINITY, f64::max).max(1e-9);
    let problem = Problem {
        model: &model,
        x: &x,
        y: &y,
        weights: weights.as_deref(),
        lower: &[1e-12, 0.0, -360.0],
        upper: &[f64::INFINITY, 1.0, 720.0],
    };
    let starts: Vec<Vec<f64>> = [0.0, 45.0, 90.0, 135.0]
        .iter()
        .map(|&phi| vec![a_m0, 0.5, phi])
        .collect();
    let out = fit_multi_start(&problem, &starts)?;
    let (a_m, v_raw, phi) = (out.params[0], out.params[1], out.params[2]);
    Ok(HomFit {
        a_m,
        a_c: a_m * v_raw,
        phi_deg: phi.rem_euclid(180.0),
        v_raw,
        residual_norm: out.residual_norm,
        iterations: out.iterations,
    })
}

/// Intrinsic visibility corrected for splitter imbalance, classical
/// contrast and multiphoton contamination.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrectedVisibility {
    /// Unclipped corrected value; may exceed 1 on noisy inputs.
    pub value: f64,
    pub over_unity: bool,
    pub splitter_imbalanced: bool,
}

/// V = (1 + 2 g2) (R^2 + T^2) V_raw / (2 R T (1 - epsilon)^2).
pub fn corrected_visibility(
    v_raw: f64,
    g2: f64,
    r: f64,
    t: f64,
    epsilon: f64,
) -> Result<CorrectedVisibility> {
    check_range("v_raw", v_raw, 0.0, 1.0)?;
    check_range("g2", g2, 0.0, 1.0 - 1e-12)?;
    check_range("epsilon", epsilon, 0.0, 1.0 - 1e-12)?;
    if !(r > 0.0 && t > 0.0) {
        return Err(Error::InvalidInput(
            "beam-splitter coefficients must be positive".into(),
        ));
    }
    let value = (1.0 + 2.0 * g2) * (r * r + t * t) * v_raw
        / (2.0 * r * t * (1.0 - epsilon) * (1.0 - epsilon));
    Ok(CorrectedVisibility {
        value,
        over_unity: value > 1.0,
        splitter_imbalanced: !(0.99..=1.01).contains(&(r + t)),
    })
}

// ---------------------------------------------------------------------------
// Resonant transmission dip and the beta factor
// ---------------------------------------------------------------------------

/// Resonant transmission past a waveguide-coupled dipole with natural
/// linewidth `gamma`, dephasing `gamma_d`, coupling `beta` and Fano
/// asymmetry `chi`, all rates in the same frequency units as the detuning.
pub fn transmission_model(dnu: f64, gamma: f64, gamma_d: f64, beta: f64, chi: f64) -> f64 {
    let g2d = gamma + 2.0 * gamma_d;
    let four_d2 = 4.0 * dnu * dnu;
    let numerator = (g2d * ((beta - 1.0) * (beta - 1.0) * gamma + 2.0 * gamma_d) + four_d2)
        * (1.0 + chi * chi);
    let fano = (beta - 1.0) * gamma - 2.0 * gamma_d;
    let denominator =
        g2d * g2d + four_d2 + 4.0 * beta * gamma * chi * dnu + (fano * fano + four_d2) * chi * chi;
    numerator / denominator
}

/// Transmission-dip record: (detuning GHz, transmission) with strictly
/// increasing detunings.
#[derive(Debug, Clone, PartialEq)]
pub struct TransmissionScan {
    pub points: Vec<(f64, f64)>,
}

impl TransmissionScan {
    pub fn new(points: Vec<(f64, f64)>) -> Result<Self> {
        for pair in points.windows(2) {
            if pair[1].0 <= pair[0].0 {
                return Err(Error::InvalidInput(
                    "detunings must be strictly increasing".into(),
                ));
            }
        }
        for &(_, t) in &points {
            check_range("transmission", t, 0.0, 1.5)?;
        }
        Ok(Self { points })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BetaFit {
    pub beta: f64,
    /// One-sigma half-width from the Jacobian at the solution; NaN when the
    /// normal matrix is singular.
    pub beta_uncertainty: f64,
    pub gamma_d: f64,
    pub chi: f64,
    pub resonance_offset: f64,
    pub residual_norm: f64,
}

fn median(values: &mut [f64]) -> f64 {
    values.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    }
}

/// Fits the transmission dip with the natural linewidth fixed from
/// time-resolved data; returns the waveguide coupling beta with its
/// one-sigma half-width.
///
/// Transmission noise is treated as multiplicative: after an unweighted
/// multi-start pass, the fit is repeated once with weights taken from the
/// first-pass model (iterative reweighting). The deep dip floor then
/// carries its full statistical weight, which is what pins beta against
/// the dephasing rate.
pub fn fit_beta(scan: &TransmissionScan, gamma_ghz: f64) -> Result<BetaFit> {
    if !(gamma_ghz > 0.0) {
        return Err(Error::OutOfRange {
            name: "gamma",
            value: gamma_ghz,
            lo: 0.0,
            hi: f64::INFINITY,
        });
    }
    if scan.points.len() < 8 {
        return Err(Error::InvalidInput(format!(
            "beta fit needs at least 8 points bracketing the dip, got {}",
            scan.points.len()
        )));
    }
    let x: Vec<f64> = scan.points.iter().map(|p| p.0).collect();
    let y: Vec<f64> = scan.points.iter().map(|p| p.1).collect();
    let (min_idx, &min_t) = y
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.partial_cmp(b.1).unwrap())
        .expect("non-empty scan");
    // Noise from first differences (the smooth dip cancels out); depth from
    // the 5th/95th percentile spread so isolated outliers cannot fake a dip.
    let mut diffs: Vec<f64> = y.windows(2).map(|w| (w[1] - w[0]).abs()).collect();
    let noise = 1.4826 * median(&mut diffs) / std::f64::consts::SQRT_2;
    let mut sorted = y.clone();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let q = |frac: f64| sorted[((sorted.len() - 1) as f64 * frac) as usize];
    let depth = q(0.95) - q(0.05);
    let floor = (5.0 * noise).max(1e-3);
    if depth <= floor {
        return Err(Error::NoResonance { depth, floor });
    }
    if min_idx == 0 || min_idx == y.len() - 1 {
        return Err(Error::InvalidInput(
            "transmission minimum sits on the scan edge; the dip is not bracketed".into(),
        ));
    }

    let model = move |p: &[f64], dnu: f64| transmission_model(dnu - p[3], gamma_ghz, p[1], p[0], p[2]);
    let lower = [0.0, 0.0, -10.0, x[0]];
    let upper = [1.0, f64::INFINITY, 10.0, x[x.len() - 1]];
    let unweighted = Problem {
        model: &model,
        x: &x,
        y: &y,
        weights: None,
        lower: &lower,
        upper: &upper,
    };
    let beta0 = (1.0 - min_t.max(0.0).sqrt()).clamp(0.05, 0.999);
    let nu0 = x[min_idx];
    let starts: Vec<Vec<f64>> = [-0.3, 0.0, 0.3]
        .iter()
        .map(|&chi| vec![beta0, 0.1 * gamma_ghz, chi, nu0])
        .collect();
    let first = fit_multi_start(&unweighted, &starts)?;
    let weights: Vec<f64> = x
        .iter()
        .map(|&dnu| {
            let t = model(&first.params, dnu).max(1e-3);
            1.0 / (t * t)
        })
        .collect();
    let reweighted = Problem {
        weights: Some(&weights),
        ..unweighted
    };
    let out = fit_multi_start(&reweighted, std::slice::from_ref(&first.params))?;
    let beta_uncertainty = if out.covariance.is_empty() {
        f64::NAN
    } else {
        out.covariance[0].max(0.0).sqrt()
    };
    Ok(BetaFit {
        beta: out.params[0],
        beta_uncertainty,
        gamma_d: out.params[1],
        chi: out.params[2],
        resonance_offset: out.params[3],
        residual_norm: out.residual_norm,
    })
}

/// beta = 1 - gamma_nonguided / gamma_total from the lifetime comparison
/// between waveguide-coupled and bulk emitters.
pub fn beta_from_rates(gamma_total: f64, gamma_nonguided: f64) -> Result<f64> {
    if !(gamma_total > 0.0) || gamma_nonguided < 0.0 || gamma_nonguided > gamma_total {
        return Err(Error::InvalidInput(format!(
            "need 0 <= gamma_nonguided <= gamma_total (got {gamma_nonguided} and {gamma_total})"
        )));
    }
    Ok(1.0 - gamma_nonguided / gamma_total)
}

// ---------------------------------------------------------------------------
// Lifetime fit
// ---------------------------------------------------------------------------

/// Time-resolved decay histogram with the Gaussian sigma of the instrument
/// response.
#[derive(Debug, Clone, PartialEq)]
pub struct DecayHistogram {
    pub bins: Vec<(f64, f64)>,
    pub irf_sigma_ns: f64,
}

impl DecayHistogram {
    pub fn new(bins: Vec<(f64, f64)>, irf_sigma_ns: f64) -> Result<Self> {
        for pair in bins.windows(2) {
            if pair[1].0 <= pair[0].0 {
                return Err(Error::InvalidInput("bin times must be increasing".into()));
            }
        }
        for &(_, c) in &bins {
            if c < 0.0 {
                return Err(Error::OutOfRange {
                    name: "counts",
                    value: c,
                    lo: 0.0,
                    hi: f64::INFINITY,
                });
            }
        }
        if irf_sigma_ns < 0.0 {
            return Err(Error::OutOfRange {
                name: "irf_sigma_ns",
                value: irf_sigma_ns,
                lo: 0.0,
                hi: f64::INFINITY,
            });
        }
        Ok(Self { bins, irf_sigma_ns })
    }
}

/// Scaled complementary error function exp(x^2) erfc(x); asymptotic series
/// beyond x = 20 where the direct product would overflow.
fn erfcx(x: f64) -> f64 {
    if x < 20.0 {
        (x * x).exp() * libm::erfc(x)
    } else {
        // Six terms reach machine precision for x >= 20.
        let mut sum = 1.0;
        let mut term = 1.0;
        for k in 1..=6u32 {
            term *= -((2 * k - 1) as f64) / (2.0 * x * x);
            sum += term;
        }
        sum / (x * std::f64::consts::PI.sqrt())
    }
}

/// Exponential decay exp(-gamma (t - t0)) convolved with a Gaussian IRF of
/// width sigma, in the numerically stable split form. Reduces to the sharp
/// exponential at sigma = 0; peak-normalized to O(1) amplitudes.
pub fn decay_response(t: f64, gamma: f64, t0: f64, sigma: f64) -> f64 {
    let delta = t - t0;
    if sigma == 0.0 {
        return if delta < 0.0 { 0.0 } else { (-gamma * delta).exp() };
    }
    let b = (gamma * sigma * sigma - delta) / (sigma * std::f64::consts::SQRT_2);
    if b >= 0.0 {
        0.5 * (-delta * delta / (2.0 * sigma * sigma)).exp() * erfcx(b)
    } else {
        0.5 * (0.5 * gamma * gamma * sigma * sigma - gamma * delta).exp() * libm::erfc(b)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LifetimeFit {
    /// Radiative decay rate, 1/ns.
    pub gamma_per_ns: f64,
    pub amplitude: f64,
    pub offset: f64,
    /// Decay start; seeded at the histogram maximum and refined by the fit.
    pub t0_ns: f64,
    pub residual_norm: f64,
}

/// Fits A * decay_response(t; gamma, t0, irf) + B to the histogram.
pub fn fit_lifetime(h: &DecayHistogram) -> Result<LifetimeFit> {
    let peak_idx = h
        .bins
        .iter()
        .enumerate()
        .max_by(|a, b| a.1 .1.partial_cmp(&b.1 .1).unwrap())
        .map(|(i, _)| i)
        .ok_or_else(|| Error::InvalidInput("empty histogram".into()))?;
    if h.bins.len() - peak_idx < 20 {
        return Err(Error::InvalidInput(format!(
            "lifetime fit needs at least 20 bins past the peak, got {}",
            h.bins.len() - peak_idx
        )));
    }
    let x: Vec<f64> = h.bins.iter().map(|b| b.0).collect();
    let y: Vec<f64> = h.bins.iter().map(|b| b.1).collect();
    let b0 = y.iter().cloned().fold(f64::INFINITY, f64::min);
    let a0 = (y[peak_idx] - b0).max(1e-9);
    let t_peak = x[peak_idx];
    // Log-slope over the decaying half seeds gamma.
    let half = peak_idx + (x.len() - peak_idx) / 2;
    let gamma0 = {
        let c1 = (y[peak_idx] - b0).max(1e-9);
        let c2 = (y[half] - b0).max(1e-9);
        let dt = (x[half] - x[peak_idx]).max(1e-9);
        ((c1 / c2).ln() / dt).clamp(1e-3, 1e3)
    };
    let sigma = h.irf_sigma_ns;
    let model = move |p: &[f64], t: f64| p[0] * decay_response(t, p[1], p[2], sigma) + p[3];
    let problem = Problem {
        model: &model,
        x: &x,
        y: &y,
        weights: None,
        lower: &[0.0, 1e-6, x[0], 0.0],
        upper: &[f64::INFINITY, 1e6, x[x.len() - 1], f64::INFINITY],
    };
    let starts: Vec<Vec<f64>> = [gamma0, 2.0 * gamma0, 0.5 * gamma0]
        .iter()
        .map(|&g| vec![a0, g, t_peak, b0])
        .collect();
    let out = fit_multi_start(&problem, &starts)?;
    if out.params[1] <= 1e-6 {
        return Err(Error::FitDiverged("decay rate collapsed to zero".into()));
    }
    Ok(LifetimeFit {
        gamma_per_ns: out.params[1],
        amplitude: out.params[0],
        offset: out.params[3],
        t0_ns: out.params[2],
        residual_norm: out.residual_norm,
    })
}

// ---------------------------------------------------------------------------
// Propagation loss and grating efficiencies
// ---------------------------------------------------------------------------

/// Slope magnitude of 10 log10(I) versus length: propagation loss in dB per
/// unit length.
pub fn fit_propagation_loss(points: &[(f64, f64)]) -> Result<f64> {
    if points.len() < 3 {
        return Err(Error::InvalidInput(format!(
            "loss fit needs at least 3 lengths, got {}",
            points.len()
        )));
    }
    let mut lengths: Vec<f64> = points.iter().map(|p| p.0).collect();
    lengths.sort_by(|a, b| a.partial_cmp(b).unwrap());
    if lengths.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::InvalidInput("waveguide lengths must be distinct".into()));
    }
    for &(_, intensity) in points {
        if !(intensity > 0.0) {
            return Err(Error::InvalidInput(
                "intensities must be positive for the logarithmic fit".into(),
            ));
        }
    }
    let n = points.len() as f64;
    let (mut sx, mut sy, mut sxx, mut sxy) = (0.0, 0.0, 0.0, 0.0);
    for &(l, i) in points {
        let db = 10.0 * i.log10();
        sx += l;
        sy += db;
        sxx += l * l;
        sxy += l * db;
    }
    let slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    Ok(slope.abs())
}

/// Fraction surviving `length_mm` of waveguide at `loss_db_per_mm`.
pub fn propagation_efficiency(loss_db_per_mm: f64, length_mm: f64) -> Result<f64> {
    if loss_db_per_mm < 0.0 || length_mm < 0.0 {
        return Err(Error::InvalidInput(
            "loss and length must be nonnegative".into(),
        ));
    }
    Ok(10f64.powf(-loss_db_per_mm * length_mm / 10.0))
}

/// Shallow-etched grating efficiency from the two-grating transmission
/// measurement: sqrt(I_seg * R_dbr / I_ref).
pub fn seg_efficiency(i_seg: f64, i_ref: f64, r_dbr: f64) -> Result<f64> {
    if i_seg < 0.0 || !(i_ref > 0.0) {
        return Err(Error::InvalidInput(
            "intensities must be positive (I_seg may be zero)".into(),
        ));
    }
    check_range("r_dbr", r_dbr, 1e-12, 1.0)?;
    Ok((i_seg * r_dbr / i_ref).sqrt())
}

/// Radiative duty cycle 1/(1+b) of a bright/dark telegraph emitter whose
/// correlation bunching envelope is 1 + b exp(-tau/tau_b).
pub fn eta_rad_from_bunching(b: f64) -> Result<f64> {
    if b < 0.0 {
        return Err(Error::OutOfRange {
            name: "bunching",
            value: b,
            lo: 0.0,
            hi: f64::INFINITY,
        });
    }
    Ok(1.0 / (1.0 + b))
}

/// Intrinsic source efficiency: product of the dipole branching, waveguide
/// coupling, zero-phonon-line fraction and radiative duty cycle.
pub fn source_efficiency(eta_y: f64, beta: f64, eta_zpl: f64, eta_rad: f64) -> Result<f64> {
    check_range("eta_y", eta_y, 0.0, 1.0)?;
    check_range("beta", beta, 0.0, 1.0)?;
    check_range("eta_zpl", eta_zpl, 0.0, 1.0)?;
    check_range("eta_rad", eta_rad, 0.0, 1.0)?;
    Ok(eta_y * beta * eta_zpl * eta_rad)
}

// ---------------------------------------------------------------------------
// Efficiency budget
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq)]
pub struct BudgetStage {
    pub name: String,
    pub efficiency: f64,
    pub uncertainty: f64,
}

/// Ordered ledger of stage efficiencies with absolute uncertainties.
#[derive(Debug, Clone, PartialEq)]
pub struct EfficiencyBudget {
    pub stages: Vec<BudgetStage>,
    pub rep_rate_hz: f64,
}

impl EfficiencyBudget {
    pub fn new(stages: Vec<BudgetStage>, rep_rate_hz: f64) -> Result<Self> {
        if !(rep_rate_hz > 0.0) {
            return Err(Error::OutOfRange {
                name: "rep_rate_hz",
                value: rep_rate_hz,
                lo: 0.0,
                hi: f64::INFINITY,
            });
        }
        for s in &stages {
            check_range("efficiency", s.efficiency, 0.0, 1.0)?;
            if s.uncertainty < 0.0 {
                return Err(Error::OutOfRange {
                    name: "uncertainty",
                    value: s.uncertainty,
                    lo: 0.0,
                    hi: f64::INFINITY,
                });
            }
        }
        Ok(Self { stages, rep_rate_hz })
    }

    /// Expected rate rep * prod(eta_i) with the first-order uncertainty
    /// (stage contributions summed in quadrature). Order-independent.
    pub fn expected_rate(&self) -> Result<(f64, f64)> {
        if self.stages.is_empty() {
            return Err(Error::InvalidInput("budget has no stages".into()));
        }
        let rate = self.rep_rate_hz * self.stages.iter().map(|s| s.efficiency).product::<f64>();
        let mut var = 0.0;
        for (i, stage) in self.stages.iter().enumerate() {
            if stage.uncertainty == 0.0 {
                continue;
            }
            let others: f64 = self
                .stages
                .iter()
                .enumerate()
                .filter(|(j, _)| *j != i)
                .map(|(_, s)| s.efficiency)
                .product();
            let partial = self.rep_rate_hz * others * stage.uncertainty;
            var += partial * partial;
        }
        Ok((rate, var.sqrt()))
    }

    /// Parses the budget CSV schema: `# rep_rate_hz: <Hz>` meta line plus
    /// `stage,efficiency,uncertainty` rows.
    pub fn parse_csv(text: &str) -> Result<Self> {
        let mut rep_rate = None;
        let mut stages = Vec::new();
        let mut saw_header = false;
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix('#') {
                if let Some((k, v)) = rest.split_once(':') {
                    if k.trim() == "rep_rate_hz" {
                        rep_rate = Some(v.trim().parse::<f64>().map_err(|_| Error::Csv {
                            line: line_no,
                            msg: format!("cannot parse rep rate `{}`", v.trim()),
                        })?);
                    }
                }
                continue;
            }
            let cells: Vec<&str> = line.split(',').map(str::trim).collect();
            if !saw_header {
                if cells != ["stage", "efficiency", "uncertainty"] {
                    return Err(Error::Csv {
                        line: line_no,
                        msg: "expected header `stage,efficiency,uncertainty`".into(),
                    });
                }
                saw_header = true;
                continue;
            }
            if cells.len() != 3 {
                return Err(Error::Csv {
                    line: line_no,
                    msg: format!("expected 3 columns, found {}", cells.len()),
                });
            }
            let eff: f64 = cells[1].parse().map_err(|_| Error::Csv {
                line: line_no,
                msg: format!("cannot parse efficiency `{}`", cells[1]),
            })?;
            let unc: f64 = cells[2].parse().map_err(|_| Error::Csv {
                line: line_no,
                msg: format!("cannot parse uncertainty `{}`", cells[2]),
            })?;
            stages.push(BudgetStage {
                name: cells[0].to_string(),
                efficiency: eff,
                uncertainty: unc,
            });
        }
        if !saw_header {
            return Err(Error::Csv {
                line: 1,
                msg: "file has no header row".into(),
            });
        }
        let rep_rate = rep_rate.ok_or(Error::Csv {
            line: 1,
            msg: "missing `# rep_rate_hz: <Hz>` meta line".into(),
        })?;
        Self::new(stages, rep_rate)
    }
}

// ---------------------------------------------------------------------------
// CSV adapters for the measurement schemas
// ---------------------------------------------------------------------------

/// HOM scan from a `theta_deg,a0[,sigma]` table plus the interferometer
/// calibration.
pub fn hom_scan_from_csv(
    csv: &CsvData,
    r: f64,
    t: f64,
    epsilon: f64,
    g2: f64,
) -> Result<HomScan> {
    let ci_theta = csv.column("theta_deg")?;
    let ci_a0 = csv.column("a0")?;
    let ci_sigma = csv.optional_column("sigma");
    let points = csv
        .rows
        .iter()
        .map(|row| HomPoint {
            theta_deg: row[ci_theta],
            a0: row[ci_a0],
            sigma: ci_sigma.map(|c| row[c]),
        })
        .collect();
    HomScan::new(points, r, t, epsilon, g2)
}

/// Transmission scan from a `detuning_ghz,transmission` table.
pub fn transmission_scan_from_csv(csv: &CsvData) -> Result<TransmissionScan> {
    let ci_d = csv.column("detuning_ghz")?;
    let ci_t = csv.column("transmission")?;
    TransmissionScan::new(csv.rows.iter().map(|r| (r[ci_d], r[ci_t])).collect())
}

/// Decay histogram from a `time_ns,counts` table.
pub fn decay_histogram_from_csv(csv: &CsvData, irf_sigma_ns: f64) -> Result<DecayHistogram> {
    let ci_t = csv.column("time_ns")?;
    let ci_c = csv.column("counts")?;
    DecayHistogram::new(
        csv.rows.iter().map(|r| (r[ci_t], r[ci_c])).collect(),
        irf_sigma_ns,
    )
}

/// Propagation-loss points from a `length_mm,intensity` table.
pub fn loss_points_from_csv(csv: &CsvData) -> Result<Vec<(f64, f64)>> {
    let ci_l = csv.column("length_mm")?;
    let ci_i = csv.column("intensity")?;
    Ok(csv.rows.iter().map(|r| (r[ci_l], r[ci_i])).collect())
}
