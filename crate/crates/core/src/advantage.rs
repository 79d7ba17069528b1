//! Quantum-advantage threshold engine.
//!
//! The classical side truncates N-photon interference at order k; the error
//! of that approximation is bounded by sqrt((eta V)^(k+1) / (1 - eta V)),
//! so a runtime budget caps k and therefore the largest source efficiency a
//! classical machine can imitate. The experimental side must collect enough
//! collision-free multiphoton events within the same wall-clock budget. The
//! crossing of the two efficiency curves over the photon number n yields
//! the advantage threshold (N*, eta*).

use crate::distinguishability::{self, DecayModel};
use crate::interference::{collision_free_prob, coupon_collector_events, LogBase};
use crate::permanent::{classical_flops, CostModel};
use crate::table::CurveTable;
use crate::{check_range, map_ordered, Error, Result};
use serde::{Deserialize, Serialize};

/// Rule mapping the photon number n to the network mode count M.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum ModeRule {
    /// M = n^2, the standard collision-free regime.
    Quadratic,
    /// M = round(factor * n).
    Linear { factor: f64 },
    /// M fixed regardless of n.
    Fixed { modes: usize },
}

impl ModeRule {
    pub fn modes(&self, n: usize) -> usize {
        match *self {
            ModeRule::Quadratic => n * n,
            ModeRule::Linear { factor } => (factor * n as f64).round() as usize,
            ModeRule::Fixed { modes } => modes,
        }
    }

    pub fn label(&self) -> String {
        match *self {
            ModeRule::Quadratic => "quadratic".into(),
            ModeRule::Linear { factor } => format!("linear(factor={factor})"),
            ModeRule::Fixed { modes } => format!("fixed(modes={modes})"),
        }
    }
}

/// Multiphoton attempt rate delivered by the demultiplexed source.
///
/// `Pulse` counts one n-photon attempt per laser pulse (rep_rate); `Demux`
/// charges the demultiplexer, so n pulses yield one attempt (rep_rate/n).
/// The two conventions differ by n^(1/n) in the required efficiency; the
/// choice is echoed into every output.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AttemptRate {
    #[default]
    Pulse,
    Demux,
}

impl AttemptRate {
    pub fn label(&self) -> &'static str {
        match self {
            AttemptRate::Pulse => "pulse",
            AttemptRate::Demux => "demux",
        }
    }
}

/// Every knob of the threshold model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AdvantageScenario {
    /// Classical approximation error tolerance E.
    pub error_tolerance: f64,
    /// Wall-clock budget shared by both sides, seconds.
    pub runtime_budget_s: f64,
    /// Sustained classical compute, FLOP/s.
    pub flops: f64,
    /// Source repetition rate, Hz.
    pub rep_rate_hz: f64,
    /// Demultiplexer efficiency per photon.
    pub eta_dx: f64,
    /// Network transmission per photon.
    pub eta_net: f64,
    /// Detection efficiency per photon.
    pub eta_d: f64,
    /// Pairwise photon indistinguishability V.
    pub visibility: f64,
    pub mode_rule: ModeRule,
    pub cost_model: CostModel,
    pub log_base: LogBase,
    pub attempt_rate: AttemptRate,
}

impl Default for AdvantageScenario {
    fn default() -> Self {
        Self {
            error_tolerance: 1e-3,
            runtime_budget_s: 30.0 * 86_400.0,
            flops: 1e17,
            rep_rate_hz: 1e9,
            eta_dx: 0.90,
            eta_net: 0.92,
            eta_d: 0.92,
            visibility: 0.96,
            mode_rule: ModeRule::Quadratic,
            cost_model: CostModel::default(),
            log_base: LogBase::Natural,
            attempt_rate: AttemptRate::default(),
        }
    }
}

impl AdvantageScenario {
    pub fn validate(&self) -> Result<()> {
        check_range("error_tolerance", self.error_tolerance, 1e-300, 1.0 - 1e-12)?;
        for (name, v) in [
            ("runtime_budget_s", self.runtime_budget_s),
            ("flops", self.flops),
            ("rep_rate_hz", self.rep_rate_hz),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::OutOfRange {
                    name: match name {
                        "runtime_budget_s" => "runtime_budget_s",
                        "flops" => "flops",
                        _ => "rep_rate_hz",
                    },
                    value: v,
                    lo: 0.0,
                    hi: f64::INFINITY,
                });
            }
        }
        check_range("eta_dx", self.eta_dx, 1e-12, 1.0)?;
        check_range("eta_net", self.eta_net, 1e-12, 1.0)?;
        check_range("eta_d", self.eta_d, 1e-12, 1.0)?;
        check_range("visibility", self.visibility, 1e-12, 1.0)?;
        if !(self.cost_model.c > 0.0 && self.cost_model.c.is_finite()) {
            return Err(Error::OutOfRange {
                name: "cost_model.c",
                value: self.cost_model.c,
                lo: 0.0,
                hi: f64::INFINITY,
            });
        }
        check_range("cost_model.a", self.cost_model.a, 0.0, 16.0)?;
        Ok(())
    }

    /// Combined non-source efficiency per photon.
    fn eta_fixed(&self) -> f64 {
        self.eta_dx * self.eta_net * self.eta_d
    }

    /// Coupon-collector event count at this scenario's mode rule.
    pub fn events(&self, n: usize) -> f64 {
        coupon_collector_events(self.mode_rule.modes(n), n, self.log_base)
    }

    /// Canonical single-line JSON echo used for output provenance.
    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("scenario serializes")
    }
}

/// Upper bound on the error of a classical simulation that truncates the
/// interference at order k: sqrt((eta V)^(k+1) / (1 - eta V)).
pub fn error_bound(eta: f64, v: f64, k: usize) -> Result<f64> {
    let ev = eta * v;
    if !(0.0..1.0).contains(&ev) || !ev.is_finite() {
        return Err(Error::OutOfRange {
            name: "eta*V",
            value: ev,
            lo: 0.0,
            hi: 1.0,
        });
    }
    if ev == 0.0 {
        return Ok(0.0);
    }
    Ok((0.5 * ((k as f64 + 1.0) * ev.ln() - (-ev).ln_1p())).exp())
}

fn bound_from_product(ev: f64, k: usize) -> f64 {
    (0.5 * ((k as f64 + 1.0) * ev.ln() - (-ev).ln_1p())).exp()
}

/// Smallest truncation order k whose error bound is at most E. Uses the
/// closed form k = ceil((2 ln E + ln(1 - eta V)) / ln(eta V)) - 1, then
/// verifies by plugging back.
pub fn required_truncation_order(e: f64, eta: f64, v: f64) -> Result<usize> {
    if !(e > 0.0) || !e.is_finite() {
        return Err(Error::OutOfRange {
            name: "E",
            value: e,
            lo: 0.0,
            hi: f64::INFINITY,
        });
    }
    let ev = eta * v;
    if !(0.0..1.0).contains(&ev) {
        return Err(Error::OutOfRange {
            name: "eta*V",
            value: ev,
            lo: 0.0,
            hi: 1.0,
        });
    }
    if ev == 0.0 || error_bound(eta, v, 0)? <= e {
        return Ok(0);
    }
    let raw = (2.0 * e.ln() + (-ev).ln_1p()) / ev.ln();
    let mut k = (raw.ceil() - 1.0).max(0.0) as usize;
    while bound_from_product(ev, k) > e {
        k += 1;
    }
    while k > 0 && bound_from_product(ev, k - 1) <= e {
        k -= 1;
    }
    Ok(k)
}

/// Bisection to the floating-point fixpoint; `too_high` must be monotone.
fn bisect(mut lo: f64, mut hi: f64, too_high: impl Fn(f64) -> bool) -> f64 {
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if too_high(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Smallest source efficiency eta for which a classical simulation must use
/// the full order k = n, i.e. the root of (eta V)^(n+1) = E^2 (1 - eta V).
/// The root always exists in eta V in (0, 1); errors when it exceeds eta = 1.
pub fn min_eta_hardness(n: usize, v: f64, e: f64) -> Result<f64> {
    check_range("V", v, 1e-12, 1.0)?;
    check_range("E", e, 1e-300, 1.0 - 1e-12)?;
    let root_ev = bisect(0.0, 1.0, |ev| bound_from_product(ev, n) > e);
    let eta = root_ev / v;
    if eta > 1.0 {
        return Err(Error::UnreachableAtV { n, v });
    }
    Ok(eta)
}

/// Wall-clock seconds for the classical side to evaluate one k-dimensional
/// permanent per required event.
pub fn classical_runtime(n: usize, k: usize, sc: &AdvantageScenario) -> f64 {
    sc.events(n) * classical_flops(k, sc.cost_model) / sc.flops
}

/// Largest affordable truncation order, capped at n - 1. Returns 0 when no
/// truncation fits the budget.
pub fn max_k_within_budget(n: usize, sc: &AdvantageScenario) -> usize {
    for k in (1..n).rev() {
        if classical_runtime(n, k, sc) <= sc.runtime_budget_s {
            return k;
        }
    }
    0
}

/// Largest source efficiency that the budgeted classical machine can
/// imitate at tolerance E; the root may exceed 1, in which case every
/// physical source is classically simulable and `UnreachableAtV` is raised.
pub fn classical_eta_ceiling(n: usize, sc: &AdvantageScenario) -> Result<f64> {
    min_eta_hardness(max_k_within_budget(n, sc), sc.visibility, sc.error_tolerance)
}

/// Wall-clock seconds for the boson sampler to collect the coupon-collector
/// number of collision-free n-photon events. Zero rates (vanishing
/// efficiency or M < n) report +inf.
pub fn sampler_runtime(n: usize, eta_s: f64, sc: &AdvantageScenario) -> f64 {
    if eta_s <= 0.0 {
        return f64::INFINITY;
    }
    let m = sc.mode_rule.modes(n);
    let p_cf = match collision_free_prob(m, n) {
        Ok(p) => p,
        Err(_) => return f64::INFINITY,
    };
    let attempts_per_s = match sc.attempt_rate {
        AttemptRate::Pulse => sc.rep_rate_hz,
        AttemptRate::Demux => sc.rep_rate_hz / n as f64,
    };
    let rate = attempts_per_s * (eta_s * sc.eta_fixed()).powi(n as i32) * p_cf;
    if rate == 0.0 {
        return f64::INFINITY;
    }
    sc.events(n) / rate
}

/// Smallest source efficiency that collects the required events within the
/// runtime budget, by bisection on eta_S in (0, 1].
pub fn min_eta_experiment(n: usize, sc: &AdvantageScenario) -> Result<f64> {
    if sampler_runtime(n, 1.0, sc) > sc.runtime_budget_s {
        return Err(Error::InfeasibleExperiment(n));
    }
    Ok(bisect(0.0, 1.0, |eta| {
        // Below the root the runtime exceeds the budget.
        sampler_runtime(n, eta, sc) <= sc.runtime_budget_s
    }))
}

/// Advantage crossing plus both efficiency curves over the scanned range.
#[derive(Debug, Clone)]
pub struct ThresholdResult {
    /// First n where the experiment is feasible (eta <= 1) and its required
    /// efficiency meets or exceeds the classical ceiling; None when the
    /// range holds no such n.
    pub crossing: Option<Crossing>,
    pub classical_curve: CurveTable,
    pub experimental_curve: CurveTable,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Crossing {
    pub n_star: usize,
    pub eta_star: f64,
    pub ceiling_at_star: f64,
}

fn scenario_meta(table: &mut CurveTable, sc: &AdvantageScenario, n_min: usize, n_max: usize) {
    table.push_meta("tool", "bosonbench");
    table.push_meta("version", env!("CARGO_PKG_VERSION"));
    table.push_meta("scenario", sc.to_json_line());
    table.push_meta("mode_rule", sc.mode_rule.label());
    table.push_meta("attempt_rate", sc.attempt_rate.label());
    table.push_meta("log_base", sc.log_base.label());
    table.push_meta("n_min", n_min);
    table.push_meta("n_max", n_max);
}

/// Scans n in [n_min, n_max] for the advantage threshold.
pub fn advantage_threshold(
    sc: &AdvantageScenario,
    n_min: usize,
    n_max: usize,
) -> Result<ThresholdResult> {
    sc.validate()?;
    let n_min = n_min.max(2);
    if n_max < n_min {
        return Err(Error::InvalidInput(format!(
            "empty photon range [{n_min}, {n_max}]"
        )));
    }
    let grid: Vec<usize> = (n_min..=n_max).collect();
    let points = map_ordered(grid, |n| {
        let ceiling = classical_eta_ceiling(n, sc).ok();
        let experiment = min_eta_experiment(n, sc).ok();
        (n, ceiling, experiment)
    });

    let mut classical = CurveTable::new(&["n", "eta_ceiling"]);
    scenario_meta(&mut classical, sc, n_min, n_max);
    let mut experimental = CurveTable::new(&["n", "eta_experiment"]);
    scenario_meta(&mut experimental, sc, n_min, n_max);

    let mut crossing = None;
    for (n, ceiling, experiment) in &points {
        let c = ceiling.unwrap_or(f64::INFINITY);
        let e = experiment.unwrap_or(f64::INFINITY);
        classical.push_row(vec![*n as f64, c]);
        experimental.push_row(vec![*n as f64, e]);
        if crossing.is_none() && e <= 1.0 && e >= c {
            crossing = Some(Crossing {
                n_star: *n,
                eta_star: e,
                ceiling_at_star: c,
            });
        }
    }
    Ok(ThresholdResult {
        crossing,
        classical_curve: classical,
        experimental_curve: experimental,
    })
}

/// Boundary efficiency forcing full-order classical simulation, over n.
pub fn curve_min_hardness(
    sc: &AdvantageScenario,
    n_min: usize,
    n_max: usize,
) -> Result<CurveTable> {
    sc.validate()?;
    let grid: Vec<usize> = (n_min.max(1)..=n_max).collect();
    let rows = map_ordered(grid, |n| {
        let eta = min_eta_hardness(n, sc.visibility, sc.error_tolerance)
            .unwrap_or(f64::INFINITY);
        vec![n as f64, eta]
    });
    let mut t = CurveTable::new(&["n", "eta_min_hardness"]);
    scenario_meta(&mut t, sc, n_min.max(1), n_max);
    t.rows = rows;
    Ok(t)
}

/// Affordable truncation order k over n.
pub fn curve_truncation_order(
    sc: &AdvantageScenario,
    n_min: usize,
    n_max: usize,
) -> Result<CurveTable> {
    sc.validate()?;
    let grid: Vec<usize> = (n_min.max(2)..=n_max).collect();
    let rows = map_ordered(grid, |n| {
        vec![n as f64, max_k_within_budget(n, sc) as f64]
    });
    let mut t = CurveTable::new(&["n", "k_max"]);
    scenario_meta(&mut t, sc, n_min.max(2), n_max);
    t.rows = rows;
    Ok(t)
}

/// Classical ceiling and experimental floor over n, with the crossing
/// recorded in the metadata.
pub fn curve_ceiling_vs_experiment(
    sc: &AdvantageScenario,
    n_min: usize,
    n_max: usize,
) -> Result<CurveTable> {
    let result = advantage_threshold(sc, n_min, n_max)?;
    let mut t = CurveTable::new(&["n", "eta_ceiling", "eta_experiment"]);
    scenario_meta(&mut t, sc, n_min.max(2), n_max);
    match result.crossing {
        Some(c) => {
            t.push_meta("crossing_n", c.n_star);
            t.push_meta("crossing_eta", crate::table::format_f64(c.eta_star));
        }
        None => t.push_meta("crossing_n", "none"),
    }
    for (c_row, e_row) in result
        .classical_curve
        .rows
        .iter()
        .zip(&result.experimental_curve.rows)
    {
        t.push_row(vec![c_row[0], c_row[1], e_row[1]]);
    }
    Ok(t)
}

/// Distance bound per source (columns d_src1..d_srcK) plus the experimental
/// efficiency floor. Sources outside the exact engines report nan.
pub fn curve_distance_and_floor(
    sc: &AdvantageScenario,
    sources: &[DecayModel],
    n_min: usize,
    n_max: usize,
) -> Result<CurveTable> {
    sc.validate()?;
    for s in sources {
        s.validate()?;
    }
    let mut headers: Vec<String> = vec!["n".into()];
    for i in 1..=sources.len() {
        headers.push(format!("d_src{i}"));
    }
    headers.push("eta_experiment".into());
    let grid: Vec<usize> = (n_min.max(2)..=n_max).collect();
    let sources_owned = sources.to_vec();
    let rows = map_ordered(grid, move |n| {
        let mut row = vec![n as f64];
        for model in &sources_owned {
            row.push(distance_for(model, n));
        }
        row.push(min_eta_experiment(n, sc).map_or(f64::INFINITY, |v| v));
        row
    });
    let mut t = CurveTable::new(&headers.iter().map(|s| s.as_str()).collect::<Vec<_>>());
    scenario_meta(&mut t, sc, n_min.max(2), n_max);
    t.push_meta(
        "sources",
        serde_json::to_string(sources).expect("sources serialize"),
    );
    for (i, s) in sources.iter().enumerate() {
        t.push_meta(&format!("src{}", i + 1), s.label());
    }
    t.rows = rows;
    Ok(t)
}

/// Distance bounds for each source against the distinguishable baseline.
pub fn curve_distances(
    sc: &AdvantageScenario,
    sources: &[DecayModel],
    n_min: usize,
    n_max: usize,
) -> Result<CurveTable> {
    sc.validate()?;
    for s in sources {
        s.validate()?;
    }
    let mut headers: Vec<String> = vec!["n".into(), "d_distinguishable".into()];
    for i in 1..=sources.len() {
        headers.push(format!("d_src{i}"));
    }
    let grid: Vec<usize> = (n_min.max(1)..=n_max).collect();
    let sources_owned = sources.to_vec();
    let rows = map_ordered(grid, move |n| {
        let mut row = vec![
            n as f64,
            distinguishability::distance_distinguishable(n),
        ];
        for model in &sources_owned {
            row.push(distance_for(model, n));
        }
        row
    });
    let mut t = CurveTable::new(&headers.iter().map(|s| s.as_str()).collect::<Vec<_>>());
    scenario_meta(&mut t, sc, n_min.max(1), n_max);
    t.push_meta(
        "sources",
        serde_json::to_string(sources).expect("sources serialize"),
    );
    for (i, s) in sources.iter().enumerate() {
        t.push_meta(&format!("src{}", i + 1), s.label());
    }
    t.rows = rows;
    Ok(t)
}

/// Separation Delta per source over n.
pub fn curve_separations(
    sc: &AdvantageScenario,
    sources: &[DecayModel],
    n_min: usize,
    n_max: usize,
) -> Result<CurveTable> {
    sc.validate()?;
    for s in sources {
        s.validate()?;
    }
    let mut headers: Vec<String> = vec!["n".into()];
    for i in 1..=sources.len() {
        headers.push(format!("delta_src{i}"));
    }
    let grid: Vec<usize> = (n_min.max(1)..=n_max).collect();
    let sources_owned = sources.to_vec();
    let rows = map_ordered(grid, move |n| {
        let mut row = vec![n as f64];
        for model in &sources_owned {
            row.push(separation_for(model, n));
        }
        row
    });
    let mut t = CurveTable::new(&headers.iter().map(|s| s.as_str()).collect::<Vec<_>>());
    scenario_meta(&mut t, sc, n_min.max(1), n_max);
    t.push_meta(
        "sources",
        serde_json::to_string(sources).expect("sources serialize"),
    );
    for (i, s) in sources.iter().enumerate() {
        t.push_meta(&format!("src{}", i + 1), s.label());
    }
    t.rows = rows;
    Ok(t)
}

/// Non-uniform sources need an exact permanent per point; curve generation
/// stays interactive by capping that path lower than the engine's own
/// limit. Uniform sources use the closed form at any n.
pub const CURVE_EXACT_CAP: usize = 20;

fn curve_matrix(
    model: &DecayModel,
    n: usize,
) -> Option<distinguishability::DistinguishabilityMatrix> {
    let s = distinguishability::build_decaying(n, model).ok()?;
    if s.uniform_off_diagonal().is_some() || n <= CURVE_EXACT_CAP {
        Some(s)
    } else {
        None
    }
}

fn distance_for(model: &DecayModel, n: usize) -> f64 {
    curve_matrix(model, n)
        .and_then(|s| distinguishability::variational_distance_bound(&s).ok())
        .unwrap_or(f64::NAN)
}

fn separation_for(model: &DecayModel, n: usize) -> f64 {
    curve_matrix(model, n)
        .and_then(|s| distinguishability::delta_separation(&s).ok())
        .unwrap_or(f64::NAN)
}

/// Cost-model constants reproducing a target saturation onset of the
/// truncation-order curve (the largest n with k = n - 1).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CostCalibration {
    /// Valid range of the constant c (half-open: onset equals the target
    /// for c in (c_lo, c_hi]).
    pub c_lo: f64,
    pub c_hi: f64,
    /// Geometric midpoint of the range, the reported constant.
    pub c: f64,
    pub achieved_onset: usize,
}

/// Largest n in [3, scan_max] whose affordable truncation order is still
/// n - 1; None when the budget cannot even afford n = 3.
pub fn saturation_onset(sc: &AdvantageScenario, scan_max: usize) -> Option<usize> {
    (3..=scan_max).rfind(|&n| max_k_within_budget(n, sc) == n - 1)
}

/// Finds the cost constant c (exponent a unchanged) whose saturation onset
/// matches `target`, by bisection on ln c.
pub fn calibrate_cost(
    sc: &AdvantageScenario,
    target: usize,
    scan_max: usize,
) -> Result<CostCalibration> {
    sc.validate()?;
    if target < 3 || target >= scan_max {
        return Err(Error::InvalidInput(format!(
            "target onset {target} must lie in [3, {})",
            scan_max
        )));
    }
    let onset_at = |c: f64| -> usize {
        let mut probe = *sc;
        probe.cost_model.c = c;
        saturation_onset(&probe, scan_max).unwrap_or(0)
    };
    let (ln_lo, ln_hi) = (-35.0f64, 35.0f64);
    if onset_at(ln_lo.exp()) < target || onset_at(ln_hi.exp()) > target {
        return Err(Error::InvalidInput(format!(
            "target onset {target} is outside the reachable range of the cost constant"
        )));
    }
    // Smallest c with onset <= target, and smallest c with onset < target.
    let c_lo = bisect(ln_lo, ln_hi, |lc| onset_at(lc.exp()) <= target).exp();
    let c_hi = bisect(ln_lo, ln_hi, |lc| onset_at(lc.exp()) < target).exp();
    let c = (c_lo * c_hi).sqrt();
    let achieved = onset_at(c);
    if achieved != target {
        return Err(Error::InvalidInput(format!(
            "no cost constant yields onset {target} (nearest achieved: {achieved})"
        )));
    }
    Ok(CostCalibration {
        c_lo,
        c_hi,
        c,
        achieved_onset: achieved,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const TOL: f64 = 1e-9;

    #[test]
    fn error_bound_reference_points() {
        // eta V = 0.5: bound(k) = sqrt(0.5^(k+1)/0.5) = 0.5^(k/2),
        // so k = 2 gives sqrt(0.125/0.5) = 0.5 exactly.
        let b = error_bound(0.5, 1.0, 2).unwrap();
        assert!((b - 0.5).abs() < 1e-12);
        let b1 = error_bound(0.5, 1.0, 1).unwrap();
        assert!((b1 - 0.5f64.sqrt()).abs() < 1e-12);
        assert_eq!(error_bound(0.0, 0.9, 3).unwrap(), 0.0);
        assert!(error_bound(1.0, 1.0, 2).is_err());
        assert!(error_bound(1.5, 0.9, 2).is_err());
        // Plug-back of the documented threshold point.
        let b = error_bound(0.758 / 0.96, 0.96, 54).unwrap();
        assert!((b - 1e-3).abs() < 1e-4, "{b}");
    }

    #[test]
    fn truncation_order_round_trips() {
        // E at least the k = 0 bound (sqrt(0.45/0.55) = 0.9045) means no
        // interference is needed.
        assert_eq!(required_truncation_order(0.91, 0.5, 0.9).unwrap(), 0);
        assert_eq!(required_truncation_order(0.9, 0.5, 0.9).unwrap(), 1);
        // bound(2) = 0.5 at eta V = 0.5, so E just above 0.5 is met first
        // at k = 2 (exact equality sits on floating-point rounding).
        assert_eq!(required_truncation_order(0.5000001, 0.5, 1.0).unwrap(), 2);
        let k = required_truncation_order(1e-3, 0.79, 0.96).unwrap();
        assert!((52..=56).contains(&k), "k = {k}");
        // Definition check: bound(k) <= E < bound(k-1).
        assert!(error_bound(0.79, 0.96, k).unwrap() <= 1e-3);
        assert!(error_bound(0.79, 0.96, k - 1).unwrap() > 1e-3);
        assert!(required_truncation_order(0.0, 0.5, 0.9).is_err());
    }

    #[test]
    fn hardness_boundary_solves_its_equation() {
        for (n, v, e) in [(50usize, 0.96, 1e-3), (54, 0.96, 1e-3), (20, 0.9, 1e-2)] {
            let eta = min_eta_hardness(n, v, e).unwrap();
            let residual = (error_bound(eta, v, n).unwrap() - e).abs();
            assert!(residual <= TOL * e, "n={n}: residual {residual}");
            assert_eq!(required_truncation_order(e, eta, v).unwrap(), n);
        }
        let eta54 = min_eta_hardness(54, 0.96, 1e-3).unwrap();
        assert!((eta54 - 0.79).abs() < 5e-3, "{eta54}");
        // Low visibility pushes the root past eta = 1.
        assert!(matches!(
            min_eta_hardness(30, 0.5, 1e-3),
            Err(Error::UnreachableAtV { .. })
        ));
    }

    #[test]
    fn hardness_monotone_in_n_and_v() {
        let mut prev = 0.0;
        for n in (5..=100).step_by(5) {
            let eta = min_eta_hardness(n, 0.96, 1e-3).unwrap();
            assert!(eta > prev);
            prev = eta;
        }
        let hi_v = min_eta_hardness(40, 0.99, 1e-3).unwrap();
        let lo_v = min_eta_hardness(40, 0.96, 1e-3).unwrap();
        assert!(hi_v < lo_v);
    }

    #[test]
    fn classical_runtime_composition() {
        let sc = AdvantageScenario::default();
        // n = 20 with M = n^2: events * 20 * 2^20 / 1e17.
        let events = sc.events(20);
        let expect = events * 20.0 * (2f64).powi(20) / 1e17;
        assert!((classical_runtime(20, 20, &sc) - expect).abs() / expect < 1e-12);
        // Direct seconds-per-event check at k = 1, unit flops.
        let unit = AdvantageScenario {
            flops: 1.0,
            ..Default::default()
        };
        let per_event = classical_runtime(3, 1, &unit) / unit.events(3);
        assert!((per_event - 2.0).abs() < 1e-12);
        // Near the crossing: ~431 events of 52-dimensional permanents cost
        // about 1.0e3 s at the default compute budget.
        let t = classical_runtime(54, 52, &sc);
        assert!((t - 1.0e3).abs() / 1.0e3 < 0.02, "t = {t}");
    }

    #[test]
    fn budget_cap_behaviour() {
        let sc = AdvantageScenario::default();
        // Unlimited budget keeps the k = n - 1 cap.
        let infinite = AdvantageScenario {
            runtime_budget_s: f64::INFINITY,
            ..sc
        };
        assert_eq!(max_k_within_budget(40, &infinite), 39);
        let zero = AdvantageScenario {
            runtime_budget_s: 1e-300,
            ..sc
        };
        assert_eq!(max_k_within_budget(40, &zero), 0);
        // Defaults keep k = n - 1 up to the recorded onset n0 = 63.
        assert_eq!(saturation_onset(&sc, 120), Some(63));
    }

    #[test]
    fn ceiling_matches_hardness_below_saturation() {
        let sc = AdvantageScenario::default();
        let ceiling = classical_eta_ceiling(30, &sc).unwrap();
        let expect = min_eta_hardness(29, sc.visibility, sc.error_tolerance).unwrap();
        assert_eq!(ceiling, expect);
        assert!(ceiling * sc.visibility < 1.0);
        // Once k saturates, the ceiling no longer rises with n.
        let at_onset = classical_eta_ceiling(64, &sc).unwrap();
        let beyond = classical_eta_ceiling(90, &sc).unwrap();
        assert!(beyond <= at_onset + 1e-12);
        // n = 54 with defaults sits in the recorded window.
        let c54 = classical_eta_ceiling(54, &sc).unwrap();
        assert!((0.74..=0.84).contains(&c54), "{c54}");
    }

    #[test]
    fn sampler_runtime_power_law() {
        let sc = AdvantageScenario::default();
        // Independent recomputation from the formula pieces at n = 20.
        {
            let m = 400usize;
            let events = coupon_collector_events(m, 20, LogBase::Natural);
            let p_cf = collision_free_prob(m, 20).unwrap();
            let rate = sc.rep_rate_hz * (0.8f64 * 0.9 * 0.92 * 0.92).powi(20) * p_cf;
            let expect = events / rate;
            let got = sampler_runtime(20, 0.8, &sc);
            assert!((got - expect).abs() / expect < 1e-12, "{got} vs {expect}");
        }
        let r1 = sampler_runtime(20, 0.8, &sc);
        let r2 = sampler_runtime(20, 0.4, &sc);
        assert!(((r2 / r1) - (2f64).powi(20)).abs() / (2f64).powi(20) < 1e-9);
        assert_eq!(sampler_runtime(20, 0.0, &sc), f64::INFINITY);
        // Trivial single-photon case: one event per attempt at unit
        // efficiency, runtime = 1/rep_rate * events.
        let unit = AdvantageScenario {
            eta_dx: 1.0,
            eta_net: 1.0,
            eta_d: 1.0,
            mode_rule: ModeRule::Fixed { modes: 2 },
            ..Default::default()
        };
        let expect = unit.events(1) / unit.rep_rate_hz;
        assert!((sampler_runtime(1, 1.0, &unit) - expect).abs() < 1e-18);
    }

    #[test]
    fn experiment_floor_properties() {
        let sc = AdvantageScenario::default();
        let eta = min_eta_experiment(54, &sc).unwrap();
        assert!((0.74..=0.88).contains(&eta), "{eta}");
        let runtime = sampler_runtime(54, eta, &sc);
        assert!((runtime - sc.runtime_budget_s).abs() / sc.runtime_budget_s < 1e-9);
        // Doubling the budget divides the floor by 2^(1/n).
        let double = AdvantageScenario {
            runtime_budget_s: 2.0 * sc.runtime_budget_s,
            ..sc
        };
        let eta2 = min_eta_experiment(54, &double).unwrap();
        assert!((eta / eta2 - (2f64).powf(1.0 / 54.0)).abs() < 1e-9);
        // Monotone increasing in n.
        let mut prev = 0.0;
        for n in (2..=100).step_by(7) {
            let e = min_eta_experiment(n, &sc).unwrap();
            assert!(e > prev, "n = {n}");
            prev = e;
        }
        // Linear mode scaling starves collision-free statistics at large n;
        // with the demultiplexed attempt rate the budget cannot be met even
        // at unit source efficiency.
        let linear = AdvantageScenario {
            mode_rule: ModeRule::Linear { factor: 3.0 },
            attempt_rate: AttemptRate::Demux,
            ..sc
        };
        assert!(matches!(
            min_eta_experiment(54, &linear),
            Err(Error::InfeasibleExperiment(54))
        ));
    }

    #[test]
    fn threshold_default_scenario() {
        let sc = AdvantageScenario::default();
        let result = advantage_threshold(&sc, 2, 120).unwrap();
        let c = result.crossing.expect("defaults cross in range");
        assert!((48..=60).contains(&c.n_star), "N* = {}", c.n_star);
        assert!((0.74..=0.84).contains(&c.eta_star), "eta* = {}", c.eta_star);
        // Defining inequalities at the crossing; the classical one fails
        // one photon earlier.
        assert!(c.eta_star >= c.ceiling_at_star && c.eta_star <= 1.0);
        let prev_exp = min_eta_experiment(c.n_star - 1, &sc).unwrap();
        let prev_ceil = classical_eta_ceiling(c.n_star - 1, &sc).unwrap();
        assert!(prev_exp < prev_ceil);
    }

    #[test]
    fn threshold_degenerate_smoke() {
        // Perfect photons, lossless detection, and a classical budget too
        // small to afford any truncation: the crossing collapses to tiny n.
        let sc = AdvantageScenario {
            visibility: 1.0,
            eta_dx: 1.0,
            eta_net: 1.0,
            eta_d: 1.0,
            flops: 1e-30,
            ..Default::default()
        };
        let result = advantage_threshold(&sc, 2, 20).unwrap();
        let c = result.crossing.expect("degenerate scenario crosses");
        assert!(c.n_star <= 5, "n* = {}", c.n_star);
    }

    #[test]
    fn threshold_no_advantage_at_low_visibility() {
        let sc = AdvantageScenario {
            visibility: 0.5,
            ..Default::default()
        };
        let result = advantage_threshold(&sc, 2, 120).unwrap();
        assert!(result.crossing.is_none());
    }

    #[test]
    fn shorter_budget_does_not_delay_crossing() {
        let sc30 = AdvantageScenario::default();
        let sc1 = AdvantageScenario {
            runtime_budget_s: 86_400.0,
            ..sc30
        };
        let n30 = advantage_threshold(&sc30, 2, 120)
            .unwrap()
            .crossing
            .map(|c| c.n_star);
        let n1 = advantage_threshold(&sc1, 2, 120)
            .unwrap()
            .crossing
            .map(|c| c.n_star);
        match (n1, n30) {
            (Some(a), Some(b)) => assert!(a <= b, "1-day {a} vs 30-day {b}"),
            (None, _) => {}
            (Some(_), None) => panic!("crossing appeared only with the shorter budget"),
        }
    }

    #[test]
    fn demux_attempt_rate_shifts_the_floor() {
        let pulse = AdvantageScenario::default();
        let demux = AdvantageScenario {
            attempt_rate: AttemptRate::Demux,
            ..pulse
        };
        let ep = min_eta_experiment(54, &pulse).unwrap();
        let ed = min_eta_experiment(54, &demux).unwrap();
        assert!((ed / ep - 54f64.powf(1.0 / 54.0)).abs() < 1e-9);
    }

    #[test]
    fn bisection_residuals_at_machine_precision() {
        // 100 interval halvings from a unit bracket reach 1e-10 long before
        // the fixpoint cutoff.
        let sc = AdvantageScenario::default();
        for n in [5usize, 20, 54, 90] {
            let eta = min_eta_experiment(n, &sc).unwrap();
            let residual =
                (sampler_runtime(n, eta, &sc) - sc.runtime_budget_s).abs() / sc.runtime_budget_s;
            assert!(residual < 1e-9, "n = {n}: {residual}");
        }
    }

    #[test]
    fn curves_cover_requested_rows() {
        let sc = AdvantageScenario::default();
        let sources = [
            DecayModel::uniform(1.0),
            DecayModel::uniform(0.96),
        ];
        let t = curve_distance_and_floor(&sc, &sources, 2, 80).unwrap();
        assert_eq!(t.rows.len(), 79);
        assert_eq!(t.headers, vec!["n", "d_src1", "d_src2", "eta_experiment"]);
        // Ideal source: identically zero distance.
        assert!(t.rows.iter().all(|r| r[1] == 0.0));
        // Uniform V = 0.96: monotone increasing distance.
        for pair in t.rows.windows(2) {
            assert!(pair[1][2] >= pair[0][2]);
        }
        let s7 = curve_min_hardness(&sc, 2, 100).unwrap();
        for pair in s7.rows.windows(2) {
            assert!(pair[1][1] >= pair[0][1], "hardness boundary must rise");
        }
    }

    #[test]
    fn calibration_reproduces_requested_onset() {
        let sc = AdvantageScenario::default();
        let cal = calibrate_cost(&sc, 52, 120).unwrap();
        assert_eq!(cal.achieved_onset, 52);
        let mut probe = sc;
        probe.cost_model.c = cal.c;
        assert_eq!(saturation_onset(&probe, 120), Some(52));
        // The bracket is meaningful: just outside it the onset moves.
        probe.cost_model.c = cal.c_lo * 0.98;
        assert!(saturation_onset(&probe, 120) > Some(52));
        probe.cost_model.c = cal.c_hi * 1.02;
        assert!(saturation_onset(&probe, 120) < Some(52));
    }

    #[test]
    fn scenario_json_round_trip() {
        let sc = AdvantageScenario::default();
        let line = sc.to_json_line();
        let back: AdvantageScenario = serde_json::from_str(&line).unwrap();
        assert_eq!(back, sc);
        assert!(line.contains("\"attempt_rate\":\"pulse\""));
        assert!(line.contains("\"mode_rule\":{\"kind\":\"quadratic\"}"));
    }
}
