//! Browser bindings for the interactive demo page.
//!
//! Every entry point takes and returns JSON strings so the JS glue stays
//! a thin `fetch`-like call; errors come back as `{"ok": false, "error"}`
//! rather than thrown exceptions. The functions are plain Rust on
//! non-wasm targets, which is how the native unit tests drive them.

use bosonbench::advantage::{advantage_threshold, AdvantageScenario};
use bosonbench::charfit::corrected_visibility;
use bosonbench::distinguishability::{
    build_decaying, delta_separation, distance_distinguishable, variational_distance_bound,
    DecayKind, DecayModel,
};
use serde::{Deserialize, Serialize};
use wasm_bindgen::prelude::wasm_bindgen;

fn err_json(msg: impl std::fmt::Display) -> String {
    serde_json::to_string(&serde_json::json!({ "ok": false, "error": msg.to_string() }))
        .expect("error body serializes")
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields, default)]
struct ThresholdRequest {
    scenario: AdvantageScenario,
    n_min: usize,
    n_max: usize,
}

impl Default for ThresholdRequest {
    fn default() -> Self {
        Self {
            scenario: AdvantageScenario::default(),
            n_min: 2,
            n_max: 100,
        }
    }
}

#[derive(Serialize)]
struct ThresholdPoint {
    n: usize,
    ceiling: f64,
    experiment: f64,
}

/// Classical ceiling and experimental floor over the photon number, plus
/// the advantage crossing when one exists in range.
///
/// Request: `{"scenario": {..AdvantageScenario..}, "n_min": 2, "n_max": 100}`
/// (all fields optional).
#[wasm_bindgen]
pub fn threshold_scan(request_json: &str) -> String {
    let request: ThresholdRequest = match serde_json::from_str(request_json) {
        Ok(r) => r,
        Err(e) => return err_json(e),
    };
    let result = match advantage_threshold(&request.scenario, request.n_min, request.n_max) {
        Ok(r) => r,
        Err(e) => return err_json(e),
    };
    let points: Vec<ThresholdPoint> = result
        .classical_curve
        .rows
        .iter()
        .zip(&result.experimental_curve.rows)
        .map(|(c, e)| ThresholdPoint {
            n: c[0] as usize,
            ceiling: c[1],
            experiment: e[1],
        })
        .collect();
    let crossing = result.crossing.map(|c| {
        serde_json::json!({
            "n_star": c.n_star,
            "eta_star": c.eta_star,
            "ceiling": c.ceiling_at_star,
        })
    });
    serde_json::to_string(&serde_json::json!({
        "ok": true,
        "points": points,
        "crossing": crossing,
    }))
    .expect("threshold body serializes")
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields, default)]
struct DistanceRequest {
    kind: DecayKind,
    v0: f64,
    rate: f64,
    n_max: usize,
}

impl Default for DistanceRequest {
    fn default() -> Self {
        Self {
            kind: DecayKind::Uniform,
            v0: 0.96,
            rate: 0.0,
            n_max: 80,
        }
    }
}

/// Distance bound, distinguishable baseline, and separation over the
/// photon number for one source model.
///
/// Request: `{"kind": "uniform|geometric|linear", "v0": 0.96, "rate": 0.0,
/// "n_max": 80}`. Non-uniform models report null beyond the exact-engine
/// range.
#[wasm_bindgen]
pub fn distance_scan(request_json: &str) -> String {
    let request: DistanceRequest = match serde_json::from_str(request_json) {
        Ok(r) => r,
        Err(e) => return err_json(e),
    };
    let model = DecayModel {
        kind: request.kind,
        v0: request.v0,
        rate: request.rate,
    };
    if let Err(e) = model.validate() {
        return err_json(e);
    }
    let cap = bosonbench::advantage::CURVE_EXACT_CAP;
    let mut points = Vec::new();
    for n in 1..=request.n_max.min(300) {
        let exact_ok = match build_decaying(n, &model) {
            Ok(s) => {
                if s.uniform_off_diagonal().is_some() || n <= cap {
                    Some(s)
                } else {
                    None
                }
            }
            Err(e) => return err_json(e),
        };
        let (d, delta) = match exact_ok {
            Some(s) => (
                variational_distance_bound(&s).ok(),
                delta_separation(&s).ok(),
            ),
            None => (None, None),
        };
        points.push(serde_json::json!({
            "n": n,
            "d": d,
            "d_dist": distance_distinguishable(n),
            "delta": delta,
        }));
    }
    serde_json::to_string(&serde_json::json!({ "ok": true, "points": points }))
        .expect("distance body serializes")
}

/// Intrinsic-visibility correction for splitter imbalance, classical
/// contrast and multiphoton contamination.
#[wasm_bindgen]
pub fn visibility_correction(v_raw: f64, g2: f64, r: f64, t: f64, epsilon: f64) -> String {
    match corrected_visibility(v_raw, g2, r, t, epsilon) {
        Ok(c) => serde_json::to_string(&serde_json::json!({
            "ok": true,
            "value": c.value,
            "over_unity": c.over_unity,
            "splitter_imbalanced": c.splitter_imbalanced,
        }))
        .expect("correction body serializes"),
        Err(e) => err_json(e),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn threshold_scan_defaults_cross_in_band() {
        let body: serde_json::Value =
            serde_json::from_str(&threshold_scan("{}")).unwrap();
        assert_eq!(body["ok"], true);
        let n_star = body["crossing"]["n_star"].as_u64().unwrap();
        assert!((48..=60).contains(&n_star), "{n_star}");
        assert_eq!(body["points"].as_array().unwrap().len(), 99);
    }

    #[test]
    fn threshold_scan_rejects_bad_json() {
        let body: serde_json::Value =
            serde_json::from_str(&threshold_scan(r#"{"n_min": "two"}"#)).unwrap();
        assert_eq!(body["ok"], false);
    }

    #[test]
    fn distance_scan_uniform_and_decaying() {
        let body: serde_json::Value = serde_json::from_str(&distance_scan(
            r#"{"kind": "uniform", "v0": 0.96, "n_max": 60}"#,
        ))
        .unwrap();
        assert_eq!(body["ok"], true);
        let points = body["points"].as_array().unwrap();
        assert_eq!(points.len(), 60);
        let d54 = points[53]["d"].as_f64().unwrap();
        assert!((0.50..=0.70).contains(&d54));

        let body: serde_json::Value = serde_json::from_str(&distance_scan(
            r#"{"kind": "geometric", "v0": 0.96, "rate": 0.02, "n_max": 40}"#,
        ))
        .unwrap();
        let points = body["points"].as_array().unwrap();
        // Exact up to the curve cap, null beyond.
        assert!(points[15]["d"].is_f64());
        assert!(points[30]["d"].is_null());
    }

    #[test]
    fn visibility_correction_round_trip() {
        let body: serde_json::Value =
            serde_json::from_str(&visibility_correction(0.93, 0.015, 0.476, 0.524, 0.005))
                .unwrap();
        assert_eq!(body["ok"], true);
        let v = body["value"].as_f64().unwrap();
        assert!((0.94..=0.98).contains(&v));
        let bad: serde_json::Value =
            serde_json::from_str(&visibility_correction(1.5, 0.0, 0.5, 0.5, 0.0)).unwrap();
        assert_eq!(bad["ok"], false);
    }
}
