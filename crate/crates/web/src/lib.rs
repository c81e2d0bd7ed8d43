//! WebAssembly bindings for the browser demo. Each export returns a JSON
//! string; the `*_json` functions hold the logic so they run natively too.

use brauer_weingarten::brauer_linalg::{gram_matrix, weingarten_matrix};
use brauer_weingarten::designs::{construct_design_state, design_constraints, design_family_state, orbit_moment};
use brauer_weingarten::tensor_rep::{closed_form_distance, rho_br, rho_sym, trace_distance};
use serde::Serialize;
use wasm_bindgen::prelude::*;

/// Largest `d^t` evaluated numerically in the page; bigger points report the
/// closed form only.
pub const NUMERIC_SIDE_LIMIT: usize = 729;

#[derive(Serialize)]
struct CurvePoint {
    t: usize,
    d: usize,
    closed_form: String,
    closed_form_value: f64,
    numeric: Option<f64>,
}

fn side(d: usize, t: usize) -> Option<usize> {
    d.checked_pow(t as u32)
}

fn encode<T: Serialize>(value: &T) -> Result<String, String> {
    serde_json::to_string(value).map_err(|e| e.to_string())
}

/// Trace distance between the real and complex Haar moments for
/// `2 ≤ t ≤ t_max`, `2 ≤ d ≤ d_max`.
pub fn trace_distance_curve_json(t_max: usize, d_max: usize) -> Result<String, String> {
    if !(2..=8).contains(&t_max) || !(2..=256).contains(&d_max) {
        return Err("choose 2 <= t <= 8 and 2 <= d <= 256".into());
    }
    let mut points = Vec::new();
    for t in 2..=t_max {
        for d in 2..=d_max {
            let closed = closed_form_distance(d, t);
            let numeric = match side(d, t) {
                Some(n) if n <= NUMERIC_SIDE_LIMIT => {
                    let br = rho_br(d, t).map_err(|e| e.to_string())?;
                    let sym = rho_sym(d, t).map_err(|e| e.to_string())?;
                    Some(trace_distance(&br, &sym).map_err(|e| e.to_string())?)
                }
                _ => None,
            };
            points.push(CurvePoint {
                t,
                d,
                closed_form: closed.to_string(),
                closed_form_value: brauer_weingarten::exact::ExactRational(closed).to_f64(),
                numeric,
            });
        }
    }
    encode(&points)
}

#[derive(Serialize)]
struct FamilyScan {
    t: usize,
    d: usize,
    design_overlap: f64,
    overlaps: Vec<f64>,
    distances: Vec<f64>,
    constraints: brauer_weingarten::designs::DesignConstraintSet,
}

/// Distance to the unitary Haar moment along the two-amplitude family, with
/// the exact constraint set for `(t, d)`.
pub fn design_family_json(t: usize, d: usize, steps: usize) -> Result<String, String> {
    if !(1..=5).contains(&t) || d < 2 || !(2..=400).contains(&steps) {
        return Err("choose 1 <= t <= 5, d >= 2 and 2 <= steps <= 400".into());
    }
    match side(d, t) {
        Some(n) if n <= NUMERIC_SIDE_LIMIT => {}
        _ => return Err(format!("d^t must be at most {NUMERIC_SIDE_LIMIT}")),
    }
    let sym = rho_sym(d, t).map_err(|e| e.to_string())?;
    let overlaps: Vec<f64> = (0..steps).map(|k| k as f64 / (steps - 1) as f64).collect();
    let distances = overlaps
        .iter()
        .map(|&s| {
            let psi = design_family_state(d, s)?;
            trace_distance(&orbit_moment(&psi, t)?, &sym)
        })
        .collect::<Result<Vec<f64>, _>>()
        .map_err(|e| e.to_string())?;
    let design_overlap = construct_design_state(d).map_err(|e| e.to_string())?.conjugate_overlap();
    let constraints = design_constraints(t, d).map_err(|e| e.to_string())?;
    encode(&FamilyScan { t, d, design_overlap, overlaps, distances, constraints })
}

#[derive(Serialize)]
struct Heatmap {
    t: usize,
    d: usize,
    labels: Vec<String>,
    exponents: Vec<Vec<u32>>,
    weingarten: Vec<Vec<f64>>,
    rank: usize,
}

/// Gram exponents `cycles(m ∪ n)` and the Weingarten matrix for `t ≤ 4`.
pub fn gram_heatmap_json(t: usize, d: usize) -> Result<String, String> {
    if !(1..=4).contains(&t) || d == 0 {
        return Err("choose 1 <= t <= 4 and d >= 1".into());
    }
    let gram = gram_matrix(t, d).map_err(|e| e.to_string())?;
    let w = weingarten_matrix(t, d).map_err(|e| e.to_string())?;
    let n = gram.size();
    encode(&Heatmap {
        t,
        d,
        labels: gram.basis().iter().map(|m| m.to_string()).collect(),
        exponents: (0..n).map(|i| (0..n).map(|j| gram.exponent(i, j)).collect()).collect(),
        weingarten: w.entries.row_iter().map(|r| r.iter().copied().collect()).collect(),
        rank: w.rank,
    })
}

#[wasm_bindgen]
pub fn trace_distance_curve(t_max: usize, d_max: usize) -> Result<String, JsError> {
    trace_distance_curve_json(t_max, d_max).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn design_family(t: usize, d: usize, steps: usize) -> Result<String, JsError> {
    design_family_json(t, d, steps).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn gram_heatmap(t: usize, d: usize) -> Result<String, JsError> {
    gram_heatmap_json(t, d).map_err(|e| JsError::new(&e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::Value;

    #[test]
    fn curve_has_numeric_values_where_small() {
        let v: Value = serde_json::from_str(&trace_distance_curve_json(3, 10).unwrap()).unwrap();
        let points = v.as_array().unwrap();
        assert_eq!(points.len(), 2 * 9);
        let first = &points[0];
        assert_eq!(first["closed_form"], "1/4");
        assert!((first["numeric"].as_f64().unwrap() - 1.0 / 6.0).abs() < 1e-12);
        let last = points.last().unwrap();
        assert_eq!((last["t"].as_u64(), last["d"].as_u64()), (Some(3), Some(10)));
        assert!(last["numeric"].is_null());
    }

    #[test]
    fn family_scan_dips_at_the_design_overlap() {
        let steps = 201;
        let v: Value = serde_json::from_str(&design_family_json(3, 3, steps).unwrap()).unwrap();
        let distances: Vec<f64> = v["distances"].as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect();
        let (k, min) = distances
            .iter()
            .copied()
            .enumerate()
            .fold((0, f64::INFINITY), |a, (i, x)| if x < a.1 { (i, x) } else { a });
        let s = k as f64 / (steps - 1) as f64;
        assert!((s - v["design_overlap"].as_f64().unwrap()).abs() <= 0.5 / (steps - 1) as f64 + 1e-12);
        let max = distances.iter().copied().fold(0.0, f64::max);
        assert!(min < 0.05 * max, "{min} vs {max}");
        assert_eq!(v["constraints"]["consistent"], true);
    }

    #[test]
    fn heatmap_matches_gram_at_two_copies() {
        let v: Value = serde_json::from_str(&gram_heatmap_json(2, 3).unwrap()).unwrap();
        assert_eq!(v["labels"].as_array().unwrap().len(), 3);
        assert_eq!(v["exponents"][0][0], 2);
        assert_eq!(v["exponents"][0][1], 1);
        assert_eq!(v["rank"], 3);
    }

    #[test]
    fn rejects_out_of_range_inputs() {
        assert!(trace_distance_curve_json(1, 5).is_err());
        assert!(design_family_json(3, 20, 10).is_err());
        assert!(gram_heatmap_json(6, 2).is_err());
    }
}
