use axisym_wasm::{classify_json, phase_codes, schmidt_json};
use serde_json::Value;

#[test]
fn phase_map_corners_and_layout() {
    let codes = phase_codes(3, 2).unwrap();
    // (z, rbar) = (0,-1), (0,1), (1,-1), (1,1)
    assert_eq!(codes, vec![0, 0, 2, 2]);
    assert_eq!(phase_codes(3, 50).unwrap().len(), 2500);
    assert!(phase_codes(3, 1).is_err());
    assert!(phase_codes(5, 10).is_err());
}

#[test]
fn phase_map_d3_matches_the_separability_condition() {
    let n = 41;
    let codes = phase_codes(3, n).unwrap();
    for i in 0..n {
        for j in 0..n {
            let z = i as f64 / (n - 1) as f64;
            let rbar = -1.0 + 2.0 * j as f64 / (n - 1) as f64;
            let x1 = z / 3.0;
            let low = (1.0 - z) * (1.0 - rbar.abs()) / 6.0;
            if (x1 - low).abs() > 1e-9 {
                assert_eq!(codes[i * n + j] == 0, x1 < low, "z={z} rbar={rbar}");
            }
        }
    }
}

#[test]
fn d4_map_contains_bound_entangled_points() {
    assert!(phase_codes(4, 40).unwrap().contains(&1));
}

#[test]
fn json_outputs() {
    let r: Value = serde_json::from_str(&classify_json(3, 1.0, 0.0).unwrap()).unwrap();
    assert_eq!(r["verdict"], "NPT_ENTANGLED");
    let b: Value = serde_json::from_str(&schmidt_json(3, 0.6, 1.0).unwrap()).unwrap();
    assert_eq!((b["lower"].as_u64(), b["upper"].as_u64()), (Some(2), Some(3)));
    assert!(classify_json(3, 2.0, 0.0).is_err());
}
