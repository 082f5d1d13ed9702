use incidence_wasm::{cover_scene, incidence_scene, sum_product_scene};
use serde_json::Value;

fn parse(s: String) -> Value {
    serde_json::from_str(&s).unwrap()
}

#[test]
fn elekes_scene_counts() {
    let v = parse(incidence_scene("elekes", 31, 3, 2, 0, 0, 0, "auto").unwrap());
    assert_eq!(v["incidences"], 36);
    assert_eq!(v["points"].as_array().unwrap().len(), 36);
    assert_eq!(v["lines"].as_array().unwrap().len(), 12);
    let total: u64 = v["degree"].as_array().unwrap().iter().map(|d| d.as_u64().unwrap()).sum();
    assert_eq!(total, 36);
}

#[test]
fn engines_agree() {
    let counts: Vec<Value> = ["naive", "hash_join", "auto"]
        .iter()
        .map(|e| parse(incidence_scene("random", 29, 0, 0, 300, 200, 5, e).unwrap())["incidences"].clone())
        .collect();
    assert!(counts.windows(2).all(|w| w[0] == w[1]));
}

#[test]
fn bad_input_is_reported() {
    assert!(incidence_scene("elekes", 7, 2, 2, 0, 0, 0, "auto").is_err());
    assert!(incidence_scene("full_plane", 9, 0, 0, 0, 0, 0, "auto").is_err());
    assert!(incidence_scene("full_plane", 131, 0, 0, 0, 0, 0, "auto").is_err());
    assert!(incidence_scene("square", 7, 0, 0, 0, 0, 0, "auto").is_err());
    assert!(incidence_scene("full_plane", 7, 0, 0, 0, 0, 0, "fast").is_err());
    assert!(sum_product_scene(7, "1, x").is_err());
}

#[test]
fn cover_scene_is_verified() {
    let v = parse(cover_scene(31, 400, 300, 3, true).unwrap());
    assert_eq!(v["verified"], true);
    assert_eq!(v["grids"].as_array().unwrap().len(), 5);
    for g in v["grids"].as_array().unwrap() {
        let (h, x, y) = (&g["h"], g["x"].as_array().unwrap(), g["y"].as_array().unwrap());
        for q in h.as_array().unwrap() {
            assert!(x.contains(&q[0]) && y.contains(&q[1]));
        }
    }
}

#[test]
fn sum_product_small() {
    let v = parse(sum_product_scene(11, "1 2 3 3").unwrap());
    assert_eq!(v["a"], serde_json::json!([1, 2, 3]));
    assert_eq!(v["sum"], serde_json::json!([2, 3, 4, 5, 6]));
    assert_eq!(v["product"], serde_json::json!([1, 2, 3, 4, 6, 9]));
}
