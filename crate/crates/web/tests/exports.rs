use randmatch_web::{chain_trace_json, generate_graph_text, gibbs_profile_json, mixing_curve_json};
use serde_json::Value;

fn parse(s: String) -> Value {
    serde_json::from_str(&s).unwrap()
}

#[test]
fn generated_graph_round_trips_through_the_page() {
    assert_eq!(generate_graph_text("path", 4, 0.0, 0, 0).unwrap(), "4 3\n0 1\n1 2\n2 3\n");
    let a = generate_graph_text("gnp", 12, 0.4, 0, 3).unwrap();
    assert_eq!(a, generate_graph_text("gnp", 12, 0.4, 0, 3).unwrap());
    assert!(generate_graph_text("hypercube", 4, 0.0, 0, 0).is_err());
}

#[test]
fn profile_masses_sum_to_one() {
    let p4 = generate_graph_text("path", 4, 0.0, 0, 0).unwrap();
    let v = parse(gibbs_profile_json(&p4, -2.0, 3.0, 6).unwrap());
    assert_eq!(v["k"], 2);
    assert_eq!(v["size_counts"], serde_json::json!([1, 3, 1]));
    let rows = v["mass_by_size"].as_array().unwrap();
    assert_eq!(rows.len(), 6);
    for row in rows {
        let total: f64 = row.as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).sum();
        assert!((total - 1.0).abs() < 1e-12);
    }
    let last = rows[5].as_array().unwrap();
    assert!((last[2].as_f64().unwrap() - 64.0 / 89.0).abs() < 1e-12);
    assert!(gibbs_profile_json(&p4, 1.0, 0.0, 5).is_err());
}

#[test]
fn mixing_curve_on_k2() {
    let k2 = generate_graph_text("path", 2, 0.0, 0, 0).unwrap();
    let v = parse(mixing_curve_json(&k2, 0.0, 3).unwrap());
    assert_eq!(v["curve"], serde_json::json!([0.5, 0.0, 0.0, 0.0]));
    assert_eq!(v["t_mix"], 1);
    let slow = generate_graph_text("complete", 4, 0.0, 0, 0).unwrap();
    let v = parse(mixing_curve_json(&slow, 6.0, 100).unwrap());
    assert!(v["t_mix"].is_null());
    assert!(mixing_curve_json(&slow, 6.0, 1_000_000).is_err());
}

#[test]
fn trace_is_deterministic_and_bounded() {
    let g = generate_graph_text("gnp", 30, 0.2, 0, 5).unwrap();
    let a = parse(chain_trace_json(&g, 8.0, 10_000, 4).unwrap());
    let b = parse(chain_trace_json(&g, 8.0, 10_000, 4).unwrap());
    assert_eq!(a, b);
    assert_eq!(a["stride"], 5);
    let sizes = a["sizes"].as_array().unwrap();
    assert_eq!(sizes.len(), 2001);
    let k = a["k"].as_u64().unwrap();
    assert!(sizes.iter().all(|s| s.as_u64().unwrap() <= k));
    let d = parse(chain_trace_json(&g, 8.0, 0, 4).unwrap());
    assert!(d["steps"].as_u64().unwrap() > 0);
}
