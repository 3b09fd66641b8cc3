use std::collections::HashSet;

use locbound_web::{lattice_partition, lattice_partition_value, overhead, overhead_value, werner_bracket_value};
use serde_json::Value;

fn h2(x: f64) -> f64 {
    if x <= 0.0 || x >= 1.0 {
        0.0
    } else {
        -x * x.log2() - (1.0 - x) * (1.0 - x).log2()
    }
}

/// Relative entropy of entanglement of a two-qubit Werner state.
fn werner_ree(f: f64) -> f64 {
    if f <= 0.5 {
        0.0
    } else {
        1.0 - h2(f)
    }
}

/// `max(1 − S(ρ), 0)` from the spectrum `(F, (1−F)/3, (1−F)/3, (1−F)/3)`.
fn werner_coherent(f: f64) -> f64 {
    let rest = (1.0 - f) / 3.0;
    let term = |x: f64| if x > 0.0 { -x * x.log2() } else { 0.0 };
    (1.0 - term(f) - 3.0 * term(rest)).max(0.0)
}

#[test]
fn overhead_matches_worked_example() {
    let v = overhead_value(100, 10, 0.25, 0.00390625, 1.0, 2, 1.0, 1.0).unwrap();
    assert!((v["value"].as_f64().unwrap() - 0.25 / 7.0).abs() < 1e-12);
    assert_eq!(v["active"], "noise");
    let f = v["quantities"]["f"].as_f64().unwrap();
    assert!((f - 4.0).abs() < 1e-12);
}

#[test]
fn overhead_errors_are_json() {
    let v: Value = serde_json::from_str(&overhead(5, 10, 0.25, 0.01, 1.0, 2, 1.0, 1.0)).unwrap();
    assert!(v["error"].as_str().unwrap().contains("k"));
}

#[test]
fn lattice_blocks_cover_with_recomputed_boundaries() {
    for (w, h, lambda) in [(12, 9, 6.0), (20, 20, 16.0), (7, 1, 3.0), (10, 10, 100.0)] {
        let v = lattice_partition_value(w, h, lambda).unwrap();
        let blocks: Vec<Vec<usize>> = serde_json::from_value(v["blocks"].clone()).unwrap();
        let edges: Vec<(usize, usize)> = serde_json::from_value(v["edges"].clone()).unwrap();
        let sizes: Vec<usize> = serde_json::from_value(v["boundary_sizes"].clone()).unwrap();
        let mut seen = HashSet::new();
        for b in &blocks {
            assert!(b.len() as f64 <= lambda);
            for &x in b {
                assert!(seen.insert(x));
            }
        }
        assert_eq!(seen.len(), w * h);
        // both endpoints of every cut edge
        for (b, &s) in blocks.iter().zip(&sizes) {
            let inside: HashSet<usize> = b.iter().copied().collect();
            let boundary: HashSet<usize> = edges
                .iter()
                .filter(|&&(u, x)| inside.contains(&u) != inside.contains(&x))
                .flat_map(|&(u, x)| [u, x])
                .collect();
            assert_eq!(boundary.len(), s);
        }
        assert_eq!(v["all_hold"], true);
    }
}

#[test]
fn lattice_rejects_empty_and_huge() {
    for (w, h) in [(0, 3), (100, 100)] {
        let v: Value = serde_json::from_str(&lattice_partition(w, h, 4.0)).unwrap();
        assert!(v["error"].is_string());
    }
}

#[test]
fn werner_bracket_contains_closed_form() {
    for f in [0.25, 0.5, 0.7, 0.9, 1.0] {
        let v = werner_bracket_value(f, 2, 600, 11).unwrap();
        let (lo, up) = (v["lower"].as_f64().unwrap(), v["upper"].as_f64().unwrap());
        let exact = werner_ree(f);
        assert!((lo - werner_coherent(f)).abs() < 1e-9, "f = {f}: lower {lo}");
        assert!(lo <= exact + 1e-9 && exact <= up + 1e-9, "f = {f}: {lo} {exact} {up}");
        assert!(up - exact < 0.02, "f = {f}: upper {up} vs {exact}");
    }
}

#[test]
fn werner_bracket_rejects_bad_input() {
    assert!(werner_bracket_value(1.5, 2, 100, 0).is_err());
    assert!(werner_bracket_value(0.9, 0, 100, 0).is_err());
    assert!(werner_bracket_value(0.9, 2, 100_000, 0).is_err());
}
