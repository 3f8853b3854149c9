//! Dispersion-free weights and the vertices of the weight polytope.

use probmodels::testspace::TestSpace;
use probmodels::weights::{enumerate_dispersion_free, full_weight_polytope_vertices};

fn main() {
    let cases = [
        ("square", TestSpace::from_labels(&[&["x", "y"], &["u", "v"]]).unwrap()),
        ("triangle", TestSpace::from_labels(&[&["a", "b"], &["b", "c"], &["c", "a"]]).unwrap()),
        ("wedge", TestSpace::from_labels(&[&["a", "b", "c"], &["c", "d", "e"]]).unwrap()),
    ];
    for (name, s) in cases {
        let df = enumerate_dispersion_free(&s);
        let vs = full_weight_polytope_vertices(&s);
        println!("{name}: {} dispersion-free weights, {} vertices", df.len(), vs.len());
        for v in &vs {
            let shown: Vec<String> = v.to_map(&s).iter().map(|(o, p)| format!("{o}={p}")).collect();
            println!("  {}", shown.join(" "));
        }
    }
}
