//! The canonical classical explanation of the square and the triangle.

use probmodels::classicalize::borelify;
use probmodels::testspace::TestSpace;
use probmodels::weights::make_full_model;

fn main() {
    for (name, tests) in [
        ("square", vec![vec!["x", "y"], vec!["u", "v"]]),
        ("triangle", vec![vec!["a", "b"], vec!["b", "c"], vec!["c", "a"]]),
        ("two single-outcome tests", vec![vec!["p"], vec!["q"]]),
    ] {
        let tests: Vec<&[&str]> = tests.iter().map(Vec::as_slice).collect();
        let model = make_full_model(TestSpace::from_labels(&tests).unwrap());
        match borelify(&model) {
            Ok(b) => {
                println!("{name}: |S| = {}", b.classical().point_count());
                let space = b.cover.model.space();
                for (i, block) in b.embedding.map().iter().enumerate() {
                    println!("  {} ↦ {:?}", space.outcome(i), block);
                }
                for (g, mu) in b.measures().unwrap().iter().enumerate() {
                    let shown: Vec<String> = mu.iter().map(ToString::to_string).collect();
                    println!("  state {g}: μ = ({})", shown.join(", "));
                }
            }
            Err(e) => println!("{name}: rejected: {e}"),
        }
    }
}
