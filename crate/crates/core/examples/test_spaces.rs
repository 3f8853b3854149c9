//! Outcomes, events, orthogonality and perspectivity in small test spaces.

use probmodels::testspace::TestSpace;

fn main() {
    let square = TestSpace::from_labels(&[&["x", "y"], &["u", "v"]]).unwrap();
    let triangle = TestSpace::from_labels(&[&["a", "b"], &["b", "c"], &["c", "a"]]).unwrap();
    let wedge = TestSpace::from_labels(&[&["a", "b", "c"], &["c", "d", "e"]]).unwrap();

    for (name, s) in [("square", &square), ("triangle", &triangle), ("wedge", &wedge)] {
        println!(
            "{name}: {} outcomes, {} tests, semiclassical {}, {} events",
            s.outcome_count(),
            s.test_count(),
            s.is_semiclassical(),
            s.events().len()
        );
    }

    let ab = wedge.event_from_labels(&["a", "b"]).unwrap();
    let de = wedge.event_from_labels(&["d", "e"]).unwrap();
    println!("wedge: {{a,b}} ~ {{d,e}}: {}", wedge.are_perspective(&ab, &de).unwrap());
    let a = wedge.event_from_labels(&["a"]).unwrap();
    let d = wedge.event_from_labels(&["d"]).unwrap();
    println!("wedge: {{a}} ~ {{d}}: {}", wedge.are_perspective(&a, &d).unwrap());
    println!("wedge: perspective pairs {}", wedge.perspective_pairs().len());
}
