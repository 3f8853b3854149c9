//! Feasibility with Farkas certificates, hull membership and vertex
//! enumeration, all in exact rationals.

use probmodels::exactlp::{
    enumerate_vertices, hull_membership, int, rat, solve_feasibility, Feasibility, LinearSystem, Rational,
};

fn show(v: &[Rational]) -> String {
    let parts: Vec<String> = v.iter().map(ToString::to_string).collect();
    format!("[{}]", parts.join(", "))
}

fn main() {
    // x + y = 1, x ≥ 0, y ≥ 0, x ≤ 1/3.
    let mut sys = LinearSystem::new(2);
    sys.add_equality(vec![int(1), int(1)], int(1));
    sys.add_lower_bound(0, int(0));
    sys.add_lower_bound(1, int(0));
    sys.add_upper_bound(0, rat(1, 3));
    match solve_feasibility(&sys).unwrap() {
        Feasibility::Feasible(x) => println!("feasible point: ({}, {})", x[0], x[1]),
        Feasibility::Infeasible(_) => println!("infeasible"),
    }
    for v in enumerate_vertices(&sys).unwrap() {
        println!("vertex: ({}, {})", v[0], v[1]);
    }

    // Tightening to x ≥ 1/2 makes the system infeasible.
    sys.add_lower_bound(0, rat(1, 2));
    if let Feasibility::Infeasible(c) = solve_feasibility(&sys).unwrap() {
        println!(
            "infeasible; multipliers {} and {}",
            show(&c.equality_multipliers),
            show(&c.inequality_multipliers)
        );
        println!("certificate checks: {}", c.verify(&sys));
    }

    let square = [vec![int(0), int(0)], vec![int(1), int(0)], vec![int(0), int(1)], vec![int(1), int(1)]];
    let inside = hull_membership(&[rat(1, 4), rat(3, 4)], &square).unwrap();
    if let Some(c) = inside.certificate() {
        println!(
            "(1/4, 3/4) = {}",
            c.coefficients.iter().map(|(i, l)| format!("{l}·g{i}")).collect::<Vec<_>>().join(" + ")
        );
    }
    let outside = hull_membership(&[rat(3, 2), int(0)], &square).unwrap();
    println!("(3/2, 0) in the unit square: {}", outside.is_member());
}
