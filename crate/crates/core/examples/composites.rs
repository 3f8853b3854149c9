//! Non-signalling composites, their flags, and separability.

use probmodels::composites::{
    check_composite, is_separable_state, is_separable_weight, minimal_ns_composite, product_space,
    product_weight,
};
use probmodels::exactlp::rat;
use probmodels::testspace::{Event, TestSpace};
use probmodels::weights::{check_weight_values, make_full_model, ProbModel, Weight};

fn main() {
    let square = make_full_model(TestSpace::from_labels(&[&["x", "y"], &["u", "v"]]).unwrap());
    let min = minimal_ns_composite(&square, &square);
    println!(
        "minimal composite of two squares: {} extreme states, {:?}",
        min.total().states().len(),
        min.flags()
    );

    let p = product_space(square.space(), square.space());
    let ident: Vec<Event> = (0..p.outcome_count()).map(|i| Event::from([i])).collect();
    let symmetric: Vec<Weight> = square.states().iter().map(|a| product_weight(a, a)).collect();
    let bosonic = check_composite(&square, &square, &ProbModel::new(p, symmetric).unwrap(), ident).unwrap();
    println!("symmetric products only: {:?}", bosonic.flags());

    let edge = make_full_model(TestSpace::from_labels(&[&["x", "y"]]).unwrap());
    let q = product_space(edge.space(), edge.space());
    let corr = check_weight_values(&q, vec![rat(1, 2), rat(0, 1), rat(0, 1), rat(1, 2)]).unwrap();
    let total = ProbModel::new(q.clone(), vec![corr.clone()]).unwrap();
    let c = check_composite(&edge, &edge, &total, (0..4).map(|i| Event::from([i])).collect()).unwrap();
    println!(
        "perfect correlation: separable as a weight {}, separable as a state {}",
        is_separable_weight(edge.space(), edge.space(), &corr).is_member(),
        is_separable_state(&c, &corr).unwrap().is_member()
    );
}
