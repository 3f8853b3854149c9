//! Checking morphisms, classifying them, and composing explanations by
//! pulling back an embedding along a quotient.

use std::collections::BTreeMap;

use probmodels::classicalize::semiclassical_cover;
use probmodels::morphisms::{
    compose_explanations, pullback_subquotient, Explanation, Morphism, PerspectivityCheck,
};
use probmodels::outcome::Outcome;
use probmodels::testspace::TestSpace;
use probmodels::weights::make_full_model;

fn map(pairs: &[(&str, &[&str])]) -> BTreeMap<Outcome, Vec<Outcome>> {
    pairs.iter().map(|(k, v)| (Outcome::label(*k), v.iter().map(|o| Outcome::label(*o)).collect())).collect()
}

fn main() {
    let edge = make_full_model(TestSpace::from_labels(&[&["x", "y"]]).unwrap());
    let square = make_full_model(TestSpace::from_labels(&[&["x", "y"], &["u", "v"]]).unwrap());

    let incl = Morphism::from_labels(
        &edge,
        &square,
        &map(&[("x", &["x"]), ("y", &["y"])]),
        PerspectivityCheck::AllEvents,
    )
    .unwrap();
    println!("inclusion: {:?}", incl.classify());

    let coarse =
        Morphism::from_labels(&edge, &square, &map(&[("x", &["x"]), ("y", &[])]), PerspectivityCheck::Tests);
    println!("x ↦ {{x}}, y ↦ ∅: {}", if coarse.is_ok() { "a morphism" } else { "rejected" });

    let cover = semiclassical_cover(&square);
    let x = pullback_subquotient(&incl, &cover.quotient).unwrap();
    println!(
        "pullback apex outcomes: {:?}",
        x.apex().space().outcomes().iter().map(ToString::to_string).collect::<Vec<_>>()
    );

    let first = Explanation::new(Morphism::identity(&edge), incl).unwrap();
    let second = Explanation::new(cover.quotient.clone(), Morphism::identity(&cover.model)).unwrap();
    let composed = compose_explanations(&first, &second).unwrap();
    println!(
        "composite explanation: {} outcomes explained by {} outcomes through {} apex outcomes",
        composed.explained().space().outcome_count(),
        composed.explaining().space().outcome_count(),
        composed.apex().space().outcome_count()
    );
}
