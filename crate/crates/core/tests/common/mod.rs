#![allow(dead_code)]

pub mod cones;

use std::collections::BTreeMap;

use probmodels::exactlp::Rational;
use probmodels::morphisms::{Morphism, PerspectivityCheck};
use probmodels::outcome::Outcome;
use probmodels::testspace::TestSpace;
use probmodels::weights::{check_weight_values, make_full_model, ProbModel};

pub fn space(tests: &[&[&str]]) -> TestSpace {
    TestSpace::from_labels(tests).unwrap()
}

pub fn full(tests: &[&[&str]]) -> ProbModel {
    make_full_model(space(tests))
}

pub fn restricted(tests: &[&[&str]], states: Vec<Vec<Rational>>) -> ProbModel {
    let m = space(tests);
    let states = states.into_iter().map(|v| check_weight_values(&m, v).unwrap()).collect();
    ProbModel::new(m, states).unwrap()
}

pub fn square() -> ProbModel {
    full(&[&["a", "b"], &["u", "v"]])
}

pub fn triangle() -> ProbModel {
    full(&[&["a", "b"], &["b", "c"], &["c", "a"]])
}

/// Outcome-preserving morphism from label pairs.
pub fn relabel(source: &ProbModel, target: &ProbModel, pairs: &[(&str, &str)]) -> Morphism {
    let map: BTreeMap<Outcome, Vec<Outcome>> =
        pairs.iter().map(|(k, v)| (Outcome::label(*k), vec![Outcome::label(*v)])).collect();
    Morphism::from_labels(source, target, &map, PerspectivityCheck::AllEvents).unwrap()
}
