//! Sub-quotients, cone sources and commuting cones shared by the
//! universal-property checks.

use probmodels::classicalize::semiclassical_cover;
use probmodels::exactlp::rat;
use probmodels::morphisms::{
    check_morphism, compose, enumerate_morphisms, Explanation, Morphism, PerspectivityCheck,
};
use probmodels::testspace::Event;
use probmodels::weights::ProbModel;

use super::{full, relabel, restricted, square, triangle};

/// `(e, q)` pairs: an embedding and a quotient into a common model.
pub fn subquotients() -> Vec<(&'static str, Morphism, Morphism)> {
    let sq = square();
    let tri = triangle();
    let sq_cover = semiclassical_cover(&sq).quotient;
    let tri_cover = semiclassical_cover(&tri).quotient;
    let edge = full(&[&["a", "b"]]);
    let half_edge = restricted(&[&["a", "b"]], vec![vec![rat(1, 2), rat(1, 2)]]);
    let z = full(&[&["z1", "z2"]]);
    let doubled = full(&[&["p", "q"], &["r", "s"]]);
    let tripled = full(&[&["p", "q"], &["r", "s"], &["t", "w"]]);
    vec![
        ("square cover", Morphism::identity(&sq), sq_cover),
        ("triangle cover", Morphism::identity(&tri), tri_cover.clone()),
        ("edge in square", relabel(&edge, &sq, &[("a", "a"), ("b", "b")]), Morphism::identity(&sq)),
        ("edge in triangle cover", relabel(&half_edge, &tri, &[("a", "a"), ("b", "b")]), tri_cover),
        (
            "doubled test",
            Morphism::identity(&z),
            relabel(&doubled, &z, &[("p", "z1"), ("q", "z2"), ("r", "z1"), ("s", "z2")]),
        ),
        (
            "edge under tripled square",
            relabel(&edge, &sq, &[("a", "a"), ("b", "b")]),
            relabel(&tripled, &sq, &[("p", "a"), ("q", "b"), ("r", "a"), ("s", "b"), ("t", "u"), ("w", "v")]),
        ),
    ]
}

pub fn cone_sources() -> Vec<ProbModel> {
    vec![
        full(&[&["d1"]]),
        full(&[&["d1", "d2"]]),
        full(&[&["d1", "d2", "d3"]]),
        full(&[&["d1", "d2"], &["d3", "d4"]]),
        full(&[&["d1", "d2"], &["d2", "d3"]]),
        full(&[&["d1"], &["d2", "d3"]]),
        restricted(&[&["d1", "d2"]], vec![vec![rat(1, 2), rat(1, 2)]]),
    ]
}

/// Commuting cones `(φ, ψ)` with `e∘φ = q∘ψ`; `φ` is forced by `ψ`.
pub fn cones(d: &ProbModel, e: &Morphism, q: &Morphism) -> Vec<(Morphism, Morphism)> {
    let e_points = e.point_map().unwrap();
    let mut out = Vec::new();
    for psi in enumerate_morphisms(d, q.source(), PerspectivityCheck::AllEvents) {
        let image = compose(q, &psi).unwrap();
        let phi_map: Option<Vec<Event>> = image
            .map()
            .iter()
            .map(|img| img.iter().map(|z| e_points.iter().position(|p| p == z)).collect())
            .collect();
        let Some(phi_map) = phi_map else { continue };
        let Ok(phi) = check_morphism(d, e.source(), phi_map, PerspectivityCheck::AllEvents) else {
            continue;
        };
        assert_eq!(compose(e, &phi).unwrap(), image);
        out.push((phi, psi));
    }
    out
}

/// Maps `ξ` into the pullback apex with `q′∘ξ = φ` and `e′∘ξ = ψ`.
pub fn mediating_count(pb: &Explanation, candidates: &[Morphism], phi: &Morphism, psi: &Morphism) -> usize {
    candidates
        .iter()
        .filter(|xi| {
            compose(pb.quotient(), xi).unwrap() == *phi && compose(pb.embedding(), xi).unwrap() == *psi
        })
        .count()
}
