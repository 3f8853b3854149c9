use crate::testspace::Event;
use crate::weights::ProbModel;

use super::{check_morphism, Morphism, PerspectivityCheck};

/// Every morphism of models from `source` to `target`, in lexicographic
/// order of the outcome images. Exponential; meant for small spaces.
pub fn enumerate_morphisms(
    source: &ProbModel,
    target: &ProbModel,
    mode: PerspectivityCheck,
) -> Vec<Morphism> {
    let (src, tgt) = (source.space(), target.space());
    let candidates = tgt.events();
    let n = src.outcome_count();
    let mut out = Vec::new();
    let mut map: Vec<Event> = Vec::with_capacity(n);

    // Unions over partially assigned tests only grow, so a union that is
    // already not an event can be pruned.
    let partial_ok = |map: &[Event]| {
        let x = map.len() - 1;
        src.tests_containing(x).all(|t| {
            let test = &src.tests()[t];
            let mut union = Event::new();
            for &y in test.iter().filter(|&&y| y < map.len()) {
                if y != x && !map[y].is_disjoint(&map[x]) {
                    return false;
                }
                union.extend(map[y].iter().copied());
            }
            tgt.is_event(&union)
        })
    };

    fn walk(
        map: &mut Vec<Event>,
        n: usize,
        candidates: &[Event],
        partial_ok: &dyn Fn(&[Event]) -> bool,
        finish: &mut dyn FnMut(&[Event]),
    ) {
        if map.len() == n {
            finish(map);
            return;
        }
        for c in candidates {
            map.push(c.clone());
            if partial_ok(map) {
                walk(map, n, candidates, partial_ok, finish);
            }
            map.pop();
        }
    }

    let mut finish = |map: &[Event]| {
        if let Ok(m) = check_morphism(source, target, map.to_vec(), mode) {
            out.push(m);
        }
    };
    walk(&mut map, n, &candidates, &partial_ok, &mut finish);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testspace::TestSpace;
    use crate::weights::make_full_model;

    #[test]
    fn endomorphisms_of_a_single_test() {
        let m = make_full_model(TestSpace::from_labels(&[&["x", "y"]]).unwrap());
        let all = enumerate_morphisms(&m, &m, PerspectivityCheck::AllEvents);
        // Any two disjoint events of {x,y}: 9 ordered pairs.
        assert!(all.contains(&Morphism::identity(&m)));
        for phi in &all {
            assert!(phi.map()[0].is_disjoint(&phi.map()[1]));
        }
        assert_eq!(all.len(), 9);
    }
}
