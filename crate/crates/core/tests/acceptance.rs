//! One check per acceptance criterion, each printing a PASS or FAIL line.
//! Run with `cargo test --test acceptance -- --nocapture` to see them.

mod common;

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use num_traits::{One, Signed, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::cones::{cone_sources, cones, mediating_count, subquotients};
use common::{full, relabel};
use probmodels::bell::{build_pr_box, check_bell_local, local_implies_separable_check, ClassicalEmbedding};
use probmodels::classicalize::{
    bor_on_morphism, borelify, semiclassical_cover, BorelError, BorelMap, FiniteBorelModel,
};
use probmodels::cli::files::{
    model_from_value, model_json, model_ref, parse_json, pi_from_value, render, Source,
};
use probmodels::composites::{
    check_composite, is_separable_weight, marginals_and_conditionals, minimal_ns_composite, product_space,
    product_weight, Composite, NsAnalysis, Side,
};
use probmodels::exactlp::{
    hull_membership, int, rat, solve_feasibility, Feasibility, HullMembership, LinearSystem, Rational,
};
use probmodels::morphisms::{
    compose, enumerate_morphisms, pullback_subquotient, Morphism, PerspectivityCheck,
};
use probmodels::outcome::Outcome;
use probmodels::testspace::TestSpace;
use probmodels::weights::{enumerate_dispersion_free, full_weight_polytope_vertices, ProbModel, Weight};

type Check = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures")
}

fn fixture_files(suffix: &str) -> Vec<PathBuf> {
    let mut v: Vec<PathBuf> = std::fs::read_dir(fixtures())
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.to_string_lossy().ends_with(suffix))
        .collect();
    v.sort();
    v
}

fn load_model(path: &Path) -> ProbModel {
    let src = Source::file(path);
    let v = parse_json(&std::fs::read_to_string(path).unwrap(), &src).unwrap();
    model_from_value(&v, &src, "model").unwrap()
}

fn load_composite(path: &Path) -> Composite {
    let src = Source::file(path);
    let v = parse_json(&std::fs::read_to_string(path).unwrap(), &src).unwrap();
    let (a, b, total) = (
        model_ref(&v, &src, "left").unwrap(),
        model_ref(&v, &src, "right").unwrap(),
        model_ref(&v, &src, "total").unwrap(),
    );
    let pi = pi_from_value(&product_space(a.space(), b.space()), total.space(), v.get("pi"), &src).unwrap();
    check_composite(&a, &b, &total, pi).unwrap()
}

fn labels(tests: &[Vec<String>]) -> TestSpace {
    TestSpace::new(tests.iter().map(|t| t.iter().map(|s| Outcome::label(s.as_str())).collect::<Vec<_>>()))
        .unwrap()
}

fn random_semiclassical(rng: &mut ChaCha8Rng) -> TestSpace {
    let k = rng.gen_range(1..=4);
    let tests: Vec<Vec<String>> =
        (0..k).map(|t| (0..rng.gen_range(1..=4)).map(|i| format!("o{t}_{i}")).collect()).collect();
    labels(&tests)
}

fn criterion_1() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut vertex_total = 0;
    for n in 0..50 {
        let s = random_semiclassical(&mut rng);
        ensure(s.is_semiclassical(), || format!("instance {n} is not semiclassical"))?;
        let df: BTreeSet<Weight> = enumerate_dispersion_free(&s).into_iter().collect();
        let vs: BTreeSet<Weight> = full_weight_polytope_vertices(&s).into_iter().collect();
        ensure(df == vs, || format!("instance {n}: {} dispersion-free vs {} vertices", df.len(), vs.len()))?;
        let expected: usize = s.tests().iter().map(Vec::len).product();
        ensure(df.len() == expected, || format!("instance {n}: expected {expected} weights"))?;
        vertex_total += vs.len();
    }
    Ok(format!("50 semiclassical spaces, {vertex_total} vertices, all dispersion-free and all found"))
}

/// A model on at most five outcomes whose states are some vertices of its
/// weight polytope and one mixture of them.
fn random_model(rng: &mut ChaCha8Rng, max_singles: usize) -> Option<ProbModel> {
    let names = ["a", "b", "c", "d", "e"];
    let k = rng.gen_range(2..=4);
    let tests: Vec<Vec<String>> = (0..k)
        .map(|_| {
            let size = rng.gen_range(1..=3);
            let mut pick: Vec<&str> = names.choose_multiple(rng, size).copied().collect();
            pick.sort();
            pick.into_iter().map(String::from).collect()
        })
        .collect();
    let space = labels(&tests);
    let singles = space.single_outcome_tests().len();
    if singles > max_singles || (max_singles > 1 && singles < 2) {
        return None;
    }
    let vs = full_weight_polytope_vertices(&space);
    if vs.is_empty() {
        return None;
    }
    let count = rng.gen_range(1..=3.min(vs.len()));
    let mut states: Vec<Weight> = vs.choose_multiple(rng, count).cloned().collect();
    let (i, j) = (rng.gen_range(0..vs.len()), rng.gen_range(0..vs.len()));
    states.push(Weight::mix([(rat(1, 3), &vs[i]), (rat(2, 3), &vs[j])]).unwrap());
    Some(ProbModel::new(space, states).unwrap())
}

fn check_borelification(name: &str, m: &ProbModel) -> Result<usize, String> {
    let b = borelify(m).map_err(|e| format!("{name}: {e}"))?;
    ensure(b.cover.quotient.classify().quotient, || format!("{name}: cover leg is not a quotient"))?;
    let class = b.embedding.classify(PerspectivityCheck::AllEvents);
    ensure(class.embedding, || format!("{name}: classical leg is not an embedding: {class:?}"))?;
    let measures = b.measures().map_err(|e| format!("{name}: {e}"))?;
    let cover = b.cover.model.space();
    for (k, (alpha, mu)) in m.states().iter().zip(&measures).enumerate() {
        ensure(b.classical().is_probability_vector(mu), || {
            format!("{name}: measure {k} is not a probability")
        })?;
        for (x, block) in b.embedding.map().iter().enumerate() {
            let base = b.cover.quotient.image(x).iter().next().copied().unwrap();
            let lhs = alpha.value(base);
            let rhs = FiniteBorelModel::measure_of(mu, block);
            ensure(*lhs == rhs, || format!("{name}: state {k} at {}: {lhs} vs {rhs}", cover.outcome(x)))?;
        }
    }
    Ok(b.classical().point_count())
}

fn criterion_2() -> Check {
    let square = load_model(&fixtures().join("square.model.json"));
    let triangle = load_model(&fixtures().join("triangle.model.json"));
    let s = check_borelification("square", &square)?;
    let t = check_borelification("triangle", &triangle)?;
    ensure((s, t) == (4, 8), || format!("|S| = {s} and {t}, expected 4 and 8"))?;
    // The written-out classical model is small enough for the square.
    let x = borelify(&square).unwrap().to_explanation(4).map_err(|e| e.to_string())?;
    ensure(x.quotient().classify().quotient && x.embedding().classify().embedding, || {
        "explicit square explanation misclassified".into()
    })?;

    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut accepted = 0;
    while accepted < 20 {
        if let Some(m) = random_model(&mut rng, 1) {
            check_borelification(&format!("random model {accepted}"), &m)?;
            accepted += 1;
        }
    }
    let mut rejected = 0;
    let mut violators = vec![load_model(&fixtures().join("two_singletons.model.json"))];
    while violators.len() < 6 {
        if let Some(m) = random_model(&mut rng, 5) {
            violators.push(m);
        }
    }
    for m in &violators {
        match borelify(m) {
            Err(BorelError::TooManySingleOutcomeTests { tests }) if tests.len() >= 2 => {
                ensure(tests.iter().all(|t| t.len() == 1), || "witness lists a non-singleton test".into())?;
                rejected += 1;
            }
            other => return Err(format!("violator not rejected: {:?}", other.map(|_| ()))),
        }
    }
    Ok(format!(
        "square |S|=4, triangle |S|=8, 20 random models decomposed exactly, {rejected} violators rejected"
    ))
}

fn criterion_3() -> Check {
    let mut families = 0;
    let mut cone_count = 0;
    for (name, e, q) in subquotients() {
        let pb = pullback_subquotient(&e, &q).map_err(|err| format!("{name}: {err}"))?;
        families += 1;
        for d in cone_sources() {
            ensure(d.space().outcome_count() <= 4, || "cone apex too large".into())?;
            let candidates = enumerate_morphisms(&d, pb.apex(), PerspectivityCheck::AllEvents);
            for (phi, psi) in cones(&d, &e, &q) {
                if !(phi.classify().test_preserving && psi.classify().test_preserving) {
                    continue;
                }
                let n = mediating_count(&pb, &candidates, &phi, &psi);
                ensure(n == 1, || format!("{name}: {n} mediating maps for ψ = {:?}", psi.to_labels()))?;
                cone_count += 1;
            }
        }
    }
    ensure(families >= 5, || "fewer than five sub-quotients".into())?;
    Ok(format!(
        "{families} sub-quotients, {cone_count} test-preserving cones, each with exactly one mediating map"
    ))
}

fn criterion_4() -> Check {
    let bor = |m: &ProbModel| FiniteBorelModel::new(semiclassical_cover(m).model);
    let mut pairs = 0;
    let chains: Vec<(ProbModel, ProbModel, ProbModel, Morphism, Morphism)> = {
        let one = full(&[&["p", "q"]]);
        let sq = full(&[&["a", "b"], &["u", "v"]]);
        let three = full(&[&["a", "b"], &["u", "v"], &["m", "n"]]);
        let f = relabel(&one, &sq, &[("p", "b"), ("q", "a")]);
        let g = relabel(&sq, &three, &[("a", "a"), ("b", "b"), ("u", "m"), ("v", "n")]);
        let wide = full(&[&["p", "q", "r"]]);
        let edge = full(&[&["x", "y"]]);
        let coarse = Morphism::from_labels(
            &wide,
            &edge,
            &[("p", vec!["x"]), ("q", vec!["y"]), ("r", vec![])]
                .into_iter()
                .map(|(k, v)| (Outcome::label(k), v.into_iter().map(Outcome::label).collect()))
                .collect(),
            PerspectivityCheck::AllEvents,
        )
        .map_err(|e| e.to_string())?;
        let into_sq = relabel(&edge, &sq, &[("x", "u"), ("y", "v")]);
        vec![(one, sq.clone(), three, f, g), (wide, edge, sq, coarse, into_sq)]
    };
    for (a, b, c, f, g) in chains {
        let (ba, bb, bc) = (bor(&a), bor(&b), bor(&c));
        for (m, bm) in [(&a, &ba), (&b, &bb), (&c, &bc)] {
            let id = bor_on_morphism(&Morphism::identity(m), bm, bm).map_err(|e| e.to_string())?;
            ensure(id == BorelMap::identity(bm), || "Bor(id) is not the identity".into())?;
        }
        let gf = compose(&g, &f).map_err(|e| e.to_string())?;
        let lhs = bor_on_morphism(&gf, &ba, &bc).map_err(|e| e.to_string())?;
        let rhs = bor_on_morphism(&f, &ba, &bb)
            .and_then(|bf| bor_on_morphism(&g, &bb, &bc).and_then(|bg| bf.then(&bg)))
            .map_err(|e| e.to_string())?;
        ensure(lhs == rhs, || "Bor(g∘f) differs from Bor(g)∘Bor(f)".into())?;
        ensure(lhs.preserves_states(), || "Bor(g∘f) does not preserve states".into())?;
        pairs += 1;
    }
    Ok(format!("{pairs} composable pairs: identities and composites preserved exactly"))
}

fn criterion_5() -> Check {
    let pr = build_pr_box();
    let (a, b) = (pr.composite.left().space(), pr.composite.right().space());
    let half = Weight::mix([(rat(1, 2), &pr.omega), (rat(1, 2), &pr.omega_prime)]).unwrap();
    ensure(pr.pr_box == half, || "PR box is not the even mixture".into())?;
    let p = pr.composite.product();
    let at = |w: &Weight, x: &str, y: &str| {
        w.value(p.index_of(&Outcome::pair(x.into(), y.into())).unwrap()).clone()
    };
    for (x, y) in [("x", "x"), ("x", "u"), ("u", "x"), ("u", "v")] {
        ensure(at(&pr.omega, x, y).is_one(), || format!("ω({x},{y}) ≠ 1"))?;
    }
    for (x, y) in [("y", "y"), ("y", "v"), ("v", "y"), ("v", "u")] {
        ensure(at(&pr.omega_prime, x, y).is_one(), || format!("ω′({x},{y}) ≠ 1"))?;
    }
    for (name, w) in [("ω", &pr.omega), ("ω′", &pr.omega_prime)] {
        let NsAnalysis::Signalling(wit) = marginals_and_conditionals(a, b, w) else {
            return Err(format!("{name} is not flagged signalling"));
        };
        let mut vals = [wit.values.0.clone(), wit.values.1.clone()];
        vals.sort();
        ensure(
            wit.side == Side::Right && wit.outcome == Outcome::label("u") && vals == [int(0), int(1)],
            || format!("{name}: unexpected witness {wit:?}"),
        )?;
    }
    let NsAnalysis::NonSignalling(m) = marginals_and_conditionals(a, b, &pr.pr_box) else {
        return Err("PR box flagged signalling".into());
    };
    ensure(m.left.values().iter().chain(m.right.values()).all(|v| *v == rat(1, 2)), || {
        "marginals not 1/2".into()
    })?;
    let products: Vec<Vec<Rational>> = full_weight_polytope_vertices(a)
        .iter()
        .flat_map(|v| {
            full_weight_polytope_vertices(b).into_iter().map(move |w| product_weight(v, &w).into_values())
        })
        .collect();
    match is_separable_weight(a, b, &pr.pr_box) {
        HullMembership::NotMember(h) => {
            ensure(h.verify(pr.pr_box.values(), &products), || "certificate does not verify".into())?;
            Ok(format!(
                "PR box = ½(ω+ω′), both signalling on u (1 vs 0), marginals 1/2, entangled with verified hyperplane (offset {})",
                h.offset
            ))
        }
        HullMembership::Member(_) => Err("PR box reported separable".into()),
    }
}

fn criterion_6() -> Check {
    let mut suite: Vec<(String, Composite)> = fixture_files(".composite.json")
        .into_iter()
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), load_composite(&p)))
        .collect();
    let parts = [
        ("single", full(&[&["x", "y"]])),
        ("square", full(&[&["x", "y"], &["u", "v"]])),
        ("triangle", full(&[&["a", "b"], &["b", "c"], &["c", "a"]])),
    ];
    for (n1, m1) in &parts {
        for (n2, m2) in &parts {
            let points: usize = m1
                .space()
                .tests()
                .iter()
                .map(Vec::len)
                .product::<usize>()
                .pow(m2.space().test_count() as u32)
                * m2.space()
                    .tests()
                    .iter()
                    .map(Vec::len)
                    .product::<usize>()
                    .pow(m1.space().test_count() as u32);
            if points <= 256 {
                suite.push((format!("{n1} x {n2} minimal"), minimal_ns_composite(m1, m2)));
            }
        }
    }
    let pr = build_pr_box();
    let (mut local, mut nonlocal, mut with_pr) = (0, 0, 0);
    for (name, c) in &suite {
        let emb = ClassicalEmbedding::canonical(c).map_err(|e| format!("{name}: {e}"))?;
        let verdict = check_bell_local(c, &emb);
        if verdict.local {
            local += 1;
            let reports = local_implies_separable_check(c, &emb).map_err(|e| format!("{name}: {e}"))?;
            for r in &reports {
                ensure(r.mixture_verified && r.separable.is_member(), || {
                    format!("{name}: state {} is not separable despite a local embedding", r.generator)
                })?;
            }
            for g in c.total().states() {
                let w = c.restrict(g);
                ensure(is_separable_weight(c.left().space(), c.right().space(), &w).is_member(), || {
                    format!("{name}: counterexample to local ⇒ separable")
                })?;
            }
        } else {
            nonlocal += 1;
        }
        if c.product() == pr.composite.product() {
            let restricted: Vec<Vec<Rational>> =
                c.total().states().iter().map(|g| c.restrict(g).into_values()).collect();
            if hull_membership(pr.pr_box.values(), &restricted).unwrap().is_member() {
                with_pr += 1;
                ensure(!verdict.local, || format!("{name}: contains the PR box but is local"))?;
                ensure(verdict.witnesses.iter().any(|w| w.is_signalling()), || {
                    format!("{name}: no signalling witness")
                })?;
            }
        }
    }
    ensure(local > 0 && with_pr > 0, || format!("suite too thin: {local} local, {with_pr} with the PR box"))?;
    Ok(format!(
        "{} composites: {local} local (all states separable), {nonlocal} not local, {with_pr} containing the PR box all non-local with signalling witnesses",
        suite.len()
    ))
}

// Criterion 7: an exact brute-force oracle on small grids.

const GRID: [i64; 9] = [-4, -3, -2, -1, 0, 1, 2, 3, 4];

fn grid_points(d: usize) -> Vec<Vec<Rational>> {
    let mut pts = vec![vec![]];
    for _ in 0..d {
        pts = pts
            .into_iter()
            .flat_map(|p| GRID.iter().map(move |&g| [p.clone(), vec![rat(g, 4)]].concat()))
            .collect();
    }
    pts
}

/// Difference and bound constraints with right-hand sides in `(1/4)ℤ`
/// have vertices in `(1/4)ℤ`; with every variable boxed into `[-1, 1]`
/// a feasible system has a grid point, so grid search decides it.
fn random_tu_system(rng: &mut ChaCha8Rng, d: usize) -> LinearSystem {
    let mut sys = LinearSystem::new(d);
    for i in 0..d {
        sys.add_lower_bound(i, rat(rng.gen_range(-4..=4), 4));
        sys.add_upper_bound(i, rat(rng.gen_range(-4..=4), 4));
        sys.add_lower_bound(i, int(-1));
        sys.add_upper_bound(i, int(1));
    }
    for _ in 0..rng.gen_range(0..=d + 1) {
        let (i, j) = (rng.gen_range(0..d), rng.gen_range(0..d));
        if i == j {
            continue;
        }
        let mut row = vec![int(0); d];
        row[i] = int(1);
        row[j] = int(-1);
        let rhs = rat(rng.gen_range(-4..=4), 4);
        if rng.gen_bool(0.25) {
            sys.add_equality(row, rhs);
        } else {
            sys.add_inequality(row, rhs);
        }
    }
    sys
}

/// Small integer constraints that a planted grid point satisfies, so the
/// grid always finds a witness.
fn random_planted_system(rng: &mut ChaCha8Rng, d: usize) -> LinearSystem {
    let planted: Vec<Rational> = (0..d).map(|_| rat(rng.gen_range(-4..=4), 4)).collect();
    let mut sys = LinearSystem::new(d);
    for i in 0..d {
        sys.add_lower_bound(i, int(-1));
        sys.add_upper_bound(i, int(1));
    }
    for _ in 0..rng.gen_range(1..=3) {
        let row: Vec<Rational> = (0..d).map(|_| int(rng.gen_range(-2..=2))).collect();
        let at: Rational = row.iter().zip(&planted).map(|(a, x)| a * x).sum();
        sys.add_inequality(row, at + rat(rng.gen_range(0..=2), 4));
    }
    sys
}

fn grid_feasible(sys: &LinearSystem) -> bool {
    grid_points(sys.dimension).iter().any(|p| sys.is_satisfied_by(p))
}

/// Solves a square system by elimination, or `None` when singular.
fn solve_square(mut a: Vec<Vec<Rational>>, mut b: Vec<Rational>) -> Option<Vec<Rational>> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, piv);
        b.swap(col, piv);
        for r in 0..n {
            if r != col && !a[r][col].is_zero() {
                let f = &a[r][col] / &a[col][col];
                let pivot_row = a[col].clone();
                for (x, p) in a[r].iter_mut().zip(&pivot_row) {
                    *x -= &f * p;
                }
                let v = &f * &b[col];
                b[r] -= v;
            }
        }
    }
    Some((0..n).map(|i| &b[i] / &a[i][i]).collect())
}

fn subsets_up_to(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for i in 0..n {
        let more: Vec<Vec<usize>> =
            out.iter().filter(|s| s.len() < k).map(|s| [s.clone(), vec![i]].concat()).collect();
        out.extend(more);
    }
    out.retain(|s| !s.is_empty());
    out
}

/// Carathéodory: a point of the hull lies in the hull of some affinely
/// independent subset of at most `d + 1` generators. Its barycentric
/// coordinates then solve some square subsystem of the `d + 1` equations
/// (coordinates and total weight). Tries every subset and every subsystem.
fn caratheodory_member(point: &[Rational], gens: &[Vec<Rational>]) -> bool {
    let d = point.len();
    let row = |r: usize, g: usize| if r == d { int(1) } else { gens[g][r].clone() };
    let rhs = |r: usize| if r == d { int(1) } else { point[r].clone() };
    for s in subsets_up_to(gens.len(), d + 1) {
        let k = s.len();
        for rows in subsets_up_to(d + 1, k).into_iter().filter(|r| r.len() == k) {
            let a: Vec<Vec<Rational>> =
                rows.iter().map(|&r| s.iter().map(|&g| row(r, g)).collect()).collect();
            let b: Vec<Rational> = rows.iter().map(|&r| rhs(r)).collect();
            let Some(lambda) = solve_square(a, b) else { continue };
            if lambda.iter().any(|l| l.is_negative()) || lambda.iter().sum::<Rational>() != int(1) {
                continue;
            }
            let mut sum = vec![int(0); d];
            for (l, &g) in lambda.iter().zip(&s) {
                for (x, v) in sum.iter_mut().zip(&gens[g]) {
                    *x += l * v;
                }
            }
            if sum == point {
                return true;
            }
        }
    }
    false
}

fn criterion_7() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let (mut feasible, mut infeasible, mut members, mut outside) = (0, 0, 0, 0);
    for n in 0..100 {
        let d = rng.gen_range(1..=4);
        let sys = if n % 2 == 0 { random_tu_system(&mut rng, d) } else { random_planted_system(&mut rng, d) };
        let oracle = grid_feasible(&sys);
        let answer = solve_feasibility(&sys).map_err(|e| e.to_string())?;
        match &answer {
            Feasibility::Feasible(x) => {
                ensure(sys.is_satisfied_by(x), || format!("instance {n}: bad point"))?
            }
            Feasibility::Infeasible(c) => {
                ensure(c.verify(&sys), || format!("instance {n}: bad certificate"))?
            }
        }
        ensure(answer.is_feasible() == oracle, || {
            format!("instance {n}: solver {} vs grid {oracle}", answer.is_feasible())
        })?;
        if oracle {
            feasible += 1;
        } else {
            infeasible += 1;
        }
    }
    for n in 0..100 {
        let d = rng.gen_range(1..=4);
        let gens: Vec<Vec<Rational>> = (0..rng.gen_range(1..=5))
            .map(|_| (0..d).map(|_| rat(rng.gen_range(-4..=4), 4)).collect())
            .collect();
        let point: Vec<Rational> = if rng.gen_bool(0.5) {
            (0..d).map(|_| rat(rng.gen_range(-4..=4), 4)).collect()
        } else {
            let (i, j) = (rng.gen_range(0..gens.len()), rng.gen_range(0..gens.len()));
            gens[i].iter().zip(&gens[j]).map(|(a, b)| (a + b) / int(2)).collect()
        };
        let oracle = caratheodory_member(&point, &gens);
        let answer = hull_membership(&point, &gens).map_err(|e| e.to_string())?;
        match &answer {
            HullMembership::Member(c) => {
                ensure(c.verify(&point, &gens), || format!("hull {n}: bad combination"))?
            }
            HullMembership::NotMember(h) => {
                ensure(h.verify(&point, &gens), || format!("hull {n}: bad hyperplane"))?
            }
        }
        ensure(answer.is_member() == oracle, || {
            format!("hull {n}: solver {} vs oracle {oracle}", answer.is_member())
        })?;
        if oracle {
            members += 1;
        } else {
            outside += 1;
        }
    }
    Ok(format!(
        "200 instances, 0 disagreements ({feasible} feasible, {infeasible} infeasible, {members} in hull, {outside} outside)"
    ))
}

fn cli(args: &[&str], stdin: &str) -> (i32, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let mut input = stdin.as_bytes();
    let argv = std::iter::once("probmodels").chain(args.iter().copied());
    let code = probmodels::cli::run(argv, &mut input, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap())
}

fn criterion_8() -> Check {
    let mut models = 0;
    for path in fixture_files(".model.json") {
        let text = std::fs::read_to_string(&path).unwrap();
        let again = render(&model_json(&load_model(&path)));
        ensure(again == text, || format!("{} is not reproduced byte for byte", path.display()))?;
        models += 1;
    }
    let mut docs = 0;
    for suffix in [".composite.json", ".morphism.json", ".joint.json", ".explanation.json"] {
        for path in fixture_files(suffix) {
            let text = std::fs::read_to_string(&path).unwrap();
            let v: serde_json::Value = serde_json::from_str(&text).unwrap();
            ensure(render(&v) == text, || format!("{} is not in canonical layout", path.display()))?;
            docs += 1;
        }
    }
    let f = |name: &str| fixtures().join(name).to_string_lossy().into_owned();
    let commands: Vec<Vec<String>> = vec![
        vec!["validate".into(), f("square.model.json")],
        vec!["df-enum".into(), f("triangle.model.json")],
        vec!["borelify".into(), f("triangle.model.json")],
        vec![
            "pullback".into(),
            f("single_in_square.morphism.json"),
            f("square_cover_quotient.morphism.json"),
        ],
        vec!["separable-check".into(), f("pr_box.joint.json")],
        vec!["bell-check".into(), f("square_min.composite.json")],
        vec!["pr-box".into()],
    ];
    for args in &commands {
        let args: Vec<&str> = args.iter().map(String::as_str).collect();
        let first = cli(&args, "");
        let second = cli(&args, "");
        ensure(first == second, || format!("{args:?} is not deterministic"))?;
    }
    let (code, df) = cli(&["df-enum", &f("triangle.model.json")], "");
    ensure(code == 0 && df.contains("\"count\": 0"), || "triangle df count".into())?;
    let (_, pr) = cli(&["pr-box"], "");
    let (ns, _) = cli(&["ns-check", "-"], &pr);
    let (sep, cert) =
        cli(&["separable-check", "-", "--parts", &f("square.model.json"), &f("square.model.json")], &pr);
    ensure(ns == 0 && sep == 1 && cert.contains("certificate"), || format!("pipe exits {ns} and {sep}"))?;
    Ok(format!(
        "{models} models round-trip byte for byte, {docs} documents canonical, {} commands byte-identical across runs",
        commands.len()
    ))
}

type Criterion = (&'static str, fn() -> Check);

/// Runs without the libtest harness so that every criterion line is printed.
fn main() {
    let criteria: [Criterion; 8] = [
        ("dispersion-free weights are the vertices (semiclassical)", criterion_1),
        ("Borelification decomposes every state", criterion_2),
        ("sub-quotient pullbacks are universal", criterion_3),
        ("functor laws for the classical model", criterion_4),
        ("PR box fixture", criterion_5),
        ("Bell-local implies separable", criterion_6),
        ("exact kernel agrees with brute force", criterion_7),
        ("CLI round-trip and determinism", criterion_8),
    ];
    let mut failed = Vec::new();
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = std::time::Instant::now();
        let outcome = std::panic::catch_unwind(check).unwrap_or_else(|_| Err("panicked".to_string()));
        match outcome {
            Ok(detail) => println!("criterion {}: PASS {name}: {detail} [{:.2?}]", i + 1, start.elapsed()),
            Err(why) => {
                println!("criterion {}: FAIL {name}: {why}", i + 1);
                failed.push(i + 1);
            }
        }
    }
    if !failed.is_empty() {
        eprintln!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
}
