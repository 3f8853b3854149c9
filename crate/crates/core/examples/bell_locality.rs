//! Bell locality of canonical classical embeddings.

use probmodels::bell::{build_pr_box, check_bell_local, local_implies_separable_check, ClassicalEmbedding};
use probmodels::composites::minimal_ns_composite;
use probmodels::testspace::TestSpace;
use probmodels::weights::make_full_model;

fn main() {
    let edge = make_full_model(TestSpace::from_labels(&[&["x", "y"]]).unwrap());
    let c = minimal_ns_composite(&edge, &edge);
    let emb = ClassicalEmbedding::canonical(&c).unwrap();
    let v = check_bell_local(&c, &emb);
    println!("one test each side: local {} over {} points", v.local, v.point_count);
    for r in local_implies_separable_check(&c, &emb).unwrap() {
        println!(
            "  state {}: mixture verified {}, separable {}",
            r.generator,
            r.mixture_verified,
            r.separable.is_member()
        );
    }

    let pr = build_pr_box();
    let emb = ClassicalEmbedding::canonical(&pr.composite).unwrap();
    let v = check_bell_local(&pr.composite, &emb);
    let signalling = v.witnesses.iter().filter(|w| w.is_signalling()).count();
    println!(
        "two squares: local {}, {} of {} points fail, {} of them signalling",
        v.local,
        v.witnesses.len(),
        v.point_count,
        signalling
    );
}
