//! The PR box as the even mixture of two signalling dispersion-free weights.

use probmodels::bell::build_pr_box;
use probmodels::composites::{is_separable_weight, marginals_and_conditionals, NsAnalysis};

fn main() {
    let pr = build_pr_box();
    let (a, b) = (pr.composite.left().space(), pr.composite.right().space());
    for (name, w) in [("ω", &pr.omega), ("ω′", &pr.omega_prime), ("PR box", &pr.pr_box)] {
        match marginals_and_conditionals(a, b, w) {
            NsAnalysis::Signalling(s) => println!(
                "{name}: signalling; marginal of {} is {} in one context and {} in another",
                s.outcome, s.values.0, s.values.1
            ),
            NsAnalysis::NonSignalling(m) => {
                let shown: Vec<String> = m.left.values().iter().map(ToString::to_string).collect();
                println!("{name}: non-signalling, left marginal ({})", shown.join(", "));
            }
        }
    }
    let sep = is_separable_weight(a, b, &pr.pr_box);
    println!("PR box separable: {}", sep.is_member());
    println!(
        "PR box is a state of the minimal composite: {}",
        pr.composite.total().state_membership(&pr.pr_box).is_member()
    );
}
