//! Numeric reachability of the Girard-style model with and without reduction.
use std::path::Path;

use uncertain_reach::model::load_model;
use uncertain_reach::reach::{self, ReductionPolicy};

fn main() -> uncertain_reach::error::Result<()> {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("models/girard_i.toml");
    let model = load_model(path)?;
    let sys = model.discrete_system()?;

    let full = reach::ors_reach(&sys, &model.initial, model.horizon, &ReductionPolicy::NONE)?;
    let reduced = reach::ors_reach(&sys, &model.initial, model.horizon, &model.reduction)?;
    for (label, r) in [("no reduction", &full), ("reduction", &reduced)] {
        let last = r.stars.last().unwrap();
        println!(
            "{label:<13} {:>8.3} s, {:>5} generators at the end, {}",
            r.elapsed.as_secs_f64(),
            last.num_generators(),
            reach::safety_check(r, &model.unsafe_set)?
        );
    }
    for k in [0, 500, 1000, 2050] {
        let (f, g) = (full.stars[k].bounding_box(), reduced.stars[k].bounding_box());
        println!(
            "step {k:>4}: x1 in [{:.4}, {:.4}] (reduced [{:.4}, {:.4}])",
            f.intervals()[0].lo(),
            f.intervals()[0].hi(),
            g.intervals()[0].lo(),
            g.intervals()[0].hi()
        );
    }
    Ok(())
}
