//! Bloated nominal flowpipes against the numeric recurrence on the same model.
use std::path::Path;

use uncertain_reach::bounds::{symbolic_reach, BoundMethod, NormKind};
use uncertain_reach::model::load_model;
use uncertain_reach::reach;

fn main() -> uncertain_reach::error::Result<()> {
    let model = load_model(Path::new(env!("CARGO_MANIFEST_DIR")).join("models/example_one.toml"))?;
    let lambda = model.uncertainty_matrix()?;
    let times = model.time_grid();
    let numeric = model.numeric_reach()?;
    println!("numeric: {}", reach::safety_check(&numeric, &model.unsafe_set)?);

    let last = times.len() - 1;
    let width = |lo: f64, hi: f64| hi - lo;
    let nb = numeric.stars[last].bounding_box();
    println!("final x2 width: numeric {:.4}", width(nb.intervals()[1].lo(), nb.intervals()[1].hi()));
    for method in BoundMethod::ALL {
        for norm in [NormKind::Two, NormKind::Frobenius] {
            match symbolic_reach(&model.a, &lambda, &model.initial, &times, method, norm) {
                Ok(steps) => {
                    let b = steps[last].bloated_box();
                    let verdict = reach::first_violation(steps.len(), &model.unsafe_set, |k, d| steps[k].support(d))?;
                    println!(
                        "{:<10} {:<9} final x2 width {:.4e}, {verdict}",
                        method.name(),
                        norm.name(),
                        width(b.intervals()[1].lo(), b.intervals()[1].hi())
                    );
                }
                Err(e) => println!("{:<10} {:<9} {e}", method.name(), norm.name()),
            }
        }
    }
    Ok(())
}
