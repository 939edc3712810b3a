//! Largest safe perturbation budget under each distribution scheme.
use std::path::Path;

use uncertain_reach::model::load_model;
use uncertain_reach::robustness::{robustness_threshold, BudgetScheme, ThresholdConfig};

fn main() -> uncertain_reach::error::Result<()> {
    let models = Path::new(env!("CARGO_MANIFEST_DIR")).join("models");

    let scalar = load_model(models.join("scalar_robustness.toml"))?;
    let report = robustness_threshold(&scalar, &scalar.cells(), &ThresholdConfig::new(BudgetScheme::Equal, 0.05))?;
    println!("scalar example: norm {} after {} budgets", report.norm, report.iterations);
    for e in &report.trace {
        println!("  p = {:.2}: {}", e.budget, e.verdict);
    }

    let model = load_model(models.join("example_one.toml"))?;
    let cells = [(0, 0), (0, 1), (1, 1)];
    for scheme in BudgetScheme::ALL {
        let mut config = ThresholdConfig::new(scheme, 0.05);
        config.cap = 100;
        let r = robustness_threshold(&model, &cells, &config)?;
        println!("{:<21} {:?}: budget {:.2}, norm {:.4}", scheme.name(), r.status, r.final_budget, r.norm);
    }
    Ok(())
}
