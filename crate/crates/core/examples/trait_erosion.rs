//! Train trait classifiers on originals, score them on rewrites that strip
//! the trait markers, and summarize the F1 drop.

use stylodrift::synthgen::{generate_trait_corpus, TraitSpec};
use stylodrift::traitlab::{run_experiment, ExperimentConfig, TraitDataset};

fn main() -> stylodrift::Result<()> {
    let spec = TraitSpec { n_authors: 200, seed: 9, ..TraitSpec::default() };
    let corpus = generate_trait_corpus(&spec)?;
    let ds = TraitDataset::from_corpora(&corpus.originals, &corpus.rewrites, &spec.trait_name)?;
    let cfg = ExperimentConfig {
        seeds: (0..4).collect(),
        min_successful_runs: 10,
        ..ExperimentConfig::default()
    };
    let rep = run_experiment(&ds, &cfg)?;
    println!("{} items, {} classes, {} runs", rep.n_items, rep.n_classes, rep.runs.len());

    let Some(a) = rep.aggregate else {
        println!("aggregate withheld: {}", rep.withheld.unwrap_or_default());
        return Ok(());
    };
    println!("successful runs      {}", a.n_successful);
    println!("F1 original          {:.4}", a.mean_f1_original);
    println!("F1 rewrite           {:.4}", a.mean_f1_rewrite);
    println!("drop                 {:.4} [{:.4}, {:.4}]", a.mean_f1_drop, a.drop_ci_low, a.drop_ci_high);
    if let Some(t) = &a.f1_test {
        println!("paired t             {:.2} (p {:.2e}, d {:.2})", t.statistic, t.p_value, t.effect_size().unwrap_or(f64::NAN));
    }
    println!("baseline empirical   {:.4}", a.mean_baseline);
    println!("baseline uniform     {:.4}", a.mean_baseline_uniform);
    println!("delta orig/rewrite   {:.4} / {:.4}", a.mean_delta_original, a.mean_delta_rewrite);
    println!("shifts 0->1 / 1->0   {:.2} / {:.2}", a.mean_zero_to_one, a.mean_one_to_zero);
    Ok(())
}
