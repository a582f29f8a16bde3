//! Monthly variance series and the discontinuous growth model on a
//! synthetic corpus whose variance drops at onset.

use stylodrift::complexity::{compute_features, fit_standardization, FeatureOptions};
use stylodrift::corpus::tokenize;
use stylodrift::synthgen::{generate_shock_corpus, SynthSpec};
use stylodrift::timeseries::{cronbach_alpha, fit_dgm, monthly_variance, DgmOptions};

fn main() -> stylodrift::Result<()> {
    let spec = SynthSpec { seed: 3, ..SynthSpec::default() };
    let docs = generate_shock_corpus(&spec)?;

    let mut dated = Vec::with_capacity(docs.len());
    for d in &docs {
        dated.push((d.date, compute_features(&tokenize(d)?, None, FeatureOptions::default())?));
    }
    let pooled: Vec<_> = dated.iter().map(|(_, v)| v.clone()).collect();
    let stats = fit_standardization(&pooled)?;
    let series = monthly_variance(&dated, &stats, 2)?;
    println!("{} documents, {} observed months, onset {}", docs.len(), series.observed_months(), spec.onset);

    let alpha = cronbach_alpha(&series.item_matrix())?;
    println!("Cronbach alpha {:.3} [{:.3}, {:.3}]", alpha.alpha, alpha.ci_low, alpha.ci_high);

    let fit = fit_dgm(&series, spec.onset, &DgmOptions::default())?;
    println!("AR(1) rho = {:.2}, df = {}", fit.ar1_rho, fit.df);
    println!("{:<10} {:>10} {:>9} {:>8} {:>9}", "term", "estimate", "se", "t", "p");
    for t in &fit.terms {
        println!("{:<10} {:>10.4} {:>9.4} {:>8.2} {:>9.2e}", t.term, t.estimate, t.std_error, t.t, t.p_value);
    }
    Ok(())
}
