//! Write the three synthetic corpora as JSONL.

use stylodrift::corpus::write_documents;
use stylodrift::synthgen::{generate_compare_corpus, generate_shock_corpus, generate_trait_corpus, DetectorSpec, SynthSpec, TraitSpec};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = std::env::args().nth(1).unwrap_or_else(|| "synth_out".into());
    std::fs::create_dir_all(&dir)?;
    let path = |name: &str| std::path::Path::new(&dir).join(name);

    let shock = SynthSpec {
        seed: 1,
        detector: Some(DetectorSpec { pre_rate: 0.05, post_rate: 0.6, ramp_months: 4 }),
        ..SynthSpec::default()
    };
    let docs = generate_shock_corpus(&shock)?;
    write_documents(path("shock.jsonl"), &docs)?;
    println!("shock: {} docs over {} months, onset {}", docs.len(), shock.months, shock.onset);

    let (orig, rew) = generate_compare_corpus(&shock, 200, 0.5)?;
    write_documents(path("compare_originals.jsonl"), &orig)?;
    write_documents(path("compare_rewrites.jsonl"), &rew)?;
    println!("compare: {} pairs", orig.len());

    let t = generate_trait_corpus(&TraitSpec { seed: 1, embedding_dim: 8, ..TraitSpec::default() })?;
    write_documents(path("trait_originals.jsonl"), &t.originals)?;
    write_documents(path("trait_rewrites.jsonl"), &t.rewrites)?;
    println!("trait: {} authors, {} positive", t.originals.len(), t.labels.iter().filter(|&&l| l == 1).count());
    println!("written to {dir}/");
    Ok(())
}
