//! Complexity features for a few documents, with and without a parse.

use std::path::Path;

use stylodrift::complexity::{composite_score, compute_features, fit_standardization, FeatureOptions};
use stylodrift::corpus::{parse_conllu, tokenize_text, TokenStream};

const CONLLU: &str = "\
# doc_id = d1
1\tThe\tthe\tDET\t_\t_\t2\tdet\t_\t_
2\tcat\tcat\tNOUN\t_\t_\t3\tnsubj\t_\t_
3\tsat\tsit\tVERB\t_\t_\t0\troot\t_\t_
4\tdown\tdown\tADV\t_\t_\t3\tadvmod\t_\t_
";

fn main() -> stylodrift::Result<()> {
    let texts = [
        ("d1", "The cat sat down. The cat sat down again, and the cat slept."),
        ("d2", "Quarterly revenue rose while operating margins narrowed sharply."),
        ("d3", "I don't know, I really don't know what we're doing here."),
    ];
    let parses = parse_conllu(CONLLU.as_bytes(), Path::new("inline.conllu"))?;
    let opts = FeatureOptions::default();

    let mut vectors = Vec::new();
    for (id, text) in texts {
        let tokens = TokenStream::new(id, tokenize_text(text));
        let v = compute_features(&tokens, parses.get(id).map(Vec::as_slice), opts)?;
        vectors.push(v);
    }
    let stats = fit_standardization(&vectors)?;

    println!("{:<4} {:>8} {:>8} {:>8} {:>8} {:>8} {:>9}", "id", "simpson", "shannon", "ttr", "hapax", "deplen", "composite");
    for v in &vectors {
        let dep = v.dep_length.map_or("-".to_string(), |d| format!("{d:.3}"));
        println!(
            "{:<4} {:>8.4} {:>8.4} {:>8.4} {:>8.4} {:>8} {:>9.4}",
            v.source_id,
            v.simpson,
            v.shannon,
            v.ttr,
            v.hapax_ratio,
            dep,
            composite_score(v, &stats)?
        );
    }
    Ok(())
}
