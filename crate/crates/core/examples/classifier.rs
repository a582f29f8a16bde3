//! TF-IDF features, stratified folds and a linear classifier by hand.

use stylodrift::corpus::tokenize;
use stylodrift::synthgen::{generate_trait_corpus, TraitSpec};
use stylodrift::traitlab::{f1_macro, kfold_split, tfidf_fit, train_classifier, ModelKind};

fn main() -> stylodrift::Result<()> {
    let corpus = generate_trait_corpus(&TraitSpec { n_authors: 120, seed: 4, ..TraitSpec::default() })?;
    let streams = corpus.originals.iter().map(tokenize).collect::<stylodrift::Result<Vec<_>>>()?;
    let labels = &corpus.labels;

    for kind in [ModelKind::Logistic, ModelKind::Svm] {
        let mut scores = Vec::new();
        for fold in kfold_split(labels, 5, 1)? {
            let train: Vec<usize> = fold.train.iter().chain(&fold.validation).copied().collect();
            let tfidf = tfidf_fit(&train.iter().map(|&i| &streams[i]).collect::<Vec<_>>())?;
            let x: Vec<_> = train.iter().map(|&i| tfidf.transform(&streams[i])).collect();
            let y: Vec<usize> = train.iter().map(|&i| labels[i]).collect();
            let model = train_classifier(kind, &x, tfidf.dim(), &y, 2, 1e-3, 7)?;
            let preds: Vec<usize> = fold.test.iter().map(|&i| model.predict(&tfidf.transform(&streams[i]))).collect();
            let truth: Vec<usize> = fold.test.iter().map(|&i| labels[i]).collect();
            scores.push(f1_macro(&preds, &truth)?);
        }
        let mean = scores.iter().sum::<f64>() / scores.len() as f64;
        println!("{kind:?}: fold F1 {scores:.3?}, mean {mean:.3}");
    }
    Ok(())
}
