use std::collections::BTreeMap;

use super::{context, load_docs, slug, tokens_or_skip, Aggregation, Outcome, SynthKind, EXIT_INSUFFICIENT};
use crate::corpus::{pair_rewrites, write_documents, Document, LabelValue, TokenStream};
use crate::error::{Error, Result};
use crate::lexicon::{
    compare_categorical_with, correlate_continuous_with, demo_lexicon, lexical_shift_report, load_lexicon, Lexicon,
    LexiconFormat, ScoreTable,
};
use crate::report::{write_json, Cell, Table};
use crate::seed::{derive_seed, stream};
use crate::stats::{adjust_pvalues, dunn_posthoc, kruskal_wallis, significance_marker, Adjustment, EffectKind};
use crate::synthgen::{generate_compare_corpus, generate_shock_corpus, generate_trait_corpus};
use crate::traitlab::{
    evaluate_external, load_external_predictions, run_experiment, ExperimentConfig, ExperimentReport, TraitDataset,
};
use crate::PipelineConfig;

fn experiment_config(cfg: &PipelineConfig) -> ExperimentConfig {
    let t = &cfg.traits;
    ExperimentConfig {
        classifier: t.classifier,
        featurization: t.featurization,
        k: t.k,
        seeds: (0..t.seeds as u64).map(|i| derive_seed(cfg.seed, &[stream::TRAITS, i])).collect(),
        reg_grid: t.reg_grid.clone(),
        baseline_trials: t.baseline_trials,
        min_successful_runs: t.min_successful_runs,
    }
}

fn runs_table(rep: &ExperimentReport) -> Table {
    let mut t = Table::new(
        format!("traits_runs_{}", slug(&rep.trait_name)),
        &[
            "seed", "fold", "reg", "f1_original", "f1_rewrite", "baseline", "baseline_uniform", "success", "delta_original",
            "delta_rewrite", "correct_on_original", "zero_to_one", "one_to_zero",
        ],
    );
    for r in &rep.runs {
        t.push(vec![
            Cell::Int(r.seed as i64),
            r.fold.into(),
            r.reg.into(),
            r.f1_original.into(),
            r.f1_rewrite.into(),
            r.baseline.into(),
            r.baseline_uniform.into(),
            r.success.into(),
            r.delta_original.into(),
            r.delta_rewrite.into(),
            r.shift.correct_on_original.into(),
            r.shift.zero_to_one.into(),
            r.shift.one_to_zero.into(),
        ]);
    }
    t
}

/// Rewrite-erosion experiments, one per configured trait.
pub fn cmd_traits(cfg: &PipelineConfig) -> Result<Outcome> {
    let ctx = context(cfg)?;
    let mut outcome = Outcome::default();
    if cfg.traits.names.is_empty() {
        return Err(Error::invalid("config lists no traits.names"));
    }
    let originals = load_docs(cfg, &cfg.documents_path()?)?;
    let rewrites: Vec<Document> = load_docs(cfg, &cfg.rewrites_path()?)?
        .into_iter()
        .filter(|d| cfg.traits.llm.as_ref().is_none_or(|l| d.llm_tag.as_ref() == Some(l)))
        .filter(|d| cfg.traits.prompt.is_none_or(|p| d.prompt_tag == Some(p)))
        .collect();
    let pairing = pair_rewrites(&originals, &rewrites)?;
    let mut seen = std::collections::HashSet::new();
    for (o, _) in &pairing.pairs {
        if !seen.insert(o.id.as_str()) {
            return Err(Error::invalid(format!(
                "original `{}` has several rewrites; set traits.llm and traits.prompt",
                o.id
            )));
        }
    }
    if !pairing.unpaired_originals.is_empty() {
        log::info!("{} originals without a rewrite are left out", pairing.unpaired_originals.len());
    }
    let ecfg = experiment_config(cfg);
    let external = cfg
        .input
        .external_predictions
        .as_ref()
        .map(|p| load_external_predictions(cfg.resolve(p)))
        .transpose()?;

    let mut reports = Vec::new();
    for name in &cfg.traits.names {
        let ds = TraitDataset::from_pairs(&pairing.pairs, name)?;
        let rep = run_experiment(&ds, &ecfg)?;
        outcome.files.push(runs_table(&rep).write(&ctx.out, cfg.format, &ctx.prov)?);
        if let Some(w) = &rep.withheld {
            outcome.warn(EXIT_INSUFFICIENT, format!("trait `{name}`: {w}"));
        }
        reports.push(rep);
        if let Some(ext) = &external {
            let rep = evaluate_external(
                &ds,
                ext,
                derive_seed(cfg.seed, &[stream::BASELINE]),
                ecfg.baseline_trials,
                ecfg.min_successful_runs,
            )?;
            let mut t = runs_table(&rep);
            t.name = format!("traits_external_{}", slug(name));
            outcome.files.push(t.write(&ctx.out, cfg.format, &ctx.prov)?);
            if let Some(w) = &rep.withheld {
                outcome.warn(EXIT_INSUFFICIENT, format!("trait `{name}` external predictions: {w}"));
            }
            let mut rep = rep;
            rep.trait_name = format!("{name} (external)");
            reports.push(rep);
        }
    }

    let mut t = Table::new(
        "traits_summary",
        &[
            "trait", "n_items", "n_classes", "runs", "successful", "f1_original", "f1_rewrite", "f1_drop",
            "drop_ci_low", "drop_ci_high", "t", "p", "p_bonferroni", "cohens_d", "sig", "baseline",
            "baseline_uniform", "delta_original", "delta_rewrite", "delta_wilcoxon_p", "zero_to_one", "one_to_zero",
            "shift_p",
        ],
    );
    t.note("F1 is macro-averaged; p from the paired t test of F1 original vs rewrite over successful runs");
    let raw: Vec<f64> = reports
        .iter()
        .filter_map(|r| r.aggregate.as_ref().and_then(|a| a.f1_test.as_ref()).map(|x| x.p_value))
        .collect();
    let mut adj = adjust_pvalues(&raw, Adjustment::Bonferroni)?.into_iter();
    for rep in &reports {
        let mut row: Vec<Cell> = vec![
            rep.trait_name.as_str().into(),
            rep.n_items.into(),
            rep.n_classes.into(),
            rep.runs.len().into(),
        ];
        match &rep.aggregate {
            None => {
                row.push(rep.runs.iter().filter(|r| r.success).count().into());
                row.resize(23, Cell::Empty);
                t.note(format!(
                    "{}: {}",
                    rep.trait_name,
                    rep.withheld.as_deref().unwrap_or("aggregate withheld")
                ));
            }
            Some(a) => {
                let p_of = |x: &Option<crate::stats::TestResult>| Cell::from(x.as_ref().map(|r| r.p_value));
                let (tstat, p, padj, d, sig) = match &a.f1_test {
                    Some(f) => {
                        let pa = adj.next().unwrap_or(f.p_value);
                        (
                            Cell::from(f.statistic),
                            Cell::from(f.p_value),
                            Cell::from(pa),
                            Cell::from(f.effect_size()),
                            Cell::from(significance_marker(pa)),
                        )
                    }
                    None => (Cell::Empty, Cell::Empty, Cell::Empty, Cell::Empty, Cell::from("")),
                };
                row.extend([
                    a.n_successful.into(),
                    a.mean_f1_original.into(),
                    a.mean_f1_rewrite.into(),
                    a.mean_f1_drop.into(),
                    a.drop_ci_low.into(),
                    a.drop_ci_high.into(),
                    tstat,
                    p,
                    padj,
                    d,
                    sig,
                    a.mean_baseline.into(),
                    a.mean_baseline_uniform.into(),
                    a.mean_delta_original.into(),
                    a.mean_delta_rewrite.into(),
                    p_of(&a.delta_test),
                    a.mean_zero_to_one.into(),
                    a.mean_one_to_zero.into(),
                    p_of(&a.shift_test),
                ]);
                for n in &a.notes {
                    t.note(format!("{}: {n}", rep.trait_name));
                }
            }
        }
        t.push(row);
    }
    outcome.files.push(t.write(&ctx.out, cfg.format, &ctx.prov)?);
    Ok(outcome)
}

fn lexicons(cfg: &PipelineConfig) -> Result<Vec<Lexicon>> {
    let mut out = Vec::new();
    for p in &cfg.input.lexicons {
        let path = cfg.resolve(p);
        let format = cfg
            .lexicon
            .format
            .or_else(|| LexiconFormat::from_path(&path))
            .ok_or_else(|| Error::invalid(format!("cannot tell the lexicon format of {}", path.display())))?;
        out.push(load_lexicon(&path, format)?);
    }
    if out.is_empty() {
        if !cfg.lexicon.use_demo {
            return Err(Error::invalid("no input.lexicons given and lexicon.use_demo is false"));
        }
        out.push(demo_lexicon());
    }
    Ok(out)
}

/// One scoring unit: an author (documents concatenated) or a document.
struct Unit {
    stream: TokenStream,
    labels: BTreeMap<String, LabelValue>,
}

fn units(cfg: &PipelineConfig, docs: &[Document]) -> Result<Vec<Unit>> {
    let streams = tokens_or_skip(cfg, docs)?;
    let mut out: Vec<Unit> = Vec::new();
    let mut index: BTreeMap<String, usize> = BTreeMap::new();
    for (d, s) in docs.iter().zip(streams) {
        let Some(s) = s else { continue };
        let key = match cfg.lexicon.aggregate {
            Aggregation::Author => d.author_id.clone().unwrap_or_else(|| d.id.clone()),
            Aggregation::Document => d.id.clone(),
        };
        match index.get(&key) {
            Some(&i) => {
                let u = &mut out[i];
                u.stream.tokens.extend(s.tokens);
                for (k, v) in &d.labels {
                    match u.labels.get(k) {
                        Some(prev) if prev != v => {
                            return Err(Error::invalid(format!("author `{key}` has conflicting `{k}` labels")))
                        }
                        _ => {
                            u.labels.insert(k.clone(), v.clone());
                        }
                    }
                }
            }
            None => {
                index.insert(key.clone(), out.len());
                out.push(Unit {
                    stream: TokenStream::new(key, s.tokens),
                    labels: d.labels.clone(),
                });
            }
        }
    }
    Ok(out)
}

fn sub_table(table: &ScoreTable, keep: &[usize]) -> ScoreTable {
    ScoreTable {
        categories: table.categories.clone(),
        rows: keep.iter().map(|&i| table.rows[i].clone()).collect(),
    }
}

/// Category-ratio association batteries against each configured trait,
/// plus the original/rewrite shift report when rewrites are configured.
pub fn cmd_lexicon(cfg: &PipelineConfig) -> Result<Outcome> {
    let ctx = context(cfg)?;
    let mut outcome = Outcome::default();
    let lexs = lexicons(cfg)?;
    let docs = load_docs(cfg, &cfg.documents_path()?)?;
    let us = units(cfg, &docs)?;
    let streams: Vec<TokenStream> = us.iter().map(|u| u.stream.clone()).collect();
    let lc = &cfg.lexicon;

    for lex in &lexs {
        let lname = slug(&lex.name);
        let scores = ScoreTable::build(&streams, lex)?;
        let mut st = Table::new(format!("lexicon_scores_{lname}"), &["unit"]);
        st.columns.extend(scores.categories.iter().cloned());
        for r in &scores.rows {
            let mut row: Vec<Cell> = vec![r.document_id.as_str().into()];
            row.extend(r.ratios.iter().map(|&v| Cell::from(v)));
            st.push(row);
        }
        outcome.files.push(st.write(&ctx.out, cfg.format, &ctx.prov)?);

        for tname in &lc.traits {
            let keep: Vec<usize> = (0..us.len()).filter(|&i| us[i].labels.contains_key(tname)).collect();
            if keep.is_empty() {
                outcome.warn(EXIT_INSUFFICIENT, format!("trait `{tname}` is absent from every unit"));
                continue;
            }
            let sub = sub_table(&scores, &keep);
            let values: Vec<&LabelValue> = keep.iter().map(|&i| &us[i].labels[tname]).collect();
            let base = format!("lexicon_{lname}_{}", slug(tname));
            if values.iter().all(|v| v.as_number().is_some()) {
                let nums: Vec<f64> = values.iter().filter_map(|v| v.as_number()).collect();
                let b = correlate_continuous_with(&sub, &nums, lc.adjustment)?;
                let mut t = Table::new(base, &["category", "r", "p", "p_adjusted", "sig"]);
                t.note(format!("Pearson r of z-scored ratios; {:?} adjustment across categories", b.adjustment));
                for (c, why) in &b.skipped {
                    t.note(format!("{c} skipped: {why}"));
                }
                for r in &b.rows {
                    t.push(vec![
                        r.category.as_str().into(),
                        r.r.into(),
                        r.p_raw.into(),
                        r.p_adjusted.into(),
                        significance_marker(r.p_adjusted).into(),
                    ]);
                }
                outcome.files.push(t.write(&ctx.out, cfg.format, &ctx.prov)?);
            } else {
                let groups: Vec<String> = values.iter().map(|v| v.as_category()).collect();
                let mut names: Vec<&String> = groups.iter().collect();
                names.sort();
                names.dedup();
                if names.len() == 2 {
                    let b = compare_categorical_with(&sub, &groups, lc.t_test, lc.adjustment)?;
                    let mut t = Table::new(
                        base,
                        &["category", "mean_a", "mean_b", "t", "df", "p", "p_adjusted", "sig"],
                    );
                    t.note(format!("group a = {}, group b = {}; {:?} t test", b.groups[0], b.groups[1], lc.t_test));
                    for (c, why) in &b.skipped {
                        t.note(format!("{c} skipped: {why}"));
                    }
                    for r in &b.rows {
                        t.push(vec![
                            r.category.as_str().into(),
                            r.mean_a.into(),
                            r.mean_b.into(),
                            r.t.into(),
                            r.df.into(),
                            r.p_raw.into(),
                            r.p_adjusted.into(),
                            significance_marker(r.p_adjusted).into(),
                        ]);
                    }
                    outcome.files.push(t.write(&ctx.out, cfg.format, &ctx.prov)?);
                } else if names.len() > 2 {
                    outcome.files.extend(kruskal_battery(cfg, &ctx, &sub, &groups, base)?);
                } else {
                    outcome.warn(EXIT_INSUFFICIENT, format!("trait `{tname}` has a single category"));
                }
            }
        }

        if cfg.input.rewrites.is_some() {
            let rewrites = load_docs(cfg, &cfg.rewrites_path()?)?;
            let pairing = pair_rewrites(&docs, &rewrites)?;
            let (o, r): (Vec<Document>, Vec<Document>) = pairing.pairs.into_iter().unzip();
            let so: Vec<TokenStream> = tokens_or_skip(cfg, &o)?.into_iter().flatten().collect();
            let sr: Vec<TokenStream> = tokens_or_skip(cfg, &r)?.into_iter().flatten().collect();
            let rep = lexical_shift_report(&ScoreTable::build(&so, lex)?, &ScoreTable::build(&sr, lex)?)?;
            let mut t = Table::new(
                format!("lexicon_shift_{lname}"),
                &[
                    "category", "mean_original", "mean_rewrite", "var_original", "var_rewrite", "mw_u", "mw_p",
                    "mw_p_adjusted", "distribution_shift", "levene_w", "levene_p", "direction", "rewrite_presence",
                    "retention_flag",
                ],
            );
            t.note("ratios min-max scaled over pooled values; Mann-Whitney p Benjamini-Hochberg adjusted");
            for r in &rep.rows {
                t.push(vec![
                    r.category.as_str().into(),
                    r.mean_original.into(),
                    r.mean_rewrite.into(),
                    r.var_original.into(),
                    r.var_rewrite.into(),
                    r.mw_u.into(),
                    r.mw_p.into(),
                    r.mw_p_adjusted.into(),
                    r.distribution_shift.into(),
                    r.levene_w.into(),
                    r.levene_p.into(),
                    r.direction.unwrap_or("").into(),
                    r.rewrite_presence.into(),
                    r.retention_flag.into(),
                ]);
            }
            outcome.files.push(t.write(&ctx.out, cfg.format, &ctx.prov)?);
        }
    }
    Ok(outcome)
}

fn kruskal_battery(
    cfg: &PipelineConfig,
    ctx: &super::Ctx,
    scores: &ScoreTable,
    groups: &[String],
    name: String,
) -> Result<Vec<std::path::PathBuf>> {
    let mut names: Vec<&String> = groups.iter().collect();
    names.sort();
    names.dedup();
    let mut tested = Vec::new();
    let mut t = Table::new(
        name.clone(),
        &["category", "h", "df", "p", "p_adjusted", "sig", "epsilon_squared", "eta_squared_h"],
    );
    t.note(format!("Kruskal-Wallis across {} groups", names.len()));
    for (c, cat) in scores.categories.iter().enumerate() {
        let col = scores.column(c);
        let parts: Vec<Vec<f64>> = names
            .iter()
            .map(|g| col.iter().zip(groups).filter(|(_, x)| x == g).map(|(v, _)| *v).collect())
            .collect();
        let refs: Vec<&[f64]> = parts.iter().map(Vec::as_slice).collect();
        match kruskal_wallis(&refs) {
            Ok(r) => tested.push((cat.clone(), r, parts)),
            Err(e @ (Error::ZeroVariance(_) | Error::InsufficientData(_))) => t.note(format!("{cat} skipped: {e}")),
            Err(e) => return Err(e),
        }
    }
    let raw: Vec<f64> = tested.iter().map(|(_, r, _)| r.p_value).collect();
    let adj = adjust_pvalues(&raw, cfg.lexicon.adjustment)?;

    let mut dunn = Table::new(
        format!("{name}_dunn"),
        &["category", "group_a", "group_b", "z", "p_raw", "p_bh", "sig"],
    );
    dunn.note("Dunn post-hoc for categories with adjusted Kruskal-Wallis p < .05; Benjamini-Hochberg within category");
    for ((cat, r, parts), pa) in tested.iter().zip(adj) {
        t.push(vec![
            cat.as_str().into(),
            r.statistic.into(),
            r.df.into(),
            r.p_value.into(),
            pa.into(),
            significance_marker(pa).into(),
            r.effect(EffectKind::EpsilonSquared).into(),
            r.effect(EffectKind::EtaSquaredH).into(),
        ]);
        if pa < 0.05 {
            let refs: Vec<&[f64]> = parts.iter().map(Vec::as_slice).collect();
            for pr in dunn_posthoc(&refs, Adjustment::BenjaminiHochberg)? {
                dunn.push(vec![
                    cat.as_str().into(),
                    names[pr.group_a].as_str().into(),
                    names[pr.group_b].as_str().into(),
                    pr.result.statistic.into(),
                    pr.p_raw.into(),
                    pr.result.p_value.into(),
                    significance_marker(pr.result.p_value).into(),
                ]);
            }
        }
    }
    Ok(vec![t.write(&ctx.out, cfg.format, &ctx.prov)?, dunn.write(&ctx.out, cfg.format, &ctx.prov)?])
}

/// Write a synthetic corpus as JSONL into the output directory.
pub fn cmd_synth(cfg: &PipelineConfig) -> Result<Outcome> {
    let ctx = super::output_context(cfg)?;
    let mut outcome = Outcome::default();
    let s = &cfg.synth;
    let docs_path = ctx.out.join("documents.jsonl");
    let rw_path = ctx.out.join("rewrites.jsonl");
    match s.kind {
        SynthKind::Shock => {
            let mut spec = s.shock.clone();
            spec.seed = cfg.seed;
            write_documents(&docs_path, &generate_shock_corpus(&spec)?)?;
        }
        SynthKind::Compare => {
            let mut spec = s.shock.clone();
            spec.seed = cfg.seed;
            let (o, r) = generate_compare_corpus(&spec, s.compare_docs, s.compare_shrink)?;
            write_documents(&docs_path, &o)?;
            write_documents(&rw_path, &r)?;
            outcome.files.push(rw_path.clone());
        }
        SynthKind::Trait => {
            let mut spec = s.trait_spec.clone();
            spec.seed = cfg.seed;
            let c = generate_trait_corpus(&spec)?;
            write_documents(&docs_path, &c.originals)?;
            write_documents(&rw_path, &c.rewrites)?;
            outcome.files.push(rw_path.clone());
        }
    }
    outcome.files.insert(0, docs_path);
    #[derive(serde::Serialize)]
    struct Manifest<'a> {
        kind: SynthKind,
        seed: u64,
        synth: &'a super::SynthConfig,
    }
    outcome.files.push(write_json(
        &ctx.out,
        "synth_manifest",
        &ctx.prov,
        &Manifest {
            kind: s.kind,
            seed: cfg.seed,
            synth: s,
        },
    )?);
    Ok(outcome)
}
