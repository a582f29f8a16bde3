use std::collections::BTreeMap;
use std::path::Path;

use serde::Serialize;

use super::{context, feature_vectors, load_docs, load_parses, Outcome};
use crate::complexity::{composite_score, fit_standardization, ComplexityVector, Feature};
use crate::corpus::{pair_rewrites, Document, Month};
use crate::error::{Error, Result};
use crate::report::{write_json, Cell, Table};
use crate::similarity::{rating_summary, similarity_report};
use crate::stats::{levene, significance_marker};
use crate::timeseries::{
    cronbach_alpha, fit_dgm, granger_pipeline, monthly_ai_rate, monthly_variance, DgmOptions, RhoSearch,
};
use crate::PipelineConfig;

const MIN_DGM_MONTHS: usize = 8;

/// Per-document feature table with composite scores.
pub fn cmd_features(cfg: &PipelineConfig) -> Result<Outcome> {
    let ctx = context(cfg)?;
    let mut outcome = Outcome::default();
    let docs = load_docs(cfg, &cfg.documents_path()?)?;
    let parses = load_parses(cfg)?;
    let vectors = feature_vectors(cfg, &docs, &parses, &mut outcome)?;
    let present: Vec<ComplexityVector> = vectors.iter().flatten().cloned().collect();
    let stats = fit_standardization(&present)?;
    let mut t = Table::new(
        "features",
        &["id", "simpson", "shannon", "dep_length", "ttr", "hapax_ratio", "hapax_count", "composite"],
    );
    t.note(format!("simpson estimator {:?}; shannon entropy in bits", cfg.features.simpson));
    for v in &present {
        t.push(vec![
            v.source_id.as_str().into(),
            v.simpson.into(),
            v.shannon.into(),
            v.dep_length.into(),
            v.ttr.into(),
            v.hapax_ratio.into(),
            v.hapax_count.into(),
            composite_score(v, &stats).ok().into(),
        ]);
    }
    let skipped = docs.len() - present.len();
    if skipped > 0 {
        t.note(format!("skipped {skipped} degenerate documents"));
    }
    outcome.files.push(t.write(&ctx.out, cfg.format, &ctx.prov)?);
    outcome.files.push(write_json(&ctx.out, "standardization", &ctx.prov, &stats)?);
    Ok(outcome)
}

#[derive(Serialize)]
struct TrendSummary {
    onset: Month,
    months_observed: usize,
    excluded_features: Vec<&'static str>,
    dgm: crate::timeseries::DgmResult,
    reliability: Option<crate::timeseries::ReliabilityResult>,
    reliability_note: Option<String>,
    granger: Option<crate::timeseries::GrangerPipeline>,
}

/// Monthly variance series, growth model, reliability and optional
/// Granger tests against the AI-attribution rate.
pub fn cmd_trend(cfg: &PipelineConfig) -> Result<Outcome> {
    let ctx = context(cfg)?;
    let mut outcome = Outcome::default();
    let docs = load_docs(cfg, &cfg.documents_path()?)?;
    let tc = &cfg.trend;
    if tc.granger && docs.iter().all(|d| d.detector_score.is_none()) {
        return Err(Error::insufficient(
            "Granger tests requested but no document has a detector_score; add scores or set trend.granger = false",
        ));
    }
    let parses = load_parses(cfg)?;
    let vectors = feature_vectors(cfg, &docs, &parses, &mut outcome)?;
    let dated: Vec<(chrono::NaiveDate, ComplexityVector)> = docs
        .iter()
        .zip(vectors)
        .filter_map(|(d, v)| v.map(|v| (d.date, v)))
        .collect();
    let pooled: Vec<ComplexityVector> = dated.iter().map(|(_, v)| v.clone()).collect();
    let stats = fit_standardization(&pooled)?;
    let series = monthly_variance(&dated, &stats, tc.min_docs)?;
    let observed = series.observed_months();
    if observed < MIN_DGM_MONTHS {
        return Err(Error::insufficient(format!(
            "insufficient series: {observed} months with at least {} documents, need {MIN_DGM_MONTHS}",
            tc.min_docs
        )));
    }

    let mut vt = Table::new(
        "variance_series",
        &["month", "n", "simpson", "shannon", "dep_length", "ttr", "hapax_ratio", "composite"],
    );
    for r in &series.rows {
        let mut row: Vec<Cell> = vec![r.month.to_string().into(), r.doc_count.into()];
        row.extend(Feature::ALL.iter().map(|&f| Cell::from(r.feature(f))));
        row.push(r.composite.into());
        vt.push(row);
    }
    outcome.files.push(vt.write(&ctx.out, cfg.format, &ctx.prov)?);

    let rho = match tc.fixed_rho {
        Some(r) => RhoSearch::Fixed(r),
        None => RhoSearch::default(),
    };
    let dgm = fit_dgm(&series, tc.onset, &DgmOptions { rho })?;
    let mut dt = Table::new("dgm", &["term", "estimate", "se", "t", "p", "ci_low", "ci_high", "sig"]);
    dt.note(format!("GLS with AR(1) errors, rho = {}, n = {}, df = {}", dgm.ar1_rho, dgm.n_obs, dgm.df));
    for term in &dgm.terms {
        dt.push(vec![
            term.term.into(),
            term.estimate.into(),
            term.std_error.into(),
            term.t.into(),
            term.p_value.into(),
            term.ci_low.into(),
            term.ci_high.into(),
            significance_marker(term.p_value).into(),
        ]);
    }
    outcome.files.push(dt.write(&ctx.out, cfg.format, &ctx.prov)?);

    let items = series.item_matrix();
    let (reliability, reliability_note) = match cronbach_alpha(&items) {
        Ok(r) => (Some(r), None),
        Err(e) => (None, Some(e.to_string())),
    };

    let mut long = Table::new("trend_long", &["month", "series", "value"]);
    for r in &series.rows {
        if let Some(c) = r.composite {
            long.push(vec![r.month.to_string().into(), "composite_variance".into(), c.into()]);
        }
        for &f in &series.included {
            if let Some(v) = r.feature(f) {
                long.push(vec![r.month.to_string().into(), format!("{}_variance", f.name()).into(), v.into()]);
            }
        }
    }

    let mut granger = None;
    if tc.granger {
        let rates = monthly_ai_rate(&docs, tc.detector_threshold)?;
        let rate_by: BTreeMap<Month, f64> = rates.iter().filter_map(|r| r.rate.map(|v| (r.month, v))).collect();
        for (m, v) in &rate_by {
            long.push(vec![m.to_string().into(), "ai_rate".into(), (*v).into()]);
        }
        let aligned: Vec<(f64, f64)> = series
            .composite_observations()
            .into_iter()
            .filter_map(|(m, c)| rate_by.get(&m).map(|&r| (r, c)))
            .collect();
        let x: Vec<f64> = aligned.iter().map(|p| p.0).collect();
        let y: Vec<f64> = aligned.iter().map(|p| p.1).collect();
        let gp = granger_pipeline(&x, &y, tc.max_lag, tc.adf_alpha)?;
        let mut gt = Table::new("granger", &["lag", "F", "df1", "df2", "p", "sig"]);
        gt.note("AI rate -> composite variance; no correction across lags");
        gt.note(format!(
            "differencing orders: ai_rate {}, variance {}",
            gp.result.x_diff_order, gp.result.y_diff_order
        ));
        if !gp.result.skipped.is_empty() {
            gt.note(format!("lags skipped for lack of residual df: {:?}", gp.result.skipped));
        }
        for l in &gp.result.lags {
            gt.push(vec![
                l.lag.into(),
                l.f.into(),
                l.df1.into(),
                l.df2.into(),
                l.p_value.into(),
                significance_marker(l.p_value).into(),
            ]);
        }
        outcome.files.push(gt.write(&ctx.out, cfg.format, &ctx.prov)?);
        granger = Some(gp);
    }
    outcome.files.push(long.write(&ctx.out, cfg.format, &ctx.prov)?);

    let summary = TrendSummary {
        onset: tc.onset,
        months_observed: observed,
        excluded_features: stats.constant_features().iter().map(|f| f.name()).collect(),
        dgm,
        reliability,
        reliability_note,
        granger,
    };
    outcome.files.push(write_json(&ctx.out, "trend_summary", &ctx.prov, &summary)?);
    Ok(outcome)
}

fn load_pairs(cfg: &PipelineConfig) -> Result<(Vec<Document>, Vec<(Document, Document)>)> {
    let originals = load_docs(cfg, &cfg.documents_path()?)?;
    let rewrites = load_docs(cfg, &cfg.rewrites_path()?)?;
    let pairing = pair_rewrites(&originals, &rewrites)?;
    if pairing.pairs.is_empty() {
        return Err(Error::insufficient("no rewrite matched an original"));
    }
    if !pairing.unpaired_originals.is_empty() {
        log::info!("{} originals have no rewrite", pairing.unpaired_originals.len());
    }
    Ok((originals, pairing.pairs))
}

/// Variance of complexity between originals and rewrites per llm/prompt
/// cell, with Levene tests; similarity summaries when embeddings exist.
pub fn cmd_compare(cfg: &PipelineConfig) -> Result<Outcome> {
    let ctx = context(cfg)?;
    let mut outcome = Outcome::default();
    let (_, pairs) = load_pairs(cfg)?;
    let parses = load_parses(cfg)?;
    let orig_docs: Vec<Document> = pairs.iter().map(|p| p.0.clone()).collect();
    let rw_docs: Vec<Document> = pairs.iter().map(|p| p.1.clone()).collect();
    let vo = feature_vectors(cfg, &orig_docs, &parses, &mut outcome)?;
    let vr = feature_vectors(cfg, &rw_docs, &parses, &mut outcome)?;
    let mut seen = std::collections::HashSet::new();
    let unique_orig: Vec<ComplexityVector> = pairs
        .iter()
        .zip(&vo)
        .filter(|((o, _), _)| seen.insert(o.id.clone()))
        .filter_map(|(_, v)| v.clone())
        .collect();
    let stats = fit_standardization(&unique_orig)?;

    type Cellkey = (String, String);
    let mut cells: BTreeMap<Cellkey, Vec<(&ComplexityVector, &ComplexityVector)>> = BTreeMap::new();
    for ((_, rw), (a, b)) in pairs.iter().zip(vo.iter().zip(&vr)) {
        if let (Some(a), Some(b)) = (a, b) {
            let key = (
                rw.llm_tag.clone().unwrap_or_else(|| "-".into()),
                rw.prompt_tag.map_or("-".into(), |p| p.to_string()),
            );
            cells.entry(key).or_default().push((a, b));
        }
    }
    let mut t = Table::new(
        "compare",
        &["llm", "prompt", "measure", "n", "var_original", "var_rewrite", "levene_f", "df1", "df2", "p", "sig"],
    );
    t.note(format!("Levene center {:?}; composite uses z-scores fit on the originals", cfg.compare.levene_center));
    let measures: Vec<(&str, Option<Feature>)> = std::iter::once(("composite", None))
        .chain(Feature::ALL.iter().map(|&f| (f.name(), Some(f))))
        .collect();
    for ((llm, prompt), items) in &cells {
        for (name, feature) in &measures {
            let value = |v: &ComplexityVector| match feature {
                None => composite_score(v, &stats).ok(),
                Some(f) => v.get(*f),
            };
            let a: Vec<f64> = items.iter().filter_map(|(o, _)| value(o)).collect();
            let b: Vec<f64> = items.iter().filter_map(|(_, r)| value(r)).collect();
            if a.len() < 2 || b.len() < 2 {
                continue;
            }
            let var = |x: &[f64]| crate::stats::descriptive::variance(x);
            let mut row: Vec<Cell> = vec![
                llm.as_str().into(),
                prompt.as_str().into(),
                (*name).into(),
                a.len().into(),
                var(&a).into(),
                var(&b).into(),
            ];
            match levene(&[&a, &b], cfg.compare.levene_center) {
                Ok(r) => row.extend([
                    r.statistic.into(),
                    r.df.into(),
                    r.df2.into(),
                    r.p_value.into(),
                    significance_marker(r.p_value).into(),
                ]),
                Err(Error::ZeroVariance(_)) => row.extend([Cell::Empty, Cell::Empty, Cell::Empty, Cell::Empty, "".into()]),
                Err(e) => return Err(e),
            }
            t.push(row);
        }
    }
    outcome.files.push(t.write(&ctx.out, cfg.format, &ctx.prov)?);
    if pairs.iter().any(|(o, r)| o.embedding.is_some() && r.embedding.is_some()) {
        write_similarity(cfg, &ctx, &pairs, &mut outcome)?;
    }
    Ok(outcome)
}

fn write_similarity(cfg: &PipelineConfig, ctx: &super::Ctx, pairs: &[(Document, Document)], outcome: &mut Outcome) -> Result<()> {
    let rep = similarity_report(pairs, cfg.compare.similarity_threshold)?;
    let mut t = Table::new("similarity", &["original_id", "rewrite_id", "llm", "prompt", "cosine"]);
    if rep.skipped_missing_embedding > 0 {
        t.note(format!("{} pairs skipped for missing embeddings", rep.skipped_missing_embedding));
    }
    for s in &rep.scores {
        t.push(vec![
            s.original_id.as_str().into(),
            s.rewrite_id.as_str().into(),
            s.llm.clone().into(),
            s.prompt.clone().into(),
            s.cosine.into(),
        ]);
    }
    outcome.files.push(t.write(&ctx.out, cfg.format, &ctx.prov)?);
    #[derive(Serialize)]
    struct Summary<'a> {
        skipped_missing_embedding: usize,
        overall: &'a Option<crate::similarity::ScoreSummary>,
        by_group: &'a BTreeMap<String, crate::similarity::ScoreSummary>,
    }
    outcome.files.push(write_json(
        &ctx.out,
        "similarity_summary",
        &ctx.prov,
        &Summary {
            skipped_missing_embedding: rep.skipped_missing_embedding,
            overall: &rep.overall,
            by_group: &rep.by_group,
        },
    )?);
    Ok(())
}

/// Read an items × raters CSV: a header row, an item id column, then one
/// integer rating column per rater.
pub fn read_ratings(path: &Path) -> Result<Vec<Vec<u32>>> {
    let mut rdr = csv::Reader::from_path(path).map_err(|e| Error::malformed(path, 0, e.to_string()))?;
    let mut out = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| Error::malformed(path, i + 2, e.to_string()))?;
        let row = rec
            .iter()
            .skip(1)
            .map(|v| v.trim().parse::<u32>().map_err(|_| Error::malformed(path, i + 2, format!("rating `{v}` is not an integer"))))
            .collect::<Result<Vec<u32>>>()?;
        out.push(row);
    }
    Ok(out)
}

/// Embedding cosine report, plus the rating summary when ratings are
/// configured.
pub fn cmd_similarity(cfg: &PipelineConfig) -> Result<Outcome> {
    let ctx = context(cfg)?;
    let mut outcome = Outcome::default();
    let (_, pairs) = load_pairs(cfg)?;
    let rep = similarity_report(&pairs, cfg.compare.similarity_threshold)?;
    if rep.scores.is_empty() {
        return Err(Error::insufficient("no pair carries embeddings on both documents"));
    }
    write_similarity(cfg, &ctx, &pairs, &mut outcome)?;
    if let Some(p) = &cfg.input.ratings {
        let ratings = read_ratings(&cfg.resolve(p))?;
        let summary = rating_summary(&ratings)?;
        outcome.files.push(write_json(&ctx.out, "rating_summary", &ctx.prov, &summary)?);
    }
    if rep.skipped_missing_embedding > 0 {
        outcome.warn(0, format!("{} pairs lacked embeddings", rep.skipped_missing_embedding));
    }
    Ok(outcome)
}
