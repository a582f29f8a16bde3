//! Synthetic corpora with known ground truth.
//!
//! Token sequences are drawn from a Zipf distribution over an alphabetic
//! vocabulary (the tokenizer drops digits). A document's latent style
//! value shifts the Zipf exponent, which moves Simpson, Shannon, TTR and
//! hapax ratio together, so the between-document variance of the latent
//! value controls the variance of the composite score.

use chrono::NaiveDate;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution as _, Normal, StandardNormal, Zipf};
use serde::{Deserialize, Serialize};

use crate::corpus::{Document, LabelValue, Month, PromptTag};
use crate::error::{Error, Result};
use crate::seed::{rng_for, stream};

const MIN_EXPONENT: f64 = 0.6;
const MAX_EXPONENT: f64 = 3.0;

/// Alphabetic word for a vocabulary index: 0 → "ba", 1 → "bb", ...
pub fn vocab_word(index: usize, prefix: char) -> String {
    let mut s = String::new();
    let mut n = index;
    loop {
        s.insert(0, (b'a' + (n % 26) as u8) as char);
        n /= 26;
        if n == 0 {
            break;
        }
    }
    format!("{prefix}{s}")
}

fn vocabulary(size: usize) -> Vec<String> {
    (0..size).map(|i| vocab_word(i, 'w')).collect()
}

fn zipf_tokens(rng: &mut ChaCha8Rng, words: &[String], exponent: f64, len: usize, out: &mut Vec<String>) {
    let z = Zipf::new(words.len() as f64, exponent.clamp(MIN_EXPONENT, MAX_EXPONENT)).expect("valid zipf");
    for _ in 0..len {
        let rank = z.sample(rng) as usize;
        out.push(words[rank - 1].clone());
    }
}

/// Detector-score generation: the AI share rises linearly from `pre_rate`
/// at onset to `post_rate` over `ramp_months`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetectorSpec {
    pub pre_rate: f64,
    pub post_rate: f64,
    pub ramp_months: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SynthSpec {
    pub start: Month,
    pub months: usize,
    pub onset: Month,
    pub docs_per_month: usize,
    pub doc_len: usize,
    pub vocab_size: usize,
    pub base_exponent: f64,
    /// Variance of the latent style value before and after onset.
    pub pre_variance: f64,
    pub post_variance: f64,
    /// AR(1) coefficient of the monthly log-variance disturbance.
    pub ar_rho: f64,
    pub ar_sd: f64,
    pub detector: Option<DetectorSpec>,
    pub seed: u64,
}

impl Default for SynthSpec {
    fn default() -> Self {
        SynthSpec {
            start: Month::new(2019, 1),
            months: 70,
            onset: Month::new(2022, 11),
            docs_per_month: 50,
            doc_len: 150,
            vocab_size: 5000,
            base_exponent: 1.1,
            pre_variance: 0.02,
            post_variance: 0.005,
            ar_rho: 0.3,
            ar_sd: 0.15,
            detector: None,
            seed: 0,
        }
    }
}

impl SynthSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.pre_variance >= 0.0 && self.post_variance >= 0.0) {
            return Err(Error::invalid("latent variances must be nonnegative"));
        }
        if !(self.ar_rho.abs() < 1.0) {
            return Err(Error::invalid("AR(1) coefficient must lie in (-1, 1)"));
        }
        if self.docs_per_month == 0 || self.doc_len == 0 || self.vocab_size < 2 {
            return Err(Error::invalid("docs_per_month, doc_len and vocab_size must be positive"));
        }
        let end = self.start.offset(self.months as i64 - 1);
        if self.months == 0 || self.onset <= self.start || self.onset > end {
            return Err(Error::invalid("span must contain months both before and from the onset"));
        }
        Ok(())
    }

    /// Latent-value variance for each month, including the AR(1)
    /// multiplicative disturbance.
    pub fn monthly_variances(&self, rng: &mut ChaCha8Rng) -> Vec<f64> {
        let innov = (1.0 - self.ar_rho * self.ar_rho).sqrt() * self.ar_sd;
        let mut eta = self.ar_sd * rng.sample::<f64, _>(StandardNormal);
        (0..self.months)
            .map(|m| {
                if m > 0 {
                    eta = self.ar_rho * eta + innov * rng.sample::<f64, _>(StandardNormal);
                }
                let month = self.start.offset(m as i64);
                let base = if month < self.onset { self.pre_variance } else { self.post_variance };
                base * eta.exp()
            })
            .collect()
    }
}

/// Monthly documents whose latent style variance drops at the onset.
pub fn generate_shock_corpus(spec: &SynthSpec) -> Result<Vec<Document>> {
    spec.validate()?;
    let mut rng = rng_for(spec.seed, &[stream::SYNTH_SHOCK]);
    let words = vocabulary(spec.vocab_size);
    let vars = spec.monthly_variances(&mut rng);
    let mut docs = Vec::with_capacity(spec.months * spec.docs_per_month);
    let mut tokens = Vec::with_capacity(spec.doc_len);
    for (m, var) in vars.iter().enumerate() {
        let month = spec.start.offset(m as i64);
        let since = month.index() - spec.onset.index();
        let rate = spec.detector.as_ref().map(|d| {
            if since < 0 {
                d.pre_rate
            } else {
                let f = ((since + 1) as f64 / d.ramp_months.max(1) as f64).min(1.0);
                d.pre_rate + f * (d.post_rate - d.pre_rate)
            }
        });
        let latent = Normal::new(0.0, var.sqrt()).expect("finite sd");
        for j in 0..spec.docs_per_month {
            let s = latent.sample(&mut rng);
            tokens.clear();
            zipf_tokens(&mut rng, &words, spec.base_exponent + s, spec.doc_len, &mut tokens);
            let day = month.first_day() + chrono::Days::new((j % 28) as u64);
            let mut d = Document::new(format!("s{m:03}-{j:04}"), tokens.join(" "), day);
            d.author_id = Some(format!("a{}", j % 97));
            d.labels.insert("latent".into(), LabelValue::Number(s));
            if let Some(rate) = rate {
                let ai = rng.random::<f64>() < rate;
                let u: f64 = rng.random();
                d.detector_score = Some(if ai { 0.5 + 0.5 * u } else { 0.5 * u });
            }
            docs.push(d);
        }
    }
    Ok(docs)
}

/// Originals drawn with the pre-onset latent variance, and rewrites that
/// keep each document's latent value scaled by `shrink`, so rewrite
/// variance is `shrink²` times the original.
pub fn generate_compare_corpus(spec: &SynthSpec, n_docs: usize, shrink: f64) -> Result<(Vec<Document>, Vec<Document>)> {
    spec.validate()?;
    if !(0.0..=1.0).contains(&shrink) {
        return Err(Error::invalid("shrink must lie in [0, 1]"));
    }
    let mut rng = rng_for(spec.seed, &[stream::SYNTH_SHOCK, 1]);
    let words = vocabulary(spec.vocab_size);
    let latent = Normal::new(0.0, spec.pre_variance.sqrt()).expect("finite sd");
    let date = spec.start.first_day();
    let mut originals = Vec::with_capacity(n_docs);
    let mut rewrites = Vec::with_capacity(n_docs);
    let mut tokens = Vec::new();
    for i in 0..n_docs {
        let s = latent.sample(&mut rng);
        tokens.clear();
        zipf_tokens(&mut rng, &words, spec.base_exponent + s, spec.doc_len, &mut tokens);
        let o = Document::new(format!("c{i:05}"), tokens.join(" "), date);
        tokens.clear();
        zipf_tokens(&mut rng, &words, spec.base_exponent + shrink * s, spec.doc_len, &mut tokens);
        let mut r = Document::new(format!("c{i:05}-rw"), tokens.join(" "), date);
        r.rewrite_of = Some(o.id.clone());
        r.llm_tag = Some("synthetic".into());
        r.prompt_tag = Some(PromptTag::Rephrase);
        originals.push(o);
        rewrites.push(r);
    }
    Ok((originals, rewrites))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TraitSpec {
    pub n_authors: usize,
    pub doc_len: usize,
    pub vocab_size: usize,
    pub exponent: f64,
    /// Positions per document that may carry a class marker.
    pub marker_slots: usize,
    /// Probability that a slot emits a marker of the author's class.
    pub marker_p: f64,
    pub markers_per_class: usize,
    /// Probability that a rewrite replaces a marker with a neutral word.
    pub strip_rate: f64,
    /// Embedding dimension attached to originals and rewrites, 0 for none.
    pub embedding_dim: usize,
    pub trait_name: String,
    pub seed: u64,
}

impl Default for TraitSpec {
    fn default() -> Self {
        TraitSpec {
            n_authors: 400,
            doc_len: 120,
            vocab_size: 3000,
            exponent: 1.1,
            marker_slots: 4,
            marker_p: 0.9,
            markers_per_class: 12,
            strip_rate: 1.0,
            embedding_dim: 0,
            trait_name: "trait".into(),
            seed: 0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct TraitCorpus {
    pub originals: Vec<Document>,
    pub rewrites: Vec<Document>,
    /// Ground-truth class per author (0 low, 1 high).
    pub labels: Vec<usize>,
}

/// One document per author. Authors alternate between the low and high
/// class; each class has its own marker words, emitted at rate
/// `marker_p` in `marker_slots` random positions. Rewrites copy the
/// text and replace each marker with a neutral word at `strip_rate`.
pub fn generate_trait_corpus(spec: &TraitSpec) -> Result<TraitCorpus> {
    if !(0.0..=1.0).contains(&spec.marker_p) || !(0.0..=1.0).contains(&spec.strip_rate) {
        return Err(Error::invalid("marker_p and strip_rate must lie in [0, 1]"));
    }
    if spec.marker_p == 0.0 && spec.strip_rate > 0.0 {
        return Err(Error::invalid("strip testing needs marker_p > 0"));
    }
    if spec.n_authors < 4 || spec.doc_len == 0 || spec.markers_per_class == 0 || spec.vocab_size < 2 {
        return Err(Error::invalid("need at least 4 authors, positive doc_len and markers, and a vocabulary of 2 or more"));
    }
    let mut rng = rng_for(spec.seed, &[stream::SYNTH_TRAIT]);
    let words = vocabulary(spec.vocab_size);
    let date = NaiveDate::from_ymd_opt(2024, 1, 1).expect("valid date");
    let marker = |class: usize, k: usize| vocab_word(k, if class == 1 { 'h' } else { 'l' });
    let mut out = TraitCorpus {
        originals: Vec::with_capacity(spec.n_authors),
        rewrites: Vec::with_capacity(spec.n_authors),
        labels: Vec::with_capacity(spec.n_authors),
    };
    for a in 0..spec.n_authors {
        let class = a % 2;
        let mut base = Vec::with_capacity(spec.doc_len + spec.marker_slots);
        zipf_tokens(&mut rng, &words, spec.exponent, spec.doc_len, &mut base);
        let mut orig = base.clone();
        let mut rw = base;
        for _ in 0..spec.marker_slots {
            let pos = rng.random_range(0..=orig.len());
            let (o_tok, r_tok) = if rng.random::<f64>() < spec.marker_p {
                let m = marker(class, rng.random_range(0..spec.markers_per_class));
                let mut neutral = Vec::with_capacity(1);
                zipf_tokens(&mut rng, &words, spec.exponent, 1, &mut neutral);
                let keep = rng.random::<f64>() >= spec.strip_rate;
                (m.clone(), if keep { m } else { neutral.pop().unwrap() })
            } else {
                let mut w = Vec::with_capacity(1);
                zipf_tokens(&mut rng, &words, spec.exponent, 1, &mut w);
                let w = w.pop().unwrap();
                (w.clone(), w)
            };
            orig.insert(pos, o_tok);
            rw.insert(pos, r_tok);
        }
        // trait values separate cleanly at the median
        let value = class as f64 * 2.0 + rng.random::<f64>();
        let mut o = Document::new(format!("t{a:05}"), orig.join(" "), date);
        o.author_id = Some(format!("author{a:05}"));
        o.labels.insert(spec.trait_name.clone(), LabelValue::Number(value));
        o.labels.insert(
            format!("{}_group", spec.trait_name),
            LabelValue::Category(if class == 1 { "high".into() } else { "low".into() }),
        );
        let mut r = Document::new(format!("t{a:05}-rw"), rw.join(" "), date);
        r.author_id = o.author_id.clone();
        r.rewrite_of = Some(o.id.clone());
        r.llm_tag = Some("synthetic".into());
        r.prompt_tag = Some(PromptTag::Rephrase);
        if spec.embedding_dim > 0 {
            let e: Vec<f64> = (0..spec.embedding_dim).map(|_| rng.sample(StandardNormal)).collect();
            let er: Vec<f64> = e.iter().map(|v| v + 0.2 * rng.sample::<f64, _>(StandardNormal)).collect();
            o.embedding = Some(e);
            r.embedding = Some(er);
        }
        out.originals.push(o);
        out.rewrites.push(r);
        out.labels.push(class);
    }
    Ok(out)
}

/// x is white noise; y_t = coef·x_{t−lag} + N(0, noise_sd²).
pub fn generate_lagged_pair(n: usize, lag: usize, coef: f64, noise_sd: f64, seed: u64) -> (Vec<f64>, Vec<f64>) {
    let mut rng = rng_for(seed, &[stream::SYNTH_LAGGED]);
    let x: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
    let y = (0..n)
        .map(|t| {
            let e: f64 = rng.sample(StandardNormal);
            let driven = if t >= lag { coef * x[t - lag] } else { 0.0 };
            driven + noise_sd * e
        })
        .collect();
    (x, y)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::tokenize;

    #[test]
    fn default_specs_validate() {
        SynthSpec::default().validate().unwrap();
        let s = SynthSpec::default();
        assert_eq!(s.start.offset(s.months as i64 - 1), Month::new(2024, 10));
    }

    #[test]
    fn words_are_alphabetic_and_distinct() {
        let w: Vec<String> = (0..1000).map(|i| vocab_word(i, 'w')).collect();
        assert!(w.iter().all(|s| s.chars().all(|c| c.is_ascii_lowercase())));
        let mut sorted = w.clone();
        sorted.sort();
        sorted.dedup();
        assert_eq!(sorted.len(), 1000);
    }

    #[test]
    fn shock_corpus_is_seed_deterministic() {
        let spec = SynthSpec {
            months: 12,
            start: Month::new(2022, 1),
            onset: Month::new(2022, 7),
            docs_per_month: 3,
            seed: 4,
            ..Default::default()
        };
        let a = generate_shock_corpus(&spec).unwrap();
        assert_eq!(a, generate_shock_corpus(&spec).unwrap());
        assert_eq!(a.len(), 36);
        assert_eq!(tokenize(&a[0]).unwrap().len(), spec.doc_len);
        let bad = SynthSpec {
            onset: Month::new(2030, 1),
            ..spec
        };
        assert!(generate_shock_corpus(&bad).is_err());
    }

    #[test]
    fn trait_corpus_strip_zero_keeps_text() {
        let spec = TraitSpec {
            n_authors: 10,
            strip_rate: 0.0,
            ..Default::default()
        };
        let c = generate_trait_corpus(&spec).unwrap();
        assert!(c.originals.iter().zip(&c.rewrites).all(|(o, r)| o.text == r.text));
        assert_eq!(c.labels.iter().sum::<usize>(), 5);
        let bad = TraitSpec {
            marker_p: 0.0,
            strip_rate: 1.0,
            ..spec
        };
        assert!(generate_trait_corpus(&bad).is_err());
    }

    #[test]
    fn full_strip_removes_markers() {
        let c = generate_trait_corpus(&TraitSpec {
            n_authors: 20,
            ..Default::default()
        })
        .unwrap();
        for r in &c.rewrites {
            assert!(r.text.split(' ').all(|t| t.starts_with('w')));
        }
    }

    #[test]
    fn lagged_pair_alignment() {
        let (x, y) = generate_lagged_pair(50, 3, 1.0, 0.0, 1);
        for t in 3..50 {
            assert_eq!(y[t], x[t - 3]);
        }
    }
}
