//! Statistics kernel: distributions and the hypothesis-test battery.
//!
//! Every test returns a [`TestResult`], a uniform envelope that serializes
//! to the report schema (statistic, p, df, effect sizes, method, n).

pub mod agreement;
pub mod descriptive;
pub mod dist;
pub mod multiple;
pub mod nonparametric;
pub mod parametric;
pub mod special;

use serde::Serialize;

pub use agreement::{gwet_ac1, AgreementResult};
pub use dist::{dist_cdf, Distribution};
pub use multiple::{adjust_pvalues, Adjustment};
pub use nonparametric::{dunn_posthoc, kruskal_wallis, mann_whitney_u, wilcoxon_signed_rank, PairwiseResult};
pub use parametric::{levene, pearson_r, t_test, Center, TTestMode};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    LeveneMean,
    BrownForsythe,
    PairedT,
    WelchT,
    StudentT,
    WilcoxonSignedRank,
    WilcoxonSignedRankExact,
    MannWhitneyU,
    KruskalWallis,
    Dunn,
    Pearson,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EffectKind {
    CohensD,
    RankBiserial,
    EpsilonSquared,
    EtaSquaredH,
    PearsonR,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Effect {
    pub kind: EffectKind,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TestResult {
    pub method: Method,
    pub statistic: f64,
    pub p_value: f64,
    /// Degrees of freedom, or numerator df for F-type statistics.
    pub df: Option<f64>,
    /// Denominator df for F-type statistics.
    pub df2: Option<f64>,
    /// Primary effect size first.
    pub effects: Vec<Effect>,
    pub n: Vec<usize>,
}

impl TestResult {
    pub(crate) fn new(method: Method, statistic: f64, p_value: f64, n: Vec<usize>) -> Self {
        TestResult {
            method,
            statistic,
            p_value: p_value.clamp(0.0, 1.0),
            df: None,
            df2: None,
            effects: Vec::new(),
            n,
        }
    }

    pub(crate) fn with_df(mut self, df: f64) -> Self {
        self.df = Some(df);
        self
    }

    pub(crate) fn with_df2(mut self, df1: f64, df2: f64) -> Self {
        self.df = Some(df1);
        self.df2 = Some(df2);
        self
    }

    pub(crate) fn with_effect(mut self, kind: EffectKind, value: f64) -> Self {
        self.effects.push(Effect { kind, value });
        self
    }

    pub fn effect_size(&self) -> Option<f64> {
        self.effects.first().map(|e| e.value)
    }

    pub fn effect(&self, kind: EffectKind) -> Option<f64> {
        self.effects.iter().find(|e| e.kind == kind).map(|e| e.value)
    }
}

/// Conventional magnitude label for Cohen's d (0.2 / 0.5 / 0.8 cutoffs).
pub fn cohens_d_label(d: f64) -> &'static str {
    let a = d.abs();
    if a < 0.2 {
        "negligible"
    } else if a < 0.5 {
        "small"
    } else if a < 0.8 {
        "medium"
    } else {
        "large"
    }
}

/// Significance stars: `*` p < .05, `**` p < .01, `***` p < .001.
pub fn significance_marker(p: f64) -> &'static str {
    if p < 0.001 {
        "***"
    } else if p < 0.01 {
        "**"
    } else if p < 0.05 {
        "*"
    } else {
        ""
    }
}
