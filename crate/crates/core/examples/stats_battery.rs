//! The hypothesis-test battery on small hand-made samples.

use stylodrift::stats::{
    adjust_pvalues, dunn_posthoc, kruskal_wallis, levene, mann_whitney_u, pearson_r, t_test, wilcoxon_signed_rank,
    Adjustment, Center, EffectKind, TTestMode,
};

fn main() -> stylodrift::Result<()> {
    let a = [4.1, 5.3, 6.0, 5.5, 4.8, 6.2, 5.9, 5.1, 4.4, 6.6];
    let b = [3.2, 4.0, 4.9, 3.8, 4.1, 5.0, 4.6, 3.9, 3.5, 5.2];
    let c = [5.9, 6.8, 7.1, 6.4, 7.5, 6.0, 6.9, 7.7, 6.2, 7.0];

    let show = |name: &str, r: &stylodrift::stats::TestResult| {
        println!("{name:<22} stat {:>9.4}  p {:>10.3e}  effect {:?}", r.statistic, r.p_value, r.effect_size());
    };
    show("levene (mean)", &levene(&[&a, &b], Center::Mean)?);
    show("brown-forsythe", &levene(&[&a, &b], Center::Median)?);
    show("t paired", &t_test(&a, &b, TTestMode::Paired)?);
    show("t welch", &t_test(&a, &b, TTestMode::Welch)?);
    show("t student", &t_test(&a, &b, TTestMode::Student)?);
    show("wilcoxon signed-rank", &wilcoxon_signed_rank(&a, &b)?);
    show("mann-whitney u", &mann_whitney_u(&a, &b)?);
    show("pearson r", &pearson_r(&a, &b)?);

    let kw = kruskal_wallis(&[&a, &b, &c])?;
    show("kruskal-wallis", &kw);
    println!(
        "  epsilon^2 {:.4}, eta^2_H {:.4}",
        kw.effect(EffectKind::EpsilonSquared).unwrap_or(f64::NAN),
        kw.effect(EffectKind::EtaSquaredH).unwrap_or(f64::NAN)
    );
    for p in dunn_posthoc(&[&a, &b, &c], Adjustment::BenjaminiHochberg)? {
        println!("  dunn {} vs {}: z {:>7.3}, p {:.4}, BH {:.4}", p.group_a, p.group_b, p.result.statistic, p.p_raw, p.result.p_value);
    }

    let raw = [0.001, 0.012, 0.03, 0.2];
    println!("bonferroni {:?}", adjust_pvalues(&raw, Adjustment::Bonferroni)?);
    println!("BH         {:?}", adjust_pvalues(&raw, Adjustment::BenjaminiHochberg)?);
    Ok(())
}
