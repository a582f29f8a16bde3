//! Dictionary category ratios, trait association tests and the
//! original-vs-rewrite shift report.

use stylodrift::corpus::{tokenize_text, TokenStream};
use stylodrift::lexicon::{
    compare_categorical, correlate_continuous, lexical_shift_report, parse_dic, text_ratios, ScoreTable,
};

const DIC: &str = "%
1\tposemo
2\tnegemo
3\tcertain
%
happy\t1
love*\t1
good morning\t1
sad\t2
hate*\t2
always\t3
never\t3
";

fn main() -> stylodrift::Result<()> {
    let lex = parse_dic(DIC, "mini", std::path::Path::new("mini.dic"))?;
    let s = text_ratios("x", "Good morning! I love lovely mornings, never sad.", &lex)?;
    for (c, r) in lex.category_names().iter().zip(&s.ratios) {
        println!("{c:<8} {r:.3}");
    }

    let texts: Vec<String> = (0..30)
        .map(|i| {
            let pos = "happy ".repeat(i % 6);
            let neg = "sad ".repeat((i * 7) % 4);
            format!("{pos}{neg}the weather was {} today always", if i % 2 == 0 { "fine" } else { "grey" })
        })
        .collect();
    let streams: Vec<TokenStream> =
        texts.iter().enumerate().map(|(i, t)| TokenStream::new(format!("d{i}"), tokenize_text(t))).collect();
    let table = ScoreTable::build(&streams, &lex)?;

    let happiness: Vec<f64> = (0..30).map(|i| (i % 6) as f64 + 0.1 * (i % 3) as f64).collect();
    let corr = correlate_continuous(&table, &happiness)?;
    for r in &corr.rows {
        println!("r({}, trait) = {:+.3}, p_bonf {:.2e}{}", r.category, r.r, r.p_adjusted, if r.significant { " *" } else { "" });
    }

    let groups: Vec<String> = (0..30).map(|i| if i % 6 >= 3 { "high" } else { "low" }.to_string()).collect();
    let cmp = compare_categorical(&table, &groups)?;
    for r in &cmp.rows {
        println!("{} {} vs {}: t {:.2}, p_bonf {:.3}", r.category, cmp.groups[0], cmp.groups[1], r.t, r.p_adjusted);
    }

    let rewrites: Vec<TokenStream> = texts
        .iter()
        .enumerate()
        .map(|(i, t)| TokenStream::new(format!("r{i}"), tokenize_text(&t.replace("happy", "fine"))))
        .collect();
    let shift = lexical_shift_report(&table, &ScoreTable::build(&rewrites, &lex)?)?;
    for r in &shift.rows {
        println!(
            "shift {:<8} MW p_BH {:.3}  direction {}  presence {:.2}",
            r.category,
            r.mw_p_adjusted,
            r.direction.unwrap_or("-"),
            r.rewrite_presence
        );
    }
    Ok(())
}
