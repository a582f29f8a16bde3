//! Drive the report pipeline from a TOML config, as the CLI does.

use stylodrift::pipeline::{run, Command};
use stylodrift::PipelineConfig;

const CONFIG: &str = r#"
seed = 42
out = "reports"
[input]
documents = "reports/documents.jsonl"
[trend]
onset = "2021-01"
granger = true
max_lag = 4
[synth]
kind = "shock"
[synth.shock]
start = "2019-01"
months = 40
onset = "2021-01"
docs_per_month = 20
[synth.shock.detector]
pre_rate = 0.05
post_rate = 0.5
ramp_months = 3
"#;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = tempfile::tempdir()?;
    let mut cfg = PipelineConfig::from_toml(CONFIG)?;
    cfg.base_dir = dir.path().to_path_buf();

    for command in [Command::Synth, Command::Features, Command::Trend] {
        let out = run(command, &cfg)?;
        println!("{command:?} (status {})", out.status);
        for f in &out.files {
            println!("  {}", f.strip_prefix(dir.path()).unwrap_or(f).display());
        }
        for w in &out.warnings {
            println!("  warning: {w}");
        }
    }
    let dgm = std::fs::read_to_string(dir.path().join("reports/dgm.csv"))?;
    println!("\n{dgm}");
    Ok(())
}
