//! Stationarity checks and Granger tests on a planted lag-2 dependence.

use stylodrift::synthgen::generate_lagged_pair;
use stylodrift::timeseries::{adf_test, granger_pipeline};

fn main() -> stylodrift::Result<()> {
    let (x, y) = generate_lagged_pair(120, 2, 0.6, 1.0, 11);

    for (name, s) in [("x", &x), ("y", &y)] {
        let adf = adf_test(s)?;
        println!("ADF {name}: tau {:.3}, p {:.4}, lag {}", adf.statistic, adf.p_value, adf.used_lag);
    }

    let g = granger_pipeline(&x, &y, 5, 0.05)?;
    println!("differencing orders: x {}, y {}", g.result.x_diff_order, g.result.y_diff_order);
    println!("{:>3} {:>8} {:>4} {:>5} {:>10}", "lag", "F", "df1", "df2", "p");
    for l in &g.result.lags {
        println!("{:>3} {:>8.3} {:>4} {:>5} {:>10.2e}", l.lag, l.f, l.df1, l.df2, l.p_value);
    }
    Ok(())
}
