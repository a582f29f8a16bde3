//! Small descriptive helpers shared by the test battery.

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Sample variance (denominator n − 1). NaN for fewer than two values.
pub fn variance(xs: &[f64]) -> f64 {
    if xs.len() < 2 {
        return f64::NAN;
    }
    let m = mean(xs);
    xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (xs.len() - 1) as f64
}

pub fn std_dev(xs: &[f64]) -> f64 {
    variance(xs).sqrt()
}

pub fn median(xs: &[f64]) -> f64 {
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n == 0 {
        f64::NAN
    } else if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Linear-interpolation quantile (the "type 7" rule), `q` in [0, 1].
pub fn quantile(xs: &[f64], q: f64) -> f64 {
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    if v.is_empty() {
        return f64::NAN;
    }
    let h = (v.len() - 1) as f64 * q.clamp(0.0, 1.0);
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    v[lo] + (h - lo as f64) * (v[hi] - v[lo])
}

/// z-scores with the sample standard deviation; `None` for constant input.
pub fn z_scores(xs: &[f64]) -> Option<Vec<f64>> {
    if xs.windows(2).all(|w| w[0] == w[1]) {
        return None;
    }
    let m = mean(xs);
    let sd = std_dev(xs);
    if !(sd > 0.0) {
        return None;
    }
    Some(xs.iter().map(|x| (x - m) / sd).collect())
}

/// Average (mid) ranks, 1-based, together with the sizes of every tie group.
pub struct Ranking {
    pub ranks: Vec<f64>,
    pub ties: Vec<usize>,
}

impl Ranking {
    /// Σ (t³ − t) over tie groups.
    pub fn tie_term(&self) -> f64 {
        self.ties.iter().map(|&t| (t as f64).powi(3) - t as f64).sum()
    }
}

pub fn rank_average(xs: &[f64]) -> Ranking {
    let mut idx: Vec<usize> = (0..xs.len()).collect();
    idx.sort_by(|&a, &b| xs[a].total_cmp(&xs[b]));
    let mut ranks = vec![0.0; xs.len()];
    let mut ties = Vec::new();
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && xs[idx[j + 1]] == xs[idx[i]] {
            j += 1;
        }
        let r = (i + j) as f64 / 2.0 + 1.0;
        for &k in &idx[i..=j] {
            ranks[k] = r;
        }
        if j > i {
            ties.push(j - i + 1);
        }
        i = j + 1;
    }
    Ranking { ranks, ties }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranks_with_ties() {
        let r = rank_average(&[3.0, 1.0, 3.0, 2.0]);
        assert_eq!(r.ranks, vec![3.5, 1.0, 3.5, 2.0]);
        assert_eq!(r.ties, vec![2]);
        assert_eq!(r.tie_term(), 6.0);
    }

    #[test]
    fn median_and_quantiles() {
        assert_eq!(median(&[4.0, 1.0, 3.0, 2.0]), 2.5);
        assert_eq!(median(&[5.0, 1.0, 3.0]), 3.0);
        assert_eq!(quantile(&[1.0, 2.0, 3.0, 4.0, 5.0], 0.5), 3.0);
        assert_eq!(quantile(&[1.0, 2.0], 0.25), 1.25);
    }

    #[test]
    fn sample_variance_uses_n_minus_one() {
        assert_eq!(variance(&[0.0, 2.0]), 2.0);
        assert!(variance(&[1.0]).is_nan());
        assert!(z_scores(&[2.0, 2.0]).is_none());
    }
}
