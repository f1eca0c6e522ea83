use serde::{Deserialize, Serialize};

use crate::error::{HarnessError, Result};

/// Least-squares power-law fit on log-log data.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct RateFit {
    /// Empirical decay exponent (negative for decaying errors).
    pub slope: f64,
    /// `ln` of the empirical constant.
    pub intercept: f64,
    pub r_squared: f64,
    pub e_min: f64,
    pub e_max: f64,
    pub points_used: usize,
}

/// Fit `ln(err) = slope * ln(E) + intercept` over the rows after skipping
/// `skip_first` of them (the pre-asymptotic regime). Rows with a vanishing
/// error are excluded with a warning; fewer than 3 usable rows is an error.
pub fn fit_rate(rows: &[(f64, f64)], skip_first: usize) -> Result<RateFit> {
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    let mut e_min = f64::INFINITY;
    let mut e_max = f64::NEG_INFINITY;
    for &(e, err) in rows.iter().skip(skip_first) {
        // negated form rejects NaN rows too
        #[allow(clippy::neg_cmp_op_on_partial_ord)]
        if !(err > 0.0) {
            log::warn!("excluding row E = {e} with sup_error = {err} from the fit");
            continue;
        }
        xs.push(e.ln());
        ys.push(err.ln());
        e_min = e_min.min(e);
        e_max = e_max.max(e);
    }
    let n = xs.len();
    if n < 3 {
        return Err(HarnessError::InsufficientData(format!(
            "rate fit needs >= 3 usable rows, found {n}"
        )));
    }
    let nf = n as f64;
    let mean_x = xs.iter().sum::<f64>() / nf;
    let mean_y = ys.iter().sum::<f64>() / nf;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    let mut syy = 0.0;
    for i in 0..n {
        let dx = xs[i] - mean_x;
        let dy = ys[i] - mean_y;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let r_squared = if syy == 0.0 {
        1.0
    } else {
        ((sxy * sxy) / (sxx * syy)).clamp(0.0, 1.0)
    };
    Ok(RateFit {
        slope,
        intercept,
        r_squared,
        e_min,
        e_max,
        points_used: n,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_power_law_recovered_exactly() {
        let rows: Vec<(f64, f64)> = [16.0, 32.0, 64.0, 128.0, 256.0f64]
            .iter()
            .map(|&e| (e, e.powf(-0.5)))
            .collect();
        let fit = fit_rate(&rows, 0).unwrap();
        assert!((fit.slope + 0.5).abs() <= 1e-12);
        assert!(fit.intercept.abs() <= 1e-12);
        assert!((fit.r_squared - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn scaled_power_law_gives_log_intercept() {
        let alpha = 1.0 / 14.0;
        let rows: Vec<(f64, f64)> = [16.0, 32.0, 64.0, 128.0f64]
            .iter()
            .map(|&e| (e, 3.0 * e.powf(-alpha)))
            .collect();
        let fit = fit_rate(&rows, 0).unwrap();
        assert!((fit.slope + alpha).abs() <= 1e-12);
        assert!((fit.intercept - 3.0f64.ln()).abs() <= 1e-12);
    }

    #[test]
    fn window_skips_leading_rows() {
        let rows = vec![(16.0, 10.0), (32.0, 1.0), (64.0, 0.5), (128.0, 0.25)];
        let fit = fit_rate(&rows, 1).unwrap();
        assert_eq!(fit.points_used, 3);
        assert_eq!(fit.e_min, 32.0);
        assert!((fit.slope + 1.0).abs() <= 1e-12);
    }

    #[test]
    fn zero_rows_excluded_and_insufficient_data_detected() {
        let rows = vec![(16.0, 0.0), (32.0, 1.0), (64.0, 0.5)];
        assert!(matches!(
            fit_rate(&rows, 0),
            Err(HarnessError::InsufficientData(_))
        ));
    }
}
