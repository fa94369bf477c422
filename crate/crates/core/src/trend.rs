//! Trend statistics over sampled series: power-law limit extrapolation,
//! Spearman rank correlation and the monotone-tail protocol used for limits
//! at infinity.

use std::ops::Range;

/// Fit of `y(t) ≈ limit + amplitude · t^{-exponent}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerLawFit {
    pub limit: f64,
    pub amplitude: f64,
    pub exponent: f64,
    pub rms: f64,
    /// The fit was unusable and `limit` is the last observed value.
    pub degenerate: bool,
}

const BETA_MIN: f64 = 0.02;
const BETA_MAX: f64 = 4.0;
const BETA_GRID: usize = 400;

/// Indices of the last `fraction` of `len` points (at least one point).
pub fn tail_window(len: usize, fraction: f64) -> Range<usize> {
    let count = ((len as f64) * fraction.clamp(0.0, 1.0)).round() as usize;
    let count = count.clamp(1.min(len), len);
    len - count..len
}

fn linear_fit(phi: &[f64], ys: &[f64]) -> Option<(f64, f64, f64)> {
    let n = phi.len() as f64;
    let mp = phi.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mut spp = 0.0;
    let mut spy = 0.0;
    for (p, y) in phi.iter().zip(ys) {
        spp += (p - mp) * (p - mp);
        spy += (p - mp) * (y - my);
    }
    if !(spp > 1e-300) {
        return None;
    }
    let a = spy / spp;
    let limit = my - a * mp;
    let sse: f64 = phi
        .iter()
        .zip(ys)
        .map(|(p, y)| {
            let e = y - limit - a * p;
            e * e
        })
        .sum();
    Some((limit, a, sse))
}

/// Least-squares fit of `limit + amplitude · t^{-β}` with `β` profiled out:
/// for each `β` the model is linear, so `β` is chosen on a log grid and then
/// polished by golden-section search.
pub fn fit_power_law(times: &[f64], values: &[f64]) -> PowerLawFit {
    let last = values.last().copied().unwrap_or(f64::NAN);
    let fallback = PowerLawFit {
        limit: last,
        amplitude: 0.0,
        exponent: f64::NAN,
        rms: f64::NAN,
        degenerate: true,
    };
    let pts: Vec<(f64, f64)> = times
        .iter()
        .zip(values)
        .filter(|(t, v)| **t > 0.0 && v.is_finite())
        .map(|(t, v)| (*t, *v))
        .collect();
    if pts.len() < 4 {
        return fallback;
    }
    let ts: Vec<f64> = pts.iter().map(|p| p.0).collect();
    let ys: Vec<f64> = pts.iter().map(|p| p.1).collect();
    // constant series: nothing to extrapolate
    if ys.iter().all(|y| (y - ys[0]).abs() <= 1e-15 * ys[0].abs().max(1.0)) {
        return PowerLawFit { limit: ys[0], amplitude: 0.0, exponent: f64::NAN, rms: 0.0, degenerate: false };
    }
    let sse_at = |beta: f64| -> Option<(f64, f64, f64)> {
        let phi: Vec<f64> = ts.iter().map(|t| t.powf(-beta)).collect();
        linear_fit(&phi, &ys)
    };
    let lb = BETA_MIN.ln();
    let ub = BETA_MAX.ln();
    let grid: Vec<f64> = (0..BETA_GRID)
        .map(|i| (lb + (ub - lb) * i as f64 / (BETA_GRID - 1) as f64).exp())
        .collect();
    let mut best: Option<(usize, f64)> = None;
    for (i, &b) in grid.iter().enumerate() {
        if let Some((_, _, sse)) = sse_at(b) {
            if best.is_none_or(|(_, s)| sse < s) {
                best = Some((i, sse));
            }
        }
    }
    let Some((ib, _)) = best else { return fallback };
    if ib == 0 || ib == BETA_GRID - 1 {
        return fallback;
    }
    // golden-section on log β between the grid neighbours
    let mut lo = grid[ib - 1].ln();
    let mut hi = grid[ib + 1].ln();
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let obj = |lbeta: f64| sse_at(lbeta.exp()).map_or(f64::INFINITY, |r| r.2);
    let mut x1 = hi - g * (hi - lo);
    let mut x2 = lo + g * (hi - lo);
    let mut f1 = obj(x1);
    let mut f2 = obj(x2);
    for _ in 0..60 {
        if f1 < f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - g * (hi - lo);
            f1 = obj(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + g * (hi - lo);
            f2 = obj(x2);
        }
    }
    let beta = (0.5 * (lo + hi)).exp();
    match sse_at(beta) {
        Some((limit, amplitude, sse)) if limit.is_finite() => PowerLawFit {
            limit,
            amplitude,
            exponent: beta,
            rms: (sse / ts.len() as f64).sqrt(),
            degenerate: false,
        },
        _ => fallback,
    }
}

/// Power-law extrapolation over the last `fraction` of the series.
pub fn extrapolate(times: &[f64], values: &[f64], fraction: f64) -> PowerLawFit {
    let w = tail_window(times.len(), fraction);
    fit_power_law(&times[w.clone()], &values[w])
}

fn ranks(xs: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..xs.len()).collect();
    idx.sort_by(|&a, &b| xs[a].total_cmp(&xs[b]));
    let mut r = vec![0.0; xs.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && xs[idx[j + 1]] == xs[idx[i]] {
            j += 1;
        }
        let avg = 0.5 * (i + j) as f64 + 1.0;
        for k in i..=j {
            r[idx[k]] = avg;
        }
        i = j + 1;
    }
    r
}

/// Spearman rank correlation; `0` when either series is constant.
pub fn spearman(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len().min(ys.len());
    if n < 2 {
        return 0.0;
    }
    let rx = ranks(&xs[..n]);
    let ry = ranks(&ys[..n]);
    let mean = (n as f64 + 1.0) / 2.0;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for i in 0..n {
        let (a, b) = (rx[i] - mean, ry[i] - mean);
        sxy += a * b;
        sxx += a * a;
        syy += b * b;
    }
    if sxx == 0.0 || syy == 0.0 {
        0.0
    } else {
        sxy / (sxx * syy).sqrt()
    }
}

/// Direction of a sampled limit at infinity.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TailTrend {
    ToZero,
    ToInfinity,
    Inconclusive,
}

/// Conservative reading of a positive series sampled on a grid growing to
/// infinity: the trailing monotone run must span at least `min_steps` grid
/// steps and change by a factor of at least `min_factor`.
pub fn tail_trend(values: &[f64], min_steps: usize, min_factor: f64) -> TailTrend {
    if values.iter().any(|v| !v.is_finite() || *v < 0.0) || values.len() < min_steps + 1 {
        return TailTrend::Inconclusive;
    }
    let last = values.len() - 1;
    if values[last - min_steps..].iter().all(|v| *v == 0.0) {
        return TailTrend::ToZero;
    }
    let mut start = last;
    while start > 0 && values[start - 1] >= values[start] {
        start -= 1;
    }
    let down = (start, last);
    let mut start = last;
    while start > 0 && values[start - 1] <= values[start] {
        start -= 1;
    }
    let up = (start, last);
    if down.1 - down.0 >= min_steps && values[down.0] >= min_factor * values[down.1] {
        return TailTrend::ToZero;
    }
    if up.1 - up.0 >= min_steps && values[up.1] >= min_factor * values[up.0] {
        return TailTrend::ToInfinity;
    }
    TailTrend::Inconclusive
}
