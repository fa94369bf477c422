//! Gauss–Kronrod quadrature with global adaptive bisection, plus composite
//! Simpson for the fixed-panel rules used by the integrators.

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];

// Gauss 7-point weights, paired with XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Default relative target for moment and mass integrals.
pub const REL_TOL: f64 = 1e-10;
/// Absolute floor below which an interval is considered converged.
pub const ABS_FLOOR: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    pub error: f64,
    pub converged: bool,
}

/// One 15-point Kronrod pass. Returns (kronrod estimate, |kronrod - gauss|).
pub fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for (j, &x) in XGK.iter().enumerate().take(7) {
        let dx = half * x;
        let pair = f(center - dx) + f(center + dx);
        kronrod += WGK[j] * pair;
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    (kronrod * half, ((kronrod - gauss) * half).abs())
}

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

/// Globally adaptive Gauss–Kronrod integration of `f` over `[a, b]`.
///
/// Splits the segment with the largest error estimate until the summed error
/// drops below `max(abs_tol, rel_tol * |I|)` or `max_segments` is reached.
pub fn integrate<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    rel_tol: f64,
    abs_tol: f64,
    max_segments: usize,
) -> QuadResult {
    if a == b {
        return QuadResult { value: 0.0, error: 0.0, converged: true };
    }
    let (value, error) = gk15(&f, a, b);
    let mut segments = vec![Segment { a, b, value, error }];
    loop {
        let total: f64 = segments.iter().map(|s| s.value).sum();
        let err: f64 = segments.iter().map(|s| s.error).sum();
        if !total.is_finite() {
            return QuadResult { value: total, error: err, converged: false };
        }
        if err <= abs_tol.max(rel_tol * total.abs()) {
            return QuadResult { value: total, error: err, converged: true };
        }
        if segments.len() >= max_segments {
            return QuadResult { value: total, error: err, converged: false };
        }
        let (worst, _) = segments
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.error.total_cmp(&y.1.error))
            .expect("non-empty");
        let seg = segments.swap_remove(worst);
        let mid = 0.5 * (seg.a + seg.b);
        if mid <= seg.a || mid >= seg.b {
            // interval cannot be split further in floating point
            segments.push(seg);
            let total: f64 = segments.iter().map(|s| s.value).sum();
            let err: f64 = segments.iter().map(|s| s.error).sum();
            return QuadResult { value: total, error: err, converged: false };
        }
        let (lv, le) = gk15(&f, seg.a, mid);
        let (rv, re) = gk15(&f, mid, seg.b);
        segments.push(Segment { a: seg.a, b: mid, value: lv, error: le });
        segments.push(Segment { a: mid, b: seg.b, value: rv, error: re });
    }
}

/// Adaptive integration with the crate defaults.
pub fn integrate_default<F: Fn(f64) -> f64>(f: F, a: f64, b: f64) -> QuadResult {
    integrate(f, a, b, REL_TOL, ABS_FLOOR, 4000)
}

/// Integral of `g` over `[0, t]` computed in the variable `v = ln(1 + u)`.
///
/// Power-law and other slowly decaying integrands become smooth and
/// moderately sized in `v`, which keeps adaptive quadrature efficient for
/// arguments as large as 1e16.
pub fn integrate_log1p<F: Fn(f64) -> f64>(g: F, t: f64, rel_tol: f64) -> QuadResult {
    if t <= 0.0 {
        return QuadResult { value: 0.0, error: 0.0, converged: true };
    }
    let vmax = t.ln_1p();
    integrate(
        |v: f64| {
            let ev = v.exp();
            g(ev - 1.0) * ev
        },
        0.0,
        vmax,
        rel_tol,
        ABS_FLOOR,
        4000,
    )
}

/// Composite Simpson nodes and weights on `[a, b]` with `panels` subintervals
/// (`panels` is rounded up to an even number).
pub fn simpson_rule(a: f64, b: f64, panels: usize) -> Vec<(f64, f64)> {
    let n = panels.max(2) + panels % 2;
    let step = (b - a) / n as f64;
    (0..=n)
        .map(|i| {
            let w = if i == 0 || i == n {
                1.0
            } else if i % 2 == 1 {
                4.0
            } else {
                2.0
            };
            (a + step * i as f64, w * step / 3.0)
        })
        .collect()
}

pub fn simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, panels: usize) -> f64 {
    simpson_rule(a, b, panels)
        .into_iter()
        .map(|(x, w)| w * f(x))
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_is_exact() {
        let r = integrate_default(|x| 3.0 * x * x + 1.0, 0.0, 2.0);
        assert!(r.converged);
        assert!((r.value - 10.0).abs() < 1e-13);
    }

    #[test]
    fn endpoint_singularity_converges() {
        // integrable 1/sqrt singularity
        let r = integrate(|x: f64| 1.0 / x.sqrt(), 0.0, 1.0, 1e-10, 1e-14, 4000);
        assert!((r.value - 2.0).abs() < 1e-8, "{r:?}");
    }

    #[test]
    fn log1p_map_handles_heavy_tails() {
        // ∫_0^t 2 (1+u)^{-3} du = 1 - (1+t)^{-2}
        let t = 1e8;
        let r = integrate_log1p(|u| 2.0 * (1.0 + u).powi(-3), t, 1e-12);
        assert!((r.value - (1.0 - (1.0 + t).powi(-2))).abs() < 1e-12);
    }

    #[test]
    fn simpson_integrates_cubics_exactly() {
        let v = simpson(|x| x * x * x - x, -1.0, 3.0, 4);
        assert!((v - 16.0).abs() < 1e-12);
        assert_eq!(simpson_rule(0.0, 1.0, 3).len(), 5);
    }
}
