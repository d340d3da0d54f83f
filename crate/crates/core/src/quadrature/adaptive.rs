use super::QuadratureSpec;
use crate::error::{Error, Result};

// 15-point Kronrod extension of the 7-point Gauss rule on [-1, 1].
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
// Gauss weights for XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: f64,
    pub error_estimate: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VecIntegral {
    pub values: Vec<f64>,
    pub error_estimates: Vec<f64>,
    pub subdivisions: usize,
}

struct Panel {
    a: f64,
    b: f64,
    value: Vec<f64>,
    error: Vec<f64>,
    // largest error relative to its component tolerance at creation time
    score: f64,
}

fn kronrod_panel<F>(f: &F, a: f64, b: f64, dim: usize, buf: &mut [f64]) -> (Vec<f64>, Vec<f64>)
where
    F: Fn(f64, &mut [f64]),
{
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut k = vec![0.0; dim];
    let mut g = vec![0.0; dim];

    f(c, buf);
    for d in 0..dim {
        k[d] += WGK[7] * buf[d];
        g[d] += WG[3] * buf[d];
    }
    for i in 0..7 {
        let dx = h * XGK[i];
        for &x in &[c - dx, c + dx] {
            f(x, buf);
            for d in 0..dim {
                k[d] += WGK[i] * buf[d];
                if i % 2 == 1 {
                    g[d] += WG[i / 2] * buf[d];
                }
            }
        }
    }
    let value: Vec<f64> = k.iter().map(|v| v * h).collect();
    let error: Vec<f64> = k.iter().zip(&g).map(|(kv, gv)| ((kv - gv) * h).abs()).collect();
    (value, error)
}

/// Globally adaptive Gauss-Kronrod (7/15) integration of a vector-valued
/// integrand over `[breakpoints[0], breakpoints[last]]`.
///
/// The integrand writes its `dim` components into the provided buffer. The
/// error of a panel is the difference between its Kronrod and Gauss values;
/// the panel with the largest relative-to-tolerance error is bisected until
/// every component satisfies `err <= max(abs_tol, rel_tol * |value|)`.
pub fn integrate_1d_vec<F>(
    f: F,
    dim: usize,
    breakpoints: &[f64],
    spec: &QuadratureSpec,
) -> Result<VecIntegral>
where
    F: Fn(f64, &mut [f64]),
{
    spec.validate()?;
    if breakpoints.len() < 2 {
        return Err(Error::InvalidInput("need at least two breakpoints".into()));
    }
    if breakpoints.windows(2).any(|w| !(w[1] >= w[0])) {
        return Err(Error::InvalidInput("breakpoints must be non-decreasing".into()));
    }
    let mut buf = vec![0.0; dim];
    let mut panels: Vec<Panel> = Vec::new();
    for w in breakpoints.windows(2) {
        if w[1] > w[0] {
            let (value, error) = kronrod_panel(&f, w[0], w[1], dim, &mut buf);
            panels.push(Panel { a: w[0], b: w[1], value, error, score: 0.0 });
        }
    }
    let mut subdivisions = 0usize;
    loop {
        let mut total = vec![0.0; dim];
        let mut total_err = vec![0.0; dim];
        for p in &panels {
            for d in 0..dim {
                total[d] += p.value[d];
                total_err[d] += p.error[d];
            }
        }
        let tol: Vec<f64> = total
            .iter()
            .map(|v| spec.abs_tol.max(spec.rel_tol * v.abs()))
            .collect();
        let done = total_err.iter().zip(&tol).all(|(e, t)| e <= t);
        if done || panels.is_empty() {
            return Ok(VecIntegral {
                values: total,
                error_estimates: total_err,
                subdivisions,
            });
        }
        for p in panels.iter_mut() {
            p.score = p
                .error
                .iter()
                .zip(&tol)
                .map(|(e, t)| e / t)
                .fold(0.0, f64::max);
        }
        if subdivisions >= spec.max_subdivisions {
            let worst = (0..dim)
                .max_by(|&i, &j| (total_err[i] / tol[i]).total_cmp(&(total_err[j] / tol[j])))
                .unwrap_or(0);
            return Err(Error::Convergence {
                value: total[worst],
                error_estimate: total_err[worst],
            });
        }
        let idx = panels
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.score.total_cmp(&y.1.score))
            .map(|(i, _)| i)
            .expect("panels not empty");
        let p = panels.swap_remove(idx);
        let mid = 0.5 * (p.a + p.b);
        if !(mid > p.a && mid < p.b) {
            // interval exhausted at machine precision
            return Err(Error::Convergence {
                value: total[0],
                error_estimate: total_err[0],
            });
        }
        let (lv, le) = kronrod_panel(&f, p.a, mid, dim, &mut buf);
        let (rv, re) = kronrod_panel(&f, mid, p.b, dim, &mut buf);
        panels.push(Panel { a: p.a, b: mid, value: lv, error: le, score: 0.0 });
        panels.push(Panel { a: mid, b: p.b, value: rv, error: re, score: 0.0 });
        subdivisions += 1;
    }
}

/// Scalar integral over `[a, b]`.
pub fn integrate_interval<F>(f: F, a: f64, b: f64, spec: &QuadratureSpec) -> Result<Integral>
where
    F: Fn(f64) -> f64,
{
    let r = integrate_1d_vec(|x, out: &mut [f64]| out[0] = f(x), 1, &[a, b], spec)?;
    Ok(Integral {
        value: r.values[0],
        error_estimate: r.error_estimates[0],
    })
}

/// Scalar integral over the window `[-R * scale, R * scale]`, `R` being the
/// `QuadratureSpec::truncation_radius`.
pub fn integrate_1d<F>(f: F, scale: f64, spec: &QuadratureSpec) -> Result<Integral>
where
    F: Fn(f64) -> f64,
{
    let half = spec.truncation_radius * scale;
    integrate_interval(f, -half, half, spec)
}
