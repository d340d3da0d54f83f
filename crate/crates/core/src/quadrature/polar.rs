use super::{integrate_1d_vec, QuadratureSpec, VecIntegral};
use crate::error::Result;
use std::f64::consts::PI;

/// Integrates `g(x) * profile(|x - center|)` over the plane in polar
/// coordinates centred at `center`.
///
/// The radial integral is adaptive Gauss-Kronrod on `[0, r_max]`; the
/// angular one is the periodic trapezoid rule, which converges
/// geometrically because `g` is smooth in the angle. `angular_rate` bounds
/// the log-derivative of `g` along circles (for an integrand carrying a
/// Gaussian kernel of bandwidth `s` this is `|center| * r / s^2`); the
/// number of angular nodes grows with it.
pub fn integrate_radial_2d<P, G>(
    center: [f64; 2],
    profile: P,
    g: G,
    dim: usize,
    angular_rate: impl Fn(f64) -> f64,
    r_max: f64,
    spec: &QuadratureSpec,
) -> Result<VecIntegral>
where
    P: Fn(f64) -> f64,
    G: Fn([f64; 2], &mut [f64]),
{
    let mut inner = vec![0.0; dim];
    let radial = |r: f64, out: &mut [f64]| {
        out.iter_mut().for_each(|v| *v = 0.0);
        let rate = angular_rate(r);
        let m = (48.0 + 2.0 * rate).ceil() as usize;
        let m = m + m % 2;
        let dtheta = 2.0 * PI / m as f64;
        // use a local buffer: `inner` cannot be borrowed mutably inside Fn
        let mut buf = vec![0.0; dim];
        for k in 0..m {
            let theta = dtheta * k as f64;
            let x = [center[0] + r * theta.cos(), center[1] + r * theta.sin()];
            g(x, &mut buf);
            for d in 0..dim {
                out[d] += buf[d];
            }
        }
        let w = r * profile(r) * dtheta;
        out.iter_mut().for_each(|v| *v *= w);
    };
    inner.clear();
    let mut bps = vec![0.0, 0.5, 2.0, 8.0];
    bps.retain(|&b| b < r_max);
    bps.push(r_max);
    integrate_1d_vec(radial, dim, &bps, spec)
}
