use crate::error::{Error, Result};

/// Gauss-Hermite nodes and weights for the weight `exp(-t^2)`.
#[derive(Debug, Clone)]
pub struct HermiteRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    /// `weights[i] * exp(nodes[i]^2)`, for integrands that already carry the Gaussian.
    pub scaled_weights: Vec<f64>,
}

pub const MIN_HERMITE_ORDER: usize = 4;
pub const MAX_HERMITE_ORDER: usize = 150;

/// Nodes by Newton iteration on the orthonormal Hermite recurrence.
pub fn gauss_hermite_rule(order: usize) -> Result<HermiteRule> {
    if !(MIN_HERMITE_ORDER..=MAX_HERMITE_ORDER).contains(&order) {
        return Err(Error::InvalidInput(format!(
            "Hermite order must lie in [{MIN_HERMITE_ORDER}, {MAX_HERMITE_ORDER}], got {order}"
        )));
    }
    const PIM4: f64 = 0.751_125_544_464_942_5;
    let n = order;
    let nf = n as f64;
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let mut z = 0.0f64;
    for i in 0..(n + 1) / 2 {
        z = match i {
            0 => (2.0 * nf + 1.0).sqrt() - 1.855_75 * (2.0 * nf + 1.0).powf(-0.166_67),
            1 => z - 1.14 * nf.powf(0.426) / z,
            2 => 1.86 * z - 0.86 * x[0],
            3 => 1.91 * z - 0.91 * x[1],
            _ => 2.0 * z - x[i - 2],
        };
        let mut pp = 0.0;
        for _ in 0..100 {
            let mut p1 = PIM4;
            let mut p2 = 0.0;
            for j in 0..n {
                let p3 = p2;
                p2 = p1;
                let jf = j as f64;
                p1 = z * (2.0 / (jf + 1.0)).sqrt() * p2 - (jf / (jf + 1.0)).sqrt() * p3;
            }
            pp = (2.0 * nf).sqrt() * p2;
            let z1 = z;
            z = z1 - p1 / pp;
            if (z - z1).abs() <= 1e-15 * z.abs().max(1.0) {
                break;
            }
        }
        x[i] = z;
        x[n - 1 - i] = -z;
        w[i] = 2.0 / (pp * pp);
        w[n - 1 - i] = w[i];
    }
    let scaled_weights = x.iter().zip(&w).map(|(t, wt)| wt * (t * t).exp()).collect();
    Ok(HermiteRule { nodes: x, weights: w, scaled_weights })
}

/// Tensor Gauss-Hermite value of `integral over R^2 of f`, in coordinates
/// standardised by the kernel bandwidth `scale` (`x = sqrt(2) * scale * t`).
///
/// Accurate when `f(x) * exp(|x|^2 / (2 scale^2))` is smooth on the scale
/// of the node spacing.
pub fn cubature_2d<F>(f: F, scale: f64, order: usize) -> Result<f64>
where
    F: Fn([f64; 2]) -> f64,
{
    if !(scale > 0.0) {
        return Err(Error::InvalidInput("cubature scale must be positive".into()));
    }
    let rule = gauss_hermite_rule(order)?;
    let s = std::f64::consts::SQRT_2 * scale;
    let mut total = 0.0;
    for (ti, wi) in rule.nodes.iter().zip(&rule.scaled_weights) {
        let mut row = 0.0;
        for (tj, wj) in rule.nodes.iter().zip(&rule.scaled_weights) {
            row += wj * f([s * ti, s * tj]);
        }
        total += wi * row;
    }
    Ok(total * s * s)
}
