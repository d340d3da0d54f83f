use crate::error::{Error, Result};

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Weak cumulants `kappa_0..kappa_J` from raw weak moments `m_0..m_J`.
///
/// `kappa_0 = ln m_0`; for `j >= 1` the recursion
/// `m_j = sum_{k=1}^{j} C(j-1, k-1) kappa_k m_{j-k}` is solved for `kappa_j`.
/// It holds for unnormalised moments, so `m_0 != 1` only shifts `kappa_0`.
pub fn weak_cumulants(moments: &[f64]) -> Result<Vec<f64>> {
    if moments.len() < 2 {
        return Err(Error::InvalidInput("need weak moments m_0..m_J with J >= 1".into()));
    }
    let m0 = moments[0];
    if !(m0 > 0.0) {
        return Err(Error::Domain(format!("m_0 must be positive, got {m0}")));
    }
    let mut kappa = vec![0.0; moments.len()];
    kappa[0] = m0.ln();
    for j in 1..moments.len() {
        let mut acc = moments[j];
        for k in 1..j {
            acc -= binomial(j - 1, k - 1) * kappa[k] * moments[j - k];
        }
        kappa[j] = acc / m0;
    }
    Ok(kappa)
}

/// Inverse of [`weak_cumulants`].
pub fn cumulants_to_moments(kappa: &[f64]) -> Vec<f64> {
    let mut m = vec![0.0; kappa.len()];
    if kappa.is_empty() {
        return m;
    }
    m[0] = kappa[0].exp();
    for j in 1..kappa.len() {
        m[j] = (1..=j).map(|k| binomial(j - 1, k - 1) * kappa[k] * m[j - k]).sum();
    }
    m
}
