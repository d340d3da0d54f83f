//! Weak (kernel-weighted) expectations: moments, the weak characteristic
//! function and cumulant generating function, and weak cumulants.
//!
//! Raw, unnormalised weak moments are the canonical objects throughout:
//! `m_j = integral of x^j * phi(x) * f(x) dx`, so `m_0` is the kernel mass
//! and is generally below one.

mod cumulants;
mod index;
mod moments;
mod transform;

pub use cumulants::{cumulants_to_moments, weak_cumulants};
pub use index::{MomentIndex, MomentSet, TestPolynomial};
pub use moments::{
    cauchy_weak_m0_faddeeva, cauchy_weak_m1_faddeeva, cauchy_weak_m1_remainder,
    empirical_weak_expectation, empirical_weak_moments, moment_ratio_turning_point,
    mixture_weak_expectations, normalised_weak_moment, theoretical_weak_expectations,
    theoretical_weak_moment,
    theoretical_weak_moments, WeakMomentVector,
};
pub use transform::{empirical_weak_cf, theoretical_weak_cf, theoretical_weak_cf_grid, weak_cgf};
