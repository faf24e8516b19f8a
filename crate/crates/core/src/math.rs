// Float routines that live in std, not core.
pub(crate) use libm::{ceil, cos, fabs as abs, log as ln, sin, sqrt};

/// `⌈x⌉` that forgives representation noise, so `5 / (1/3)` rounds up to 15
/// rather than 16.
pub(crate) fn ceil_tol(x: f64) -> f64 {
    let c = ceil(x);
    if c - x > 1.0 - 1e-9 * abs(x).max(1.0) {
        c - 1.0
    } else {
        c
    }
}
