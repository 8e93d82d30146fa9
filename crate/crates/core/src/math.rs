//! Float helpers backed by `libm`, since `core` has no transcendental functions.

pub(crate) fn ln(x: f64) -> f64 {
    libm::log(x)
}

pub(crate) fn powf(x: f64, y: f64) -> f64 {
    libm::pow(x, y)
}

pub(crate) fn ceil(x: f64) -> f64 {
    libm::ceil(x)
}

pub(crate) fn floor(x: f64) -> f64 {
    libm::floor(x)
}

pub(crate) fn round(x: f64) -> f64 {
    libm::round(x)
}

/// `ceil` that forgives representation noise just above an integer, so `8.0 / 0.2`
/// yields 40 rather than 41.
pub(crate) fn ceil_tol(x: f64) -> f64 {
    let r = round(x);
    if (x - r).abs() < 1e-9 {
        r
    } else {
        ceil(x)
    }
}

/// Saturating conversion of a non-negative float count to `u64`.
pub(crate) fn to_count(x: f64) -> u64 {
    if !(x > 0.0) {
        0
    } else if x >= u64::MAX as f64 {
        u64::MAX
    } else {
        x as u64
    }
}
