/// Numerical thresholds shared by every module.
///
/// `Tolerances::default()` carries the production values; tests construct
/// tighter or looser records and pass them to the `*_with` entry points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Relative pivot threshold for `solve_linear` (scaled by `max|A|`).
    pub pivot: f64,
    /// Convergence tolerance of the root polisher.
    pub root: f64,
    /// Iteration cap for root finding and polishing.
    pub root_max_iter: usize,
    /// A root counts as stable when `|z| < 1 - unit_circle`.
    pub unit_circle: f64,
    /// Relative remainder below which `(1 - z^-1)` is treated as a factor.
    pub remainder: f64,
    /// Relative magnitude under which polynomial coefficients are zeroed.
    pub coeff_trim: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            pivot: 1e-12,
            root: 1e-10,
            root_max_iter: 500,
            unit_circle: 1e-9,
            remainder: 1e-9,
            coeff_trim: 1e-13,
        }
    }
}
