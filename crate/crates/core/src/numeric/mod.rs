//! Dense matrices, `z⁻¹` polynomials and the rational-function limits built on them.

mod linsolve;
mod matrix;
mod poly;
mod polymat;
mod rational;
mod roots;
mod tol;

pub use linsolve::{solve_linear, Lu};
pub(crate) use linsolve::complex_det;
pub use matrix::Matrix;
pub use poly::{poly_mul, ZPolynomial};
pub use polymat::{polymat_det, ZPolyMatrix};
pub use rational::{check_poles, final_value, final_value_with, final_value_on_scale, InputKind, RationalMatrix, ZRational};
pub use roots::{poly_roots, poly_roots_with, root_residual};
pub use tol::Tolerances;
