//! Benchmark plants, each with a closed-form PJM.

use crate::edlm::{cube_increment, square_increment, HistoryWindow, Pjm, PlantModel};
use crate::error::{Error, Result};
use crate::numeric::Matrix;

/// `y(k+1) = 0.8y(k−1) + u(k−3) + 0.5u(k−4)`.
#[derive(Debug, Clone, Copy, Default)]
pub struct Example1;

impl PlantModel for Example1 {
    fn output_dim(&self) -> usize {
        1
    }

    fn input_dim(&self) -> usize {
        1
    }

    fn order_y(&self) -> usize {
        1
    }

    fn order_u(&self) -> usize {
        4
    }

    fn eval(&self, h: &HistoryWindow) -> Result<Vec<f64>> {
        h.require("example 1 plant", 2, 5)?;
        Ok(vec![0.8 * h.y(1)[0] + h.u(3)[0] + 0.5 * h.u(4)[0]])
    }

    fn exact_pjm(&self, _h: &HistoryWindow) -> Option<Result<Pjm>> {
        Some(Pjm::siso(2, &[0.0, 0.8, 0.0, 0.0, 0.0, 1.0, 0.5]))
    }
}

/// Two-channel plant with squared outputs two steps back and linear/cubic
/// inputs at dead time `delay` and `delay + 1`:
///
/// ```text
/// y₁(k+1) = y₁²(k−1) + 0.7y₂²(k−1) + a₁ + 0.5a₂ + 0.4b₁³ + 0.5b₂
/// y₂(k+1) = 0.5y₁²(k−1) + 1.3y₂²(k−1) + 0.4a₁ + 1.2a₂ + 0.2b₁ + 0.4b₂³
/// ```
///
/// with `a = u(k+1−delay)`, `b = u(k−delay)`.
#[derive(Debug, Clone, Copy)]
pub struct SquareCubic {
    delay: usize,
}

const LINEAR_INPUT: [[f64; 2]; 2] = [[1.0, 0.5], [0.4, 1.2]];

impl SquareCubic {
    pub fn new(delay: usize) -> Result<Self> {
        if delay == 0 {
            return Err(Error::InvalidConfig("dead time must be at least 1".into()));
        }
        Ok(Self { delay })
    }

    /// Three-step dead time (Examples 2 and 3).
    pub fn example2() -> Self {
        Self { delay: 3 }
    }

    /// Two-step dead time (Example 4).
    pub fn example4() -> Self {
        Self { delay: 2 }
    }

    pub fn delay(&self) -> usize {
        self.delay
    }
}

impl PlantModel for SquareCubic {
    fn output_dim(&self) -> usize {
        2
    }

    fn input_dim(&self) -> usize {
        2
    }

    fn order_y(&self) -> usize {
        1
    }

    fn order_u(&self) -> usize {
        self.delay
    }

    fn eval(&self, h: &HistoryWindow) -> Result<Vec<f64>> {
        h.require("square-cubic plant", 2, self.delay + 1)?;
        let y = h.y(1);
        let a = h.u(self.delay - 1);
        let b = h.u(self.delay);
        let (s1, s2) = (y[0] * y[0], y[1] * y[1]);
        Ok(vec![
            s1 + 0.7 * s2 + a[0] + 0.5 * a[1] + 0.4 * b[0].powi(3) + 0.5 * b[1],
            0.5 * s1 + 1.3 * s2 + 0.4 * a[0] + 1.2 * a[1] + 0.2 * b[0] + 0.4 * b[1].powi(3),
        ])
    }

    /// Squares and cubes are replaced by their exact increment coefficients,
    /// e.g. `Δ(v²)(t) = (2v(t−1) + Δv(t))·Δv(t)`.
    fn exact_pjm(&self, h: &HistoryWindow) -> Option<Result<Pjm>> {
        Some((|| {
            h.require("square-cubic PJM", 3, self.delay + 2)?;
            let (ly, lu) = self.pseudo_orders();
            let sq = |c: usize| square_increment(h.y(2)[c], h.y(1)[c] - h.y(2)[c]);
            let old = h.u(self.delay + 1);
            let cu = |c: usize| cube_increment(old[c], h.u(self.delay)[c] - old[c]);
            let mut pjm = Pjm::zeros(ly, lu, 2, 2);
            pjm.set_block(1, &Matrix::from_rows(&[vec![sq(0), 0.7 * sq(1)], vec![0.5 * sq(0), 1.3 * sq(1)]]))?;
            pjm.set_block(
                ly + self.delay - 1,
                &Matrix::from_rows(&[LINEAR_INPUT[0].to_vec(), LINEAR_INPUT[1].to_vec()]),
            )?;
            pjm.set_block(ly + self.delay, &Matrix::from_rows(&[vec![0.4 * cu(0), 0.5], vec![0.2, 0.4 * cu(1)]]))?;
            Ok(pjm)
        })())
    }
}

/// `y(k+1) = Σ_i A_i y(k−i) + Σ_j B_j u(k−j)`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearArx {
    a: Vec<Matrix>,
    b: Vec<Matrix>,
}

impl LinearArx {
    pub fn new(a: Vec<Matrix>, b: Vec<Matrix>) -> Result<Self> {
        let (Some(a0), Some(b0)) = (a.first(), b.first()) else {
            return Err(Error::InvalidConfig("ARX plant needs at least one A and one B matrix".into()));
        };
        let (my, mu) = (a0.rows(), b0.cols());
        if my == 0 || mu == 0 {
            return Err(Error::InvalidConfig("ARX matrices must be nonempty".into()));
        }
        if a.iter().any(|m| m.rows() != my || m.cols() != my) {
            return Err(Error::InvalidConfig(format!("every A matrix must be {my}x{my}")));
        }
        if b.iter().any(|m| m.rows() != my || m.cols() != mu) {
            return Err(Error::InvalidConfig(format!("every B matrix must be {my}x{mu}")));
        }
        Ok(Self { a, b })
    }

    pub fn a(&self) -> &[Matrix] {
        &self.a
    }

    pub fn b(&self) -> &[Matrix] {
        &self.b
    }
}

impl PlantModel for LinearArx {
    fn output_dim(&self) -> usize {
        self.a[0].rows()
    }

    fn input_dim(&self) -> usize {
        self.b[0].cols()
    }

    fn order_y(&self) -> usize {
        self.a.len() - 1
    }

    fn order_u(&self) -> usize {
        self.b.len() - 1
    }

    fn eval(&self, h: &HistoryWindow) -> Result<Vec<f64>> {
        h.require("ARX plant", self.a.len(), self.b.len())?;
        let mut y = vec![0.0; self.output_dim()];
        for (i, m) in self.a.iter().enumerate() {
            for (o, v) in y.iter_mut().zip(m.mul_vec(h.y(i))?) {
                *o += v;
            }
        }
        for (j, m) in self.b.iter().enumerate() {
            for (o, v) in y.iter_mut().zip(m.mul_vec(h.u(j))?) {
                *o += v;
            }
        }
        Ok(y)
    }

    fn exact_pjm(&self, _h: &HistoryWindow) -> Option<Result<Pjm>> {
        let blocks = self.a.iter().chain(&self.b).cloned().collect();
        Some(Pjm::new(self.a.len(), self.b.len(), blocks))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::edlm::{delta_regressor, edlm_step, pjm_exact, pjm_secant};
    use proptest::prelude::*;

    /// Window at time `k` in the plant's own indexing from `y(k−i)`, `u(k−j)`.
    fn window(y: &[Vec<f64>], u: &[Vec<f64>]) -> HistoryWindow {
        HistoryWindow::new(y.to_vec(), u.to_vec()).unwrap()
    }

    fn zeros(m: usize, n: usize) -> Vec<Vec<f64>> {
        vec![vec![0.0; m]; n]
    }

    #[test]
    fn example1_substitution() {
        let p = Example1;
        let mut y = zeros(1, 3);
        let mut u = zeros(1, 6);
        assert_eq!(p.eval(&window(&y, &u)).unwrap(), vec![0.0]);
        // y(k) = 0.8y(k−2) + u(k−4) + 0.5u(k−5), read one step later
        y[1][0] = 1.0;
        assert_eq!(p.eval(&window(&y, &u)).unwrap(), vec![0.8]);
        y[1][0] = 0.0;
        u[3][0] = 1.0;
        u[4][0] = 2.0;
        assert_eq!(p.eval(&window(&y, &u)).unwrap(), vec![2.0]);
    }

    #[test]
    fn example2_substitution() {
        let p = SquareCubic::example2();
        let mut y = zeros(2, 3);
        let mut u = zeros(2, 5);
        assert_eq!(p.eval(&window(&y, &u)).unwrap(), vec![0.0, 0.0]);
        y[1][0] = 0.5;
        assert_eq!(p.eval(&window(&y, &u)).unwrap(), vec![0.25, 0.125]);
        y[1][0] = 0.0;
        u[3][1] = 1.0;
        assert_eq!(p.eval(&window(&y, &u)).unwrap(), vec![0.5, 0.4]);
    }

    #[test]
    fn example4_substitution() {
        let p = SquareCubic::example4();
        let y = zeros(2, 3);
        let mut u = zeros(2, 4);
        u[1][0] = 1.0;
        assert_eq!(p.eval(&window(&y, &u)).unwrap(), vec![1.0, 0.4]);
        let u = zeros(2, 4);
        assert_eq!(p.step(&window(&y, &u), &[0.1, 0.2]).unwrap(), vec![0.1, 0.2]);
    }

    #[test]
    fn shallow_history_is_reported() {
        let h = window(&zeros(1, 1), &zeros(1, 5));
        assert!(matches!(Example1.eval(&h), Err(Error::InsufficientHistory { .. })));
    }

    #[test]
    fn arx_pjm_matches_secant() {
        let a = vec![
            Matrix::from_rows(&[vec![0.5, 0.1], vec![0.0, 0.3]]),
            Matrix::from_rows(&[vec![0.1, 0.0], vec![0.05, -0.2]]),
        ];
        let b = vec![Matrix::from_rows(&[vec![1.0], vec![0.4]]), Matrix::from_rows(&[vec![0.2], vec![0.0]])];
        let p = LinearArx::new(a, b).unwrap();
        let h = window(&[vec![0.3, -0.2], vec![0.1, 0.4], vec![0.0, 0.0]], &[vec![0.5], vec![-1.0], vec![0.2], vec![0.0]]);
        let exact = pjm_exact(&p, &h).unwrap();
        let sec = pjm_secant(&p, &h, 1e-6).unwrap();
        for (x, s) in exact.flat().iter().zip(sec.flat()) {
            assert!((x - s).abs() < 1e-8);
        }
    }

    fn exactness_case(plant: &dyn PlantModel, y: Vec<Vec<f64>>, u: Vec<Vec<f64>>) -> f64 {
        let (ly, lu) = plant.pseudo_orders();
        let now = window(&y, &u);
        let before = now.shifted_back();
        let pjm = pjm_exact(plant, &now).unwrap();
        let reg = delta_regressor(&now, ly, lu).unwrap();
        let predicted = edlm_step(&pjm, &reg, None).unwrap();
        let truth: Vec<f64> = plant
            .eval(&now)
            .unwrap()
            .iter()
            .zip(plant.eval(&before).unwrap())
            .map(|(a, b)| a - b)
            .collect();
        predicted.iter().zip(&truth).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    }

    fn hist(m: usize, n: usize) -> impl Strategy<Value = Vec<Vec<f64>>> {
        prop::collection::vec(prop::collection::vec(-2.0f64..2.0, m), n)
    }

    proptest! {
        #[test]
        fn example1_edlm_is_exact(y in hist(1, 4), u in hist(1, 7)) {
            prop_assert!(exactness_case(&Example1, y, u) <= 1e-10);
        }

        #[test]
        fn example2_edlm_is_exact(y in hist(2, 4), u in hist(2, 6)) {
            prop_assert!(exactness_case(&SquareCubic::example2(), y, u) <= 1e-10);
        }

        #[test]
        fn example4_edlm_is_exact(y in hist(2, 4), u in hist(2, 5)) {
            prop_assert!(exactness_case(&SquareCubic::example4(), y, u) <= 1e-10);
        }
    }
}
