/// Paired explicit / diagonally implicit Butcher tableaux of a three-stage
/// additive Runge-Kutta method with shared weights and nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct ButcherTableaux {
    pub a: [[f64; 3]; 3],
    pub a_tilde: [[f64; 3]; 3],
    pub b: [f64; 3],
    pub c: [f64; 3],
}

impl ButcherTableaux {
    /// Second-order IMEX pair whose implicit part is TR-BDF2.
    pub fn ark2() -> Self {
        let sqrt2 = std::f64::consts::SQRT_2;
        let gamma = 1.0 - 1.0 / sqrt2;
        let delta = 1.0 / (2.0 * sqrt2);
        let alpha = (3.0 + 2.0 * sqrt2) / 6.0;
        let c2 = 2.0 - sqrt2;
        Self {
            a: [[0.0; 3], [c2, 0.0, 0.0], [1.0 - alpha, alpha, 0.0]],
            a_tilde: [[0.0; 3], [gamma, gamma, 0.0], [delta, delta, gamma]],
            b: [delta, delta, gamma],
            c: [0.0, c2, 1.0],
        }
    }

    /// Largest deviation from the row-sum, weight-sum and second-order
    /// conditions.
    pub fn consistency_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for l in 0..3 {
            let ra: f64 = self.a[l].iter().sum();
            let rt: f64 = self.a_tilde[l].iter().sum();
            worst = worst.max((ra - self.c[l]).abs()).max((rt - self.c[l]).abs());
        }
        let sb: f64 = self.b.iter().sum();
        let sbc: f64 = self.b.iter().zip(&self.c).map(|(b, c)| b * c).sum();
        worst.max((sb - 1.0).abs()).max((sbc - 0.5).abs())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ark2_is_consistent() {
        let t = ButcherTableaux::ark2();
        assert!(t.consistency_defect() < 1e-14);
        let gamma = 1.0 - 1.0 / std::f64::consts::SQRT_2;
        assert!((t.a_tilde[1][1] - gamma).abs() < 1e-15);
        assert!((t.a_tilde[2][2] - gamma).abs() < 1e-15);
        assert!((t.b[2] - 0.29289321881345254).abs() < 1e-15);
    }
}
