use std::f64::consts::PI;

/// Continuous piecewise-linear approximation of sin or cos on [−π, π]:
/// 5 segments with breakpoints, per-segment slope g and intercept h.
/// Segments are half-open `[φ_l, φ_{l+1})` except the last, which is closed.
#[derive(Debug, Clone, PartialEq)]
pub struct TrigApprox {
    pub breaks: Vec<f64>,
    pub slope: Vec<f64>,
    pub intercept: Vec<f64>,
}

impl TrigApprox {
    pub fn sin_approx() -> Self {
        Self {
            breaks: vec![-PI, 1.0 - PI, -1.0, 1.0, PI - 1.0, PI],
            slope: vec![-1.0, 0.0, 1.0, 0.0, -1.0],
            intercept: vec![-PI, -1.0, 0.0, 1.0, PI],
        }
    }

    pub fn cos_approx() -> Self {
        Self {
            breaks: vec![-PI, -PI / 2.0 - 1.0, 1.0 - PI / 2.0, PI / 2.0 - 1.0, PI / 2.0 + 1.0, PI],
            slope: vec![0.0, 1.0, 0.0, -1.0, 0.0],
            intercept: vec![-1.0, PI / 2.0, 1.0, PI / 2.0, -1.0],
        }
    }

    pub fn segments(&self) -> usize {
        self.slope.len()
    }

    /// Segment index containing θ (θ must lie in [−π, π]).
    pub fn segment_of(&self, theta: f64) -> usize {
        assert!((-PI..=PI).contains(&theta), "θ = {theta} outside [−π, π]");
        for l in 0..self.segments() - 1 {
            if theta < self.breaks[l + 1] {
                return l;
            }
        }
        self.segments() - 1
    }

    pub fn eval(&self, theta: f64) -> f64 {
        let l = self.segment_of(theta);
        self.slope[l] * theta + self.intercept[l]
    }

    /// Value of segment `l`'s affine function (ignoring the interval).
    pub fn segment_value(&self, l: usize, theta: f64) -> f64 {
        self.slope[l] * theta + self.intercept[l]
    }

    /// Mismatch between adjoining segments at each interior breakpoint;
    /// exactly zero by construction.
    pub fn continuity_gaps(&self) -> Vec<f64> {
        (1..self.segments())
            .map(|l| {
                let phi = self.breaks[l];
                (self.segment_value(l - 1, phi) - self.segment_value(l, phi)).abs()
            })
            .collect()
    }
}
