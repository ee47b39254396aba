//! Shape-preserving (monotone) piecewise-cubic Hermite interpolation on a uniform grid.

/// Piecewise-cubic interpolant with Fritsch–Carlson limited slopes.
#[derive(Debug, Clone)]
pub struct MonotoneCubic {
    x0: f64,
    step: f64,
    values: Vec<f64>,
    slopes: Vec<f64>,
}

impl MonotoneCubic {
    /// Builds the interpolant through `values` sampled at `x0 + i * step`.
    pub fn uniform(x0: f64, step: f64, values: Vec<f64>) -> Self {
        let n = values.len();
        assert!(n >= 2, "need at least two nodes");
        assert!(step > 0.0);
        let secants: Vec<f64> = values.windows(2).map(|w| (w[1] - w[0]) / step).collect();
        let mut slopes = vec![0.0; n];
        slopes[0] = secants[0];
        slopes[n - 1] = secants[n - 2];
        for i in 1..n - 1 {
            let (d0, d1) = (secants[i - 1], secants[i]);
            slopes[i] = if d0 * d1 <= 0.0 {
                0.0
            } else {
                // Uniform-grid weighted harmonic mean.
                2.0 * d0 * d1 / (d0 + d1)
            };
        }
        // Endpoint slopes: one-sided three-point estimates, limited to preserve shape.
        if n >= 3 {
            let edge = |d0: f64, d1: f64| {
                let s = (3.0 * d0 - d1) / 2.0;
                if s * d0 <= 0.0 {
                    0.0
                } else if d0 * d1 <= 0.0 && s.abs() > 3.0 * d0.abs() {
                    3.0 * d0
                } else {
                    s
                }
            };
            slopes[0] = edge(secants[0], secants[1]);
            slopes[n - 1] = edge(secants[n - 2], secants[n - 3]);
        }
        MonotoneCubic {
            x0,
            step,
            values,
            slopes,
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn x_min(&self) -> f64 {
        self.x0
    }

    pub fn x_max(&self) -> f64 {
        self.x0 + self.step * (self.values.len() - 1) as f64
    }

    pub fn node(&self, i: usize) -> f64 {
        self.x0 + self.step * i as f64
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    /// Power-basis coefficients `[c0, c1, c2, c3]` of cell `i` in the local variable
    /// `t = x - node(i)`, `t ∈ [0, step]`.
    pub fn cell_polynomial(&self, i: usize) -> [f64; 4] {
        let h = self.step;
        let (y0, y1) = (self.values[i], self.values[i + 1]);
        let (m0, m1) = (self.slopes[i] * h, self.slopes[i + 1] * h);
        [
            y0,
            self.slopes[i],
            (-3.0 * y0 - 2.0 * m0 + 3.0 * y1 - m1) / (h * h),
            (2.0 * y0 + m0 - 2.0 * y1 + m1) / (h * h * h),
        ]
    }

    fn locate(&self, x: f64) -> Option<(usize, f64)> {
        if !(x >= self.x_min() && x <= self.x_max()) {
            return None;
        }
        let n = self.values.len();
        let u = (x - self.x0) / self.step;
        let i = (u.floor() as usize).min(n - 2);
        Some((i, u - i as f64))
    }

    /// Value; zero outside the node range.
    pub fn value(&self, x: f64) -> f64 {
        let Some((i, t)) = self.locate(x) else {
            return 0.0;
        };
        let (y0, y1) = (self.values[i], self.values[i + 1]);
        let (m0, m1) = (self.slopes[i] * self.step, self.slopes[i + 1] * self.step);
        let t2 = t * t;
        let t3 = t2 * t;
        (2.0 * t3 - 3.0 * t2 + 1.0) * y0
            + (t3 - 2.0 * t2 + t) * m0
            + (-2.0 * t3 + 3.0 * t2) * y1
            + (t3 - t2) * m1
    }

    /// First derivative; zero outside the node range.
    pub fn derivative(&self, x: f64) -> f64 {
        let Some((i, t)) = self.locate(x) else {
            return 0.0;
        };
        let (y0, y1) = (self.values[i], self.values[i + 1]);
        let (m0, m1) = (self.slopes[i] * self.step, self.slopes[i + 1] * self.step);
        let t2 = t * t;
        ((6.0 * t2 - 6.0 * t) * y0
            + (3.0 * t2 - 4.0 * t + 1.0) * m0
            + (-6.0 * t2 + 6.0 * t) * y1
            + (3.0 * t2 - 2.0 * t) * m1)
            / self.step
    }

    /// Exact integral of the interpolant over its full range.
    pub fn integral(&self) -> f64 {
        // Each Hermite cell integrates to h (y0 + y1)/2 + h^2 (m0 - m1)/12.
        let h = self.step;
        let cells: Vec<f64> = (0..self.values.len() - 1)
            .map(|i| {
                h * 0.5 * (self.values[i] + self.values[i + 1])
                    + h * h * (self.slopes[i] - self.slopes[i + 1]) / 12.0
            })
            .collect();
        crate::quadrature::pairwise_sum(&cells)
    }
}
