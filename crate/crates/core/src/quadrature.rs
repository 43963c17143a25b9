//! Composite Gauss-Legendre rules on intervals and on squares split along
//! the diagonal.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(order: usize) -> Result<Self> {
        if order == 0 {
            return Err(Error::InvalidParameter("quadrature order must be positive".into()));
        }
        let mut nodes = vec![0.0; order];
        let mut weights = vec![0.0; order];
        let nf = order as f64;
        // roots are symmetric; compute the upper half by Newton's method
        for i in 0..order.div_ceil(2) {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(order, x);
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, dp) = legendre_with_derivative(order, x);
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = x;
            weights[i] = w;
            nodes[order - 1 - i] = -x;
            weights[order - 1 - i] = w;
        }
        if order % 2 == 1 {
            nodes[order / 2] = 0.0;
        }
        // ascending order
        nodes.reverse();
        weights.reverse();
        Ok(Self { nodes, weights })
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Nodes and weights mapped to `[a, b]`.
    pub fn mapped(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let (mid, half) = (0.5 * (a + b), 0.5 * (b - a));
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(move |(x, w)| (mid + half * x, half * w))
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Composite rule on `[a, b]` with equal panels.
#[derive(Debug, Clone, PartialEq)]
pub struct CompositeRule {
    pub points: Vec<f64>,
    pub weights: Vec<f64>,
}

impl CompositeRule {
    pub fn new(a: f64, b: f64, panels: usize, order: usize) -> Result<Self> {
        if panels == 0 {
            return Err(Error::InvalidParameter("panel count must be positive".into()));
        }
        let gl = GaussLegendre::new(order)?;
        let h = (b - a) / panels as f64;
        let mut points = Vec::with_capacity(panels * order);
        let mut weights = Vec::with_capacity(panels * order);
        for p in 0..panels {
            let lo = a + p as f64 * h;
            for (x, w) in gl.mapped(lo, lo + h) {
                points.push(x);
                weights.push(w);
            }
        }
        Ok(Self { points, weights })
    }

    pub fn integrate<F: Fn(f64) -> Complex64>(&self, f: F) -> Complex64 {
        self.points
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| f(x) * w)
            .sum()
    }

    pub fn integrate_real<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        self.points.iter().zip(&self.weights).map(|(&x, &w)| f(x) * w).sum()
    }
}

/// Rule on the square `[a, b]^2` for integrands that are smooth on each side
/// of the diagonal `x = y` but may jump across it.
///
/// Off-diagonal panel cells use tensor Gauss-Legendre; each diagonal cell is
/// split into its two triangles, each collapsed onto the unit square.
#[derive(Debug, Clone, PartialEq)]
pub struct SplitSquareRule {
    xs: Vec<f64>,
    ys: Vec<f64>,
    points: Vec<(u32, u32, f64)>,
}

impl SplitSquareRule {
    pub fn new(a: f64, b: f64, panels: usize, order: usize) -> Result<Self> {
        let line = CompositeRule::new(a, b, panels, order)?;
        let gl = GaussLegendre::new(order)?;
        let h = (b - a) / panels as f64;
        let q = order;

        // shared tensor nodes come first in both coordinate tables
        let mut xs = line.points.clone();
        let mut ys = line.points.clone();
        let mut points = Vec::with_capacity((panels * q).pow(2));
        for px in 0..panels {
            for py in 0..panels {
                if px == py {
                    continue;
                }
                for i in 0..q {
                    for j in 0..q {
                        let (ix, iy) = (px * q + i, py * q + j);
                        points.push((ix as u32, iy as u32, line.weights[ix] * line.weights[iy]));
                    }
                }
            }
        }

        let unit: Vec<(f64, f64)> = gl.mapped(0.0, 1.0).collect();
        for p in 0..panels {
            let lo = a + p as f64 * h;
            for &(u, wu) in &unit {
                for &(v, wv) in &unit {
                    let near = lo + h * u;
                    let far = lo + h * u * v;
                    let w = h * h * u * wu * wv;
                    // triangle below the diagonal (y < x) and above it (y > x)
                    for (x, y) in [(near, far), (far, near)] {
                        xs.push(x);
                        ys.push(y);
                        points.push(((xs.len() - 1) as u32, (ys.len() - 1) as u32, w));
                    }
                }
            }
        }
        Ok(Self { xs, ys, points })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Distinct first coordinates referenced by the rule.
    pub fn xs(&self) -> &[f64] {
        &self.xs
    }

    pub fn ys(&self) -> &[f64] {
        &self.ys
    }

    pub fn integrate<F: Fn(f64, f64) -> Complex64>(&self, f: F) -> Complex64 {
        self.points
            .iter()
            .map(|&(i, j, w)| f(self.xs[i as usize], self.ys[j as usize]) * w)
            .sum()
    }

    /// Kernel values at every quadrature point, for reuse with [`Self::bilinear`].
    pub fn tabulate<K: Fn(f64, f64) -> Complex64>(&self, kernel: K) -> Vec<Complex64> {
        self.points
            .iter()
            .map(|&(i, j, _)| kernel(self.xs[i as usize], self.ys[j as usize]))
            .collect()
    }

    /// `sum w u(x) k(x, y) v(y)` with `u` tabulated on [`Self::xs`], `v` on
    /// [`Self::ys`] and `k` from [`Self::tabulate`].
    pub fn bilinear(&self, kernel: &[Complex64], u: &[Complex64], v: &[Complex64]) -> Complex64 {
        self.points
            .iter()
            .zip(kernel)
            .map(|(&(i, j, w), k)| u[i as usize] * k * v[j as usize] * w)
            .sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn exact_for_polynomials_up_to_degree_2n_minus_1() {
        for order in 1..=12 {
            let gl = GaussLegendre::new(order).unwrap();
            for deg in 0..(2 * order) {
                let approx: f64 = gl
                    .nodes()
                    .iter()
                    .zip(gl.weights())
                    .map(|(x, w)| w * x.powi(deg as i32))
                    .sum();
                let exact = if deg % 2 == 1 { 0.0 } else { 2.0 / (deg as f64 + 1.0) };
                assert_abs_diff_eq!(approx, exact, epsilon = 1e-13);
            }
        }
    }

    #[test]
    fn high_order_nodes_are_sorted_and_weights_positive() {
        let gl = GaussLegendre::new(64).unwrap();
        assert!(gl.nodes().windows(2).all(|w| w[0] < w[1]));
        assert!(gl.weights().iter().all(|&w| w > 0.0));
        assert_abs_diff_eq!(gl.weights().iter().sum::<f64>(), 2.0, epsilon = 1e-13);
    }

    #[test]
    fn composite_rule_integrates_oscillatory_function() {
        let rule = CompositeRule::new(0.0, std::f64::consts::PI, 4, 32).unwrap();
        let v = rule.integrate_real(|x| (40.0 * x).cos().powi(2));
        assert_abs_diff_eq!(v, std::f64::consts::PI / 2.0, epsilon = 1e-13);
    }

    #[test]
    fn split_square_handles_sign_jump() {
        let rule = SplitSquareRule::new(-1.0, 1.0, 3, 16).unwrap();
        // area of the square and of one triangle
        let area = rule.integrate(|_, _| Complex64::new(1.0, 0.0));
        assert_abs_diff_eq!(area.re, 4.0, epsilon = 1e-13);
        let upper = rule.integrate(|x, y| Complex64::new(if y > x { 1.0 } else { 0.0 }, 0.0));
        assert_abs_diff_eq!(upper.re, 2.0, epsilon = 1e-13);
        // int int |x - y| over [-1, 1]^2 = 8/3
        let v = rule.integrate(|x, y| Complex64::new((x - y).abs(), 0.0));
        assert_abs_diff_eq!(v.re, 8.0 / 3.0, epsilon = 1e-13);
    }

    #[test]
    fn bilinear_matches_direct_integration() {
        let rule = SplitSquareRule::new(0.0, 1.0, 2, 8).unwrap();
        let k = |x: f64, y: f64| Complex64::new((y - x).signum(), x * y);
        let kern = rule.tabulate(k);
        let u: Vec<Complex64> = rule.xs().iter().map(|&x| Complex64::new(x, 1.0)).collect();
        let v: Vec<Complex64> = rule.ys().iter().map(|&y| Complex64::new(1.0, -y)).collect();
        let a = rule.bilinear(&kern, &u, &v);
        let b = rule.integrate(|x, y| Complex64::new(x, 1.0) * k(x, y) * Complex64::new(1.0, -y));
        assert_abs_diff_eq!((a - b).norm(), 0.0, epsilon = 1e-14);
    }
}
