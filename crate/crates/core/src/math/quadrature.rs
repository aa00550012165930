//! Gaussian quadrature rules and an adaptive Gauss-Kronrod integrator.

use std::f64::consts::PI;

use crate::error::{Error, Result};

pub const MIN_HERMITE_RULE: usize = 2;
pub const MAX_HERMITE_RULE: usize = 128;

/// Nodes and weights of a quadrature rule. Nodes are strictly increasing and
/// every weight is positive.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl QuadratureRule {
    pub fn new(nodes: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        if nodes.len() != weights.len() || nodes.is_empty() {
            return Err(Error::invalid("quadrature", "node/weight length mismatch"));
        }
        if nodes.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::invalid(
                "quadrature",
                "nodes must be strictly increasing",
            ));
        }
        if weights.iter().any(|&w| !(w > 0.0)) {
            return Err(Error::invalid("quadrature", "weights must be positive"));
        }
        Ok(Self { nodes, weights })
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// `sum_i w_i f(x_i)`.
    pub fn integrate<F: FnMut(f64) -> f64>(&self, mut f: F) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }
}

/// Gauss-Hermite rule for the weight `exp(-x^2)` on the real line.
///
/// Roots are found by Newton iteration on the orthonormal Hermite recurrence,
/// which stays finite up to order 128.
pub fn gauss_hermite_rule(order: usize) -> Result<QuadratureRule> {
    if !(MIN_HERMITE_RULE..=MAX_HERMITE_RULE).contains(&order) {
        return Err(Error::UnsupportedOrder {
            order,
            min: MIN_HERMITE_RULE,
            max: MAX_HERMITE_RULE,
        });
    }
    let n = order;
    let nf = n as f64;
    let pim4 = PI.powf(-0.25);
    let half = n.div_ceil(2);
    let mut pos = vec![0.0; half];
    let mut wts = vec![0.0; half];
    let mut z = 0.0_f64;
    for i in 0..half {
        // initial guesses for the largest roots first
        z = match i {
            0 => (2.0 * nf + 1.0).sqrt() - 1.855_75 * (2.0 * nf + 1.0).powf(-1.0 / 6.0),
            1 => z - 1.14 * nf.powf(0.426) / z,
            2 => 1.86 * z - 0.86 * pos[0],
            3 => 1.91 * z - 0.91 * pos[1],
            _ => 2.0 * z - pos[i - 2],
        };
        let mut deriv = 0.0;
        let mut converged = false;
        for _ in 0..200 {
            let mut p1 = pim4;
            let mut p2 = 0.0;
            for j in 1..=n {
                let p3 = p2;
                p2 = p1;
                let jf = j as f64;
                p1 = z * (2.0 / jf).sqrt() * p2 - ((jf - 1.0) / jf).sqrt() * p3;
            }
            deriv = (2.0 * nf).sqrt() * p2;
            let step = p1 / deriv;
            z -= step;
            if step.abs() <= 1e-15 * z.abs().max(1.0) {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(Error::Quadrature {
                estimate: z,
                error: f64::NAN,
            });
        }
        pos[i] = z;
        wts[i] = 2.0 / (deriv * deriv);
    }
    let mut nodes = Vec::with_capacity(n);
    let mut weights = Vec::with_capacity(n);
    for i in 0..half {
        nodes.push(-pos[i]);
        weights.push(wts[i]);
    }
    let upper = n / 2;
    for i in (0..upper).rev() {
        nodes.push(pos[i]);
        weights.push(wts[i]);
    }
    if n % 2 == 1 {
        // middle root sits at exactly zero
        nodes[half - 1] = 0.0;
    }
    QuadratureRule::new(nodes, weights)
}

/// Gauss-Legendre rule on `[-1, 1]`.
pub fn gauss_legendre_rule(order: usize) -> Result<QuadratureRule> {
    if !(1..=512).contains(&order) {
        return Err(Error::UnsupportedOrder {
            order,
            min: 1,
            max: 512,
        });
    }
    let n = order;
    let nf = n as f64;
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let mut p1 = 1.0;
            let mut p2 = 0.0;
            for j in 1..=n {
                let p3 = p2;
                p2 = p1;
                let jf = j as f64;
                p1 = ((2.0 * jf - 1.0) * z * p2 - (jf - 1.0) * p3) / jf;
            }
            dp = nf * (z * p1 - p2) / (z * z - 1.0);
            let step = p1 / dp;
            z -= step;
            if step.abs() < 1e-16 {
                break;
            }
        }
        nodes[i] = -z;
        nodes[n - 1 - i] = z;
        let w = 2.0 / ((1.0 - z * z) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    QuadratureRule::new(nodes, weights)
}

// Gauss-Kronrod 7/15 abscissae and weights on [-1, 1] (positive half).
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_728_0,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gk15<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = half * XGK[j];
        let s = f(center - dx) + f(center + dx);
        kronrod += WGK[j] * s;
        if j % 2 == 1 {
            gauss += WG[j / 2] * s;
        }
    }
    (kronrod * half, ((kronrod - gauss) * half).abs())
}

/// Tolerances and limits for [`integrate_adaptive`].
#[derive(Debug, Clone, Copy)]
pub struct AdaptiveOptions {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_intervals: usize,
}

impl Default for AdaptiveOptions {
    fn default() -> Self {
        Self {
            rel_tol: 1e-8,
            abs_tol: 0.0,
            max_intervals: 4000,
        }
    }
}

/// Globally adaptive Gauss-Kronrod (7/15) integration of `f` over `[a, b]`.
///
/// The interval with the largest error estimate is bisected until the total
/// error satisfies `max(abs_tol, rel_tol * |I|)`.
pub fn integrate_adaptive<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    opts: AdaptiveOptions,
) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    let (v, e) = gk15(&mut f, a, b);
    let mut intervals = vec![(a, b, v, e)];
    let mut total = v;
    let mut err = e;
    loop {
        if !total.is_finite() {
            return Err(Error::Quadrature {
                estimate: total,
                error: err,
            });
        }
        if err <= opts.abs_tol.max(opts.rel_tol * total.abs()) {
            return Ok(total);
        }
        if intervals.len() >= opts.max_intervals {
            return Err(Error::Quadrature {
                estimate: total,
                error: err,
            });
        }
        let (idx, _) = intervals
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .3.total_cmp(&y.1 .3))
            .expect("non-empty");
        let (lo, hi, v0, e0) = intervals.swap_remove(idx);
        let mid = 0.5 * (lo + hi);
        let (v1, e1) = gk15(&mut f, lo, mid);
        let (v2, e2) = gk15(&mut f, mid, hi);
        total += v1 + v2 - v0;
        err += e1 + e2 - e0;
        intervals.push((lo, mid, v1, e1));
        intervals.push((mid, hi, v2, e2));
        // refresh the running sums now and then to limit drift
        if intervals.len() % 64 == 0 {
            total = intervals.iter().map(|iv| iv.2).sum();
            err = intervals.iter().map(|iv| iv.3).sum();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_point_rule() {
        let rule = gauss_hermite_rule(2).unwrap();
        let s = 1.0 / 2f64.sqrt();
        assert!((rule.nodes()[0] + s).abs() < 1e-15);
        assert!((rule.nodes()[1] - s).abs() < 1e-15);
        for &w in rule.weights() {
            assert!((w - PI.sqrt() / 2.0).abs() < 1e-15);
        }
    }

    #[test]
    fn zeroth_moment_all_orders() {
        for order in [2, 3, 7, 16, 40, 64, 99, 128] {
            let rule = gauss_hermite_rule(order).unwrap();
            let sum: f64 = rule.weights().iter().sum();
            assert!((sum - PI.sqrt()).abs() < 1e-12, "order {order}: {sum}");
        }
    }

    #[test]
    fn fourth_moment_order_40() {
        let rule = gauss_hermite_rule(40).unwrap();
        let m4 = rule.integrate(|x| x.powi(4));
        assert!((m4 - 3.0 * PI.sqrt() / 4.0).abs() < 1e-12);
    }

    #[test]
    fn symmetric_nodes() {
        let rule = gauss_hermite_rule(33).unwrap();
        let n = rule.len();
        for i in 0..n {
            assert!((rule.nodes()[i] + rule.nodes()[n - 1 - i]).abs() < 1e-13);
            assert!((rule.weights()[i] - rule.weights()[n - 1 - i]).abs() < 1e-15);
        }
        assert_eq!(rule.nodes()[n / 2], 0.0);
    }

    #[test]
    fn order_out_of_range() {
        assert!(gauss_hermite_rule(1).is_err());
        assert!(gauss_hermite_rule(129).is_err());
    }

    #[test]
    fn legendre_polynomial_exactness() {
        let rule = gauss_legendre_rule(6).unwrap();
        // integral of x^10 on [-1,1] = 2/11
        assert!((rule.integrate(|x| x.powi(10)) - 2.0 / 11.0).abs() < 1e-14);
    }

    #[test]
    fn adaptive_handles_endpoint_singularity() {
        // integral_0^1 x^{-2/3} dx = 3
        let v = integrate_adaptive(
            |x| x.powf(-2.0 / 3.0),
            0.0,
            1.0,
            AdaptiveOptions {
                rel_tol: 1e-9,
                ..Default::default()
            },
        )
        .unwrap();
        assert!((v - 3.0).abs() < 1e-7, "{v}");
    }

    #[test]
    fn adaptive_reports_non_convergence() {
        let opts = AdaptiveOptions {
            rel_tol: 1e-14,
            abs_tol: 0.0,
            max_intervals: 4,
        };
        let r = integrate_adaptive(|x| (1.0 / x).sin(), 1e-6, 1.0, opts);
        assert!(matches!(r, Err(Error::Quadrature { .. })));
    }
}
