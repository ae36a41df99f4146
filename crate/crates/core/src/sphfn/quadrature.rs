use super::SpherePoint;
use crate::error::domain;
use crate::{Real, Result};

/// Number of Gauss–Legendre nodes that integrates a product of `k` Legendre
/// polynomials of degree `ℓ` exactly, plus a margin of two.
pub fn quadrature_order(k: usize, ell: usize) -> usize {
    (k * ell + 1).div_ceil(2) + 2
}

/// An `n`-point Gauss–Legendre rule on `[-1, 1]`, exact for polynomials of
/// degree `≤ 2n - 1`. Nodes are ascending.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule<T> {
    pub nodes: Vec<T>,
    pub weights: Vec<T>,
}

impl<T: Real> QuadratureRule<T> {
    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    /// `Σ_i w_i f(t_i)`.
    pub fn integrate(&self, mut f: impl FnMut(T) -> T) -> T {
        let mut acc = T::zero();
        let mut comp = T::zero();
        for (&t, &w) in self.nodes.iter().zip(&self.weights) {
            let y = w * f(t) - comp;
            let s = acc + y;
            comp = (s - acc) - y;
            acc = s;
        }
        acc
    }
}

/// `P_n(t)` and `P_n'(t)` for `|t| < 1`.
#[inline]
fn legendre_and_derivative<T: Real>(n: usize, t: T) -> (T, T) {
    let (mut p0, mut p1) = (T::one(), t);
    for k in 1..n {
        let kf = T::from_usize_lossy(k);
        let p2 = ((kf + kf + T::one()) * t * p1 - kf * p0) / (kf + T::one());
        p0 = p1;
        p1 = p2;
    }
    let nf = T::from_usize_lossy(n);
    (p1, nf * (t * p1 - p0) / (t * t - T::one()))
}

/// Gauss–Legendre nodes and weights by Newton iteration from Tricomi's
/// asymptotic initial guesses, computing one half of the nodes and reflecting.
pub fn gauss_legendre_rule<T: Real>(n: usize) -> Result<QuadratureRule<T>> {
    if n == 0 {
        return Err(domain!("quadrature order must be positive"));
    }
    super::check_degree(n / 2)?;
    let nf = T::from_usize_lossy(n);
    let mut nodes = vec![T::zero(); n];
    let mut weights = vec![T::zero(); n];
    let two = T::lit(2.0);
    let eps = T::epsilon();
    let correction = T::one() - (T::one() - T::one() / nf) / (T::lit(8.0) * nf * nf);
    for i in 0..n.div_ceil(2) {
        // i-th largest root
        let theta = T::PI() * (T::from_usize_lossy(4 * i + 3)) / (T::lit(4.0) * nf + two);
        let mut x = correction * theta.cos();
        let mut dp = T::one();
        for _ in 0..100 {
            let (p, d) = legendre_and_derivative(n, x);
            dp = d;
            let dx = p / d;
            x = x - dx;
            if dx.abs() <= eps * (T::one() + x.abs()) {
                let (_, d) = legendre_and_derivative(n, x);
                dp = d;
                break;
            }
        }
        if n % 2 == 1 && i == n / 2 {
            x = T::zero();
            dp = legendre_and_derivative(n, x).1;
        }
        let w = two / ((T::one() - x * x) * dp * dp);
        nodes[n - 1 - i] = x;
        weights[n - 1 - i] = w;
        nodes[i] = -x;
        weights[i] = w;
    }
    Ok(QuadratureRule { nodes, weights })
}

/// Product rule on `S²`: Gauss–Legendre in `cos θ` times the uniform
/// trapezoid rule in `φ`. With `n` polar nodes and `2n` azimuths it integrates
/// spherical polynomials of degree `≤ 2n - 1` exactly. Weights sum to `4π`.
#[derive(Debug, Clone)]
pub struct SphereQuadrature {
    rule: QuadratureRule<f64>,
    n_phi: usize,
}

impl SphereQuadrature {
    pub fn new(n: usize) -> Result<Self> {
        Ok(Self { rule: gauss_legendre_rule(n)?, n_phi: 2 * n })
    }

    pub fn len(&self) -> usize {
        self.rule.order() * self.n_phi
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `(point, weight)` pairs.
    pub fn nodes(&self) -> impl Iterator<Item = (SpherePoint<f64>, f64)> + '_ {
        let dphi = 2.0 * std::f64::consts::PI / self.n_phi as f64;
        self.rule.nodes.iter().zip(&self.rule.weights).flat_map(move |(&z, &w)| {
            let s = ((1.0 - z) * (1.0 + z)).sqrt();
            (0..self.n_phi).map(move |j| {
                let (sp, cp) = (j as f64 * dphi).sin_cos();
                let p = SpherePoint::from_vector(s * cp, s * sp, z).expect("unit vector");
                (p, w * dphi)
            })
        })
    }

    pub fn integrate(&self, mut f: impl FnMut(&SpherePoint<f64>) -> f64) -> f64 {
        self.nodes().map(|(p, w)| w * f(&p)).collect::<crate::NeumaierSum>().value()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights_sum_to_two_and_nodes_are_symmetric() {
        for n in [1, 2, 5, 64, 201, 2000] {
            let r = gauss_legendre_rule::<f64>(n).unwrap();
            let s: f64 = crate::neumaier(r.weights.iter().copied());
            assert!((s - 2.0).abs() < 1e-13, "n={n} sum={s}");
            for i in 0..n {
                assert_eq!(r.nodes[i], -r.nodes[n - 1 - i]);
            }
            assert!(r.nodes.windows(2).all(|w| w[0] < w[1]));
        }
    }

    #[test]
    fn exact_for_monomials() {
        let r = gauss_legendre_rule::<f64>(7).unwrap();
        for k in 0..=13 {
            let got = r.integrate(|t| t.powi(k));
            let want = if k % 2 == 1 { 0.0 } else { 2.0 / (k as f64 + 1.0) };
            assert!((got - want).abs() < 1e-14, "k={k}");
        }
    }

    #[test]
    fn known_three_point_rule() {
        let r = gauss_legendre_rule::<f64>(3).unwrap();
        assert!((r.nodes[2] - (0.6_f64).sqrt()).abs() < 1e-15);
        assert!((r.weights[1] - 8.0 / 9.0).abs() < 1e-15);
    }

    #[test]
    fn single_precision_rule() {
        let r = gauss_legendre_rule::<f32>(10).unwrap();
        let s: f32 = r.weights.iter().sum();
        assert!((s - 2.0).abs() < 1e-5);
    }

    #[test]
    fn sphere_rule_area() {
        let q = SphereQuadrature::new(8).unwrap();
        assert!((q.integrate(|_| 1.0) - 4.0 * std::f64::consts::PI).abs() < 1e-13);
    }
}
