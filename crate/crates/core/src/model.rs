//! Poisson point process realizations and the random wave built on them.

use crate::error::domain;
use crate::mc::rng::{poisson, stream, uniform_sphere};
use crate::sphfn::{legendre, legendre_sum, sph_harm_row, SphereQuadrature};
use crate::{Error, NeumaierSum, Point, Result};
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::io::{BufRead, Write};

/// Largest expected point count `4πν` accepted by the samplers.
pub const MAX_EXPECTED_POINTS: f64 = 1e9;

/// One draw of a homogeneous Poisson process on `S²` with intensity `ν`
/// times surface measure.
#[derive(Debug, Clone, PartialEq)]
pub struct Realization {
    rate: f64,
    seed: u64,
    points: Vec<Point>,
}

fn check_rate(rate: f64) -> Result<()> {
    if !(rate.is_finite() && rate > 0.0) {
        return Err(domain!("rate must be positive and finite, got {rate}"));
    }
    if 4.0 * PI * rate > MAX_EXPECTED_POINTS {
        return Err(Error::Capacity(format!("rate {rate} exceeds the sampler limit")));
    }
    Ok(())
}

impl Realization {
    /// Deterministic in `(rate, seed)`: draws from stream 0 of `seed`.
    pub fn sample(rate: f64, seed: u64) -> Result<Self> {
        Self::sample_with(rate, seed, &mut stream(seed, 0))
    }

    /// Draws from a caller-supplied generator; `seed` is recorded only.
    pub fn sample_with<R: Rng + ?Sized>(rate: f64, seed: u64, rng: &mut R) -> Result<Self> {
        check_rate(rate)?;
        let n = poisson(4.0 * PI * rate, rng) as usize;
        let points = (0..n).map(|_| uniform_sphere(rng)).collect();
        Ok(Self { rate, seed, points })
    }

    pub fn from_points(rate: f64, seed: u64, points: Vec<Point>) -> Result<Self> {
        if !(rate.is_finite() && rate > 0.0) {
            return Err(domain!("rate must be positive and finite, got {rate}"));
        }
        Ok(Self { rate, seed, points })
    }

    pub fn rate(&self) -> f64 {
        self.rate
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

fn check_stochastic_degree(ell: usize) -> Result<()> {
    if ell == 0 {
        // P_0 = 1 integrates to 4π, so the ℓ = 0 field is not centred.
        return Err(domain!("degree 0 gives a non-centred field"));
    }
    crate::sphfn::check_degree(ell)
}

/// `T(x) = √((2ℓ+1)/(4πν)) Σ_k P_ℓ(⟨x, ξ_k⟩)`, for `ℓ ≥ 1`.
pub fn field_value(r: &Realization, ell: usize, x: &Point) -> Result<f64> {
    check_stochastic_degree(ell)?;
    let dots: Vec<f64> = r.points.iter().map(|p| p.dot(x)).collect();
    Ok(((2 * ell + 1) as f64 / (4.0 * PI * r.rate)).sqrt() * legendre_sum(ell, &dots))
}

/// The `2ℓ+1` empirical coefficients of one realization, indexed `m + ℓ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HarmonicVector {
    pub ell: usize,
    pub coefficients: Vec<f64>,
}

impl HarmonicVector {
    pub fn get(&self, m: i64) -> f64 {
        self.coefficients[(m + self.ell as i64) as usize]
    }

    /// `Σ_m â_{ℓm}²`, which equals `‖T‖²` by Parseval.
    pub fn norm_squared(&self) -> f64 {
        crate::neumaier(self.coefficients.iter().map(|a| a * a))
    }

    /// `Σ_m â_{ℓm} Y_{ℓm}(x)`.
    pub fn synthesize(&self, x: &Point) -> Result<f64> {
        let y = sph_harm_row(self.ell, x)?;
        Ok(crate::neumaier(self.coefficients.iter().zip(&y).map(|(a, y)| a * y)))
    }
}

/// `â_{ℓm} = √(4π/((2ℓ+1)ν)) Σ_k Y_{ℓm}(ξ_k)` for `m = -ℓ..=ℓ`.
pub fn harmonic_coefficients(r: &Realization, ell: usize) -> Result<HarmonicVector> {
    check_stochastic_degree(ell)?;
    let mut acc = vec![NeumaierSum::new(); 2 * ell + 1];
    for p in &r.points {
        for (a, y) in acc.iter_mut().zip(sph_harm_row(ell, p)?) {
            a.add(y);
        }
    }
    let c = (4.0 * PI / ((2 * ell + 1) as f64 * r.rate)).sqrt();
    Ok(HarmonicVector { ell, coefficients: acc.into_iter().map(|a| c * a.value()).collect() })
}

/// Field values at `d` points together with their covariance
/// `Γ_{ij} = P_ℓ(⟨x_i, x_j⟩)` (row-major).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FiniteDimVector {
    pub values: Vec<f64>,
    pub gamma: Vec<f64>,
}

/// `Γ_{ij} = P_ℓ(⟨x_i, x_j⟩)`, row-major.
pub fn fdd_covariance(ell: usize, points: &[Point]) -> Result<Vec<f64>> {
    let d = points.len();
    let mut g = vec![0.0; d * d];
    for i in 0..d {
        for j in 0..d {
            g[i * d + j] = if i == j { 1.0 } else { legendre(ell, points[i].dot(&points[j]))? };
        }
    }
    Ok(g)
}

/// Field values at a nonempty set of pairwise distinct points.
pub fn finite_dim_eval(r: &Realization, ell: usize, points: &[Point]) -> Result<FiniteDimVector> {
    if points.is_empty() {
        return Err(domain!("at least one evaluation point is required"));
    }
    check_distinct(points)?;
    let values = points.iter().map(|x| field_value(r, ell, x)).collect::<Result<_>>()?;
    Ok(FiniteDimVector { values, gamma: fdd_covariance(ell, points)? })
}

pub(crate) fn check_distinct(points: &[Point]) -> Result<()> {
    for (i, a) in points.iter().enumerate() {
        for b in &points[..i] {
            let d: f64 = a.xyz().iter().zip(b.xyz()).map(|(u, v)| (u - v).powi(2)).sum();
            if d.sqrt() < 1e-12 {
                return Err(domain!("evaluation points must be pairwise distinct"));
            }
        }
    }
    Ok(())
}

/// The two sides of `‖T‖²_{L²(S²)} = Σ_m â_{ℓm}²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParsevalCheck {
    pub quadrature: f64,
    pub coefficients: f64,
    pub relative_difference: f64,
}

/// Compares `∫ T²` by product quadrature with `quad_order ≥ 2ℓ+2` polar
/// nodes against the coefficient sum of squares.
pub fn parseval_check(r: &Realization, ell: usize, quad_order: usize) -> Result<ParsevalCheck> {
    if quad_order < 2 * ell + 2 {
        return Err(domain!("quadrature order {quad_order} below 2ℓ+2 = {}", 2 * ell + 2));
    }
    let q = SphereQuadrature::new(quad_order)?;
    let mut err = None;
    let quadrature = q.integrate(|x| match field_value(r, ell, x) {
        Ok(v) => v * v,
        Err(e) => {
            err = Some(e);
            0.0
        }
    });
    if let Some(e) = err {
        return Err(e);
    }
    let coefficients = harmonic_coefficients(r, ell)?.norm_squared();
    let scale = quadrature.abs().max(coefficients.abs()).max(f64::MIN_POSITIVE);
    Ok(ParsevalCheck {
        quadrature,
        coefficients,
        relative_difference: (quadrature - coefficients).abs() / scale,
    })
}

#[derive(Serialize, Deserialize)]
struct Header {
    rate: f64,
    seed: u64,
    count: usize,
}

/// Text format: a JSON header line `{"rate":…,"seed":…,"count":…}` followed
/// by one `x y z` line per point. Floats use shortest round-trip notation,
/// so reading back reproduces the realization bit for bit.
pub fn write_realization<W: Write>(r: &Realization, mut w: W) -> Result<()> {
    let header = Header { rate: r.rate, seed: r.seed, count: r.points.len() };
    serde_json::to_writer(&mut w, &header).map_err(|e| Error::Parse(e.to_string()))?;
    writeln!(w)?;
    for p in &r.points {
        let [x, y, z] = p.xyz();
        writeln!(w, "{x} {y} {z}")?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_realization<R: BufRead>(reader: R) -> Result<Realization> {
    let mut lines = reader.lines();
    let head = lines.next().ok_or_else(|| Error::Parse("empty realization file".into()))??;
    let header: Header =
        serde_json::from_str(&head).map_err(|e| Error::Parse(format!("bad header: {e}")))?;
    let mut points = Vec::with_capacity(header.count);
    for (i, line) in lines.enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let coords: Vec<f64> = line
            .split_whitespace()
            .map(str::parse)
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::Parse(format!("line {}: {e}", i + 2)))?;
        let [x, y, z] = coords[..] else {
            return Err(Error::Parse(format!("line {}: expected three coordinates", i + 2)));
        };
        points.push(Point::from_unit_vector(x, y, z).map_err(|e| Error::Parse(format!("line {}: {e}", i + 2)))?);
    }
    if points.len() != header.count {
        return Err(Error::Parse(format!("header promises {} points, found {}", header.count, points.len())));
    }
    Realization::from_points(header.rate, header.seed, points)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sampling_is_deterministic() {
        let a = Realization::sample(3.0, 42).unwrap();
        let b = Realization::sample(3.0, 42).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, Realization::sample(3.0, 43).unwrap());
        assert!(Realization::sample(0.0, 1).is_err());
        assert!(Realization::sample(f64::NAN, 1).is_err());
    }

    #[test]
    fn field_equals_harmonic_synthesis() {
        // Addition theorem: T(x) = Σ_m â_m Y_m(x).
        let r = Realization::sample(2.0, 5).unwrap();
        let ell = 7;
        let a = harmonic_coefficients(&r, ell).unwrap();
        let x = Point::from_angles(0.9, 5.1).unwrap();
        assert!((a.synthesize(&x).unwrap() - field_value(&r, ell, &x).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn degree_zero_rejected_and_empty_sums_vanish() {
        let r = Realization::sample(1.0, 1).unwrap();
        assert!(field_value(&r, 0, &Point::north_pole()).is_err());
        assert!(harmonic_coefficients(&r, 0).is_err());
        let empty = Realization::from_points(1.0, 0, vec![]).unwrap();
        assert_eq!(field_value(&empty, 4, &Point::north_pole()).unwrap(), 0.0);
        assert!(harmonic_coefficients(&empty, 4).unwrap().coefficients.iter().all(|&a| a == 0.0));
        let chk = parseval_check(&empty, 2, 6).unwrap();
        assert_eq!((chk.quadrature, chk.coefficients), (0.0, 0.0));
    }

    #[test]
    fn one_point_values() {
        let p = Point::from_angles(0.4, 1.0).unwrap();
        let r = Realization::from_points(1.0, 0, vec![p]).unwrap();
        let want = (3.0 / (4.0 * PI)).sqrt();
        assert!((field_value(&r, 1, &p).unwrap() - want).abs() < 1e-15);
        let r = Realization::from_points(2.5, 0, vec![p]).unwrap();
        assert!((harmonic_coefficients(&r, 2).unwrap().norm_squared() - 1.0 / 2.5).abs() < 1e-14);
    }

    #[test]
    fn antipodal_gamma() {
        let r = Realization::sample(1.0, 3).unwrap();
        let n = Point::north_pole();
        let s = Point::from_vector(0.0, 0.0, -1.0).unwrap();
        let f = finite_dim_eval(&r, 1, &[n, s]).unwrap();
        assert_eq!(f.gamma, vec![1.0, -1.0, -1.0, 1.0]);
        assert!((f.values[0] + f.values[1]).abs() < 1e-12);
        assert!(finite_dim_eval(&r, 1, &[]).is_err());
    }

    #[test]
    fn parseval_identity() {
        let r = Realization::sample(4.0, 9).unwrap();
        let ell = 3;
        let chk = parseval_check(&r, ell, 2 * ell + 2).unwrap();
        assert!(chk.relative_difference < 1e-12, "{chk:?}");
        assert!(parseval_check(&r, ell, 2 * ell + 1).is_err());
    }

    #[test]
    fn duplicated_points_rejected() {
        let r = Realization::sample(1.0, 1).unwrap();
        let p = Point::north_pole();
        assert!(finite_dim_eval(&r, 2, &[p, p]).is_err());
    }

    #[test]
    fn io_round_trip() {
        let r = Realization::sample(1.5, 77).unwrap();
        let mut buf = Vec::new();
        write_realization(&r, &mut buf).unwrap();
        let back = read_realization(&buf[..]).unwrap();
        assert_eq!(r, back);
        assert!(read_realization(&b"{\"rate\":1,\"seed\":0,\"count\":2}\n0 0 1\n"[..]).is_err());
    }
}
