//! Random principal-curvature spectra and constrained totally symmetric 3-tensors.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use super::FalsifyError;

/// Draws rejected before giving up on a spectrum.
pub const MAX_REJECTIONS: usize = 100;

/// Principal curvatures with vanishing sum, and their power sums.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CurvatureSpectrum {
    pub n: usize,
    pub lambda: Vec<f64>,
    pub s: f64,
    pub f3: f64,
    pub f4: f64,
    pub y: f64,
    /// `(S f4 - f3² - S³/n) / S`; its sign is recorded, not assumed.
    pub f: f64,
    pub lambda_max: f64,
    pub lambda_min: f64,
}

impl CurvatureSpectrum {
    /// Builds the spectrum of a given traceless vector.
    pub fn from_lambda(lambda: Vec<f64>) -> Result<Self, FalsifyError> {
        let n = lambda.len();
        if n < 3 {
            return Err(FalsifyError::DimensionTooSmall(n));
        }
        let sum: f64 = lambda.iter().sum();
        let mag: f64 = lambda.iter().map(|x| x.abs()).sum();
        if sum.abs() > 1e-12 * mag.max(1.0) {
            return Err(FalsifyError::NotTraceless(sum));
        }
        let s: f64 = lambda.iter().map(|x| x * x).sum();
        if s <= 0.0 || !s.is_finite() {
            return Err(FalsifyError::DegenerateSample(0));
        }
        let f3: f64 = lambda.iter().map(|x| x.powi(3)).sum();
        let f4: f64 = lambda.iter().map(|x| x.powi(4)).sum();
        let nf = n as f64;
        let f = (s * f4 - f3 * f3 - s.powi(3) / nf) / s;
        let lambda_max = lambda.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let lambda_min = lambda.iter().cloned().fold(f64::INFINITY, f64::min);
        Ok(CurvatureSpectrum { n, y: f3 / s, lambda, s, f3, f4, f, lambda_max, lambda_min })
    }

    /// `S f4 - f3²`
    pub fn gram_gap(&self) -> f64 {
        self.s * self.f4 - self.f3 * self.f3
    }
}

/// Gaussian vector projected onto `Σλ = 0` and multiplied by `scale`.
pub fn sample_spectrum<R: Rng>(n: usize, scale: f64, rng: &mut R) -> Result<CurvatureSpectrum, FalsifyError> {
    if n < 3 {
        return Err(FalsifyError::DimensionTooSmall(n));
    }
    for _ in 0..MAX_REJECTIONS {
        let mut v: Vec<f64> = (0..n).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
        let mean = v.iter().sum::<f64>() / n as f64;
        for x in &mut v {
            *x = (*x - mean) * scale;
        }
        // removes the rounding left by the mean subtraction
        let drift = v.iter().sum::<f64>() / n as f64;
        for x in &mut v {
            *x -= drift;
        }
        if v.iter().map(|x| x * x).sum::<f64>() > 1e-300 {
            return CurvatureSpectrum::from_lambda(v);
        }
    }
    Err(FalsifyError::DegenerateSample(MAX_REJECTIONS))
}

/// Index of the orbit `{i, j, k}` among sorted triples `i <= j <= k`.
fn orbit_index(n: usize, mut i: usize, mut j: usize, mut k: usize) -> usize {
    if i > j {
        std::mem::swap(&mut i, &mut j);
    }
    if j > k {
        std::mem::swap(&mut j, &mut k);
    }
    if i > j {
        std::mem::swap(&mut i, &mut j);
    }
    // triples with first index < i, then second index in [i, j), then k
    let tri = |m: usize| m * (m + 1) * (m + 2) / 6;
    let tet_before = tri(n) - tri(n - i);
    let m = n - i;
    let row = |a: usize| a * m - a * (a.saturating_sub(1)) / 2;
    tet_before + row(j - i) + (k - j)
}

/// Totally symmetric 3-tensor stored densely.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GradTensor {
    pub n: usize,
    /// `values[(i*n + j)*n + k] = T_ijk`
    values: Vec<f64>,
    pub sum_sq: f64,
}

impl GradTensor {
    pub fn zero(n: usize) -> Self {
        GradTensor { n, values: vec![0.0; n * n * n], sum_sq: 0.0 }
    }

    /// Expands orbit values (sorted-triple order) to the dense tensor.
    pub fn from_orbits(n: usize, orbits: &[f64]) -> Self {
        let mut values = vec![0.0; n * n * n];
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    values[(i * n + j) * n + k] = orbits[orbit_index(n, i, j, k)];
                }
            }
        }
        let sum_sq = values.iter().map(|x| x * x).sum();
        GradTensor { n, values, sum_sq }
    }

    /// A single orbit set to `value`.
    pub fn single_orbit(n: usize, i: usize, j: usize, k: usize, value: f64) -> Self {
        let mut orbits = vec![0.0; orbit_count(n)];
        orbits[orbit_index(n, i, j, k)] = value;
        Self::from_orbits(n, &orbits)
    }

    pub fn get(&self, i: usize, j: usize, k: usize) -> f64 {
        self.values[(i * self.n + j) * self.n + k]
    }

    pub fn orbits(&self) -> Vec<f64> {
        let n = self.n;
        let mut out = vec![0.0; orbit_count(n)];
        for i in 0..n {
            for j in i..n {
                for k in j..n {
                    out[orbit_index(n, i, j, k)] = self.get(i, j, k);
                }
            }
        }
        out
    }

    pub fn scaled(&self, c: f64) -> Self {
        let values: Vec<f64> = self.values.iter().map(|x| x * c).collect();
        let sum_sq = values.iter().map(|x| x * x).sum();
        GradTensor { n: self.n, values, sum_sq }
    }

    /// Largest constraint residual `|Σᵢ w(λᵢ) T_iik|`, relative to `Σᵢ |w(λᵢ)| · max |T|`.
    pub fn constraint_residual(&self, spec: &CurvatureSpectrum) -> f64 {
        let tmax = self.values.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        if tmax == 0.0 {
            return 0.0;
        }
        let mut worst: f64 = 0.0;
        for p in 0..3 {
            let wsum: f64 = spec.lambda.iter().map(|l| l.powi(p).abs()).sum();
            for k in 0..self.n {
                let r: f64 = spec.lambda.iter().enumerate().map(|(i, l)| l.powi(p) * self.get(i, i, k)).sum();
                worst = worst.max(r.abs() / (wsum * tmax));
            }
        }
        worst
    }

    pub fn scalars(&self, spec: &CurvatureSpectrum) -> ScalarSet {
        let l = &spec.lambda;
        let (mut a, mut b, mut c) = (0.0, 0.0, 0.0);
        for i in 0..self.n {
            for j in 0..self.n {
                for k in 0..self.n {
                    let t2 = self.get(i, j, k).powi(2);
                    a += l[i] * l[i] * t2;
                    b += l[i] * l[j] * t2;
                    c += l[i] * t2;
                }
            }
        }
        ScalarSet { a, b, c }
    }
}

pub fn orbit_count(n: usize) -> usize {
    n * (n + 1) * (n + 2) / 6
}

/// `A = Σλᵢ²T²`, `B = Σλᵢλⱼ T²`, `C = Σλᵢ T²`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ScalarSet {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Orthonormal basis of the row span by modified Gram-Schmidt with reorthogonalization.
/// Rows whose remainder falls below `1e-10` of their norm are dependent and dropped.
pub fn orthonormal_rows(rows: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let mut basis: Vec<Vec<f64>> = Vec::new();
    for r in rows {
        let norm0 = dot(r, r).sqrt();
        if norm0 == 0.0 {
            continue;
        }
        let mut v = r.clone();
        for _ in 0..2 {
            for q in &basis {
                let c = dot(&v, q);
                for (x, y) in v.iter_mut().zip(q) {
                    *x -= c * y;
                }
            }
        }
        let norm = dot(&v, &v).sqrt();
        if norm > 1e-10 * norm0 {
            basis.push(v.into_iter().map(|x| x / norm).collect());
        }
    }
    basis
}

/// Removes the components of `x` along an orthonormal basis, twice.
pub fn project_out(basis: &[Vec<f64>], x: &mut [f64]) {
    for _ in 0..2 {
        for q in basis {
            let c = dot(x, q);
            for (xi, qi) in x.iter_mut().zip(q) {
                *xi -= c * qi;
            }
        }
    }
}

/// Projects orbit values onto the null space of the `3n` constraint rows.
///
/// Row group `k` involves only the orbits `{i, i, k}`, and distinct groups share none,
/// so each group is orthogonalized on its own `n` coordinates.
pub fn project_orbits(spec: &CurvatureSpectrum, orbits: &mut [f64]) -> Result<usize, FalsifyError> {
    let n = spec.n;
    let mut rank = 0;
    for k in 0..n {
        let idx: Vec<usize> = (0..n).map(|i| orbit_index(n, i, i, k)).collect();
        let rows: Vec<Vec<f64>> = (0..3).map(|p| spec.lambda.iter().map(|l| l.powi(p)).collect()).collect();
        let basis = orthonormal_rows(&rows);
        rank += basis.len();
        let mut x: Vec<f64> = idx.iter().map(|&o| orbits[o]).collect();
        project_out(&basis, &mut x);
        for (&o, v) in idx.iter().zip(x) {
            orbits[o] = v;
        }
    }
    if rank >= orbit_count(n) {
        return Err(FalsifyError::EmptyNullSpace(n));
    }
    Ok(orbit_count(n) - rank)
}

/// Random constrained tensor: Gaussian orbit values projected onto the constraint null space.
pub fn sample_gradtensor<R: Rng>(spec: &CurvatureSpectrum, rng: &mut R) -> Result<GradTensor, FalsifyError> {
    let mut orbits: Vec<f64> = (0..orbit_count(spec.n)).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
    project_orbits(spec, &mut orbits)?;
    Ok(GradTensor::from_orbits(spec.n, &orbits))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn orbit_indices_enumerate_sorted_triples() {
        for n in 1..8 {
            let mut expected = 0;
            for i in 0..n {
                for j in i..n {
                    for k in j..n {
                        assert_eq!(orbit_index(n, i, j, k), expected);
                        assert_eq!(orbit_index(n, k, i, j), expected);
                        expected += 1;
                    }
                }
            }
            assert_eq!(expected, orbit_count(n));
        }
    }

    #[test]
    fn fixed_spectrum_power_sums() {
        let s = CurvatureSpectrum::from_lambda(vec![2.0, -1.0, -1.0, 0.0, 0.0]).unwrap();
        assert_eq!((s.s, s.f3, s.f4), (6.0, 6.0, 18.0));
    }

    #[test]
    fn symmetric_triple_cube_sum() {
        let c = 0.7;
        let s = CurvatureSpectrum::from_lambda(vec![c, c, -2.0 * c]).unwrap();
        assert!((s.f3 + 6.0 * c * c * c).abs() < 1e-14);
    }

    #[test]
    fn sampled_spectrum_is_traceless() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let s = sample_spectrum(5, 1.0, &mut rng).unwrap();
        assert!(s.lambda.iter().sum::<f64>().abs() < 1e-14);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(CurvatureSpectrum::from_lambda(vec![1.0, -1.0]), Err(FalsifyError::DimensionTooSmall(2))));
        assert!(matches!(CurvatureSpectrum::from_lambda(vec![1.0, 1.0, 1.0]), Err(FalsifyError::NotTraceless(_))));
        assert!(matches!(CurvatureSpectrum::from_lambda(vec![0.0; 4]), Err(FalsifyError::DegenerateSample(_))));
    }

    #[test]
    fn projected_tensor_meets_constraints() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for n in 3..=12 {
            let s = sample_spectrum(n, 1.0, &mut rng).unwrap();
            let t = sample_gradtensor(&s, &mut rng).unwrap();
            assert!(t.constraint_residual(&s) < 1e-12, "n = {n}");
            for i in 0..n {
                for j in 0..n {
                    for k in 0..n {
                        assert_eq!(t.get(i, j, k), t.get(j, k, i));
                        assert_eq!(t.get(i, j, k), t.get(j, i, k));
                    }
                }
            }
        }
    }

    #[test]
    fn distinct_index_orbit_is_unconstrained() {
        let s = CurvatureSpectrum::from_lambda(vec![2.0, -1.0, -1.0, 0.5, -0.5]).unwrap();
        let t = GradTensor::single_orbit(5, 0, 1, 2, 1.0);
        // no T_iik entry is touched
        assert_eq!(t.constraint_residual(&s), 0.0);
        let mut orbits = t.orbits();
        project_orbits(&s, &mut orbits).unwrap();
        assert_eq!(GradTensor::from_orbits(5, &orbits), t);
    }

    #[test]
    fn repeated_orbit_residual_then_projection() {
        let s = CurvatureSpectrum::from_lambda(vec![2.0, -1.0, -1.0, 0.5, -0.5]).unwrap();
        // T_{002} = 1: group k = 2 sees λ₀^p against Σ|λᵢ|^p, worst at p = 2
        let t = GradTensor::single_orbit(5, 0, 0, 2, 1.0);
        assert!((t.constraint_residual(&s) - 8.0 / 13.0).abs() < 1e-15);
        let mut orbits = t.orbits();
        project_orbits(&s, &mut orbits).unwrap();
        assert!(GradTensor::from_orbits(5, &orbits).constraint_residual(&s) < 1e-14);
    }

    #[test]
    fn zero_tensor_is_valid() {
        let s = CurvatureSpectrum::from_lambda(vec![2.0, -1.0, -1.0, 0.0, 0.0]).unwrap();
        let t = GradTensor::zero(5);
        assert_eq!(t.constraint_residual(&s), 0.0);
        assert_eq!(t.scalars(&s), ScalarSet { a: 0.0, b: 0.0, c: 0.0 });
    }

    #[test]
    fn projection_is_linear_in_scale() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let s = sample_spectrum(7, 1.0, &mut rng).unwrap();
        let mut x: Vec<f64> = (0..orbit_count(7)).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
        let mut y: Vec<f64> = x.iter().map(|v| v * 1e3).collect();
        project_orbits(&s, &mut x).unwrap();
        project_orbits(&s, &mut y).unwrap();
        for (a, b) in x.iter().zip(&y) {
            assert!((a * 1e3 - b).abs() <= 1e-9 * b.abs().max(1.0));
        }
        let big = GradTensor::from_orbits(7, &y);
        assert!(big.constraint_residual(&s) < 1e-12);
    }
}
