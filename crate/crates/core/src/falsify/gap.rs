//! Exploratory statistics of `G = Σu² + (3/2)ΣT² - (3/2)(A - 2B)` on sampled data.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use super::claims::ClaimClass;
use super::sample::{CurvatureSpectrum, GradTensor};
use super::{draw, FalsifyError};

/// How the fourth-order tensor `u` is sampled.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum UProxy {
    Zero,
    /// Gaussian entries with only the symmetry `u_ijkl = u_klij`, times `scale`.
    PairSwap { scale: f64 },
}

/// `Σu²` for one draw of the proxy.
pub fn sample_u_norm_sq<R: Rng>(n: usize, proxy: UProxy, rng: &mut R) -> f64 {
    match proxy {
        UProxy::Zero => 0.0,
        UProxy::PairSwap { scale } => {
            // entry (p, q) over index pairs p = (i, j), q = (k, l); off-diagonal ones appear twice
            let m = n * n;
            let mut total = 0.0;
            for p in 0..m {
                for q in p..m {
                    let x: f64 = rng.sample::<f64, _>(StandardNormal) * scale;
                    total += if p == q { x * x } else { 2.0 * x * x };
                }
            }
            total
        }
    }
}

/// `G` for given data.
pub fn gap_value(spec: &CurvatureSpectrum, t: &GradTensor, u_norm_sq: f64) -> f64 {
    let sc = t.scalars(spec);
    u_norm_sq + 1.5 * t.sum_sq - 1.5 * (sc.a - 2.0 * sc.b)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GapSummary {
    pub class: ClaimClass,
    pub n: usize,
    pub samples: u64,
    pub seed: u64,
    pub proxy: UProxy,
    pub min: f64,
    pub q05: f64,
    pub median: f64,
    pub q95: f64,
    pub max: f64,
    pub negative_fraction: f64,
}

fn quantile(sorted: &[f64], p: f64) -> f64 {
    let idx = ((sorted.len() - 1) as f64 * p).round() as usize;
    sorted[idx]
}

/// Distribution of `G` over `samples` draws; no pass or fail.
pub fn gap_statistic(n: usize, samples: u64, seed: u64, proxy: UProxy) -> Result<GapSummary, FalsifyError> {
    if samples == 0 {
        return Err(FalsifyError::NoSamples);
    }
    let mut values = Vec::with_capacity(samples as usize);
    for i in 0..samples {
        let (spec, t, mut rng) = draw(n, 1.0, seed, i)?;
        let u = sample_u_norm_sq(n, proxy, &mut rng);
        values.push(gap_value(&spec, &t, u));
    }
    values.sort_by(f64::total_cmp);
    let neg = values.iter().filter(|v| **v < 0.0).count();
    Ok(GapSummary {
        class: ClaimClass::Exploratory,
        n,
        samples,
        seed,
        proxy,
        min: values[0],
        q05: quantile(&values, 0.05),
        median: quantile(&values, 0.5),
        q95: quantile(&values, 0.95),
        max: values[values.len() - 1],
        negative_fraction: neg as f64 / samples as f64,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_data_gives_zero() {
        let spec = CurvatureSpectrum::from_lambda(vec![2.0, -1.0, -1.0, 0.0, 0.0]).unwrap();
        assert_eq!(gap_value(&spec, &GradTensor::zero(5), 0.0), 0.0);
    }

    #[test]
    fn zero_proxy_reduces_to_tensor_terms() {
        let (spec, t, _) = draw(6, 1.0, 11, 0).unwrap();
        let sc = t.scalars(&spec);
        let g = gap_value(&spec, &t, 0.0);
        assert!((g - 1.5 * (t.sum_sq - (sc.a - 2.0 * sc.b))).abs() < 1e-9 * g.abs().max(1.0));
    }

    #[test]
    fn summary_is_ordered_and_deterministic() {
        let proxy = UProxy::PairSwap { scale: 0.1 };
        let a = gap_statistic(5, 50, 3, proxy).unwrap();
        assert!(a.min <= a.q05 && a.q05 <= a.median && a.median <= a.q95 && a.q95 <= a.max);
        assert_eq!(a, gap_statistic(5, 50, 3, proxy).unwrap());
        assert!(matches!(gap_statistic(5, 0, 3, proxy), Err(FalsifyError::NoSamples)));
    }
}
