//! Randomized falsification of the pointwise algebra on synthetic curvature data.

pub mod claims;
pub mod gap;
pub mod sample;

use std::collections::BTreeMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

pub use claims::{check_identities, check_inequalities, ClaimClass, ClaimId, Evaluation};
pub use gap::{gap_statistic, GapSummary, UProxy};
pub use sample::{sample_gradtensor, sample_spectrum, CurvatureSpectrum, GradTensor, ScalarSet};

/// Witnesses kept per claim; further violations are only counted.
pub const MAX_WITNESSES: usize = 5;

#[derive(Debug, Error)]
pub enum FalsifyError {
    #[error("dimension {0} is below 3")]
    DimensionTooSmall(usize),
    #[error("principal curvatures sum to {0}, not zero")]
    NotTraceless(f64),
    #[error("no nondegenerate spectrum after {0} draws")]
    DegenerateSample(usize),
    #[error("constraint null space is empty for n = {0}")]
    EmptyNullSpace(usize),
    #[error("invalid dimension range {0}..={1}")]
    InvalidRange(usize, usize),
    #[error("sample count must be positive")]
    NoSamples,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Witness {
    pub sample: u64,
    pub n: usize,
    pub lambda: Vec<f64>,
    /// Orbit values of the tensor in sorted-triple order.
    pub tensor: Vec<f64>,
    pub lhs: f64,
    pub rhs: f64,
    pub relative_gap: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ClaimVerdict {
    pub claim: ClaimId,
    pub class: ClaimClass,
    pub samples: u64,
    pub violation_count: u64,
    pub violations: Vec<Witness>,
    /// Least relative slack seen; negative for a violation.
    pub min_slack: f64,
    pub max_slack: f64,
}

impl ClaimVerdict {
    fn new(claim: ClaimId) -> Self {
        ClaimVerdict {
            claim,
            class: claim.class(),
            samples: 0,
            violation_count: 0,
            violations: Vec::new(),
            min_slack: f64::INFINITY,
            max_slack: f64::NEG_INFINITY,
        }
    }

    fn record(&mut self, sample: u64, spec: &CurvatureSpectrum, t: &GradTensor, e: &Evaluation) {
        self.samples += 1;
        let slack = e.slack();
        self.min_slack = self.min_slack.min(slack);
        self.max_slack = self.max_slack.max(slack);
        if !e.holds() {
            self.violation_count += 1;
            if self.violations.len() < MAX_WITNESSES {
                self.violations.push(Witness {
                    sample,
                    n: spec.n,
                    lambda: spec.lambda.clone(),
                    tensor: t.orbits(),
                    lhs: e.lhs,
                    rhs: e.rhs,
                    relative_gap: slack,
                });
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CampaignConfig {
    pub n_min: usize,
    pub n_max: usize,
    pub samples: u64,
    pub seed: u64,
    /// Multiplies the sampled spectra.
    pub scale: f64,
}

impl Default for CampaignConfig {
    fn default() -> Self {
        CampaignConfig { n_min: 5, n_max: 12, samples: 100_000, seed: 1, scale: 1.0 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CampaignReport {
    pub config: CampaignConfig,
    pub verdicts: Vec<ClaimVerdict>,
    /// Samples with `f < 0` as computed in floating point.
    pub f_negative: u64,
}

impl CampaignReport {
    pub fn hard_violations(&self) -> u64 {
        self.verdicts.iter().filter(|v| v.class == ClaimClass::Hard).map(|v| v.violation_count).sum()
    }

    pub fn monitored_violations(&self) -> u64 {
        self.verdicts.iter().filter(|v| v.class == ClaimClass::Monitored).map(|v| v.violation_count).sum()
    }
}

/// Generator for sample `index` of a campaign: one ChaCha stream per index.
pub fn sample_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Spectrum and constrained tensor for sample `index`, plus the generator for further draws.
pub fn draw(n: usize, scale: f64, seed: u64, index: u64) -> Result<(CurvatureSpectrum, GradTensor, ChaCha8Rng), FalsifyError> {
    let mut rng = sample_rng(seed, index);
    let spec = sample_spectrum(n, scale, &mut rng)?;
    let t = sample_gradtensor(&spec, &mut rng)?;
    Ok((spec, t, rng))
}

/// Runs every claim on `samples` draws, cycling the dimension through `n_min..=n_max`.
pub fn run_campaign(cfg: &CampaignConfig) -> Result<CampaignReport, FalsifyError> {
    if cfg.n_min < 3 {
        return Err(FalsifyError::DimensionTooSmall(cfg.n_min));
    }
    if cfg.n_max < cfg.n_min {
        return Err(FalsifyError::InvalidRange(cfg.n_min, cfg.n_max));
    }
    if cfg.samples == 0 {
        return Err(FalsifyError::NoSamples);
    }
    let mut verdicts: BTreeMap<ClaimId, ClaimVerdict> = ClaimId::ALL.iter().map(|&c| (c, ClaimVerdict::new(c))).collect();
    let span = (cfg.n_max - cfg.n_min + 1) as u64;
    let mut f_negative = 0;
    for i in 0..cfg.samples {
        let n = cfg.n_min + (i % span) as usize;
        let (spec, t, _) = draw(n, cfg.scale, cfg.seed, i)?;
        if spec.f < 0.0 {
            f_negative += 1;
        }
        for (id, e) in check_identities(&spec, &t).into_iter().chain(check_inequalities(&spec, &t)) {
            verdicts.get_mut(&id).expect("all claims registered").record(i, &spec, &t, &e);
        }
    }
    Ok(CampaignReport { config: cfg.clone(), verdicts: verdicts.into_values().collect(), f_negative })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_campaign_has_no_hard_violations() {
        let cfg = CampaignConfig { samples: 400, ..CampaignConfig::default() };
        let r = run_campaign(&cfg).unwrap();
        assert_eq!(r.hard_violations(), 0, "{:#?}", r.verdicts);
        assert!(r.verdicts.iter().all(|v| v.samples == 400));
    }

    #[test]
    fn campaigns_are_deterministic() {
        let cfg = CampaignConfig { samples: 50, seed: 9, ..CampaignConfig::default() };
        assert_eq!(run_campaign(&cfg).unwrap(), run_campaign(&cfg).unwrap());
    }

    #[test]
    fn streams_differ_by_index() {
        let (a, _, _) = draw(6, 1.0, 1, 0).unwrap();
        let (b, _, _) = draw(6, 1.0, 1, 1).unwrap();
        assert_ne!(a.lambda, b.lambda);
    }

    #[test]
    fn invalid_configs() {
        let bad = |n_min, n_max, samples| run_campaign(&CampaignConfig { n_min, n_max, samples, ..CampaignConfig::default() });
        assert!(matches!(bad(2, 5, 1), Err(FalsifyError::DimensionTooSmall(2))));
        assert!(matches!(bad(6, 5, 1), Err(FalsifyError::InvalidRange(6, 5))));
        assert!(matches!(bad(5, 5, 0), Err(FalsifyError::NoSamples)));
    }
}
