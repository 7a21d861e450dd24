//! Expected gate-conflict duration as a function of gate separation.
//!
//! A conflict happens when the earlier turn actually leaves after the later
//! turn actually arrives. With departure delay `Dd`, arrival delay `Da` and
//! scheduled separation `sep`, the overlap is `Dd - sep - Da`. The estimators
//! here produce the conflict probability and the conditional mean overlap by
//! Monte Carlo over parametric delay families; [`fit_exponential`] then fits
//! the `a * b^sep` kernel used by the robustness objective.

use std::fmt;
use std::str::FromStr;

use log::warn;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp, LogNormal};
use serde::{Deserialize, Serialize};
use statrs::function::erf::{erfc, erfc_inv};

use crate::error::{Error, Result};
use crate::model::ConflictFit;

/// Delay distribution, minutes (negative values are early).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum DelayDist {
    Constant { value: f64 },
    Exponential { rate: f64 },
    /// `shift + exp(N(mu, sigma^2))`.
    LogNormal { mu: f64, sigma: f64, shift: f64 },
}

impl DelayDist {
    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            DelayDist::Constant { value } => value.is_finite(),
            DelayDist::Exponential { rate } => rate.is_finite() && rate > 0.0,
            DelayDist::LogNormal { mu, sigma, shift } => {
                mu.is_finite() && shift.is_finite() && sigma.is_finite() && sigma > 0.0
            }
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidParams(format!("invalid delay distribution {self}")))
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            DelayDist::Constant { value } => value,
            DelayDist::Exponential { rate } => Exp::new(rate).expect("validated rate").sample(rng),
            DelayDist::LogNormal { mu, sigma, shift } => {
                shift + LogNormal::new(mu, sigma).expect("validated sigma").sample(rng)
            }
        }
    }

    /// `P(D > c)`.
    pub fn survival(&self, c: f64) -> f64 {
        match *self {
            DelayDist::Constant { value } => {
                if value > c {
                    1.0
                } else {
                    0.0
                }
            }
            DelayDist::Exponential { rate } => {
                if c < 0.0 {
                    1.0
                } else {
                    (-rate * c).exp()
                }
            }
            DelayDist::LogNormal { mu, sigma, shift } => {
                if c <= shift {
                    1.0
                } else {
                    let z = ((c - shift).ln() - mu) / sigma;
                    0.5 * erfc(z / std::f64::consts::SQRT_2)
                }
            }
        }
    }

    /// Draws `D - c` conditioned on `D > c`. Requires `survival(c) > 0`.
    fn sample_excess<R: Rng + ?Sized>(&self, c: f64, rng: &mut R) -> f64 {
        match *self {
            DelayDist::Constant { value } => value - c,
            DelayDist::Exponential { rate } => {
                let x = Exp::new(rate).expect("validated rate").sample(rng);
                // memoryless above 0; below 0 the whole support lies above c
                if c < 0.0 {
                    x - c
                } else {
                    x
                }
            }
            DelayDist::LogNormal { mu, sigma, shift } => {
                if c <= shift {
                    return self.sample(rng) - c;
                }
                let z_c = ((c - shift).ln() - mu) / sigma;
                let tail = 0.5 * erfc(z_c / std::f64::consts::SQRT_2);
                // inverse survival of a uniform draw inside the tail
                let u = 1.0 - rng.random::<f64>();
                let z = std::f64::consts::SQRT_2 * erfc_inv(2.0 * u * tail);
                (shift + (mu + sigma * z.max(z_c)).exp() - c).max(0.0)
            }
        }
    }
}

impl fmt::Display for DelayDist {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DelayDist::Constant { value } => write!(f, "const:{value}"),
            DelayDist::Exponential { rate } => write!(f, "exp:{rate}"),
            DelayDist::LogNormal { mu, sigma, shift } => write!(f, "lognormal:{mu},{sigma},{shift}"),
        }
    }
}

impl FromStr for DelayDist {
    type Err = Error;

    /// Parses `const:V`, `exp:RATE` or `lognormal:MU,SIGMA,SHIFT`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidParams(format!("cannot parse delay distribution '{s}'"));
        let (family, args) = s.split_once(':').ok_or_else(bad)?;
        let nums = args
            .split(',')
            .map(|x| x.trim().parse::<f64>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|_| bad())?;
        let dist = match (family.trim(), nums.as_slice()) {
            ("const" | "constant", [v]) => DelayDist::Constant { value: *v },
            ("exp" | "exponential", [rate]) => DelayDist::Exponential { rate: *rate },
            ("lognormal" | "lognorm", [mu, sigma]) => DelayDist::LogNormal { mu: *mu, sigma: *sigma, shift: 0.0 },
            ("lognormal" | "lognorm", [mu, sigma, shift]) => {
                DelayDist::LogNormal { mu: *mu, sigma: *sigma, shift: *shift }
            }
            _ => return Err(bad()),
        };
        dist.validate()?;
        Ok(dist)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DelayModel {
    /// Actual minus scheduled gate-out time of the earlier turn.
    pub dep_delay: DelayDist,
    /// Actual minus scheduled gate-in time of the later turn.
    pub arr_delay: DelayDist,
    pub rng_seed: u64,
}

impl Default for DelayModel {
    /// Right-skewed departure delays (median about 2.4 min late) and
    /// arrivals that are usually early (median about 5 min early).
    fn default() -> Self {
        Self {
            dep_delay: DelayDist::LogNormal { mu: 2.0, sigma: 1.0, shift: -5.0 },
            arr_delay: DelayDist::LogNormal { mu: 2.3, sigma: 0.8, shift: -15.0 },
            rng_seed: 2011,
        }
    }
}

impl DelayModel {
    pub fn validate(&self) -> Result<()> {
        self.dep_delay.validate()?;
        self.arr_delay.validate()
    }

    /// Independent stream per separation value, so grid points can be
    /// evaluated in any order.
    fn stream(&self, sep: f64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(splitmix64(self.rng_seed ^ splitmix64(sep.to_bits())))
    }
}

pub(crate) fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct OverlapEstimate {
    /// `E[overlap | overlap > 0]`, 0 when no conflict is possible.
    pub conditional_mean: f64,
    /// `P(overlap > 0)`.
    pub probability: f64,
}

impl OverlapEstimate {
    /// `E[max(overlap, 0)]`.
    pub fn expected(&self) -> f64 {
        self.conditional_mean * self.probability
    }
}

pub fn expected_conflict_duration(sep: f64, fit: &ConflictFit) -> f64 {
    fit.a * fit.b.powf(sep)
}

fn check_args(model: &DelayModel, sep: f64, n_samples: usize) -> Result<()> {
    model.validate()?;
    if n_samples == 0 {
        return Err(Error::InvalidParams("n_samples must be >= 1".into()));
    }
    if !(sep >= 0.0 && sep.is_finite()) {
        return Err(Error::InvalidParams(format!("separation must be >= 0, got {sep}")));
    }
    Ok(())
}

/// Monte Carlo estimate of the overlap at separation `sep`.
///
/// Each of the `n_samples` draws takes an arrival delay `Da` and then a
/// departure delay from its tail above `sep + Da`, weighted by the tail
/// probability. Both the probability and the conditional mean stay accurate
/// when conflicts are rare, unlike counting hits in plain draws (see
/// [`estimate_overlap_direct`]).
pub fn estimate_overlap_mc(model: &DelayModel, sep: f64, n_samples: usize) -> Result<OverlapEstimate> {
    check_args(model, sep, n_samples)?;
    let mut rng = model.stream(sep);
    let (mut sum_w, mut sum_wx) = (0.0, 0.0);
    for _ in 0..n_samples {
        let c = sep + model.arr_delay.sample(&mut rng);
        let w = model.dep_delay.survival(c);
        if w > 0.0 {
            let x = model.dep_delay.sample_excess(c, &mut rng);
            sum_w += w;
            sum_wx += w * x;
        }
    }
    let n = n_samples as f64;
    Ok(OverlapEstimate {
        conditional_mean: if sum_w > 0.0 { sum_wx / sum_w } else { 0.0 },
        probability: sum_w / n,
    })
}

/// Plain Monte Carlo: draw `(Dd, Da)` pairs and average the positive
/// overlaps.
pub fn estimate_overlap_direct(model: &DelayModel, sep: f64, n_samples: usize) -> Result<OverlapEstimate> {
    check_args(model, sep, n_samples)?;
    let mut rng = model.stream(sep);
    let (mut hits, mut total) = (0usize, 0.0);
    for _ in 0..n_samples {
        let dd = model.dep_delay.sample(&mut rng);
        let da = model.arr_delay.sample(&mut rng);
        let overlap = dd - sep - da;
        if overlap > 0.0 {
            hits += 1;
            total += overlap;
        }
    }
    Ok(OverlapEstimate {
        conditional_mean: if hits > 0 { total / hits as f64 } else { 0.0 },
        probability: hits as f64 / n_samples as f64,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitReport {
    pub fit: ConflictFit,
    /// Coefficient of determination of the returned fit in log space.
    pub r_squared: f64,
    /// Number of points with positive duration that entered the fit.
    pub points_used: usize,
    /// Set when the data grew with separation and `b` was clamped to 1.
    pub clamped: bool,
}

/// Least-squares fit of `ln(duration) = ln a + sep * ln b`.
///
/// Points with duration at or below 1e-12 are dropped.
pub fn fit_exponential(points: &[(f64, f64)]) -> Result<FitReport> {
    let usable: Vec<(f64, f64)> = points
        .iter()
        .filter(|&&(s, d)| s.is_finite() && d.is_finite() && d > 1e-12)
        .map(|&(s, d)| (s, d.ln()))
        .collect();
    if usable.len() < 2 {
        return Err(Error::Fit(format!(
            "need at least 2 points with positive duration, got {}",
            usable.len()
        )));
    }
    let n = usable.len() as f64;
    let mean_x = usable.iter().map(|p| p.0).sum::<f64>() / n;
    let mean_y = usable.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = usable.iter().map(|p| (p.0 - mean_x).powi(2)).sum();
    let sxy: f64 = usable.iter().map(|p| (p.0 - mean_x) * (p.1 - mean_y)).sum();
    if sxx <= 0.0 {
        return Err(Error::Fit("need at least 2 distinct separations".into()));
    }

    let mut slope = sxy / sxx;
    let mut clamped = false;
    if slope > 0.0 {
        warn!("conflict duration grows with separation (slope {slope:.4}); clamping b to 1");
        slope = 0.0;
        clamped = true;
    }
    let intercept = mean_y - slope * mean_x;

    let ss_tot: f64 = usable.iter().map(|p| (p.1 - mean_y).powi(2)).sum();
    let ss_res: f64 = usable
        .iter()
        .map(|p| (p.1 - intercept - slope * p.0).powi(2))
        .sum();
    let r_squared = if ss_tot > 0.0 {
        1.0 - ss_res / ss_tot
    } else if ss_res <= 1e-24 {
        1.0
    } else {
        0.0
    };

    Ok(FitReport {
        fit: ConflictFit {
            a: intercept.exp(),
            b: slope.exp(),
        },
        r_squared,
        points_used: usable.len(),
        clamped,
    })
}

/// Which Monte Carlo output the kernel is fitted to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FitTarget {
    /// `E[max(overlap, 0)]`: probability times conditional mean.
    #[default]
    Expected,
    /// `E[overlap | overlap > 0]`.
    Conditional,
}

impl FromStr for FitTarget {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "expected" => Ok(FitTarget::Expected),
            "conditional" => Ok(FitTarget::Conditional),
            _ => Err(Error::InvalidParams(format!("unknown fit target '{s}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrationPoint {
    pub sep: f64,
    pub estimate: OverlapEstimate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Calibration {
    pub report: FitReport,
    pub target: FitTarget,
    pub points: Vec<CalibrationPoint>,
}

/// Separations 0, 5, ..., 120 minutes.
pub fn default_grid() -> Vec<f64> {
    (0..=24).map(|i| i as f64 * 5.0).collect()
}

pub const DEFAULT_SAMPLES: usize = 100_000;

/// Estimates the overlap over `sep_grid` and fits the exponential kernel.
pub fn calibrate(
    model: &DelayModel,
    sep_grid: &[f64],
    n_samples: usize,
    target: FitTarget,
) -> Result<Calibration> {
    if sep_grid.is_empty() {
        return Err(Error::InvalidParams("calibration grid is empty".into()));
    }
    let points = sep_grid
        .iter()
        .map(|&sep| {
            estimate_overlap_mc(model, sep, n_samples).map(|estimate| CalibrationPoint { sep, estimate })
        })
        .collect::<Result<Vec<_>>>()?;
    let data: Vec<(f64, f64)> = points
        .iter()
        .map(|p| {
            let y = match target {
                FitTarget::Expected => p.estimate.expected(),
                FitTarget::Conditional => p.estimate.conditional_mean,
            };
            (p.sep, y)
        })
        .collect();
    let report = fit_exponential(&data).map_err(|e| match e {
        Error::Fit(msg) if data.iter().all(|p| p.1 <= 1e-12) => {
            Error::Fit(format!("the delay model produces no gate conflicts on the grid ({msg})"))
        }
        other => other,
    })?;
    Ok(Calibration {
        report,
        target,
        points,
    })
}
