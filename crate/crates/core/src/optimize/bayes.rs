use std::fmt;
use std::str::FromStr;

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use statrs::distribution::{Continuous, ContinuousCDF, Normal};

use super::{unsampled_valid, BayesParams, Evaluator, OptimizeError, Policy};
use crate::design_space::{ArchId, Architecture, DesignSpace};

pub const JITTER_START: f64 = 1e-10;
pub const JITTER_MAX: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Kernel {
    Gaussian,
    /// Matérn with smoothness 3/2.
    Matern,
}

impl Kernel {
    /// Covariance at Euclidean distance `d`.
    pub fn at(self, d: f64) -> f64 {
        match self {
            Kernel::Gaussian => (-d * d).exp(),
            Kernel::Matern => {
                let s = 3f64.sqrt() * d;
                (1.0 + s) * (-s).exp()
            }
        }
    }

    pub fn eval(self, a: &[f64], b: &[f64]) -> f64 {
        let d2: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum();
        self.at(d2.sqrt())
    }
}

impl fmt::Display for Kernel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Kernel::Gaussian => "Ga",
            Kernel::Matern => "Ma",
        })
    }
}

impl FromStr for Kernel {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "ga" | "gauss" | "gaussian" => Ok(Kernel::Gaussian),
            "ma" | "matern" | "matérn" => Ok(Kernel::Matern),
            _ => Err(format!("unknown kernel `{s}`")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Acquisition {
    Ei,
    Ucb,
}

impl fmt::Display for Acquisition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Acquisition::Ei => "EI",
            Acquisition::Ucb => "UCB",
        })
    }
}

impl FromStr for Acquisition {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "ei" => Ok(Acquisition::Ei),
            "ucb" => Ok(Acquisition::Ucb),
            _ => Err(format!("unknown acquisition `{s}`")),
        }
    }
}

pub fn acquisition(mu: f64, sigma: f64, best: f64, kind: Acquisition) -> f64 {
    match kind {
        Acquisition::Ucb => mu + sigma,
        Acquisition::Ei => {
            if sigma <= 0.0 {
                return (mu - best).max(0.0);
            }
            let n = Normal::standard();
            let z = (mu - best) / sigma;
            (mu - best) * n.cdf(z) + sigma * n.pdf(z)
        }
    }
}

/// Noiseless GP regression with a constant prior mean equal to the mean of
/// the observations. Observations are divided by their standard deviation
/// before fitting, which amounts to a signal variance equal to the sample
/// variance.
pub struct GaussianProcess {
    kernel: Kernel,
    x: Vec<Vec<f64>>,
    prior: f64,
    scale: f64,
    chol: Cholesky<f64, Dyn>,
    alpha: DVector<f64>,
    /// Diagonal jitter that made the covariance factorizable.
    pub jitter: f64,
}

impl GaussianProcess {
    pub fn fit(kernel: Kernel, x: Vec<Vec<f64>>, y: &[f64]) -> Result<Self, OptimizeError> {
        let n = x.len();
        assert_eq!(n, y.len());
        assert!(n > 0, "at least one observation");
        let prior = y.iter().sum::<f64>() / n as f64;
        let var = y.iter().map(|v| (v - prior).powi(2)).sum::<f64>() / n as f64;
        let scale = if var > 0.0 { var.sqrt() } else { 1.0 };
        let k = DMatrix::from_fn(n, n, |i, j| kernel.eval(&x[i], &x[j]));
        let resid = DVector::from_iterator(n, y.iter().map(|v| (v - prior) / scale));
        let mut jitter = JITTER_START;
        loop {
            let mut kj = k.clone();
            for i in 0..n {
                kj[(i, i)] += jitter;
            }
            if let Some(chol) = Cholesky::new(kj) {
                let alpha = chol.solve(&resid);
                return Ok(GaussianProcess {
                    kernel,
                    x,
                    prior,
                    scale,
                    chol,
                    alpha,
                    jitter,
                });
            }
            jitter *= 10.0;
            if jitter > JITTER_MAX * (1.0 + 1e-9) {
                return Err(OptimizeError::Covariance {
                    jitter: jitter / 10.0,
                });
            }
        }
    }

    fn cross(&self, a: &[f64]) -> DVector<f64> {
        DVector::from_iterator(
            self.x.len(),
            self.x.iter().map(|xi| self.kernel.eval(xi, a)),
        )
    }

    /// Posterior mean and unclamped variance.
    pub fn posterior(&self, a: &[f64]) -> (f64, f64) {
        let ks = self.cross(a);
        let mu = self.prior + self.scale * ks.dot(&self.alpha);
        let v = self
            .chol
            .l()
            .solve_lower_triangular(&ks)
            .expect("nonsingular factor");
        let var = self.kernel.eval(a, a) - v.dot(&v);
        (mu, var * self.scale * self.scale)
    }

    /// Posterior mean and standard deviation.
    pub fn predict(&self, a: &[f64]) -> (f64, f64) {
        let (mu, var) = self.posterior(a);
        (mu, var.max(0.0).sqrt())
    }
}

fn features(id: ArchId) -> Vec<f64> {
    Architecture::from_id(id)
        .expect("valid id")
        .coordinates()
        .iter()
        .map(|&c| c as f64)
        .collect()
}

pub(super) struct Bayes {
    params: BayesParams,
}

impl Bayes {
    pub(super) fn new(params: BayesParams) -> Self {
        Bayes { params }
    }
}

impl Policy for Bayes {
    fn iterate(
        &mut self,
        iteration: u64,
        space: &DesignSpace,
        eval: &mut Evaluator<'_>,
        rng: &mut ChaCha8Rng,
    ) -> Result<Option<Vec<ArchId>>, OptimizeError> {
        if iteration == 1 {
            let init = unsampled_valid(space, eval, self.params.population, rng);
            if init.is_empty() {
                return Ok(None);
            }
            eval.evaluate_batch(&init);
            return Ok(Some(init));
        }
        let candidates = unsampled_valid(space, eval, self.params.candidates, rng);
        if candidates.is_empty() {
            return Ok(None);
        }
        let history = eval.history();
        let window = &history[history.len().saturating_sub(self.params.history)..];
        let x: Vec<Vec<f64>> = window.iter().map(|&id| features(id)).collect();
        let y: Vec<f64> = window
            .iter()
            .map(|&id| eval.get(id).expect("cached").score)
            .collect();
        let gp = GaussianProcess::fit(self.params.kernel, x, &y)?;
        let best = eval.best().map_or(0.0, |b| b.score);
        let mut scored: Vec<(f64, ArchId)> = candidates
            .iter()
            .map(|&id| {
                let (mu, sigma) = gp.predict(&features(id));
                (acquisition(mu, sigma, best, self.params.acquisition), id)
            })
            .collect();
        scored.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
        scored.truncate(self.params.population);
        let picked: Vec<ArchId> = scored.into_iter().map(|(_, id)| id).collect();
        eval.evaluate_batch(&picked);
        Ok(Some(picked))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kernel_values() {
        assert_eq!(Kernel::Gaussian.at(0.0), 1.0);
        assert_eq!(Kernel::Matern.at(0.0), 1.0);
        assert!((Kernel::Matern.at(1.0) - 0.483_357_724_596_507_7).abs() < 1e-12);
    }

    #[test]
    fn acquisition_values() {
        assert!((acquisition(0.5, 0.1, 0.0, Acquisition::Ucb) - 0.6).abs() < 1e-15);
        assert_eq!(acquisition(0.2, 0.0, 0.3, Acquisition::Ei), 0.0);
        assert!((acquisition(1.0, 1.0, 1.0, Acquisition::Ei) - 0.398_942_280_4).abs() < 1e-9);
    }

    #[test]
    fn interpolates() {
        let x = vec![
            vec![0.0, 0.0],
            vec![1.0, 0.0],
            vec![0.0, 2.0],
            vec![3.0, 1.0],
            vec![2.0, 2.0],
        ];
        let y = [0.3, 0.9, 0.1, 0.5, 0.7];
        let gp = GaussianProcess::fit(Kernel::Matern, x.clone(), &y).unwrap();
        for (xi, yi) in x.iter().zip(y) {
            let (mu, var) = gp.posterior(xi);
            assert!((mu - yi).abs() < 1e-8);
            assert!(var > -1e-9 && var < 1e-6);
        }
    }
}
