//! Seeded Monte-Carlo runs and their comparison with exact predictions.
//!
//! Trajectory `i` of a run with seed `s` draws from `ChaCha8Rng::seed_from_u64(s)` with
//! `set_stream(i)`, so every trajectory has its own stream and results do not depend on
//! how trajectories are scheduled across threads.

use std::collections::BTreeMap;
use std::hash::Hash;

use num_traits::Zero;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::{json, Value};
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::algebras::{Forest, Permutation};
use crate::catalog::todo::TodoSampler;
use crate::catalog::tree::TreeSampler;
use crate::catalog::Observable;
use crate::chain::{ChainSpec, MatrixSampler};
use crate::error::{Error, Result};
use crate::hopf::HopfAlgebra;
use crate::rational::{fmt_rational, pow, to_f64, Rational};

/// One random step of a chain.
pub trait StepSampler<B>: Sync {
    fn sample_step(&self, x: &B, rng: &mut ChaCha8Rng) -> Result<B>;
}

impl<A: HopfAlgebra> StepSampler<A::Basis> for ChainSpec<'_, A>
where
    Self: Sync,
{
    fn sample_step(&self, x: &A::Basis, rng: &mut ChaCha8Rng) -> Result<A::Basis> {
        self.step_sample(x, rng)
    }
}

impl<B: Ord + Hash + Clone + Sync + Send> StepSampler<B> for MatrixSampler<'_, B> {
    fn sample_step(&self, x: &B, rng: &mut ChaCha8Rng) -> Result<B> {
        self.step(x, rng)
    }
}

impl StepSampler<Forest> for TreeSampler {
    fn sample_step(&self, x: &Forest, rng: &mut ChaCha8Rng) -> Result<Forest> {
        self.step(x, rng)
    }
}

impl StepSampler<Permutation> for TodoSampler {
    fn sample_step(&self, x: &Permutation, rng: &mut ChaCha8Rng) -> Result<Permutation> {
        self.step(x, rng)
    }
}

/// The generator for trajectory `i`.
pub fn trajectory_rng(seed: u64, i: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(i);
    rng
}

/// Terminal states of `trials` trajectories of length `t`, in trajectory order.
pub fn run_trajectories<B, S>(sampler: &S, x0: &B, t: usize, trials: usize, seed: u64) -> Result<Vec<B>>
where
    B: Clone + Send + Sync,
    S: StepSampler<B> + ?Sized,
{
    (0..trials)
        .into_par_iter()
        .map(|i| {
            let mut rng = trajectory_rng(seed, i as u64);
            let mut x = x0.clone();
            for _ in 0..t {
                x = sampler.sample_step(&x, &mut rng)?;
            }
            Ok(x)
        })
        .collect()
}

pub fn state_counts<B: Ord + Clone>(states: &[B]) -> BTreeMap<B, u64> {
    let mut out = BTreeMap::new();
    for s in states {
        *out.entry(s.clone()).or_insert(0) += 1;
    }
    out
}

/// Neumaier-compensated sum, taken in slice order.
pub fn compensated_sum(xs: &[f64]) -> f64 {
    let mut sum = 0.0f64;
    let mut c = 0.0f64;
    for &x in xs {
        let t = sum + x;
        if sum.abs() >= x.abs() {
            c += (sum - t) + x;
        } else {
            c += (x - t) + sum;
        }
        sum = t;
    }
    sum + c
}

/// `x` rounded to 12 significant digits, in plain decimal notation.
pub fn decimal12(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{x:.11e}");
    let v: f64 = sci.parse().expect("formatted float parses");
    let mag = v.abs().log10().floor() as i32;
    let digits = (11 - mag).max(0) as usize;
    let s = format!("{v:.digits$}");
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SimReport {
    pub observable: String,
    pub t: usize,
    pub trials: usize,
    pub seed: u64,
    pub mean: f64,
    pub stderr: f64,
    pub prediction: Option<Rational>,
    /// `None` when there is no prediction, or when the standard error is 0 and the mean misses it.
    pub z: Option<f64>,
}

impl SimReport {
    pub fn within(&self, sigmas: f64) -> bool {
        self.z.is_some_and(|z| z.abs() <= sigmas)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "observable": self.observable,
            "t": self.t,
            "trials": self.trials,
            "seed": self.seed,
            "mean": decimal12(self.mean),
            "stderr": decimal12(self.stderr),
            "prediction": self.prediction.as_ref().map(fmt_rational),
            "prediction_decimal": self.prediction.as_ref().map(|p| decimal12(to_f64(p))),
            "z": self.z.map(decimal12),
        })
    }

    /// Inverse of [`SimReport::to_json`]; floats come back at their 12-digit rounding.
    pub fn from_json(v: &Value) -> Result<Self> {
        let bad = |k: &str| Error::Parse(format!("simulation report needs {k}"));
        let float = |k: &str| -> Result<f64> {
            v.get(k).and_then(Value::as_str).and_then(|s| s.parse().ok()).ok_or_else(|| bad(k))
        };
        let count = |k: &str| v.get(k).and_then(Value::as_u64).ok_or_else(|| bad(k));
        let prediction = match v.get("prediction") {
            Some(Value::String(s)) => Some(crate::rational::parse_rational(s)?),
            Some(Value::Null) | None => None,
            Some(_) => return Err(bad("prediction")),
        };
        let z = match v.get("z") {
            Some(Value::String(s)) => Some(s.parse().map_err(|_| bad("z"))?),
            Some(Value::Null) | None => None,
            Some(_) => return Err(bad("z")),
        };
        Ok(SimReport {
            observable: v.get("observable").and_then(Value::as_str).ok_or_else(|| bad("observable"))?.to_string(),
            t: count("t")? as usize,
            trials: count("trials")? as usize,
            seed: count("seed")?,
            mean: float("mean")?,
            stderr: float("stderr")?,
            prediction,
            z,
        })
    }
}

/// Mean and standard error of `f(X_t)`; with a registered eigenvalue `β` the prediction is `βᵗ f(x₀)`.
pub fn estimate_expectation<B, S>(sampler: &S, f: &Observable<B>, x0: &B, t: usize, trials: usize, seed: u64) -> Result<SimReport>
where
    B: Clone + Send + Sync,
    S: StepSampler<B> + ?Sized,
{
    if trials == 0 {
        return Err(Error::Precondition("at least one trial is needed".into()));
    }
    let ends = run_trajectories(sampler, x0, t, trials, seed)?;
    let values: Vec<f64> = ends.par_iter().map(|x| to_f64(&f.eval(x))).collect();
    let n = trials as f64;
    let mean = compensated_sum(&values) / n;
    let dev: Vec<f64> = values.iter().map(|v| (v - mean) * (v - mean)).collect();
    let stderr = if trials > 1 { (compensated_sum(&dev) / (n - 1.0)).sqrt() / n.sqrt() } else { 0.0 };
    let prediction = f.eigenvalue.as_ref().map(|b| pow(b, t) * f.eval(x0));
    let z = prediction.as_ref().and_then(|p| {
        let diff = mean - to_f64(p);
        if stderr > 0.0 {
            Some(diff / stderr)
        } else if diff == 0.0 {
            Some(0.0)
        } else {
            None
        }
    });
    Ok(SimReport { observable: f.name.clone(), t, trials, seed, mean, stderr, prediction, z })
}

#[derive(Clone, Debug, PartialEq)]
pub struct ChiSquaredReport {
    pub statistic: f64,
    pub dof: usize,
    pub p_value: f64,
}

/// Pearson's test of observed counts against exact probabilities.
///
/// Cells with expected count below 5 are pooled into one cell.
pub fn chi_squared<B: Ord>(counts: &BTreeMap<B, u64>, expected: &BTreeMap<B, Rational>) -> Result<ChiSquaredReport> {
    let total: u64 = counts.values().sum();
    if total == 0 {
        return Err(Error::Precondition("no observations".into()));
    }
    if counts.iter().any(|(s, &c)| c > 0 && expected.get(s).is_none_or(Zero::is_zero)) {
        return Ok(ChiSquaredReport { statistic: f64::INFINITY, dof: 0, p_value: 0.0 });
    }
    let n = total as f64;
    let mut cells: Vec<(f64, f64)> = Vec::new();
    let mut pooled = (0.0, 0.0);
    for (s, p) in expected {
        let e = to_f64(p) * n;
        let o = counts.get(s).copied().unwrap_or(0) as f64;
        if e < 5.0 {
            pooled.0 += o;
            pooled.1 += e;
        } else {
            cells.push((o, e));
        }
    }
    if pooled.1 > 0.0 {
        cells.push(pooled);
    }
    let statistic = compensated_sum(&cells.iter().map(|(o, e)| (o - e) * (o - e) / e).collect::<Vec<_>>());
    let dof = cells.len().saturating_sub(1);
    let p_value = if dof == 0 {
        1.0
    } else {
        let d = ChiSquared::new(dof as f64).map_err(|e| Error::Precondition(e.to_string()))?;
        1.0 - d.cdf(statistic)
    };
    Ok(ChiSquaredReport { statistic, dof, p_value })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebras::Fqsym;
    use crate::catalog::todo::todo_chain;
    use crate::composition::OperatorKind;
    use crate::hopf::Hopf;
    use crate::rational::int;

    #[test]
    fn decimal_formatting() {
        assert_eq!(decimal12(0.0), "0");
        assert_eq!(decimal12(1.0 / 3.0), "0.333333333333");
        assert_eq!(decimal12(160.0), "160");
        assert_eq!(decimal12(-2.5e-3), "-0.0025");
        assert_eq!(decimal12(123456789012345.0), "123456789012000");
    }

    #[test]
    fn report_json_round_trip() {
        let r = SimReport {
            observable: "f".into(),
            t: 2,
            trials: 10,
            seed: 3,
            mean: 0.25,
            stderr: 0.125,
            prediction: Some(crate::rational::rat(1, 4)),
            z: Some(0.0),
        };
        assert_eq!(SimReport::from_json(&r.to_json()).unwrap(), r);
    }

    #[test]
    fn constant_observable_has_no_spread() {
        let h = Hopf::new(Fqsym);
        let spec = todo_chain(&h, &OperatorKind::Ter, 3, 100).unwrap();
        let f = Observable::new("one", |_: &Permutation| int(1)).with_eigenvalue(int(1));
        let r = estimate_expectation(&spec, &f, &Permutation::identity(3), 4, 50, 9).unwrap();
        assert_eq!((r.mean, r.stderr, r.z), (1.0, 0.0, Some(0.0)));
    }

    #[test]
    fn runs_are_reproducible() {
        let h = Hopf::new(Fqsym);
        let spec = todo_chain(&h, &OperatorKind::Ter, 4, 100).unwrap();
        let a = run_trajectories(&spec, &Permutation::identity(4), 3, 200, 42).unwrap();
        let b = run_trajectories(&spec, &Permutation::identity(4), 3, 200, 42).unwrap();
        assert_eq!(a, b);
        assert_eq!(run_trajectories(&spec, &Permutation::identity(4), 0, 5, 1).unwrap(), vec![Permutation::identity(4); 5]);
    }

    #[test]
    fn frequencies_fit_the_exact_law() {
        let h = Hopf::new(Fqsym);
        let spec = todo_chain(&h, &OperatorKind::Trer { r: 2 }, 4, 100).unwrap();
        let k = spec.build_transition_matrix().unwrap();
        let x0 = Permutation::identity(4);
        let ends = run_trajectories(&spec, &x0, 2, 20_000, 5).unwrap();
        let report = chi_squared(&state_counts(&ends), &k.distribution_at_time(&x0, 2).unwrap()).unwrap();
        assert!(report.p_value > 1e-6, "{report:?}");
    }
}
