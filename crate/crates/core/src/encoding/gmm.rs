use std::f64::consts::PI;

use super::{expect_end, expect_rows, train_kmeans, DescriptorPool};
use crate::{textio, Error, Result};

const WEIGHT_FLOOR: f64 = 1e-12;
const VARIANCE_SCALE: f64 = 1e-6;
const VARIANCE_MIN: f64 = 1e-12;

/// Diagonal-covariance Gaussian mixture.
#[derive(Debug, Clone, PartialEq)]
pub struct GmmModel {
    dim: usize,
    weights: Vec<f64>,
    means: Vec<f64>,
    variances: Vec<f64>,
}

impl GmmModel {
    pub fn new(dim: usize, weights: Vec<f64>, means: Vec<f64>, variances: Vec<f64>) -> Result<Self> {
        let k = weights.len();
        if dim == 0 || k == 0 || means.len() != k * dim || variances.len() != k * dim {
            return Err(Error::invalid("inconsistent GMM parameter shapes"));
        }
        if weights.iter().any(|w| !(w.is_finite() && *w > 0.0)) {
            return Err(Error::invalid("GMM weights must be positive"));
        }
        if (weights.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
            return Err(Error::invalid("GMM weights must sum to 1"));
        }
        if means.iter().any(|m| !m.is_finite()) {
            return Err(Error::invalid("GMM means must be finite"));
        }
        if variances.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
            return Err(Error::invalid("GMM variances must be positive"));
        }
        Ok(GmmModel { dim, weights, means, variances })
    }

    pub fn components(&self) -> usize {
        self.weights.len()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn mean(&self, k: usize) -> &[f64] {
        &self.means[k * self.dim..(k + 1) * self.dim]
    }

    pub fn variance(&self, k: usize) -> &[f64] {
        &self.variances[k * self.dim..(k + 1) * self.dim]
    }

    /// `ln(w_k) + ln N(x | mu_k, diag(var_k))` for every component.
    pub(crate) fn log_joint(&self, x: &[f64], out: &mut [f64]) {
        let half_log_2pi = 0.5 * (2.0 * PI).ln();
        for (k, o) in out.iter_mut().enumerate() {
            let mut acc = self.weights[k].ln();
            for ((xd, m), v) in x.iter().zip(self.mean(k)).zip(self.variance(k)) {
                let diff = xd - m;
                acc -= half_log_2pi + 0.5 * v.ln() + 0.5 * diff * diff / v;
            }
            *o = acc;
        }
    }

    /// Converts log joints to posteriors in place and returns the log-likelihood.
    pub(crate) fn posteriors(log_joint: &mut [f64]) -> f64 {
        let max = log_joint.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let sum: f64 = log_joint.iter().map(|l| (l - max).exp()).sum();
        let lse = max + sum.ln();
        log_joint.iter_mut().for_each(|l| *l = (*l - lse).exp());
        lse
    }

    /// Mean per-point log-likelihood of `pool`.
    pub fn mean_log_likelihood(&self, pool: &DescriptorPool) -> f64 {
        let mut buf = vec![0.0; self.components()];
        let total: f64 = pool
            .iter_rows()
            .map(|r| {
                self.log_joint(r, &mut buf);
                Self::posteriors(&mut buf)
            })
            .sum();
        total / pool.rows() as f64
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("gmm {} {}\n", self.components(), self.dim);
        textio::push_row(&mut out, &self.weights);
        for k in 0..self.components() {
            textio::push_row(&mut out, self.mean(k));
        }
        for k in 0..self.components() {
            textio::push_row(&mut out, self.variance(k));
        }
        out
    }

    pub(crate) fn parse_body(k: usize, dim: usize, body: &[(usize, &str)]) -> Result<Self> {
        let (weights, rest) = expect_rows(body, 1, k, "weight")?;
        let (means, rest) = expect_rows(rest, k, dim, "mean")?;
        let (variances, rest) = expect_rows(rest, k, dim, "variance")?;
        expect_end(rest)?;
        let line = body.first().map_or(1, |(l, _)| *l);
        GmmModel::new(dim, weights, means, variances).map_err(|e| Error::parse(line, e.to_string()))
    }
}

#[derive(Debug, Clone)]
pub struct GmmFit {
    pub model: GmmModel,
    /// Mean per-point log-likelihood before each M-step.
    pub log_likelihoods: Vec<f64>,
}

fn variance_floor(pool: &DescriptorPool) -> Vec<f64> {
    pool.variance()
        .into_iter()
        .map(|v| (VARIANCE_SCALE * v).max(VARIANCE_MIN))
        .collect()
}

/// Closed-form update from responsibilities (`resp` is row-major `n x k`).
fn m_step(pool: &DescriptorPool, resp: &[f64], k: usize, floor: &[f64]) -> GmmModel {
    let dim = pool.dim();
    let n = pool.rows() as f64;
    let mut nk = vec![0.0; k];
    let mut means = vec![0.0; k * dim];
    for (i, r) in pool.iter_rows().enumerate() {
        for c in 0..k {
            let g = resp[i * k + c];
            nk[c] += g;
            for (m, x) in means[c * dim..(c + 1) * dim].iter_mut().zip(r) {
                *m += g * x;
            }
        }
    }
    let mut variances = vec![0.0; k * dim];
    for c in 0..k {
        if nk[c] > 0.0 {
            means[c * dim..(c + 1) * dim].iter_mut().for_each(|m| *m /= nk[c]);
        }
    }
    for (i, r) in pool.iter_rows().enumerate() {
        for c in 0..k {
            let g = resp[i * k + c];
            let mean = &means[c * dim..(c + 1) * dim];
            for ((v, x), m) in variances[c * dim..(c + 1) * dim].iter_mut().zip(r).zip(mean) {
                *v += g * (x - m) * (x - m);
            }
        }
    }
    for c in 0..k {
        for (d, v) in variances[c * dim..(c + 1) * dim].iter_mut().enumerate() {
            let raw = if nk[c] > 0.0 { *v / nk[c] } else { 0.0 };
            *v = raw.max(floor[d]);
        }
    }
    let mut weights: Vec<f64> = nk.iter().map(|c| (c / n).max(WEIGHT_FLOOR)).collect();
    let s: f64 = weights.iter().sum();
    weights.iter_mut().for_each(|w| *w /= s);
    GmmModel { dim, weights, means, variances }
}

/// EM for a diagonal GMM, initialised from hard k-means assignments.
pub fn train_gmm(
    pool: &DescriptorPool,
    k: usize,
    seed: u64,
    max_iters: usize,
    tol: f64,
) -> Result<GmmFit> {
    if k == 0 {
        return Err(Error::invalid("GMM needs at least one component"));
    }
    if k > pool.rows() {
        return Err(Error::invalid(format!(
            "component count {k} exceeds pool size {}",
            pool.rows()
        )));
    }
    let floor = variance_floor(pool);
    let codebook = train_kmeans(pool, k, seed, max_iters)?.codebook;
    let mut resp = vec![0.0; pool.rows() * k];
    for (i, r) in pool.iter_rows().enumerate() {
        resp[i * k + codebook.nearest(r).0] = 1.0;
    }
    let mut model = m_step(pool, &resp, k, &floor);
    // k-means may leave a center with no points; keep it where k-means put it
    for c in 0..k {
        if !resp.iter().skip(c).step_by(k).any(|g| *g > 0.0) {
            model.means[c * pool.dim()..(c + 1) * pool.dim()].copy_from_slice(codebook.center(c));
        }
    }

    let mut log_likelihoods = Vec::new();
    let mut buf = vec![0.0; k];
    for it in 0..max_iters.max(1) {
        let mut total = 0.0;
        for (i, r) in pool.iter_rows().enumerate() {
            model.log_joint(r, &mut buf);
            total += GmmModel::posteriors(&mut buf);
            resp[i * k..(i + 1) * k].copy_from_slice(&buf);
        }
        let ll = total / pool.rows() as f64;
        let prev = log_likelihoods.last().copied();
        log_likelihoods.push(ll);
        if it > 0 && prev.is_some_and(|p| ll - p < tol) {
            break;
        }
        model = m_step(pool, &resp, k, &floor);
    }
    Ok(GmmFit { model, log_likelihoods })
}
