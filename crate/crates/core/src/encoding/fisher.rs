//! Fisher vectors over a diagonal GMM.
//!
//! The raw vector stacks the mean gradients of all components followed by
//! the variance gradients of all components, each block `components x dim`
//! in component order:
//!
//! ```text
//! g_mu[k][d]  = 1/(T sqrt(w_k))  * sum_t p_t(k) (x_td - mu_kd) / sigma_kd
//! g_var[k][d] = 1/(T sqrt(2 w_k)) * sum_t p_t(k) ((x_td - mu_kd)^2 / sigma_kd^2 - 1)
//! ```
//!
//! The encoding applies signed square roots and then L2 normalisation.

use super::{EncodedVector, EncodingKind, GmmModel};
use crate::dataset::DescriptorSet;
use crate::{Error, Result};

/// Unnormalised gradient vector of length `2 * components * dim`.
pub fn fisher_gradients(gmm: &GmmModel, video: &DescriptorSet) -> Result<Vec<f64>> {
    let dim = gmm.dim();
    if video.dim() != dim {
        return Err(Error::DimMismatch { expected: dim, found: video.dim() });
    }
    let k = gmm.components();
    let mut grad = vec![0.0; 2 * k * dim];
    let (mu_block, var_block) = grad.split_at_mut(k * dim);
    let mut post = vec![0.0; k];
    for x in video.iter_rows() {
        gmm.log_joint(x, &mut post);
        GmmModel::posteriors(&mut post);
        for (c, p) in post.iter().enumerate() {
            if *p == 0.0 {
                continue;
            }
            let mean = gmm.mean(c);
            let var = gmm.variance(c);
            for d in 0..dim {
                let z = (x[d] - mean[d]) / var[d].sqrt();
                mu_block[c * dim + d] += p * z;
                var_block[c * dim + d] += p * (z * z - 1.0);
            }
        }
    }
    let t = video.rows() as f64;
    for (c, w) in gmm.weights().iter().enumerate() {
        let mu_scale = 1.0 / (t * w.sqrt());
        let var_scale = 1.0 / (t * (2.0 * w).sqrt());
        mu_block[c * dim..(c + 1) * dim].iter_mut().for_each(|g| *g *= mu_scale);
        var_block[c * dim..(c + 1) * dim].iter_mut().for_each(|g| *g *= var_scale);
    }
    Ok(grad)
}

/// Power- and L2-normalised Fisher vector. An all-zero gradient stays zero.
pub fn encode_fisher(gmm: &GmmModel, video: &DescriptorSet) -> Result<EncodedVector> {
    let mut v = fisher_gradients(gmm, video)?;
    v.iter_mut().for_each(|g| *g = g.signum() * g.abs().sqrt());
    let norm = v.iter().map(|g| g * g).sum::<f64>().sqrt();
    if norm > 0.0 {
        v.iter_mut().for_each(|g| *g /= norm);
    }
    Ok(EncodedVector::new(EncodingKind::Fv, v))
}
