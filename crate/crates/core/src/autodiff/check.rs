use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{Array, AutodiffError, Graph, Var};

/// Settings for [`finite_difference_check`].
#[derive(Debug, Clone)]
pub struct FdConfig {
    /// Central-difference step.
    pub eps: f64,
    /// Check at most this many randomly chosen coordinates (all when `None`).
    pub max_coords: Option<usize>,
    pub seed: u64,
}

impl Default for FdConfig {
    fn default() -> Self {
        Self {
            eps: 1e-5,
            max_coords: None,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FdReport {
    /// Largest `|analytic - numeric| / max(|analytic|, |numeric|, 1e-8)`.
    pub max_rel_error: f64,
    pub checked: usize,
    /// Coordinates whose perturbation flipped a relu input sign. The function
    /// is not differentiable across the kink, so these are excluded.
    pub skipped_kinks: usize,
}

/// Compares reverse-mode gradients against central differences.
///
/// `build` records the scalar loss on a fresh graph given one leaf per
/// parameter array. It is called once for the analytic gradient and twice per
/// checked coordinate.
pub fn finite_difference_check<F>(
    params: &[Array],
    config: &FdConfig,
    build: F,
) -> Result<FdReport, AutodiffError>
where
    F: Fn(&mut Graph, &[Var]) -> Result<Var, AutodiffError>,
{
    let eval = |values: &[Array]| -> Result<(f64, Vec<bool>), AutodiffError> {
        let mut g = Graph::new();
        let leaves = values
            .iter()
            .map(|a| g.leaf(a.clone()))
            .collect::<Result<Vec<_>, _>>()?;
        let loss = build(&mut g, &leaves)?;
        let v = g.value(loss);
        if !v.is_scalar() {
            return Err(AutodiffError::NonScalarLoss {
                shape: v.shape().to_vec(),
            });
        }
        let v = v.data()[0];
        if !v.is_finite() {
            return Err(AutodiffError::NonFinite { op: "loss" });
        }
        Ok((v, g.relu_signs().to_vec()))
    };

    let mut g = Graph::new();
    let leaves = params
        .iter()
        .map(|a| g.leaf(a.clone()))
        .collect::<Result<Vec<_>, _>>()?;
    let loss = build(&mut g, &leaves)?;
    g.backward(loss)?;
    let analytic: Vec<Array> = leaves
        .iter()
        .map(|&l| g.grad(l).expect("backward ran"))
        .collect();
    let base_signs = g.relu_signs().to_vec();

    let mut coords: Vec<(usize, usize)> = params
        .iter()
        .enumerate()
        .flat_map(|(p, a)| (0..a.len()).map(move |i| (p, i)))
        .collect();
    if let Some(limit) = config.max_coords {
        if limit < coords.len() {
            let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
            let mut picked: Vec<usize> = sample(&mut rng, coords.len(), limit).into_vec();
            picked.sort_unstable();
            coords = picked.into_iter().map(|i| coords[i]).collect();
        }
    }

    let mut work = params.to_vec();
    let mut report = FdReport {
        max_rel_error: 0.0,
        checked: 0,
        skipped_kinks: 0,
    };
    for (p, i) in coords {
        let original = work[p].data()[i];
        work[p].data_mut()[i] = original + config.eps;
        let (plus, plus_signs) = eval(&work)?;
        work[p].data_mut()[i] = original - config.eps;
        let (minus, minus_signs) = eval(&work)?;
        work[p].data_mut()[i] = original;
        if plus_signs != base_signs || minus_signs != base_signs {
            report.skipped_kinks += 1;
            continue;
        }
        let numeric = (plus - minus) / (2.0 * config.eps);
        let a = analytic[p].data()[i];
        let rel = (a - numeric).abs() / a.abs().max(numeric.abs()).max(1e-8);
        report.max_rel_error = report.max_rel_error.max(rel);
        report.checked += 1;
    }
    Ok(report)
}
