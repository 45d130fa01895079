//! Summaries of Monte Carlo sample sets.
//!
//! Every estimator in the crate returns a [`McEstimate`]: the point value,
//! its standard error, the sample count, the master seed that produced the
//! samples, and a tag saying which estimator variant was applied.  The
//! median-of-means variant partitions the samples into blocks and takes
//! the median of the block means; it is far less sensitive to the heavy
//! tails that exponential functionals produce.

/// Which estimator produced the point value of a [`McEstimate`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EstimatorVariant {
    PlainMean,
    /// Median of block means over the given number of blocks.
    MedianOfMeans { blocks: usize },
}

impl std::fmt::Display for EstimatorVariant {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            EstimatorVariant::PlainMean => write!(f, "plain_mean"),
            EstimatorVariant::MedianOfMeans { blocks } => {
                write!(f, "median_of_means_{blocks}")
            }
        }
    }
}

/// Default block count for median-of-means summaries.
pub const DEFAULT_MOM_BLOCKS: usize = 16;

/// A summarized Monte Carlo estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub mean: f64,
    pub stderr: f64,
    pub n_samples: usize,
    pub seed: u64,
    pub variant: EstimatorVariant,
}

impl McEstimate {
    /// Plain sample mean with standard error s/√n (0 for n < 2).
    pub fn from_samples(samples: &[f64], seed: u64) -> Self {
        let n = samples.len();
        let mean = if n == 0 {
            f64::NAN
        } else {
            samples.iter().sum::<f64>() / n as f64
        };
        let stderr = if n < 2 {
            0.0
        } else {
            let var = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
            (var / n as f64).sqrt()
        };
        McEstimate {
            mean,
            stderr,
            n_samples: n,
            seed,
            variant: EstimatorVariant::PlainMean,
        }
    }

    /// Median of block means over `blocks` contiguous blocks.
    ///
    /// The reported standard error is the asymptotic one for a median of
    /// i.i.d. block means, √(π/2) · sd(block means)/√blocks.
    pub fn median_of_means(samples: &[f64], blocks: usize, seed: u64) -> Self {
        let n = samples.len();
        let blocks = blocks.clamp(1, n.max(1));
        let mut block_means = Vec::with_capacity(blocks);
        // Spread the remainder over the first blocks so sizes differ by ≤ 1.
        let base = n / blocks;
        let extra = n % blocks;
        let mut start = 0;
        for b in 0..blocks {
            let len = base + usize::from(b < extra);
            if len == 0 {
                continue;
            }
            let chunk = &samples[start..start + len];
            block_means.push(chunk.iter().sum::<f64>() / len as f64);
            start += len;
        }
        let mean = median(&mut block_means);
        let k = block_means.len();
        let stderr = if k < 2 {
            0.0
        } else {
            let bm = block_means.iter().sum::<f64>() / k as f64;
            let var = block_means.iter().map(|x| (x - bm).powi(2)).sum::<f64>() / (k - 1) as f64;
            (std::f64::consts::PI / 2.0).sqrt() * (var / k as f64).sqrt()
        };
        McEstimate {
            mean,
            stderr,
            n_samples: n,
            seed,
            variant: EstimatorVariant::MedianOfMeans { blocks },
        }
    }

    /// Rescales the estimate by a deterministic positive factor.
    pub fn scaled(mut self, factor: f64) -> Self {
        self.mean *= factor;
        self.stderr *= factor.abs();
        self
    }
}

/// Kolmogorov–Smirnov distance between an empirical sample and a reference
/// CDF: sup_x |F̂_n(x) − F(x)|, evaluated at the jump points of F̂_n.
///
/// Sorts `samples` in place.
pub fn ks_statistic(samples: &mut [f64], cdf: impl Fn(f64) -> f64) -> f64 {
    assert!(!samples.is_empty(), "KS statistic of an empty sample");
    samples.sort_by(|a, b| a.partial_cmp(b).expect("non-finite sample"));
    let n = samples.len() as f64;
    let mut sup = 0.0f64;
    for (i, &x) in samples.iter().enumerate() {
        let f = cdf(x);
        let lo = (f - i as f64 / n).abs();
        let hi = ((i + 1) as f64 / n - f).abs();
        sup = sup.max(lo).max(hi);
    }
    sup
}

fn median(values: &mut [f64]) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    values.sort_by(|a, b| a.partial_cmp(b).expect("non-finite block mean"));
    let k = values.len();
    if k % 2 == 1 {
        values[k / 2]
    } else {
        0.5 * (values[k / 2 - 1] + values[k / 2])
    }
}
