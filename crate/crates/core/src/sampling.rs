//! Key strategies and deterministic parallel averaging of flagged channels.

use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::FlaggedChannel;
use crate::error::{QauthError, Result};
use crate::seeds::job_rng;

pub const DEFAULT_BATCHES: usize = 20;

/// Chunk size for exhaustive sums; fixed so the summation order does not
/// depend on the thread count.
const CHUNK: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum KeyStrategy {
    /// Every key; `allow_two_qubits` unlocks the 11520-element group.
    Exhaustive {
        allow_two_qubits: bool,
    },
    Sampled {
        count: usize,
        seed: u64,
    },
}

/// Key-averaged channel. For sampled strategies `batches` holds the means of
/// consecutive equal-size batches, for batch-means error estimates.
#[derive(Clone, Debug)]
pub struct AveragedChannel {
    pub mean: FlaggedChannel,
    pub batches: Vec<FlaggedChannel>,
    pub samples: usize,
}

impl AveragedChannel {
    pub fn is_sampled(&self) -> bool {
        !self.batches.is_empty()
    }
}

fn sum_channels<I: Iterator<Item = Result<FlaggedChannel>>>(mut it: I) -> Result<Option<FlaggedChannel>> {
    let Some(first) = it.next() else {
        return Ok(None);
    };
    let mut acc = first?;
    for c in it {
        acc.add_scaled(&c?, 1.0)?;
    }
    Ok(Some(acc))
}

/// Uniform average of `f(item)` over `items`, summed in fixed-size chunks in
/// item order.
pub fn exhaustive_average<T, F>(items: &[T], f: F) -> Result<AveragedChannel>
where
    T: Sync,
    F: Fn(&T) -> Result<FlaggedChannel> + Sync,
{
    if items.is_empty() {
        return Err(QauthError::Infeasible("averaging over no keys".into()));
    }
    let partials: Vec<FlaggedChannel> = items
        .par_chunks(CHUNK)
        .map(|chunk| sum_channels(chunk.iter().map(&f)).map(|c| c.expect("non-empty chunk")))
        .collect::<Result<_>>()?;
    let mut mean = sum_channels(partials.into_iter().map(Ok))?.expect("non-empty");
    mean.scale(1.0 / items.len() as f64);
    Ok(AveragedChannel {
        mean,
        batches: Vec::new(),
        samples: items.len(),
    })
}

/// Monte-Carlo average of `samples` draws split over `batches` batches; batch
/// `b` draws from its own generator derived from `(seed, b)`.
pub fn sampled_average<F>(samples: usize, batches: usize, seed: u64, draw: F) -> Result<AveragedChannel>
where
    F: Fn(&mut ChaCha8Rng) -> Result<FlaggedChannel> + Sync,
{
    if batches < 2 || samples < batches {
        return Err(QauthError::Infeasible(format!(
            "{samples} samples cannot fill {batches} batches"
        )));
    }
    let sizes: Vec<usize> = (0..batches)
        .map(|b| samples / batches + usize::from(b < samples % batches))
        .collect();
    let sums: Vec<FlaggedChannel> = sizes
        .par_iter()
        .enumerate()
        .map(|(b, &size)| {
            let mut rng = job_rng(seed, &format!("batch-{b}"));
            sum_channels((0..size).map(|_| draw(&mut rng))).map(|c| c.expect("non-empty batch"))
        })
        .collect::<Result<_>>()?;
    let mut mean = sum_channels(sums.iter().cloned().map(Ok))?.expect("non-empty");
    mean.scale(1.0 / samples as f64);
    let batches = sums
        .into_iter()
        .zip(&sizes)
        .map(|(mut c, &size)| {
            c.scale(1.0 / size as f64);
            c
        })
        .collect();
    Ok(AveragedChannel { mean, batches, samples })
}

/// Mean and standard error of the mean.
pub fn mean_and_stderr(values: &[f64]) -> (f64, f64) {
    let k = values.len() as f64;
    let mean = values.iter().sum::<f64>() / k;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (k - 1.0);
    (mean, (var / k).sqrt())
}
