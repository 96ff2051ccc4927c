use rand::Rng;

use super::{BitString, RandomSource};
use crate::error::{invalid, Result};

/// Binary symmetric channel with flip probability `p`, `0 <= p < 1/2`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NoiseModel {
    p: f64,
}

impl NoiseModel {
    pub fn new(p: f64) -> Result<Self> {
        if !(0.0..0.5).contains(&p) {
            return Err(invalid(format!(
                "flip probability {p} must lie in [0, 1/2)"
            )));
        }
        Ok(NoiseModel { p })
    }

    pub fn p(&self) -> f64 {
        self.p
    }
}

/// Flips each bit of `c` independently with probability `noise.p()`.
pub fn bsc_apply(c: &BitString, noise: NoiseModel, rng: &mut RandomSource) -> BitString {
    let mut out = c.clone();
    if noise.p() == 0.0 {
        return out;
    }
    for i in 0..c.len() {
        if rng.random::<f64>() < noise.p() {
            out.flip0(i);
        }
    }
    out
}

/// Error vector `b ~ Bern(p)^len`.
pub fn error_pattern(len: usize, noise: NoiseModel, rng: &mut RandomSource) -> BitString {
    bsc_apply(&BitString::zeros(len), noise, rng)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bitcore::hamming;

    #[test]
    fn zero_noise_is_identity() {
        let c: BitString = "1011001".parse().unwrap();
        let mut rng = RandomSource::new(3);
        assert_eq!(bsc_apply(&c, NoiseModel::new(0.0).unwrap(), &mut rng), c);
    }

    #[test]
    fn rejects_half_and_above() {
        assert!(NoiseModel::new(0.5).is_err());
        assert!(NoiseModel::new(0.7).is_err());
        assert!(NoiseModel::new(-0.1).is_err());
        assert!(NoiseModel::new(f64::NAN).is_err());
        assert!(NoiseModel::new(0.499).is_ok());
    }

    #[test]
    fn flip_count_matches_binomial() {
        // d = 10000, p = 0.1: mean 1000, sd 30
        let c = BitString::zeros(10_000);
        let mut rng = RandomSource::new(2024);
        let noisy = bsc_apply(&c, NoiseModel::new(0.1).unwrap(), &mut rng);
        let flips = hamming(&c, &noisy).unwrap() as f64;
        assert!((flips - 1000.0).abs() <= 90.0, "flips = {flips}");
    }

    #[test]
    fn same_label_same_output() {
        let c = BitString::zeros(500);
        let noise = NoiseModel::new(0.2).unwrap();
        let root = RandomSource::new(11);
        let a = bsc_apply(&c, noise, &mut root.split("bsc"));
        let b = bsc_apply(&c, noise, &mut root.split("bsc"));
        assert_eq!(a, b);
    }

    #[test]
    fn empirical_rate_within_three_standard_errors() {
        let p = 0.07;
        let trials = 100_000usize;
        let mut rng = RandomSource::new(5);
        let noise = NoiseModel::new(p).unwrap();
        let flips: usize = (0..trials / 100)
            .map(|_| error_pattern(100, noise, &mut rng).weight())
            .sum();
        let rate = flips as f64 / trials as f64;
        let se = (p * (1.0 - p) / trials as f64).sqrt();
        assert!((rate - p).abs() <= 3.0 * se, "rate {rate}");
    }
}
