use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SplitError {
    #[error("split needs {needed} instances but only {available} are available")]
    InfeasibleSpec { needed: usize, available: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitSpec {
    pub train: usize,
    pub dev: usize,
    pub test: usize,
    pub seed: u64,
}

impl SplitSpec {
    /// Published sizes of the large configuration.
    pub const fn large(seed: u64) -> Self {
        Self { train: 700_000, dev: 50_000, test: 62_707, seed }
    }

    /// Published sizes of the lite configuration.
    pub const fn lite(seed: u64) -> Self {
        Self { train: 87_500, dev: 6_250, test: 6_250, seed }
    }

    pub fn total(&self) -> usize {
        self.train + self.dev + self.test
    }

    /// Parses `train,dev,test`.
    pub fn parse_sizes(sizes: &str, seed: u64) -> Result<Self, String> {
        let parts: Vec<usize> = sizes
            .split(',')
            .map(|p| p.trim().replace('_', "").parse::<usize>())
            .collect::<Result<_, _>>()
            .map_err(|e| format!("bad split `{sizes}`: {e}"))?;
        match parts[..] {
            [train, dev, test] => Ok(Self { train, dev, test, seed }),
            _ => Err(format!("bad split `{sizes}`: expected train,dev,test")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Splits<T> {
    pub train: Vec<T>,
    pub dev: Vec<T>,
    pub test: Vec<T>,
    /// Instances not drawn into any split, in input order.
    pub holdout: Vec<T>,
}

/// Draws disjoint uniform random subsets of the requested sizes. Each split
/// keeps the input order of its members, and the result depends only on
/// the input order and `spec.seed`.
pub fn split_dataset<T>(instances: Vec<T>, spec: &SplitSpec) -> Result<Splits<T>, SplitError> {
    let available = instances.len();
    let needed = spec.total();
    if needed > available {
        return Err(SplitError::InfeasibleSpec { needed, available });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let drawn = index::sample(&mut rng, available, needed).into_vec();

    // 0 = holdout, 1..=3 = train/dev/test
    let mut slot = vec![0u8; available];
    for (k, &i) in drawn.iter().enumerate() {
        slot[i] = if k < spec.train {
            1
        } else if k < spec.train + spec.dev {
            2
        } else {
            3
        };
    }
    let mut out = Splits { train: Vec::with_capacity(spec.train), dev: Vec::with_capacity(spec.dev), test: Vec::with_capacity(spec.test), holdout: Vec::new() };
    for (item, s) in instances.into_iter().zip(slot) {
        match s {
            1 => out.train.push(item),
            2 => out.dev.push(item),
            3 => out.test.push(item),
            _ => out.holdout.push(item),
        }
    }
    Ok(out)
}

/// Two disjoint draws of `per_setting` instances each, for small human
/// evaluation sets where no instance may be seen in both settings.
pub fn tiny_draws<T>(instances: Vec<T>, per_setting: usize, seed: u64) -> Result<(Vec<T>, Vec<T>), SplitError> {
    let spec = SplitSpec { train: per_setting, dev: per_setting, test: 0, seed };
    let s = split_dataset(instances, &spec)?;
    Ok((s.train, s.dev))
}

#[cfg(test)]
mod tests {
    use std::collections::HashSet;

    use proptest::prelude::*;

    use super::*;

    #[test]
    fn sizes_disjoint_and_reproducible() {
        let items: Vec<u32> = (0..100).collect();
        let spec = SplitSpec { train: 70, dev: 15, test: 15, seed: 17 };
        let a = split_dataset(items.clone(), &spec).unwrap();
        assert_eq!((a.train.len(), a.dev.len(), a.test.len(), a.holdout.len()), (70, 15, 15, 0));
        let all: HashSet<u32> = a.train.iter().chain(&a.dev).chain(&a.test).copied().collect();
        assert_eq!(all.len(), 100);
        let b = split_dataset(items.clone(), &spec).unwrap();
        assert_eq!(a, b);
        let c = split_dataset(items, &SplitSpec { seed: 18, ..spec }).unwrap();
        assert_ne!(a.dev, c.dev);
    }

    #[test]
    fn infeasible() {
        let spec = SplitSpec { train: 5, dev: 5, test: 1, seed: 0 };
        assert_eq!(
            split_dataset(vec![0; 10], &spec),
            Err(SplitError::InfeasibleSpec { needed: 11, available: 10 })
        );
    }

    #[test]
    fn published_configurations() {
        let lite = SplitSpec::lite(0);
        assert_eq!((lite.train, lite.dev, lite.test), (87_500, 6_250, 6_250));
        assert_eq!(lite.total(), 100_000);
        let large = SplitSpec::large(0);
        assert_eq!((large.train, large.dev, large.test), (700_000, 50_000, 62_707));
        assert_eq!(large.total(), 812_707);
        assert_eq!(SplitSpec::parse_sizes("700000,50_000, 62707", 1).unwrap(), SplitSpec::large(1));
        assert!(SplitSpec::parse_sizes("1,2", 1).is_err());
    }

    #[test]
    fn tiny_draws_are_disjoint() {
        let (a, b) = tiny_draws((0..100).collect::<Vec<u32>>(), 30, 5).unwrap();
        assert_eq!((a.len(), b.len()), (30, 30));
        let sa: HashSet<_> = a.into_iter().collect();
        assert!(b.iter().all(|x| !sa.contains(x)));
    }

    proptest! {
        #[test]
        fn splits_partition_input(n in 0usize..300, tr in 0usize..100, dv in 0usize..100, te in 0usize..100, seed: u64) {
            let spec = SplitSpec { train: tr, dev: dv, test: te, seed };
            let items: Vec<usize> = (0..n).collect();
            match split_dataset(items, &spec) {
                Err(_) => prop_assert!(tr + dv + te > n),
                Ok(s) => {
                    let mut all: Vec<usize> = s.train.iter().chain(&s.dev).chain(&s.test).chain(&s.holdout).copied().collect();
                    all.sort_unstable();
                    prop_assert_eq!(all, (0..n).collect::<Vec<_>>());
                    prop_assert!(s.train.windows(2).all(|w| w[0] < w[1]));
                }
            }
        }
    }
}
