//! Cohen's kappa for two annotators over the same items.

use std::collections::HashMap;
use std::hash::Hash;

use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum KappaError {
    #[error("annotators labelled {0} and {1} items")]
    LengthMismatch(usize, usize),
    #[error("no items")]
    Empty,
    #[error("chance agreement is 1 but observed agreement is not")]
    DegenerateMarginals,
    #[error("need at least two annotators")]
    TooFewAnnotators,
}

/// `(Po - Pe) / (1 - Pe)`. When both annotators use one single identical
/// label throughout, `Pe = Po = 1` and the result is 1.
pub fn cohens_kappa<T: Eq + Hash>(a: &[T], b: &[T]) -> Result<f64, KappaError> {
    if a.len() != b.len() {
        return Err(KappaError::LengthMismatch(a.len(), b.len()));
    }
    if a.is_empty() {
        return Err(KappaError::Empty);
    }
    let n = a.len() as f64;
    let agree = a.iter().zip(b).filter(|(x, y)| x == y).count();
    let mut ma: HashMap<&T, usize> = HashMap::new();
    let mut mb: HashMap<&T, usize> = HashMap::new();
    for (x, y) in a.iter().zip(b) {
        *ma.entry(x).or_insert(0) += 1;
        *mb.entry(y).or_insert(0) += 1;
    }
    let po = agree as f64 / n;
    let pe = ma
        .iter()
        .map(|(label, ca)| *ca as f64 * mb.get(label).copied().unwrap_or(0) as f64)
        .sum::<f64>()
        / (n * n);
    if (1.0 - pe).abs() < f64::EPSILON {
        return if agree == a.len() { Ok(1.0) } else { Err(KappaError::DegenerateMarginals) };
    }
    Ok((po - pe) / (1.0 - pe))
}

/// Mean of Cohen's kappa over all annotator pairs.
pub fn mean_pairwise_kappa<T: Eq + Hash>(annotators: &[Vec<T>]) -> Result<f64, KappaError> {
    if annotators.len() < 2 {
        return Err(KappaError::TooFewAnnotators);
    }
    let mut sum = 0.0;
    let mut pairs = 0;
    for i in 0..annotators.len() {
        for j in i + 1..annotators.len() {
            sum += cohens_kappa(&annotators[i], &annotators[j])?;
            pairs += 1;
        }
    }
    Ok(sum / pairs as f64)
}

/// A fraction as a percentage with two decimals, e.g. `0.70234` -> `"70.23"`.
pub fn format_percent(x: f64) -> String {
    format!("{:.2}", x * 100.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn worked_examples() {
        assert_eq!(cohens_kappa(&[1, 1, 0, 0], &[1, 0, 0, 0]), Ok(0.5));
        assert_eq!(cohens_kappa(&["x", "y", "z"], &["x", "y", "z"]), Ok(1.0));
        assert_eq!(cohens_kappa(&[3, 3, 3], &[3, 3, 3]), Ok(1.0));
        // perfect disagreement on a balanced binary task
        assert_eq!(cohens_kappa(&[1, 0], &[0, 1]), Ok(-1.0));
    }

    #[test]
    fn errors() {
        assert_eq!(cohens_kappa(&[1], &[1, 2]), Err(KappaError::LengthMismatch(1, 2)));
        assert_eq!(cohens_kappa::<u8>(&[], &[]), Err(KappaError::Empty));
        assert_eq!(mean_pairwise_kappa(&[vec![1]]), Err(KappaError::TooFewAnnotators));
    }

    #[test]
    fn pairwise_mean() {
        let a = vec![1, 1, 0, 0];
        let b = vec![1, 0, 0, 0];
        let k = mean_pairwise_kappa(&[a.clone(), a.clone(), b]).unwrap();
        assert!((k - (1.0 + 0.5 + 0.5) / 3.0).abs() < 1e-12);
    }

    #[test]
    fn percent() {
        assert_eq!(format_percent(0.70234), "70.23");
        assert_eq!(format_percent(16.0 / 30.0), "53.33");
        assert_eq!(format_percent(1.0), "100.00");
    }
}
