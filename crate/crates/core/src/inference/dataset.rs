//! Observation containers.

use crate::error::{Error, Result};

/// Time-stamped scalar observations, sorted by time on construction.
/// Duplicate times are kept and processed as zero-gap filter steps. An
/// optional mask marks prediction-only pseudo-points that carry no
/// observation.
#[derive(Debug, Clone)]
pub struct Dataset {
    times: Vec<f64>,
    values: Vec<f64>,
    observed: Vec<bool>,
}

impl Dataset {
    pub fn new(times: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        let n = times.len();
        Self::with_mask(times, values, vec![true; n])
    }

    pub fn with_mask(times: Vec<f64>, values: Vec<f64>, observed: Vec<bool>) -> Result<Self> {
        if times.len() != values.len() || times.len() != observed.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} times, {} values, {} mask entries",
                times.len(),
                values.len(),
                observed.len()
            )));
        }
        if times.is_empty() || !observed.iter().any(|&o| o) {
            return Err(Error::EmptyDataset);
        }
        if times.iter().any(|t| !t.is_finite()) {
            return Err(Error::NonFinite("observation times"));
        }
        for (i, (&v, &o)) in values.iter().zip(&observed).enumerate() {
            if o && !v.is_finite() {
                return Err(Error::NonFinite("observed values"));
            }
            let _ = i;
        }
        let mut idx: Vec<usize> = (0..times.len()).collect();
        idx.sort_by(|&a, &b| times[a].partial_cmp(&times[b]).unwrap());
        Ok(Self {
            times: idx.iter().map(|&i| times[i]).collect(),
            values: idx.iter().map(|&i| values[i]).collect(),
            observed: idx.iter().map(|&i| observed[i]).collect(),
        })
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn observed(&self) -> &[bool] {
        &self.observed
    }

    pub fn observed_count(&self) -> usize {
        self.observed.iter().filter(|&&o| o).count()
    }

    /// Times and values of the observed points only.
    pub fn observed_pairs(&self) -> (Vec<f64>, Vec<f64>) {
        let mut t = Vec::with_capacity(self.len());
        let mut y = Vec::with_capacity(self.len());
        for i in 0..self.len() {
            if self.observed[i] {
                t.push(self.times[i]);
                y.push(self.values[i]);
            }
        }
        (t, y)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sorts_and_keeps_duplicates() {
        let d = Dataset::new(vec![2.0, 0.5, 2.0, 1.0], vec![4.0, 1.0, 3.0, 2.0]).unwrap();
        assert_eq!(d.times(), &[0.5, 1.0, 2.0, 2.0]);
        assert_eq!(d.values()[0], 1.0);
        let dup: Vec<&f64> = d.values().iter().skip(2).collect();
        assert_eq!(dup.len(), 2);
    }

    #[test]
    fn rejects_empty_and_non_finite() {
        assert!(Dataset::new(vec![], vec![]).is_err());
        assert!(Dataset::new(vec![0.0], vec![f64::NAN]).is_err());
        assert!(Dataset::new(vec![f64::INFINITY], vec![0.0]).is_err());
        // fully masked-out data carries no information
        assert!(Dataset::with_mask(vec![0.0], vec![0.0], vec![false]).is_err());
        // but a masked point may be non-finite-free only when observed
        let d = Dataset::with_mask(vec![0.0, 1.0], vec![0.5, f64::NAN], vec![true, false]);
        assert!(d.is_ok());
    }
}
