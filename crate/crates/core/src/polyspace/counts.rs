use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};

fn binom(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

/// One line of the class table: `multiplicity` generators in each of
/// `classes` multidegree classes with the given pattern.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClassCount {
    pub pattern: &'static str,
    pub total_degree: u32,
    pub multiplicity: u64,
    pub classes: u64,
}

impl ClassCount {
    pub fn count(&self) -> u64 {
        self.multiplicity * self.classes
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DegreeClassCount {
    pub n: u64,
    pub classes: Vec<ClassCount>,
    /// From the closed sextic.
    pub total: u64,
    /// Sum of the class counts.
    pub class_sum: u64,
    pub by_total_degree: BTreeMap<u32, u64>,
}

impl DegreeClassCount {
    pub fn consistent(&self) -> bool {
        self.total == self.class_sum
    }
}

/// `(16n^6 - 24n^5 + n^4 + 18n^3 + n^2 - 12n) / 36`.
pub fn sextic_total(n: u64) -> Result<u64> {
    let n = n as i128;
    let num = 16 * n.pow(6) - 24 * n.pow(5) + n.pow(4) + 18 * n.pow(3) + n.pow(2) - 12 * n;
    if num % 36 != 0 {
        return Err(Error::Inconsistent);
    }
    u64::try_from(num / 36).map_err(|_| Error::InvalidParameter("count overflows u64".into()))
}

/// Predicted minimal generator counts of the rigid multiview ideal per
/// class of multidegrees.
pub fn conjecture_generator_count(n: u64) -> Result<DegreeClassCount> {
    if n < 2 {
        return Err(Error::TooFewCameras {
            needed: 2,
            got: n as usize,
        });
    }
    let (c2, c3, d2) = (binom(n, 2), binom(n, 3), binom(n - 1, 2));
    let line = |pattern, total_degree, multiplicity, classes| ClassCount {
        pattern,
        total_degree,
        multiplicity,
        classes,
    };
    let classes = vec![
        line("(110..000..)", 2, 1, 2 * c2),
        line("(220..220..)", 8, 9, c2 * c2),
        line("(111..000..)", 3, 1, 2 * c3),
        line("(220..211..)", 8, 3, 2 * n * c2 * d2),
        line("(220..111..)", 7, 3, 2 * c2 * c3),
        line("(211..211..)", 8, 1, n * n * d2 * d2),
        line("(211..111..)", 7, 1, 2 * n * d2 * c3),
        line("(111..111..)", 6, 1, c3 * c3),
    ];
    let class_sum = classes.iter().map(ClassCount::count).sum();
    let mut by_total_degree = BTreeMap::new();
    for c in &classes {
        if c.count() > 0 {
            *by_total_degree.entry(c.total_degree).or_insert(0) += c.count();
        }
    }
    Ok(DegreeClassCount {
        n,
        classes,
        total: sextic_total(n)?,
        class_sum,
        by_total_degree,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binomials() {
        assert_eq!(binom(5, 2), 10);
        assert_eq!(binom(2, 3), 0);
        assert_eq!(binom(1, 2), 0);
    }

    #[test]
    fn small_totals() {
        assert_eq!(conjecture_generator_count(2).unwrap().total, 11);
        assert_eq!(conjecture_generator_count(3).unwrap().total, 177);
        assert!(conjecture_generator_count(1).is_err());
    }
}
