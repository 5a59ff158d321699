use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::ground::GroundSet;
use crate::oracle::{validate_query, IndependenceOracle, QueryCounter};
use crate::varset::VarSet;

/// An `n x d` matrix of observations.
///
/// Columns are centered on construction and the Gram matrix of the
/// centered columns is precomputed; residual inner products for any
/// conditioning set then come from one small solve against a Gram block.
#[derive(Debug, Clone)]
pub struct SampleMatrix {
    ground: GroundSet,
    data: DMatrix<f64>,
    centered: DMatrix<f64>,
    gram: DMatrix<f64>,
}

impl SampleMatrix {
    pub fn new(data: DMatrix<f64>) -> Result<SampleMatrix> {
        Self::with_labels(data, None)
    }

    pub fn with_labels(data: DMatrix<f64>, labels: Option<Vec<String>>) -> Result<SampleMatrix> {
        let (n, d) = data.shape();
        if n < 3 {
            return Err(Error::InvalidArgument(format!(
                "need at least 3 observations, got {n}"
            )));
        }
        let ground = match labels {
            Some(l) => {
                if l.len() != d {
                    return Err(Error::InvalidArgument(format!(
                        "{} labels for {d} columns",
                        l.len()
                    )));
                }
                GroundSet::with_labels(l)?
            }
            None => GroundSet::new(d)?,
        };
        let mut centered = data.clone();
        for mut col in centered.column_iter_mut() {
            let mean = col.mean();
            col.add_scalar_mut(-mean);
        }
        let gram = centered.transpose() * &centered;
        Ok(SampleMatrix {
            ground,
            data,
            centered,
            gram,
        })
    }

    pub fn ground(&self) -> &GroundSet {
        &self.ground
    }

    pub fn n(&self) -> usize {
        self.data.nrows()
    }

    pub fn dim(&self) -> usize {
        self.data.ncols()
    }

    pub fn data(&self) -> &DMatrix<f64> {
        &self.data
    }

    pub(crate) fn centered(&self) -> &DMatrix<f64> {
        &self.centered
    }

    /// Inner products of the least-squares residuals of columns `i` and
    /// `j` after regressing both on columns `s`: returns
    /// `(r_i . r_i, r_i . r_j, r_j . r_j)`. Computed through the normal
    /// equations on the centered Gram matrix, which is algebraically the
    /// residual inner product.
    pub(crate) fn residual_products(&self, i: usize, j: usize, s: VarSet) -> Result<(f64, f64, f64)> {
        let g = &self.gram;
        if s.is_empty() {
            return Ok((g[(i, i)], g[(i, j)], g[(j, j)]));
        }
        let idx: Vec<usize> = s.to_vec();
        let gss = DMatrix::from_fn(idx.len(), idx.len(), |a, b| g[(idx[a], idx[b])]);
        let chol = gss.cholesky().ok_or_else(|| {
            Error::NumericDegeneracy("regressor columns are collinear".into())
        })?;
        let mut rhs = DMatrix::zeros(idx.len(), 2);
        for (a, &sa) in idx.iter().enumerate() {
            rhs[(a, 0)] = g[(sa, i)];
            rhs[(a, 1)] = g[(sa, j)];
        }
        let beta = chol.solve(&rhs);
        let dot = |col: usize, t: usize| -> f64 {
            (0..idx.len()).map(|a| beta[(a, col)] * g[(idx[a], t)]).sum()
        };
        let rii = g[(i, i)] - dot(0, i);
        let rij = g[(i, j)] - dot(0, j);
        let rjj = g[(j, j)] - dot(1, j);
        Ok((rii, rij, rjj))
    }

    /// A thresholded sample-partial-correlation oracle.
    pub fn oracle(&self, tau: f64) -> Result<SampleGaussianOracle> {
        if tau <= 0.0 {
            return Err(Error::InvalidArgument(format!("tau must be positive, got {tau}")));
        }
        Ok(SampleGaussianOracle {
            data: self.clone(),
            tau,
            count: QueryCounter::default(),
        })
    }
}

/// Data-driven CI oracle: `i ⫫ j | C` iff the sample partial correlation
/// satisfies `|rho_n(i,j|C)| <= tau`.
///
/// Only singleton sides are supported; block queries must be reduced by
/// the caller so that the elementary-test analysis stays honest.
pub struct SampleGaussianOracle {
    data: SampleMatrix,
    tau: f64,
    count: QueryCounter,
}

impl SampleGaussianOracle {
    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn data(&self) -> &SampleMatrix {
        &self.data
    }
}

impl IndependenceOracle for SampleGaussianOracle {
    fn ground(&self) -> &GroundSet {
        self.data.ground()
    }

    fn query(&self, a: VarSet, b: VarSet, c: VarSet) -> Result<bool> {
        if let Some(t) = validate_query(self.ground(), a, b, c)? {
            self.count.bump();
            return Ok(t);
        }
        if a.len() > 1 || b.len() > 1 {
            return Err(Error::UnsupportedQuery(
                "sample oracle answers only elementary queries; reduce block queries first".into(),
            ));
        }
        self.count.bump();
        let i = a.min().unwrap();
        let j = b.min().unwrap();
        let rho = crate::stats::sample_partial_correlation(&self.data, i, j, c)?;
        Ok(rho.value.abs() <= self.tau)
    }

    fn query_count(&self) -> u64 {
        self.count.get()
    }
}

/// Parses a samples CSV: `n` rows by `d` columns, with an optional first
/// line of column labels.
pub fn parse_samples_csv(text: &str) -> Result<SampleMatrix> {
    let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty()).peekable();
    let first = lines
        .peek()
        .ok_or_else(|| Error::Parse("empty samples file".into()))?;
    let labels = if first.split(',').any(|f| f.trim().parse::<f64>().is_err()) {
        let l: Vec<String> = first.split(',').map(|f| f.trim().to_string()).collect();
        lines.next();
        Some(l)
    } else {
        None
    };
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for line in lines {
        let row: Vec<f64> = line
            .split(',')
            .map(|f| {
                f.trim()
                    .parse::<f64>()
                    .map_err(|e| Error::Parse(format!("bad number {f:?}: {e}")))
            })
            .collect::<Result<_>>()?;
        if let Some(prev) = rows.first() {
            if row.len() != prev.len() {
                return Err(Error::Parse("ragged rows in samples file".into()));
            }
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::Parse("samples file has no data rows".into()));
    }
    let (n, d) = (rows.len(), rows[0].len());
    let data = DMatrix::from_fn(n, d, |i, j| rows[i][j]);
    SampleMatrix::with_labels(data, labels)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn perfectly_correlated_columns_are_dependent() {
        // X2 duplicates X1 exactly
        let n = 50;
        let data = DMatrix::from_fn(n, 3, |i, j| match j {
            0 | 1 => (i as f64) * 0.7 - 3.0 + ((i * i) % 7) as f64,
            _ => ((i * 13) % 11) as f64,
        });
        let m = SampleMatrix::new(data).unwrap();
        let o = m.oracle(0.99).unwrap();
        assert!(!o
            .query(VarSet::singleton(0), VarSet::singleton(1), VarSet::EMPTY)
            .unwrap());
    }

    #[test]
    fn conditioning_set_too_large_errors() {
        let data = DMatrix::from_fn(5, 6, |i, j| ((i * 7 + j * 3) % 13) as f64);
        let m = SampleMatrix::new(data).unwrap();
        let o = m.oracle(0.1).unwrap();
        let c = VarSet::from_indices([2, 3, 4, 5]);
        let err = o.query(VarSet::singleton(0), VarSet::singleton(1), c);
        assert!(matches!(err, Err(Error::InsufficientSamples(_))));
    }

    #[test]
    fn block_queries_are_refused() {
        let data = DMatrix::from_fn(10, 4, |i, j| ((i * 7 + j * 3) % 13) as f64);
        let m = SampleMatrix::new(data).unwrap();
        let o = m.oracle(0.1).unwrap();
        let err = o.query(
            VarSet::from_indices([0, 1]),
            VarSet::singleton(2),
            VarSet::EMPTY,
        );
        assert!(matches!(err, Err(Error::UnsupportedQuery(_))));
        // triviality still answered for blocks
        assert!(o
            .query(VarSet::from_indices([0, 1]), VarSet::EMPTY, VarSet::EMPTY)
            .unwrap());
    }

    #[test]
    fn csv_header_detection() {
        let with = "x,y\n1,2\n3,4\n5,6\n";
        let m = parse_samples_csv(with).unwrap();
        assert_eq!(m.ground().labels(), &["x", "y"]);
        let without = "1,2\n3,4\n5,6\n";
        let m = parse_samples_csv(without).unwrap();
        assert_eq!(m.ground().labels(), &["1", "2"]);
        assert_eq!(m.n(), 3);
    }
}
