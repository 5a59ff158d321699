use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::ground::GroundSet;
use crate::oracle::{validate_query, IndependenceOracle, QueryCounter};
use crate::varset::VarSet;
use crate::{COND_LIMIT, DEFAULT_EPS_PD, DEFAULT_TOL_CI};

/// Whether the matrix was supplied as a covariance or as a precision
/// (inverse covariance).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MatrixKind {
    Covariance,
    Precision,
}

/// A validated symmetric positive-definite covariance, the parameter of a
/// centered Gaussian vector.
///
/// Construction checks symmetry (1e-12 relative) and that all eigenvalues
/// exceed `eps_pd`. When built from a precision matrix the stored
/// covariance is its inverse.
#[derive(Debug, Clone)]
pub struct CovarianceSpec {
    ground: GroundSet,
    sigma: DMatrix<f64>,
    source: MatrixKind,
    eps_pd: f64,
}

fn check_symmetric(m: &DMatrix<f64>) -> Result<()> {
    if !m.is_square() {
        return Err(Error::InvalidArgument(format!(
            "matrix must be square, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    for i in 0..m.nrows() {
        for j in i + 1..m.ncols() {
            let (a, b) = (m[(i, j)], m[(j, i)]);
            if (a - b).abs() > 1e-12 * a.abs().max(b.abs()).max(1.0) {
                return Err(Error::InvalidArgument(format!(
                    "matrix not symmetric at ({i},{j}): {a} vs {b}"
                )));
            }
        }
    }
    Ok(())
}

fn min_eigenvalue(m: &DMatrix<f64>) -> f64 {
    m.clone()
        .symmetric_eigen()
        .eigenvalues
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min)
}

impl CovarianceSpec {
    pub fn from_covariance(sigma: DMatrix<f64>) -> Result<CovarianceSpec> {
        Self::from_matrix(sigma, MatrixKind::Covariance, DEFAULT_EPS_PD)
    }

    pub fn from_precision(precision: DMatrix<f64>) -> Result<CovarianceSpec> {
        Self::from_matrix(precision, MatrixKind::Precision, DEFAULT_EPS_PD)
    }

    pub fn from_matrix(matrix: DMatrix<f64>, source: MatrixKind, eps_pd: f64) -> Result<CovarianceSpec> {
        check_symmetric(&matrix)?;
        let lambda_min = min_eigenvalue(&matrix);
        if lambda_min <= eps_pd {
            return Err(Error::NumericDegeneracy(format!(
                "matrix is not positive definite: smallest eigenvalue {lambda_min:.3e} <= {eps_pd:.1e}"
            )));
        }
        let sigma = match source {
            MatrixKind::Covariance => matrix,
            MatrixKind::Precision => {
                let chol = matrix.clone().cholesky().ok_or_else(|| {
                    Error::NumericDegeneracy("Cholesky factorization of precision failed".into())
                })?;
                chol.inverse()
            }
        };
        let ground = GroundSet::new(sigma.nrows())?;
        Ok(CovarianceSpec {
            ground,
            sigma,
            source,
            eps_pd,
        })
    }

    pub fn ground(&self) -> &GroundSet {
        &self.ground
    }

    pub fn dim(&self) -> usize {
        self.sigma.nrows()
    }

    pub fn source(&self) -> MatrixKind {
        self.source
    }

    pub fn eps_pd(&self) -> f64 {
        self.eps_pd
    }

    pub fn covariance(&self) -> &DMatrix<f64> {
        &self.sigma
    }

    fn block(&self, rows: &[usize], cols: &[usize]) -> DMatrix<f64> {
        DMatrix::from_fn(rows.len(), cols.len(), |i, j| self.sigma[(rows[i], cols[j])])
    }

    /// The conditional cross-covariance
    /// `Σ_{R,C} - Σ_{R,G} Σ_{G,G}^{-1} Σ_{G,C}` of rows `R` and columns
    /// `C` given `G` (the Schur complement route; no full-matrix inverse).
    pub fn conditional_cross_covariance(
        &self,
        rows: VarSet,
        cols: VarSet,
        given: VarSet,
    ) -> Result<DMatrix<f64>> {
        let r: Vec<usize> = rows.to_vec();
        let c: Vec<usize> = cols.to_vec();
        let mut out = self.block(&r, &c);
        if given.is_empty() {
            return Ok(out);
        }
        let g: Vec<usize> = given.to_vec();
        let sgg = self.block(&g, &g);
        let eig = sgg.clone().symmetric_eigen();
        let lmax = eig.eigenvalues.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let lmin = eig.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
        if lmin <= 0.0 || lmax / lmin > COND_LIMIT {
            return Err(Error::NumericDegeneracy(format!(
                "conditioning block is ill-conditioned (cond {:.3e})",
                if lmin <= 0.0 { f64::INFINITY } else { lmax / lmin }
            )));
        }
        let chol = sgg
            .cholesky()
            .ok_or_else(|| Error::NumericDegeneracy("conditioning block not PD".into()))?;
        let sgc = self.block(&g, &c);
        let solved = chol.solve(&sgc); // Σ_GG^{-1} Σ_GC
        let srg = self.block(&r, &g);
        out -= srg * solved;
        Ok(out)
    }

    /// An exact Gaussian oracle over this covariance with the default CI
    /// tolerance.
    pub fn exact_oracle(&self) -> ExactGaussianOracle {
        self.exact_oracle_with_tol(DEFAULT_TOL_CI)
    }

    pub fn exact_oracle_with_tol(&self, tol_ci: f64) -> ExactGaussianOracle {
        ExactGaussianOracle {
            spec: self.clone(),
            tol_ci,
            count: QueryCounter::default(),
        }
    }
}

/// Exact (population) Gaussian CI oracle.
///
/// Singleton queries test the partial correlation against `tol_ci`;
/// block queries test the conditional cross-covariance
/// `Σ_{A,B} - Σ_{A,C} Σ_{C,C}^{-1} Σ_{C,B}` entrywise, which for jointly
/// Gaussian vectors characterizes `A ⫫ B | C` exactly.
pub struct ExactGaussianOracle {
    spec: CovarianceSpec,
    tol_ci: f64,
    count: QueryCounter,
}

impl ExactGaussianOracle {
    pub fn spec(&self) -> &CovarianceSpec {
        &self.spec
    }

    pub fn tol_ci(&self) -> f64 {
        self.tol_ci
    }
}

impl IndependenceOracle for ExactGaussianOracle {
    fn ground(&self) -> &GroundSet {
        self.spec.ground()
    }

    fn query(&self, a: VarSet, b: VarSet, c: VarSet) -> Result<bool> {
        if let Some(t) = validate_query(self.ground(), a, b, c)? {
            self.count.bump();
            return Ok(t);
        }
        self.count.bump();
        if a.len() == 1 && b.len() == 1 {
            let i = a.min().unwrap();
            let j = b.min().unwrap();
            let rho = crate::stats::partial_correlation(&self.spec, i, j, c)?;
            return Ok(rho.value.abs() <= self.tol_ci);
        }
        let omega = self.spec.conditional_cross_covariance(a, b, c)?;
        Ok(omega.iter().all(|x| x.abs() <= self.tol_ci))
    }

    fn query_count(&self) -> u64 {
        self.count.get()
    }
}

/// A seven-variable Gaussian whose independence structure is not the
/// separation structure of any undirected graph: variables 5 and 6 are
/// marginally independent yet dependent given 7, while the precision
/// entry (5,6) is nonzero. Variables 1-4 form a separate block.
///
/// Defined by its precision matrix.
pub fn non_graphical_gaussian() -> CovarianceSpec {
    let k = DMatrix::from_row_slice(
        7,
        7,
        &[
            3.0, 1.0, 1.0, 0.0, 0.0, 0.0, 0.0, //
            1.0, 3.0, 0.0, 1.0, 0.0, 0.0, 0.0, //
            1.0, 0.0, 3.0, 1.0, 0.0, 0.0, 0.0, //
            0.0, 1.0, 1.0, 3.0, 0.0, 0.0, 0.0, //
            0.0, 0.0, 0.0, 0.0, 4.0, 3.0, -3.0, //
            0.0, 0.0, 0.0, 0.0, 3.0, 5.0, -3.0, //
            0.0, 0.0, 0.0, 0.0, -3.0, -3.0, 3.0, //
        ],
    );
    CovarianceSpec::from_precision(k).expect("built-in precision matrix is PD")
}

/// Parses a plain CSV matrix: `d` rows of `d` comma-separated decimals,
/// no header.
pub fn parse_matrix_csv(text: &str) -> Result<DMatrix<f64>> {
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let row: Vec<f64> = line
            .split(',')
            .map(|f| {
                f.trim()
                    .parse::<f64>()
                    .map_err(|e| Error::Parse(format!("line {}: bad number {f:?}: {e}", lineno + 1)))
            })
            .collect::<Result<_>>()?;
        if let Some(first) = rows.first() {
            if row.len() != first.len() {
                return Err(Error::Parse(format!(
                    "line {}: expected {} columns, got {}",
                    lineno + 1,
                    first.len(),
                    row.len()
                )));
            }
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::Parse("empty matrix file".into()));
    }
    if rows.len() != rows[0].len() {
        return Err(Error::Parse(format!(
            "matrix must be square, got {} rows x {} columns",
            rows.len(),
            rows[0].len()
        )));
    }
    let d = rows.len();
    Ok(DMatrix::from_fn(d, d, |i, j| rows[i][j]))
}

/// Renders a matrix in the CSV format accepted by [`parse_matrix_csv`].
pub fn matrix_to_csv(m: &DMatrix<f64>) -> String {
    let mut out = String::new();
    for i in 0..m.nrows() {
        let row: Vec<String> = (0..m.ncols()).map(|j| format!("{}", m[(i, j)])).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn construction_validates() {
        let asym = DMatrix::from_row_slice(2, 2, &[1.0, 0.5, 0.2, 1.0]);
        assert!(matches!(
            CovarianceSpec::from_covariance(asym),
            Err(Error::InvalidArgument(_))
        ));
        let indef = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 1.0]);
        assert!(matches!(
            CovarianceSpec::from_covariance(indef),
            Err(Error::NumericDegeneracy(_))
        ));
    }

    #[test]
    fn precision_is_inverted() {
        let k = DMatrix::from_row_slice(2, 2, &[2.0, 0.0, 0.0, 4.0]);
        let spec = CovarianceSpec::from_precision(k).unwrap();
        assert!((spec.covariance()[(0, 0)] - 0.5).abs() < 1e-12);
        assert!((spec.covariance()[(1, 1)] - 0.25).abs() < 1e-12);
    }

    #[test]
    fn non_graphical_gaussian_marginal_independence() {
        let spec = non_graphical_gaussian();
        let o = spec.exact_oracle();
        // X5 ⫫ X6 marginally (0-indexed 4 and 5)
        assert!(o
            .query(VarSet::singleton(4), VarSet::singleton(5), VarSet::EMPTY)
            .unwrap());
        // ... but not given X7
        assert!(!o
            .query(VarSet::singleton(4), VarSet::singleton(5), VarSet::singleton(6))
            .unwrap());
        // block-diagonal: {1,2} ⫫ {5,6,7}
        assert!(o
            .query(
                VarSet::from_indices([0, 1]),
                VarSet::from_indices([4, 5, 6]),
                VarSet::EMPTY
            )
            .unwrap());
    }

    #[test]
    fn ill_conditioned_conditioning_block_is_rejected() {
        // the full matrix is PD with smallest eigenvalue ~1, but the
        // {1,2} block has condition number ~2e13; conditioning on it
        // must fail while unconditioned queries still work
        let big = 1e13;
        let spec = CovarianceSpec::from_covariance(DMatrix::from_row_slice(
            4,
            4,
            &[
                big, big - 1.0, 0.0, 0.0, //
                big - 1.0, big, 0.0, 0.0, //
                0.0, 0.0, 1.0, 0.0, //
                0.0, 0.0, 0.0, 1.0,
            ],
        ))
        .unwrap();
        let o = spec.exact_oracle();
        assert!(o.query(VarSet::singleton(2), VarSet::singleton(3), VarSet::EMPTY).unwrap());
        let res = o.query(
            VarSet::singleton(2),
            VarSet::singleton(3),
            VarSet::from_indices([0, 1]),
        );
        assert!(matches!(res, Err(Error::NumericDegeneracy(_))), "{res:?}");
    }

    #[test]
    fn non_graphical_gaussian_precision_entries() {
        // the stored covariance inverts back to the defining precision:
        // entry (5,6) is 3 (a nonzero precision entry despite the
        // marginal independence), eigenvalues all positive by
        // construction
        let spec = non_graphical_gaussian();
        let inv = spec
            .covariance()
            .clone()
            .cholesky()
            .expect("PD")
            .inverse();
        assert!((inv[(4, 5)] - 3.0).abs() < 1e-9, "precision (5,6) = {}", inv[(4, 5)]);
        assert!((inv[(4, 6)] - (-3.0)).abs() < 1e-9);
        assert!((inv[(0, 1)] - 1.0).abs() < 1e-9);
        assert!((inv[(0, 4)]).abs() < 1e-9);
    }

    #[test]
    fn matrix_csv_round_trip() {
        let m = DMatrix::from_row_slice(2, 2, &[1.0, 0.25, 0.25, 1.0]);
        let parsed = parse_matrix_csv(&matrix_to_csv(&m)).unwrap();
        assert_eq!(parsed, m);
        assert!(parse_matrix_csv("1,2\n3\n").is_err());
        assert!(parse_matrix_csv("1,2\n").is_err());
    }
}
