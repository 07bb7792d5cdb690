//! From raw observations to the statistics `Z_w` that drive every estimator:
//! block maxima, marginal uniformization, the reflection used for survival
//! probabilities, and CSV ingestion.

mod ingest;

pub use ingest::{ingest_csv, ColumnSelection, IngestReport};

use ndarray::{Array2, ArrayView1, Axis};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::family::Provenance;
use crate::gev::{fit_gev_lmoments, fit_gev_mle, GevParams};
use crate::scalar::Scalar;
use crate::simplex::SimplexPoint;

/// `N × d` raw observations.
#[derive(Debug, Clone, PartialEq)]
pub struct RawDataset<T> {
    rows: Array2<T>,
    columns: Vec<String>,
}

impl<T: Scalar> RawDataset<T> {
    pub fn new(rows: Array2<T>, columns: Vec<String>) -> Result<Self> {
        let (n, d) = rows.dim();
        if n == 0 {
            return Err(Error::Input("no data rows".into()));
        }
        if d < 2 {
            return Err(Error::Parameter(format!("datasets need d >= 2 columns, got {d}")));
        }
        if columns.len() != d {
            return Err(Error::Dimension { expected: d, got: columns.len() });
        }
        if rows.iter().any(|x| x.is_nan()) {
            return Err(Error::Domain("raw dataset contains NaN".into()));
        }
        Ok(Self { rows, columns })
    }

    /// Dataset with generated column names `x0, x1, ...`.
    pub fn from_rows(rows: Array2<T>) -> Result<Self> {
        let columns = (0..rows.ncols()).map(|k| format!("x{k}")).collect();
        Self::new(rows, columns)
    }

    pub fn rows(&self) -> &Array2<T> {
        &self.rows
    }

    pub fn columns(&self) -> &[String] {
        &self.columns
    }

    pub fn n(&self) -> usize {
        self.rows.nrows()
    }

    pub fn d(&self) -> usize {
        self.rows.ncols()
    }
}

/// How marginal distributions are estimated from the block maxima.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MarginalMethod {
    GevLMoments,
    GevMle,
    EmpiricalRanks,
}

/// Estimated marginals attached to a block-maxima dataset.
#[derive(Debug, Clone, PartialEq)]
pub enum Marginals<T> {
    Gev(Vec<GevParams<T>>),
    EmpiricalRanks,
}

/// `B × d` component-wise block maxima with their marginal model.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockMaximaDataset<T> {
    maxima: Array2<T>,
    block_size: usize,
    marginals: Marginals<T>,
    provenance: Provenance,
}

impl<T: Scalar> BlockMaximaDataset<T> {
    /// Wraps maxima that are already available (e.g. synthetic MEV draws),
    /// fitting the requested marginals.
    pub fn from_maxima(maxima: Array2<T>, block_size: usize, method: MarginalMethod) -> Result<Self> {
        let marginals = match method {
            MarginalMethod::EmpiricalRanks => Marginals::EmpiricalRanks,
            MarginalMethod::GevLMoments | MarginalMethod::GevMle => {
                let fit = if method == MarginalMethod::GevMle { fit_gev_mle } else { fit_gev_lmoments };
                let params = maxima.axis_iter(Axis(1)).map(|col| fit(&col.to_vec())).collect::<Result<Vec<_>>>()?;
                Marginals::Gev(params)
            }
        };
        Self::with_marginals(maxima, block_size, marginals)
    }

    /// Wraps maxima with known marginals.
    pub fn with_marginals(maxima: Array2<T>, block_size: usize, marginals: Marginals<T>) -> Result<Self> {
        let (b, d) = maxima.dim();
        if b == 0 {
            return Err(Error::Input("no blocks".into()));
        }
        if d < 2 {
            return Err(Error::Parameter(format!("datasets need d >= 2 columns, got {d}")));
        }
        if let Marginals::Gev(p) = &marginals {
            if p.len() != d {
                return Err(Error::Dimension { expected: d, got: p.len() });
            }
        }
        if maxima.iter().any(|x| x.is_nan()) {
            return Err(Error::Domain("block maxima contain NaN".into()));
        }
        Ok(Self { maxima, block_size, marginals, provenance: Provenance::Original })
    }

    pub fn maxima(&self) -> &Array2<T> {
        &self.maxima
    }

    pub fn block_size(&self) -> usize {
        self.block_size
    }

    pub fn marginals(&self) -> &Marginals<T> {
        &self.marginals
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub fn n_blocks(&self) -> usize {
        self.maxima.nrows()
    }

    pub fn d(&self) -> usize {
        self.maxima.ncols()
    }

    /// Marginal probability of `x` in column `k`, in probability space and
    /// clipped to `[1/(B+1), B/(B+1)]`. For empirical marginals this is the
    /// fraction of maxima `<= x`, rescaled by `B/(B+1)`.
    pub fn marginal_cdf(&self, k: usize, x: T) -> Result<T> {
        let b = self.n_blocks();
        let p = match &self.marginals {
            Marginals::Gev(params) => params[k].cdf(x)?,
            Marginals::EmpiricalRanks => {
                let below = self.maxima.column(k).iter().filter(|&&v| v <= x).count();
                T::lit(below as f64 / (b + 1) as f64)
            }
        };
        Ok(clip_probability(p, b))
    }

    /// Marginal quantile of column `k` at probability `p`. Empirical
    /// marginals use the order statistic of rank `round(p (B+1))`.
    pub fn marginal_quantile(&self, k: usize, p: T) -> Result<T> {
        match &self.marginals {
            Marginals::Gev(params) => params[k].quantile(p),
            Marginals::EmpiricalRanks => {
                let mut col = self.maxima.column(k).to_vec();
                col.sort_by(|a, b| a.partial_cmp(b).expect("no NaN"));
                let b = col.len();
                let r = (p.as_f64() * (b + 1) as f64).round().clamp(1.0, b as f64) as usize;
                Ok(col[r - 1])
            }
        }
    }
}

fn clip_probability<T: Scalar>(p: T, b: usize) -> T {
    let lo = T::lit(1.0 / (b + 1) as f64);
    let hi = T::lit(b as f64 / (b + 1) as f64);
    p.max(lo).min(hi)
}

/// Component-wise maxima over consecutive blocks of `n` rows; a trailing
/// partial block is dropped.
pub fn block_maxima<T: Scalar>(
    data: &RawDataset<T>,
    n: usize,
    method: MarginalMethod,
) -> Result<BlockMaximaDataset<T>> {
    if n == 0 {
        return Err(Error::Parameter("block size must be at least 1".into()));
    }
    if data.n() < n {
        return Err(Error::SampleSize { needed: n, got: data.n() });
    }
    let b = data.n() / n;
    let d = data.d();
    let mut maxima = Array2::from_elem((b, d), T::neg_infinity());
    for (i, row) in data.rows().axis_iter(Axis(0)).take(b * n).enumerate() {
        let mut out = maxima.row_mut(i / n);
        for (m, &x) in out.iter_mut().zip(row.iter()) {
            if x > *m {
                *m = x;
            }
        }
    }
    BlockMaximaDataset::from_maxima(maxima, n, method)
}

/// Average ranks (1-based) of a column; ties share the mean of their ranks.
pub fn average_ranks<T: Scalar>(col: ArrayView1<'_, T>) -> Vec<f64> {
    let n = col.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| col[a].partial_cmp(&col[b]).expect("no NaN"));
    let mut ranks = vec![0.0; n];
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j + 1 < n && col[order[j + 1]] == col[order[i]] {
            j += 1;
        }
        let r = (i + j) as f64 / 2.0 + 1.0;
        for &idx in &order[i..=j] {
            ranks[idx] = r;
        }
        i = j + 1;
    }
    ranks
}

/// `B × d` probabilities strictly inside `(0, 1)` plus the exponent
/// transform `-log u` used by `Z_w`.
#[derive(Debug, Clone, PartialEq)]
pub struct UniformizedDataset<T> {
    u: Array2<T>,
    neg_log_u: Array2<T>,
    provenance: Provenance,
}

impl<T: Scalar> UniformizedDataset<T> {
    pub fn new(u: Array2<T>) -> Result<Self> {
        Self::with_provenance(u, Provenance::Original)
    }

    pub fn with_provenance(u: Array2<T>, provenance: Provenance) -> Result<Self> {
        if u.ncols() < 2 {
            return Err(Error::Parameter(format!("datasets need d >= 2 columns, got {}", u.ncols())));
        }
        if u.nrows() == 0 {
            return Err(Error::Input("no blocks".into()));
        }
        if let Some(bad) = u.iter().find(|x| !(**x > T::zero() && **x < T::one())) {
            return Err(Error::Domain(format!("uniformized value {bad} outside (0, 1)")));
        }
        let neg_log_u = u.mapv(|x| -x.ln());
        Ok(Self { u, neg_log_u, provenance })
    }

    pub fn u(&self) -> &Array2<T> {
        &self.u
    }

    pub fn neg_log_u(&self) -> &Array2<T> {
        &self.neg_log_u
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub fn n_blocks(&self) -> usize {
        self.u.nrows()
    }

    pub fn d(&self) -> usize {
        self.u.ncols()
    }

    /// `u -> 1 - u`, the probability-space form of the reflection.
    pub fn reflected(&self) -> Self {
        let provenance = match self.provenance {
            Provenance::Reflected => Provenance::Original,
            _ => Provenance::Reflected,
        };
        Self::with_provenance(self.u.mapv(|x| T::one() - x), provenance).expect("reflection keeps (0, 1)")
    }

    /// Rows selected by index, e.g. a minibatch.
    pub fn select_rows(&self, rows: &[usize]) -> Self {
        Self {
            u: self.u.select(Axis(0), rows),
            neg_log_u: self.neg_log_u.select(Axis(0), rows),
            provenance: self.provenance,
        }
    }

    /// `Z_{w,b}` for every block `b`.
    pub fn z_samples(&self, w: &SimplexPoint<T>) -> Result<Vec<T>> {
        if w.dim() != self.d() {
            return Err(Error::Dimension { expected: self.d(), got: w.dim() });
        }
        Ok(self.neg_log_u.axis_iter(Axis(0)).map(|row| z_from_neg_log(row.iter().copied(), w)).collect())
    }

    /// `Σ_b Z_{w,b}`, the sufficient statistic of the exponential likelihood.
    pub fn z_sum(&self, w: &[T]) -> T {
        let mut total = T::zero();
        for row in self.neg_log_u.axis_iter(Axis(0)) {
            let mut z = T::infinity();
            for (&m, &wk) in row.iter().zip(w) {
                if wk > T::zero() {
                    z = z.min(m / wk);
                }
            }
            total = total + z;
        }
        total
    }
}

/// Maps maxima to probabilities through the fitted marginals. GEV marginals
/// are clipped to `[1/(B+1), B/(B+1)]`; empirical marginals use average
/// ranks over `B + 1`.
pub fn uniformize<T: Scalar>(bm: &BlockMaximaDataset<T>) -> UniformizedDataset<T> {
    let (b, d) = bm.maxima.dim();
    let mut u = Array2::zeros((b, d));
    match &bm.marginals {
        Marginals::Gev(params) => {
            for ((i, k), out) in u.indexed_iter_mut() {
                let p = params[k].cdf(bm.maxima[[i, k]]).expect("maxima are not NaN");
                *out = clip_probability(p, b);
            }
        }
        Marginals::EmpiricalRanks => {
            for k in 0..d {
                let ranks = average_ranks(bm.maxima.column(k));
                for (i, r) in ranks.into_iter().enumerate() {
                    u[[i, k]] = T::lit(r / (b + 1) as f64);
                }
            }
        }
    }
    UniformizedDataset::with_provenance(u, bm.provenance).expect("probabilities clipped inside (0, 1)")
}

fn z_from_neg_log<T: Scalar>(neg_log: impl Iterator<Item = T>, w: &SimplexPoint<T>) -> T {
    neg_log.zip(w.as_slice()).filter(|(_, &wk)| wk > T::zero()).fold(T::infinity(), |z, (m, &wk)| z.min(m / wk))
}

/// `Z_w = min_k (-log u_k) / w_k` over coordinates with `w_k > 0`.
pub fn z_statistic<T: Scalar>(u_row: &[T], w: &SimplexPoint<T>) -> Result<T> {
    if u_row.len() != w.dim() {
        return Err(Error::Dimension { expected: w.dim(), got: u_row.len() });
    }
    if let Some(bad) = u_row.iter().find(|x| !(**x > T::zero() && **x < T::one())) {
        return Err(Error::Domain(format!("probability {bad} outside (0, 1)")));
    }
    Ok(z_from_neg_log(u_row.iter().map(|x| -x.ln()), w))
}

/// Applies `G_k(x) = F_k^{-1}(1 - F_k(x))` to every column. With empirical
/// marginals this reverses the order statistics of each column.
pub fn reflect_transform<T: Scalar>(bm: &BlockMaximaDataset<T>) -> Result<BlockMaximaDataset<T>> {
    let (b, d) = bm.maxima.dim();
    let mut out = Array2::zeros((b, d));
    match &bm.marginals {
        Marginals::Gev(params) => {
            for ((i, k), v) in out.indexed_iter_mut() {
                let p = clip_probability(params[k].cdf(bm.maxima[[i, k]])?, b);
                *v = params[k].quantile(T::one() - p)?;
            }
        }
        Marginals::EmpiricalRanks => {
            for k in 0..d {
                let col = bm.maxima.column(k);
                let mut order: Vec<usize> = (0..b).collect();
                order.sort_by(|&x, &y| col[x].partial_cmp(&col[y]).expect("no NaN"));
                for (pos, &idx) in order.iter().enumerate() {
                    out[[idx, k]] = col[order[b - 1 - pos]];
                }
            }
        }
    }
    let provenance = match bm.provenance {
        Provenance::Reflected => Provenance::Original,
        _ => Provenance::Reflected,
    };
    Ok(BlockMaximaDataset { maxima: out, block_size: bm.block_size, marginals: bm.marginals.clone(), provenance })
}
