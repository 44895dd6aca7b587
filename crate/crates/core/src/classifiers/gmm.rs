//! Gaussian mixture models: EM fitting, BIC model selection and the
//! maximum-likelihood class decision.

use std::f64::consts::PI;
use std::sync::OnceLock;

use ndarray::{Array2, ArrayView1, ArrayView2, Axis};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::linalg::{cholesky_with_jitter, Cholesky};
use super::{argmax, derive_seed};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CovType {
    Diagonal,
    Full,
}

impl CovType {
    pub fn name(self) -> &'static str {
        match self {
            CovType::Diagonal => "diagonal",
            CovType::Full => "full",
        }
    }
}

#[derive(Debug, Clone)]
enum Factor {
    Diag { inv_var: Vec<f64>, log_norm: f64 },
    Full { chol: Cholesky, log_norm: f64 },
}

/// A single-class mixture `p(v) = sum_i a_i N(v; mu_i, C_i)`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Gmm {
    cov_type: CovType,
    weights: Vec<f64>,
    /// `K x d`
    means: Array2<f64>,
    /// `K` matrices of `d x d`; diagonal models keep zero off-diagonals.
    covariances: Vec<Array2<f64>>,
    #[serde(skip)]
    factors: OnceLock<Vec<Factor>>,
}

impl PartialEq for Gmm {
    fn eq(&self, other: &Self) -> bool {
        self.cov_type == other.cov_type
            && self.weights == other.weights
            && self.means == other.means
            && self.covariances == other.covariances
    }
}

impl Gmm {
    pub fn new(cov_type: CovType, weights: Vec<f64>, means: Array2<f64>, covariances: Vec<Array2<f64>>) -> Result<Self> {
        let (k, d) = means.dim();
        if k == 0 || d == 0 || weights.len() != k || covariances.len() != k {
            return Err(Error::invalid("GMM needs matching, non-empty weights, means and covariances"));
        }
        if weights.iter().any(|&w| !(w >= 0.0) || !w.is_finite()) || (weights.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
            return Err(Error::invalid("GMM weights must lie on the simplex"));
        }
        if covariances.iter().any(|c| c.dim() != (d, d)) {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: covariances.iter().map(|c| c.nrows()).find(|&r| r != d).unwrap_or(0),
            });
        }
        let g = Self {
            cov_type,
            weights,
            means,
            covariances,
            factors: OnceLock::new(),
        };
        g.build_factors()?;
        Ok(g)
    }

    fn build_factors(&self) -> Result<Vec<Factor>> {
        let d = self.dim() as f64;
        self.covariances
            .iter()
            .map(|c| match self.cov_type {
                CovType::Diagonal => {
                    let var: Vec<f64> = c.diag().to_vec();
                    if var.iter().any(|v| !(*v > 0.0) || !v.is_finite()) {
                        return Err(Error::NotPositiveDefinite);
                    }
                    let log_det: f64 = var.iter().map(|v| v.ln()).sum();
                    Ok(Factor::Diag {
                        inv_var: var.iter().map(|v| 1.0 / v).collect(),
                        log_norm: -0.5 * (d * (2.0 * PI).ln() + log_det),
                    })
                }
                CovType::Full => {
                    let chol = Cholesky::new(c.view())?;
                    let log_norm = -0.5 * (d * (2.0 * PI).ln() + chol.log_det());
                    Ok(Factor::Full { chol, log_norm })
                }
            })
            .collect()
    }

    /// Re-checks a deserialized model.
    pub(crate) fn validate(&self) -> Result<()> {
        Gmm::new(self.cov_type, self.weights.clone(), self.means.clone(), self.covariances.clone()).map(|_| ())
    }

    fn factors(&self) -> &[Factor] {
        self.factors
            .get_or_init(|| self.build_factors().expect("covariances validated at construction"))
    }

    pub fn cov_type(&self) -> CovType {
        self.cov_type
    }

    pub fn n_components(&self) -> usize {
        self.weights.len()
    }

    pub fn dim(&self) -> usize {
        self.means.ncols()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn means(&self) -> &Array2<f64> {
        &self.means
    }

    pub fn covariances(&self) -> &[Array2<f64>] {
        &self.covariances
    }

    /// Free parameters: `K-1` weights, `Kd` means and `Kd(d+1)/2` (full) or
    /// `Kd` (diagonal) covariance entries.
    pub fn n_parameters(&self) -> usize {
        n_parameters(self.n_components(), self.dim(), self.cov_type)
    }

    /// `ln a_i + ln N(v; mu_i, C_i)` for every component.
    pub fn weighted_component_log_densities(&self, v: ArrayView1<'_, f64>) -> Vec<f64> {
        let mut diff = vec![0.0; self.dim()];
        self.factors()
            .iter()
            .enumerate()
            .map(|(i, f)| {
                for (j, dj) in diff.iter_mut().enumerate() {
                    *dj = v[j] - self.means[[i, j]];
                }
                let (q, log_norm) = match f {
                    Factor::Diag { inv_var, log_norm } => {
                        (diff.iter().zip(inv_var).map(|(x, iv)| x * x * iv).sum::<f64>(), *log_norm)
                    }
                    Factor::Full { chol, log_norm } => (chol.quad_form(&diff), *log_norm),
                };
                self.weights[i].ln() + log_norm - 0.5 * q
            })
            .collect()
    }

    /// `ln p(v)`.
    pub fn log_pdf(&self, v: ArrayView1<'_, f64>) -> f64 {
        log_sum_exp(&self.weighted_component_log_densities(v))
    }

    /// Total log-likelihood of the rows of `x`.
    pub fn log_likelihood(&self, x: ArrayView2<'_, f64>) -> f64 {
        x.rows().into_iter().map(|r| self.log_pdf(r)).sum()
    }

    /// `-2 ln L + p ln n`.
    pub fn bic(&self, x: ArrayView2<'_, f64>) -> f64 {
        -2.0 * self.log_likelihood(x) + self.n_parameters() as f64 * (x.nrows() as f64).ln()
    }

    /// Posterior component memberships; every row sums to one.
    pub fn responsibilities(&self, x: ArrayView2<'_, f64>) -> Array2<f64> {
        let mut r = Array2::zeros((x.nrows(), self.n_components()));
        for (i, row) in x.rows().into_iter().enumerate() {
            let lp = self.weighted_component_log_densities(row);
            let total = log_sum_exp(&lp);
            for (k, l) in lp.iter().enumerate() {
                r[[i, k]] = (l - total).exp();
            }
        }
        r
    }
}

pub fn n_parameters(k: usize, d: usize, cov_type: CovType) -> usize {
    let cov = match cov_type {
        CovType::Full => k * d * (d + 1) / 2,
        CovType::Diagonal => k * d,
    };
    k - 1 + k * d + cov
}

pub(crate) fn log_sum_exp(v: &[f64]) -> f64 {
    let m = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !m.is_finite() {
        return m;
    }
    m + v.iter().map(|x| (x - m).exp()).sum::<f64>().ln()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EmOptions {
    /// Convergence threshold on the per-sample mean log-likelihood gain.
    pub tol: f64,
    pub max_iter: usize,
    /// Added to every covariance diagonal after each M-step.
    pub reg: f64,
}

impl Default for EmOptions {
    fn default() -> Self {
        Self {
            tol: 1e-6,
            max_iter: 200,
            reg: 1e-6,
        }
    }
}

/// Result of one EM run.
#[derive(Debug, Clone)]
pub struct EmFit {
    pub model: Gmm,
    /// Total log-likelihood of the parameters entering each E-step; the last
    /// entry belongs to the returned model.
    pub log_likelihood: Vec<f64>,
    pub converged: bool,
    /// Indices into `log_likelihood` whose parameters came from an M-step
    /// that had to re-seed a collapsed component.
    pub reinitialized: Vec<usize>,
}

struct Params {
    weights: Vec<f64>,
    means: Array2<f64>,
    covs: Vec<Array2<f64>>,
}

/// Fits a `k`-component mixture to the rows of `x` by expectation
/// maximization, seeded by D^2-weighted farthest-point sampling.
pub fn gmm_fit_em(x: ArrayView2<'_, f64>, k: usize, cov_type: CovType, seed: u64, opts: &EmOptions) -> Result<EmFit> {
    let (n, d) = x.dim();
    if k == 0 || d == 0 {
        return Err(Error::invalid("EM needs k >= 1 and d >= 1"));
    }
    if n <= k {
        return Err(Error::invalid(format!("EM with {k} components needs more than {k} rows, got {n}")));
    }
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::invalid("EM input contains non-finite values"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let global = covariance(x, None, cov_type, opts.reg);
    let mut params = initialize(x, k, cov_type, &global, opts.reg, &mut rng);

    let mut trace = Vec::new();
    let mut reinitialized = Vec::new();
    let mut converged = false;
    loop {
        let model = to_model(&params, cov_type, opts.reg)?;
        let mut resp = Array2::zeros((n, k));
        let mut ll = 0.0;
        for (i, row) in x.rows().into_iter().enumerate() {
            let lp = model.weighted_component_log_densities(row);
            let total = log_sum_exp(&lp);
            ll += total;
            for (c, l) in lp.iter().enumerate() {
                resp[[i, c]] = (l - total).exp();
            }
        }
        trace.push(ll);
        let t = trace.len() - 1;
        if t > 0 && (trace[t] - trace[t - 1]) / n as f64 <= opts.tol && !reinitialized.contains(&t) {
            converged = true;
        }
        if converged || t >= opts.max_iter {
            return Ok(EmFit {
                model,
                log_likelihood: trace,
                converged,
                reinitialized,
            });
        }
        let reseeded = m_step(x, &resp, cov_type, &global, opts.reg, &mut rng, &mut params);
        if reseeded > 0 {
            log::debug!("EM: re-seeded {reseeded} collapsed component(s) at iteration {}", t + 1);
            reinitialized.push(t + 1);
        }
    }
}

fn to_model(p: &Params, cov_type: CovType, reg: f64) -> Result<Gmm> {
    let mut covs = p.covs.clone();
    for c in covs.iter_mut() {
        if cov_type == CovType::Full {
            let (_, jitter) = cholesky_with_jitter(c, reg)?;
            if jitter > 0.0 {
                log::debug!("EM: covariance needed extra jitter {jitter:e}");
                c.diag_mut().mapv_inplace(|v| v + jitter);
            }
        }
    }
    Gmm::new(cov_type, p.weights.clone(), p.means.clone(), covs)
}

fn initialize(
    x: ArrayView2<'_, f64>,
    k: usize,
    cov_type: CovType,
    global: &Array2<f64>,
    reg: f64,
    rng: &mut ChaCha8Rng,
) -> Params {
    let n = x.nrows();
    let mut centers = vec![rng.random_range(0..n)];
    let mut dist: Vec<f64> = (0..n).map(|i| sq_dist(x.row(i), x.row(centers[0]))).collect();
    while centers.len() < k {
        let total: f64 = dist.iter().sum();
        let next = if total > 0.0 {
            let mut u = rng.random::<f64>() * total;
            let mut pick = n - 1;
            for (i, &w) in dist.iter().enumerate() {
                if u < w {
                    pick = i;
                    break;
                }
                u -= w;
            }
            pick
        } else {
            rng.random_range(0..n)
        };
        centers.push(next);
        for (i, di) in dist.iter_mut().enumerate() {
            *di = di.min(sq_dist(x.row(i), x.row(next)));
        }
    }
    let mut resp: Array2<f64> = Array2::zeros((n, k));
    for i in 0..n {
        let best = (0..k)
            .map(|c| -sq_dist(x.row(i), x.row(centers[c])))
            .collect::<Vec<_>>();
        resp[[i, argmax(&best)]] = 1.0;
    }
    let mut params = Params {
        weights: vec![1.0 / k as f64; k],
        means: Array2::zeros((k, x.ncols())),
        covs: vec![global.clone(); k],
    };
    for (c, &idx) in centers.iter().enumerate() {
        params.means.row_mut(c).assign(&x.row(idx));
    }
    let counts = resp.sum_axis(Axis(0));
    let total: f64 = counts.iter().map(|c| c.max(1.0)).sum();
    for c in 0..k {
        params.weights[c] = counts[c].max(1.0) / total;
        if counts[c] >= 2.0 {
            let w = resp.column(c);
            let mean = weighted_mean(x, w);
            params.covs[c] = covariance(x, Some((w, &mean)), cov_type, reg);
            params.means.row_mut(c).assign(&mean);
        }
    }
    params
}

fn m_step(
    x: ArrayView2<'_, f64>,
    resp: &Array2<f64>,
    cov_type: CovType,
    global: &Array2<f64>,
    reg: f64,
    rng: &mut ChaCha8Rng,
    params: &mut Params,
) -> usize {
    let n = x.nrows();
    let k = resp.ncols();
    let nk = resp.sum_axis(Axis(0));
    let mut reseeded = 0;
    for c in 0..k {
        if nk[c] < 1e-8 {
            let idx = rng.random_range(0..n);
            params.means.row_mut(c).assign(&x.row(idx));
            params.covs[c] = global.clone();
            params.weights[c] = 1.0 / n as f64;
            reseeded += 1;
            continue;
        }
        let w = resp.column(c);
        let mean = weighted_mean(x, w);
        params.covs[c] = covariance(x, Some((w, &mean)), cov_type, reg);
        params.means.row_mut(c).assign(&mean);
        params.weights[c] = nk[c] / n as f64;
    }
    let s: f64 = params.weights.iter().sum();
    params.weights.iter_mut().for_each(|w| *w /= s);
    reseeded
}

fn sq_dist(a: ArrayView1<'_, f64>, b: ArrayView1<'_, f64>) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).powi(2)).sum()
}

fn weighted_mean(x: ArrayView2<'_, f64>, w: ArrayView1<'_, f64>) -> ndarray::Array1<f64> {
    let total: f64 = w.sum();
    let mut m = ndarray::Array1::zeros(x.ncols());
    for (row, &wi) in x.rows().into_iter().zip(w.iter()) {
        if wi != 0.0 {
            m.scaled_add(wi, &row);
        }
    }
    m / total
}

/// Weighted (or plain, when `weights` is `None`) ML covariance plus `reg * I`.
fn covariance(
    x: ArrayView2<'_, f64>,
    weights: Option<(ArrayView1<'_, f64>, &ndarray::Array1<f64>)>,
    cov_type: CovType,
    reg: f64,
) -> Array2<f64> {
    let d = x.ncols();
    let (w, mean) = match weights {
        Some((w, m)) => (w.to_owned(), m.clone()),
        None => {
            let ones = ndarray::Array1::ones(x.nrows());
            let m = x.mean_axis(Axis(0)).expect("non-empty");
            (ones, m)
        }
    };
    let total: f64 = w.sum();
    let mut c = Array2::zeros((d, d));
    let mut diff = vec![0.0; d];
    for (row, &wi) in x.rows().into_iter().zip(w.iter()) {
        if wi == 0.0 {
            continue;
        }
        for j in 0..d {
            diff[j] = row[j] - mean[j];
        }
        match cov_type {
            CovType::Diagonal => {
                for j in 0..d {
                    c[[j, j]] += wi * diff[j] * diff[j];
                }
            }
            CovType::Full => {
                for a in 0..d {
                    let wa = wi * diff[a];
                    for b in 0..=a {
                        c[[a, b]] += wa * diff[b];
                    }
                }
            }
        }
    }
    for a in 0..d {
        for b in 0..a {
            c[[b, a]] = c[[a, b]];
        }
    }
    c.mapv_inplace(|v| v / total);
    for j in 0..d {
        c[[j, j]] += reg;
    }
    c
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BicOptions {
    pub k_max: usize,
    pub cov_types: Vec<CovType>,
    /// Full covariances are skipped above this dimension.
    pub full_cov_max_dim: usize,
    pub em: EmOptions,
}

impl Default for BicOptions {
    fn default() -> Self {
        Self {
            k_max: 40,
            cov_types: vec![CovType::Diagonal, CovType::Full],
            full_cov_max_dim: 40,
            em: EmOptions::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BicCandidate {
    pub k: usize,
    pub cov_type: CovType,
    pub bic: f64,
    pub log_likelihood: f64,
    pub n_parameters: usize,
}

#[derive(Debug, Clone)]
pub struct BicSelection {
    pub model: Gmm,
    pub k: usize,
    pub cov_type: CovType,
    pub bic: f64,
    /// Every fitted candidate in `(k, diagonal, full)` order.
    pub candidates: Vec<BicCandidate>,
    /// The component cap actually used, `min(k_max, n/2)`.
    pub k_cap: usize,
}

/// Upper bound on the components tried for `n` rows.
pub fn bic_k_cap(k_max: usize, n: usize) -> usize {
    k_max.min(n / 2).max(1)
}

/// Fits `K = 1..=cap` for every allowed covariance type with fewer free
/// parameters than rows and keeps the lowest BIC; ties go to the smaller `K`,
/// then to the diagonal model.
pub fn gmm_bic_select(x: ArrayView2<'_, f64>, opts: &BicOptions, seed: u64) -> Result<BicSelection> {
    let (n, d) = x.dim();
    if n < 2 {
        return Err(Error::invalid("BIC selection needs at least two rows"));
    }
    let cap = bic_k_cap(opts.k_max, n);
    let mut types: Vec<CovType> = opts.cov_types.clone();
    types.sort();
    types.dedup();
    if d > opts.full_cov_max_dim && types.contains(&CovType::Full) {
        log::debug!("BIC: skipping full covariances for d = {d} > {}", opts.full_cov_max_dim);
        types.retain(|t| *t != CovType::Full);
    }
    if types.is_empty() {
        return Err(Error::invalid("no covariance type to fit"));
    }
    // A candidate with at least as many free parameters as rows can make its
    // likelihood unbounded by collapsing components, so it is not tried. The
    // single diagonal Gaussian is always kept as a fallback.
    let grid: Vec<(usize, CovType)> = (1..=cap)
        .flat_map(|k| types.iter().map(move |&t| (k, t)))
        .filter(|&(k, t)| n_parameters(k, d, t) < n || (k == 1 && t == CovType::Diagonal))
        .collect();
    let fits: Vec<Result<(Gmm, f64, f64)>> = grid
        .par_iter()
        .map(|&(k, t)| {
            let s = derive_seed(seed, &[k as u64, t as u64]);
            let fit = gmm_fit_em(x, k, t, s, &opts.em)?;
            let ll = *fit.log_likelihood.last().expect("at least one E-step");
            let bic = -2.0 * ll + fit.model.n_parameters() as f64 * (n as f64).ln();
            Ok((fit.model, ll, bic))
        })
        .collect();
    let mut best: Option<(usize, Gmm)> = None;
    let mut candidates = Vec::with_capacity(grid.len());
    for (fit, &(k, t)) in fits.into_iter().zip(&grid) {
        let (model, ll, bic) = match fit {
            Ok(f) => f,
            Err(e) => {
                log::debug!("BIC: K={k} {} failed: {e}", t.name());
                continue;
            }
        };
        candidates.push(BicCandidate {
            k,
            cov_type: t,
            bic,
            log_likelihood: ll,
            n_parameters: model.n_parameters(),
        });
        if best.as_ref().is_none_or(|(j, _)| bic < candidates[*j].bic) {
            best = Some((candidates.len() - 1, model));
        }
    }
    let (idx, model) = best.ok_or_else(|| Error::Training("no GMM candidate could be fitted".into()))?;
    let c = &candidates[idx];
    Ok(BicSelection {
        k: c.k,
        cov_type: c.cov_type,
        bic: c.bic,
        model,
        candidates,
        k_cap: cap,
    })
}

/// Index of the model with the greatest `ln p(v | lambda_n)`; ties go to the
/// lowest index.
pub fn gmm_classify(models: &[Gmm], v: ArrayView1<'_, f64>) -> Result<usize> {
    if models.is_empty() {
        return Err(Error::invalid("no class models"));
    }
    for m in models {
        if m.dim() != v.len() {
            return Err(Error::DimensionMismatch {
                expected: m.dim(),
                got: v.len(),
            });
        }
    }
    Ok(argmax(&models.iter().map(|m| m.log_pdf(v)).collect::<Vec<_>>()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::{array, Array1};
    use rand_distr::{Distribution, Normal};

    fn mixture_1d(seed: u64) -> Array2<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = Normal::new(-5.0, 1.0).unwrap();
        let b = Normal::new(5.0, 1.0).unwrap();
        Array2::from_shape_fn((500, 1), |(i, _)| if i % 2 == 0 { a.sample(&mut rng) } else { b.sample(&mut rng) })
    }

    #[test]
    fn parameter_counts() {
        assert_eq!(n_parameters(3, 2, CovType::Full), 2 + 6 + 9);
        assert_eq!(n_parameters(3, 2, CovType::Diagonal), 2 + 6 + 6);
        assert_eq!(n_parameters(1, 1, CovType::Diagonal), 2);
    }

    #[test]
    fn recovers_two_separated_components() {
        let x = mixture_1d(7);
        let fit = gmm_fit_em(x.view(), 2, CovType::Full, 7, &EmOptions::default()).unwrap();
        let mut m: Vec<f64> = fit.model.means().column(0).to_vec();
        m.sort_by(f64::total_cmp);
        assert!((m[0] + 5.0).abs() < 0.2 && (m[1] - 5.0).abs() < 0.2, "{m:?}");
        assert!(fit.converged);
        for w in fit.log_likelihood.windows(2) {
            assert!(w[1] >= w[0] - 1e-8);
        }
    }

    #[test]
    fn single_component_matches_sample_moments() {
        let x = mixture_1d(1);
        let fit = gmm_fit_em(x.view(), 1, CovType::Diagonal, 0, &EmOptions::default()).unwrap();
        let mean = x.mean().unwrap();
        assert!((fit.model.means()[[0, 0]] - mean).abs() < 1e-9);
    }

    #[test]
    fn responsibilities_are_row_stochastic() {
        let x = mixture_1d(2);
        let fit = gmm_fit_em(x.view(), 3, CovType::Full, 2, &EmOptions::default()).unwrap();
        for row in fit.model.responsibilities(x.view()).rows() {
            assert!((row.sum() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn too_few_rows() {
        let x = array![[1.0], [2.0]];
        assert!(gmm_fit_em(x.view(), 2, CovType::Full, 0, &EmOptions::default()).is_err());
    }

    #[test]
    fn bic_cap_for_five_rows() {
        let x = array![[0.0], [1.0], [2.5], [3.0], [7.0]];
        let sel = gmm_bic_select(x.view(), &BicOptions::default(), 1).unwrap();
        assert_eq!(sel.k_cap, 2);
        assert!(sel.candidates.iter().all(|c| c.k <= 2));
        assert!(sel.candidates.iter().all(|c| sel.bic <= c.bic));
    }

    #[test]
    fn classify_at_mean_and_tie() {
        let unit = |m: f64| {
            Gmm::new(CovType::Full, vec![1.0], array![[m, 0.0]], vec![Array2::eye(2)]).unwrap()
        };
        let models = [unit(0.0), unit(3.0)];
        assert_eq!(gmm_classify(&models, Array1::from(vec![0.0, 0.0]).view()).unwrap(), 0);
        assert_eq!(gmm_classify(&models, Array1::from(vec![3.0, 0.0]).view()).unwrap(), 1);
        assert_eq!(gmm_classify(&models, Array1::from(vec![1.5, 0.0]).view()).unwrap(), 0);
        assert!(gmm_classify(&models, Array1::from(vec![1.5]).view()).is_err());
    }

    #[test]
    fn rejects_off_simplex_weights() {
        assert!(Gmm::new(CovType::Diagonal, vec![0.7], array![[0.0]], vec![array![[1.0]]]).is_err());
        assert!(Gmm::new(CovType::Diagonal, vec![1.0], array![[0.0]], vec![array![[0.0]]]).is_err());
    }

    #[test]
    fn json_round_trip_keeps_densities() {
        let x = mixture_1d(3);
        let g = gmm_fit_em(x.view(), 2, CovType::Full, 3, &EmOptions::default()).unwrap().model;
        let back: Gmm = serde_json::from_str(&serde_json::to_string(&g).unwrap()).unwrap();
        assert_eq!(back, g);
        for row in x.rows().into_iter().take(20) {
            assert_eq!(back.log_pdf(row), g.log_pdf(row));
        }
    }
}
