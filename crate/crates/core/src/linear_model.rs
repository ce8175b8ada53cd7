//! Binary presence features over harvested subsequences, a one-vs-rest
//! logistic regression on top, and the end-to-end model in both modes.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::dataset::{Dataset, TimeSeries};
use crate::error::{Error, Result};
use crate::multi_rep::{
    self, make_config_grid, DomainSet, EnsembleModel, GridOptions, HarvestedFeature, Member,
    MemberReport, RepConfig, Transformer,
};
use crate::par::Execution;
use crate::seql::{argmax, SeqlParams};
use crate::symbolic::{Representation, Token};

/// Row-major binary matrix stored as the sorted active columns of each row.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FeatureMatrix {
    n_cols: usize,
    rows: Vec<Vec<u32>>,
}

impl FeatureMatrix {
    pub fn from_active(n_cols: usize, mut rows: Vec<Vec<u32>>) -> Self {
        for r in &mut rows {
            r.sort_unstable();
            r.dedup();
            debug_assert!(r.iter().all(|&c| (c as usize) < n_cols));
        }
        FeatureMatrix { n_cols, rows }
    }

    pub fn from_dense(dense: &[Vec<bool>], n_cols: usize) -> Self {
        let rows = dense
            .iter()
            .map(|r| {
                r.iter()
                    .enumerate()
                    .filter(|(_, &b)| b)
                    .map(|(j, _)| j as u32)
                    .collect()
            })
            .collect();
        FeatureMatrix { n_cols, rows }
    }

    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn active(&self, row: usize) -> &[u32] {
        &self.rows[row]
    }

    pub fn get(&self, row: usize, col: usize) -> bool {
        self.rows[row].binary_search(&(col as u32)).is_ok()
    }

    pub fn to_dense(&self) -> Vec<Vec<bool>> {
        self.rows
            .iter()
            .map(|r| {
                let mut d = vec![false; self.n_cols];
                for &c in r {
                    d[c as usize] = true;
                }
                d
            })
            .collect()
    }
}

/// Features grouped by the grid entry they belong to.
#[derive(Debug, Clone)]
struct FeatureIndex {
    /// `(grid index, [(column, pattern)])` for every config with features.
    groups: Vec<(usize, Vec<(u32, Vec<Token>)>)>,
    max_len: Vec<usize>,
}

impl FeatureIndex {
    fn new(grid: &[RepConfig], features: &[HarvestedFeature]) -> Result<Self> {
        let position: HashMap<Representation, usize> =
            grid.iter().enumerate().map(|(i, c)| (c.rep, i)).collect();
        let mut by_config: Vec<Vec<(u32, Vec<Token>)>> = vec![Vec::new(); grid.len()];
        for (j, f) in features.iter().enumerate() {
            let &g = position.get(&f.rep).ok_or_else(|| {
                Error::config(format!("feature {} refers to {} outside the grid", f.render(), f.rep))
            })?;
            if !grid[g].is_fitted() {
                return Err(Error::UnfittedConfig {
                    window: f.rep.window,
                    word_len: f.rep.word_len,
                });
            }
            by_config[g].push((j as u32, f.pattern.clone()));
        }
        let groups: Vec<_> = by_config
            .into_iter()
            .enumerate()
            .filter(|(_, v)| !v.is_empty())
            .collect();
        let max_len = groups
            .iter()
            .map(|(_, v)| v.iter().map(|(_, p)| p.len()).max().unwrap_or(0))
            .collect();
        Ok(FeatureIndex { groups, max_len })
    }

    /// Active columns of one series for the group at `gi`; `None` when the
    /// series is too short for the window.
    fn group_row(&self, gi: usize, t: &Transformer, values: &[f64]) -> Result<Option<Vec<u32>>> {
        let Some(seq) = t.transform_or_abstain(values)? else {
            return Ok(None);
        };
        let present = seq.substrings(self.max_len[gi]);
        Ok(Some(
            self.groups[gi]
                .1
                .iter()
                .filter(|(_, p)| present.contains(p.as_slice()))
                .map(|(j, _)| *j)
                .collect(),
        ))
    }
}

/// Presence matrix of `features` over `data`. Each series is transformed once
/// per config that has features.
pub fn vectorize(
    data: &Dataset,
    grid: &[RepConfig],
    features: &[HarvestedFeature],
    exec: Execution,
) -> Result<FeatureMatrix> {
    let index = FeatureIndex::new(grid, features)?;
    let slots: Vec<usize> = (0..index.groups.len()).collect();
    let per_group = exec.try_map(&slots, |&gi| -> Result<Vec<Vec<u32>>> {
        let t = grid[index.groups[gi].0].transformer()?;
        data.series()
            .iter()
            .map(|s| Ok(index.group_row(gi, &t, s.values())?.unwrap_or_default()))
            .collect()
    })?;
    let mut rows = vec![Vec::new(); data.len()];
    for group in per_group {
        for (row, cols) in rows.iter_mut().zip(group) {
            row.extend(cols);
        }
    }
    Ok(FeatureMatrix::from_active(features.len(), rows))
}

/// Settings of the logistic regression. `lambda = None` means `1 / N`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LogRegParams {
    pub lambda: Option<f64>,
    pub max_iterations: usize,
    pub tol: f64,
}

impl Default for LogRegParams {
    fn default() -> Self {
        LogRegParams {
            lambda: None,
            max_iterations: 10_000,
            tol: 1e-8,
        }
    }
}

/// Per-class weight vectors (class-major) and intercepts.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearWeights {
    pub weights: Vec<Vec<f64>>,
    pub intercepts: Vec<f64>,
}

impl LinearWeights {
    /// `w_k . x + b_k` for every class, given the active columns of `x`.
    pub fn scores(&self, active: &[u32]) -> Vec<f64> {
        self.weights
            .iter()
            .zip(&self.intercepts)
            .map(|(w, b)| active.iter().map(|&j| w[j as usize]).sum::<f64>() + b)
            .collect()
    }
}

pub fn softmax(scores: &[f64]) -> Vec<f64> {
    let max = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let exp: Vec<f64> = scores.iter().map(|s| (s - max).exp()).collect();
    let total: f64 = exp.iter().sum();
    exp.into_iter().map(|e| e / total).collect()
}

fn softplus(z: f64) -> f64 {
    if z > 0.0 {
        z + (-z).exp().ln_1p()
    } else {
        z.exp().ln_1p()
    }
}

fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

struct Binary<'a> {
    x: &'a FeatureMatrix,
    y: Vec<f64>,
    lambda: f64,
}

impl Binary<'_> {
    fn margins(&self, w: &[f64], b: f64) -> Vec<f64> {
        (0..self.x.n_rows())
            .map(|i| self.x.active(i).iter().map(|&j| w[j as usize]).sum::<f64>() + b)
            .collect()
    }

    /// `(1/N) sum [softplus(z) - y z] + lambda/2 |w|^2`
    fn objective(&self, w: &[f64], b: f64) -> f64 {
        let n = self.x.n_rows() as f64;
        let data: f64 = self
            .margins(w, b)
            .iter()
            .zip(&self.y)
            .map(|(&z, &y)| softplus(z) - y * z)
            .sum();
        data / n + 0.5 * self.lambda * w.iter().map(|v| v * v).sum::<f64>()
    }

    fn gradient(&self, w: &[f64], b: f64) -> (Vec<f64>, f64) {
        let n = self.x.n_rows() as f64;
        let mut gw: Vec<f64> = w.iter().map(|v| self.lambda * v).collect();
        let mut gb = 0.0;
        for (i, z) in self.margins(w, b).into_iter().enumerate() {
            let r = (sigmoid(z) - self.y[i]) / n;
            gb += r;
            for &j in self.x.active(i) {
                gw[j as usize] += r;
            }
        }
        (gw, gb)
    }

    /// Full-batch gradient descent with Armijo backtracking from zero.
    fn fit(&self, params: &LogRegParams) -> (Vec<f64>, f64) {
        let mut w = vec![0.0; self.x.n_cols()];
        let mut b = 0.0;
        let mut loss = self.objective(&w, b);
        let mut step = 1.0;
        for _ in 0..params.max_iterations {
            let (gw, gb) = self.gradient(&w, b);
            let gnorm2 = gw.iter().map(|g| g * g).sum::<f64>() + gb * gb;
            if gnorm2 == 0.0 {
                break;
            }
            step *= 2.0;
            let mut accepted = None;
            for _ in 0..60 {
                let nw: Vec<f64> = w.iter().zip(&gw).map(|(v, g)| v - step * g).collect();
                let nb = b - step * gb;
                let nl = self.objective(&nw, nb);
                if nl <= loss - 0.5 * step * gnorm2 {
                    accepted = Some((nw, nb, nl));
                    break;
                }
                step *= 0.5;
            }
            let Some((nw, nb, nl)) = accepted else {
                break;
            };
            let rel = (loss - nl) / loss.abs().max(f64::MIN_POSITIVE);
            w = nw;
            b = nb;
            loss = nl;
            if rel < params.tol {
                break;
            }
        }
        (w, b)
    }
}

/// One-vs-rest L2 logistic regression. With two classes the second class is
/// the negation of the first.
pub fn fit_logreg(
    x: &FeatureMatrix,
    labels: &[usize],
    n_classes: usize,
    params: &LogRegParams,
) -> Result<LinearWeights> {
    if labels.len() != x.n_rows() {
        return Err(Error::config("label count differs from matrix rows"));
    }
    if x.n_rows() == 0 {
        return Err(Error::EmptyTrainingSet);
    }
    if n_classes < 2 {
        return Err(Error::SingleClass(n_classes));
    }
    let lambda = params.lambda.unwrap_or(1.0 / x.n_rows() as f64);
    if !(lambda.is_finite() && lambda >= 0.0) {
        return Err(Error::config("lambda must be finite and non-negative"));
    }
    let fit_class = |k: usize| {
        Binary {
            x,
            y: labels.iter().map(|&l| f64::from(u8::from(l == k))).collect(),
            lambda,
        }
        .fit(params)
    };
    let (weights, intercepts) = if n_classes == 2 {
        let (w, b) = fit_class(0);
        let neg = w.iter().map(|v| -v).collect();
        (vec![w, neg], vec![b, -b])
    } else {
        (0..n_classes).map(fit_class).unzip()
    };
    Ok(LinearWeights {
        weights,
        intercepts,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Mode {
    #[serde(rename = "ensemble")]
    Ensemble,
    #[serde(rename = "fs")]
    FeatureSelection,
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "ensemble" => Ok(Mode::Ensemble),
            "fs" | "feature-selection" => Ok(Mode::FeatureSelection),
            other => Err(Error::config(format!(
                "unknown mode {other:?} (expected ensemble or fs)"
            ))),
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Ensemble => "ensemble",
            Mode::FeatureSelection => "fs",
        })
    }
}

/// Harvested features with their fitted linear weights.
#[derive(Debug, Clone)]
pub struct LinearPart {
    features: Vec<HarvestedFeature>,
    weights: LinearWeights,
    index: FeatureIndex,
    transformers: Vec<Transformer>,
}

impl PartialEq for LinearPart {
    fn eq(&self, other: &Self) -> bool {
        self.features == other.features && self.weights == other.weights
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ModelBody {
    Ensemble(EnsembleModel),
    Linear(LinearPart),
}

/// A trained classifier in either mode.
#[derive(Debug, Clone, PartialEq)]
pub struct MrSeqlModel {
    classes: Vec<String>,
    grid: Vec<RepConfig>,
    body: ModelBody,
}

/// Label, per-class values and whether they are probabilities (fs mode) or
/// summed raw scores (ensemble mode).
#[derive(Debug, Clone, PartialEq)]
pub struct Prediction {
    pub class: usize,
    pub scores: Vec<f64>,
}

impl MrSeqlModel {
    pub fn ensemble(model: EnsembleModel) -> Self {
        MrSeqlModel {
            classes: model.classes().to_vec(),
            grid: model.members().iter().map(|m| m.config().clone()).collect(),
            body: ModelBody::Ensemble(model),
        }
    }

    /// Assembles a feature-selection model. Every feature must refer to a
    /// fitted config of `grid`.
    pub fn linear(
        classes: Vec<String>,
        grid: Vec<RepConfig>,
        features: Vec<HarvestedFeature>,
        weights: LinearWeights,
    ) -> Result<Self> {
        if classes.len() < 2 {
            return Err(Error::SingleClass(classes.len()));
        }
        if weights.weights.len() != classes.len() || weights.intercepts.len() != classes.len() {
            return Err(Error::config("weights do not cover every class"));
        }
        if weights.weights.iter().any(|w| w.len() != features.len()) {
            return Err(Error::config("weight dimension differs from feature count"));
        }
        let index = FeatureIndex::new(&grid, &features)?;
        let transformers = index
            .groups
            .iter()
            .map(|(g, _)| grid[*g].transformer())
            .collect::<Result<_>>()?;
        Ok(MrSeqlModel {
            classes,
            grid,
            body: ModelBody::Linear(LinearPart {
                features,
                weights,
                index,
                transformers,
            }),
        })
    }

    pub fn mode(&self) -> Mode {
        match self.body {
            ModelBody::Ensemble(_) => Mode::Ensemble,
            ModelBody::Linear(_) => Mode::FeatureSelection,
        }
    }

    pub fn classes(&self) -> &[String] {
        &self.classes
    }

    pub fn grid(&self) -> &[RepConfig] {
        &self.grid
    }

    pub fn body(&self) -> &ModelBody {
        &self.body
    }

    pub fn ensemble_part(&self) -> Option<&EnsembleModel> {
        match &self.body {
            ModelBody::Ensemble(e) => Some(e),
            ModelBody::Linear(_) => None,
        }
    }

    pub fn features(&self) -> &[HarvestedFeature] {
        match &self.body {
            ModelBody::Linear(l) => &l.features,
            ModelBody::Ensemble(_) => &[],
        }
    }

    pub fn weights(&self) -> Option<&LinearWeights> {
        match &self.body {
            ModelBody::Linear(l) => Some(&l.weights),
            ModelBody::Ensemble(_) => None,
        }
    }

    /// Active feature columns of one series (fs mode). Configs whose window
    /// exceeds the series abstain; if every config abstains the series is
    /// rejected.
    pub fn feature_row(&self, values: &[f64]) -> Result<Vec<u32>> {
        let ModelBody::Linear(lin) = &self.body else {
            return Err(Error::UnsupportedMode("feature rows need a feature-selection model"));
        };
        let mut active = Vec::new();
        let mut any = lin.index.groups.is_empty();
        for (gi, t) in lin.transformers.iter().enumerate() {
            if let Some(cols) = lin.index.group_row(gi, t, values)? {
                any = true;
                active.extend(cols);
            }
        }
        let smallest = self.grid.iter().map(|c| c.rep.window).min().unwrap_or(0);
        if !any || values.len() < smallest {
            return Err(Error::SeriesTooShort {
                len: values.len(),
                window: smallest,
            });
        }
        active.sort_unstable();
        Ok(active)
    }

    pub fn predict(&self, values: &[f64]) -> Result<Prediction> {
        match &self.body {
            ModelBody::Ensemble(e) => {
                let (class, scores) = e.predict(values)?;
                Ok(Prediction { class, scores })
            }
            ModelBody::Linear(lin) => {
                let active = self.feature_row(values)?;
                let probs = softmax(&lin.weights.scores(&active));
                Ok(Prediction {
                    class: argmax(&probs),
                    scores: probs,
                })
            }
        }
    }

    pub fn predict_all(&self, data: &Dataset, exec: Execution) -> Result<Vec<Prediction>> {
        exec.try_map(data.series(), |s| self.predict(s.values()))
    }
}

pub fn predict_class(model: &MrSeqlModel, series: &TimeSeries) -> Result<Prediction> {
    model.predict(series.values())
}

/// Everything needed to train a model from a labeled dataset.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrainOptions {
    pub mode: Mode,
    pub domains: DomainSet,
    pub grid: GridOptions,
    pub seql: SeqlParams,
    pub logreg: LogRegParams,
    pub exec: Execution,
}

impl Default for TrainOptions {
    fn default() -> Self {
        TrainOptions {
            mode: Mode::FeatureSelection,
            domains: DomainSet::Both,
            grid: GridOptions::default(),
            seql: SeqlParams::default(),
            logreg: LogRegParams::default(),
            exec: Execution::Parallel,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainReport {
    pub members: Vec<MemberReport>,
    pub n_features: usize,
    pub seql_seconds: f64,
    pub linear_seconds: f64,
}

pub fn train_model(train: &Dataset, opts: &TrainOptions) -> Result<(MrSeqlModel, TrainReport)> {
    let grid = make_config_grid(train.max_length(), opts.domains, &opts.grid)?;
    log::info!(
        "grid: {}",
        grid.iter().map(|c| c.rep.to_string()).collect::<Vec<_>>().join(", ")
    );
    let start = Instant::now();
    let (members, reports) = multi_rep::train_members(train, &grid, &opts.seql, opts.exec)?;
    let seql_seconds = start.elapsed().as_secs_f64();
    let start = Instant::now();
    let (model, n_features) = match opts.mode {
        Mode::Ensemble => {
            let n = members.iter().map(|m: &Member| m.models().models().iter().map(|x| x.len()).sum::<usize>()).sum();
            let e = EnsembleModel::new(members, train.classes().to_vec())?;
            (MrSeqlModel::ensemble(e), n)
        }
        Mode::FeatureSelection => {
            let features = multi_rep::harvest_from_members(&members);
            let grid: Vec<RepConfig> = members.into_iter().map(|m| m.config().clone()).collect();
            let x = vectorize(train, &grid, &features, opts.exec)?;
            let weights = fit_logreg(&x, &train.label_codes()?, train.classes().len(), &opts.logreg)?;
            let n = features.len();
            (MrSeqlModel::linear(train.classes().to_vec(), grid, features, weights)?, n)
        }
    };
    let report = TrainReport {
        members: reports,
        n_features,
        seql_seconds,
        linear_seconds: start.elapsed().as_secs_f64(),
    };
    Ok((model, report))
}

/// Error rate of `model` on labeled `test` data plus the confusion matrix
/// (rows: true class, columns: predicted). Test labels unknown to the model
/// count as errors and are reported by name.
#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation {
    pub error_rate: f64,
    pub confusion: Vec<Vec<usize>>,
    pub unseen: Vec<String>,
    pub predictions: Vec<Prediction>,
}

pub fn evaluate(model: &MrSeqlModel, test: &Dataset, exec: Execution) -> Result<Evaluation> {
    if test.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let predictions = model.predict_all(test, exec)?;
    let k = model.classes().len();
    let mut confusion = vec![vec![0; k]; k];
    let mut wrong = 0;
    let mut unseen = Vec::new();
    for (i, p) in predictions.iter().enumerate() {
        let name = test.label_name(i).ok_or(Error::config("test series without label"))?;
        match model.classes().iter().position(|c| c == name) {
            Some(truth) => {
                confusion[truth][p.class] += 1;
                if truth != p.class {
                    wrong += 1;
                }
            }
            None => {
                wrong += 1;
                if !unseen.iter().any(|u| u == name) {
                    unseen.push(name.to_string());
                }
            }
        }
    }
    Ok(Evaluation {
        error_rate: wrong as f64 / predictions.len() as f64,
        confusion,
        unseen,
        predictions,
    })
}
