//! Grids of representations, the voting ensemble built over them, and the
//! feature harvest that feeds the linear model.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::dataset::{Dataset, TimeSeries};
use crate::error::{Error, Result};
use crate::par::Execution;
use crate::sax::{SaxConfig, SaxTransformer};
use crate::seql::{self, OneVsAll, SeqlParams, SequenceCorpus};
use crate::sfa::{fit_sfa, McbTable, SfaConfig, SfaTransformer};
use crate::symbolic::{Domain, Representation, SymbolicSequence, Token};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DomainSet {
    Sax,
    Sfa,
    Both,
}

impl DomainSet {
    pub fn includes(self, d: Domain) -> bool {
        matches!(
            (self, d),
            (DomainSet::Both, _) | (DomainSet::Sax, Domain::Sax) | (DomainSet::Sfa, Domain::Sfa)
        )
    }
}

impl FromStr for DomainSet {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "sax" => Ok(DomainSet::Sax),
            "sfa" => Ok(DomainSet::Sfa),
            "both" => Ok(DomainSet::Both),
            other => Err(Error::config(format!(
                "unknown domain set {other:?} (expected sax, sfa or both)"
            ))),
        }
    }
}

impl fmt::Display for DomainSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DomainSet::Sax => "sax",
            DomainSet::Sfa => "sfa",
            DomainSet::Both => "both",
        })
    }
}

/// Window for single-representation mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FixedWindow {
    /// `round(0.2 * L_max)`
    Auto,
    Len(usize),
}

impl FromStr for FixedWindow {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.eq_ignore_ascii_case("auto") {
            return Ok(FixedWindow::Auto);
        }
        s.parse()
            .map(FixedWindow::Len)
            .map_err(|_| Error::config(format!("fixed window {s:?} is neither `auto` nor a length")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GridOptions {
    pub minl: usize,
    /// Scales the window step; 0.5 doubles the number of windows.
    pub step_mult: f64,
    /// Replaces the grid by a single window per domain.
    pub fixed: Option<FixedWindow>,
    pub w_sax: usize,
    pub w_sfa: usize,
    pub alpha: usize,
}

impl Default for GridOptions {
    fn default() -> Self {
        GridOptions {
            minl: 16,
            step_mult: 1.0,
            fixed: None,
            w_sax: 16,
            w_sfa: 8,
            alpha: 4,
        }
    }
}

/// Window lengths for a training maximum of `l_max`.
pub fn window_lengths(l_max: usize, opts: &GridOptions) -> Result<Vec<usize>> {
    if l_max == 0 {
        return Err(Error::EmptyDataset);
    }
    if let Some(fixed) = opts.fixed {
        let l = match fixed {
            FixedWindow::Auto => ((0.2 * l_max as f64).round() as usize).max(1),
            FixedWindow::Len(l) => l,
        };
        if l == 0 || l > l_max {
            return Err(Error::config(format!(
                "fixed window {l} outside 1..={l_max}"
            )));
        }
        return Ok(vec![l]);
    }
    if opts.minl == 0 {
        return Err(Error::config("minl must be positive"));
    }
    if !(opts.step_mult.is_finite() && opts.step_mult > 0.0) {
        return Err(Error::config("step multiplier must be positive"));
    }
    if l_max < opts.minl {
        return Ok(vec![l_max]);
    }
    let base = ((l_max as f64).sqrt().floor() as usize).max(1);
    let step = ((base as f64 * opts.step_mult).floor() as usize).max(1);
    Ok((opts.minl..=l_max).step_by(step).collect())
}

/// One representation of the grid; SFA configs carry their table once fitted.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RepConfig {
    pub rep: Representation,
    pub mcb: Option<McbTable>,
}

impl RepConfig {
    pub fn new(rep: Representation) -> Result<Self> {
        rep.validate()?;
        Ok(RepConfig { rep, mcb: None })
    }

    pub fn is_fitted(&self) -> bool {
        self.rep.domain == Domain::Sax || self.mcb.is_some()
    }

    /// Fits the MCB table of an SFA config on `train`; SAX configs pass
    /// through unchanged.
    pub fn fitted(mut self, train: &Dataset) -> Result<Self> {
        if self.rep.domain == Domain::Sfa && self.mcb.is_none() {
            let cfg = SfaConfig::new(self.rep.window, self.rep.word_len, self.rep.alphabet)?;
            self.mcb = Some(fit_sfa(train, &cfg)?);
        }
        Ok(self)
    }

    pub fn transformer(&self) -> Result<Transformer> {
        let r = self.rep;
        match r.domain {
            Domain::Sax => Ok(Transformer::Sax(SaxTransformer::new(SaxConfig::new(
                r.window, r.word_len, r.alphabet,
            )?)?)),
            Domain::Sfa => {
                let table = self.mcb.clone().ok_or(Error::UnfittedConfig {
                    window: r.window,
                    word_len: r.word_len,
                })?;
                Ok(Transformer::Sfa(SfaTransformer::new(
                    SfaConfig::new(r.window, r.word_len, r.alphabet)?,
                    table,
                )?))
            }
        }
    }
}

/// A ready-to-use transform for one [`RepConfig`].
#[derive(Debug, Clone)]
pub enum Transformer {
    Sax(SaxTransformer),
    Sfa(SfaTransformer),
}

impl Transformer {
    pub fn window(&self) -> usize {
        match self {
            Transformer::Sax(t) => t.config().window,
            Transformer::Sfa(t) => t.config().window,
        }
    }

    pub fn transform(&self, values: &[f64]) -> Result<SymbolicSequence> {
        match self {
            Transformer::Sax(t) => t.transform(values),
            Transformer::Sfa(t) => t.transform(values),
        }
    }

    /// `None` when the series is shorter than the window.
    pub fn transform_or_abstain(&self, values: &[f64]) -> Result<Option<SymbolicSequence>> {
        if values.len() < self.window() {
            Ok(None)
        } else {
            self.transform(values).map(Some)
        }
    }
}

fn word_len_for(domain: Domain, window: usize, opts: &GridOptions) -> usize {
    match domain {
        Domain::Sax => opts.w_sax.min(window),
        Domain::Sfa => {
            let w = opts.w_sfa.min(window);
            w - w % 2
        }
    }
}

/// Unfitted grid: all SAX windows in ascending order, then all SFA windows.
pub fn make_config_grid(
    l_max: usize,
    domains: DomainSet,
    opts: &GridOptions,
) -> Result<Vec<RepConfig>> {
    let windows = window_lengths(l_max, opts)?;
    let mut grid = Vec::new();
    for domain in [Domain::Sax, Domain::Sfa] {
        if !domains.includes(domain) {
            continue;
        }
        for &l in &windows {
            grid.push(RepConfig::new(Representation {
                domain,
                window: l,
                word_len: word_len_for(domain, l, opts),
                alphabet: opts.alpha,
            })?);
        }
    }
    Ok(grid)
}

/// Fits every SFA config of `grid` on `train`.
pub fn fit_grid(grid: Vec<RepConfig>, train: &Dataset, exec: Execution) -> Result<Vec<RepConfig>> {
    exec.try_map(&grid, |c| c.clone().fitted(train))
}

/// Transforms every series; series shorter than the window give an empty
/// sequence.
pub fn transform_dataset(t: &Transformer, data: &Dataset) -> Result<Vec<SymbolicSequence>> {
    data.series()
        .iter()
        .map(|s| {
            Ok(match t.transform_or_abstain(s.values())? {
                Some(seq) => seq,
                None => SymbolicSequence::new(rep_of(t)),
            })
        })
        .collect()
}

fn rep_of(t: &Transformer) -> Representation {
    match t {
        Transformer::Sax(t) => t.config().representation(),
        Transformer::Sfa(t) => t.config().representation(),
    }
}

/// One trained grid entry.
#[derive(Debug, Clone)]
pub struct Member {
    config: RepConfig,
    transformer: Transformer,
    models: OneVsAll,
}

impl Member {
    pub fn new(config: RepConfig, models: OneVsAll) -> Result<Self> {
        let transformer = config.transformer()?;
        Ok(Member {
            config,
            transformer,
            models,
        })
    }

    pub fn config(&self) -> &RepConfig {
        &self.config
    }

    pub fn models(&self) -> &OneVsAll {
        &self.models
    }

    pub fn transformer(&self) -> &Transformer {
        &self.transformer
    }

    /// Per-class scores, or `None` when the series is shorter than the window.
    pub fn scores(&self, values: &[f64]) -> Result<Option<Vec<f64>>> {
        Ok(self
            .transformer
            .transform_or_abstain(values)?
            .map(|seq| self.models.scores(&seq)))
    }
}

impl PartialEq for Member {
    fn eq(&self, other: &Self) -> bool {
        self.config == other.config && self.models == other.models
    }
}

/// Timing and size of one member's training run.
#[derive(Debug, Clone, PartialEq)]
pub struct MemberReport {
    pub rep: Representation,
    pub seconds: f64,
    pub features: usize,
    pub iterations: usize,
    pub nodes_evaluated: u64,
    pub nodes_pruned: u64,
}

fn check_lengths(train: &Dataset, grid: &[RepConfig]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::config("empty representation grid"));
    }
    let smallest = grid.iter().map(|c| c.rep.window).min().unwrap_or(0);
    if train.min_length() < smallest {
        return Err(Error::SeriesTooShort {
            len: train.min_length(),
            window: smallest,
        });
    }
    Ok(())
}

/// Fits (if needed), transforms and trains every config. Results are in grid
/// order whatever the execution mode.
pub fn train_members(
    train: &Dataset,
    grid: &[RepConfig],
    params: &SeqlParams,
    exec: Execution,
) -> Result<(Vec<Member>, Vec<MemberReport>)> {
    check_lengths(train, grid)?;
    let labels = train.label_codes()?;
    let n_classes = train.classes().len();
    let trained = exec.try_map(grid, |config| -> Result<(Member, MemberReport)> {
        let start = Instant::now();
        let config = config.clone().fitted(train)?;
        let transformer = config.transformer()?;
        let sequences = transform_dataset(&transformer, train)?;
        let corpus = SequenceCorpus::new(config.rep, sequences)?;
        let (models, summary) = seql::train_one_vs_all(&corpus, &labels, n_classes, params)?;
        let features = models.models().iter().map(|m| m.len()).sum();
        let report = MemberReport {
            rep: config.rep,
            seconds: start.elapsed().as_secs_f64(),
            features,
            iterations: summary.iterations,
            nodes_evaluated: summary.stats.nodes_evaluated,
            nodes_pruned: summary.stats.nodes_pruned,
        };
        log::debug!(
            "{}: {} features, {} iterations, {:.3}s",
            config.rep,
            features,
            summary.iterations,
            report.seconds
        );
        Ok((
            Member {
                config,
                transformer,
                models,
            },
            report,
        ))
    })?;
    Ok(trained.into_iter().unzip())
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleModel {
    members: Vec<Member>,
    classes: Vec<String>,
}

impl EnsembleModel {
    pub fn new(members: Vec<Member>, classes: Vec<String>) -> Result<Self> {
        if members.is_empty() {
            return Err(Error::config("an ensemble needs at least one member"));
        }
        if let Some(m) = members
            .iter()
            .find(|m| m.models.n_classes() != classes.len())
        {
            return Err(Error::config(format!(
                "member {} covers {} classes, expected {}",
                m.config.rep,
                m.models.n_classes(),
                classes.len()
            )));
        }
        Ok(EnsembleModel { members, classes })
    }

    pub fn members(&self) -> &[Member] {
        &self.members
    }

    pub fn classes(&self) -> &[String] {
        &self.classes
    }

    /// Per-class scores summed over members, in member order. Members whose
    /// window exceeds the series length abstain.
    pub fn scores(&self, values: &[f64]) -> Result<Vec<f64>> {
        let mut total = vec![0.0; self.classes.len()];
        let mut voted = false;
        for m in &self.members {
            match m.scores(values)? {
                Some(s) => {
                    voted = true;
                    for (t, v) in total.iter_mut().zip(s) {
                        *t += v;
                    }
                }
                None => log::debug!(
                    "{} abstains on a series of length {}",
                    m.config.rep,
                    values.len()
                ),
            }
        }
        if !voted {
            return Err(Error::SeriesTooShort {
                len: values.len(),
                window: self.members.iter().map(|m| m.config.rep.window).min().unwrap_or(0),
            });
        }
        Ok(total)
    }

    /// Argmax of the summed scores, ties to the lower class index. With two
    /// classes this is the sign of the score difference.
    pub fn predict(&self, values: &[f64]) -> Result<(usize, Vec<f64>)> {
        let scores = self.scores(values)?;
        Ok((seql::argmax(&scores), scores))
    }
}

/// Trains one member per config.
pub fn train_ensemble(
    train: &Dataset,
    grid: &[RepConfig],
    params: &SeqlParams,
    exec: Execution,
) -> Result<(EnsembleModel, Vec<MemberReport>)> {
    let (members, reports) = train_members(train, grid, params, exec)?;
    Ok((EnsembleModel::new(members, train.classes().to_vec())?, reports))
}

pub fn predict_ensemble(model: &EnsembleModel, series: &TimeSeries) -> Result<(usize, Vec<f64>)> {
    model.predict(series.values())
}

/// A selected subsequence together with the representation it lives in.
/// `(rep, pattern)` is the identity; `source_class` records the first
/// one-vs-all model that produced it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HarvestedFeature {
    pub rep: Representation,
    pub pattern: Vec<Token>,
    pub source_class: usize,
}

impl HarvestedFeature {
    pub fn render(&self) -> String {
        self.rep.render(&self.pattern)
    }
}

/// Union of all nonzero-coefficient subsequences over members and classes,
/// in member, class and selection order.
pub fn harvest_from_members(members: &[Member]) -> Vec<HarvestedFeature> {
    let mut seen: HashSet<(Representation, &[Token])> = HashSet::new();
    let mut out = Vec::new();
    for m in members {
        for (class, model) in m.models.models().iter().enumerate() {
            for (pattern, coef) in model.features() {
                if *coef != 0.0 && seen.insert((m.config.rep, pattern.as_slice())) {
                    out.push(HarvestedFeature {
                        rep: m.config.rep,
                        pattern: pattern.clone(),
                        source_class: class,
                    });
                }
            }
        }
    }
    out
}

/// Trains every config and returns the fitted grid with the harvested
/// features.
pub fn harvest_features(
    train: &Dataset,
    grid: &[RepConfig],
    params: &SeqlParams,
    exec: Execution,
) -> Result<(Vec<RepConfig>, Vec<HarvestedFeature>, Vec<MemberReport>)> {
    let (members, reports) = train_members(train, grid, params, exec)?;
    let features = harvest_from_members(&members);
    let fitted = members.into_iter().map(|m| m.config).collect();
    Ok((fitted, features, reports))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seql::{score_sequence, LabeledSequenceSet};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn windows(grid: &[RepConfig], d: Domain) -> Vec<usize> {
        grid.iter()
            .filter(|c| c.rep.domain == d)
            .map(|c| c.rep.window)
            .collect()
    }

    #[test]
    fn grid_for_150() {
        let opts = GridOptions::default();
        let grid = make_config_grid(150, DomainSet::Sax, &opts).unwrap();
        let want: Vec<usize> = (0..12).map(|i| 16 + 12 * i).collect();
        assert_eq!(windows(&grid, Domain::Sax), want);
        assert!(grid.iter().all(|c| c.rep.word_len == 16 && c.rep.alphabet == 4));

        let both = make_config_grid(150, DomainSet::Both, &opts).unwrap();
        assert_eq!(both.len(), 24);
        let sfa = make_config_grid(150, DomainSet::Sfa, &opts).unwrap();
        assert!(sfa.iter().all(|c| c.rep.word_len == 8));
        let union: Vec<_> = grid.iter().chain(&sfa).cloned().collect();
        assert_eq!(both, union);

        let dense = GridOptions { step_mult: 0.5, ..opts };
        assert_eq!(window_lengths(150, &dense).unwrap().len(), 23);
    }

    #[test]
    fn grid_boundaries() {
        let opts = GridOptions::default();
        assert_eq!(window_lengths(16, &opts).unwrap(), vec![16]);
        let short = make_config_grid(10, DomainSet::Both, &opts).unwrap();
        assert_eq!(short.len(), 2);
        assert_eq!((short[0].rep.window, short[0].rep.word_len), (10, 10));
        assert_eq!((short[1].rep.window, short[1].rep.word_len), (10, 8));
        let odd = make_config_grid(7, DomainSet::Sfa, &opts).unwrap();
        assert_eq!(odd[0].rep.word_len, 6);
    }

    #[test]
    fn fixed_window_is_one_fifth() {
        let opts = GridOptions {
            fixed: Some(FixedWindow::Auto),
            ..GridOptions::default()
        };
        let grid = make_config_grid(150, DomainSet::Both, &opts).unwrap();
        assert_eq!(grid.len(), 2);
        assert_eq!(grid[0].rep, Representation { domain: Domain::Sax, window: 30, word_len: 16, alphabet: 4 });
        assert_eq!(grid[1].rep, Representation { domain: Domain::Sfa, window: 30, word_len: 8, alphabet: 4 });
        assert_eq!("auto".parse::<FixedWindow>().unwrap(), FixedWindow::Auto);
        assert_eq!("42".parse::<FixedWindow>().unwrap(), FixedWindow::Len(42));
    }

    /// Two noisy shapes: a bump early or late.
    pub(crate) fn toy_dataset(n_per_class: usize, len: usize, seed: u64) -> Dataset {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut items = Vec::new();
        for i in 0..2 * n_per_class {
            let class = i % 2;
            let centre = if class == 0 { len / 4 } else { 3 * len / 4 };
            let values: Vec<f64> = (0..len)
                .map(|t| {
                    let d = t as f64 - centre as f64;
                    (-d * d / 20.0).exp() * 3.0 + rng.gen_range(-0.3..0.3)
                })
                .collect();
            items.push((class.to_string(), values));
        }
        Dataset::from_labeled(items).unwrap()
    }

    fn three_class(seed: u64) -> Dataset {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut items = Vec::new();
        for i in 0..18 {
            let class = i % 3;
            let values: Vec<f64> = (0..40)
                .map(|t| {
                    let x = t as f64 / 40.0 * std::f64::consts::TAU * (class + 1) as f64;
                    x.sin() + rng.gen_range(-0.2..0.2)
                })
                .collect();
            items.push((format!("c{class}"), values));
        }
        Dataset::from_labeled(items).unwrap()
    }

    #[test]
    fn single_member_matches_direct_seql() {
        let data = toy_dataset(6, 40, 1);
        let grid = vec![RepConfig::new(Representation {
            domain: Domain::Sax,
            window: 16,
            word_len: 8,
            alphabet: 4,
        })
        .unwrap()];
        let params = SeqlParams::default();
        let (model, _) = train_ensemble(&data, &grid, &params, Execution::Sequential).unwrap();
        let t = grid[0].transformer().unwrap();
        let seqs = transform_dataset(&t, &data).unwrap();
        let corpus = SequenceCorpus::new(grid[0].rep, seqs.clone()).unwrap();
        let labels: Vec<i8> = data
            .label_codes()
            .unwrap()
            .iter()
            .map(|&c| if c == 0 { 1 } else { -1 })
            .collect();
        let direct = seql::train_seql(&LabeledSequenceSet { corpus: &corpus, labels }, &params).unwrap();
        for (s, seq) in data.series().iter().zip(&seqs) {
            let f = score_sequence(&direct, seq);
            let (pred, _) = model.predict(s.values()).unwrap();
            assert_eq!(pred == 0, f >= 0.0);
        }
    }

    #[test]
    fn ensemble_sums_member_scores() {
        let data = three_class(4);
        let mut grid = make_config_grid(40, DomainSet::Both, &GridOptions::default()).unwrap();
        grid.truncate(3);
        let (model, _) = train_ensemble(&data, &grid, &SeqlParams::default(), Execution::Parallel).unwrap();
        assert_eq!(model.members().len(), 3);
        let mut correct = 0;
        for s in data.series() {
            // re-score every member from scratch
            let mut want = vec![0.0; 3];
            for m in model.members() {
                let seq = m.config().transformer().unwrap().transform(s.values()).unwrap();
                for (k, lm) in m.models().models().iter().enumerate() {
                    want[k] += score_sequence(lm, &seq);
                }
            }
            let (pred, scores) = predict_ensemble(&model, s).unwrap();
            assert_eq!(scores, want);
            assert_eq!(pred, seql::argmax(&want));
            correct += usize::from(Some(pred) == s.label());
        }
        assert!(correct >= 15);
    }

    #[test]
    fn members_partition_by_domain_and_retrain_identically() {
        let data = toy_dataset(5, 36, 2);
        let grid = make_config_grid(36, DomainSet::Both, &GridOptions::default()).unwrap();
        let (a, _) = train_ensemble(&data, &grid, &SeqlParams::default(), Execution::Parallel).unwrap();
        let (b, _) = train_ensemble(&data, &grid, &SeqlParams::default(), Execution::Sequential).unwrap();
        assert_eq!(a, b);
        let sax = a.members().iter().filter(|m| m.config().rep.domain == Domain::Sax).count();
        assert_eq!(sax, 4);
        assert_eq!(a.members().len(), 8);
        assert!(a.members().iter().all(|m| m.config().is_fitted()));
    }

    #[test]
    fn short_series_abstain() {
        let data = toy_dataset(5, 36, 3);
        let grid = make_config_grid(36, DomainSet::Sax, &GridOptions::default()).unwrap();
        let (model, _) = train_ensemble(&data, &grid, &SeqlParams::default(), Execution::Sequential).unwrap();
        let values = &data.series()[0].values()[..20];
        let full = model.scores(values).unwrap();
        let first = model.members()[0].scores(values).unwrap().unwrap();
        assert_eq!(full, first);
        assert!(matches!(model.scores(&values[..10]), Err(Error::SeriesTooShort { .. })));
    }

    #[test]
    fn too_short_training_series_rejected() {
        let data = Dataset::from_labeled(vec![("a", vec![0.0; 20]), ("b", vec![1.0; 10])]).unwrap();
        let grid = make_config_grid(20, DomainSet::Sax, &GridOptions::default()).unwrap();
        assert!(matches!(
            train_ensemble(&data, &grid, &SeqlParams::default(), Execution::Sequential),
            Err(Error::SeriesTooShort { len: 10, window: 16 })
        ));
    }

    #[test]
    fn harvest_is_union_without_phantoms() {
        let data = three_class(8);
        let grid = make_config_grid(40, DomainSet::Both, &GridOptions::default()).unwrap();
        let (members, _) = train_members(&data, &grid, &SeqlParams::default(), Execution::Parallel).unwrap();
        let features = harvest_from_members(&members);
        let mut union = HashSet::new();
        for m in &members {
            for lm in m.models().models() {
                for (p, _) in lm.features() {
                    union.insert((m.config().rep, p.clone()));
                }
            }
        }
        assert_eq!(features.len(), union.len());
        for f in &features {
            let m = members.iter().find(|m| m.config().rep == f.rep).unwrap();
            let t = m.config().transformer().unwrap();
            assert!(data
                .series()
                .iter()
                .any(|s| t.transform(s.values()).unwrap().contains(&f.pattern)));
        }
    }

    #[test]
    fn empty_models_harvest_nothing() {
        let data = Dataset::from_labeled(vec![
            ("a", (0..20).map(f64::from).collect::<Vec<_>>()),
            ("b", (0..20).map(f64::from).collect()),
        ])
        .unwrap();
        let grid = make_config_grid(20, DomainSet::Sax, &GridOptions::default()).unwrap();
        let (_, features, _) =
            harvest_features(&data, &grid, &SeqlParams::default(), Execution::Sequential).unwrap();
        assert!(features.is_empty());
    }
}
