//! Sequence learner: a sparse linear model over every contiguous within-word
//! subsequence, trained by greedy coordinate descent on the elastic-net
//! regularized logistic loss.
//!
//! The feature space is never materialised. Each iteration walks the
//! subsequence tree breadth-first from the unigrams, extending nodes one
//! symbol at a time inside a word, and prunes any subtree whose gradient
//! bound cannot beat the best gradient seen so far. The bound relies on
//! anti-monotonicity: an extension occurs in a subset of its parent's
//! documents.

use std::collections::{HashMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::symbolic::{Representation, SymbolicSequence, Token};

/// Training knobs. The defaults are implementation choices.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeqlParams {
    /// Regularization weight `C`.
    pub c: f64,
    /// Elastic-net mix: 1 is pure L1, 0 pure L2.
    pub alpha_reg: f64,
    pub max_iterations: usize,
    /// Stop when the relative loss decrease of an iteration drops below this.
    pub convergence_tol: f64,
}

impl Default for SeqlParams {
    fn default() -> Self {
        SeqlParams {
            c: 1.0,
            alpha_reg: 0.2,
            max_iterations: 5000,
            convergence_tol: 1e-6,
        }
    }
}

impl SeqlParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.c.is_finite() && self.c >= 0.0) {
            return Err(Error::config("C must be finite and non-negative"));
        }
        if !(0.0..=1.0).contains(&self.alpha_reg) {
            return Err(Error::config("alpha_reg must lie in [0, 1]"));
        }
        if self.max_iterations == 0 {
            return Err(Error::config("max_iterations must be at least 1"));
        }
        if !(self.convergence_tol.is_finite() && self.convergence_tol >= 0.0) {
            return Err(Error::config("convergence_tol must be finite and non-negative"));
        }
        Ok(())
    }

    /// Elastic-net penalty `C (alpha |b| + (1 - alpha) b^2 / 2)`.
    pub fn penalty(&self, beta: f64) -> f64 {
        self.c * (self.alpha_reg * beta.abs() + 0.5 * (1.0 - self.alpha_reg) * beta * beta)
    }

    /// Derivative of [`SeqlParams::penalty`], taking 0 as the L1 subgradient
    /// at `beta == 0`.
    pub fn penalty_gradient(&self, beta: f64) -> f64 {
        let sign = if beta > 0.0 {
            1.0
        } else if beta < 0.0 {
            -1.0
        } else {
            0.0
        };
        self.c * (self.alpha_reg * sign + (1.0 - self.alpha_reg) * beta)
    }
}

/// One match of a node's subsequence: the sequence id and the flat index
/// (word * word_len + position) of its first symbol.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct Occurrence {
    pub doc: u32,
    pub start: u32,
}

/// Sequences of one representation plus the unigram occurrence index.
#[derive(Debug, Clone)]
pub struct SequenceCorpus {
    rep: Representation,
    sequences: Vec<SymbolicSequence>,
    symbols: Vec<Vec<Token>>,
    unigrams: Vec<Vec<Occurrence>>,
}

impl SequenceCorpus {
    pub fn new(rep: Representation, sequences: Vec<SymbolicSequence>) -> Result<Self> {
        if sequences.is_empty() {
            return Err(Error::EmptyTrainingSet);
        }
        if let Some(bad) = sequences.iter().find(|s| *s.representation() != rep) {
            return Err(Error::config(format!(
                "sequence built with {} in a {} corpus",
                bad.representation(),
                rep
            )));
        }
        let mut unigrams = vec![Vec::new(); rep.token_count()];
        let symbols: Vec<Vec<Token>> = sequences
            .iter()
            .map(|s| s.words().flatten().copied().collect())
            .collect();
        for (doc, syms) in symbols.iter().enumerate() {
            for (start, &tok) in syms.iter().enumerate() {
                unigrams[tok as usize].push(Occurrence {
                    doc: doc as u32,
                    start: start as u32,
                });
            }
        }
        Ok(SequenceCorpus {
            rep,
            sequences,
            symbols,
            unigrams,
        })
    }

    pub fn representation(&self) -> &Representation {
        &self.rep
    }

    pub fn sequences(&self) -> &[SymbolicSequence] {
        &self.sequences
    }

    pub fn len(&self) -> usize {
        self.sequences.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sequences.is_empty()
    }

    /// Unigram postings for `token`, ordered by document then position.
    pub fn unigram_postings(&self, token: Token) -> &[Occurrence] {
        &self.unigrams[token as usize]
    }

    /// Root nodes of the subsequence tree, in token order.
    pub fn unigram_nodes(&self) -> Vec<SearchNode> {
        self.unigrams
            .iter()
            .enumerate()
            .filter(|(_, p)| !p.is_empty())
            .map(|(tok, p)| SearchNode {
                pattern: vec![tok as Token],
                postings: p.clone(),
            })
            .collect()
    }

    fn next_symbol(&self, occ: Occurrence, len: usize) -> Option<Token> {
        let w = self.rep.word_len;
        let start = occ.start as usize;
        if start % w + len < w {
            Some(self.symbols[occ.doc as usize][start + len])
        } else {
            None
        }
    }
}

/// A subsequence with its postings in the corpus.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchNode {
    pattern: Vec<Token>,
    postings: Vec<Occurrence>,
}

impl SearchNode {
    pub fn pattern(&self) -> &[Token] {
        &self.pattern
    }

    pub fn postings(&self) -> &[Occurrence] {
        &self.postings
    }

    /// Distinct documents containing the subsequence, ascending.
    pub fn doc_set(&self) -> Vec<u32> {
        let mut docs: Vec<u32> = self.postings.iter().map(|o| o.doc).collect();
        docs.dedup();
        docs
    }

    /// One-symbol extensions that stay within a word, in token order.
    pub fn children(&self, corpus: &SequenceCorpus) -> Vec<SearchNode> {
        let mut buckets = vec![Vec::new(); corpus.rep.token_count()];
        self.children_into(corpus, &mut buckets)
    }

    fn children_into(
        &self,
        corpus: &SequenceCorpus,
        buckets: &mut [Vec<Occurrence>],
    ) -> Vec<SearchNode> {
        let len = self.pattern.len();
        for &occ in &self.postings {
            if let Some(tok) = corpus.next_symbol(occ, len) {
                buckets[tok as usize].push(occ);
            }
        }
        let mut out = Vec::new();
        for (tok, bucket) in buckets.iter_mut().enumerate() {
            if bucket.is_empty() {
                continue;
            }
            let mut pattern = Vec::with_capacity(len + 1);
            pattern.extend_from_slice(&self.pattern);
            pattern.push(tok as Token);
            out.push(SearchNode {
                pattern,
                postings: std::mem::take(bucket),
            });
        }
        out
    }
}

/// Per-example margins `y_i * beta^T x_i` and the derived tail weights
/// `1 / (1 + exp(margin))`.
#[derive(Debug, Clone, PartialEq)]
pub struct MarginState {
    margins: Vec<f64>,
    tails: Vec<f64>,
}

#[inline]
fn tail(margin: f64) -> f64 {
    1.0 / (1.0 + margin.exp())
}

/// `log(1 + exp(-margin))` without overflow.
#[inline]
pub(crate) fn log_loss(margin: f64) -> f64 {
    if margin > 0.0 {
        (-margin).exp().ln_1p()
    } else {
        -margin + margin.exp().ln_1p()
    }
}

impl MarginState {
    pub fn zeros(n: usize) -> Self {
        MarginState {
            margins: vec![0.0; n],
            tails: vec![0.5; n],
        }
    }

    pub fn from_margins(margins: Vec<f64>) -> Self {
        let tails = margins.iter().map(|&m| tail(m)).collect();
        MarginState { margins, tails }
    }

    pub fn margins(&self) -> &[f64] {
        &self.margins
    }

    /// Data part of the loss, summed in example order.
    pub fn data_loss(&self) -> f64 {
        self.margins.iter().map(|&m| log_loss(m)).sum()
    }

    fn shift(&mut self, docs: &[u32], labels: &[i8], delta: f64) {
        for &d in docs {
            let d = d as usize;
            self.margins[d] += labels[d] as f64 * delta;
            self.tails[d] = tail(self.margins[d]);
        }
    }
}

/// Positive-class and negative-class tail sums over a node's documents,
/// accumulated in ascending document order.
fn class_sums(postings: &[Occurrence], labels: &[i8], tails: &[f64]) -> (f64, f64) {
    let mut pos = 0.0;
    let mut neg = 0.0;
    let mut last = u32::MAX;
    for occ in postings {
        if occ.doc == last {
            continue;
        }
        last = occ.doc;
        let t = tails[occ.doc as usize];
        if labels[occ.doc as usize] > 0 {
            pos += t;
        } else {
            neg += t;
        }
    }
    (pos, neg)
}

fn class_sums_docs(docs: &[u32], labels: &[i8], tails: &[f64]) -> (f64, f64) {
    let mut pos = 0.0;
    let mut neg = 0.0;
    for &d in docs {
        let t = tails[d as usize];
        if labels[d as usize] > 0 {
            pos += t;
        } else {
            neg += t;
        }
    }
    (pos, neg)
}

/// Partial derivative of the regularized loss with respect to the
/// coefficient of `node`, given its current value `beta`.
pub fn gradient(
    node: &SearchNode,
    beta: f64,
    labels: &[i8],
    state: &MarginState,
    params: &SeqlParams,
) -> f64 {
    let (pos, neg) = class_sums(&node.postings, labels, &state.tails);
    (neg - pos) + params.penalty_gradient(beta)
}

/// Upper bound on the absolute gradient of `node` and every within-word
/// extension of it: the larger one-sided tail sum plus the largest
/// regularizer magnitude among model features containing the node's
/// subsequence (0 for an empty model).
pub fn gradient_bound(
    node: &SearchNode,
    labels: &[i8],
    state: &MarginState,
    model: &LinearSeqModel,
    params: &SeqlParams,
) -> f64 {
    let (pos, neg) = class_sums(&node.postings, labels, &state.tails);
    let reg = model
        .features()
        .iter()
        .filter(|(p, _)| contains_slice(p, &node.pattern))
        .map(|(_, b)| params.penalty_gradient(*b).abs())
        .fold(0.0, f64::max);
    pos.max(neg) + reg
}

fn contains_slice(hay: &[Token], needle: &[Token]) -> bool {
    needle.len() <= hay.len() && hay.windows(needle.len()).any(|w| w == needle)
}

/// Sparse weighted list of subsequences.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearSeqModel {
    rep: Representation,
    features: Vec<(Vec<Token>, f64)>,
    params: SeqlParams,
}

impl LinearSeqModel {
    pub fn empty(rep: Representation, params: SeqlParams) -> Self {
        LinearSeqModel {
            rep,
            features: Vec::new(),
            params,
        }
    }

    /// Builds a model from explicit `(subsequence, coefficient)` pairs; zero
    /// coefficients are dropped.
    pub fn from_features(
        rep: Representation,
        features: Vec<(Vec<Token>, f64)>,
        params: SeqlParams,
    ) -> Self {
        LinearSeqModel {
            rep,
            features: features.into_iter().filter(|(_, b)| *b != 0.0).collect(),
            params,
        }
    }

    pub fn representation(&self) -> &Representation {
        &self.rep
    }

    /// Features in the order they entered the model.
    pub fn features(&self) -> &[(Vec<Token>, f64)] {
        &self.features
    }

    pub fn params(&self) -> &SeqlParams {
        &self.params
    }

    pub fn len(&self) -> usize {
        self.features.len()
    }

    pub fn is_empty(&self) -> bool {
        self.features.is_empty()
    }

    pub fn coefficient(&self, pattern: &[Token]) -> f64 {
        self.features
            .iter()
            .find(|(p, _)| p == pattern)
            .map_or(0.0, |(_, b)| *b)
    }

    /// Same features with every coefficient negated.
    pub fn mirrored(&self) -> Self {
        LinearSeqModel {
            rep: self.rep,
            features: self.features.iter().map(|(p, b)| (p.clone(), -b)).collect(),
            params: self.params,
        }
    }

    pub fn max_pattern_len(&self) -> usize {
        self.features.iter().map(|(p, _)| p.len()).max().unwrap_or(0)
    }
}

/// `beta^T x` with binary presence features.
pub fn score_sequence(model: &LinearSeqModel, seq: &SymbolicSequence) -> f64 {
    if model.is_empty() {
        return 0.0;
    }
    let present = seq.substrings(model.max_pattern_len());
    score_present(model, &present)
}

/// Scores against a precomputed substring set of a sequence.
pub fn score_present(model: &LinearSeqModel, present: &HashSet<&[Token]>) -> f64 {
    model
        .features
        .iter()
        .filter(|(p, _)| present.contains(p.as_slice()))
        .map(|(_, b)| *b)
        .sum()
}

/// The feature picked by one search.
#[derive(Debug, Clone, PartialEq)]
pub struct Selection {
    pub pattern: Vec<Token>,
    pub gradient: f64,
    pub docs: Vec<u32>,
}

impl Selection {
    fn beats(&self, abs: f64, pattern: &[Token]) -> bool {
        let best = self.gradient.abs();
        abs > best
            || (abs == best
                && (pattern.len(), pattern) < (self.pattern.len(), self.pattern.as_slice()))
    }
}

/// Search bookkeeping, accumulated over a training run.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SearchStats {
    pub nodes_evaluated: u64,
    pub nodes_pruned: u64,
}

#[derive(Debug, Clone)]
struct ModelEntry {
    pattern: Vec<Token>,
    coef: f64,
    docs: Vec<u32>,
}

/// Outcome of one coordinate update.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepOutcome {
    pub loss_before: f64,
    pub loss_after: f64,
    pub step: f64,
    pub accepted: bool,
}

/// Mutable state of one binary training run.
#[derive(Debug, Clone)]
pub struct SeqlTrainer<'a> {
    corpus: &'a SequenceCorpus,
    labels: Vec<i8>,
    params: SeqlParams,
    state: MarginState,
    entries: Vec<ModelEntry>,
    lookup: HashMap<Vec<Token>, usize>,
    penalty_total: f64,
    loss: f64,
    stats: SearchStats,
    buckets: Vec<Vec<Occurrence>>,
}

impl<'a> SeqlTrainer<'a> {
    pub fn new(corpus: &'a SequenceCorpus, labels: &[i8], params: SeqlParams) -> Result<Self> {
        params.validate()?;
        if labels.len() != corpus.len() {
            return Err(Error::config(format!(
                "{} labels for {} sequences",
                labels.len(),
                corpus.len()
            )));
        }
        if labels.iter().any(|&y| y != 1 && y != -1) {
            return Err(Error::config("binary labels must be +1 or -1"));
        }
        let distinct = labels.iter().collect::<HashSet<_>>().len();
        if distinct < 2 {
            return Err(Error::SingleClass(distinct));
        }
        let state = MarginState::zeros(labels.len());
        let loss = state.data_loss();
        Ok(SeqlTrainer {
            corpus,
            labels: labels.to_vec(),
            params,
            state,
            entries: Vec::new(),
            lookup: HashMap::new(),
            penalty_total: 0.0,
            loss,
            stats: SearchStats::default(),
            buckets: vec![Vec::new(); corpus.rep.token_count()],
        })
    }

    pub fn labels(&self) -> &[i8] {
        &self.labels
    }

    pub fn state(&self) -> &MarginState {
        &self.state
    }

    /// Current regularized loss.
    pub fn loss(&self) -> f64 {
        self.loss
    }

    pub fn stats(&self) -> SearchStats {
        self.stats
    }

    pub fn coefficient(&self, pattern: &[Token]) -> f64 {
        self.lookup
            .get(pattern)
            .map_or(0.0, |&i| self.entries[i].coef)
    }

    /// Regularized loss recomputed from scratch.
    pub fn full_loss(&self) -> f64 {
        self.state.data_loss()
            + self
                .entries
                .iter()
                .map(|e| self.params.penalty(e.coef))
                .sum::<f64>()
    }

    pub fn model(&self) -> LinearSeqModel {
        LinearSeqModel::from_features(
            self.corpus.rep,
            self.entries
                .iter()
                .map(|e| (e.pattern.clone(), e.coef))
                .collect(),
            self.params,
        )
    }

    fn node_gradient(&self, postings: &[Occurrence], pattern: &[Token]) -> (f64, f64) {
        let (pos, neg) = class_sums(postings, &self.labels, &self.state.tails);
        let beta = self.coefficient(pattern);
        ((neg - pos) + self.params.penalty_gradient(beta), pos.max(neg))
    }

    /// Finds the subsequence with the largest absolute gradient, ties going
    /// to the shorter and then lexicographically smaller subsequence.
    ///
    /// Model features are scored exactly up front; the tree walk then only
    /// has to beat them, so its pruning bound can omit the regularizer term
    /// (a subsequence outside the model has a zero penalty gradient).
    pub fn select_best_feature(&mut self) -> Option<Selection> {
        let mut best: Option<Selection> = None;
        for e in &self.entries {
            let (pos, neg) = class_sums_docs(&e.docs, &self.labels, &self.state.tails);
            let g = (neg - pos) + self.params.penalty_gradient(e.coef);
            if best.as_ref().map_or(true, |b| b.beats(g.abs(), &e.pattern)) {
                best = Some(Selection {
                    pattern: e.pattern.clone(),
                    gradient: g,
                    docs: e.docs.clone(),
                });
            }
        }

        let mut level = self.corpus.unigram_nodes();
        let mut bounds = Vec::new();
        while !level.is_empty() {
            bounds.clear();
            for node in &level {
                let (g, bound) = self.node_gradient(&node.postings, &node.pattern);
                self.stats.nodes_evaluated += 1;
                bounds.push(bound);
                if best.as_ref().map_or(true, |b| b.beats(g.abs(), &node.pattern)) {
                    best = Some(Selection {
                        pattern: node.pattern.clone(),
                        gradient: g,
                        docs: node.doc_set(),
                    });
                }
            }
            let mut next = Vec::new();
            for (node, &bound) in level.iter().zip(&bounds) {
                if node.pattern.len() >= self.corpus.rep.word_len {
                    continue;
                }
                let prune = best.as_ref().is_some_and(|b| {
                    let best_abs = b.gradient.abs();
                    // an equal bound can only tie, and a longer extension
                    // loses a tie unless the incumbent is longer still
                    bound < best_abs || (bound == best_abs && b.pattern.len() <= node.pattern.len())
                });
                if prune {
                    self.stats.nodes_pruned += 1;
                    continue;
                }
                next.extend(node.children_into(self.corpus, &mut self.buckets));
            }
            level = next;
        }
        best
    }

    /// Moves the selected coordinate along its negative gradient with a
    /// halving line search (start 1, at most 30 halvings). The step is taken
    /// only if the regularized loss strictly decreases.
    pub fn optimize_step(&mut self, sel: &Selection) -> StepOutcome {
        let before = self.loss;
        let mut outcome = StepOutcome {
            loss_before: before,
            loss_after: before,
            step: 0.0,
            accepted: false,
        };
        if sel.gradient == 0.0 || !sel.gradient.is_finite() {
            return outcome;
        }
        let old = self.coefficient(&sel.pattern);
        let old_penalty = self.params.penalty(old);
        let mut eta = 1.0;
        for _ in 0..=30 {
            let new = old - eta * sel.gradient;
            let delta = new - old;
            let mut change = self.params.penalty(new) - old_penalty;
            for &d in &sel.docs {
                let d = d as usize;
                let m = self.state.margins[d];
                change += log_loss(m + self.labels[d] as f64 * delta) - log_loss(m);
            }
            if change < 0.0 {
                self.state.shift(&sel.docs, &self.labels, delta);
                self.penalty_total += self.params.penalty(new) - old_penalty;
                self.loss = before + change;
                match self.lookup.get(&sel.pattern) {
                    Some(&i) => self.entries[i].coef = new,
                    None => {
                        self.lookup.insert(sel.pattern.clone(), self.entries.len());
                        self.entries.push(ModelEntry {
                            pattern: sel.pattern.clone(),
                            coef: new,
                            docs: sel.docs.clone(),
                        });
                    }
                }
                outcome.loss_after = self.loss;
                outcome.step = eta;
                outcome.accepted = true;
                return outcome;
            }
            eta *= 0.5;
        }
        outcome
    }

    /// One select-and-update iteration. Returns `None` when nothing can be
    /// selected (no symbols at all).
    pub fn iterate(&mut self) -> Option<(Selection, StepOutcome)> {
        let sel = self.select_best_feature()?;
        let out = self.optimize_step(&sel);
        Some((sel, out))
    }

    /// Runs until the relative loss decrease falls below the tolerance or the
    /// iteration budget is spent.
    pub fn run(&mut self) -> TrainSummary {
        let mut iterations = 0;
        while iterations < self.params.max_iterations {
            iterations += 1;
            let Some((_, out)) = self.iterate() else {
                break;
            };
            let rel = if out.loss_before > 0.0 {
                (out.loss_before - out.loss_after) / out.loss_before
            } else {
                0.0
            };
            if !out.accepted || rel < self.params.convergence_tol {
                break;
            }
        }
        TrainSummary {
            iterations,
            final_loss: self.loss,
            stats: self.stats,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrainSummary {
    pub iterations: usize,
    pub final_loss: f64,
    pub stats: SearchStats,
}

/// A corpus paired with binary labels.
#[derive(Debug, Clone)]
pub struct LabeledSequenceSet<'a> {
    pub corpus: &'a SequenceCorpus,
    pub labels: Vec<i8>,
}

/// Trains one binary model.
pub fn train_seql(data: &LabeledSequenceSet<'_>, params: &SeqlParams) -> Result<LinearSeqModel> {
    Ok(train_seql_with_summary(data, params)?.0)
}

pub fn train_seql_with_summary(
    data: &LabeledSequenceSet<'_>,
    params: &SeqlParams,
) -> Result<(LinearSeqModel, TrainSummary)> {
    let mut trainer = SeqlTrainer::new(data.corpus, &data.labels, *params)?;
    let summary = trainer.run();
    Ok((trainer.model(), summary))
}

/// One binary model per class (that class against the rest).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OneVsAll {
    models: Vec<LinearSeqModel>,
}

impl OneVsAll {
    pub fn from_models(models: Vec<LinearSeqModel>) -> Self {
        OneVsAll { models }
    }

    pub fn models(&self) -> &[LinearSeqModel] {
        &self.models
    }

    pub fn n_classes(&self) -> usize {
        self.models.len()
    }

    pub fn scores(&self, seq: &SymbolicSequence) -> Vec<f64> {
        let max_len = self
            .models
            .iter()
            .map(LinearSeqModel::max_pattern_len)
            .max()
            .unwrap_or(0);
        let present = seq.substrings(max_len);
        self.models
            .iter()
            .map(|m| score_present(m, &present))
            .collect()
    }

    pub fn predict(&self, seq: &SymbolicSequence) -> usize {
        argmax(&self.scores(seq))
    }
}

/// Index of the largest score; ties go to the lowest index.
pub fn argmax(scores: &[f64]) -> usize {
    let mut best = 0;
    for (i, &s) in scores.iter().enumerate().skip(1) {
        if s > scores[best] {
            best = i;
        }
    }
    best
}

/// Aggregated training statistics across the binary runs of one
/// one-vs-all fit.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct OneVsAllSummary {
    pub iterations: usize,
    pub stats: SearchStats,
}

/// Trains one model per class. With two classes the second model is the
/// exact mirror of the first, so only one run is performed.
pub fn train_one_vs_all(
    corpus: &SequenceCorpus,
    labels: &[usize],
    n_classes: usize,
    params: &SeqlParams,
) -> Result<(OneVsAll, OneVsAllSummary)> {
    if labels.len() != corpus.len() {
        return Err(Error::config("label count differs from sequence count"));
    }
    let present = labels.iter().collect::<HashSet<_>>().len();
    if n_classes < 2 || present < 2 {
        return Err(Error::SingleClass(present));
    }
    let mut summary = OneVsAllSummary::default();
    let mut run = |class: usize| -> Result<LinearSeqModel> {
        let binary: Vec<i8> = labels
            .iter()
            .map(|&l| if l == class { 1 } else { -1 })
            .collect();
        if !binary.contains(&1) {
            // class absent from this training set: it can never win
            return Ok(LinearSeqModel::empty(corpus.rep, *params));
        }
        let data = LabeledSequenceSet {
            corpus,
            labels: binary,
        };
        let (model, s) = train_seql_with_summary(&data, params)?;
        summary.iterations += s.iterations;
        summary.stats.nodes_evaluated += s.stats.nodes_evaluated;
        summary.stats.nodes_pruned += s.stats.nodes_pruned;
        Ok(model)
    };
    let models = if n_classes == 2 {
        let first = run(0)?;
        let second = first.mirrored();
        vec![first, second]
    } else {
        (0..n_classes).map(&mut run).collect::<Result<Vec<_>>>()?
    };
    Ok((OneVsAll { models }, summary))
}
