//! Saliency maps: linear-model weights spread back over the raw series.
//!
//! A match of `m` symbols starting at symbol `p` of a word whose window starts
//! at raw index `t` covers raw indices
//! `t + floor(p l / w) ..= t + ceil((p + m) l / w) - 1`. A feature with `n`
//! matches adds `weight / n` to every covered index of every match.

use std::collections::HashMap;
use std::io::Write;

use crate::error::{Error, Result};
use crate::linear_model::MrSeqlModel;
use crate::multi_rep::{RepConfig, Transformer};
use crate::symbolic::{Representation, SymbolicSequence, Token};

#[derive(Debug, Clone, PartialEq)]
pub struct SaliencyMap {
    pub weights: Vec<f64>,
    /// Class whose weights were mapped.
    pub class: usize,
}

/// One match of one feature.
#[derive(Debug, Clone, PartialEq)]
pub struct Contribution {
    pub feature: usize,
    pub offset: usize,
    pub span_start: usize,
    /// Inclusive.
    pub span_end: usize,
    /// Added to every index of the span.
    pub contribution: f64,
}

/// Raw index span of a match, inclusive at both ends.
pub fn segment_span(offset: usize, p: usize, m: usize, l: usize, w: usize) -> (usize, usize) {
    let start = offset + p * l / w;
    let end = offset + ((p + m) * l).div_ceil(w) - 1;
    (start, end)
}

fn add_feature(
    seq: &SymbolicSequence,
    pattern: &[Token],
    weight: f64,
    feature: usize,
    out: &mut [f64],
    breakdown: &mut Vec<Contribution>,
) {
    let rep = seq.representation();
    let found = seq.occurrences(pattern);
    if found.is_empty() {
        return;
    }
    let share = weight / found.len() as f64;
    for (word, p) in found {
        let offset = seq.offsets()[word];
        let (start, end) = segment_span(offset, p, pattern.len(), rep.window, rep.word_len);
        for v in &mut out[start..=end] {
            *v += share;
        }
        breakdown.push(Contribution {
            feature,
            offset,
            span_start: start,
            span_end: end,
            contribution: share,
        });
    }
}

/// Saliency of one weighted feature over an already transformed series of
/// raw length `len`.
pub fn map_sequence_feature(seq: &SymbolicSequence, pattern: &[Token], weight: f64, len: usize) -> Vec<f64> {
    let mut out = vec![0.0; len];
    add_feature(seq, pattern, weight, 0, &mut out, &mut Vec::new());
    out
}

/// Saliency of a single weighted feature. A series shorter than the window
/// gets an all-zero map.
pub fn map_feature_to_segments(
    config: &RepConfig,
    pattern: &[Token],
    weight: f64,
    values: &[f64],
) -> Result<Vec<f64>> {
    match config.transformer()?.transform_or_abstain(values)? {
        Some(seq) => Ok(map_sequence_feature(&seq, pattern, weight, values.len())),
        None => {
            log::info!("{} abstains on a series of length {}", config.rep, values.len());
            Ok(vec![0.0; values.len()])
        }
    }
}

/// Sum of the per-feature maps of every model feature for `class`, added in
/// feature order, plus the per-match breakdown.
pub fn explain_with_breakdown(
    model: &MrSeqlModel,
    values: &[f64],
    class: usize,
) -> Result<(SaliencyMap, Vec<Contribution>)> {
    let weights = model
        .weights()
        .ok_or(Error::UnsupportedMode("explanations need a feature-selection model"))?;
    if class >= model.classes().len() {
        return Err(Error::config(format!(
            "class index {class} out of range (model has {} classes)",
            model.classes().len()
        )));
    }
    let mut sequences: HashMap<Representation, Option<SymbolicSequence>> = HashMap::new();
    let mut total = vec![0.0; values.len()];
    let mut breakdown = Vec::new();
    let mut single = vec![0.0; values.len()];
    for (j, f) in model.features().iter().enumerate() {
        if !sequences.contains_key(&f.rep) {
            let config = model
                .grid()
                .iter()
                .find(|c| c.rep == f.rep)
                .ok_or_else(|| Error::config(format!("{} missing from the model grid", f.rep)))?;
            let t: Transformer = config.transformer()?;
            sequences.insert(f.rep, t.transform_or_abstain(values)?);
        }
        let Some(seq) = &sequences[&f.rep] else {
            continue;
        };
        single.iter_mut().for_each(|v| *v = 0.0);
        let before = breakdown.len();
        add_feature(seq, &f.pattern, weights.weights[class][j], j, &mut single, &mut breakdown);
        if breakdown.len() > before {
            for (t, s) in total.iter_mut().zip(&single) {
                *t += s;
            }
        }
    }
    Ok((
        SaliencyMap {
            weights: total,
            class,
        },
        breakdown,
    ))
}

pub fn explain_series(model: &MrSeqlModel, values: &[f64], class: usize) -> Result<SaliencyMap> {
    Ok(explain_with_breakdown(model, values, class)?.0)
}

/// CSV with header `t,value,saliency`.
pub fn export_saliency<W: Write>(values: &[f64], map: &SaliencyMap, mut out: W) -> Result<()> {
    if values.len() != map.weights.len() {
        return Err(Error::config(format!(
            "saliency map has {} entries for a series of length {}",
            map.weights.len(),
            values.len()
        )));
    }
    let io = |e| Error::io("saliency output", e);
    writeln!(out, "t,value,saliency").map_err(io)?;
    for (t, (v, s)) in values.iter().zip(&map.weights).enumerate() {
        writeln!(out, "{t},{v},{s}").map_err(io)?;
    }
    Ok(())
}

/// CSV with header `feature,subsequence,offset,span_start,span_end,contribution`.
pub fn export_breakdown<W: Write>(
    model: &MrSeqlModel,
    breakdown: &[Contribution],
    mut out: W,
) -> Result<()> {
    let io = |e| Error::io("breakdown output", e);
    writeln!(out, "feature,subsequence,offset,span_start,span_end,contribution").map_err(io)?;
    for c in breakdown {
        let f = &model.features()[c.feature];
        writeln!(
            out,
            "{},{}@{}:{},{},{},{},{}",
            c.feature,
            f.rep.domain,
            f.rep.window,
            f.render(),
            c.offset,
            c.span_start,
            c.span_end,
            c.contribution
        )
        .map_err(io)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::Dataset;
    use crate::linear_model::{train_model, LinearWeights, Mode, TrainOptions};
    use crate::multi_rep::{DomainSet, HarvestedFeature};
    use crate::par::Execution;
    use crate::symbolic::Domain;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn span_arithmetic() {
        assert_eq!(segment_span(10, 1, 2, 8, 4), (12, 15));
        assert_eq!(segment_span(0, 0, 4, 8, 4), (0, 7));
        // fractional segments round outward
        assert_eq!(segment_span(0, 1, 1, 10, 4), (2, 4));
        assert_eq!(segment_span(3, 2, 1, 10, 4), (8, 10));
    }

    fn sax(l: usize, w: usize) -> RepConfig {
        RepConfig::new(Representation {
            domain: Domain::Sax,
            window: l,
            word_len: w,
            alphabet: 4,
        })
        .unwrap()
    }

    #[test]
    fn absent_feature_maps_to_zero() {
        let cfg = sax(8, 4);
        let values: Vec<f64> = (0..20).map(f64::from).collect();
        // a rising ramp never yields a falling word
        let m = map_feature_to_segments(&cfg, &[0, 3], 1.0, &values).unwrap();
        assert!(m.iter().all(|&v| v == 0.0));
        let short = map_feature_to_segments(&cfg, &[0], 1.0, &values[..5]).unwrap();
        assert_eq!(short, vec![0.0; 5]);
    }

    /// Every occurrence computed from the rendered words, spans by the
    /// floor/ceil rule.
    fn oracle_map(cfg: &RepConfig, pattern: &[Token], weight: f64, values: &[f64]) -> Vec<f64> {
        let (l, w) = (cfg.rep.window, cfg.rep.word_len);
        let seq = cfg.transformer().unwrap().transform(values).unwrap();
        let mut hits = Vec::new();
        for (wi, word) in seq.words().enumerate() {
            for p in 0..=w - pattern.len() {
                if &word[p..p + pattern.len()] == pattern {
                    hits.push((seq.offsets()[wi], p));
                }
            }
        }
        let mut out = vec![0.0; values.len()];
        for &(t, p) in &hits {
            let lo = t + (p as f64 * l as f64 / w as f64).floor() as usize;
            let hi = t + ((p + pattern.len()) as f64 * l as f64 / w as f64).ceil() as usize - 1;
            for v in &mut out[lo..=hi] {
                *v += weight / hits.len() as f64;
            }
        }
        out
    }

    #[test]
    fn single_match_lands_on_derived_span() {
        let rep = sax(8, 4).rep;
        let mut seq = SymbolicSequence::new(rep);
        seq.push_word(&[0, 0, 0, 0], 0);
        seq.push_word(&[3, 1, 2, 3], 10);
        let m = map_sequence_feature(&seq, &[1, 2], 0.4, 18);
        for (i, v) in m.iter().enumerate() {
            assert_eq!(*v, if (12..=15).contains(&i) { 0.4 } else { 0.0 });
        }
        assert!(map_sequence_feature(&seq, &[2, 1], 0.4, 18).iter().all(|&v| v == 0.0));
    }

    #[test]
    fn transformed_maps_match_oracle() {
        let mut values = vec![0.0; 18];
        for v in values.iter_mut().skip(14) {
            *v = 5.0;
        }
        let cfg = sax(8, 4);
        let seq = cfg.transformer().unwrap().transform(&values).unwrap();
        let pattern = seq.word(seq.len() - 1)[1..3].to_vec();
        let m = map_feature_to_segments(&cfg, &pattern, 0.4, &values).unwrap();
        assert_eq!(m, oracle_map(&cfg, &pattern, 0.4, &values));
        assert!(m.iter().any(|&v| v != 0.0));
    }

    #[test]
    fn per_feature_maps_match_oracle_and_conserve_mass() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let len = rng.gen_range(12..40);
            let values: Vec<f64> = (0..len).map(|_| rng.gen_range(-2.0..2.0)).collect();
            let cfg = sax(rng.gen_range(4..=12), 4);
            let m = rng.gen_range(1..=3);
            let pattern: Vec<Token> = (0..m).map(|_| rng.gen_range(0..4)).collect();
            let weight = rng.gen_range(-1.0..1.0);
            let got = map_feature_to_segments(&cfg, &pattern, weight, &values).unwrap();
            let want = oracle_map(&cfg, &pattern, weight, &values);
            for (a, b) in got.iter().zip(&want) {
                assert!((a - b).abs() < 1e-12);
            }
            let seq = cfg.transformer().unwrap().transform(&values).unwrap();
            let occ = seq.occurrences(&pattern);
            let covered: usize = occ
                .iter()
                .map(|&(wi, p)| {
                    let (s, e) = segment_span(seq.offsets()[wi], p, m, cfg.rep.window, 4);
                    e - s + 1
                })
                .sum();
            let mass: f64 = got.iter().sum();
            let expected = if occ.is_empty() { 0.0 } else { weight * covered as f64 / occ.len() as f64 };
            assert!((mass - expected).abs() < 1e-9);
            assert!(got.iter().all(|v| v * weight >= 0.0));
        }
    }

    fn toy() -> Dataset {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let items: Vec<(String, Vec<f64>)> = (0..10)
            .map(|i| {
                let class = i % 2;
                let c = if class == 0 { 8.0 } else { 30.0 };
                let v = (0..40)
                    .map(|t| (-(t as f64 - c).powi(2) / 10.0).exp() * 3.0 + rng.gen_range(-0.2..0.2))
                    .collect();
                (format!("c{class}"), v)
            })
            .collect();
        Dataset::from_labeled(items).unwrap()
    }

    #[test]
    fn explanation_is_sum_of_feature_maps() {
        let data = toy();
        let opts = TrainOptions {
            domains: DomainSet::Both,
            exec: Execution::Sequential,
            ..TrainOptions::default()
        };
        let (model, _) = train_model(&data, &opts).unwrap();
        let w = model.weights().unwrap();
        for s in data.series().iter().take(4) {
            for class in 0..2 {
                let map = explain_series(&model, s.values(), class).unwrap();
                assert_eq!(map.weights.len(), s.len());
                let mut sum = vec![0.0; s.len()];
                for (j, f) in model.features().iter().enumerate() {
                    let cfg = model.grid().iter().find(|c| c.rep == f.rep).unwrap();
                    let single = map_feature_to_segments(cfg, &f.pattern, w.weights[class][j], s.values()).unwrap();
                    for (a, b) in sum.iter_mut().zip(single) {
                        *a += b;
                    }
                }
                assert_eq!(map.weights, sum);
            }
        }
        let ens = train_model(&data, &TrainOptions { mode: Mode::Ensemble, ..opts }).unwrap().0;
        assert!(matches!(explain_series(&ens, data.series()[0].values(), 0), Err(Error::UnsupportedMode(_))));
    }

    #[test]
    fn two_features_add_up() {
        let values: Vec<f64> = (0..30).map(|t| ((t * t) as f64 / 17.0).sin()).collect();
        let cfg = sax(10, 5);
        let seq = cfg.transformer().unwrap().transform(&values).unwrap();
        let f1 = seq.word(0)[..2].to_vec();
        let f2 = seq.word(seq.len() - 1)[3..].to_vec();
        let features = vec![
            HarvestedFeature { rep: cfg.rep, pattern: f1.clone(), source_class: 0 },
            HarvestedFeature { rep: cfg.rep, pattern: f2.clone(), source_class: 0 },
        ];
        let weights = LinearWeights {
            weights: vec![vec![0.7, -0.2], vec![-0.7, 0.2]],
            intercepts: vec![0.0, 0.0],
        };
        let model = MrSeqlModel::linear(vec!["a".into(), "b".into()], vec![cfg.clone()], features, weights).unwrap();
        let got = explain_series(&model, &values, 0).unwrap();
        let a = map_feature_to_segments(&cfg, &f1, 0.7, &values).unwrap();
        let b = map_feature_to_segments(&cfg, &f2, -0.2, &values).unwrap();
        let want: Vec<f64> = a.iter().zip(&b).map(|(x, y)| x + y).collect();
        assert_eq!(got.weights, want);
        let flipped = explain_series(&model, &values, 1).unwrap();
        for (x, y) in got.weights.iter().zip(&flipped.weights) {
            assert_eq!(*x, -*y);
        }
        assert!(explain_series(&model, &values, 2).is_err());
    }

    #[test]
    fn saliency_csv_round_trip() {
        let values = [1.5, -2.0, 0.1];
        let map = SaliencyMap { weights: vec![0.1 + 0.2, 0.0, -1e-300], class: 0 };
        let mut out = Vec::new();
        export_saliency(&values, &map, &mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 4);
        assert_eq!(lines[0], "t,value,saliency");
        let parsed: Vec<f64> = lines[1..]
            .iter()
            .map(|l| l.split(',').nth(2).unwrap().parse().unwrap())
            .collect();
        assert_eq!(parsed, map.weights);

        let zero = SaliencyMap { weights: vec![0.0; 3], class: 0 };
        let mut out = Vec::new();
        export_saliency(&values, &zero, &mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        assert!(text.lines().skip(1).all(|l| l.ends_with(",0")));
        assert!(export_saliency(&values[..2], &zero, Vec::new()).is_err());
    }
}
