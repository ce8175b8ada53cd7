//! Symbolic Fourier Approximation: truncated DFT of each z-normalized window,
//! discretised per coefficient position by Multiple Coefficient Binning.
//!
//! Letters are ascending (`a` is the lowest bin) and each word position has
//! its own alphabet, so `b@3` and `b@4` are distinct symbols.

use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::dataset::{znormalize_in_place, Dataset, DEFAULT_EPSILON};
use crate::error::{Error, Result};
use crate::symbolic::{Domain, Representation, SymbolicSequence, Token};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SfaConfig {
    pub window: usize,
    pub word_len: usize,
    pub alphabet: usize,
}

impl SfaConfig {
    pub fn new(window: usize, word_len: usize, alphabet: usize) -> Result<Self> {
        let cfg = SfaConfig {
            window,
            word_len,
            alphabet,
        };
        cfg.representation().validate()?;
        Ok(cfg)
    }

    pub fn representation(&self) -> Representation {
        Representation {
            domain: Domain::Sfa,
            window: self.window,
            word_len: self.word_len,
            alphabet: self.alphabet,
        }
    }
}

/// One SFA symbol: a letter tied to a 1-based word position.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PositionalSymbol {
    pub letter: u8,
    pub position: usize,
}

impl PositionalSymbol {
    pub fn token(&self, alphabet: usize) -> Token {
        ((self.position - 1) * alphabet + self.letter as usize) as Token
    }

    pub fn from_token(token: Token, alphabet: usize) -> Self {
        let t = token as usize;
        PositionalSymbol {
            letter: (t % alphabet) as u8,
            position: t / alphabet + 1,
        }
    }
}

impl fmt::Display for PositionalSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", (b'a' + self.letter) as char, self.position)
    }
}

/// Precomputed cosine/sine basis for the first `word_len / 2` coefficients of
/// a length-`window` DFT.
#[derive(Debug, Clone)]
struct DftBasis {
    window: usize,
    cos: Vec<f64>,
    sin: Vec<f64>,
}

impl DftBasis {
    fn new(window: usize, word_len: usize) -> Self {
        let coeffs = word_len / 2;
        let mut cos = Vec::with_capacity(coeffs * window);
        let mut sin = Vec::with_capacity(coeffs * window);
        for k in 0..coeffs {
            for t in 0..window {
                // reduce the angle first so large k*t keeps full precision
                let phase = ((k * t) % window) as f64 / window as f64;
                let angle = 2.0 * PI * phase;
                cos.push(angle.cos());
                sin.push(angle.sin());
            }
        }
        DftBasis { window, cos, sin }
    }

    /// Writes interleaved `re_0, im_0, re_1, im_1, ...` scaled by `1 / window`.
    fn apply(&self, values: &[f64], out: &mut [f64]) {
        let n = self.window;
        let scale = 1.0 / n as f64;
        for (k, pair) in out.chunks_exact_mut(2).enumerate() {
            let cos = &self.cos[k * n..(k + 1) * n];
            let sin = &self.sin[k * n..(k + 1) * n];
            let mut re = 0.0;
            let mut im = 0.0;
            for ((&v, &c), &s) in values.iter().zip(cos).zip(sin) {
                re += v * c;
                im -= v * s;
            }
            pair[0] = re * scale;
            pair[1] = im * scale;
        }
    }

    /// As [`DftBasis::apply`] for a z-normalized window, whose DC term is zero
    /// by construction; rounding noise there is replaced by an exact 0.
    fn apply_normalized(&self, values: &[f64], out: &mut [f64]) {
        self.apply(values, out);
        out[0] = 0.0;
        out[1] = 0.0;
    }
}

/// First `w / 2` DFT coefficients of `window`, real and imaginary parts
/// interleaved, each divided by the window length.
pub fn dft_approx(window: &[f64], w: usize) -> Result<Vec<f64>> {
    if w % 2 != 0 {
        return Err(Error::config(format!("DFT word length {w} must be even")));
    }
    if w == 0 || w > window.len() {
        return Err(Error::config(format!(
            "DFT word length {w} must be in 2..={}",
            window.len()
        )));
    }
    let mut out = vec![0.0; w];
    DftBasis::new(window.len(), w).apply(window, &mut out);
    Ok(out)
}

/// Per-position equi-depth breakpoints.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McbTable {
    rows: Vec<Vec<f64>>,
}

impl McbTable {
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let Some(first) = rows.first() else {
            return Err(Error::config("lookup table has no rows"));
        };
        let width = first.len();
        if width == 0 {
            return Err(Error::config("lookup table rows need at least one breakpoint"));
        }
        for (i, row) in rows.iter().enumerate() {
            if row.len() != width {
                return Err(Error::config(format!("lookup table row {i} has ragged width")));
            }
            if row.iter().any(|v| !v.is_finite()) || row.windows(2).any(|p| p[0] > p[1]) {
                return Err(Error::config(format!(
                    "lookup table row {i} is not finite and non-decreasing"
                )));
            }
        }
        Ok(McbTable { rows })
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    pub fn word_len(&self) -> usize {
        self.rows.len()
    }

    pub fn alphabet(&self) -> usize {
        self.rows[0].len() + 1
    }

    /// Letter index for `value` at 0-based `position`.
    #[inline]
    pub fn letter(&self, position: usize, value: f64) -> u8 {
        self.rows[position].partition_point(|&b| b <= value) as u8
    }
}

/// Fits equi-depth breakpoints column by column.
///
/// Breakpoint `k` of a column with `n` sorted values is the value at index
/// `floor(k * n / alpha)`, so that with closed-below lookup bin `k` holds the
/// sorted indices `floor(k n / alpha) .. floor((k+1) n / alpha)`. For two
/// bins and odd `n` this is the median.
pub fn fit_mcb(training: &[Vec<f64>], alpha: usize) -> Result<McbTable> {
    let Some(first) = training.first() else {
        return Err(Error::EmptyTrainingSet);
    };
    let w = first.len();
    if training.iter().any(|v| v.len() != w) {
        return Err(Error::config("training vectors differ in length"));
    }
    let flat: Vec<f64> = training.iter().flatten().copied().collect();
    fit_mcb_flat(&flat, w, alpha)
}

fn fit_mcb_flat(flat: &[f64], w: usize, alpha: usize) -> Result<McbTable> {
    if alpha < 2 {
        return Err(Error::config(format!("alphabet size {alpha} is below 2")));
    }
    if w == 0 || flat.is_empty() {
        return Err(Error::EmptyTrainingSet);
    }
    let n = flat.len() / w;
    let mut column = Vec::with_capacity(n);
    let mut rows = Vec::with_capacity(w);
    for pos in 0..w {
        column.clear();
        column.extend(flat.iter().skip(pos).step_by(w).copied());
        column.sort_by(f64::total_cmp);
        let row = (1..alpha)
            .map(|k| {
                let idx = (k * n / alpha).min(n - 1);
                column[idx]
            })
            .collect();
        rows.push(row);
    }
    McbTable::from_rows(rows)
}

/// Looks up each DFT value in its own row of the table.
pub fn sfa_word(dft_vector: &[f64], table: &McbTable) -> Vec<PositionalSymbol> {
    dft_vector
        .iter()
        .enumerate()
        .map(|(i, &v)| PositionalSymbol {
            letter: table.letter(i, v),
            position: i + 1,
        })
        .collect()
}

/// Reusable SFA transformer for one configuration and fitted table.
#[derive(Debug, Clone)]
pub struct SfaTransformer {
    config: SfaConfig,
    table: McbTable,
    basis: DftBasis,
}

impl SfaTransformer {
    pub fn new(config: SfaConfig, table: McbTable) -> Result<Self> {
        config.representation().validate()?;
        if table.word_len() != config.word_len {
            return Err(Error::TableMismatch {
                rows: table.word_len(),
                word_len: config.word_len,
            });
        }
        if table.alphabet() != config.alphabet {
            return Err(Error::config(format!(
                "lookup table alphabet {} differs from configured {}",
                table.alphabet(),
                config.alphabet
            )));
        }
        Ok(SfaTransformer {
            basis: DftBasis::new(config.window, config.word_len),
            config,
            table,
        })
    }

    pub fn config(&self) -> &SfaConfig {
        &self.config
    }

    pub fn table(&self) -> &McbTable {
        &self.table
    }

    pub fn transform(&self, values: &[f64]) -> Result<SymbolicSequence> {
        let SfaConfig {
            window,
            word_len,
            alphabet,
        } = self.config;
        if values.len() < window {
            return Err(Error::SeriesTooShort {
                len: values.len(),
                window,
            });
        }
        let mut seq = SymbolicSequence::new(self.config.representation());
        let mut buf = vec![0.0; window];
        let mut coeffs = vec![0.0; word_len];
        let mut word = vec![0 as Token; word_len];
        for start in 0..=values.len() - window {
            buf.copy_from_slice(&values[start..start + window]);
            znormalize_in_place(&mut buf, DEFAULT_EPSILON);
            self.basis.apply_normalized(&buf, &mut coeffs);
            for (pos, (slot, &v)) in word.iter_mut().zip(&coeffs).enumerate() {
                *slot = (pos * alphabet + self.table.letter(pos, v) as usize) as Token;
            }
            seq.push_word(&word, start);
        }
        Ok(seq)
    }
}

/// DFT vectors of every window of every series long enough for the window.
pub fn training_windows(data: &Dataset, config: &SfaConfig) -> Vec<Vec<f64>> {
    let basis = DftBasis::new(config.window, config.word_len);
    let mut out = Vec::new();
    let mut buf = vec![0.0; config.window];
    for s in data.series() {
        let values = s.values();
        if values.len() < config.window {
            continue;
        }
        for start in 0..=values.len() - config.window {
            buf.copy_from_slice(&values[start..start + config.window]);
            znormalize_in_place(&mut buf, DEFAULT_EPSILON);
            let mut coeffs = vec![0.0; config.word_len];
            basis.apply_normalized(&buf, &mut coeffs);
            out.push(coeffs);
        }
    }
    out
}

/// Fits the MCB table for `config` on all training windows.
pub fn fit_sfa(data: &Dataset, config: &SfaConfig) -> Result<McbTable> {
    config.representation().validate()?;
    let windows = training_windows(data, config);
    if windows.is_empty() {
        return Err(Error::SeriesTooShort {
            len: data.max_length(),
            window: config.window,
        });
    }
    fit_mcb(&windows, config.alphabet)
}

/// One-shot SFA transform with an already fitted table.
pub fn sfa_transform(
    values: &[f64],
    config: &SfaConfig,
    table: &McbTable,
) -> Result<SymbolicSequence> {
    SfaTransformer::new(*config, table.clone())?.transform(values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Textbook DFT summation with complex exponentials, no precomputation.
    fn dft_oracle(x: &[f64], k: usize) -> (f64, f64) {
        let n = x.len() as f64;
        let mut re = 0.0;
        let mut im = 0.0;
        for (t, &v) in x.iter().enumerate() {
            let a = -2.0 * PI * k as f64 * t as f64 / n;
            re += v * a.cos();
            im += v * a.sin();
        }
        (re / n, im / n)
    }

    #[test]
    fn dft_examples() {
        assert_eq!(dft_approx(&[0.0; 16], 8).unwrap(), vec![0.0; 8]);

        let l = 32;
        let x: Vec<f64> = (0..l)
            .map(|t| (2.0 * PI * t as f64 / l as f64).cos())
            .collect();
        let d = dft_approx(&x, 4).unwrap();
        let (re1, _) = dft_oracle(&x, 1);
        // l/2 before the 1/l scaling
        assert!((re1 - 0.5).abs() < 1e-12);
        assert!((d[2] - re1).abs() < 1e-12);
        assert!(d[1] == 0.0);
        assert!(dft_approx(&x, 3).is_err());
    }

    #[test]
    fn dft_matches_oracle_on_random_windows() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let l = rng.gen_range(8..40);
            let x: Vec<f64> = (0..l).map(|_| rng.gen_range(-2.0..2.0)).collect();
            let d = dft_approx(&x, 8).unwrap();
            for k in 0..4 {
                let (re, im) = dft_oracle(&x, k);
                assert!((d[2 * k] - re).abs() < 1e-12);
                assert!((d[2 * k + 1] - im).abs() < 1e-12);
            }
            assert_eq!(d[1], 0.0);
        }
    }

    #[test]
    fn mcb_two_bins_is_median() {
        let data: Vec<Vec<f64>> = [5.0, 1.0, 3.0, 2.0, 4.0].iter().map(|&v| vec![v, -v]).collect();
        let t = fit_mcb(&data, 2).unwrap();
        assert_eq!(t.rows(), &[vec![3.0], vec![-3.0]]);
        assert!(fit_mcb(&[], 2).is_err());
    }

    /// Counts how many training values land in each bin of each column.
    fn bin_counts(data: &[Vec<f64>], table: &McbTable) -> Vec<Vec<usize>> {
        let w = table.word_len();
        let mut counts = vec![vec![0; table.alphabet()]; w];
        for v in data {
            for (pos, &x) in v.iter().enumerate() {
                let bin = table.rows()[pos].iter().filter(|&&b| b <= x).count();
                counts[pos][bin] += 1;
            }
        }
        counts
    }

    #[test]
    fn mcb_bins_are_equi_depth() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for alpha in 2..=6 {
            for n in [alpha, 7, 10, 33, 100] {
                let data: Vec<Vec<f64>> = (0..n)
                    .map(|_| (0..4).map(|_| rng.gen_range(-1.0..1.0)).collect())
                    .collect();
                let t = fit_mcb(&data, alpha).unwrap();
                for column in bin_counts(&data, &t) {
                    for c in column {
                        assert!(c >= n / alpha && c <= n.div_ceil(alpha), "n={n} a={alpha} c={c}");
                    }
                }
            }
        }
    }

    #[test]
    fn degenerate_column() {
        let data: Vec<Vec<f64>> = (0..10).map(|i| vec![0.0, i as f64]).collect();
        let t = fit_mcb(&data, 4).unwrap();
        assert_eq!(t.rows()[0], vec![0.0; 3]);
        let word = sfa_word(&[0.0, 5.0], &t);
        assert_eq!(word[0].letter, 3);
        let word = sfa_word(&[-0.0, 5.0], &t);
        assert_eq!(word[0].letter, 3);
    }

    #[test]
    fn positional_lookup() {
        // position 3 row [0.64, 1.34, 2.0], position 4 row [-0.59, 1.55, 3.0]
        let t = McbTable::from_rows(vec![
            vec![0.0, 1.0, 2.0],
            vec![0.0, 1.0, 2.0],
            vec![0.64, 1.34, 2.0],
            vec![-0.59, 1.55, 3.0],
        ])
        .unwrap();
        let word = sfa_word(&[0.0, 0.0, 1.0, 1.0], &t);
        assert_eq!(word[2].to_string(), "b3");
        assert_eq!(word[3].to_string(), "b4");
        assert_ne!(word[2].token(4), word[3].token(4));

        // same value, different rows, different letters
        let word = sfa_word(&[0.5, 0.0, 0.5, 0.5], &t);
        assert_eq!(word[0].letter, 1);
        assert_eq!(word[2].letter, 0);
    }

    #[test]
    fn two_position_table_matches_direct_lookup() {
        let t = McbTable::from_rows(vec![vec![-1.0, 1.0], vec![0.0, 0.5]]).unwrap();
        let cases = [
            ([-2.0, -1.0], "a1a2"),
            ([-1.0, 0.0], "b1b2"),
            ([1.0, 0.5], "c1c2"),
            ([0.99, 0.49], "b1b2"),
            ([5.0, -5.0], "c1a2"),
        ];
        for (v, want) in cases {
            let got: String = sfa_word(&v, &t).iter().map(|s| s.to_string()).collect();
            assert_eq!(got, want);
        }
    }

    #[test]
    fn transform_basics() {
        let cfg = SfaConfig::new(16, 4, 4).unwrap();
        let data = Dataset::unlabeled(vec![
            (0..40).map(|i| (i as f64 * 0.3).sin()).collect(),
            (0..40).map(|i| (i as f64 * 0.7).cos()).collect(),
        ])
        .unwrap();
        let table = fit_sfa(&data, &cfg).unwrap();
        let seq = sfa_transform(&data.series()[0].values()[..16], &cfg, &table).unwrap();
        assert_eq!(seq.len(), 1);
        assert_eq!(seq.offsets(), &[0]);
        let seq = sfa_transform(&[2.0; 40], &cfg, &table).unwrap();
        assert_eq!(seq.len(), 1);

        let wrong = SfaConfig::new(16, 6, 4).unwrap();
        assert!(matches!(
            sfa_transform(&[1.0; 40], &wrong, &table),
            Err(Error::TableMismatch { rows: 4, word_len: 6 })
        ));
        assert!(sfa_transform(&[1.0; 10], &cfg, &table).is_err());
    }

    /// Independent SFA pipeline: oracle DFT, sort-based MCB, direct lookup.
    fn oracle_sfa(train: &[Vec<f64>], l: usize, w: usize, alpha: usize) -> Vec<Vec<String>> {
        let norm = |win: &[f64]| -> Vec<f64> {
            let n = win.len() as f64;
            let m = win.iter().sum::<f64>() / n;
            let s = (win.iter().map(|v| (v - m).powi(2)).sum::<f64>() / n).sqrt();
            win.iter().map(|v| if s < 1e-8 { 0.0 } else { (v - m) / s }).collect()
        };
        let approx = |win: &[f64]| -> Vec<f64> {
            let z = norm(win);
            (0..w / 2)
                .flat_map(|k| {
                    let (re, im) = if k == 0 { (0.0, 0.0) } else { dft_oracle(&z, k) };
                    [re, im]
                })
                .collect()
        };
        let mut vecs = Vec::new();
        for s in train {
            for t in 0..=s.len() - l {
                vecs.push(approx(&s[t..t + l]));
            }
        }
        let n = vecs.len();
        let mut table = Vec::new();
        for pos in 0..w {
            let mut col: Vec<f64> = vecs.iter().map(|v| v[pos]).collect();
            col.sort_by(|a, b| a.partial_cmp(b).unwrap());
            table.push(
                (1..alpha)
                    .map(|k| col[(k * n / alpha).min(n - 1)])
                    .collect::<Vec<_>>(),
            );
        }
        train
            .iter()
            .map(|s| {
                let mut words: Vec<String> = Vec::new();
                for t in 0..=s.len() - l {
                    let a = approx(&s[t..t + l]);
                    let word: String = a
                        .iter()
                        .enumerate()
                        .map(|(pos, &v)| {
                            let letter = table[pos].iter().filter(|&&b| b <= v).count();
                            format!("{}{}", (b'a' + letter as u8) as char, pos + 1)
                        })
                        .collect();
                    if words.last() != Some(&word) {
                        words.push(word);
                    }
                }
                words
            })
            .collect()
    }

    #[test]
    fn ten_series_toy_matches_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let train: Vec<Vec<f64>> = (0..10)
            .map(|_| {
                let mut x = 0.0;
                (0..30)
                    .map(|_| {
                        x += rng.gen_range(-1.0..1.0);
                        x
                    })
                    .collect()
            })
            .collect();
        let cfg = SfaConfig::new(12, 4, 3).unwrap();
        let data = Dataset::unlabeled(train.clone()).unwrap();
        let table = fit_sfa(&data, &cfg).unwrap();
        let expected = oracle_sfa(&train, 12, 4, 3);
        for (s, want) in train.iter().zip(expected) {
            let seq = sfa_transform(s, &cfg, &table).unwrap();
            assert_eq!(seq.rendered_words(), want);
        }
    }

    proptest! {
        #[test]
        fn fit_is_order_invariant(
            mut data in prop::collection::vec(prop::collection::vec(-3.0f64..3.0, 4), 1..40),
            alpha in 2usize..6,
            seed in any::<u64>(),
        ) {
            let t1 = fit_mcb(&data, alpha).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for i in (1..data.len()).rev() {
                data.swap(i, rng.gen_range(0..=i));
            }
            prop_assert_eq!(t1, fit_mcb(&data, alpha).unwrap());
        }

        #[test]
        fn symbols_come_from_their_own_row(
            series in prop::collection::vec(prop::collection::vec(-3.0f64..3.0, 20..30), 2..6),
        ) {
            let cfg = SfaConfig::new(10, 6, 4).unwrap();
            let data = Dataset::unlabeled(series.clone()).unwrap();
            let table = fit_sfa(&data, &cfg).unwrap();
            let windows = training_windows(&data, &cfg);
            let mut idx = 0;
            for s in &series {
                let seq = sfa_transform(s, &cfg, &table).unwrap();
                let mut offsets = seq.offsets().iter().peekable();
                for t in 0..=s.len() - 10 {
                    let coeffs = &windows[idx];
                    idx += 1;
                    if offsets.peek() == Some(&&t) {
                        offsets.next();
                        let wi = seq.offsets().iter().position(|&o| o == t).unwrap();
                        for (pos, &tok) in seq.word(wi).iter().enumerate() {
                            let sym = PositionalSymbol::from_token(tok, 4);
                            prop_assert_eq!(sym.position, pos + 1);
                            prop_assert_eq!(sym.letter, table.letter(pos, coeffs[pos]));
                        }
                    }
                }
                for pair in seq.rendered_words().windows(2) {
                    prop_assert_ne!(&pair[0], &pair[1]);
                }
            }
        }
    }
}
