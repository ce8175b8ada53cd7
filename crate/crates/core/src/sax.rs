//! Symbolic Aggregate approXimation with a sliding window.
//!
//! Letters are assigned in descending value order: `a` labels the highest
//! interval. Intervals are closed below, so a value equal to a breakpoint
//! falls into the interval above it.

use statrs::distribution::{ContinuousCDF, Normal};

use crate::dataset::{znormalize_in_place, DEFAULT_EPSILON};
use crate::error::{Error, Result};
use crate::symbolic::{Domain, Representation, SymbolicSequence, Token};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SaxConfig {
    pub window: usize,
    pub word_len: usize,
    pub alphabet: usize,
}

impl SaxConfig {
    pub fn new(window: usize, word_len: usize, alphabet: usize) -> Result<Self> {
        let cfg = SaxConfig {
            window,
            word_len,
            alphabet,
        };
        cfg.representation().validate()?;
        Ok(cfg)
    }

    pub fn representation(&self) -> Representation {
        Representation {
            domain: Domain::Sax,
            window: self.window,
            word_len: self.word_len,
            alphabet: self.alphabet,
        }
    }
}

/// Standard-normal quantiles at `k / alpha` for `k = 1 .. alpha - 1`.
pub fn gaussian_breakpoints(alpha: usize) -> Result<Vec<f64>> {
    if alpha < 2 {
        return Err(Error::config(format!("alphabet size {alpha} is below 2")));
    }
    let normal = Normal::new(0.0, 1.0).expect("standard normal");
    let mut bps = vec![0.0; alpha - 1];
    // Fill the lower half and mirror it so the set is exactly symmetric.
    for k in 1..alpha {
        if 2 * k < alpha {
            let q = normal.inverse_cdf(k as f64 / alpha as f64);
            bps[k - 1] = q;
            bps[alpha - k - 1] = -q;
        }
    }
    Ok(bps)
}

/// Piecewise aggregate approximation with fractional segment boundaries:
/// a sample straddling two segments contributes to both in proportion to
/// its overlap.
pub fn paa(values: &[f64], w: usize) -> Result<Vec<f64>> {
    let n = values.len();
    if n == 0 || w == 0 || w > n {
        return Err(Error::config(format!(
            "PAA word length {w} must be in 1..={n}"
        )));
    }
    let mut out = vec![0.0; w];
    paa_into(values, &mut out);
    Ok(out)
}

pub(crate) fn paa_into(values: &[f64], out: &mut [f64]) {
    let n = values.len();
    let w = out.len();
    if n == w {
        out.copy_from_slice(values);
        return;
    }
    // Work in units of 1/w samples: sample i spans [i*w, (i+1)*w) and
    // segment j spans [j*n, (j+1)*n).
    for (j, slot) in out.iter_mut().enumerate() {
        let seg_lo = j * n;
        let seg_hi = (j + 1) * n;
        let first = seg_lo / w;
        let last = (seg_hi + w - 1) / w;
        let mut acc = 0.0;
        for (i, &v) in values.iter().enumerate().take(last).skip(first) {
            let lo = (i * w).max(seg_lo);
            let hi = ((i + 1) * w).min(seg_hi);
            if hi > lo {
                acc += v * (hi - lo) as f64;
            }
        }
        *slot = acc / n as f64;
    }
}

/// Token (letter index, `0 = 'a'`) for one value.
#[inline]
pub(crate) fn sax_token(value: f64, breakpoints: &[f64]) -> Token {
    let below = breakpoints.partition_point(|&b| b <= value);
    (breakpoints.len() - below) as Token
}

/// Maps a PAA vector to its SAX letters.
pub fn sax_word(paa_vector: &[f64], breakpoints: &[f64]) -> String {
    paa_vector
        .iter()
        .map(|&v| (b'a' + sax_token(v, breakpoints) as u8) as char)
        .collect()
}

/// Reusable SAX transformer; holds the breakpoints for one configuration.
#[derive(Debug, Clone)]
pub struct SaxTransformer {
    config: SaxConfig,
    breakpoints: Vec<f64>,
}

impl SaxTransformer {
    pub fn new(config: SaxConfig) -> Result<Self> {
        config.representation().validate()?;
        Ok(SaxTransformer {
            config,
            breakpoints: gaussian_breakpoints(config.alphabet)?,
        })
    }

    pub fn config(&self) -> &SaxConfig {
        &self.config
    }

    pub fn transform(&self, values: &[f64]) -> Result<SymbolicSequence> {
        let SaxConfig {
            window, word_len, ..
        } = self.config;
        if values.len() < window {
            return Err(Error::SeriesTooShort {
                len: values.len(),
                window,
            });
        }
        let mut seq = SymbolicSequence::new(self.config.representation());
        let mut buf = vec![0.0; window];
        let mut approx = vec![0.0; word_len];
        let mut word = vec![0 as Token; word_len];
        for start in 0..=values.len() - window {
            buf.copy_from_slice(&values[start..start + window]);
            znormalize_in_place(&mut buf, DEFAULT_EPSILON);
            paa_into(&buf, &mut approx);
            for (slot, &v) in word.iter_mut().zip(&approx) {
                *slot = sax_token(v, &self.breakpoints);
            }
            seq.push_word(&word, start);
        }
        Ok(seq)
    }
}

/// One-shot SAX transform of a raw series.
pub fn sax_transform(values: &[f64], config: &SaxConfig) -> Result<SymbolicSequence> {
    SaxTransformer::new(*config)?.transform(values)
}
