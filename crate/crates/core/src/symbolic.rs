//! Word sequences shared by the SAX and SFA transforms.
//!
//! Symbols are stored as dense integer tokens. A SAX token is the letter
//! index. An SFA token also carries the word position
//! (`position * alphabet + letter`), so the same letter at two positions is
//! two distinct unigrams.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Token = u16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Domain {
    Sax,
    Sfa,
}

impl fmt::Display for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Domain::Sax => f.write_str("sax"),
            Domain::Sfa => f.write_str("sfa"),
        }
    }
}

impl FromStr for Domain {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "sax" => Ok(Domain::Sax),
            "sfa" => Ok(Domain::Sfa),
            other => Err(Error::config(format!("unknown domain {other:?}"))),
        }
    }
}

/// Identity of one symbolic representation: domain plus window, word length
/// and alphabet size. Does not include a fitted SFA table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Representation {
    pub domain: Domain,
    pub window: usize,
    pub word_len: usize,
    pub alphabet: usize,
}

impl fmt::Display for Representation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}(l={}, w={}, alpha={})",
            self.domain, self.window, self.word_len, self.alphabet
        )
    }
}

impl Representation {
    pub fn validate(&self) -> Result<()> {
        if !(2..=26).contains(&self.alphabet) {
            return Err(Error::config(format!(
                "alphabet size {} outside 2..=26",
                self.alphabet
            )));
        }
        if self.word_len == 0 || self.word_len > self.window {
            return Err(Error::config(format!(
                "word length {} must be in 1..={}",
                self.word_len, self.window
            )));
        }
        if self.domain == Domain::Sfa && self.word_len % 2 != 0 {
            return Err(Error::config(format!(
                "SFA word length {} must be even",
                self.word_len
            )));
        }
        if self.token_count() > Token::MAX as usize {
            return Err(Error::config("word length times alphabet too large"));
        }
        Ok(())
    }

    /// Number of distinct tokens this representation can emit.
    pub fn token_count(&self) -> usize {
        match self.domain {
            Domain::Sax => self.alphabet,
            Domain::Sfa => self.alphabet * self.word_len,
        }
    }

    pub fn render_token(&self, token: Token, out: &mut String) {
        let t = token as usize;
        match self.domain {
            Domain::Sax => out.push((b'a' + t as u8) as char),
            Domain::Sfa => {
                let (pos, letter) = (t / self.alphabet, t % self.alphabet);
                out.push((b'a' + letter as u8) as char);
                out.push_str(&(pos + 1).to_string());
            }
        }
    }

    /// Text form of a symbol string: `cbaab` for SAX, `d1a2b3b4` for SFA.
    pub fn render(&self, tokens: &[Token]) -> String {
        let mut s = String::with_capacity(tokens.len() * 2);
        for &t in tokens {
            self.render_token(t, &mut s);
        }
        s
    }

    /// Inverse of [`Representation::render`].
    pub fn parse(&self, text: &str) -> Result<Vec<Token>> {
        let bad = |msg: &str| Error::config(format!("invalid {} pattern {text:?}: {msg}", self.domain));
        let bytes = text.as_bytes();
        let mut tokens = Vec::new();
        let mut i = 0;
        while i < bytes.len() {
            let c = bytes[i];
            if !c.is_ascii_lowercase() || (c - b'a') as usize >= self.alphabet {
                return Err(bad("letter outside alphabet"));
            }
            let letter = (c - b'a') as usize;
            i += 1;
            match self.domain {
                Domain::Sax => tokens.push(letter as Token),
                Domain::Sfa => {
                    let start = i;
                    while i < bytes.len() && bytes[i].is_ascii_digit() {
                        i += 1;
                    }
                    let pos: usize = text[start..i]
                        .parse()
                        .map_err(|_| bad("missing position"))?;
                    if pos == 0 || pos > self.word_len {
                        return Err(bad("position out of range"));
                    }
                    tokens.push(((pos - 1) * self.alphabet + letter) as Token);
                }
            }
        }
        if tokens.is_empty() {
            return Err(bad("empty"));
        }
        Ok(tokens)
    }
}

/// Numerosity-reduced word sequence with the raw start index of each
/// retained window.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymbolicSequence {
    rep: Representation,
    symbols: Vec<Token>,
    offsets: Vec<usize>,
}

impl SymbolicSequence {
    pub fn new(rep: Representation) -> Self {
        SymbolicSequence {
            rep,
            symbols: Vec::new(),
            offsets: Vec::new(),
        }
    }

    /// Builds a sequence from explicit words, applying numerosity reduction.
    /// Offsets are the word indices. Mostly useful for tests.
    pub fn from_words(rep: Representation, words: &[Vec<Token>]) -> Self {
        let mut seq = Self::new(rep);
        for (i, w) in words.iter().enumerate() {
            assert_eq!(w.len(), rep.word_len, "word length mismatch");
            seq.push_word(w, i);
        }
        seq
    }

    /// Appends a word unless it repeats the previous one.
    pub fn push_word(&mut self, word: &[Token], offset: usize) -> bool {
        debug_assert_eq!(word.len(), self.rep.word_len);
        if self.last_word() == Some(word) {
            return false;
        }
        self.symbols.extend_from_slice(word);
        self.offsets.push(offset);
        true
    }

    fn last_word(&self) -> Option<&[Token]> {
        let w = self.rep.word_len;
        if self.symbols.is_empty() {
            None
        } else {
            Some(&self.symbols[self.symbols.len() - w..])
        }
    }

    pub fn representation(&self) -> &Representation {
        &self.rep
    }

    pub fn len(&self) -> usize {
        self.offsets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.offsets.is_empty()
    }

    pub fn word(&self, i: usize) -> &[Token] {
        let w = self.rep.word_len;
        &self.symbols[i * w..(i + 1) * w]
    }

    pub fn words(&self) -> std::slice::ChunksExact<'_, Token> {
        self.symbols.chunks_exact(self.rep.word_len)
    }

    pub fn offsets(&self) -> &[usize] {
        &self.offsets
    }

    /// Words rendered as text.
    pub fn rendered_words(&self) -> Vec<String> {
        self.words().map(|w| self.rep.render(w)).collect()
    }

    /// `true` if `pattern` occurs inside some word.
    pub fn contains(&self, pattern: &[Token]) -> bool {
        let m = pattern.len();
        if m == 0 || m > self.rep.word_len {
            return m == 0;
        }
        self.words().any(|w| w.windows(m).any(|win| win == pattern))
    }

    /// Every `(word index, start position)` where `pattern` occurs.
    pub fn occurrences(&self, pattern: &[Token]) -> Vec<(usize, usize)> {
        let m = pattern.len();
        let mut found = Vec::new();
        if m == 0 || m > self.rep.word_len {
            return found;
        }
        for (wi, w) in self.words().enumerate() {
            for (p, win) in w.windows(m).enumerate() {
                if win == pattern {
                    found.push((wi, p));
                }
            }
        }
        found
    }

    /// All distinct within-word substrings up to `max_len` symbols.
    pub fn substrings(&self, max_len: usize) -> HashSet<&[Token]> {
        let w = self.rep.word_len;
        let max_len = max_len.min(w);
        let mut set = HashSet::new();
        for word in self.words() {
            for start in 0..w {
                for end in start + 1..=(start + max_len).min(w) {
                    set.insert(&word[start..end]);
                }
            }
        }
        set
    }
}
