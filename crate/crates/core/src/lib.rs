//! Interpretable time series classification with multi-resolution symbolic
//! representations.
//!
//! Series are discretised into SAX (time domain) and SFA (frequency domain)
//! word sequences over a grid of window lengths. A sequence learner picks
//! discriminative subsequences from each representation; these either vote
//! as an ensemble or feed a logistic regression, whose weights can be mapped
//! back onto the raw series as a saliency map.

pub mod dataset;
pub mod error;
pub mod explain;
pub mod linear_model;
pub mod multi_rep;
pub mod par;
pub mod persist;
pub mod sax;
pub mod seql;
pub mod sfa;
pub mod symbolic;

pub use dataset::{load_dataset, parse_dataset, write_dataset, znormalize, Dataset, Delimiter, TimeSeries};
pub use error::{Error, Result};
pub use par::Execution;
pub use sax::{SaxConfig, SaxTransformer};
pub use seql::{LinearSeqModel, SeqlParams};
pub use sfa::{McbTable, SfaConfig, SfaTransformer};
pub use symbolic::{Domain, Representation, SymbolicSequence, Token};
