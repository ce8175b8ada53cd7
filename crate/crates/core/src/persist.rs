//! Model files and feature exports.
//!
//! A model file is a JSON object with one key per section (`header`, `grid`,
//! then `features` + `intercepts` or `members`) and a `checksums` object
//! holding the SHA-256 of each section's compact serialization. Reals are
//! written in shortest round-trip form, so a load reproduces every
//! coefficient and breakpoint bit for bit.

use std::fs;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::linear_model::{LinearWeights, Mode, ModelBody, MrSeqlModel};
use crate::multi_rep::{EnsembleModel, HarvestedFeature, Member, RepConfig};
use crate::seql::{LinearSeqModel, OneVsAll, SeqlParams};
use crate::sfa::McbTable;
use crate::symbolic::{Domain, Representation};

pub const FORMAT_VERSION: u32 = 1;
const FORMAT_NAME: &str = "mrseql-model";

#[derive(Serialize, Deserialize)]
struct Header {
    format: String,
    version: u32,
    mode: Mode,
    classes: Vec<String>,
}

#[derive(Serialize, Deserialize)]
struct GridEntry {
    domain: Domain,
    l: usize,
    w: usize,
    alpha: usize,
    mcb: Option<Vec<Vec<f64>>>,
}

#[derive(Serialize, Deserialize)]
struct FeatureEntry {
    domain: Domain,
    l: usize,
    w: usize,
    alpha: usize,
    subsequence: String,
    source_class: usize,
    weights: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct Term {
    subsequence: String,
    coef: f64,
}

#[derive(Serialize, Deserialize)]
struct SeqlEntry {
    params: SeqlParams,
    terms: Vec<Term>,
}

fn format_err(section: &str, message: impl ToString) -> Error {
    Error::ModelFormat {
        section: section.to_string(),
        message: message.to_string(),
    }
}

fn section_digest(value: &Value) -> String {
    let text = serde_json::to_string(value).expect("JSON values always serialize");
    hex::encode(Sha256::digest(text.as_bytes()))
}

fn to_value<T: Serialize>(section: &str, v: &T) -> Result<Value> {
    serde_json::to_value(v).map_err(|e| format_err(section, e))
}

fn rep_of(domain: Domain, l: usize, w: usize, alpha: usize) -> Representation {
    Representation {
        domain,
        window: l,
        word_len: w,
        alphabet: alpha,
    }
}

/// Serializes `model` to the model file text.
pub fn model_to_string(model: &MrSeqlModel) -> Result<String> {
    let mut sections: Vec<(&str, Value)> = Vec::new();
    let header = Header {
        format: FORMAT_NAME.into(),
        version: FORMAT_VERSION,
        mode: model.mode(),
        classes: model.classes().to_vec(),
    };
    sections.push(("header", to_value("header", &header)?));
    let grid: Vec<GridEntry> = model
        .grid()
        .iter()
        .map(|c| GridEntry {
            domain: c.rep.domain,
            l: c.rep.window,
            w: c.rep.word_len,
            alpha: c.rep.alphabet,
            mcb: c.mcb.as_ref().map(|t| t.rows().to_vec()),
        })
        .collect();
    sections.push(("grid", to_value("grid", &grid)?));
    match model.body() {
        ModelBody::Linear(_) => {
            let w = model.weights().expect("linear body has weights");
            let features: Vec<FeatureEntry> = model
                .features()
                .iter()
                .enumerate()
                .map(|(j, f)| FeatureEntry {
                    domain: f.rep.domain,
                    l: f.rep.window,
                    w: f.rep.word_len,
                    alpha: f.rep.alphabet,
                    subsequence: f.render(),
                    source_class: f.source_class,
                    weights: w.weights.iter().map(|cw| cw[j]).collect(),
                })
                .collect();
            sections.push(("features", to_value("features", &features)?));
            sections.push(("intercepts", to_value("intercepts", &w.intercepts)?));
        }
        ModelBody::Ensemble(e) => {
            let members: Vec<Vec<SeqlEntry>> = e
                .members()
                .iter()
                .map(|m| {
                    m.models()
                        .models()
                        .iter()
                        .map(|lm| SeqlEntry {
                            params: *lm.params(),
                            terms: lm
                                .features()
                                .iter()
                                .map(|(p, b)| Term {
                                    subsequence: lm.representation().render(p),
                                    coef: *b,
                                })
                                .collect(),
                        })
                        .collect()
                })
                .collect();
            sections.push(("members", to_value("members", &members)?));
        }
    }
    let mut doc = Map::new();
    let mut sums = Map::new();
    for (name, v) in sections {
        sums.insert(name.to_string(), Value::String(section_digest(&v)));
        doc.insert(name.to_string(), v);
    }
    doc.insert("checksums".into(), Value::Object(sums));
    let mut text = serde_json::to_string_pretty(&Value::Object(doc))
        .map_err(|e| format_err("document", e))?;
    text.push('\n');
    Ok(text)
}

fn section<'a>(doc: &'a Map<String, Value>, name: &str) -> Result<&'a Value> {
    doc.get(name)
        .ok_or_else(|| Error::Truncated(format!("section {name:?} is missing")))
}

fn typed<T: for<'de> Deserialize<'de>>(doc: &Map<String, Value>, name: &str) -> Result<T> {
    T::deserialize(section(doc, name)?).map_err(|e| format_err(name, e))
}

/// Parses model file text. The version is checked before anything else and
/// every section is verified against its checksum before it is decoded.
pub fn model_from_str(text: &str) -> Result<MrSeqlModel> {
    let root: Value = serde_json::from_str(text).map_err(|e| {
        if e.is_eof() {
            Error::Truncated(e.to_string())
        } else {
            format_err("document", e)
        }
    })?;
    let Value::Object(doc) = root else {
        return Err(format_err("document", "top level is not an object"));
    };
    let header_value = section(&doc, "header")?;
    match header_value.get("version").and_then(Value::as_u64) {
        Some(v) if v == u64::from(FORMAT_VERSION) => {}
        other => {
            return Err(Error::Version {
                found: other.map_or_else(
                    || header_value.get("version").map_or("none".into(), Value::to_string),
                    |v| v.to_string(),
                ),
                expected: FORMAT_VERSION,
            })
        }
    }
    let header: Header = typed(&doc, "header")?;
    if header.format != FORMAT_NAME {
        return Err(format_err("header", format!("unknown format {:?}", header.format)));
    }
    let body_sections: &[&str] = match header.mode {
        Mode::FeatureSelection => &["features", "intercepts"],
        Mode::Ensemble => &["members"],
    };
    let sums: Map<String, Value> = typed(&doc, "checksums")?;
    for name in ["header", "grid"].iter().chain(body_sections) {
        let want = sums
            .get(*name)
            .and_then(Value::as_str)
            .ok_or_else(|| format_err("checksums", format!("no checksum for {name:?}")))?;
        if section_digest(section(&doc, name)?) != want {
            return Err(Error::Checksum(name.to_string()));
        }
    }

    let grid_entries: Vec<GridEntry> = typed(&doc, "grid")?;
    let grid = grid_entries
        .into_iter()
        .map(|g| {
            let rep = rep_of(g.domain, g.l, g.w, g.alpha);
            rep.validate().map_err(|e| format_err("grid", e))?;
            let mcb = g
                .mcb
                .map(McbTable::from_rows)
                .transpose()
                .map_err(|e| format_err("grid", e))?;
            if mcb.is_some() != (rep.domain == Domain::Sfa) {
                return Err(format_err("grid", format!("{rep} has a misplaced or missing table")));
            }
            Ok(RepConfig { rep, mcb })
        })
        .collect::<Result<Vec<_>>>()?;
    let k = header.classes.len();

    match header.mode {
        Mode::FeatureSelection => {
            let entries: Vec<FeatureEntry> = typed(&doc, "features")?;
            let intercepts: Vec<f64> = typed(&doc, "intercepts")?;
            if intercepts.len() != k {
                return Err(format_err("intercepts", "one intercept per class expected"));
            }
            let mut weights = vec![Vec::with_capacity(entries.len()); k];
            let mut features = Vec::with_capacity(entries.len());
            for e in entries {
                let rep = rep_of(e.domain, e.l, e.w, e.alpha);
                let pattern = rep.parse(&e.subsequence).map_err(|x| format_err("features", x))?;
                if e.weights.len() != k {
                    return Err(format_err("features", "one weight per class expected"));
                }
                for (cw, w) in weights.iter_mut().zip(e.weights) {
                    cw.push(w);
                }
                features.push(HarvestedFeature {
                    rep,
                    pattern,
                    source_class: e.source_class,
                });
            }
            MrSeqlModel::linear(
                header.classes,
                grid,
                features,
                LinearWeights {
                    weights,
                    intercepts,
                },
            )
            .map_err(|e| format_err("features", e))
        }
        Mode::Ensemble => {
            let entries: Vec<Vec<SeqlEntry>> = typed(&doc, "members")?;
            if entries.len() != grid.len() {
                return Err(format_err("members", "one member per grid entry expected"));
            }
            let members = grid
                .into_iter()
                .zip(entries)
                .map(|(config, models)| {
                    let rep = config.rep;
                    let models = models
                        .into_iter()
                        .map(|m| {
                            let terms = m
                                .terms
                                .into_iter()
                                .map(|t| Ok((rep.parse(&t.subsequence)?, t.coef)))
                                .collect::<Result<Vec<_>>>()?;
                            Ok(LinearSeqModel::from_features(rep, terms, m.params))
                        })
                        .collect::<Result<Vec<_>>>()
                        .map_err(|e| format_err("members", e))?;
                    Member::new(config, OneVsAll::from_models(models)).map_err(|e| format_err("members", e))
                })
                .collect::<Result<Vec<_>>>()?;
            let ensemble =
                EnsembleModel::new(members, header.classes).map_err(|e| format_err("members", e))?;
            Ok(MrSeqlModel::ensemble(ensemble))
        }
    }
}

pub fn save_model(model: &MrSeqlModel, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let text = model_to_string(model)?;
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

pub fn load_model(path: impl AsRef<Path>) -> Result<MrSeqlModel> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    model_from_str(&text)
}

/// Feature table with columns `domain,l,w,alpha,subsequence,class,weight`,
/// one row per feature and class. Ensemble models list each member's terms
/// under the class of the binary model they belong to.
pub fn write_feature_csv<W: Write>(model: &MrSeqlModel, mut out: W) -> std::io::Result<()> {
    writeln!(out, "domain,l,w,alpha,subsequence,class,weight")?;
    let mut row = |rep: &Representation, text: &str, class: &str, w: f64| {
        writeln!(
            out,
            "{},{},{},{},{},{},{}",
            rep.domain, rep.window, rep.word_len, rep.alphabet, text, class, w
        )
    };
    match model.body() {
        ModelBody::Linear(_) => {
            let w = model.weights().expect("linear body has weights");
            for (j, f) in model.features().iter().enumerate() {
                let text = f.render();
                for (k, class) in model.classes().iter().enumerate() {
                    row(&f.rep, &text, class, w.weights[k][j])?;
                }
            }
        }
        ModelBody::Ensemble(e) => {
            for m in e.members() {
                for (k, lm) in m.models().models().iter().enumerate() {
                    for (p, b) in lm.features() {
                        row(&m.config().rep, &lm.representation().render(p), &model.classes()[k], *b)?;
                    }
                }
            }
        }
    }
    Ok(())
}
