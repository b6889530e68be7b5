//! Problem files: a quiver, its relations or potential, and named B
//! specifications, written in TOML.
//!
//! ```toml
//! format_version = 1
//! name = "a2"                   # optional
//! preset = "a2"                 # optional tag
//! potential = "a*b*c"           # optional
//! relations = ["a*b", "b*c"]    # optional; wins over `potential`
//!
//! [quiver]
//! vertices = 2
//! arrows = [{ name = "a", from = 1, to = 2 }]
//!
//! [b_specs.NAME]
//! dim_vectors = [[1, 0], [0, 1]]   # or: annihilated_arrows = ["a"]
//! ```
//!
//! Vertices are `1..=vertices`. Frozen vertices never appear; framing is
//! always computed.

use std::collections::{BTreeMap, BTreeSet};
use std::ops::Range;

use serde::Deserialize;
use thiserror::Error;
use toml::Spanned;

use crate::algebra::{generators_match_up_to_scalar, BoundQuiver, Potential, Relation};
use crate::orthogonality::BSpec;
use crate::quiver::{Arrow, Quiver};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProblemError {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("error at line {line}, column {column}: {message}")]
    Semantic {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("unknown preset `{0}`")]
    UnknownPreset(String),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawProblem {
    format_version: Spanned<u32>,
    name: Option<String>,
    preset: Option<String>,
    potential: Option<Spanned<String>>,
    relations: Option<Vec<Spanned<String>>>,
    quiver: Spanned<RawQuiver>,
    #[serde(default)]
    b_specs: BTreeMap<String, Spanned<RawBSpec>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawQuiver {
    vertices: usize,
    #[serde(default)]
    arrows: Vec<Spanned<RawArrow>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawArrow {
    name: String,
    from: usize,
    to: usize,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawBSpec {
    dim_vectors: Option<Vec<Vec<usize>>>,
    annihilated_arrows: Option<Vec<String>>,
}

/// Outcome of comparing given relations against the potential's cyclic
/// derivatives, when a file has both.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Consistency {
    pub consistent: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProblemFile {
    pub name: String,
    pub preset: Option<String>,
    pub quiver: Quiver,
    pub potential: Option<Potential>,
    /// Relations in effect: the listed ones if any, else the cyclic
    /// derivatives of the potential, else none.
    pub algebra: BoundQuiver,
    /// Present only when both relations and a potential are given.
    pub consistency: Option<Consistency>,
    pub b_specs: BTreeMap<String, BSpec>,
}

fn line_col(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
    (line, column)
}

fn semantic(text: &str, span: Range<usize>, message: impl Into<String>) -> ProblemError {
    let (line, column) = line_col(text, span.start);
    ProblemError::Semantic {
        line,
        column,
        message: message.into(),
    }
}

pub fn parse_problem(text: &str) -> Result<ProblemFile, ProblemError> {
    let raw: RawProblem = toml::from_str(text).map_err(|e| {
        let (line, column) = e.span().map_or((1, 1), |s| line_col(text, s.start));
        ProblemError::Syntax {
            line,
            column,
            message: e.message().trim().to_string(),
        }
    })?;

    if *raw.format_version.get_ref() != FORMAT_VERSION {
        return Err(semantic(
            text,
            raw.format_version.span(),
            format!(
                "unsupported format_version {} (expected {FORMAT_VERSION})",
                raw.format_version.get_ref()
            ),
        ));
    }

    let quiver = build_quiver(text, &raw.quiver)?;

    let potential = match &raw.potential {
        Some(p) => Some(
            Potential::parse(&quiver, p.get_ref()).map_err(|e| semantic(text, p.span(), e.to_string()))?,
        ),
        None => None,
    };
    let listed = match &raw.relations {
        Some(rs) => Some(
            rs.iter()
                .map(|r| Relation::parse(&quiver, r.get_ref()).map_err(|e| semantic(text, r.span(), e.to_string())))
                .collect::<Result<Vec<_>, _>>()?,
        ),
        None => None,
    };
    let derived = match &potential {
        Some(w) => Some(
            BoundQuiver::from_potential(quiver.clone(), w)
                .map_err(|e| semantic(text, raw.potential.as_ref().unwrap().span(), e.to_string()))?
                .relations,
        ),
        None => None,
    };
    let consistency = match (&listed, &derived) {
        (Some(l), Some(d)) => Some(Consistency {
            consistent: generators_match_up_to_scalar(l, d),
        }),
        _ => None,
    };
    let relations = listed.or(derived).unwrap_or_default();
    let algebra = BoundQuiver::new(quiver.clone(), relations).map_err(|e| {
        let span = raw
            .relations
            .as_ref()
            .and_then(|r| r.first().map(|s| s.span()))
            .or_else(|| raw.potential.as_ref().map(|p| p.span()))
            .unwrap_or(0..0);
        semantic(text, span, e.to_string())
    })?;

    let mut b_specs = BTreeMap::new();
    for (name, spec) in &raw.b_specs {
        b_specs.insert(name.clone(), build_b_spec(text, &quiver, name, spec)?);
    }

    Ok(ProblemFile {
        name: raw.name.or_else(|| raw.preset.clone()).unwrap_or_else(|| "problem".into()),
        preset: raw.preset,
        quiver,
        potential,
        algebra,
        consistency,
        b_specs,
    })
}

fn build_quiver(text: &str, raw: &Spanned<RawQuiver>) -> Result<Quiver, ProblemError> {
    let n = raw.get_ref().vertices;
    let mut names = BTreeSet::new();
    let mut arrows = Vec::new();
    for a in &raw.get_ref().arrows {
        let r = a.get_ref();
        let err = |m: String| semantic(text, a.span(), m);
        for v in [r.from, r.to] {
            if v == 0 || v > n {
                return Err(err(format!("arrow `{}`: vertex {v} is not in 1..={n}", r.name)));
            }
        }
        if r.from == r.to {
            return Err(err(format!("arrow `{}` is a loop", r.name)));
        }
        if !names.insert(r.name.as_str()) {
            return Err(err(format!("duplicate arrow name `{}`", r.name)));
        }
        arrows.push(Arrow {
            name: r.name.clone(),
            source: r.from,
            target: r.to,
        });
    }
    Quiver::new(n, arrows).map_err(|e| semantic(text, raw.span(), e.to_string()))
}

fn build_b_spec(text: &str, q: &Quiver, name: &str, raw: &Spanned<RawBSpec>) -> Result<BSpec, ProblemError> {
    let err = |m: String| semantic(text, raw.span(), format!("b_spec `{name}`: {m}"));
    match (&raw.get_ref().dim_vectors, &raw.get_ref().annihilated_arrows) {
        (Some(dv), None) => {
            if let Some(d) = dv.iter().find(|d| d.len() != q.vertex_count()) {
                return Err(err(format!(
                    "dimension vector {d:?} has {} entries, expected {}",
                    d.len(),
                    q.vertex_count()
                )));
            }
            Ok(BSpec::DimVectors(dv.clone()))
        }
        (None, Some(arrows)) => {
            if let Some(a) = arrows.iter().find(|a| q.arrow_index(a).is_none()) {
                return Err(err(format!("unknown arrow `{a}`")));
            }
            Ok(BSpec::AnnihilatedArrows(arrows.clone()))
        }
        _ => Err(err("exactly one of `dim_vectors` or `annihilated_arrows` is required".into())),
    }
}

pub const PRESETS: [(&str, &str); 4] = [
    ("a1", include_str!("../presets/a1.toml")),
    ("a2", include_str!("../presets/a2.toml")),
    ("a3", include_str!("../presets/a3.toml")),
    ("example33", include_str!("../presets/example33.toml")),
];

pub fn preset_names() -> Vec<&'static str> {
    PRESETS.iter().map(|(n, _)| *n).collect()
}

pub fn preset_source(name: &str) -> Option<&'static str> {
    PRESETS.iter().find(|(n, _)| *n == name).map(|(_, s)| *s)
}

pub fn load_preset(name: &str) -> Result<ProblemFile, ProblemError> {
    parse_problem(preset_source(name).ok_or_else(|| ProblemError::UnknownPreset(name.into()))?)
}
