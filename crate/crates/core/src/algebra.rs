//! Bound quiver algebras, potentials and their cyclic derivatives, and
//! representations over the rationals.
//!
//! Modules are right modules. An arrow `a: i -> j` acts in a representation
//! by a `dims[i] x dims[j]` matrix, i.e. a map from the space at `j` to the
//! space at `i`. A path `a1 a2 ... ak` (a walk, `a1` first) evaluates to the
//! product `M(a1) M(a2) ... M(ak)`.

use std::collections::BTreeMap;
use std::fmt;

use num::{One, Signed, Zero};
use thiserror::Error;

use crate::linalg::{parse_rational, QMatrix, Rational};
use crate::quiver::Quiver;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlgebraError {
    #[error("unknown arrow `{0}`")]
    UnknownArrow(String),
    #[error("path `{0}` is not composable")]
    NonComposable(String),
    #[error("relation terms are not parallel: `{0}`")]
    NonParallel(String),
    #[error("relation path `{0}` has length < 2")]
    ShortPath(String),
    #[error("relation is zero")]
    EmptyRelation,
    #[error("invalid potential: {0}")]
    InvalidPotential(String),
    #[error("cannot parse `{text}`: {reason}")]
    Parse { text: String, reason: String },
    #[error("shape mismatch: {0}")]
    ShapeError(String),
    #[error("the zero module has no endomorphism ring to test")]
    NotAModulePoint,
}

/// A sequence of arrow indices read left to right as a walk.
pub type Path = Vec<usize>;

fn path_name(q: &Quiver, path: &[usize]) -> String {
    path.iter()
        .map(|&a| q.arrows()[a].name.as_str())
        .collect::<Vec<_>>()
        .join("*")
}

/// Source and target of a composable nonempty path.
fn path_endpoints(q: &Quiver, path: &[usize]) -> Result<(usize, usize), AlgebraError> {
    let arrows = q.arrows();
    let (first, last) = match (path.first(), path.last()) {
        (Some(&f), Some(&l)) => (f, l),
        _ => return Err(AlgebraError::NonComposable(String::new())),
    };
    for w in path.windows(2) {
        if arrows[w[0]].target != arrows[w[1]].source {
            return Err(AlgebraError::NonComposable(path_name(q, path)));
        }
    }
    Ok((arrows[first].source, arrows[last].target))
}

/// Merges equal paths and drops zero coefficients.
fn normalize(terms: Vec<(Rational, Path)>) -> Vec<(Rational, Path)> {
    let mut merged: BTreeMap<Path, Rational> = BTreeMap::new();
    let mut order = Vec::new();
    for (c, p) in terms {
        if !merged.contains_key(&p) {
            order.push(p.clone());
        }
        *merged.entry(p).or_insert_with(Rational::zero) += c;
    }
    order
        .into_iter()
        .filter_map(|p| {
            let c = merged.remove(&p)?;
            (!c.is_zero()).then_some((c, p))
        })
        .collect()
}

fn format_terms(q: &Quiver, terms: &[(Rational, Path)]) -> String {
    if terms.is_empty() {
        return "0".into();
    }
    let mut out = String::new();
    for (k, (c, p)) in terms.iter().enumerate() {
        let neg = c.is_negative();
        match (k, neg) {
            (0, true) => out.push('-'),
            (0, false) => {}
            (_, true) => out.push_str(" - "),
            (_, false) => out.push_str(" + "),
        }
        let mag = c.abs();
        if !mag.is_one() {
            out.push_str(&format!("{mag}*"));
        }
        out.push_str(&path_name(q, p));
    }
    out
}

/// A rational combination of parallel paths.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Relation {
    terms: Vec<(Rational, Path)>,
    source: usize,
    target: usize,
}

impl Relation {
    pub fn new(q: &Quiver, terms: Vec<(Rational, Path)>) -> Result<Self, AlgebraError> {
        let terms = normalize(terms);
        let mut ends = None;
        for (_, p) in &terms {
            let e = path_endpoints(q, p)?;
            match ends {
                None => ends = Some(e),
                Some(prev) if prev != e => {
                    return Err(AlgebraError::NonParallel(format_terms(q, &terms)))
                }
                _ => {}
            }
        }
        let (source, target) = ends.ok_or(AlgebraError::EmptyRelation)?;
        Ok(Relation {
            terms,
            source,
            target,
        })
    }

    /// Parses e.g. `"alpha*beta - delta*eta"` or `"2 alpha beta + 1/2*gamma*delta"`.
    pub fn parse(q: &Quiver, text: &str) -> Result<Self, AlgebraError> {
        Relation::new(q, parse_combination(q, text)?)
    }

    pub fn terms(&self) -> &[(Rational, Path)] {
        &self.terms
    }

    pub fn source(&self) -> usize {
        self.source
    }

    pub fn target(&self) -> usize {
        self.target
    }

    pub fn display<'a>(&'a self, q: &'a Quiver) -> impl fmt::Display + 'a {
        DisplayTerms(q, &self.terms)
    }

    /// Whether `self = k * other` for a nonzero rational `k`.
    pub fn is_scalar_multiple_of(&self, other: &Relation) -> bool {
        if self.terms.len() != other.terms.len() || self.terms.is_empty() {
            return false;
        }
        let theirs: BTreeMap<&Path, &Rational> = other.terms.iter().map(|(c, p)| (p, c)).collect();
        let (c0, p0) = &self.terms[0];
        let Some(d0) = theirs.get(p0) else {
            return false;
        };
        let k = c0 / *d0;
        self.terms
            .iter()
            .all(|(c, p)| theirs.get(p).is_some_and(|d| &(*d * &k) == c))
    }
}

struct DisplayTerms<'a>(&'a Quiver, &'a [(Rational, Path)]);

impl fmt::Display for DisplayTerms<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_terms(self.0, self.1))
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Number(Rational),
    Name(String),
    Plus,
    Minus,
    Star,
}

fn tokenize(text: &str) -> Result<Vec<Token>, AlgebraError> {
    let err = |reason: String| AlgebraError::Parse {
        text: text.to_string(),
        reason,
    };
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        match c {
            c if c.is_whitespace() => i += 1,
            '+' => {
                out.push(Token::Plus);
                i += 1
            }
            '-' => {
                out.push(Token::Minus);
                i += 1
            }
            '*' | '.' => {
                out.push(Token::Star);
                i += 1
            }
            c if c.is_ascii_digit() => {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '/') {
                    i += 1;
                }
                let s: String = chars[start..i].iter().collect();
                let v = parse_rational(&s).ok_or_else(|| err(format!("bad number `{s}`")))?;
                out.push(Token::Number(v));
            }
            c if c.is_alphabetic() || c == '_' => {
                let start = i;
                while i < chars.len()
                    && (chars[i].is_alphanumeric() || chars[i] == '_' || chars[i] == '\'')
                {
                    i += 1;
                }
                out.push(Token::Name(chars[start..i].iter().collect()));
            }
            other => return Err(err(format!("unexpected character `{other}`"))),
        }
    }
    Ok(out)
}

/// Parses a signed sum of terms; a term is a product of rational factors and
/// arrow names, separated by `*`, `.` or whitespace.
pub fn parse_combination(q: &Quiver, text: &str) -> Result<Vec<(Rational, Path)>, AlgebraError> {
    let err = |reason: &str| AlgebraError::Parse {
        text: text.to_string(),
        reason: reason.to_string(),
    };
    let tokens = tokenize(text)?;
    let mut terms = Vec::new();
    let mut i = 0;
    if tokens.is_empty() {
        return Err(err("empty expression"));
    }
    while i < tokens.len() {
        let mut coeff = Rational::one();
        if terms.is_empty() {
            match tokens[i] {
                Token::Minus => {
                    coeff = -coeff;
                    i += 1;
                }
                Token::Plus => i += 1,
                _ => {}
            }
        } else {
            match tokens[i] {
                Token::Minus => coeff = -coeff,
                Token::Plus => {}
                _ => return Err(err("expected `+` or `-` between terms")),
            }
            i += 1;
        }
        let mut path = Vec::new();
        let mut expect_factor = true;
        while i < tokens.len() {
            match &tokens[i] {
                Token::Number(v) => coeff *= v,
                Token::Name(n) => path.push(
                    q.arrow_index(n)
                        .ok_or_else(|| AlgebraError::UnknownArrow(n.clone()))?,
                ),
                Token::Star if !expect_factor => {
                    expect_factor = true;
                    i += 1;
                    continue;
                }
                Token::Star => return Err(err("misplaced `*`")),
                Token::Plus | Token::Minus => break,
            }
            expect_factor = false;
            i += 1;
        }
        if expect_factor {
            return Err(err("term ends without a factor"));
        }
        if path.is_empty() {
            return Err(err("constant term"));
        }
        terms.push((coeff, path));
    }
    Ok(terms)
}

/// A rational combination of oriented cycles.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Potential {
    terms: Vec<(Rational, Path)>,
}

impl Potential {
    pub fn new(q: &Quiver, terms: Vec<(Rational, Path)>) -> Result<Self, AlgebraError> {
        for (_, cycle) in &terms {
            let (s, t) = path_endpoints(q, cycle)
                .map_err(|_| AlgebraError::InvalidPotential(path_name(q, cycle)))?;
            if s != t {
                return Err(AlgebraError::InvalidPotential(format!(
                    "`{}` is not closed",
                    path_name(q, cycle)
                )));
            }
        }
        Ok(Potential { terms })
    }

    pub fn parse(q: &Quiver, text: &str) -> Result<Self, AlgebraError> {
        if text.trim() == "0" {
            return Ok(Potential { terms: Vec::new() });
        }
        Potential::new(q, parse_combination(q, text)?)
    }

    pub fn terms(&self) -> &[(Rational, Path)] {
        &self.terms
    }
}

/// Cyclic derivatives of `w`, one relation per arrow that occurs in `w`
/// (arrow order), skipping derivatives that vanish.
///
/// Each occurrence of `a` in a cycle `c` contributes the coefficient of `c`
/// times the path obtained by rotating `c` to start just after that
/// occurrence and dropping `a`.
pub fn cyclic_derivatives(q: &Quiver, w: &Potential) -> Result<Vec<Relation>, AlgebraError> {
    let mut out = Vec::new();
    for a in 0..q.arrows().len() {
        let mut terms = Vec::new();
        for (c, cycle) in &w.terms {
            for (pos, &b) in cycle.iter().enumerate() {
                if b != a {
                    continue;
                }
                let rotated: Path = cycle[pos + 1..]
                    .iter()
                    .chain(&cycle[..pos])
                    .copied()
                    .collect();
                if rotated.is_empty() {
                    return Err(AlgebraError::InvalidPotential(format!(
                        "cycle of length 1 at `{}`",
                        q.arrows()[a].name
                    )));
                }
                terms.push((c.clone(), rotated));
            }
        }
        match Relation::new(q, terms) {
            Ok(r) => out.push(r),
            Err(AlgebraError::EmptyRelation) => {}
            Err(e) => return Err(e),
        }
    }
    Ok(out)
}

/// Whether every relation of each list is a nonzero scalar multiple of some
/// relation of the other. This is sufficient for the two lists to generate
/// the same ideal.
pub fn generators_match_up_to_scalar(a: &[Relation], b: &[Relation]) -> bool {
    let covered = |xs: &[Relation], ys: &[Relation]| {
        xs.iter()
            .all(|x| ys.iter().any(|y| x.is_scalar_multiple_of(y)))
    };
    covered(a, b) && covered(b, a)
}

/// A quiver with an admissible set of relations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundQuiver {
    pub quiver: Quiver,
    pub relations: Vec<Relation>,
}

impl BoundQuiver {
    pub fn new(quiver: Quiver, relations: Vec<Relation>) -> Result<Self, AlgebraError> {
        for r in &relations {
            if let Some((_, p)) = r.terms.iter().find(|(_, p)| p.len() < 2) {
                return Err(AlgebraError::ShortPath(path_name(&quiver, p)));
            }
        }
        Ok(BoundQuiver { quiver, relations })
    }

    /// The path algebra with no relations.
    pub fn free(quiver: Quiver) -> Self {
        BoundQuiver {
            quiver,
            relations: Vec::new(),
        }
    }

    pub fn from_potential(quiver: Quiver, w: &Potential) -> Result<Self, AlgebraError> {
        let relations = cyclic_derivatives(&quiver, w)?;
        BoundQuiver::new(quiver, relations)
    }

    pub fn vertex_count(&self) -> usize {
        self.quiver.vertex_count()
    }
}

/// A representation: one rational matrix per arrow.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Representation {
    dims: Vec<usize>,
    mats: Vec<QMatrix>,
}

impl Representation {
    pub fn new(q: &Quiver, dims: Vec<usize>, mats: Vec<QMatrix>) -> Result<Self, AlgebraError> {
        if dims.len() != q.vertex_count() {
            return Err(AlgebraError::ShapeError(format!(
                "{} dimensions for {} vertices",
                dims.len(),
                q.vertex_count()
            )));
        }
        if mats.len() != q.arrows().len() {
            return Err(AlgebraError::ShapeError(format!(
                "{} matrices for {} arrows",
                mats.len(),
                q.arrows().len()
            )));
        }
        for (a, m) in q.arrows().iter().zip(&mats) {
            let want = (dims[a.source - 1], dims[a.target - 1]);
            if m.shape() != want {
                return Err(AlgebraError::ShapeError(format!(
                    "arrow `{}` needs a {}x{} matrix, got {}x{}",
                    a.name,
                    want.0,
                    want.1,
                    m.rows(),
                    m.cols()
                )));
            }
        }
        Ok(Representation { dims, mats })
    }

    pub fn zero(q: &Quiver) -> Self {
        Representation {
            dims: vec![0; q.vertex_count()],
            mats: q.arrows().iter().map(|_| QMatrix::zeros(0, 0)).collect(),
        }
    }

    /// Simple module at vertex `v` (1-based).
    pub fn simple(q: &Quiver, v: usize) -> Self {
        let mut dims = vec![0; q.vertex_count()];
        dims[v - 1] = 1;
        Representation::thin(q, &dims, &vec![Rational::zero(); q.arrows().len()])
    }

    /// Thin representation with entries 0/1 in `dims` and one scalar per
    /// arrow; scalars on arrows leaving the support are ignored.
    pub fn thin(q: &Quiver, dims: &[usize], scalars: &[Rational]) -> Self {
        let mats = q
            .arrows()
            .iter()
            .zip(scalars)
            .map(|(a, x)| {
                let (r, c) = (dims[a.source - 1], dims[a.target - 1]);
                if r == 1 && c == 1 {
                    QMatrix::scalar(x.clone())
                } else {
                    QMatrix::zeros(r, c)
                }
            })
            .collect();
        Representation {
            dims: dims.to_vec(),
            mats,
        }
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn matrices(&self) -> &[QMatrix] {
        &self.mats
    }

    pub fn is_zero(&self) -> bool {
        self.dims.iter().all(|&d| d == 0)
    }

    pub fn total_dimension(&self) -> usize {
        self.dims.iter().sum()
    }

    /// Matrix of a nonempty composable path.
    pub fn path_matrix(&self, path: &[usize]) -> QMatrix {
        let mut iter = path.iter();
        let first = iter.next().expect("empty path");
        iter.fold(self.mats[*first].clone(), |acc, &a| &acc * &self.mats[a])
    }

    pub fn direct_sum(&self, other: &Representation) -> Representation {
        Representation {
            dims: self.dims.iter().zip(&other.dims).map(|(a, b)| a + b).collect(),
            mats: self
                .mats
                .iter()
                .zip(&other.mats)
                .map(|(a, b)| a.direct_sum(b))
                .collect(),
        }
    }

    /// The isomorphic representation `g_i M(a) g_j^{-1}` for `a: i -> j`,
    /// given invertible `g_v` at every vertex.
    pub fn change_basis(&self, q: &Quiver, gs: &[QMatrix]) -> Option<Representation> {
        let invs: Vec<QMatrix> = gs.iter().map(QMatrix::inverse).collect::<Option<_>>()?;
        let mats = q
            .arrows()
            .iter()
            .zip(&self.mats)
            .map(|(a, m)| &(&gs[a.source - 1] * m) * &invs[a.target - 1])
            .collect();
        Some(Representation {
            dims: self.dims.clone(),
            mats,
        })
    }

    /// Canonical text encoding of all matrices, in arrow order.
    pub fn encode(&self) -> String {
        self.mats
            .iter()
            .map(QMatrix::encode)
            .collect::<Vec<_>>()
            .join(";")
    }
}

fn check_shapes(m: &Representation, q: &Quiver) -> Result<(), AlgebraError> {
    Representation::new(q, m.dims.clone(), m.mats.clone()).map(|_| ())
}

/// Indices of the relations that `m` does not satisfy.
pub fn check_relations(m: &Representation, bq: &BoundQuiver) -> Result<Vec<usize>, AlgebraError> {
    check_shapes(m, &bq.quiver)?;
    let mut bad = Vec::new();
    for (k, r) in bq.relations.iter().enumerate() {
        let (rows, cols) = (m.dims[r.source - 1], m.dims[r.target - 1]);
        let mut sum = QMatrix::zeros(rows, cols);
        for (c, p) in &r.terms {
            sum = &sum + &m.path_matrix(p).scale(c);
        }
        if !sum.is_zero() {
            bad.push(k);
        }
    }
    Ok(bad)
}

pub fn dimension_vector(m: &Representation) -> Vec<usize> {
    m.dims.clone()
}

/// A basis of intertwiners. Each basis element holds one
/// `dims_target[v] x dims_source[v]` matrix per vertex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HomSpace {
    pub dimension: usize,
    pub basis: Vec<Vec<QMatrix>>,
}

/// `Hom(m, n)`: families `phi_v: m_v -> n_v` with
/// `phi_i M(a) = N(a) phi_j` for every arrow `a: i -> j`.
pub fn hom_space(
    m: &Representation,
    n: &Representation,
    bq: &BoundQuiver,
) -> Result<HomSpace, AlgebraError> {
    let q = &bq.quiver;
    check_shapes(m, q)?;
    check_shapes(n, q)?;

    let verts = q.vertex_count();
    let mut offset = vec![0; verts + 1];
    for v in 0..verts {
        offset[v + 1] = offset[v] + n.dims[v] * m.dims[v];
    }
    let unknowns = offset[verts];
    // phi_v[r][c], r < n_v, c < m_v
    let var = |v: usize, r: usize, c: usize| offset[v] + r * m.dims[v] + c;

    let mut rows: Vec<Vec<Rational>> = Vec::new();
    for (a, (ma, na)) in q.arrows().iter().zip(m.mats.iter().zip(&n.mats)) {
        let (i, j) = (a.source - 1, a.target - 1);
        for r in 0..n.dims[i] {
            for c in 0..m.dims[j] {
                let mut row = vec![Rational::zero(); unknowns];
                for k in 0..m.dims[i] {
                    row[var(i, r, k)] += ma.get(k, c);
                }
                for k in 0..n.dims[j] {
                    row[var(j, k, c)] -= na.get(r, k);
                }
                if row.iter().any(|x| !x.is_zero()) {
                    rows.push(row);
                }
            }
        }
    }

    let system = QMatrix::from_fn(rows.len(), unknowns, |r, c| rows[r][c].clone());
    let basis: Vec<Vec<QMatrix>> = system
        .nullspace()
        .into_iter()
        .map(|v| {
            (0..verts)
                .map(|x| QMatrix::from_fn(n.dims[x], m.dims[x], |r, c| v[var(x, r, c)].clone()))
                .collect()
        })
        .collect();
    Ok(HomSpace {
        dimension: basis.len(),
        basis,
    })
}

pub fn hom_dimension(
    m: &Representation,
    n: &Representation,
    bq: &BoundQuiver,
) -> Result<usize, AlgebraError> {
    Ok(hom_space(m, n, bq)?.dimension)
}

/// Schurian over the rationals: the endomorphism algebra is one-dimensional.
pub fn is_schurian(m: &Representation, bq: &BoundQuiver) -> Result<bool, AlgebraError> {
    if m.is_zero() {
        return Err(AlgebraError::NotAModulePoint);
    }
    Ok(hom_dimension(m, m, bq)? == 1)
}

/// Whether every named arrow acts by zero on `m`.
pub fn is_annihilated_by(
    m: &Representation,
    bq: &BoundQuiver,
    arrows: &[&str],
) -> Result<bool, AlgebraError> {
    let mut all = true;
    for name in arrows {
        let a = bq
            .quiver
            .arrow_index(name)
            .ok_or_else(|| AlgebraError::UnknownArrow(name.to_string()))?;
        all &= m.mats[a].is_zero();
    }
    Ok(all)
}
