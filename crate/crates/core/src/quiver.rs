//! Quivers, ice quivers and mutation.
//!
//! Vertices are 1-indexed everywhere in the public API. The framed quiver of
//! a quiver on `1..=n` has frozen copies `n+1..=2n`, with `i' = n + i`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QuiverError {
    #[error("vertex {0} is out of range")]
    InvalidVertex(usize),
    #[error("loop at vertex {0}")]
    Loop(usize),
    #[error("oriented 2-cycle between vertices {0} and {1}")]
    TwoCycle(usize, usize),
    #[error("arrow between frozen vertices {0} and {1}")]
    FrozenArrow(usize, usize),
    #[error("duplicate arrow name `{0}`")]
    DuplicateArrowName(String),
    #[error("cannot mutate at frozen vertex {0}")]
    MutationAtFrozenVertex(usize),
    #[error("invalid state: {0}")]
    InvalidState(String),
    #[error("vertex {0} is neither green nor red")]
    SignCoherenceViolation(usize),
}

/// A named arrow `source -> target`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Arrow {
    pub name: String,
    pub source: usize,
    pub target: usize,
}

/// A finite cluster quiver: no loops, no oriented 2-cycles. Parallel arrows
/// are allowed.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Quiver {
    vertices: usize,
    arrows: Vec<Arrow>,
}

impl Quiver {
    pub fn new(vertices: usize, arrows: Vec<Arrow>) -> Result<Self, QuiverError> {
        let mut names = BTreeSet::new();
        let mut pairs = BTreeSet::new();
        for a in &arrows {
            for v in [a.source, a.target] {
                if v == 0 || v > vertices {
                    return Err(QuiverError::InvalidVertex(v));
                }
            }
            if a.source == a.target {
                return Err(QuiverError::Loop(a.source));
            }
            if !names.insert(a.name.as_str()) {
                return Err(QuiverError::DuplicateArrowName(a.name.clone()));
            }
            pairs.insert((a.source, a.target));
        }
        for &(s, t) in &pairs {
            if pairs.contains(&(t, s)) {
                return Err(QuiverError::TwoCycle(s.min(t), s.max(t)));
            }
        }
        Ok(Quiver { vertices, arrows })
    }

    /// Builds a quiver from unlabeled pairs; arrows are named `a1, a2, ...`.
    pub fn from_pairs(vertices: usize, pairs: &[(usize, usize)]) -> Result<Self, QuiverError> {
        let arrows = pairs
            .iter()
            .enumerate()
            .map(|(k, &(source, target))| Arrow {
                name: format!("a{}", k + 1),
                source,
                target,
            })
            .collect();
        Quiver::new(vertices, arrows)
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices
    }

    pub fn arrows(&self) -> &[Arrow] {
        &self.arrows
    }

    pub fn arrow_index(&self, name: &str) -> Option<usize> {
        self.arrows.iter().position(|a| a.name == name)
    }

    /// Whether the underlying undirected graph is connected. An empty quiver
    /// counts as connected.
    pub fn is_connected(&self) -> bool {
        if self.vertices == 0 {
            return true;
        }
        let mut seen = vec![false; self.vertices];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            for a in &self.arrows {
                let (s, t) = (a.source - 1, a.target - 1);
                for (x, y) in [(s, t), (t, s)] {
                    if x == v && !seen[y] {
                        seen[y] = true;
                        stack.push(y);
                    }
                }
            }
        }
        seen.into_iter().all(|s| s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VertexColor {
    Green,
    Red,
}

/// An ice quiver stored as a dense matrix of arrow multiplicities.
///
/// Equality and hashing are on the unlabeled arrow multiset, which is what
/// mutation acts on.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct IceQuiver {
    vertices: usize,
    frozen: Vec<bool>,
    counts: Vec<u32>,
}

impl IceQuiver {
    /// Builds an ice quiver from `(source, target, multiplicity)` triples.
    pub fn new(
        vertices: usize,
        frozen: &BTreeSet<usize>,
        arrows: &[(usize, usize, u32)],
    ) -> Result<Self, QuiverError> {
        let mut flags = vec![false; vertices];
        for &f in frozen {
            if f == 0 || f > vertices {
                return Err(QuiverError::InvalidVertex(f));
            }
            flags[f - 1] = true;
        }
        let mut counts = vec![0u32; vertices * vertices];
        for &(s, t, m) in arrows {
            for v in [s, t] {
                if v == 0 || v > vertices {
                    return Err(QuiverError::InvalidVertex(v));
                }
            }
            if s == t {
                return Err(QuiverError::Loop(s));
            }
            counts[(s - 1) * vertices + (t - 1)] += m;
        }
        let iq = IceQuiver {
            vertices,
            frozen: flags,
            counts,
        };
        iq.validate()?;
        Ok(iq)
    }

    /// The framed quiver: `q` plus a frozen copy `n + i` of each vertex `i`
    /// and one arrow `i -> n + i`.
    pub fn framed(q: &Quiver) -> Self {
        let n = q.vertex_count();
        let total = 2 * n;
        let mut counts = vec![0u32; total * total];
        for a in q.arrows() {
            counts[(a.source - 1) * total + (a.target - 1)] += 1;
        }
        for i in 0..n {
            counts[i * total + (n + i)] += 1;
        }
        let mut frozen = vec![false; total];
        frozen[n..].iter_mut().for_each(|f| *f = true);
        IceQuiver {
            vertices: total,
            frozen,
            counts,
        }
    }

    fn validate(&self) -> Result<(), QuiverError> {
        let n = self.vertices;
        for i in 0..n {
            if self.counts[i * n + i] != 0 {
                return Err(QuiverError::Loop(i + 1));
            }
            for j in (i + 1)..n {
                let (fwd, back) = (self.counts[i * n + j], self.counts[j * n + i]);
                if self.frozen[i] && self.frozen[j] && (fwd > 0 || back > 0) {
                    return Err(QuiverError::FrozenArrow(i + 1, j + 1));
                }
                if !self.frozen[i] && !self.frozen[j] && fwd > 0 && back > 0 {
                    return Err(QuiverError::TwoCycle(i + 1, j + 1));
                }
            }
        }
        Ok(())
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices
    }

    pub fn is_frozen(&self, v: usize) -> bool {
        self.frozen[v - 1]
    }

    pub fn frozen(&self) -> BTreeSet<usize> {
        (1..=self.vertices).filter(|&v| self.is_frozen(v)).collect()
    }

    pub fn mutable_vertices(&self) -> Vec<usize> {
        (1..=self.vertices).filter(|&v| !self.is_frozen(v)).collect()
    }

    /// Number of arrows `i -> j`.
    pub fn count(&self, i: usize, j: usize) -> u32 {
        self.counts[(i - 1) * self.vertices + (j - 1)]
    }

    /// Arrows as `(source, target, multiplicity)`, sorted by source then target.
    pub fn arrows(&self) -> Vec<(usize, usize, u32)> {
        let n = self.vertices;
        (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .filter_map(|(i, j)| {
                let m = self.counts[i * n + j];
                (m > 0).then_some((i + 1, j + 1, m))
            })
            .collect()
    }

    fn check_vertex(&self, v: usize) -> Result<(), QuiverError> {
        if v == 0 || v > self.vertices {
            Err(QuiverError::InvalidVertex(v))
        } else {
            Ok(())
        }
    }

    /// Mutation at the mutable vertex `l`.
    ///
    /// 1. every path `i -> l -> j` contributes `#(i->l) * #(l->j)` new arrows `i -> j`;
    /// 2. all arrows incident to `l` are reversed;
    /// 3. opposite arrows are cancelled pairwise and arrows between frozen
    ///    vertices are deleted.
    pub fn mutate(&self, l: usize) -> Result<IceQuiver, QuiverError> {
        self.check_vertex(l)?;
        if self.is_frozen(l) {
            return Err(QuiverError::MutationAtFrozenVertex(l));
        }
        let n = self.vertices;
        let k = l - 1;
        let old = &self.counts;
        let mut new = old.clone();

        for i in (0..n).filter(|&i| old[i * n + k] > 0) {
            for j in (0..n).filter(|&j| j != i && old[k * n + j] > 0) {
                new[i * n + j] += old[i * n + k] * old[k * n + j];
            }
        }

        for v in 0..n {
            new[k * n + v] = old[v * n + k];
            new[v * n + k] = old[k * n + v];
        }

        for i in 0..n {
            for j in (i + 1)..n {
                let (a, b) = (i * n + j, j * n + i);
                let common = new[a].min(new[b]);
                new[a] -= common;
                new[b] -= common;
                if self.frozen[i] && self.frozen[j] {
                    new[a] = 0;
                    new[b] = 0;
                }
            }
        }

        Ok(IceQuiver {
            vertices: n,
            frozen: self.frozen.clone(),
            counts: new,
        })
    }

    /// Applies mutations left to right.
    pub fn mutate_sequence(&self, seq: &[usize]) -> Result<IceQuiver, QuiverError> {
        seq.iter().try_fold(self.clone(), |s, &v| s.mutate(v))
    }

    /// Rows indexed by the mutable vertices (ascending), columns by all vertices.
    pub fn exchange_matrix(&self) -> ExchangeMatrix {
        let rows = self.mutable_vertices();
        let cols = self.vertices;
        let mut entries = Vec::with_capacity(rows.len() * cols);
        for &i in &rows {
            for j in 1..=cols {
                entries.push(self.count(i, j) as i64 - self.count(j, i) as i64);
            }
        }
        ExchangeMatrix {
            row_vertices: rows,
            cols,
            entries,
        }
    }

    /// Number of mutable vertices if the frozen set is `{n+1, ..., 2n}`.
    fn framing_rank(&self) -> Result<usize, QuiverError> {
        let total = self.vertices;
        if !total.is_multiple_of(2) {
            return Err(QuiverError::InvalidState(format!(
                "{total} vertices cannot be a framed quiver"
            )));
        }
        let n = total / 2;
        if self.frozen[..n].iter().any(|&f| f) || !self.frozen[n..].iter().all(|&f| f) {
            return Err(QuiverError::InvalidState(format!(
                "frozen set must be {{{}..{}}}",
                n + 1,
                total
            )));
        }
        Ok(n)
    }

    /// The frozen-column block of the exchange matrix; row `i` is the
    /// c-vector of vertex `i`.
    pub fn c_matrix(&self) -> Result<CMatrix, QuiverError> {
        let n = self.framing_rank()?;
        let mut entries = Vec::with_capacity(n * n);
        for i in 1..=n {
            for j in 1..=n {
                entries.push(self.count(i, n + j) as i64 - self.count(n + j, i) as i64);
            }
        }
        Ok(CMatrix { n, entries })
    }

    /// Green: no arrow from a frozen vertex into `i`. Red: no arrow from `i`
    /// into a frozen vertex.
    pub fn vertex_color(&self, i: usize) -> Result<VertexColor, QuiverError> {
        self.check_vertex(i)?;
        if self.is_frozen(i) {
            return Err(QuiverError::InvalidState(format!("vertex {i} is frozen")));
        }
        let frozen = || (1..=self.vertices).filter(|&f| self.is_frozen(f));
        let green = frozen().all(|f| self.count(f, i) == 0);
        let red = frozen().all(|f| self.count(i, f) == 0);
        match (green, red) {
            (true, false) => Ok(VertexColor::Green),
            (false, true) => Ok(VertexColor::Red),
            _ => Err(QuiverError::SignCoherenceViolation(i)),
        }
    }

    pub fn green_vertices(&self) -> Result<Vec<usize>, QuiverError> {
        let mut out = Vec::new();
        for v in self.mutable_vertices() {
            if self.vertex_color(v)? == VertexColor::Green {
                out.push(v);
            }
        }
        Ok(out)
    }
}

impl fmt::Display for IceQuiver {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .arrows()
            .into_iter()
            .map(|(s, t, m)| {
                if m == 1 {
                    format!("{s}->{t}")
                } else {
                    format!("{s}->{t} x{m}")
                }
            })
            .collect();
        write!(f, "{{{}}}", parts.join(", "))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExchangeMatrix {
    row_vertices: Vec<usize>,
    cols: usize,
    entries: Vec<i64>,
}

impl ExchangeMatrix {
    pub fn row_vertices(&self) -> &[usize] {
        &self.row_vertices
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Entry for mutable vertex `i` and any vertex `j`.
    pub fn get(&self, i: usize, j: usize) -> Option<i64> {
        let r = self.row_vertices.iter().position(|&v| v == i)?;
        (1..=self.cols)
            .contains(&j)
            .then(|| self.entries[r * self.cols + j - 1])
    }

    pub fn rows(&self) -> impl Iterator<Item = &[i64]> {
        self.entries.chunks(self.cols.max(1)).take(self.row_vertices.len())
    }

    /// Whether the mutable-by-mutable block is antisymmetric.
    pub fn mutable_block_is_antisymmetric(&self) -> bool {
        self.row_vertices.iter().all(|&i| {
            self.row_vertices
                .iter()
                .all(|&j| self.get(i, j) == self.get(j, i).map(|x| -x))
        })
    }
}

/// The square c-matrix. Rows are indexed by mutable vertex `1..=n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CMatrix {
    n: usize,
    entries: Vec<i64>,
}

impl CMatrix {
    pub fn size(&self) -> usize {
        self.n
    }

    /// c-vector of vertex `i` (1-based).
    pub fn row(&self, i: usize) -> &[i64] {
        &self.entries[(i - 1) * self.n..i * self.n]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[i64]> {
        self.entries.chunks(self.n.max(1)).take(self.n)
    }

    pub fn to_rows(&self) -> Vec<Vec<i64>> {
        self.rows().map(<[i64]>::to_vec).collect()
    }

    /// First vertex whose row is zero or has entries of both signs.
    pub fn sign_coherence_violation(&self) -> Option<usize> {
        (1..=self.n).find(|&i| {
            let row = self.row(i);
            let pos = row.iter().any(|&x| x > 0);
            let neg = row.iter().any(|&x| x < 0);
            pos == neg
        })
    }

    /// Whether the rows are the negated unit vectors in some order.
    pub fn is_negative_permutation(&self) -> bool {
        let mut hit = vec![false; self.n];
        for row in self.rows() {
            let nonzero: Vec<(usize, i64)> = row
                .iter()
                .copied()
                .enumerate()
                .filter(|&(_, x)| x != 0)
                .collect();
            match nonzero.as_slice() {
                [(k, -1)] if !hit[*k] => hit[*k] = true,
                _ => return false,
            }
        }
        true
    }
}

/// Arrow multiset of an ice quiver, keyed by `(source, target)`.
pub fn arrow_multiset(iq: &IceQuiver) -> BTreeMap<(usize, usize), u32> {
    iq.arrows().into_iter().map(|(s, t, m)| ((s, t), m)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn a2() -> Quiver {
        Quiver::from_pairs(2, &[(1, 2)]).unwrap()
    }

    fn example33() -> Quiver {
        let named = [
            ("alpha", 3, 2),
            ("beta", 2, 1),
            ("gamma", 1, 3),
            ("delta", 3, 4),
            ("eta", 4, 1),
        ];
        Quiver::new(
            4,
            named
                .iter()
                .map(|&(n, s, t)| Arrow {
                    name: n.into(),
                    source: s,
                    target: t,
                })
                .collect(),
        )
        .unwrap()
    }

    fn set(arrows: &[(usize, usize)]) -> BTreeMap<(usize, usize), u32> {
        arrows.iter().map(|&p| (p, 1)).collect()
    }

    #[test]
    fn framing() {
        let f = IceQuiver::framed(&a2());
        assert_eq!(f.vertex_count(), 4);
        assert_eq!(f.frozen(), BTreeSet::from([3, 4]));
        assert_eq!(arrow_multiset(&f), set(&[(1, 2), (1, 3), (2, 4)]));
        assert_eq!(f.green_vertices().unwrap(), vec![1, 2]);

        let one = IceQuiver::framed(&Quiver::from_pairs(1, &[]).unwrap());
        assert_eq!(arrow_multiset(&one), set(&[(1, 2)]));
        assert_eq!(one.frozen(), BTreeSet::from([2]));

        let ex = IceQuiver::framed(&example33());
        assert_eq!(ex.vertex_count(), 8);
        for i in 1..=4 {
            assert_eq!(ex.count(i, i + 4), 1);
        }
        assert_eq!(ex.arrows().len(), 9);
    }

    #[test]
    fn rejects_bad_quivers() {
        assert_eq!(
            Quiver::from_pairs(2, &[(1, 1)]).unwrap_err(),
            QuiverError::Loop(1)
        );
        assert_eq!(
            Quiver::from_pairs(2, &[(1, 2), (2, 1)]).unwrap_err(),
            QuiverError::TwoCycle(1, 2)
        );
        assert_eq!(
            Quiver::from_pairs(2, &[(1, 3)]).unwrap_err(),
            QuiverError::InvalidVertex(3)
        );
        let frozen = BTreeSet::from([2, 3]);
        assert_eq!(
            IceQuiver::new(3, &frozen, &[(2, 3, 1)]).unwrap_err(),
            QuiverError::FrozenArrow(2, 3)
        );
        assert!(!Quiver::from_pairs(3, &[(1, 2)]).unwrap().is_connected());
    }

    #[test]
    fn mutate_a2() {
        let f = IceQuiver::framed(&a2());
        let m1 = f.mutate(1).unwrap();
        assert_eq!(arrow_multiset(&m1), set(&[(2, 1), (3, 1), (2, 4)]));
        assert_eq!(m1.vertex_color(1).unwrap(), VertexColor::Red);
        assert_eq!(m1.vertex_color(2).unwrap(), VertexColor::Green);

        let m2 = f.mutate(2).unwrap();
        assert_eq!(arrow_multiset(&m2), set(&[(2, 1), (4, 2), (1, 4), (1, 3)]));

        assert_eq!(m1.mutate(1).unwrap(), f);
        assert_eq!(f.mutate(3).unwrap_err(), QuiverError::MutationAtFrozenVertex(3));
        assert_eq!(f.mutate(5).unwrap_err(), QuiverError::InvalidVertex(5));
    }

    #[test]
    fn multiplicities_and_cancellation() {
        // Kronecker-like: 1 =>2 (x2), 2 -> 3; mutating at 2 adds 2 arrows 1->3.
        let frozen = BTreeSet::new();
        let q = IceQuiver::new(3, &frozen, &[(1, 2, 2), (2, 3, 1)]).unwrap();
        let m = q.mutate(2).unwrap();
        assert_eq!(m.count(1, 3), 2);
        assert_eq!(m.count(2, 1), 2);
        assert_eq!(m.count(3, 2), 1);

        // 3 -> 1 cancels one of the two new arrows 1 -> 3.
        let q = IceQuiver::new(3, &frozen, &[(1, 2, 2), (2, 3, 1), (3, 1, 1)]).unwrap();
        let m = q.mutate(2).unwrap();
        assert_eq!(m.count(1, 3), 1);
        assert_eq!(m.count(3, 1), 0);
    }

    #[test]
    fn frozen_frozen_arrows_removed() {
        // 3 -> 1 -> 4 with 3, 4 frozen: the composite 3 -> 4 must not survive.
        let frozen = BTreeSet::from([3, 4]);
        let q = IceQuiver::new(4, &frozen, &[(3, 1, 1), (1, 4, 1), (1, 2, 1)]).unwrap();
        let m = q.mutate(1).unwrap();
        assert_eq!(m.count(3, 4), 0);
        assert_eq!(m.count(4, 3), 0);
        assert_eq!(arrow_multiset(&m), set(&[(1, 3), (4, 1), (2, 1), (3, 2)]));
    }

    #[test]
    fn exchange_and_c_matrices() {
        let f = IceQuiver::framed(&a2());
        let e = f.exchange_matrix();
        let rows: Vec<Vec<i64>> = e.rows().map(<[i64]>::to_vec).collect();
        assert_eq!(rows, vec![vec![0, 1, 1, 0], vec![-1, 0, 0, 1]]);
        assert!(e.mutable_block_is_antisymmetric());

        let m1 = f.mutate(1).unwrap();
        let rows: Vec<Vec<i64>> = m1.exchange_matrix().rows().map(<[i64]>::to_vec).collect();
        assert_eq!(rows, vec![vec![0, -1, -1, 0], vec![1, 0, 0, 1]]);

        assert_eq!(f.c_matrix().unwrap().to_rows(), vec![vec![1, 0], vec![0, 1]]);
        assert_eq!(m1.c_matrix().unwrap().to_rows(), vec![vec![-1, 0], vec![0, 1]]);
        let m21 = f.mutate_sequence(&[2, 1]).unwrap();
        assert_eq!(
            m21.c_matrix().unwrap().to_rows(),
            vec![vec![-1, -1], vec![1, 0]]
        );

        let empty = IceQuiver::new(3, &BTreeSet::new(), &[]).unwrap();
        assert!(empty.exchange_matrix().rows().flatten().all(|&x| x == 0));
        assert!(matches!(
            empty.c_matrix(),
            Err(QuiverError::InvalidState(_))
        ));
    }

    #[test]
    fn color_errors() {
        // A mutable vertex with no frozen neighbours is neither green nor red.
        let q = IceQuiver::new(3, &BTreeSet::from([3]), &[(1, 3, 1)]).unwrap();
        assert_eq!(q.vertex_color(1).unwrap(), VertexColor::Green);
        assert_eq!(
            q.vertex_color(2).unwrap_err(),
            QuiverError::SignCoherenceViolation(2)
        );
    }
}
