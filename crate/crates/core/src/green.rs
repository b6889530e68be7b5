//! Green sequences and their enumeration.

use std::collections::{BTreeMap, HashSet, VecDeque};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::quiver::{IceQuiver, Quiver, QuiverError, VertexColor};

pub type CVector = Vec<i64>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GreenError {
    #[error("vertex {0} is not green")]
    NotGreen(usize),
    #[error(transparent)]
    Quiver(#[from] QuiverError),
    #[error("search truncated ({0})")]
    Truncated(Truncation),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Truncation {
    MaxLen,
    MaxStates,
}

impl std::fmt::Display for Truncation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Truncation::MaxLen => "max_len reached",
            Truncation::MaxStates => "max_states reached",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchBounds {
    pub max_len: usize,
    pub max_states: u64,
}

impl SearchBounds {
    pub const DEFAULT_MAX_STATES: u64 = 10_000_000;

    /// `max_len = 4n`, `max_states = 10^7`.
    pub fn for_vertices(n: usize) -> Self {
        SearchBounds {
            max_len: 4 * n.max(1),
            max_states: Self::DEFAULT_MAX_STATES,
        }
    }
}

/// A framed-quiver mutation state together with the green sequence that
/// produced it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchState {
    pub state: IceQuiver,
    pub history: Vec<usize>,
    /// Row of the mutated vertex in the c-matrix, taken before each mutation.
    pub trace: Vec<CVector>,
}

impl SearchState {
    pub fn initial(q: &Quiver) -> Self {
        SearchState {
            state: IceQuiver::framed(q),
            history: Vec::new(),
            trace: Vec::new(),
        }
    }

    /// Replays `history` from the framed quiver, allowing red vertices.
    pub fn replay(q: &Quiver, history: &[usize]) -> Result<Self, GreenError> {
        history
            .iter()
            .try_fold(SearchState::initial(q), |s, &v| s.explore(v))
    }

    pub fn green_vertices(&self) -> Result<Vec<usize>, GreenError> {
        Ok(self.state.green_vertices()?)
    }

    pub fn is_all_red(&self) -> Result<bool, GreenError> {
        Ok(self.green_vertices()?.is_empty())
    }

    /// Mutates at a green vertex.
    pub fn step(&self, i: usize) -> Result<SearchState, GreenError> {
        if self.state.vertex_color(i)? != VertexColor::Green {
            return Err(GreenError::NotGreen(i));
        }
        self.explore(i)
    }

    /// Mutates at any mutable vertex; the recorded c-vector may be negative.
    pub fn explore(&self, i: usize) -> Result<SearchState, GreenError> {
        let c = self.state.c_matrix()?;
        if i == 0 || i > c.size() {
            return Err(QuiverError::InvalidVertex(i).into());
        }
        let row = c.row(i).to_vec();
        let state = self.state.mutate(i)?;
        let mut history = self.history.clone();
        history.push(i);
        let mut trace = self.trace.clone();
        trace.push(row);
        Ok(SearchState {
            state,
            history,
            trace,
        })
    }

    /// Pops the last step. Returns `None` on the initial state.
    pub fn undo(&self) -> Option<SearchState> {
        let (&last, rest) = self.history.split_last()?;
        Some(SearchState {
            state: self.state.mutate(last).ok()?,
            history: rest.to_vec(),
            trace: self.trace[..self.trace.len() - 1].to_vec(),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GreenSequence {
    pub vertices: Vec<usize>,
    pub c_vectors: Vec<CVector>,
    pub length: usize,
    pub maximal: bool,
}

impl GreenSequence {
    fn from_state(s: &SearchState, maximal: bool) -> Self {
        GreenSequence {
            vertices: s.history.clone(),
            c_vectors: s.trace.clone(),
            length: s.history.len(),
            maximal,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MgsEnumeration {
    pub sequences: Vec<GreenSequence>,
    pub truncated: Option<Truncation>,
    pub states_visited: u64,
}

struct Dfs<'a, F> {
    bounds: SearchBounds,
    limit: usize,
    visited: u64,
    truncated: Option<Truncation>,
    out: Vec<GreenSequence>,
    visit: &'a mut F,
}

impl<F: FnMut(&IceQuiver)> Dfs<'_, F> {
    fn done(&self) -> bool {
        self.out.len() >= self.limit || self.truncated == Some(Truncation::MaxStates)
    }

    fn run(&mut self, s: &SearchState) -> Result<(), GreenError> {
        if self.visited >= self.bounds.max_states {
            self.truncated = Some(Truncation::MaxStates);
            return Ok(());
        }
        self.visited += 1;
        (self.visit)(&s.state);

        let greens = s.green_vertices()?;
        if greens.is_empty() {
            self.out.push(GreenSequence::from_state(s, true));
            return Ok(());
        }
        if s.history.len() >= self.bounds.max_len {
            self.truncated.get_or_insert(Truncation::MaxLen);
            return Ok(());
        }
        for g in greens {
            if self.done() {
                break;
            }
            self.run(&s.step(g)?)?;
        }
        Ok(())
    }
}

/// Depth-first search over green mutations from `start`, branching in
/// ascending vertex order. Stops after `limit` maximal sequences. `visit` is
/// called on every state entered.
pub fn enumerate_from<F: FnMut(&IceQuiver)>(
    start: &SearchState,
    bounds: SearchBounds,
    limit: usize,
    visit: &mut F,
) -> Result<MgsEnumeration, GreenError> {
    let mut dfs = Dfs {
        bounds,
        limit,
        visited: 0,
        truncated: None,
        out: Vec::new(),
        visit,
    };
    dfs.run(start)?;
    let mut sequences = dfs.out;
    sequences.sort_by(|a, b| (a.length, &a.vertices).cmp(&(b.length, &b.vertices)));
    Ok(MgsEnumeration {
        sequences,
        truncated: dfs.truncated,
        states_visited: dfs.visited,
    })
}

/// All maximal green sequences of `q` within `bounds`, sorted by length and
/// then lexicographically by vertex list.
pub fn enumerate_mgs(q: &Quiver, bounds: SearchBounds) -> Result<MgsEnumeration, GreenError> {
    enumerate_from(&SearchState::initial(q), bounds, usize::MAX, &mut |_| {})
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpectrumReport {
    pub count: usize,
    /// length -> number of maximal green sequences of that length
    pub lengths: BTreeMap<usize, usize>,
    pub min: usize,
    pub max: usize,
}

impl SpectrumReport {
    pub fn from_sequences(seqs: &[GreenSequence]) -> Self {
        let mut lengths = BTreeMap::new();
        for s in seqs {
            *lengths.entry(s.length).or_insert(0) += 1;
        }
        SpectrumReport {
            count: seqs.len(),
            min: lengths.keys().next().copied().unwrap_or(0),
            max: lengths.keys().next_back().copied().unwrap_or(0),
            lengths,
        }
    }
}

pub fn mgs_spectrum(q: &Quiver, bounds: SearchBounds) -> Result<SpectrumReport, GreenError> {
    let e = enumerate_mgs(q, bounds)?;
    match e.truncated {
        Some(t) => Err(GreenError::Truncated(t)),
        None => Ok(SpectrumReport::from_sequences(&e.sequences)),
    }
}

/// Number of distinct states reachable from the framed quiver by green
/// mutations, or `None` if more than `max_states` exist.
pub fn count_reachable_states(q: &Quiver, max_states: usize) -> Result<Option<usize>, GreenError> {
    let start = IceQuiver::framed(q);
    let mut seen = HashSet::from([start.clone()]);
    let mut queue = VecDeque::from([start]);
    while let Some(s) = queue.pop_front() {
        for g in s.green_vertices()? {
            let next = s.mutate(g)?;
            if seen.insert(next.clone()) {
                if seen.len() > max_states {
                    return Ok(None);
                }
                queue.push_back(next);
            }
        }
    }
    Ok(Some(seen.len()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn a1() -> Quiver {
        Quiver::from_pairs(1, &[]).unwrap()
    }

    fn a2() -> Quiver {
        Quiver::from_pairs(2, &[(1, 2)]).unwrap()
    }

    #[test]
    fn green_vertices_and_steps() {
        let s = SearchState::initial(&a2());
        assert_eq!(s.green_vertices().unwrap(), vec![1, 2]);
        let s1 = s.step(1).unwrap();
        assert_eq!(s1.trace, vec![vec![1, 0]]);
        assert_eq!(s1.green_vertices().unwrap(), vec![2]);
        assert_eq!(s1.step(1).unwrap_err(), GreenError::NotGreen(1));

        let s21 = s.step(2).unwrap().step(1).unwrap();
        assert_eq!(s21.trace, vec![vec![0, 1], vec![1, 1]]);
    }

    #[test]
    fn explore_records_signed_vectors_and_undo_restores() {
        let s = SearchState::initial(&a2()).step(1).unwrap();
        let back = s.explore(1).unwrap();
        assert_eq!(back.trace[1], vec![-1, 0]);
        assert_eq!(back.state, SearchState::initial(&a2()).state);
        assert_eq!(s.undo().unwrap(), SearchState::initial(&a2()));
        assert!(SearchState::initial(&a2()).undo().is_none());
        assert_eq!(SearchState::replay(&a2(), &[1, 1]).unwrap(), back);
    }

    #[test]
    fn a1_and_a2_sequences() {
        let e = enumerate_mgs(&a1(), SearchBounds::for_vertices(1)).unwrap();
        assert_eq!(e.sequences.len(), 1);
        assert_eq!(e.sequences[0].vertices, vec![1]);
        assert_eq!(e.sequences[0].c_vectors, vec![vec![1]]);

        let e = enumerate_mgs(&a2(), SearchBounds::for_vertices(2)).unwrap();
        assert!(e.truncated.is_none());
        let got: Vec<(Vec<usize>, Vec<CVector>)> = e
            .sequences
            .iter()
            .map(|s| (s.vertices.clone(), s.c_vectors.clone()))
            .collect();
        assert_eq!(
            got,
            vec![
                (vec![1, 2], vec![vec![1, 0], vec![0, 1]]),
                (vec![2, 1, 2], vec![vec![0, 1], vec![1, 1], vec![1, 0]]),
            ]
        );
    }

    #[test]
    fn spectrum() {
        let r = mgs_spectrum(&a1(), SearchBounds::for_vertices(1)).unwrap();
        assert_eq!((r.count, r.min, r.max), (1, 1, 1));
        let r = mgs_spectrum(&a2(), SearchBounds::for_vertices(2)).unwrap();
        assert_eq!((r.count, r.min, r.max), (2, 2, 3));
        assert_eq!(r.lengths, BTreeMap::from([(2, 1), (3, 1)]));
    }

    #[test]
    fn truncation_is_reported() {
        let tight = SearchBounds {
            max_len: 2,
            max_states: 100,
        };
        let e = enumerate_mgs(&a2(), tight).unwrap();
        assert_eq!(e.truncated, Some(Truncation::MaxLen));
        assert_eq!(e.sequences.len(), 1);
        assert_eq!(
            mgs_spectrum(&a2(), tight).unwrap_err(),
            GreenError::Truncated(Truncation::MaxLen)
        );

        let few = SearchBounds {
            max_len: 8,
            max_states: 2,
        };
        let e = enumerate_mgs(&a2(), few).unwrap();
        assert_eq!(e.truncated, Some(Truncation::MaxStates));
    }

    #[test]
    fn reachable_states() {
        // initial, mu1, mu2, mu1mu2, mu2mu1, mu2mu1mu2; the two terminal
        // states differ by the position of the vertex labels.
        assert_eq!(count_reachable_states(&a2(), 100).unwrap(), Some(6));
        assert_eq!(count_reachable_states(&a2(), 2).unwrap(), None);
    }
}
