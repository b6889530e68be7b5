//! Forward hom-orthogonal sequences, their maximality, and the two checks
//! built on them: the correspondence with maximal green sequences, and the
//! tilted-algebra ordering.
//!
//! Maximality is insertion-maximality relative to a finite module catalog.

use std::collections::{BTreeSet, BinaryHeap};
use std::cmp::Reverse;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::{hom_dimension, is_annihilated_by, AlgebraError, BoundQuiver};
use crate::green::{enumerate_mgs, CVector, GreenError, GreenSequence, SearchBounds};
use crate::modules::{enumerate_schurian, enumerate_thin_schurian, ModuleCatalog, ModuleError};
use crate::quiver::Quiver;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OrthoError {
    #[error("module {0} is not in the catalog")]
    UnknownModule(usize),
    #[error("sequence search budget of {0} nodes exhausted")]
    Truncated(u64),
    #[error("inconclusive: {0}")]
    Inconclusive(String),
    #[error("invalid B specification: {0}")]
    InvalidBSpec(String),
    #[error("the bound quiver is not over the given quiver")]
    QuiverMismatch,
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

/// Pairwise Hom dimensions between catalog modules.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HomMatrix {
    size: usize,
    dims: Vec<usize>,
}

impl HomMatrix {
    pub fn compute(catalog: &ModuleCatalog) -> Result<Self, AlgebraError> {
        let size = catalog.len();
        let dims = (0..size * size)
            .into_par_iter()
            .map(|k| {
                let (i, j) = (k / size, k % size);
                hom_dimension(&catalog.modules[i], &catalog.modules[j], &catalog.algebra)
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(HomMatrix { size, dims })
    }

    /// From an explicit table, `table[i][j] = dim Hom(M_i, M_j)`.
    pub fn from_table(table: &[Vec<usize>]) -> Self {
        let size = table.len();
        assert!(table.iter().all(|r| r.len() == size), "table must be square");
        HomMatrix {
            size,
            dims: table.concat(),
        }
    }

    pub fn len(&self) -> usize {
        self.size
    }

    pub fn is_empty(&self) -> bool {
        self.size == 0
    }

    pub fn hom(&self, i: usize, j: usize) -> usize {
        self.dims[i * self.size + j]
    }

    /// `Hom(M_i, M_j) = 0`.
    pub fn vanish(&self, i: usize, j: usize) -> bool {
        self.hom(i, j) == 0
    }

    fn check(&self, seq: &[usize]) -> Result<(), OrthoError> {
        match seq.iter().find(|&&m| m >= self.size) {
            Some(&m) => Err(OrthoError::UnknownModule(m)),
            None => Ok(()),
        }
    }
}

pub fn is_forward_orthogonal(seq: &[usize], hm: &HomMatrix) -> Result<bool, OrthoError> {
    hm.check(seq)?;
    Ok(first_forward_violation(seq, hm).is_none())
}

/// First pair of positions `i < j` with `Hom(seq[i], seq[j]) != 0`.
fn first_forward_violation(seq: &[usize], hm: &HomMatrix) -> Option<(usize, usize)> {
    (0..seq.len())
        .flat_map(|i| ((i + 1)..seq.len()).map(move |j| (i, j)))
        .find(|&(i, j)| !hm.vanish(seq[i], seq[j]))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Insertion {
    pub module: usize,
    pub position: usize,
}

/// Positions where `module` can be inserted into `seq` keeping forward
/// orthogonality, as an inclusive range.
fn insertable_range(seq: &[usize], module: usize, hm: &HomMatrix) -> Option<(usize, usize)> {
    let last = seq
        .iter()
        .position(|&s| !hm.vanish(s, module))
        .unwrap_or(seq.len());
    let first = seq
        .iter()
        .rposition(|&s| !hm.vanish(module, s))
        .map_or(0, |k| k + 1);
    (first <= last).then_some((first, last))
}

/// `None` if no catalog module can be inserted anywhere; otherwise the first
/// insertion found (lowest module index, then lowest position).
pub fn is_maximal(seq: &[usize], hm: &HomMatrix) -> Result<Option<Insertion>, OrthoError> {
    hm.check(seq)?;
    Ok(find_insertion(seq, hm))
}

fn find_insertion(seq: &[usize], hm: &HomMatrix) -> Option<Insertion> {
    (0..hm.len()).find_map(|module| {
        insertable_range(seq, module, hm).map(|(position, _)| Insertion { module, position })
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MfhoSequence {
    /// Catalog indices.
    pub modules: Vec<usize>,
    pub dim_vectors: Vec<Vec<usize>>,
    pub maximal: bool,
}

/// The module universe a maximality claim is relative to.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Universe {
    pub catalog_size: usize,
    pub dim_bound: usize,
    pub complete_thin: bool,
    pub field_size: Option<u32>,
}

impl Universe {
    pub fn of(catalog: &ModuleCatalog) -> Self {
        Universe {
            catalog_size: catalog.len(),
            dim_bound: catalog.dim_bound,
            complete_thin: catalog.complete_thin,
            field_size: catalog.field_size,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MfhoEnumeration {
    pub sequences: Vec<MfhoSequence>,
    pub nodes: u64,
}

pub const DEFAULT_MFHO_BUDGET: u64 = 200_000_000;

struct MfhoSearch<'a> {
    hm: &'a HomMatrix,
    budget: u64,
    nodes: u64,
    out: Vec<Vec<usize>>,
}

impl MfhoSearch<'_> {
    fn run(&mut self, seq: &mut Vec<usize>, appendable: &[bool]) -> Result<(), OrthoError> {
        self.nodes += 1;
        if self.nodes > self.budget {
            return Err(OrthoError::Truncated(self.budget));
        }
        if !seq.is_empty() && find_insertion(seq, self.hm).is_none() {
            self.out.push(seq.clone());
            return Ok(());
        }
        for next in (0..self.hm.len()).filter(|&m| appendable[m]) {
            let child: Vec<bool> = appendable
                .iter()
                .enumerate()
                .map(|(m, &ok)| ok && m != next && self.hm.vanish(next, m))
                .collect();
            seq.push(next);
            self.run(seq, &child)?;
            seq.pop();
        }
        Ok(())
    }
}

/// All insertion-maximal forward hom-orthogonal sequences over the catalog,
/// sorted by length and then by dimension vectors.
pub fn enumerate_mfho(
    catalog: &ModuleCatalog,
    hm: &HomMatrix,
    budget: u64,
) -> Result<MfhoEnumeration, OrthoError> {
    let mut search = MfhoSearch {
        hm,
        budget,
        nodes: 0,
        out: Vec::new(),
    };
    search.run(&mut Vec::new(), &vec![true; hm.len()])?;
    let mut sequences: Vec<MfhoSequence> = search
        .out
        .into_iter()
        .map(|modules| MfhoSequence {
            dim_vectors: modules
                .iter()
                .map(|&m| catalog.modules[m].dims().to_vec())
                .collect(),
            modules,
            maximal: true,
        })
        .collect();
    sequences.sort_by(|a, b| {
        (a.modules.len(), &a.dim_vectors).cmp(&(b.modules.len(), &b.dim_vectors))
    });
    Ok(MfhoEnumeration {
        sequences,
        nodes: search.nodes,
    })
}

/// `F = {X : Hom(M_i, X) = 0 for all i}` and `G = {Y : Hom(Y, X) = 0 for all X in F}`,
/// both within the catalog.
pub fn perp_sets(ms: &[usize], hm: &HomMatrix) -> Result<(Vec<usize>, Vec<usize>), OrthoError> {
    hm.check(ms)?;
    let f: Vec<usize> = (0..hm.len())
        .filter(|&x| ms.iter().all(|&m| hm.vanish(m, x)))
        .collect();
    let g = (0..hm.len())
        .filter(|&y| f.iter().all(|&x| hm.vanish(y, x)))
        .collect();
    Ok((f, g))
}

fn to_signed(v: &[usize]) -> CVector {
    v.iter().map(|&x| x as i64).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorrespondenceBounds {
    pub search: SearchBounds,
    /// 1 for thin enumeration only.
    pub max_entry: usize,
    pub field_size: u32,
    pub module_budget: u64,
    pub mfho_budget: u64,
}

impl CorrespondenceBounds {
    pub fn for_vertices(n: usize) -> Self {
        CorrespondenceBounds {
            search: SearchBounds::for_vertices(n),
            max_entry: 1,
            field_size: 3,
            module_budget: crate::modules::DEFAULT_BUDGET,
            mfho_budget: DEFAULT_MFHO_BUDGET,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorrespondenceReport {
    pub equal: bool,
    pub mgs_count: usize,
    pub mfho_count: usize,
    pub longest_mgs: usize,
    pub longest_mfho: usize,
    pub only_in_mgs: Vec<Vec<CVector>>,
    pub only_in_mfho: Vec<Vec<CVector>>,
    /// c-vectors of some MGS that are not the dimension vector of any
    /// catalog module.
    pub unrealized_c_vectors: Vec<CVector>,
    pub universe: Universe,
}

/// Compares the c-vector sequences of `mgs` with the dimension-vector
/// sequences of `mfho`, as sets of ordered sequences.
pub fn compare_sequence_sets(
    mgs: &[GreenSequence],
    mfho: &[MfhoSequence],
    catalog: &ModuleCatalog,
) -> CorrespondenceReport {
    let green: BTreeSet<Vec<CVector>> = mgs.iter().map(|s| s.c_vectors.clone()).collect();
    let ortho: BTreeSet<Vec<CVector>> = mfho
        .iter()
        .map(|s| s.dim_vectors.iter().map(|d| to_signed(d)).collect())
        .collect();
    let dims: BTreeSet<CVector> = catalog.dimension_vectors().iter().map(|d| to_signed(d)).collect();
    let unrealized: BTreeSet<CVector> = mgs
        .iter()
        .flat_map(|s| s.c_vectors.iter())
        .filter(|c| !dims.contains(*c))
        .cloned()
        .collect();
    CorrespondenceReport {
        equal: green == ortho,
        mgs_count: green.len(),
        mfho_count: ortho.len(),
        longest_mgs: mgs.iter().map(|s| s.length).max().unwrap_or(0),
        longest_mfho: mfho.iter().map(|s| s.modules.len()).max().unwrap_or(0),
        only_in_mgs: green.difference(&ortho).cloned().collect(),
        only_in_mfho: ortho.difference(&green).cloned().collect(),
        unrealized_c_vectors: unrealized.into_iter().collect(),
        universe: Universe::of(catalog),
    }
}

/// Builds the module catalog for `bq` under `bounds`.
pub fn build_catalog(bq: &BoundQuiver, bounds: &CorrespondenceBounds) -> Result<ModuleCatalog, OrthoError> {
    if bounds.max_entry <= 1 {
        return Ok(enumerate_thin_schurian(bq));
    }
    enumerate_schurian(bq, bounds.max_entry, bounds.field_size, bounds.module_budget).map_err(|e| match e {
        ModuleError::Truncated { .. } => OrthoError::Inconclusive(e.to_string()),
        ModuleError::InvalidBound(m) => OrthoError::Inconclusive(m),
    })
}

/// Enumerates both sides and compares them. Any truncation makes the result
/// inconclusive.
pub fn verify_igusa_correspondence(
    q: &Quiver,
    bq: &BoundQuiver,
    bounds: &CorrespondenceBounds,
) -> Result<CorrespondenceReport, OrthoError> {
    if &bq.quiver != q {
        return Err(OrthoError::QuiverMismatch);
    }
    let mgs = enumerate_mgs(q, bounds.search).map_err(|e| OrthoError::Inconclusive(e.to_string()))?;
    if let Some(t) = mgs.truncated {
        return Err(OrthoError::Inconclusive(GreenError::Truncated(t).to_string()));
    }
    let catalog = build_catalog(bq, bounds)?;
    let hm = HomMatrix::compute(&catalog)?;
    let mfho = enumerate_mfho(&catalog, &hm, bounds.mfho_budget)
        .map_err(|e| OrthoError::Inconclusive(e.to_string()))?;
    Ok(compare_sequence_sets(&mgs.sequences, &mfho.sequences, &catalog))
}

/// Designates the modules of a tilted algebra inside the catalog.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BSpec {
    /// Modules annihilated by these arrows.
    AnnihilatedArrows(Vec<String>),
    /// Exactly the catalog modules with these dimension vectors.
    DimVectors(Vec<Vec<usize>>),
}

impl BSpec {
    /// Catalog indices of the designated modules, ascending.
    pub fn select(&self, catalog: &ModuleCatalog) -> Result<Vec<usize>, OrthoError> {
        match self {
            BSpec::AnnihilatedArrows(names) => {
                let names: Vec<&str> = names.iter().map(String::as_str).collect();
                let mut out = Vec::new();
                for (k, m) in catalog.modules.iter().enumerate() {
                    match is_annihilated_by(m, &catalog.algebra, &names) {
                        Ok(true) => out.push(k),
                        Ok(false) => {}
                        Err(AlgebraError::UnknownArrow(a)) => {
                            return Err(OrthoError::InvalidBSpec(format!("unknown arrow `{a}`")))
                        }
                        Err(e) => return Err(e.into()),
                    }
                }
                Ok(out)
            }
            BSpec::DimVectors(vectors) => {
                let mut out = BTreeSet::new();
                for d in vectors {
                    let hits: Vec<usize> = (0..catalog.len())
                        .filter(|&k| catalog.modules[k].dims() == d.as_slice())
                        .collect();
                    match hits[..] {
                        [k] => {
                            if !out.insert(k) {
                                return Err(OrthoError::InvalidBSpec(format!("{d:?} listed twice")));
                            }
                        }
                        [] => {
                            return Err(OrthoError::InvalidBSpec(format!(
                                "no catalog module has dimension vector {d:?}"
                            )))
                        }
                        _ => {
                            return Err(OrthoError::InvalidBSpec(format!(
                                "dimension vector {d:?} is ambiguous in the catalog"
                            )))
                        }
                    }
                }
                Ok(out.into_iter().collect())
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Discrepancy {
    /// Nonzero homs among these modules admit no backward ordering.
    HomCycle { modules: Vec<usize> },
    NotForwardOrthogonal { first: usize, second: usize },
    NotMaximal { module: usize, position: usize },
    NoMatchingMgs,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub holds: bool,
    /// Catalog indices of the designated modules, in the chosen order.
    pub ordering: Vec<usize>,
    pub dim_vectors: Vec<Vec<usize>>,
    /// Index into the supplied MGS list and its vertex sequence.
    pub matched_mgs: Option<(usize, Vec<usize>)>,
    pub discrepancies: Vec<Discrepancy>,
    pub universe: Universe,
}

/// Orders the designated modules so that every nonzero Hom points from a
/// later to an earlier position (ties broken by lowest catalog index), then
/// checks forward orthogonality, maximality over the whole catalog, and that
/// the dimension vectors are the c-vectors of one of `mgs`.
pub fn verify_theorem(
    b_spec: &BSpec,
    catalog: &ModuleCatalog,
    hm: &HomMatrix,
    mgs: &[GreenSequence],
) -> Result<VerificationReport, OrthoError> {
    let chosen = b_spec.select(catalog)?;
    let mut discrepancies = Vec::new();

    // M must come after every other N with Hom(M, N) != 0.
    let mut waiting: Vec<usize> = chosen
        .iter()
        .map(|&m| chosen.iter().filter(|&&n| n != m && !hm.vanish(m, n)).count())
        .collect();
    let mut ready: BinaryHeap<Reverse<usize>> = chosen
        .iter()
        .zip(&waiting)
        .filter(|(_, &w)| w == 0)
        .map(|(&m, _)| Reverse(m))
        .collect();
    let mut ordering = Vec::new();
    while let Some(Reverse(n)) = ready.pop() {
        ordering.push(n);
        for (k, &m) in chosen.iter().enumerate() {
            if m != n && !hm.vanish(m, n) {
                waiting[k] -= 1;
                if waiting[k] == 0 {
                    ready.push(Reverse(m));
                }
            }
        }
    }
    if ordering.len() < chosen.len() {
        let stuck = chosen.iter().copied().filter(|m| !ordering.contains(m)).collect();
        discrepancies.push(Discrepancy::HomCycle { modules: stuck });
    }

    if let Some((i, j)) = first_forward_violation(&ordering, hm) {
        discrepancies.push(Discrepancy::NotForwardOrthogonal {
            first: ordering[i],
            second: ordering[j],
        });
    }
    if let Some(ins) = find_insertion(&ordering, hm) {
        discrepancies.push(Discrepancy::NotMaximal {
            module: ins.module,
            position: ins.position,
        });
    }

    let dim_vectors: Vec<Vec<usize>> = ordering
        .iter()
        .map(|&m| catalog.modules[m].dims().to_vec())
        .collect();
    let target: Vec<CVector> = dim_vectors.iter().map(|d| to_signed(d)).collect();
    let matched_mgs = mgs
        .iter()
        .position(|s| s.c_vectors == target)
        .map(|k| (k, mgs[k].vertices.clone()));
    if matched_mgs.is_none() {
        discrepancies.push(Discrepancy::NoMatchingMgs);
    }

    Ok(VerificationReport {
        holds: discrepancies.is_empty(),
        ordering,
        dim_vectors,
        matched_mgs,
        discrepancies,
        universe: Universe::of(catalog),
    })
}

/// Exploratory comparison of designated-module counts with the longest MGS
/// length. Not a verification of anything.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModuleCountComparison {
    pub longest_mgs: usize,
    /// `(b_spec name, number of designated modules)`
    pub counts: Vec<(String, usize)>,
    pub some_count_matches: bool,
}

pub fn compare_module_counts(
    specs: &[(String, BSpec)],
    catalog: &ModuleCatalog,
    longest_mgs: usize,
) -> Result<ModuleCountComparison, OrthoError> {
    let counts = specs
        .iter()
        .map(|(name, spec)| Ok((name.clone(), spec.select(catalog)?.len())))
        .collect::<Result<Vec<_>, OrthoError>>()?;
    Ok(ModuleCountComparison {
        longest_mgs,
        some_count_matches: counts.iter().any(|(_, c)| *c == longest_mgs),
        counts,
    })
}
