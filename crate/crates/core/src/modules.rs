//! Catalogs of Schurian modules up to isomorphism.
//!
//! Thin modules are enumerated exactly: for every support and every
//! connected set of nonzero arrows, a spanning forest is gauged to 1 and the
//! remaining (chord) scalars are solved for from the relations. Modules with
//! larger entries come from a brute-force sweep over a small prime field,
//! lifted back to the rationals and re-checked there.

use std::collections::BTreeMap;
use std::sync::atomic::{AtomicU64, Ordering};

use num::{Integer, One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::algebra::{check_relations, hom_space, is_schurian, BoundQuiver, Representation};
use crate::linalg::{modp::Field, rat, QMatrix, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModuleError {
    #[error("module search budget of {budget} nodes exhausted")]
    Truncated {
        budget: u64,
        partial: Box<ModuleCatalog>,
    },
    #[error("invalid search bound: {0}")]
    InvalidBound(String),
}

/// Pairwise non-isomorphic Schurian modules, sorted by dimension vector and
/// then by matrix encoding.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModuleCatalog {
    pub algebra: BoundQuiver,
    pub modules: Vec<Representation>,
    /// Largest dimension-vector entry searched.
    pub dim_bound: usize,
    /// Every thin Schurian module is present up to isomorphism.
    pub complete_thin: bool,
    /// Prime used by the brute-force sweep, if one was run.
    pub field_size: Option<u32>,
}

impl ModuleCatalog {
    pub fn len(&self) -> usize {
        self.modules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.modules.is_empty()
    }

    pub fn dimension_vectors(&self) -> Vec<Vec<usize>> {
        self.modules.iter().map(|m| m.dims().to_vec()).collect()
    }

    /// Index of the first module with the given dimension vector.
    pub fn position_of_dims(&self, dims: &[usize]) -> Option<usize> {
        self.modules.iter().position(|m| m.dims() == dims)
    }

    fn sort(&mut self) {
        let mut keyed: Vec<(Vec<usize>, String, Representation)> = self
            .modules
            .drain(..)
            .map(|m| (m.dims().to_vec(), m.encode(), m))
            .collect();
        keyed.sort_by(|a, b| (&a.0, &a.1).cmp(&(&b.0, &b.1)));
        self.modules = keyed.into_iter().map(|(_, _, m)| m).collect();
    }

    /// Adds `m` unless an isomorphic module is already present.
    fn insert(&mut self, m: Representation) -> bool {
        let algebra = &self.algebra;
        if self
            .modules
            .iter()
            .any(|e| e.dims() == m.dims() && are_isomorphic(e, &m, algebra))
        {
            return false;
        }
        self.modules.push(m);
        true
    }
}

fn support_connected(bq: &BoundQuiver, support: &[bool], arrows: &[usize]) -> bool {
    let q = &bq.quiver;
    let verts: Vec<usize> = (0..support.len()).filter(|&v| support[v]).collect();
    let Some(&start) = verts.first() else {
        return false;
    };
    let mut seen = vec![false; support.len()];
    seen[start] = true;
    let mut stack = vec![start];
    while let Some(v) = stack.pop() {
        for &a in arrows {
            let (s, t) = (q.arrows()[a].source - 1, q.arrows()[a].target - 1);
            for (x, y) in [(s, t), (t, s)] {
                if x == v && !seen[y] {
                    seen[y] = true;
                    stack.push(y);
                }
            }
        }
    }
    verts.iter().all(|&v| seen[v])
}

/// Arrows with both endpoints in the support.
fn support_arrows(bq: &BoundQuiver, support: &[bool]) -> Vec<usize> {
    bq.quiver
        .arrows()
        .iter()
        .enumerate()
        .filter(|(_, a)| support[a.source - 1] && support[a.target - 1])
        .map(|(k, _)| k)
        .collect()
}

/// Polynomial in the chord scalars: sorted chord multiset -> coefficient.
type Poly = BTreeMap<Vec<usize>, Rational>;

#[derive(Default)]
struct SolveFlags {
    guessed: bool,
    free: bool,
}

const GUESSES: [i64; 4] = [1, -1, 2, -2];

fn substitute(eq: &Poly, assign: &[Option<Rational>]) -> Poly {
    let mut out = Poly::new();
    for (mono, c) in eq {
        let mut coeff = c.clone();
        let mut rest = Vec::new();
        for &x in mono {
            match &assign[x] {
                Some(v) => coeff *= v,
                None => rest.push(x),
            }
        }
        *out.entry(rest).or_insert_with(Rational::zero) += coeff;
    }
    out.retain(|_, c| !c.is_zero());
    out
}

/// All nonzero solutions of the chord equations; unconstrained chords are
/// set to 1 and other underdetermined systems are sampled.
fn solve_chords(
    eqs: &[Poly],
    mut assign: Vec<Option<Rational>>,
    flags: &mut SolveFlags,
    out: &mut Vec<Vec<Rational>>,
) {
    loop {
        let mut progress = false;
        let mut pending = Vec::new();
        for eq in eqs {
            let red = substitute(eq, &assign);
            if red.is_empty() {
                continue;
            }
            // one monomial of nonzero values can never vanish
            if red.len() == 1 {
                return;
            }
            let mut vars: Vec<usize> = red.keys().flatten().copied().collect();
            vars.sort_unstable();
            vars.dedup();
            if let [x] = vars[..] {
                if red.keys().all(|m| m.len() <= 1) {
                    let c0 = red.get(&vec![]).cloned().unwrap_or_else(Rational::zero);
                    let c1 = &red[&vec![x]];
                    let v = -c0 / c1;
                    if v.is_zero() {
                        return;
                    }
                    assign[x] = Some(v);
                    progress = true;
                    break;
                }
            }
            pending.push(vars);
        }
        if progress {
            continue;
        }
        if let Some(&x) = pending.iter().flatten().min() {
            flags.guessed = true;
            for g in GUESSES {
                let mut a = assign.clone();
                a[x] = Some(rat(g));
                solve_chords(eqs, a, flags, out);
            }
            return;
        }
        break;
    }
    let sol = assign
        .into_iter()
        .map(|v| {
            v.unwrap_or_else(|| {
                flags.free = true;
                Rational::one()
            })
        })
        .collect();
    out.push(sol);
}

fn thin_modules_on_support(bq: &BoundQuiver, support: &[bool]) -> (Vec<Representation>, bool) {
    let q = &bq.quiver;
    let arrows = support_arrows(bq, support);
    let dims: Vec<usize> = support.iter().map(|&s| s as usize).collect();
    let mut found = Vec::new();
    let mut complete = true;

    for mask in 0u64..(1u64 << arrows.len()) {
        let pattern: Vec<usize> = arrows
            .iter()
            .enumerate()
            .filter(|(k, _)| mask >> k & 1 == 1)
            .map(|(_, &a)| a)
            .collect();
        if !support_connected(bq, support, &pattern) {
            continue;
        }
        // spanning tree by DFS from the lowest support vertex
        let start = support.iter().position(|&s| s).unwrap();
        let mut seen = vec![false; support.len()];
        seen[start] = true;
        let mut tree = vec![false; q.arrows().len()];
        let mut stack = vec![start];
        while let Some(v) = stack.pop() {
            for &a in &pattern {
                let (s, t) = (q.arrows()[a].source - 1, q.arrows()[a].target - 1);
                let other = if s == v {
                    t
                } else if t == v {
                    s
                } else {
                    continue;
                };
                if !seen[other] {
                    seen[other] = true;
                    tree[a] = true;
                    stack.push(other);
                }
            }
        }
        let chords: Vec<usize> = pattern.iter().copied().filter(|&a| !tree[a]).collect();
        let slot = |a: usize| chords.iter().position(|&c| c == a);

        let mut eqs = Vec::new();
        for r in &bq.relations {
            if !support[r.source() - 1] || !support[r.target() - 1] {
                continue;
            }
            let mut poly = Poly::new();
            for (c, path) in r.terms() {
                if !path.iter().all(|a| pattern.contains(a)) {
                    continue;
                }
                let mut mono: Vec<usize> = path.iter().filter_map(|&a| slot(a)).collect();
                mono.sort_unstable();
                *poly.entry(mono).or_insert_with(Rational::zero) += c;
            }
            poly.retain(|_, c| !c.is_zero());
            if !poly.is_empty() {
                eqs.push(poly);
            }
        }

        let mut flags = SolveFlags::default();
        let mut sols = Vec::new();
        solve_chords(&eqs, vec![None; chords.len()], &mut flags, &mut sols);
        complete &= !flags.guessed && !flags.free;

        for sol in sols {
            let scalars: Vec<Rational> = (0..q.arrows().len())
                .map(|a| {
                    if tree[a] {
                        Rational::one()
                    } else if let Some(k) = slot(a) {
                        sol[k].clone()
                    } else {
                        Rational::zero()
                    }
                })
                .collect();
            let m = Representation::thin(q, &dims, &scalars);
            if check_relations(&m, bq).is_ok_and(|v| v.is_empty())
                && is_schurian(&m, bq).unwrap_or(false)
            {
                found.push(m);
            }
        }
    }
    (found, complete)
}

/// Every thin Schurian module up to isomorphism.
pub fn enumerate_thin_schurian(bq: &BoundQuiver) -> ModuleCatalog {
    let n = bq.vertex_count();
    assert!(n < 64, "too many vertices for subset enumeration");
    let per_support: Vec<(Vec<Representation>, bool)> = (1u64..(1u64 << n))
        .into_par_iter()
        .map(|mask| {
            let support: Vec<bool> = (0..n).map(|v| mask >> v & 1 == 1).collect();
            thin_modules_on_support(bq, &support)
        })
        .collect();

    let mut catalog = ModuleCatalog {
        algebra: bq.clone(),
        modules: Vec::new(),
        dim_bound: 1,
        complete_thin: true,
        field_size: None,
    };
    for (mods, complete) in per_support {
        catalog.complete_thin &= complete;
        for m in mods {
            catalog.insert(m);
        }
    }
    catalog.sort();
    catalog
}

/// Default node budget for [`enumerate_schurian`]. The budget is checked in
/// batches of 4096 nodes per dimension vector, so tiny searches always finish.
pub const DEFAULT_BUDGET: u64 = 20_000_000_000;

/// Thin enumeration plus a brute-force sweep of every dimension vector with
/// entries `<= max_entry`, with arrow matrices over `GF(field_size)` lifted to
/// symmetric integer representatives.
pub fn enumerate_schurian(
    bq: &BoundQuiver,
    max_entry: usize,
    field_size: u32,
    budget: u64,
) -> Result<ModuleCatalog, ModuleError> {
    if max_entry == 0 {
        return Err(ModuleError::InvalidBound("max_entry must be at least 1".into()));
    }
    if field_size < 2 || !(2..field_size).take_while(|d| d * d <= field_size).all(|d| !field_size.is_multiple_of(d)) {
        return Err(ModuleError::InvalidBound(format!("{field_size} is not prime")));
    }
    let mut catalog = enumerate_thin_schurian(bq);
    catalog.dim_bound = max_entry;
    catalog.field_size = Some(field_size);

    let n = bq.vertex_count();
    let mut all_dims = vec![Vec::new()];
    for _ in 0..n {
        all_dims = all_dims
            .into_iter()
            .flat_map(|d: Vec<usize>| {
                (0..=max_entry).map(move |e| {
                    let mut d = d.clone();
                    d.push(e);
                    d
                })
            })
            .collect();
    }
    let dims_list: Vec<Vec<usize>> = all_dims
        .into_iter()
        .filter(|d| {
            let support: Vec<bool> = d.iter().map(|&x| x > 0).collect();
            support.iter().any(|&s| s)
                && support_connected(bq, &support, &support_arrows(bq, &support))
        })
        .collect();

    let used = AtomicU64::new(0);
    let results: Vec<Result<Vec<Representation>, BudgetExhausted>> = dims_list
        .par_iter()
        .map(|d| search_dimension_vector(bq, d, field_size, budget, &used))
        .collect();

    let mut truncated = false;
    for r in results {
        match r {
            Ok(mods) => {
                for m in mods {
                    catalog.insert(m);
                }
            }
            Err(BudgetExhausted) => truncated = true,
        }
    }
    catalog.sort();
    if truncated {
        return Err(ModuleError::Truncated {
            budget,
            partial: Box::new(catalog),
        });
    }
    Ok(catalog)
}

/// Rational coefficient reduced mod `p`; `None` if `p` divides the denominator.
fn reduce(c: &Rational, f: Field) -> Option<u32> {
    let p = f.p as i64;
    let den = c.denom().mod_floor(&p.into()).to_i64()?;
    if den == 0 {
        return None;
    }
    let num = c.numer().mod_floor(&p.into()).to_i64()? as u32;
    Some(num * f.inv(den as u32) % f.p)
}

struct Sweep<'a> {
    bq: &'a BoundQuiver,
    dims: &'a [usize],
    field: Field,
    order: Vec<usize>,
    /// relations whose arrows are all assigned once `order[..=k]` is
    checks: Vec<Vec<usize>>,
    /// per relation: reduced coefficients, or `None` to skip the modular check
    coeffs: Vec<Option<Vec<u32>>>,
    mats: Vec<Vec<u32>>,
    found: Vec<Representation>,
    used: &'a AtomicU64,
    local: u64,
    budget: u64,
    exhausted: bool,
    scratch: (Vec<u32>, Vec<u32>),
}

impl Sweep<'_> {
    fn shape(&self, a: usize) -> (usize, usize) {
        let arrow = &self.bq.quiver.arrows()[a];
        (self.dims[arrow.source - 1], self.dims[arrow.target - 1])
    }

    fn tick(&mut self) -> bool {
        self.local += 1;
        if self.local == 4096 {
            let total = self.used.fetch_add(self.local, Ordering::Relaxed) + self.local;
            self.local = 0;
            if total > self.budget {
                self.exhausted = true;
            }
        }
        !self.exhausted
    }

    fn relation_holds(&mut self, r: usize) -> bool {
        let Some(coeffs) = &self.coeffs[r] else {
            return true;
        };
        let rel = &self.bq.relations[r];
        let (rows, cols) = (self.dims[rel.source() - 1], self.dims[rel.target() - 1]);
        if rows == 0 || cols == 0 {
            return true;
        }
        let p = self.field.p;
        let mut sum = vec![0u32; rows * cols];
        for ((_, path), &c) in rel.terms().iter().zip(coeffs) {
            let (mut acc, mut tmp) = std::mem::take(&mut self.scratch);
            acc.clear();
            acc.extend_from_slice(&self.mats[path[0]]);
            let r0 = self.shape(path[0]).0;
            let mut k = self.shape(path[0]).1;
            for &a in &path[1..] {
                let (_, c2) = self.shape(a);
                self.field.mul(&acc, &self.mats[a], r0, k, c2, &mut tmp);
                std::mem::swap(&mut acc, &mut tmp);
                k = c2;
            }
            debug_assert_eq!(acc.len(), rows * cols);
            for (s, v) in sum.iter_mut().zip(&acc) {
                *s = (*s + c * v) % p;
            }
            self.scratch = (acc, tmp);
        }
        sum.iter().all(|&x| x == 0)
    }

    /// `dim End(M)` over the field, from the current matrices.
    fn endo_dimension(&self) -> usize {
        let q = &self.bq.quiver;
        let p = self.field.p;
        let n = self.dims.len();
        let mut offset = vec![0; n + 1];
        for v in 0..n {
            offset[v + 1] = offset[v] + self.dims[v] * self.dims[v];
        }
        let unknowns = offset[n];
        let var = |v: usize, r: usize, c: usize| offset[v] + r * self.dims[v] + c;
        let mut rows: Vec<u32> = Vec::new();
        let mut count = 0;
        for (a, arrow) in q.arrows().iter().enumerate() {
            let (i, j) = (arrow.source - 1, arrow.target - 1);
            let (di, dj) = (self.dims[i], self.dims[j]);
            let m = &self.mats[a];
            for r in 0..di {
                for c in 0..dj {
                    let mut row = vec![0u32; unknowns];
                    for k in 0..di {
                        row[var(i, r, k)] = (row[var(i, r, k)] + m[k * dj + c]) % p;
                    }
                    for k in 0..dj {
                        row[var(j, k, c)] = (row[var(j, k, c)] + p - m[r * dj + k]) % p;
                    }
                    rows.extend_from_slice(&row);
                    count += 1;
                }
            }
        }
        unknowns - self.field.rank(&mut rows, count, unknowns)
    }

    fn lift(&self) -> Representation {
        let q = &self.bq.quiver;
        let mats = (0..q.arrows().len())
            .map(|a| {
                let (r, c) = self.shape(a);
                let vals: Vec<i64> = self.mats[a].iter().map(|&x| self.field.lift(x)).collect();
                QMatrix::from_i64(r, c, &vals)
            })
            .collect();
        Representation::new(q, self.dims.to_vec(), mats).expect("shapes follow dims")
    }

    fn leaf(&mut self) {
        if self.endo_dimension() != 1 {
            return;
        }
        let m = self.lift();
        if check_relations(&m, self.bq).is_ok_and(|v| v.is_empty())
            && is_schurian(&m, self.bq).unwrap_or(false)
            && !self
                .found
                .iter()
                .any(|e| are_isomorphic(e, &m, self.bq))
        {
            self.found.push(m);
        }
    }

    fn run(&mut self, level: usize) {
        if !self.tick() {
            return;
        }
        if level == self.order.len() {
            self.leaf();
            return;
        }
        let a = self.order[level];
        let (r, c) = self.shape(a);
        let size = r * c;
        let p = self.field.p;
        let candidates: Vec<Vec<u32>> = if level == 0 {
            // first arrow in rank normal form
            (0..=r.min(c))
                .map(|rank| {
                    let mut m = vec![0u32; size];
                    for d in 0..rank {
                        m[d * c + d] = 1;
                    }
                    m
                })
                .collect()
        } else {
            Vec::new()
        };
        let try_one = |s: &mut Self, m: Vec<u32>| {
            s.mats[a] = m;
            for k in 0..s.checks[level].len() {
                let rel = s.checks[level][k];
                if !s.relation_holds(rel) {
                    return;
                }
            }
            s.run(level + 1);
        };
        if level == 0 {
            for m in candidates {
                try_one(self, m);
                if self.exhausted {
                    return;
                }
            }
            return;
        }
        let mut m = vec![0u32; size];
        loop {
            try_one(self, m.clone());
            if self.exhausted {
                return;
            }
            // next matrix in base-p counting order
            let mut k = 0;
            while k < size {
                m[k] += 1;
                if m[k] < p {
                    break;
                }
                m[k] = 0;
                k += 1;
            }
            if k == size {
                break;
            }
        }
    }
}

/// The shared node budget ran out.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("node budget exhausted")]
pub struct BudgetExhausted;

/// Brute-force search for Schurian modules of one dimension vector. `used`
/// is a node counter shared across searches.
pub fn search_dimension_vector(
    bq: &BoundQuiver,
    dims: &[usize],
    field_size: u32,
    budget: u64,
    used: &AtomicU64,
) -> Result<Vec<Representation>, BudgetExhausted> {
    let q = &bq.quiver;
    let field = Field::new(field_size);
    let shape = |a: usize| {
        let arrow = &q.arrows()[a];
        (dims[arrow.source - 1], dims[arrow.target - 1])
    };
    let active: Vec<usize> = (0..q.arrows().len())
        .filter(|&a| shape(a).0 * shape(a).1 > 0)
        .collect();
    let rel_arrows: Vec<Vec<usize>> = bq
        .relations
        .iter()
        .map(|r| {
            let mut v: Vec<usize> = r.terms().iter().flat_map(|(_, p)| p.clone()).collect();
            v.sort_unstable();
            v.dedup();
            v
        })
        .collect();

    // greedy order: complete as many relations as early as possible
    let mut order: Vec<usize> = Vec::new();
    let mut remaining = active.clone();
    while !remaining.is_empty() {
        let score = |a: usize| {
            let completes = rel_arrows
                .iter()
                .filter(|ra| ra.contains(&a))
                .filter(|ra| ra.iter().all(|x| *x == a || order.contains(x) || !active.contains(x)))
                .count();
            let touches = rel_arrows.iter().filter(|ra| ra.contains(&a)).count();
            (completes, touches)
        };
        let best = *remaining
            .iter()
            .max_by(|&&x, &&y| score(x).cmp(&score(y)).then(y.cmp(&x)))
            .unwrap();
        order.push(best);
        remaining.retain(|&a| a != best);
    }

    let mut checks = vec![Vec::new(); order.len()];
    for (r, ra) in rel_arrows.iter().enumerate() {
        let level = ra
            .iter()
            .filter(|a| active.contains(a))
            .map(|a| order.iter().position(|x| x == a).unwrap())
            .max();
        if let Some(l) = level {
            checks[l].push(r);
        }
    }
    let coeffs = bq
        .relations
        .iter()
        .map(|r| r.terms().iter().map(|(c, _)| reduce(c, field)).collect())
        .collect();

    let mats = (0..q.arrows().len())
        .map(|a| vec![0u32; shape(a).0 * shape(a).1])
        .collect();
    let mut sweep = Sweep {
        bq,
        dims,
        field,
        order,
        checks,
        coeffs,
        mats,
        found: Vec::new(),
        used,
        local: 0,
        budget,
        exhausted: false,
        scratch: (Vec::new(), Vec::new()),
    };
    sweep.run(0);
    used.fetch_add(sweep.local, Ordering::Relaxed);
    if sweep.exhausted {
        Err(BudgetExhausted)
    } else {
        Ok(sweep.found)
    }
}

const SWEEP_LIMIT: u64 = 50_000;
const RANDOM_TRIALS: usize = 2_000;

/// Whether some intertwiner `m -> n` is invertible at every vertex.
///
/// The product of the vertex determinants is a polynomial of degree
/// `sum(dims)` in the Hom-basis coefficients, so it is nonzero somewhere on
/// the grid `{0..=sum(dims)}^k` iff it is nonzero. The grid is swept
/// exhaustively when small and sampled with a fixed seed otherwise.
pub fn are_isomorphic(m: &Representation, n: &Representation, bq: &BoundQuiver) -> bool {
    if m.dims() != n.dims() {
        return false;
    }
    if m == n {
        return true;
    }
    let Ok(hs) = hom_space(m, n, bq) else {
        return false;
    };
    let k = hs.dimension;
    if k == 0 {
        return false;
    }
    let invertible = |coeffs: &[i64]| {
        (0..m.dims().len()).all(|v| {
            let mut acc = QMatrix::zeros(n.dims()[v], m.dims()[v]);
            for (c, b) in coeffs.iter().zip(&hs.basis) {
                if *c != 0 {
                    acc = &acc + &b[v].scale(&rat(*c));
                }
            }
            acc.is_invertible()
        })
    };
    for i in 0..k {
        let mut e = vec![0; k];
        e[i] = 1;
        if invertible(&e) {
            return true;
        }
    }
    let side = m.total_dimension() as u64 + 1;
    if side.checked_pow(k as u32).is_some_and(|s| s <= SWEEP_LIMIT) {
        let total = side.pow(k as u32);
        (0..total).any(|mut idx| {
            let coeffs: Vec<i64> = (0..k)
                .map(|_| {
                    let c = (idx % side) as i64;
                    idx /= side;
                    c
                })
                .collect();
            invertible(&coeffs)
        })
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
        (0..RANDOM_TRIALS).any(|_| {
            let coeffs: Vec<i64> = (0..k).map(|_| rng.gen_range(-1000..=1000)).collect();
            invertible(&coeffs)
        })
    }
}

/// Largest absolute entry over all matrices of the catalog.
pub fn max_abs_entry(catalog: &ModuleCatalog) -> Rational {
    catalog
        .modules
        .iter()
        .flat_map(|m| m.matrices().iter().map(QMatrix::max_abs_entry))
        .max()
        .unwrap_or_else(Rational::zero)
        .abs()
}
