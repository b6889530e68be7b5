//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
//! fails.

use std::collections::{BTreeMap, BTreeSet};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use greenhom_core::algebra::{cyclic_derivatives, generators_match_up_to_scalar, Potential, Relation};
use greenhom_core::green::{enumerate_from, enumerate_mgs, SearchBounds, SearchState, SpectrumReport};
use greenhom_core::modules::{enumerate_schurian, enumerate_thin_schurian, DEFAULT_BUDGET};
use greenhom_core::orthogonality::{
    enumerate_mfho, verify_igusa_correspondence, verify_theorem, CorrespondenceBounds, HomMatrix,
    DEFAULT_MFHO_BUDGET,
};
use greenhom_core::problem::{load_preset, ProblemFile};
use greenhom_core::quiver::{IceQuiver, Quiver};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(t: Instant, limit: Duration) -> Result<Duration, String> {
    let e = t.elapsed();
    ensure(e < limit, || format!("took {e:.2?}, limit {limit:?}"))?;
    Ok(e)
}

fn preset(name: &str) -> ProblemFile {
    load_preset(name).expect("preset parses")
}

fn mutation_involution() -> Outcome {
    let t = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for trial in 0..1000 {
        let n = rng.gen_range(1..=6);
        let mut arrows = Vec::new();
        for i in 1..=n {
            for j in (i + 1)..=n {
                let m: i32 = rng.gen_range(-2..=2);
                if m > 0 {
                    arrows.push((i, j, m as u32));
                } else if m < 0 {
                    arrows.push((j, i, (-m) as u32));
                }
            }
        }
        let q = IceQuiver::new(n, &BTreeSet::new(), &arrows).map_err(|e| e.to_string())?;
        let l = rng.gen_range(1..=n);
        let back = q.mutate(l).and_then(|x| x.mutate(l)).map_err(|e| e.to_string())?;
        ensure(back == q, || format!("trial {trial}: mu_{l} mu_{l} != id on {q}"))?;
    }
    let e = within(t, Duration::from_secs(5))?;
    Ok(format!("1000 trials in {e:.2?}"))
}

fn sign_coherence() -> Outcome {
    let t = Instant::now();
    let mut report = Vec::new();
    for name in ["a3", "example33"] {
        let q = preset(name).quiver;
        let mut states = 0u64;
        let mut violations = 0u64;
        let mut check = |s: &IceQuiver| {
            states += 1;
            let bad = match s.c_matrix() {
                Ok(c) => c
                    .rows()
                    .any(|r| r.iter().all(|&x| x == 0) || (r.iter().any(|&x| x > 0) && r.iter().any(|&x| x < 0))),
                Err(_) => true,
            };
            violations += bad as u64;
        };
        let e = enumerate_from(
            &SearchState::initial(&q),
            SearchBounds::for_vertices(q.vertex_count()),
            usize::MAX,
            &mut check,
        )
        .map_err(|e| format!("{name}: {e}"))?;
        ensure(e.truncated.is_none(), || format!("{name}: search truncated"))?;
        ensure(violations == 0, || format!("{name}: {violations} violating states"))?;
        report.push(format!("{name} {states} states"));
    }
    Ok(format!("{}, 0 violations in {:.2?}", report.join(", "), t.elapsed()))
}

fn a2_oracle() -> Outcome {
    let t = Instant::now();
    let p = preset("a2");
    let e = enumerate_mgs(&p.quiver, SearchBounds::for_vertices(2)).map_err(|e| e.to_string())?;
    let got: BTreeSet<Vec<Vec<i64>>> = e.sequences.iter().map(|s| s.c_vectors.clone()).collect();
    let expected: BTreeSet<Vec<Vec<i64>>> = [
        vec![vec![1, 0], vec![0, 1]],
        vec![vec![0, 1], vec![1, 1], vec![1, 0]],
    ]
    .into_iter()
    .collect();
    ensure(e.sequences.len() == 2, || format!("{} MGS", e.sequences.len()))?;
    let lengths: BTreeSet<usize> = e.sequences.iter().map(|s| s.length).collect();
    ensure(lengths == [2, 3].into(), || format!("lengths {lengths:?}"))?;
    ensure(got == expected, || format!("c-vectors {got:?}"))?;

    let c = enumerate_thin_schurian(&p.algebra);
    let hm = HomMatrix::compute(&c).map_err(|e| e.to_string())?;
    let m = enumerate_mfho(&c, &hm, DEFAULT_MFHO_BUDGET).map_err(|e| e.to_string())?;
    ensure(m.sequences.len() == 2, || format!("{} MFHO", m.sequences.len()))?;
    let dims: BTreeSet<Vec<Vec<i64>>> = m
        .sequences
        .iter()
        .map(|s| s.dim_vectors.iter().map(|d| d.iter().map(|&x| x as i64).collect()).collect())
        .collect();
    ensure(dims == expected, || format!("MFHO dimension vectors {dims:?}"))?;
    let e = within(t, Duration::from_secs(1))?;
    Ok(format!("2 MGS = 2 MFHO in {e:.2?}"))
}

fn example_spectrum() -> Outcome {
    let t = Instant::now();
    let q = preset("example33").quiver;
    let e = enumerate_mgs(&q, SearchBounds { max_len: 12, max_states: 10_000_000 }).map_err(|e| e.to_string())?;
    ensure(e.truncated.is_none(), || format!("truncated: {:?}", e.truncated))?;
    let s = SpectrumReport::from_sequences(&e.sequences);
    ensure(s.min == 5 && s.max == 11, || format!("p={} m={}", s.min, s.max))?;
    let el = within(t, Duration::from_secs(600))?;
    Ok(format!("count={} p=5 m=11 in {el:.2?}", s.count))
}

fn example_catalog() -> Outcome {
    let t = Instant::now();
    let p = preset("example33");
    let thin = enumerate_thin_schurian(&p.algebra);
    ensure(thin.len() == 12, || format!("{} thin modules", thin.len()))?;
    let full = enumerate_schurian(&p.algebra, 2, 3, DEFAULT_BUDGET).map_err(|e| e.to_string())?;
    ensure(full.dimension_vectors() == thin.dimension_vectors(), || {
        format!("max_entry=2 gives {} modules: {:?}", full.len(), full.dimension_vectors())
    })?;
    Ok(format!("12 thin, max_entry=2 adds 0 in {:.2?}", t.elapsed()))
}

fn correspondence() -> Outcome {
    let t = Instant::now();
    let mut parts = Vec::new();
    for name in ["a2", "a3", "example33"] {
        let p = preset(name);
        let bounds = CorrespondenceBounds::for_vertices(p.quiver.vertex_count());
        let r = verify_igusa_correspondence(&p.quiver, &p.algebra, &bounds).map_err(|e| format!("{name}: {e}"))?;
        ensure(r.equal, || {
            format!(
                "{name}: {} only as MGS, {} only as MFHO",
                r.only_in_mgs.len(),
                r.only_in_mfho.len()
            )
        })?;
        parts.push(format!("{name} {}={}", r.mgs_count, r.mfho_count));
    }
    Ok(format!("{} in {:.2?}", parts.join(", "), t.elapsed()))
}

fn theorem_pipeline() -> Outcome {
    let t = Instant::now();
    let p = preset("example33");
    let mgs = enumerate_mgs(&p.quiver, SearchBounds::for_vertices(4)).map_err(|e| e.to_string())?;
    ensure(mgs.truncated.is_none(), || "MGS search truncated".into())?;
    let longest = mgs.sequences.iter().map(|s| s.length).max().unwrap_or(0);
    let c = enumerate_thin_schurian(&p.algebra);
    let hm = HomMatrix::compute(&c).map_err(|e| e.to_string())?;
    let mut lens = BTreeMap::new();
    for (name, want) in [("Bprime", 11), ("B", 8)] {
        let spec = p.b_specs.get(name).ok_or(format!("no b_spec {name}"))?;
        let r = verify_theorem(spec, &c, &hm, &mgs.sequences).map_err(|e| e.to_string())?;
        ensure(r.holds, || format!("{name}: {:?}", r.discrepancies))?;
        ensure(r.ordering.len() == want, || format!("{name}: length {}", r.ordering.len()))?;
        let (k, _) = r.matched_mgs.clone().ok_or(format!("{name}: no MGS"))?;
        lens.insert(name, (r.ordering.len(), k + 1));
    }
    let (bp, kp) = lens["Bprime"];
    ensure(bp == longest, || format!("B' length {bp} but longest MGS {longest}"))?;
    ensure(lens["B"].0 < bp, || "8 < 11 fails".into())?;
    Ok(format!(
        "B' length 11 = MGS #{kp} (longest), B length 8 = MGS #{}, in {:.2?}",
        lens["B"].1,
        t.elapsed()
    ))
}

fn hom_oracle() -> Outcome {
    let p = preset("a2");
    let c = enumerate_thin_schurian(&p.algebra);
    let idx = |d: [usize; 2]| c.position_of_dims(&d).ok_or(format!("{d:?} missing"));
    let (s1, s2, x) = (idx([1, 0])?, idx([0, 1])?, idx([1, 1])?);
    let hm = HomMatrix::compute(&c).map_err(|e| e.to_string())?;
    let table = [
        ("S1", s1, "X", x, 1),
        ("X", x, "S1", s1, 0),
        ("X", x, "S2", s2, 1),
        ("S2", s2, "X", x, 0),
        ("S1", s1, "S2", s2, 0),
        ("S2", s2, "S1", s1, 0),
    ];
    for (a, i, b, j, want) in table {
        ensure(hm.hom(i, j) == want, || format!("dim Hom({a},{b}) = {}, expected {want}", hm.hom(i, j)))?;
    }
    Ok("6/6 off-diagonal entries".into())
}

fn cyclic_derivative_ideal() -> Outcome {
    let q = preset("example33").quiver;
    let w = Potential::parse(&q, "alpha*beta*gamma - delta*eta*gamma").map_err(|e| e.to_string())?;
    let derived = cyclic_derivatives(&q, &w).map_err(|e| e.to_string())?;
    let printed = ["alpha*beta - delta*eta", "eta*gamma", "gamma*delta", "gamma*alpha", "beta*gamma"]
        .iter()
        .map(|r| Relation::parse(&q, r))
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| e.to_string())?;
    ensure(generators_match_up_to_scalar(&derived, &printed), || {
        let shown: Vec<String> = derived.iter().map(|r| r.display(&q).to_string()).collect();
        format!("derivatives {shown:?}")
    })?;
    Ok(format!("{} derivatives = 5 printed generators", derived.len()))
}

fn corpus() -> Vec<(String, Quiver)> {
    let mut out: Vec<(String, Quiver)> = ["a1", "a2", "a3", "example33"]
        .iter()
        .map(|n| (n.to_string(), preset(n).quiver))
        .collect();
    for (name, pairs) in [
        ("a3-sink", vec![(1, 2), (3, 2)]),
        ("a3-source", vec![(2, 1), (2, 3)]),
        ("3-cycle", vec![(1, 2), (2, 3), (3, 1)]),
        ("a4", vec![(1, 2), (2, 3), (3, 4)]),
        ("d4", vec![(1, 2), (1, 3), (1, 4)]),
        ("a2+a2", vec![(1, 2), (3, 4)]),
    ] {
        let n = pairs.iter().map(|&(s, t)| s.max(t)).max().unwrap();
        out.push((name.into(), Quiver::from_pairs(n, &pairs).unwrap()));
    }
    out
}

fn terminal_form() -> Outcome {
    let mut total = 0;
    for (name, q) in corpus() {
        let e = enumerate_mgs(&q, SearchBounds::for_vertices(q.vertex_count())).map_err(|e| format!("{name}: {e}"))?;
        ensure(e.truncated.is_none(), || format!("{name}: truncated"))?;
        for s in &e.sequences {
            let end = IceQuiver::framed(&q).mutate_sequence(&s.vertices).map_err(|e| e.to_string())?;
            let c = end.c_matrix().map_err(|e| e.to_string())?;
            ensure(c.is_negative_permutation(), || format!("{name}: {:?} ends at {:?}", s.vertices, c.to_rows()))?;
        }
        total += e.sequences.len();
    }
    Ok(format!("{total} MGS over {} quivers, 0 violations", corpus().len()))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("mutation involution", mutation_involution),
        ("sign coherence", sign_coherence),
        ("A2 exhaustive oracle", a2_oracle),
        ("example MGS spectrum", example_spectrum),
        ("example module catalog", example_catalog),
        ("MGS / hom-orthogonal correspondence", correspondence),
        ("tilted-algebra pipeline", theorem_pipeline),
        ("A2 hom table", hom_oracle),
        ("cyclic derivatives", cyclic_derivative_ideal),
        ("MGS terminal form", terminal_form),
    ];
    let mut failed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        match run() {
            Ok(detail) => println!("PASS {:>2}. {name}: {detail}", k + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {:>2}. {name}: {detail}", k + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
