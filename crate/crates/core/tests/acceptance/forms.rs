use std::time::{Duration, Instant};

use foamtft::evaluate::Evaluator;
use foamtft::frobenius::{verify_graph_frobenius, GraphFrobeniusData};
use foamtft::graphs::GraphClass;
use foamtft::groupcover::{build_bundle, regular_cover, FiniteGroup};
use foamtft::rational::{q, Q};

use crate::fixtures::{film_corpus, theories, w_abc};
use crate::{within, Outcome};

pub fn trivial_is_one() -> Outcome {
    let start = Instant::now();
    let b = build_bundle(&regular_cover(&["a", "b", "c"], FiniteGroup::trivial()).unwrap(), &w_abc()).map_err(|e| e.to_string())?;
    let ev = Evaluator::new(&b).map_err(|e| e.to_string())?;
    let films = film_corpus(&w_abc(), 5);
    for (seq, _) in &films {
        let labeled: Vec<(GraphClass, Vec<Q>)> = seq.iter().map(|c| (c.clone(), vec![q(1)])).collect();
        let v = ev.eval_film(&labeled).map_err(|e| e.to_string())?;
        if v != q(1) {
            return Err(format!("{seq:?} evaluates to {v}"));
        }
    }
    within(start, Duration::from_secs(1))?;
    Ok(format!("{} composable sequences of length 2 to 5", films.len()))
}

/// Adds one to a nonzero entry of the trilinear form on the least key, or
/// to a pairing entry when `pairing` is set.
fn perturb(g: &GraphFrobeniusData, pairing: bool) -> Option<(GraphFrobeniusData, String)> {
    let mut g = g.clone();
    if pairing {
        let (c, m) = g.form2.iter_mut().next()?;
        m[(0, 0)] += q(1);
        let what = format!("form2 {c} entry (0,0)");
        return Some((g, what));
    }
    let (key, f) = g.form3.iter_mut().find(|(_, f)| !f.is_zero())?;
    let (&idx, _) = f.entries.iter().next()?;
    let v = f.get(idx);
    f.set(idx, v + q(1));
    let names: Vec<String> = key.iter().map(|c| c.to_string()).collect();
    let what = format!("form3 {} entry {idx:?}", names.join(" "));
    Some((g, what))
}

pub fn graph_frobenius_sweep() -> Outcome {
    let mut notes = Vec::new();
    for t in theories() {
        let r = verify_graph_frobenius(&t.bundle.graph).map_err(|e| e.to_string())?;
        if !r.is_ok() {
            return Err(format!("{}: {r}", t.name));
        }
        // every single-entry change of a one-dimensional theory is again valid
        if t.bundle.graph.classes().iter().all(|c| t.bundle.graph.dim(c).unwrap() == 1) {
            notes.push(format!("{} ({} checks, one-dimensional)", t.name, r.checks.len()));
            continue;
        }
        for pairing in [false, true] {
            let (bad, what) = perturb(&t.bundle.graph, pairing).ok_or_else(|| format!("{}: nothing to perturb", t.name))?;
            let r = verify_graph_frobenius(&bad).map_err(|e| e.to_string())?;
            if r.is_ok() {
                return Err(format!("{}: perturbing {what} went unnoticed", t.name));
            }
        }
        notes.push(format!("{} ({} checks)", t.name, r.checks.len()));
    }
    Ok(format!("{}; a perturbed form3 and form2 entry detected in each of higher dimension", notes.join(", ")))
}
