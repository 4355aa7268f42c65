use std::collections::{BTreeMap, BTreeSet};

use foamtft::evaluate::{admissible_cuts, cut_value, disjoint_union, insertion_terms, label_with, Evaluator, LabeledFoam};
use foamtft::foams::{apply_cut, compose, compose_exhaustive, CutSpec, CyclicFoam, FilmSurface, Mark, Patch, Sign, Split};
use foamtft::frobenius::{twisted_casimir, GraphCardyBundle};
use foamtft::graphs::{Color, GraphClass};
use foamtft::linalg::Matrix;
use foamtft::rational::{q, Q};
use rand_chacha::ChaCha8Rng;

use crate::fixtures::{built, film_corpus, foam_corpus, rng, small_vector, tuples, w_ab, w_abc, Theory};
use crate::Outcome;

type R<T> = Result<T, String>;

fn err(e: foamtft::Error) -> String {
    e.to_string()
}

fn labeled(b: &GraphCardyBundle, f: &CyclicFoam, r: &mut ChaCha8Rng) -> R<LabeledFoam> {
    label_with(b, f, |n| small_vector(r, n)).map_err(err)
}

fn kind(spec: &CutSpec) -> &'static str {
    match spec {
        CutSpec::CrosscapCore { .. } | CutSpec::HandleContour { .. } | CutSpec::SeparatingContour { .. } => "contour",
        CutSpec::SegmentSplit { .. }
        | CutSpec::SegmentMerge { .. }
        | CutSpec::SegmentCrosscap { .. }
        | CutSpec::SegmentHandle { .. } => "segment",
        CutSpec::Graph { .. } => "graph",
    }
}

/// `Φ` after cutting along `first` and then along `second` of the result.
fn two_cuts(ev: &Evaluator, lf: &LabeledFoam, first: &CutSpec, second: impl Fn(&CyclicFoam) -> CutSpec) -> R<Q> {
    let c1 = apply_cut(&lf.foam, first).map_err(err)?;
    let mut total = q(0);
    for (coef, xs) in insertion_terms(ev, &c1.insertion).map_err(err)? {
        let mut l1 = LabeledFoam::new(c1.foam.clone(), lf.labels.clone());
        for (name, x) in c1.insertion.slots.iter().zip(xs) {
            l1.labels.insert(name.clone(), x);
        }
        let c2 = apply_cut(&l1.foam, &second(&l1.foam)).map_err(err)?;
        total += coef * cut_value(ev, &l1, &c2).map_err(err)?;
    }
    Ok(total)
}

fn genus_patch(f: &CyclicFoam) -> usize {
    f.patches.iter().position(|p| p.orientable && p.genus > 0).expect("a patch with a handle")
}

pub fn cut_invariance() -> Outcome {
    let mut kinds: BTreeMap<&str, usize> = BTreeMap::new();
    let mut names = Vec::new();
    for (k, t) in built().enumerate() {
        names.push(t.name);
        let ev = Evaluator::new(&t.bundle).map_err(err)?;
        let mut r = rng(200 + k as u64);
        for (name, foam) in foam_corpus() {
            let lf = labeled(&t.bundle, &foam, &mut r)?;
            let v = ev.eval_foam(&lf).map_err(err)?;
            for spec in admissible_cuts(&foam) {
                let Ok(cut) = apply_cut(&foam, &spec) else { continue };
                let after = cut_value(&ev, &lf, &cut).map_err(err)?;
                if after != v {
                    return Err(format!("{} {name}, {spec:?}: {after} != {v}", t.name));
                }
                *kinds.entry(kind(&spec)).or_default() += 1;
            }
        }
        // handle contour and graph-cut in both orders on the genus-one patch
        let foam = foam_corpus().into_iter().find(|(n, _)| n == "torus").unwrap().1;
        let lf = labeled(&t.bundle, &foam, &mut r)?;
        let v = ev.eval_foam(&lf).map_err(err)?;
        let graph = CutSpec::Graph {
            component: 0,
            split: Split { start: 0, len: 1 },
            content_left: true,
        };
        let handle = |f: &CyclicFoam| CutSpec::HandleContour { patch: genus_patch(f) };
        let a = two_cuts(&ev, &lf, &handle(&foam), |_| graph.clone())?;
        let b = two_cuts(&ev, &lf, &graph, handle)?;
        if a != v || b != v {
            return Err(format!("{} torus: handle then graph {a}, graph then handle {b}, uncut {v}", t.name));
        }
    }
    for needed in ["contour", "segment", "graph"] {
        if !kinds.contains_key(needed) {
            return Err(format!("no {needed} cut in the corpus"));
        }
    }
    let counts: Vec<String> = kinds.iter().map(|(k, n)| format!("{n} {k}")).collect();
    Ok(format!("{} over {}; both cut orders agree on the torus foam", counts.join(", "), names.join(", ")))
}

fn lone(color: &Color, genus: u32, crosscaps: u32, points: &[(&str, Vec<Q>)]) -> LabeledFoam {
    let mut p = Patch::closed(color.clone());
    p.genus = genus;
    p.crosscaps = crosscaps;
    p.orientable = crosscaps == 0;
    p.points = points.iter().map(|(n, _)| Mark::new(*n, Sign::Plus)).collect();
    let foam = CyclicFoam::new(FilmSurface::empty(), vec![p]).unwrap();
    LabeledFoam::new(foam, points.iter().map(|(n, x)| (n.to_string(), x.clone())).collect())
}

pub fn structural_facts() -> Outcome {
    let mut n = 0;
    let mut names = Vec::new();
    for (k, t) in built().enumerate() {
        names.push(t.name);
        let ev = Evaluator::new(&t.bundle).map_err(err)?;
        let mut r = rng(300 + k as u64);
        for (s, a) in &t.bundle.closed {
            let torus = ev.eval_foam(&lone(s, 1, 0, &[])).map_err(err)?;
            if torus != q(a.dim() as i64) {
                return Err(format!("{} {s}: torus {torus}, dim A = {}", t.name, a.dim()));
            }
            let klein = ev.eval_foam(&lone(s, 0, 2, &[])).map_err(err)?;
            let expected = a.l(&twisted_casimir(a).map_err(err)?);
            if klein != expected {
                return Err(format!("{} {s}: Klein bottle {klein}, l(K_A*) = {expected}", t.name));
            }
            for _ in 0..5 {
                let x: Vec<Vec<Q>> = (0..3).map(|_| small_vector(&mut r, a.dim())).collect();
                let sphere = lone(s, 0, 0, &[("p1", x[0].clone()), ("p2", x[1].clone()), ("p3", x[2].clone())]);
                let v = ev.eval_foam(&sphere).map_err(err)?;
                let expected = a.l(&a.mul(&a.mul(&x[0], &x[1]), &x[2]));
                if v != expected {
                    return Err(format!("{} {s}: three-point sphere {v}, l(a1a2a3) = {expected}", t.name));
                }
            }
            n += 1;
        }
    }
    Ok(format!("{n} colors over {}", names.join(", ")))
}

/// The foam corpus and every film over the working set up to four vertices.
fn invariance_corpus(t: &Theory, r: &mut ChaCha8Rng) -> R<Vec<LabeledFoam>> {
    let mut out = Vec::new();
    if t.bundle.closed.len() == 3 {
        for (_, f) in foam_corpus() {
            out.push(labeled(&t.bundle, &f, r)?);
        }
    }
    for (_, film) in film_corpus(&t.working, 4) {
        out.push(labeled(&t.bundle, &CyclicFoam::from_film(film), r)?);
    }
    Ok(out)
}

fn rotations(ev: &Evaluator, corpus: &[LabeledFoam], values: &[Q]) -> R<usize> {
    let mut n = 0;
    for (lf, v) in corpus.iter().zip(values) {
        for (ci, comp) in lf.foam.film.components().iter().enumerate() {
            for shift in 1..comp.len() {
                let mut g = lf.clone();
                g.foam.film = lf.foam.film.rotated(ci, shift);
                if ev.eval_foam(&g).map_err(err)? != *v {
                    return Err(format!("rotation by {shift} of component {ci} changes {v}"));
                }
                n += 1;
            }
        }
    }
    Ok(n)
}

/// Coordinates of every label in the new bases.
fn relabel(lf: &LabeledFoam, p_inv: &BTreeMap<GraphClass, Matrix>, q_inv: &BTreeMap<Color, Matrix>) -> R<LabeledFoam> {
    let mut out = lf.clone();
    let film = &lf.foam.film;
    for v in 0..film.vertex_count() {
        let class = film.vertex_graph_at(v).map_err(err)?.0;
        let name = film.name(v);
        out.labels.insert(name.to_string(), p_inv[&class].apply(&lf.labels[name]));
    }
    for p in &lf.foam.patches {
        for m in &p.points {
            out.labels.insert(m.name.clone(), q_inv[&p.color].apply(&lf.labels[&m.name]));
        }
        let seg = GraphClass::segment(p.color.clone());
        for m in p.free.iter().flatten() {
            out.labels.insert(m.name.clone(), p_inv[&seg].apply(&lf.labels[&m.name]));
        }
    }
    Ok(out)
}

fn basis_changes(t: &Theory, corpus: &[LabeledFoam], values: &[Q], r: &mut ChaCha8Rng) -> R<()> {
    for round in 0..5 {
        let mut p = BTreeMap::new();
        let mut p_inv = BTreeMap::new();
        for c in t.bundle.graph.classes() {
            let m = Matrix::random_invertible(t.bundle.graph.dim(&c).map_err(err)?, r);
            p_inv.insert(c.clone(), m.inverse().unwrap());
            p.insert(c, m);
        }
        let mut qm = BTreeMap::new();
        let mut q_inv = BTreeMap::new();
        for (s, a) in &t.bundle.closed {
            let m = Matrix::random_invertible(a.dim(), r);
            q_inv.insert(s.clone(), m.inverse().unwrap());
            qm.insert(s.clone(), m);
        }
        let changed = t.bundle.change_basis(&p, &qm).map_err(err)?;
        let ev = Evaluator::new(&changed).map_err(err)?;
        for (lf, v) in corpus.iter().zip(values) {
            let w = ev.eval_foam(&relabel(lf, &p_inv, &q_inv)?).map_err(err)?;
            if w != *v {
                return Err(format!("{} basis change {round}: {w} != {v}", t.name));
            }
        }
    }
    Ok(())
}

/// An interior point on each disk, absorbed at each vertex of the disk.
fn slot_choices(t: &Theory, ev: &Evaluator, r: &mut ChaCha8Rng) -> R<usize> {
    let mut n = 0;
    for (_, film) in film_corpus(&t.working, 4) {
        let x: Vec<Vec<Q>> = (0..film.vertex_count())
            .map(|v| small_vector(r, t.bundle.graph.dim(&film.vertex_graph_at(v).unwrap().0).unwrap()))
            .collect();
        for (d, disk) in film.disks().iter().enumerate() {
            let a = small_vector(r, t.bundle.closed_algebra(&disk.color).map_err(err)?.dim());
            let mut foam = CyclicFoam::from_film(film.clone());
            let pi = foam.patches.iter().position(|p| p.glued.iter().any(|g| g.disk == d)).unwrap();
            foam.patches[pi].points.push(Mark::new("pt", Sign::Plus));
            let mut labels: BTreeMap<String, Vec<Q>> = (0..film.vertex_count()).map(|v| (film.name(v).to_string(), x[v].clone())).collect();
            labels.insert("pt".into(), a.clone());
            let reference = ev.eval_foam(&LabeledFoam::new(foam, labels)).map_err(err)?;
            let slots: BTreeSet<usize> = disk.vertices.iter().copied().collect();
            for v in slots {
                let class = film.vertex_graph_at(v).map_err(err)?.0;
                let mut y = x.clone();
                y[v] = t.bundle.phi_operator(&disk.color, &class, &a).map_err(err)?.apply(&x[v]);
                let w = ev.film_value(&film, &y).map_err(err)?;
                if w != reference {
                    return Err(format!("{}: point on disk {d} absorbed at vertex {v} gives {w}, not {reference}", t.name));
                }
                n += 1;
            }
        }
    }
    Ok(n)
}

fn unions(ev: &Evaluator, corpus: &[LabeledFoam], values: &[Q]) -> R<usize> {
    let n = corpus.len();
    for i in 0..n {
        let j = (i * 7 + 3) % n;
        let u = disjoint_union(&corpus[i], &corpus[j], "'").map_err(err)?;
        let v = ev.eval_foam(&u).map_err(err)?;
        if v != &values[i] * &values[j] {
            return Err(format!("foams {i} and {j}: {v} != {} * {}", values[i], values[j]));
        }
    }
    Ok(n)
}

pub fn invariance_suite() -> Outcome {
    let (mut rot, mut slots, mut unions_n) = (0, 0, 0);
    let mut changed = Vec::new();
    let mut names = Vec::new();
    for (k, t) in built().enumerate() {
        names.push(t.name);
        let mut r = rng(400 + k as u64);
        let ev = Evaluator::new(&t.bundle).map_err(err)?;
        let corpus = invariance_corpus(t, &mut r)?;
        let values: Vec<Q> = corpus.iter().map(|lf| ev.eval_foam(lf)).collect::<Result<_, _>>().map_err(err)?;
        rot += rotations(&ev, &corpus, &values).map_err(|e| format!("{}: {e}", t.name))?;
        slots += slot_choices(t, &ev, &mut r)?;
        unions_n += unions(&ev, &corpus, &values).map_err(|e| format!("{}: {e}", t.name))?;
        // the conjugated theories are dense; keep to the small ones
        if t.bundle.graph.classes().iter().all(|c| t.bundle.graph.dim(c).unwrap() <= 8) {
            basis_changes(t, &corpus, &values, &mut r)?;
            changed.push(t.name);
        }
    }
    if changed.is_empty() {
        return Err("no theory was small enough for the basis changes".into());
    }
    Ok(format!(
        "{rot} rotations, {slots} slot choices, {unions_n} unions over {}; 5 basis changes on {}",
        names.join(", "),
        changed.join(", ")
    ))
}

pub fn compose_uniqueness() -> Outcome {
    let mut counts: BTreeMap<usize, usize> = BTreeMap::new();
    let mut total = 0;
    for w in [w_abc(), w_ab()] {
        for n in 1..=4 {
            for idx in tuples(&vec![w.len(); n]) {
                let seq: Vec<GraphClass> = idx.iter().map(|&i| w[i].clone()).collect();
                let all = compose_exhaustive(&seq).unwrap_or_default();
                let keys: BTreeSet<_> = all.iter().map(|f| f.iso_key()).collect();
                if keys.len() > 1 {
                    return Err(format!("{seq:?} composes to {} surfaces", keys.len()));
                }
                match compose(&seq) {
                    Ok(f) if keys.contains(&f.iso_key()) => {}
                    Ok(_) => return Err(format!("{seq:?}: compose disagrees with the exhaustive search")),
                    Err(_) if keys.is_empty() => {}
                    Err(e) => return Err(format!("{seq:?}: compose fails ({e}) but a surface exists")),
                }
                *counts.entry(keys.len()).or_default() += 1;
                total += 1;
            }
        }
    }
    Ok(format!(
        "{total} sequences, {} composable, none with two surfaces",
        counts.get(&1).copied().unwrap_or(0)
    ))
}
