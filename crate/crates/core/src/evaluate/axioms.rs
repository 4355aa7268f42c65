use std::collections::BTreeMap;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::foams::{
    apply_cut, bipartitions, CutResult, CutSpec, CyclicFoam, FilmSurface, InsertionDescriptor,
    InsertionKind, Mark, PatchPart, Sign,
};
use crate::frobenius::GraphCardyBundle;
use crate::linalg::{basis_vector, Matrix};
use crate::rational::Q;
use crate::report::Report;

use super::{normalize_foam, Evaluator, LabeledFoam};

/// The inserted tensor as a list of (coefficient, labels of the new marks).
pub fn insertion_terms(ev: &Evaluator, ins: &InsertionDescriptor) -> Result<Vec<(Q, Vec<Vec<Q>>)>> {
    let b = ev.bundle;
    let pairs = |m: &Matrix| -> Vec<(Q, Vec<Vec<Q>>)> {
        let mut out = Vec::new();
        for i in 0..m.rows() {
            for j in 0..m.cols() {
                let c = &m[(i, j)];
                if !c.is_zero() {
                    out.push((c.clone(), vec![basis_vector(m.rows(), i), basis_vector(m.cols(), j)]));
                }
            }
        }
        out
    };
    Ok(match &ins.kind {
        InsertionKind::Crosscap(s) => vec![(Q::from_integer(1.into()), vec![ev.cardy(s)?.u.clone()])],
        InsertionKind::CasimirA(s) => pairs(&b.closed_algebra(s)?.copairing()?),
        InsertionKind::CasimirB(s) => pairs(&ev.cardy(s)?.b.copairing()?),
        InsertionKind::CasimirGraph(c) => pairs(&b.graph.copairing(c)?),
    })
}

/// `Φ` of a cut foam with the cut's tensor summed in at its new marks.
pub fn cut_value(ev: &Evaluator, lf: &LabeledFoam, cut: &CutResult) -> Result<Q> {
    let mut total = Q::zero();
    let mut labeled = LabeledFoam::new(cut.foam.clone(), lf.labels.clone());
    for (c, xs) in insertion_terms(ev, &cut.insertion)? {
        for (name, x) in cut.insertion.slots.iter().zip(xs) {
            labeled.labels.insert(name.clone(), x);
        }
        total += c * ev.eval_foam(&labeled)?;
    }
    Ok(total)
}

fn subsets(n: usize) -> impl Iterator<Item = Vec<usize>> {
    (0u32..1 << n).map(move |mask| (0..n).filter(|&i| mask & (1 << i) != 0).collect())
}

/// Content splits of a patch: every subset of points, free circles and
/// glued circles with every share of the topology. `skip_free` is left out.
fn sides(f: &CyclicFoam, patch: usize, skip_free: Option<usize>) -> Vec<PatchPart> {
    let p = &f.patches[patch];
    let free: Vec<usize> = (0..p.free.len()).filter(|&i| Some(i) != skip_free).collect();
    let items = p.points.len() + free.len() + p.glued.len();
    if items > 6 {
        return Vec::new();
    }
    let mut out = Vec::new();
    for pick in subsets(items) {
        let mut part = PatchPart::default();
        for i in pick {
            if i < p.points.len() {
                part.points.push(i);
            } else if i < p.points.len() + free.len() {
                part.free.push(free[i - p.points.len()]);
            } else {
                part.glued.push(i - p.points.len() - free.len());
            }
        }
        if p.orientable {
            for g in 0..=p.genus {
                out.push(PatchPart { genus: g, ..part.clone() });
            }
        } else {
            for k in 0..=p.crosscaps {
                out.push(PatchPart { crosscaps: k, ..part.clone() });
            }
        }
    }
    out
}

/// Every cut of every kind that applies to the foam.
pub fn admissible_cuts(f: &CyclicFoam) -> Vec<CutSpec> {
    let mut out = Vec::new();
    for (pi, p) in f.patches.iter().enumerate() {
        if p.crosscaps > 0 {
            out.push(CutSpec::CrosscapCore { patch: pi });
        }
        if (p.orientable && p.genus > 0) || (!p.orientable && p.crosscaps >= 2) {
            out.push(CutSpec::HandleContour { patch: pi });
        }
        for side in sides(f, pi, None) {
            out.push(CutSpec::SeparatingContour { patch: pi, side });
        }
        for (ci, c) in p.free.iter().enumerate() {
            let m = c.len();
            for from in 0..=m {
                for to in from..=m {
                    for side in sides(f, pi, Some(ci)) {
                        out.push(CutSpec::SegmentSplit {
                            patch: pi,
                            circle: ci,
                            from,
                            to,
                            side,
                        });
                    }
                    if p.crosscaps > 0 {
                        out.push(CutSpec::SegmentCrosscap { patch: pi, circle: ci, from, to });
                    }
                    if p.orientable && p.genus > 0 {
                        out.push(CutSpec::SegmentHandle { patch: pi, circle: ci, from, to });
                    }
                }
            }
            if p.orientable {
                for (cj, d) in p.free.iter().enumerate().filter(|&(cj, _)| cj != ci) {
                    for g0 in 0..=m {
                        for g1 in 0..=d.len() {
                            out.push(CutSpec::SegmentMerge {
                                patch: pi,
                                circles: (ci, cj),
                                gaps: (g0, g1),
                            });
                        }
                    }
                }
            }
        }
    }
    for (ci, comp) in f.film.components().iter().enumerate() {
        for split in bipartitions(comp.len()) {
            for content_left in [true, false] {
                out.push(CutSpec::Graph {
                    component: ci,
                    split,
                    content_left,
                });
            }
        }
    }
    out
}

/// Disjoint union; names of the second foam get `suffix` appended.
pub fn disjoint_union(a: &LabeledFoam, b: &LabeledFoam, suffix: &str) -> Result<LabeledFoam> {
    let mut bf = b.foam.film.clone();
    for v in 0..bf.vertex_count() {
        let n = format!("{}{suffix}", bf.name(v));
        bf.rename_vertex(v, n);
    }
    let (film, offsets) = FilmSurface::disjoint_union(&[a.foam.film.clone(), bf])?;
    let mut patches = a.foam.patches.clone();
    for p in &b.foam.patches {
        let mut p = p.clone();
        for g in &mut p.glued {
            g.disk += offsets[1];
        }
        for m in p.points.iter_mut().chain(p.free.iter_mut().flatten()) {
            m.name = format!("{}{suffix}", m.name);
        }
        patches.push(p);
    }
    let mut labels = a.labels.clone();
    for (k, v) in &b.labels {
        labels.insert(format!("{k}{suffix}"), v.clone());
    }
    Ok(LabeledFoam::new(CyclicFoam::new(film, patches)?, labels))
}

/// Runs the invariance checks over a corpus: topological invariance under
/// cyclic relabeling, non-degeneracy of the pairings, cut invariance for
/// every admissible cut, multiplicativity, marked-point addition and
/// change of local orientation.
pub fn check_axioms(bundle: &GraphCardyBundle, corpus: &[LabeledFoam]) -> Result<Report> {
    let ev = Evaluator::new(bundle)?;
    let mut r = Report::new();

    let mut w = None;
    for c in bundle.graph.classes() {
        let g = bundle.graph.pairing(&c)?;
        if g.rank() < g.rows() || g.rows() != g.cols() {
            w = Some(format!("pairing on {c}"));
            break;
        }
    }
    for (s, a) in &bundle.closed {
        if w.is_none() && a.pairing_matrix().rank() < a.dim() {
            w = Some(format!("pairing on A^{s}"));
        }
    }
    r.record("Non-degeneracy.", w);

    let values: Vec<Q> = corpus
        .iter()
        .map(|lf| {
            lf.check(bundle)?;
            ev.eval_foam(lf)
        })
        .collect::<Result<_>>()?;

    let mut w = None;
    'topo: for (k, lf) in corpus.iter().enumerate() {
        for (ci, comp) in lf.foam.film.components().iter().enumerate() {
            for shift in 1..comp.len() {
                let mut g = lf.clone();
                g.foam.film = lf.foam.film.rotated(ci, shift);
                let v = ev.eval_foam(&g)?;
                if v != values[k] {
                    w = Some(format!("foam {k}, component {ci} rotated by {shift}: {v} != {}", values[k]));
                    break 'topo;
                }
            }
        }
    }
    r.record("Topological invariance.", w);

    let mut w = None;
    let mut cuts = 0usize;
    'cut: for (k, lf) in corpus.iter().enumerate() {
        for spec in admissible_cuts(&lf.foam) {
            let Ok(cut) = apply_cut(&lf.foam, &spec) else { continue };
            cuts += 1;
            let v = cut_value(&ev, lf, &cut)?;
            if v != values[k] {
                w = Some(format!("foam {k}, {spec:?}: {v} != {}", values[k]));
                break 'cut;
            }
        }
    }
    if w.is_none() && cuts == 0 && !corpus.is_empty() {
        w = Some("no admissible cut in the corpus".into());
    }
    r.record("Cut invariance.", w);

    let mut w = None;
    for (k, lf) in corpus.iter().enumerate() {
        let j = (k + 1) % corpus.len();
        let u = disjoint_union(lf, &corpus[j], "'")?;
        let v = ev.eval_foam(&u)?;
        if v != &values[k] * &values[j] {
            w = Some(format!("foams {k} and {j}: {v} != {} * {}", values[k], values[j]));
            break;
        }
    }
    r.record("Multiplicativity.", w);

    let mut w = None;
    'mark: for (k, lf) in corpus.iter().enumerate() {
        for pi in 0..lf.foam.patches.len() {
            let mut g = lf.clone();
            let name = g.foam.fresh_names("p", 1).remove(0);
            let s = g.foam.patches[pi].color.clone();
            g.foam.patches[pi].points.push(Mark::new(&name, Sign::Plus));
            g.labels.insert(name, bundle.closed_algebra(&s)?.unit.clone());
            let v = ev.eval_foam(&g)?;
            if v != values[k] {
                w = Some(format!("foam {k}, unit point on patch {pi}: {v} != {}", values[k]));
                break 'mark;
            }
        }
    }
    r.record("Invariance under addition of a marked point.", w);

    let mut w = None;
    'orient: for (k, lf) in corpus.iter().enumerate() {
        let n = normalize_foam(bundle, lf)?;
        let v = ev.eval_foam(&n)?;
        if v != values[k] {
            w = Some(format!("foam {k} normalized: {v} != {}", values[k]));
            break;
        }
        for pi in 0..lf.foam.patches.len() {
            for mi in 0..lf.foam.patches[pi].points.len() {
                let mut g = lf.clone();
                let s = g.foam.patches[pi].color.clone();
                let m = &mut g.foam.patches[pi].points[mi];
                m.sign = m.sign.flip();
                let name = m.name.clone();
                let x = bundle.closed_algebra(&s)?.star(&lf.labels[&name]);
                g.labels.insert(name.clone(), x);
                let v = ev.eval_foam(&g)?;
                if v != values[k] {
                    w = Some(format!("foam {k}, point {name} flipped: {v} != {}", values[k]));
                    break 'orient;
                }
            }
        }
    }
    r.record("Invariance under a change of local orientations.", w);
    Ok(r)
}

/// Labels every mark and vertex of `f` with a basis vector chosen by `pick`
/// from its dimension.
pub fn label_with(
    bundle: &GraphCardyBundle,
    f: &CyclicFoam,
    mut pick: impl FnMut(usize) -> Vec<Q>,
) -> Result<LabeledFoam> {
    let mut labels = BTreeMap::new();
    for v in 0..f.film.vertex_count() {
        let (class, _, _) = f.film.vertex_graph_at(v)?;
        labels.insert(f.film.name(v).to_string(), pick(bundle.graph.dim(&class)?));
    }
    for p in &f.patches {
        let a = bundle.closed_algebra(&p.color)?.dim();
        for m in &p.points {
            labels.insert(m.name.clone(), pick(a));
        }
        let b = bundle
            .graph
            .dim(&crate::graphs::GraphClass::segment(p.color.clone()))
            .map_err(|_| Error::MissingClass(format!("segment of color {}", p.color)))?;
        for m in p.free.iter().flatten() {
            labels.insert(m.name.clone(), pick(b));
        }
    }
    Ok(LabeledFoam::new(f.clone(), labels))
}
