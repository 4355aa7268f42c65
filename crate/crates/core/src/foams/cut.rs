//! Cutting a foam along a contour, a segment or a graph-cut, recording
//! which distinguished element the cut inserts at the new marks.

use crate::error::{Error, Result};
use crate::graphs::{Color, GraphClass};

use super::film::{graph_cut_named, FilmSurface, Split};
use super::foam::{CyclicFoam, Mark, Patch, Sign};

/// Content of a patch moved to the far side of a separating cut.
/// Indices refer to the patch's `points`, `free` and `glued` lists.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PatchPart {
    pub points: Vec<usize>,
    pub free: Vec<usize>,
    pub glued: Vec<usize>,
    pub genus: u32,
    pub crosscaps: u32,
}

/// Gaps of a free circle with `m` vertices are numbered `0..m`; gap `g`
/// sits just before vertex `g`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CutSpec {
    /// One-sided core curve of a crosscap.
    CrosscapCore { patch: usize },
    /// Non-separating two-sided contour: through a handle, or around a
    /// pair of crosscaps on a non-orientable patch.
    HandleContour { patch: usize },
    /// Separating two-sided contour; `side` is split off as a new patch.
    SeparatingContour { patch: usize, side: PatchPart },
    /// Arc from gap `from` to gap `to` of one free circle, separating the
    /// patch; the arc `from..to` of the circle goes with `side`.
    SegmentSplit {
        patch: usize,
        circle: usize,
        from: usize,
        to: usize,
        side: PatchPart,
    },
    /// Arc joining two different free circles of an orientable patch.
    SegmentMerge {
        patch: usize,
        circles: (usize, usize),
        gaps: (usize, usize),
    },
    /// Arc from a free circle to itself through a crosscap.
    SegmentCrosscap {
        patch: usize,
        circle: usize,
        from: usize,
        to: usize,
    },
    /// Arc from a free circle to itself around a handle.
    SegmentHandle {
        patch: usize,
        circle: usize,
        from: usize,
        to: usize,
    },
    /// Graph-cut of one seam component. Crossing patches keep their extra
    /// content on the left piece when `content_left`, else on the right.
    Graph {
        component: usize,
        split: Split,
        content_left: bool,
    },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum InsertionKind {
    /// The crosscap element `U_s` at one new interior point.
    Crosscap(Color),
    /// `Σ F^{ij} e_i ⊗ e_j` over `A^s` at two new interior points.
    CasimirA(Color),
    /// `Σ F^{ij} b_i ⊗ b_j` over `B^s = B_{I_s}` at two new boundary vertices.
    CasimirB(Color),
    /// The copairing of `B_σ × B_σ*` at the new seam vertices `(q₊, q₋)`.
    CasimirGraph(GraphClass),
}

/// What a cut inserts, and at which new marks (in slot order).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InsertionDescriptor {
    pub kind: InsertionKind,
    pub slots: Vec<String>,
}

#[derive(Clone, Debug)]
pub struct CutResult {
    pub foam: CyclicFoam,
    pub insertion: InsertionDescriptor,
}

pub fn apply_cut(f: &CyclicFoam, spec: &CutSpec) -> Result<CutResult> {
    let bad = |m: &str| Err(Error::InvalidCut(m.to_string()));
    let mut foam = f.clone();
    let patch_mut = |foam: &mut CyclicFoam, p: usize| -> Result<()> {
        if p >= foam.patches.len() {
            return Err(Error::InvalidCut(format!("no patch {p}")));
        }
        Ok(())
    };
    let result = match spec {
        CutSpec::CrosscapCore { patch } => {
            patch_mut(&mut foam, *patch)?;
            let name = foam.fresh_names("u", 1).remove(0);
            let p = &mut foam.patches[*patch];
            if p.crosscaps == 0 {
                return bad("the patch has no crosscap");
            }
            p.crosscaps -= 1;
            p.orientable = p.crosscaps == 0;
            p.points.push(Mark::new(&name, Sign::Plus));
            let color = p.color.clone();
            InsertionDescriptor {
                kind: InsertionKind::Crosscap(color),
                slots: vec![name],
            }
        }
        CutSpec::HandleContour { patch } => {
            patch_mut(&mut foam, *patch)?;
            let names = foam.fresh_names("k", 2);
            let p = &mut foam.patches[*patch];
            let second = if p.orientable {
                if p.genus == 0 {
                    return bad("the patch has no handle");
                }
                p.genus -= 1;
                Sign::Plus
            } else {
                if p.crosscaps < 2 {
                    return bad("a non-separating two-sided contour needs two crosscaps");
                }
                p.crosscaps -= 2;
                p.orientable = p.crosscaps == 0;
                Sign::Minus
            };
            p.points.push(Mark::new(&names[0], Sign::Plus));
            p.points.push(Mark::new(&names[1], second));
            InsertionDescriptor {
                kind: InsertionKind::CasimirA(p.color.clone()),
                slots: names,
            }
        }
        CutSpec::SeparatingContour { patch, side } => {
            patch_mut(&mut foam, *patch)?;
            let names = foam.fresh_names("k", 2);
            let mut new = split_off(&mut foam.patches[*patch], side)?;
            let p = &mut foam.patches[*patch];
            p.points.push(Mark::new(&names[0], Sign::Plus));
            new.points.push(Mark::new(&names[1], Sign::Plus));
            let color = p.color.clone();
            foam.patches.push(new);
            InsertionDescriptor {
                kind: InsertionKind::CasimirA(color),
                slots: names,
            }
        }
        CutSpec::SegmentSplit {
            patch,
            circle,
            from,
            to,
            side,
        } => {
            patch_mut(&mut foam, *patch)?;
            let names = foam.fresh_names("v", 2);
            if side.free.contains(circle) {
                return bad("the split circle cannot be moved whole");
            }
            let c = take_circle(&mut foam.patches[*patch], *circle)?;
            let (from, to) = (*from, *to);
            if from > to || to > c.len() {
                return bad("gaps out of order");
            }
            let mut arc1: Vec<Mark> = c[from..to].to_vec();
            arc1.push(Mark::new(&names[0], Sign::Plus));
            let mut arc2: Vec<Mark> = c[to..].iter().chain(&c[..from]).cloned().collect();
            arc2.push(Mark::new(&names[1], Sign::Plus));
            // indices in `side.free` refer to the list before removal
            let shifted = PatchPart {
                free: side
                    .free
                    .iter()
                    .map(|&i| if i > *circle { i - 1 } else { i })
                    .collect(),
                ..side.clone()
            };
            let mut new = split_off(&mut foam.patches[*patch], &shifted)?;
            new.free.push(arc1);
            foam.patches[*patch].free.push(arc2);
            let color = new.color.clone();
            foam.patches.push(new);
            InsertionDescriptor {
                kind: InsertionKind::CasimirB(color),
                slots: names,
            }
        }
        CutSpec::SegmentMerge {
            patch,
            circles,
            gaps,
        } => {
            patch_mut(&mut foam, *patch)?;
            let names = foam.fresh_names("v", 2);
            let p = &mut foam.patches[*patch];
            if !p.orientable {
                return bad("merging circles is supported on orientable patches");
            }
            if circles.0 == circles.1 {
                return bad("the two circles must differ");
            }
            let (hi, lo) = (circles.0.max(circles.1), circles.0.min(circles.1));
            let c_hi = take_circle(p, hi)?;
            let c_lo = take_circle(p, lo)?;
            let (a, b) = if circles.0 == lo {
                (c_lo, c_hi)
            } else {
                (c_hi, c_lo)
            };
            if gaps.0 > a.len() || gaps.1 > b.len() {
                return bad("gap out of range");
            }
            let mut merged: Vec<Mark> = a[gaps.0..].iter().chain(&a[..gaps.0]).cloned().collect();
            merged.push(Mark::new(&names[0], Sign::Plus));
            merged.extend(b[gaps.1..].iter().chain(&b[..gaps.1]).cloned());
            merged.push(Mark::new(&names[1], Sign::Plus));
            p.free.push(merged);
            InsertionDescriptor {
                kind: InsertionKind::CasimirB(p.color.clone()),
                slots: names,
            }
        }
        CutSpec::SegmentCrosscap {
            patch,
            circle,
            from,
            to,
        } => {
            patch_mut(&mut foam, *patch)?;
            let names = foam.fresh_names("v", 2);
            let p = &mut foam.patches[*patch];
            if p.crosscaps == 0 {
                return bad("the patch has no crosscap");
            }
            let c = take_circle(p, *circle)?;
            if from > to || *to > c.len() {
                return bad("gaps out of order");
            }
            // the arc beyond the crosscap is met against its old direction
            let mut out: Vec<Mark> = c[*from..*to].to_vec();
            out.push(Mark::new(&names[0], Sign::Plus));
            let beyond: Vec<Mark> = c[*to..].iter().chain(&c[..*from]).cloned().collect();
            out.extend(
                beyond
                    .into_iter()
                    .rev()
                    .map(|m| Mark::new(m.name, m.sign.flip())),
            );
            out.push(Mark::new(&names[1], Sign::Plus));
            p.free.push(out);
            p.crosscaps -= 1;
            p.orientable = p.crosscaps == 0;
            InsertionDescriptor {
                kind: InsertionKind::CasimirB(p.color.clone()),
                slots: names,
            }
        }
        CutSpec::SegmentHandle {
            patch,
            circle,
            from,
            to,
        } => {
            patch_mut(&mut foam, *patch)?;
            let names = foam.fresh_names("v", 2);
            let p = &mut foam.patches[*patch];
            if !p.orientable || p.genus == 0 {
                return bad("the patch has no handle");
            }
            let c = take_circle(p, *circle)?;
            if from > to || *to > c.len() {
                return bad("gaps out of order");
            }
            let mut c1: Vec<Mark> = c[*from..*to].to_vec();
            c1.push(Mark::new(&names[0], Sign::Plus));
            let mut c2: Vec<Mark> = c[*to..].iter().chain(&c[..*from]).cloned().collect();
            c2.push(Mark::new(&names[1], Sign::Plus));
            p.free.push(c1);
            p.free.push(c2);
            p.genus -= 1;
            InsertionDescriptor {
                kind: InsertionKind::CasimirB(p.color.clone()),
                slots: names,
            }
        }
        CutSpec::Graph {
            component,
            split,
            content_left,
        } => return cut_graph(f, *component, *split, *content_left),
    };
    foam.validate()?;
    Ok(CutResult {
        foam,
        insertion: result,
    })
}

fn take_circle(p: &mut Patch, i: usize) -> Result<Vec<Mark>> {
    if i >= p.free.len() {
        return Err(Error::InvalidCut(format!("no free circle {i}")));
    }
    Ok(p.free.remove(i))
}

/// Moves `side` out of `p` into a new patch of the same color.
fn split_off(p: &mut Patch, side: &PatchPart) -> Result<Patch> {
    let bad = |m: &str| Err(Error::InvalidCut(m.to_string()));
    let in_range = |v: &[usize], n: usize| {
        let mut s = v.to_vec();
        s.sort();
        s.dedup();
        s.len() == v.len() && s.iter().all(|&i| i < n)
    };
    if !in_range(&side.points, p.points.len())
        || !in_range(&side.free, p.free.len())
        || !in_range(&side.glued, p.glued.len())
    {
        return bad("content indices out of range");
    }
    if p.orientable {
        if side.crosscaps > 0 || side.genus > p.genus {
            return bad("the side has more topology than the patch");
        }
    } else if side.genus > 0 || side.crosscaps > p.crosscaps {
        return bad("the side has more topology than the patch");
    }
    let points = extract(&mut p.points, &side.points);
    let free = extract(&mut p.free, &side.free);
    let glued = extract(&mut p.glued, &side.glued);
    p.genus -= side.genus;
    p.crosscaps -= side.crosscaps;
    let was_orientable = p.orientable;
    p.orientable = p.crosscaps == 0;
    Ok(Patch {
        color: p.color.clone(),
        orientable: was_orientable || side.crosscaps == 0,
        genus: side.genus,
        crosscaps: side.crosscaps,
        glued,
        free,
        points,
    })
}

/// Removes the entries at `idx` from `v`, returning them in order.
fn extract<T>(v: &mut Vec<T>, idx: &[usize]) -> Vec<T> {
    let mut moved = Vec::new();
    let mut keep = Vec::new();
    for (i, x) in std::mem::take(v).into_iter().enumerate() {
        if idx.contains(&i) {
            moved.push(x);
        } else {
            keep.push(x);
        }
    }
    *v = keep;
    moved
}

fn cut_graph(f: &CyclicFoam, ci: usize, split: Split, content_left: bool) -> Result<CutResult> {
    let film = &f.film;
    if ci >= film.components().len() {
        return Err(Error::InvalidCut(format!("no seam component {ci}")));
    }
    let names = f.fresh_names("q", 2);
    let (comp, _, comp_disks) = film.component_surface(ci);
    let cut = graph_cut_named(&comp, split, &names[0], &names[1])?;
    let mut parts = Vec::new();
    let mut origin: Vec<Vec<usize>> = Vec::new();
    for cj in 0..film.components().len() {
        if cj == ci {
            continue;
        }
        let (s, _, disks) = film.component_surface(cj);
        parts.push(s);
        origin.push(disks);
    }
    let (new_film, offsets) = FilmSurface::disjoint_union(
        &parts
            .iter()
            .cloned()
            .chain([cut.left.clone(), cut.right.clone()])
            .collect::<Vec<_>>(),
    )?;
    let mut disk_to_new: Vec<(Option<usize>, Option<usize>)> = vec![(None, None); film.disks().len()];
    for (pi, disks) in origin.iter().enumerate() {
        for (local, &d) in disks.iter().enumerate() {
            disk_to_new[d] = (Some(offsets[pi] + local), None);
        }
    }
    let (lo, ro) = (offsets[parts.len()], offsets[parts.len() + 1]);
    for (local, &d) in comp_disks.iter().enumerate() {
        let (l, r) = cut.disk_map[local];
        disk_to_new[d] = match (l, r) {
            (Some(l), None) => (Some(lo + l), None),
            (None, Some(r)) => (Some(ro + r), None),
            (Some(l), Some(r)) => {
                if content_left {
                    (Some(lo + l), Some(ro + r))
                } else {
                    (Some(ro + r), Some(lo + l))
                }
            }
            (None, None) => unreachable!("every disk lands in a piece"),
        };
    }
    let mut patches = f.patches.clone();
    let mut extra = Vec::new();
    for p in &mut patches {
        for g in &mut p.glued {
            let (keep, other) = disk_to_new[g.disk];
            g.disk = keep.expect("disk mapped");
            if let Some(o) = other {
                let mut plain = Patch::plain(p.color.clone(), o);
                plain.glued[0].sign = g.sign;
                extra.push(plain);
            }
        }
    }
    patches.extend(extra);
    let foam = CyclicFoam::new(new_film, patches)?;
    Ok(CutResult {
        foam,
        insertion: InsertionDescriptor {
            kind: InsertionKind::CasimirGraph(cut.class),
            slots: names,
        },
    })
}
