//! Cyclic foams: a film surface whose disks are glued into larger colored
//! patches, each a compact surface that may carry free boundary circles
//! and interior marked points.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::graphs::Color;

use super::film::FilmSurface;

/// Local orientation relative to the reference orientation of the patch.
/// On a non-orientable patch the reference is an orientation of the
/// complement of its crosscap cores.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn flip(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }

    pub fn times(self, other: Sign) -> Sign {
        if self == other {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Sign::Plus => '+',
            Sign::Minus => '-',
        }
    }
}

/// A named marked point (interior point, or vertex of a free circle).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Mark {
    pub name: String,
    pub sign: Sign,
}

impl Mark {
    pub fn new(name: impl Into<String>, sign: Sign) -> Self {
        Mark {
            name: name.into(),
            sign,
        }
    }
}

/// A boundary circle of a patch glued to a film disk. `sign` is `Plus`
/// when the disk orientation agrees with the patch orientation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct GluedCircle {
    pub disk: usize,
    pub sign: Sign,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Patch {
    pub color: Color,
    pub orientable: bool,
    pub genus: u32,
    pub crosscaps: u32,
    pub glued: Vec<GluedCircle>,
    /// Free boundary circles; vertices listed in the direction of the
    /// boundary orientation induced by the patch.
    pub free: Vec<Vec<Mark>>,
    pub points: Vec<Mark>,
}

impl Patch {
    /// A disk glued to a film disk with no extra topology.
    pub fn plain(color: Color, disk: usize) -> Self {
        Patch {
            color,
            orientable: true,
            genus: 0,
            crosscaps: 0,
            glued: vec![GluedCircle {
                disk,
                sign: Sign::Plus,
            }],
            free: Vec::new(),
            points: Vec::new(),
        }
    }

    pub fn closed(color: Color) -> Self {
        Patch {
            color,
            orientable: true,
            genus: 0,
            crosscaps: 0,
            glued: Vec::new(),
            free: Vec::new(),
            points: Vec::new(),
        }
    }

    /// A plain disk possibly carrying interior points: it contributes no
    /// extra topology beyond the film disk itself.
    pub fn is_plain(&self) -> bool {
        self.orientable
            && self.genus == 0
            && self.crosscaps == 0
            && self.glued.len() == 1
            && self.free.is_empty()
    }

    pub fn euler_characteristic(&self) -> i64 {
        let h = if self.orientable {
            2 * self.genus as i64
        } else {
            self.crosscaps as i64
        };
        2 - h - (self.glued.len() + self.free.len()) as i64
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CyclicFoam {
    pub film: FilmSurface,
    pub patches: Vec<Patch>,
}

impl CyclicFoam {
    pub fn new(film: FilmSurface, patches: Vec<Patch>) -> Result<Self> {
        let f = CyclicFoam { film, patches };
        f.validate()?;
        Ok(f)
    }

    /// A film surface viewed as a foam whose patches are its disks.
    pub fn from_film(film: FilmSurface) -> Self {
        let patches = film
            .disks()
            .iter()
            .enumerate()
            .map(|(i, d)| Patch::plain(d.color.clone(), i))
            .collect();
        CyclicFoam { film, patches }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidSurface(m));
        let disks = self.film.disks();
        let mut owner: Vec<Option<usize>> = vec![None; disks.len()];
        for (pi, p) in self.patches.iter().enumerate() {
            if p.orientable && p.crosscaps > 0 {
                return bad(format!("patch {pi}: orientable with crosscaps"));
            }
            if !p.orientable && (p.crosscaps == 0 || p.genus > 0) {
                return bad(format!(
                    "patch {pi}: a non-orientable patch is described by crosscaps only"
                ));
            }
            let mut comps = BTreeSet::new();
            for g in &p.glued {
                let Some(d) = disks.get(g.disk) else {
                    return bad(format!("patch {pi}: no disk {}", g.disk));
                };
                if d.color != p.color {
                    return Err(Error::MixedColors(format!(
                        "patch {pi} has color {} but disk {} has color {}",
                        p.color, g.disk, d.color
                    )));
                }
                if owner[g.disk].replace(pi).is_some() {
                    return bad(format!("disk {} lies on two boundary circles", g.disk));
                }
                if !comps.insert(self.film.component_of_disk(g.disk)) {
                    return bad(format!(
                        "patch {pi} meets one seam component along two circles"
                    ));
                }
            }
            if p.free.iter().any(Vec::is_empty) {
                return bad(format!("patch {pi}: a free circle has no vertices"));
            }
        }
        if let Some(d) = owner.iter().position(Option::is_none) {
            return bad(format!("disk {d} is not part of any patch"));
        }
        let mut names: BTreeSet<&str> = self.film.names().iter().map(String::as_str).collect();
        for p in &self.patches {
            for m in p.points.iter().chain(p.free.iter().flatten()) {
                if !names.insert(&m.name) {
                    return bad(format!("name `{}` is used twice", m.name));
                }
            }
        }
        // each color appears once per connected component of the foam
        for comp in self.connected_components() {
            let mut colors = BTreeSet::new();
            for &pi in &comp.patches {
                if !colors.insert(&self.patches[pi].color) {
                    return Err(Error::MixedColors(format!(
                        "color {} labels two patches of one component",
                        self.patches[pi].color
                    )));
                }
            }
        }
        Ok(())
    }

    /// Patch owning film disk `d`, with the index of its glued circle.
    pub fn patch_of_disk(&self, d: usize) -> Option<(usize, usize)> {
        self.patches.iter().enumerate().find_map(|(pi, p)| {
            p.glued
                .iter()
                .position(|g| g.disk == d)
                .map(|gi| (pi, gi))
        })
    }

    pub fn connected_components(&self) -> Vec<FoamComponent> {
        let nc = self.film.components().len();
        let np = self.patches.len();
        // union-find over seam components (0..nc) and patches (nc..nc+np)
        let mut parent: Vec<usize> = (0..nc + np).collect();
        fn find(p: &mut [usize], x: usize) -> usize {
            let mut r = x;
            while p[r] != r {
                r = p[r];
            }
            let mut y = x;
            while p[y] != r {
                let next = p[y];
                p[y] = r;
                y = next;
            }
            r
        }
        for (pi, p) in self.patches.iter().enumerate() {
            for g in &p.glued {
                let c = self.film.component_of_disk(g.disk);
                let (a, b) = (find(&mut parent, c), find(&mut parent, nc + pi));
                parent[a] = b;
            }
        }
        let mut out: Vec<(usize, FoamComponent)> = Vec::new();
        for x in 0..nc + np {
            let r = find(&mut parent, x);
            let idx = match out.iter().position(|(root, _)| *root == r) {
                Some(i) => i,
                None => {
                    out.push((r, FoamComponent::default()));
                    out.len() - 1
                }
            };
            if x < nc {
                out[idx].1.seam_components.push(x);
            } else {
                out[idx].1.patches.push(x - nc);
            }
        }
        out.into_iter().map(|(_, c)| c).collect()
    }

    /// All marked-point names: interior points and free-circle vertices.
    pub fn mark_names(&self) -> Vec<String> {
        self.patches
            .iter()
            .flat_map(|p| p.points.iter().chain(p.free.iter().flatten()))
            .map(|m| m.name.clone())
            .collect()
    }

    /// Names that are free (not already used by a vertex or mark), `base0`, `base1`, ...
    pub fn fresh_names(&self, base: &str, count: usize) -> Vec<String> {
        let used: BTreeSet<String> = self
            .film
            .names()
            .iter()
            .cloned()
            .chain(self.mark_names())
            .collect();
        (0..)
            .map(|i| format!("{base}{i}"))
            .filter(|n| !used.contains(n))
            .take(count)
            .collect()
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FoamComponent {
    pub seam_components: Vec<usize>,
    pub patches: Vec<usize>,
}

/// The film surface underlying a foam: its seam graph with the disks of
/// the patches adjacent to it.
pub fn underlying_film(f: &CyclicFoam) -> FilmSurface {
    f.film.clone()
}
