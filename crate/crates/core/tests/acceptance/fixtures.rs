use std::path::{Path, PathBuf};
use std::sync::OnceLock;

use foamtft::foams::{CyclicFoam, FilmSurface};
use foamtft::frobenius::{composable_sequences, GraphCardyBundle};
use foamtft::graphs::{involute, named, GraphClass};
use foamtft::groupcover::{build_bundle, build_bundle_unverified, regular_cover, AutConvention, FiniteGroup, GroupCover};
use foamtft::rational::{q, Q};
use foamtft::Error;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub struct Theory {
    pub name: &'static str,
    pub cover: GroupCover,
    pub working: Vec<GraphClass>,
    pub bundle: GraphCardyBundle,
    /// Whether the full construction, crosscap included, verified.
    pub built: bool,
}

impl Theory {
    fn new(name: &'static str, palette: &[&str], group: FiniteGroup, working: Vec<GraphClass>) -> Theory {
        let cover = regular_cover(palette, group).unwrap();
        let (bundle, built) = match build_bundle(&cover, &working) {
            Ok(b) => (b, true),
            Err(Error::BundleVerificationFailed(_)) => (build_bundle_unverified(&cover, &working).unwrap(), false),
            Err(e) => panic!("{name}: {e}"),
        };
        Theory {
            name,
            cover,
            working,
            bundle,
            built,
        }
    }

    pub fn with_convention(&self, c: AutConvention) -> GroupCover {
        self.cover.clone().with_convention(c)
    }
}

pub fn theta() -> GraphClass {
    named::theta("a", "b", "c")
}

/// `{I_a, I_b, I_c, θ, θ*}`.
pub fn w_abc() -> Vec<GraphClass> {
    let t = theta();
    vec![named::segment("a"), named::segment("b"), named::segment("c"), involute(&t), t]
}

/// `{I_a, I_b, P}` with `P` the two-edge graph `u ⇉ v`, which is its own involute.
pub fn w_ab() -> Vec<GraphClass> {
    vec![named::segment("a"), named::segment("b"), named::multi_edge(&[("a", true), ("b", true)])]
}

/// Trivial, Z/2, Z/3 and Klein four on three colors, S₃ on two.
pub fn theories() -> &'static [Theory] {
    static T: OnceLock<Vec<Theory>> = OnceLock::new();
    T.get_or_init(|| {
        vec![
            Theory::new("trivial", &["a", "b", "c"], FiniteGroup::trivial(), w_abc()),
            Theory::new("Z2", &["a", "b", "c"], FiniteGroup::cyclic(2), w_abc()),
            Theory::new("Z3", &["a", "b", "c"], FiniteGroup::cyclic(3), w_abc()),
            Theory::new("S3", &["a", "b"], FiniteGroup::symmetric3(), w_ab()),
            Theory::new("K4", &["a", "b", "c"], FiniteGroup::klein4(), w_abc()),
        ]
    })
}

pub fn theory(name: &str) -> &'static Theory {
    theories().iter().find(|t| t.name == name).unwrap()
}

/// The three test groups of the counting checks.
pub fn test_groups() -> Vec<&'static Theory> {
    ["Z2", "Z3", "S3"].into_iter().map(theory).collect()
}

pub fn built() -> impl Iterator<Item = &'static Theory> {
    theories().iter().filter(|t| t.built)
}

/// Every connected film over `w` with 2 to `max` vertices, one per rotation.
pub fn film_corpus(w: &[GraphClass], max: usize) -> Vec<(Vec<GraphClass>, FilmSurface)> {
    (2..=max).flat_map(|n| composable_sequences(w, n)).collect()
}

pub fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

/// The foams of the fixture corpus plus the genus-one patch on the bigon.
pub fn foam_corpus() -> Vec<(String, CyclicFoam)> {
    let mut files: Vec<PathBuf> = std::fs::read_dir(fixture("corpus"))
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "surface"))
        .collect();
    files.sort();
    files.push(fixture("torus.surface"));
    files.push(fixture("chain.surface"));
    let mut out = Vec::new();
    for f in files {
        for nf in foamtft::text::parse_surfaces(&std::fs::read_to_string(&f).unwrap()).unwrap() {
            out.push((nf.name, nf.foam));
        }
    }
    out
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A vector of small integers, never zero.
pub fn small_vector(rng: &mut ChaCha8Rng, n: usize) -> Vec<Q> {
    loop {
        let v: Vec<Q> = (0..n).map(|_| q(rng.gen_range(-2..=2))).collect();
        if v.iter().any(|x| *x != q(0)) {
            return v;
        }
    }
}

/// Every tuple below `sizes`, last coordinate fastest.
pub fn tuples(sizes: &[usize]) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for &n in sizes {
        out = out
            .into_iter()
            .flat_map(|t| {
                (0..n).map(move |i| {
                    let mut t = t.clone();
                    t.push(i);
                    t
                })
            })
            .collect();
    }
    out
}

/// All tuples when there are at most `cap`, else `cap` random ones.
pub fn some_tuples(sizes: &[usize], cap: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<usize>> {
    let total = sizes.iter().try_fold(1usize, |acc, &n| acc.checked_mul(n));
    match total {
        Some(t) if t <= cap => tuples(sizes),
        _ => (0..cap).map(|_| sizes.iter().map(|&n| rng.gen_range(0..n)).collect()).collect(),
    }
}
