//! Theories built from finite group actions, with brute-force counting oracles.

mod build;
mod equip;
mod group;

pub use build::{
    build_bundle, build_bundle_unverified, build_center_algebra, build_graph_frobenius,
    crosscap_candidate, phi_action, regular_cover, search_crosscap, CoverSpaces, CrosscapSearch,
};
pub use equip::{
    film_phi, film_phi_count, film_phi_orbit_sum, involution_map, AutConvention, Equipment,
    EquipmentBasis, GroupCover, PreparedFilm,
};
pub use group::{FiniteGroup, GroupAction};

/// Every tuple in `0..sizes[0] × 0..sizes[1] × ...`, last digit fastest.
pub(crate) fn odometer(sizes: &[usize]) -> impl Iterator<Item = Vec<usize>> {
    equip::Odometer::new(sizes)
}
