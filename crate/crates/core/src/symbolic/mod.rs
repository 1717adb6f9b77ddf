//! Baker's-map coding and stadium itinerary partitions.

pub mod exact;
pub mod partition;

pub use exact::{
    baker_decode, baker_encode, brute_force_fixed_points, brute_force_uniformity_total,
    enumerate_fixed_points, exact_uniformity_cells, exact_uniformity_total, is_exactly_periodic, homoclinic_code, periodic_point_exact, periodic_point_from_code,
    Rational, SymbolSequence,
};
pub use partition::{
    entropy_bound, itinerary, stadium_partition, ItineraryPartition, PartitionCell,
    PartitionOptions,
};

use crate::dynamics::Stadium;
use crate::orbits::PeriodicOrbit;

pub fn stadium_itinerary_of_orbit(st: &Stadium, orbit: &PeriodicOrbit) -> String {
    partition::stadium_itinerary_of_orbit(st, &orbit.points)
}
