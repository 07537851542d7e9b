//! Sharp-interface reference values: mask perimeters, Steiner trees and the
//! relaxed connected perimeter `P(E) + 2·St(E)`.

mod contour;
mod reference;
mod steiner;

pub use contour::{extract_contours, perimeter_of_mask, ContourSet, Point};
pub use reference::{
    component_contours, connected_perimeter_reference, mst_upper_bound, set_distance,
    simply_connected_reference, ConnectedPerimeter, SimplyConnectedPerimeter,
};
pub use steiner::{
    dist, fermat_point, mst, steiner_length, steiner_or_mst, SteinerResult, MAX_TERMINALS,
};
