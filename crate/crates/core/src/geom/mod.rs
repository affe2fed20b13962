//! Planar primitives generic over the coordinate scalar.

mod disk;
mod minkowski;
mod point;
mod polygon;
mod segment_set;

pub use disk::disk_polygon_area;
pub use minkowski::minkowski_ratio;
pub use point::{Point, Vec2};
pub use polygon::{clip_polygon_halfplane, ClipLine, Polygon, PolygonError};
pub use segment_set::{hausdorff_distance, point_segment_distance, Seg, SegmentSet};
