use std::f64::consts::TAU;
use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Unit disk `Ω` with a concentric interface circle `Γ = ∂D` split into `n`
/// equal arcs `Γ_1, …, Γ_n`, counterclockwise from angle 0.
///
/// The interface polygon has `n · segments_per_arc` vertices on the circle;
/// segment `s` joins vertex `s` and `s + 1` and belongs to arc
/// `s / segments_per_arc`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Geometry {
    outer_radius: f64,
    interface_radius: f64,
    segments_per_arc: usize,
    partition_arcs: Vec<Range<usize>>,
}

impl Geometry {
    pub fn disk(n: usize, interface_radius: f64, segments_per_arc: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::validation(format!("need at least 2 arcs, got {n}")));
        }
        if !(interface_radius > 0.0 && interface_radius < 1.0) {
            return Err(Error::validation(format!(
                "interface radius must lie in (0, 1), got {interface_radius}"
            )));
        }
        if segments_per_arc < 2 {
            return Err(Error::validation(format!(
                "need at least 2 segments per arc, got {segments_per_arc}"
            )));
        }
        let partition_arcs = (0..n)
            .map(|j| j * segments_per_arc..(j + 1) * segments_per_arc)
            .collect();
        Ok(Self {
            outer_radius: 1.0,
            interface_radius,
            segments_per_arc,
            partition_arcs,
        })
    }

    pub fn num_arcs(&self) -> usize {
        self.partition_arcs.len()
    }

    pub fn interface_radius(&self) -> f64 {
        self.interface_radius
    }

    pub fn outer_radius(&self) -> f64 {
        self.outer_radius
    }

    pub fn segments_per_arc(&self) -> usize {
        self.segments_per_arc
    }

    pub fn num_interface_segments(&self) -> usize {
        self.segments_per_arc * self.num_arcs()
    }

    /// Segment index ranges of the arcs; disjoint and covering `0..num_interface_segments()`.
    pub fn partition_arcs(&self) -> &[Range<usize>] {
        &self.partition_arcs
    }

    pub fn arc_of_segment(&self, segment: usize) -> usize {
        segment / self.segments_per_arc
    }

    pub fn interface_polygon(&self) -> Vec<[f64; 2]> {
        circle_polygon(self.interface_radius, self.num_interface_segments())
    }

    pub fn outer_polygon(&self, segments: usize) -> Vec<[f64; 2]> {
        circle_polygon(self.outer_radius, segments)
    }
}

/// Convenience wrapper around [`Geometry::disk`].
pub fn build_disk_geometry(
    n: usize,
    interface_radius: f64,
    segments_per_arc: usize,
) -> Result<Geometry> {
    Geometry::disk(n, interface_radius, segments_per_arc)
}

pub(crate) fn circle_polygon(radius: f64, segments: usize) -> Vec<[f64; 2]> {
    (0..segments)
        .map(|k| {
            let t = TAU * k as f64 / segments as f64;
            [radius * t.cos(), radius * t.sin()]
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_arcs_eight_segments() {
        let g = build_disk_geometry(2, 0.5, 8).unwrap();
        assert_eq!(g.num_interface_segments(), 16);
        assert_eq!(g.partition_arcs(), &[0..8, 8..16]);
        assert_eq!(g.interface_polygon().len(), 16);
    }

    #[test]
    fn four_arcs_four_segments() {
        let g = build_disk_geometry(4, 0.5, 4).unwrap();
        assert_eq!(g.num_arcs(), 4);
        assert!(g.partition_arcs().iter().all(|r| r.len() == 4));
        assert_eq!(g.arc_of_segment(13), 3);
    }

    #[test]
    fn arcs_are_disjoint_and_cover() {
        let g = build_disk_geometry(5, 0.3, 3).unwrap();
        let mut hit = vec![0; g.num_interface_segments()];
        for r in g.partition_arcs() {
            for s in r.clone() {
                hit[s] += 1;
            }
        }
        assert!(hit.iter().all(|&h| h == 1));
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(build_disk_geometry(2, 1.2, 8).is_err());
        assert!(build_disk_geometry(2, 0.0, 8).is_err());
        assert!(build_disk_geometry(1, 0.5, 8).is_err());
        assert!(build_disk_geometry(2, 0.5, 1).is_err());
    }

    #[test]
    fn first_arc_starts_at_angle_zero() {
        let g = build_disk_geometry(3, 0.5, 2).unwrap();
        let p = g.interface_polygon();
        assert_eq!(p[0], [0.5, 0.0]);
        assert!(p[1][1] > 0.0);
    }
}
