use std::f64::consts::TAU;
use std::io::{self, Write};
use std::ops::Range;

use serde::Serialize;

use super::Geometry;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct InterfaceEdge {
    pub nodes: [usize; 2],
    pub arc: usize,
}

/// Conforming triangulation with `Γ` and `∂Ω` resolved by mesh edges.
#[derive(Debug, Clone, Serialize)]
pub struct Mesh {
    pub vertices: Vec<[f64; 2]>,
    pub triangles: Vec<[usize; 3]>,
    pub interface_edges: Vec<InterfaceEdge>,
    pub boundary_edges: Vec<[usize; 2]>,
    interface_nodes: Range<usize>,
    boundary_nodes: Range<usize>,
}

pub(crate) fn signed_area(a: [f64; 2], b: [f64; 2], c: [f64; 2]) -> f64 {
    0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]))
}

impl Mesh {
    /// Structured polar triangulation.
    ///
    /// Vertices sit on concentric rings around the origin: `⌈R/h⌉` rings inside the
    /// interface and `⌈(1−R)/h⌉` in the annulus, with ring `r` carrying about `2πr/h`
    /// equally spaced nodes starting at angle 0. The interface ring refines every
    /// geometry segment into the same number of mesh edges, so arc boundaries are
    /// mesh nodes. Adjacent rings are stitched by merging their angle sequences.
    pub fn polar(geometry: &Geometry, mesh_size: f64) -> Result<Self> {
        if !(mesh_size.is_finite() && mesh_size > 0.0) {
            return Err(Error::validation(format!(
                "mesh size must be > 0, got {mesh_size}"
            )));
        }
        let h = mesh_size;
        let radius = geometry.interface_radius();
        let outer = geometry.outer_radius();
        let segments = geometry.num_interface_segments();
        let refine = ((TAU * radius / (segments as f64 * h)).ceil() as usize).max(1);
        let interface_count = segments * refine;

        let inner_rings = ((radius / h).ceil() as usize).max(1);
        let outer_rings = (((outer - radius) / h).ceil() as usize).max(1);

        let ring_count = |r: f64| ((TAU * r / h).ceil() as usize).max(6);
        let mut rings: Vec<(f64, usize)> = Vec::with_capacity(inner_rings + outer_rings);
        for i in 1..inner_rings {
            let r = radius * i as f64 / inner_rings as f64;
            rings.push((r, ring_count(r)));
        }
        rings.push((radius, interface_count));
        for i in 1..=outer_rings {
            let r = radius + (outer - radius) * i as f64 / outer_rings as f64;
            rings.push((r, ring_count(r)));
        }

        let mut vertices = vec![[0.0, 0.0]];
        let mut starts = Vec::with_capacity(rings.len());
        for &(r, count) in &rings {
            starts.push(vertices.len());
            vertices.extend((0..count).map(|k| {
                let t = TAU * k as f64 / count as f64;
                [r * t.cos(), r * t.sin()]
            }));
        }

        let mut triangles = Vec::new();
        let mut push = |tri: [usize; 3], verts: &[[f64; 2]]| -> Result<()> {
            let area = signed_area(verts[tri[0]], verts[tri[1]], verts[tri[2]]);
            let tri = if area < 0.0 {
                [tri[0], tri[2], tri[1]]
            } else {
                tri
            };
            if area.abs() <= 1e-14 * h * h {
                return Err(Error::Mesh(format!("degenerate triangle {tri:?}")));
            }
            triangles.push(tri);
            Ok(())
        };

        let (first_start, first_count) = (starts[0], rings[0].1);
        for k in 0..first_count {
            push(
                [0, first_start + k, first_start + (k + 1) % first_count],
                &vertices,
            )?;
        }
        for w in 0..rings.len() - 1 {
            let (a0, p) = (starts[w], rings[w].1);
            let (b0, q) = (starts[w + 1], rings[w + 1].1);
            let (mut i, mut j) = (0, 0);
            while i < p || j < q {
                let next_inner = TAU * (i + 1) as f64 / p as f64;
                let next_outer = TAU * (j + 1) as f64 / q as f64;
                if j == q || (i < p && next_inner <= next_outer) {
                    push([a0 + i, a0 + (i + 1) % p, b0 + j % q], &vertices)?;
                    i += 1;
                } else {
                    push([a0 + i % p, b0 + j, b0 + (j + 1) % q], &vertices)?;
                    j += 1;
                }
            }
        }

        let iface = inner_rings - 1;
        let i0 = starts[iface];
        let interface_edges = (0..interface_count)
            .map(|k| InterfaceEdge {
                nodes: [i0 + k, i0 + (k + 1) % interface_count],
                arc: geometry.arc_of_segment(k / refine),
            })
            .collect();
        let last = rings.len() - 1;
        let (b0, bcount) = (starts[last], rings[last].1);
        let boundary_edges = (0..bcount)
            .map(|k| [b0 + k, b0 + (k + 1) % bcount])
            .collect();

        Ok(Self {
            vertices,
            triangles,
            interface_edges,
            boundary_edges,
            interface_nodes: i0..i0 + interface_count,
            boundary_nodes: b0..b0 + bcount,
        })
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    /// Contiguous index range of the vertices on `Γ`.
    pub fn interface_nodes(&self) -> Range<usize> {
        self.interface_nodes.clone()
    }

    /// Contiguous index range of the vertices on `∂Ω`.
    pub fn boundary_nodes(&self) -> Range<usize> {
        self.boundary_nodes.clone()
    }

    pub fn min_triangle_area(&self) -> f64 {
        self.triangles
            .iter()
            .map(|t| {
                signed_area(
                    self.vertices[t[0]],
                    self.vertices[t[1]],
                    self.vertices[t[2]],
                )
            })
            .fold(f64::INFINITY, f64::min)
    }

    /// Writes the plain-text listing, one record per line:
    ///
    /// ```text
    /// v <index> <x> <y>
    /// t <index> <v0> <v1> <v2>
    /// i <v0> <v1> <arc>
    /// b <v0> <v1>
    /// ```
    ///
    /// preceded by a `# <kind> <count>` header per block.
    pub fn write_text<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "# vertices {}", self.vertices.len())?;
        for (i, v) in self.vertices.iter().enumerate() {
            writeln!(w, "v {i} {:.17e} {:.17e}", v[0], v[1])?;
        }
        writeln!(w, "# triangles {}", self.triangles.len())?;
        for (i, t) in self.triangles.iter().enumerate() {
            writeln!(w, "t {i} {} {} {}", t[0], t[1], t[2])?;
        }
        writeln!(w, "# interface_edges {}", self.interface_edges.len())?;
        for e in &self.interface_edges {
            writeln!(w, "i {} {} {}", e.nodes[0], e.nodes[1], e.arc)?;
        }
        writeln!(w, "# boundary_edges {}", self.boundary_edges.len())?;
        for e in &self.boundary_edges {
            writeln!(w, "b {} {}", e[0], e[1])?;
        }
        Ok(())
    }
}
