//! Triangulated cube-surface meshes.
//!
//! The surface of a cube is the standard example of a space that is not a
//! smooth manifold yet carries curvature bounds; the mesh lets the graph
//! machinery probe it at a chosen refinement.

use std::collections::{BTreeSet, HashMap};

use crate::error::{GeometryError, Result};
use crate::spaces::graph::MetricGraph;

/// Builds the triangulated surface of the cube `[0, edge]^3` with a
/// `2^level x 2^level` grid per face (so `4^level` cells per face).
///
/// Each grid quad is split along its `(i, j) -> (i+1, j+1)` diagonal; edge
/// weights are Euclidean chord lengths in the ambient embedding. Vertices
/// shared across face boundaries are identified, so every level-`L` path is
/// realizable at level `L + 1` with the same length.
///
/// Returns the mesh and the conservative additive error bound
/// `edge * 2^(1 - level)` recorded for the handle.
pub fn build_cube_mesh(edge: f64, level: u32) -> Result<(MetricGraph, f64)> {
    if !(edge.is_finite() && edge > 0.0) {
        return Err(GeometryError::OutOfRange { what: "cube edge", value: edge, min: 0.0, max: f64::INFINITY });
    }
    let n = 1usize << level;
    let h = edge / n as f64;
    // Reuse exact grid coordinates so shared boundary vertices dedupe bit-exactly.
    let grid = |i: usize| if i == n { edge } else { i as f64 * h };

    let mut index: HashMap<[u64; 3], usize> = HashMap::new();
    let mut coords: Vec<[f64; 3]> = Vec::new();
    let mut edge_set: BTreeSet<(usize, usize)> = BTreeSet::new();

    let vertex = |p: [f64; 3], coords: &mut Vec<[f64; 3]>, index: &mut HashMap<[u64; 3], usize>| {
        let key = [p[0].to_bits(), p[1].to_bits(), p[2].to_bits()];
        *index.entry(key).or_insert_with(|| {
            coords.push(p);
            coords.len() - 1
        })
    };

    // Faces in a fixed order: (fixed axis, fixed value), free axes (u, v).
    let faces: [(usize, f64, usize, usize); 6] = [
        (2, 0.0, 0, 1),
        (2, edge, 0, 1),
        (1, 0.0, 0, 2),
        (1, edge, 0, 2),
        (0, 0.0, 1, 2),
        (0, edge, 1, 2),
    ];

    for &(fixed, value, ua, va) in &faces {
        let at = |i: usize, j: usize| {
            let mut p = [0.0f64; 3];
            p[fixed] = value;
            p[ua] = grid(i);
            p[va] = grid(j);
            p
        };
        let mut ids = vec![vec![0usize; n + 1]; n + 1];
        for (i, row) in ids.iter_mut().enumerate() {
            for (j, slot) in row.iter_mut().enumerate() {
                *slot = vertex(at(i, j), &mut coords, &mut index);
            }
        }
        for i in 0..n {
            for j in 0..n {
                let quad = [ids[i][j], ids[i + 1][j], ids[i][j + 1], ids[i + 1][j + 1]];
                for (u, v) in [
                    (quad[0], quad[1]),
                    (quad[0], quad[2]),
                    (quad[1], quad[3]),
                    (quad[2], quad[3]),
                    (quad[0], quad[3]), // diagonal
                ] {
                    edge_set.insert((u.min(v), u.max(v)));
                }
            }
        }
    }

    let chord = |u: usize, v: usize| {
        let a = coords[u];
        let b = coords[v];
        ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2)).sqrt()
    };
    let edges: Vec<(usize, usize, f64)> = edge_set.iter().map(|&(u, v)| (u, v, chord(u, v))).collect();
    let graph = MetricGraph::new(coords, edges)?;
    let certified = edge * (2.0f64).powi(1 - level as i32);
    Ok((graph, certified))
}
