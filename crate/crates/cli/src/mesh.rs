//! Surface and curve samples of the singularity variety for external plotting.
//!
//! The quadric `Ω(i)` (positions singular at a fixed orientation) is
//! triangulated by marching tetrahedra in an axis-aligned box; the curve
//! `ω(p)` (orientations singular at a fixed position) is traced by marching
//! squares on a latitude/longitude grid of the unit sphere.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use pentapod_core::pentapod::QuadricForm;

#[derive(Debug, Clone, PartialEq)]
pub struct TriangleMesh {
    pub vertices: Vec<[f64; 3]>,
    pub triangles: Vec<[usize; 3]>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Polyline {
    pub points: Vec<[f64; 3]>,
    pub closed: bool,
}

/// Grid nodes at either end of a cut edge, smaller id first.
type EdgeKey = (usize, usize);

// Six tetrahedra around the cube diagonal 0-7; corner bits are (x, y, z).
const TETRAHEDRA: [[usize; 4]; 6] =
    [[0, 1, 3, 7], [0, 3, 2, 7], [0, 2, 6, 7], [0, 6, 4, 7], [0, 4, 5, 7], [0, 5, 1, 7]];

fn lerp(a: &[f64; 3], b: &[f64; 3], s: f64) -> [f64; 3] {
    std::array::from_fn(|k| a[k] + s * (b[k] - a[k]))
}

/// Root in `[0, 1]` of `q(a + s·(b − a))`, which is quadratic in `s` and changes sign.
fn edge_root(q: &QuadricForm<f64>, a: &[f64; 3], b: &[f64; 3], qa: f64, qb: f64) -> f64 {
    let d: [f64; 3] = std::array::from_fn(|k| b[k] - a[k]);
    let alpha = (0..3).map(|k| (0..3).map(|l| q.quad[k][l] * d[k] * d[l]).sum::<f64>()).sum::<f64>();
    let beta = qb - qa - alpha;
    let linear = qa / (qa - qb);
    if alpha.abs() <= 1e-12 * (beta.abs() + qa.abs()) {
        return linear;
    }
    let disc = beta * beta - 4.0 * alpha * qa;
    if disc < 0.0 {
        return linear;
    }
    let t = -0.5 * (beta + beta.signum() * disc.sqrt());
    let candidates = [t / alpha, if t != 0.0 { qa / t } else { f64::NAN }];
    candidates
        .into_iter()
        .filter(|s| (-1e-9..=1.0 + 1e-9).contains(s))
        .map(|s| s.clamp(0.0, 1.0))
        .next()
        .unwrap_or(linear)
}

/// Marching tetrahedra on an `n³` grid over `center ± half_width`.
pub fn mesh_quadric(q: &QuadricForm<f64>, center: [f64; 3], half_width: f64, n: usize) -> TriangleMesh {
    let m = n + 1;
    let node = |a: usize, b: usize, c: usize| (c * m + b) * m + a;
    let coord = |a: usize| -half_width + 2.0 * half_width * a as f64 / n as f64;
    let points: Vec<[f64; 3]> = (0..m * m * m)
        .map(|id| {
            let (a, b, c) = (id % m, (id / m) % m, id / (m * m));
            [center[0] + coord(a), center[1] + coord(b), center[2] + coord(c)]
        })
        .collect();
    let values: Vec<f64> = points.iter().map(|p| q.eval(p)).collect();

    let mut index: BTreeMap<EdgeKey, usize> = BTreeMap::new();
    let mut vertices = Vec::new();
    let mut triangles = Vec::new();
    let mut vertex = |i: usize, j: usize, vertices: &mut Vec<[f64; 3]>| -> usize {
        let key = (i.min(j), i.max(j));
        *index.entry(key).or_insert_with(|| {
            let (a, b) = key;
            let s = edge_root(q, &points[a], &points[b], values[a], values[b]);
            vertices.push(lerp(&points[a], &points[b], s));
            vertices.len() - 1
        })
    };

    for c in 0..n {
        for b in 0..n {
            for a in 0..n {
                let corner: [usize; 8] =
                    std::array::from_fn(|k| node(a + (k & 1), b + ((k >> 1) & 1), c + ((k >> 2) & 1)));
                for tet in TETRAHEDRA {
                    let ids = tet.map(|k| corner[k]);
                    let (inside, outside): (Vec<usize>, Vec<usize>) = ids.iter().partition(|&&id| values[id] > 0.0);
                    match (inside.len(), outside.len()) {
                        (1, 3) | (3, 1) => {
                            let (lone, rest) =
                                if inside.len() == 1 { (inside[0], outside) } else { (outside[0], inside) };
                            let tri = [0, 1, 2].map(|k| vertex(lone, rest[k], &mut vertices));
                            triangles.push(tri);
                        }
                        (2, 2) => {
                            let e00 = vertex(inside[0], outside[0], &mut vertices);
                            let e01 = vertex(inside[0], outside[1], &mut vertices);
                            let e11 = vertex(inside[1], outside[1], &mut vertices);
                            let e10 = vertex(inside[1], outside[0], &mut vertices);
                            triangles.push([e00, e01, e11]);
                            triangles.push([e00, e11, e10]);
                        }
                        _ => {}
                    }
                }
            }
        }
    }
    TriangleMesh { vertices, triangles }
}

fn sphere_point(theta: f64, phi: f64) -> [f64; 3] {
    [theta.sin() * phi.cos(), theta.sin() * phi.sin(), theta.cos()]
}

fn normalize(x: [f64; 3]) -> [f64; 3] {
    let n = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    x.map(|v| v / n)
}

/// Traces `{ i ∈ S² : q(i) = 0 }` on a grid with `m` latitude bands and `2m` longitudes.
pub fn trace_sphere_curve(q: &QuadricForm<f64>, m: usize) -> Vec<Polyline> {
    let cols = 2 * m;
    // both poles collapse to single nodes
    let id = |j: usize, k: usize| match j {
        0 => 0,
        _ if j == m => 1,
        _ => 2 + (j - 1) * cols + k % cols,
    };
    let node_point =
        |j: usize, k: usize| sphere_point(PI * j as f64 / m as f64, 2.0 * PI * (k % cols) as f64 / cols as f64);
    let mut point_of: BTreeMap<usize, [f64; 3]> = BTreeMap::new();
    for j in 0..=m {
        for k in 0..cols {
            point_of.entry(id(j, k)).or_insert_with(|| node_point(j, k));
        }
    }
    let value: BTreeMap<usize, f64> = point_of.iter().map(|(k, p)| (*k, q.eval(p))).collect();

    let mut crossings: BTreeMap<EdgeKey, [f64; 3]> = BTreeMap::new();
    let mut crossing = |a: usize, b: usize| -> EdgeKey {
        let key = (a.min(b), a.max(b));
        crossings.entry(key).or_insert_with(|| {
            let (pa, pb) = (point_of[&key.0], point_of[&key.1]);
            let fa = value[&key.0];
            let (mut lo, mut hi) = (0.0, 1.0);
            for _ in 0..60 {
                let mid = 0.5 * (lo + hi);
                if (q.eval(&normalize(lerp(&pa, &pb, mid))) > 0.0) == (fa > 0.0) {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            normalize(lerp(&pa, &pb, 0.5 * (lo + hi)))
        });
        key
    };

    let mut segments: Vec<(EdgeKey, EdgeKey)> = Vec::new();
    for j in 0..m {
        for k in 0..cols {
            let c = [id(j, k), id(j, k + 1), id(j + 1, k + 1), id(j + 1, k)];
            let positive = c.map(|n| value[&n] > 0.0);
            let cut: Vec<usize> =
                (0..4).filter(|&e| c[e] != c[(e + 1) % 4] && positive[e] != positive[(e + 1) % 4]).collect();
            let edge = |e: usize| (c[e], c[(e + 1) % 4]);
            match cut.len() {
                2 => {
                    let (a, b) = (edge(cut[0]), edge(cut[1]));
                    segments.push((crossing(a.0, a.1), crossing(b.0, b.1)));
                }
                4 => {
                    let theta = PI * (j as f64 + 0.5) / m as f64;
                    let phi = 2.0 * PI * (k as f64 + 0.5) / cols as f64;
                    let center_positive = q.eval(&sphere_point(theta, phi)) > 0.0;
                    let pairs = if center_positive == positive[0] { [(0, 1), (2, 3)] } else { [(3, 0), (1, 2)] };
                    for (x, y) in pairs {
                        let (a, b) = (edge(x), edge(y));
                        segments.push((crossing(a.0, a.1), crossing(b.0, b.1)));
                    }
                }
                _ => {}
            }
        }
    }
    chain(&segments, &crossings)
}

fn chain(segments: &[(EdgeKey, EdgeKey)], points: &BTreeMap<EdgeKey, [f64; 3]>) -> Vec<Polyline> {
    let mut incident: BTreeMap<EdgeKey, Vec<usize>> = BTreeMap::new();
    for (s, (a, b)) in segments.iter().enumerate() {
        incident.entry(*a).or_default().push(s);
        incident.entry(*b).or_default().push(s);
    }
    let mut used = vec![false; segments.len()];
    let mut lines = Vec::new();
    let next = |at: (usize, usize), used: &[bool]| incident[&at].iter().copied().find(|s| !used[*s]);
    for start in 0..segments.len() {
        if used[start] {
            continue;
        }
        used[start] = true;
        let (a, b) = segments[start];
        let mut forward = vec![a, b];
        let mut at = b;
        while let Some(s) = next(at, &used) {
            used[s] = true;
            at = if segments[s].0 == at { segments[s].1 } else { segments[s].0 };
            forward.push(at);
        }
        let closed = at == a && forward.len() > 2;
        if !closed {
            let mut back = Vec::new();
            let mut at = a;
            while let Some(s) = next(at, &used) {
                used[s] = true;
                at = if segments[s].0 == at { segments[s].1 } else { segments[s].0 };
                back.push(at);
            }
            back.reverse();
            back.extend(forward);
            forward = back;
        }
        lines.push(Polyline { points: forward.iter().map(|k| points[k]).collect(), closed });
    }
    lines
}
