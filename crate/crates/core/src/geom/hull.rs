//! Convex hulls in the plane and in space, planar polygon helpers and a
//! small convex polytope type supporting halfspace clipping.

use std::collections::HashSet;

#[inline]
fn cross2(o: [f64; 2], a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

fn span_2d(points: &[[f64; 2]]) -> f64 {
    let mut s: f64 = 0.0;
    for k in 0..2 {
        let lo = points.iter().map(|p| p[k]).fold(f64::INFINITY, f64::min);
        let hi = points.iter().map(|p| p[k]).fold(f64::NEG_INFINITY, f64::max);
        s = s.max(hi - lo);
    }
    s
}

/// Indices of the convex hull vertices in counterclockwise order (monotone
/// chain). Collinear boundary points are dropped; turns whose cross product
/// is below 1e−12 relative to the squared extent count as collinear.
/// A single distinct point yields one index, a collinear set its two ends.
pub fn hull_2d(points: &[[f64; 2]]) -> Vec<usize> {
    let n = points.len();
    if n == 0 {
        return Vec::new();
    }
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&a, &b| {
        points[a][0]
            .partial_cmp(&points[b][0])
            .unwrap()
            .then(points[a][1].partial_cmp(&points[b][1]).unwrap())
            .then(a.cmp(&b))
    });
    idx.dedup_by(|a, b| points[*a] == points[*b]);
    if idx.len() == 1 {
        return idx;
    }
    let scale = span_2d(points);
    let tol = 1e-12 * scale * scale;
    let mut lower: Vec<usize> = Vec::new();
    for &i in &idx {
        while lower.len() >= 2
            && cross2(
                points[lower[lower.len() - 2]],
                points[lower[lower.len() - 1]],
                points[i],
            ) <= tol
        {
            lower.pop();
        }
        lower.push(i);
    }
    let mut upper: Vec<usize> = Vec::new();
    for &i in idx.iter().rev() {
        while upper.len() >= 2
            && cross2(
                points[upper[upper.len() - 2]],
                points[upper[upper.len() - 1]],
                points[i],
            ) <= tol
        {
            upper.pop();
        }
        upper.push(i);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    if lower.len() == 2 && lower[0] == lower[1] {
        lower.pop();
    }
    lower
}

/// Signed area of a polygon (positive when counterclockwise).
pub fn polygon_area(poly: &[[f64; 2]]) -> f64 {
    let k = poly.len();
    let mut a = 0.0;
    for i in 0..k {
        let p = poly[i];
        let q = poly[(i + 1) % k];
        a += p[0] * q[1] - p[1] * q[0];
    }
    a / 2.0
}

/// Minimum width of a convex polygon given counterclockwise; zero for
/// fewer than three vertices.
pub fn polygon_min_width(poly: &[[f64; 2]]) -> f64 {
    let k = poly.len();
    if k < 3 {
        return 0.0;
    }
    let mut best = f64::INFINITY;
    for i in 0..k {
        let a = poly[i];
        let b = poly[(i + 1) % k];
        let len = ((b[0] - a[0]).powi(2) + (b[1] - a[1]).powi(2)).sqrt();
        if len == 0.0 {
            continue;
        }
        let far = poly
            .iter()
            .map(|&p| cross2(a, b, p).abs() / len)
            .fold(0.0, f64::max);
        best = best.min(far);
    }
    best
}

/// Keeps the part of a convex polygon satisfying ⟨n, x⟩ ≤ b.
pub fn clip_polygon(poly: &[[f64; 2]], n: [f64; 2], b: f64) -> Vec<[f64; 2]> {
    let k = poly.len();
    let mut out = Vec::with_capacity(k + 1);
    if k == 0 {
        return out;
    }
    let side = |p: [f64; 2]| n[0] * p[0] + n[1] * p[1] - b;
    for i in 0..k {
        let p = poly[i];
        let q = poly[(i + 1) % k];
        let sp = side(p);
        let sq = side(q);
        if sp <= 0.0 {
            out.push(p);
        }
        if (sp < 0.0 && sq > 0.0) || (sp > 0.0 && sq < 0.0) {
            let t = sp / (sp - sq);
            out.push([p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1])]);
        }
    }
    out
}

/// Membership in a counterclockwise convex polygon with absolute slack
/// `tol`. Polygons with one or two vertices are treated as a point or a
/// segment.
pub fn convex_polygon_contains(poly: &[[f64; 2]], x: [f64; 2], tol: f64) -> bool {
    match poly.len() {
        0 => false,
        1 => ((x[0] - poly[0][0]).powi(2) + (x[1] - poly[0][1]).powi(2)).sqrt() <= tol,
        2 => {
            let (a, b) = (poly[0], poly[1]);
            let ab = [b[0] - a[0], b[1] - a[1]];
            let len2 = ab[0] * ab[0] + ab[1] * ab[1];
            let t = (((x[0] - a[0]) * ab[0] + (x[1] - a[1]) * ab[1]) / len2).clamp(0.0, 1.0);
            let c = [a[0] + t * ab[0], a[1] + t * ab[1]];
            ((x[0] - c[0]).powi(2) + (x[1] - c[1]).powi(2)).sqrt() <= tol
        }
        k => (0..k).all(|i| {
            let a = poly[i];
            let b = poly[(i + 1) % k];
            let len = ((b[0] - a[0]).powi(2) + (b[1] - a[1]).powi(2)).sqrt();
            cross2(a, b, x) >= -tol * len
        }),
    }
}

#[inline]
fn sub3(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

#[inline]
fn cross3(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

#[inline]
fn dot3(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

#[inline]
fn norm3(a: [f64; 3]) -> f64 {
    dot3(a, a).sqrt()
}

/// Triangular hull facet with outward unit normal: the hull lies in
/// ⟨normal, x⟩ ≤ offset.
#[derive(Clone, Debug, PartialEq)]
pub struct Facet3 {
    pub idx: [usize; 3],
    pub normal: [f64; 3],
    pub offset: f64,
}

/// Three-dimensional convex hull.
#[derive(Clone, Debug, PartialEq)]
pub struct Hull3 {
    /// Indices of hull vertices, increasing.
    pub vertices: Vec<usize>,
    pub facets: Vec<Facet3>,
}

impl Hull3 {
    /// Membership with absolute slack.
    pub fn contains(&self, x: [f64; 3], tol: f64) -> bool {
        self.facets
            .iter()
            .all(|f| dot3(f.normal, x) <= f.offset + tol)
    }

    /// Radius of the largest ball centred at `c` inside the hull.
    pub fn inradius_at(&self, c: [f64; 3]) -> f64 {
        self.facets
            .iter()
            .map(|f| f.offset - dot3(f.normal, c))
            .fold(f64::INFINITY, f64::min)
    }
}

fn make_facet(points: &[[f64; 3]], a: usize, b: usize, c: usize, inside: [f64; 3]) -> Facet3 {
    let n = cross3(sub3(points[b], points[a]), sub3(points[c], points[a]));
    let len = norm3(n);
    let mut normal = [n[0] / len, n[1] / len, n[2] / len];
    let mut idx = [a, b, c];
    let mut offset = dot3(normal, points[a]);
    if dot3(normal, inside) > offset {
        normal = [-normal[0], -normal[1], -normal[2]];
        offset = -offset;
        idx = [a, c, b];
    }
    Facet3 {
        idx,
        normal,
        offset,
    }
}

/// Incremental convex hull in ℝ³. Returns `None` when the points are
/// coplanar (relative tolerance 1e−12 on the spread).
pub fn hull_3d(points: &[[f64; 3]]) -> Option<Hull3> {
    let n = points.len();
    if n < 4 {
        return None;
    }
    let mut scale: f64 = 0.0;
    for k in 0..3 {
        let lo = points.iter().map(|p| p[k]).fold(f64::INFINITY, f64::min);
        let hi = points.iter().map(|p| p[k]).fold(f64::NEG_INFINITY, f64::max);
        scale = scale.max(hi - lo);
    }
    if scale == 0.0 {
        return None;
    }
    let tol = 1e-12 * scale;
    let i0 = (0..n)
        .min_by(|&a, &b| points[a][0].partial_cmp(&points[b][0]).unwrap())
        .unwrap();
    let i1 = (0..n)
        .max_by(|&a, &b| {
            norm3(sub3(points[a], points[i0]))
                .partial_cmp(&norm3(sub3(points[b], points[i0])))
                .unwrap()
        })
        .unwrap();
    let dir = sub3(points[i1], points[i0]);
    let line_dist = |p: [f64; 3]| norm3(cross3(dir, sub3(p, points[i0]))) / norm3(dir);
    let i2 = (0..n)
        .max_by(|&a, &b| line_dist(points[a]).partial_cmp(&line_dist(points[b])).unwrap())
        .unwrap();
    if line_dist(points[i2]) <= tol {
        return None;
    }
    let pn = cross3(dir, sub3(points[i2], points[i0]));
    let pn = {
        let l = norm3(pn);
        [pn[0] / l, pn[1] / l, pn[2] / l]
    };
    let plane_dist = |p: [f64; 3]| dot3(pn, sub3(p, points[i0])).abs();
    let i3 = (0..n)
        .max_by(|&a, &b| plane_dist(points[a]).partial_cmp(&plane_dist(points[b])).unwrap())
        .unwrap();
    if plane_dist(points[i3]) <= tol {
        return None;
    }
    let inside = {
        let mut c = [0.0; 3];
        for &i in &[i0, i1, i2, i3] {
            for k in 0..3 {
                c[k] += points[i][k] / 4.0;
            }
        }
        c
    };
    let mut facets = vec![
        make_facet(points, i0, i1, i2, inside),
        make_facet(points, i0, i1, i3, inside),
        make_facet(points, i0, i2, i3, inside),
        make_facet(points, i1, i2, i3, inside),
    ];
    let seed = [i0, i1, i2, i3];
    for (p, &x) in points.iter().enumerate() {
        if seed.contains(&p) {
            continue;
        }
        let visible: Vec<bool> = facets
            .iter()
            .map(|f| dot3(f.normal, x) > f.offset + tol)
            .collect();
        if !visible.iter().any(|&v| v) {
            continue;
        }
        let mut edges: HashSet<(usize, usize)> = HashSet::new();
        for (f, &vis) in facets.iter().zip(&visible) {
            if vis {
                let [a, b, c] = f.idx;
                edges.insert((a, b));
                edges.insert((b, c));
                edges.insert((c, a));
            }
        }
        let horizon: Vec<(usize, usize)> = edges
            .iter()
            .filter(|(a, b)| !edges.contains(&(*b, *a)))
            .copied()
            .collect();
        let mut kept: Vec<Facet3> = facets
            .into_iter()
            .zip(visible)
            .filter(|(_, v)| !v)
            .map(|(f, _)| f)
            .collect();
        for (a, b) in horizon {
            kept.push(make_facet(points, a, b, p, inside));
        }
        facets = kept;
    }
    let mut vertices: Vec<usize> = facets.iter().flat_map(|f| f.idx).collect();
    vertices.sort_unstable();
    vertices.dedup();
    Some(Hull3 { vertices, facets })
}

/// Planar face of a [`Polytope3`]; vertices are ordered around the face.
#[derive(Clone, Debug, PartialEq)]
pub struct Face3 {
    pub normal: [f64; 3],
    pub offset: f64,
    pub poly: Vec<[f64; 3]>,
}

/// Convex polytope in ℝ³ stored as its faces, built by clipping a box with
/// halfspaces.
#[derive(Clone, Debug, PartialEq)]
pub struct Polytope3 {
    pub faces: Vec<Face3>,
    tol: f64,
}

impl Polytope3 {
    /// Axis-aligned box [lo, hi].
    pub fn new_box(lo: [f64; 3], hi: [f64; 3]) -> Self {
        let scale = (0..3).map(|k| hi[k] - lo[k]).fold(0.0, f64::max).max(1e-300);
        let c = |x: usize, y: usize, z: usize| {
            [
                if x == 0 { lo[0] } else { hi[0] },
                if y == 0 { lo[1] } else { hi[1] },
                if z == 0 { lo[2] } else { hi[2] },
            ]
        };
        let faces = vec![
            Face3 {
                normal: [-1.0, 0.0, 0.0],
                offset: -lo[0],
                poly: vec![c(0, 0, 0), c(0, 0, 1), c(0, 1, 1), c(0, 1, 0)],
            },
            Face3 {
                normal: [1.0, 0.0, 0.0],
                offset: hi[0],
                poly: vec![c(1, 0, 0), c(1, 1, 0), c(1, 1, 1), c(1, 0, 1)],
            },
            Face3 {
                normal: [0.0, -1.0, 0.0],
                offset: -lo[1],
                poly: vec![c(0, 0, 0), c(1, 0, 0), c(1, 0, 1), c(0, 0, 1)],
            },
            Face3 {
                normal: [0.0, 1.0, 0.0],
                offset: hi[1],
                poly: vec![c(0, 1, 0), c(0, 1, 1), c(1, 1, 1), c(1, 1, 0)],
            },
            Face3 {
                normal: [0.0, 0.0, -1.0],
                offset: -lo[2],
                poly: vec![c(0, 0, 0), c(0, 1, 0), c(1, 1, 0), c(1, 0, 0)],
            },
            Face3 {
                normal: [0.0, 0.0, 1.0],
                offset: hi[2],
                poly: vec![c(0, 0, 1), c(1, 0, 1), c(1, 1, 1), c(0, 1, 1)],
            },
        ];
        Polytope3 {
            faces,
            tol: 1e-11 * scale,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.faces.is_empty()
    }

    /// Makes the polytope empty.
    pub fn clear(&mut self) {
        self.faces.clear();
    }

    /// Keeps the part satisfying ⟨n, x⟩ ≤ b (n need not be unit).
    pub fn clip(&mut self, n: [f64; 3], b: f64) {
        let len = norm3(n);
        let n = [n[0] / len, n[1] / len, n[2] / len];
        let b = b / len;
        let tol = self.tol;
        if self
            .faces
            .iter()
            .all(|f| f.poly.iter().all(|&p| dot3(n, p) - b <= tol))
        {
            return;
        }
        let mut cap: Vec<[f64; 3]> = Vec::new();
        let mut faces = Vec::with_capacity(self.faces.len() + 1);
        for face in &self.faces {
            let k = face.poly.len();
            let mut out = Vec::with_capacity(k + 1);
            for i in 0..k {
                let p = face.poly[i];
                let q = face.poly[(i + 1) % k];
                let sp = dot3(n, p) - b;
                let sq = dot3(n, q) - b;
                if sp <= tol {
                    out.push(p);
                    if sp >= -tol {
                        cap.push(p);
                    }
                }
                if (sp < -tol && sq > tol) || (sp > tol && sq < -tol) {
                    let t = sp / (sp - sq);
                    let x = [
                        p[0] + t * (q[0] - p[0]),
                        p[1] + t * (q[1] - p[1]),
                        p[2] + t * (q[2] - p[2]),
                    ];
                    out.push(x);
                    cap.push(x);
                }
            }
            dedup_ring(&mut out, tol);
            if out.len() >= 3 {
                faces.push(Face3 {
                    normal: face.normal,
                    offset: face.offset,
                    poly: out,
                });
            }
        }
        let mut uniq: Vec<[f64; 3]> = Vec::new();
        for p in cap {
            if !uniq.iter().any(|q| norm3(sub3(p, *q)) <= tol * 10.0) {
                uniq.push(p);
            }
        }
        if uniq.len() >= 3 {
            let mut c = [0.0; 3];
            for p in &uniq {
                for k in 0..3 {
                    c[k] += p[k] / uniq.len() as f64;
                }
            }
            let helper = if n[0].abs() < 0.9 {
                [1.0, 0.0, 0.0]
            } else {
                [0.0, 1.0, 0.0]
            };
            let e1 = {
                let v = cross3(n, helper);
                let l = norm3(v);
                [v[0] / l, v[1] / l, v[2] / l]
            };
            let e2 = cross3(n, e1);
            uniq.sort_by(|p, q| {
                let ap = dot3(sub3(*p, c), e2).atan2(dot3(sub3(*p, c), e1));
                let aq = dot3(sub3(*q, c), e2).atan2(dot3(sub3(*q, c), e1));
                ap.partial_cmp(&aq).unwrap()
            });
            faces.push(Face3 {
                normal: n,
                offset: b,
                poly: uniq,
            });
        }
        if faces.len() < 4 {
            faces.clear();
        }
        self.faces = faces;
    }

    /// Distinct vertices.
    pub fn vertices(&self) -> Vec<[f64; 3]> {
        let mut out: Vec<[f64; 3]> = Vec::new();
        for f in &self.faces {
            for &p in &f.poly {
                if !out.iter().any(|q| norm3(sub3(p, *q)) <= self.tol * 10.0) {
                    out.push(p);
                }
            }
        }
        out
    }

    /// Membership with absolute slack.
    pub fn contains(&self, x: [f64; 3], tol: f64) -> bool {
        !self.faces.is_empty()
            && self
                .faces
                .iter()
                .all(|f| dot3(f.normal, x) <= f.offset + tol)
    }
}

fn dedup_ring(ring: &mut Vec<[f64; 3]>, tol: f64) {
    let mut out: Vec<[f64; 3]> = Vec::with_capacity(ring.len());
    for &p in ring.iter() {
        if out.last().map_or(true, |q| norm3(sub3(p, *q)) > tol) {
            out.push(p);
        }
    }
    while out.len() > 1 && norm3(sub3(out[0], *out.last().unwrap())) <= tol {
        out.pop();
    }
    *ring = out;
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hull_2d_square_with_interior_and_collinear_points() {
        let pts = [
            [0.0, 0.0],
            [1.0, 0.0],
            [1.0, 1.0],
            [0.0, 1.0],
            [0.5, 0.5],
            [0.5, 0.0],
        ];
        let h = hull_2d(&pts);
        assert_eq!(h, vec![0, 1, 2, 3]);
        let poly: Vec<[f64; 2]> = h.iter().map(|&i| pts[i]).collect();
        assert!((polygon_area(&poly) - 1.0).abs() < 1e-15);
        assert!((polygon_min_width(&poly) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn hull_2d_degenerate_inputs() {
        assert_eq!(hull_2d(&[[1.0, 1.0], [1.0, 1.0]]), vec![0]);
        let line = [[0.0, 0.0], [2.0, 2.0], [1.0, 1.0]];
        let h = hull_2d(&line);
        assert_eq!(h.len(), 2);
    }

    #[test]
    fn clipping_a_square() {
        let sq = [[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]];
        let half = clip_polygon(&sq, [1.0, 0.0], 0.5);
        assert!((polygon_area(&half) - 0.5).abs() < 1e-15);
        assert!(clip_polygon(&sq, [1.0, 0.0], -1.0).is_empty());
        assert!(convex_polygon_contains(&sq, [0.5, 0.5], 0.0));
        assert!(!convex_polygon_contains(&sq, [1.1, 0.5], 1e-9));
    }

    #[test]
    fn hull_3d_cube() {
        let mut pts = Vec::new();
        for x in 0..2 {
            for y in 0..2 {
                for z in 0..2 {
                    pts.push([x as f64, y as f64, z as f64]);
                }
            }
        }
        pts.push([0.5, 0.5, 0.5]);
        let h = hull_3d(&pts).unwrap();
        assert_eq!(h.vertices, (0..8).collect::<Vec<_>>());
        assert!(h.contains([0.2, 0.3, 0.9], 1e-12));
        assert!(!h.contains([1.2, 0.3, 0.9], 1e-12));
        assert!((h.inradius_at([0.5, 0.5, 0.5]) - 0.5).abs() < 1e-12);
        let flat = [[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [1.0, 1.0, 0.0]];
        assert!(hull_3d(&flat).is_none());
    }

    #[test]
    fn polytope_clip_to_simplex() {
        let mut p = Polytope3::new_box([0.0; 3], [1.0; 3]);
        p.clip([1.0, 1.0, 1.0], 1.0);
        let v = p.vertices();
        assert_eq!(v.len(), 4);
        assert!(p.contains([0.2, 0.2, 0.2], 1e-12));
        assert!(!p.contains([0.5, 0.5, 0.5], 1e-12));
        p.clip([-1.0, -1.0, -1.0], -2.0);
        assert!(p.is_empty());
    }
}
