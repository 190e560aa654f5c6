//! Voronoi diagram of a small set of sites by per-pair half-plane clipping.
//!
//! Every edge lies on the bisector of its two sites and is stored in the
//! normalized form `zeta(s) = m + s w`, where `m` is the midpoint of the two
//! sites, `w = (|z_j - z_i| / 2) u` and `u` is the unit normal to `z_j - z_i`.
//! The admissible parameters form one interval `[s_a, s_b]`, possibly
//! unbounded on either side, so rays and full lines keep their exact form.

use num_complex::Complex;
use thiserror::Error;

use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum VoronoiError {
    #[error("need at least 2 sites, got {0}")]
    TooFewSites(usize),
    #[error("sites {0} and {1} coincide")]
    DuplicateSites(usize, usize),
    #[error("site {0} is not finite")]
    NonFiniteSite(usize),
}

/// Concrete shape of an edge.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Geometry<T> {
    Segment { a: Complex<T>, b: Complex<T> },
    Ray { origin: Complex<T>, dir: Complex<T> },
    Line { point: Complex<T>, dir: Complex<T> },
}

/// Part of the bisector of `sites.0` and `sites.1` that lies on the skeleton.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge<T> {
    pub sites: (usize, usize),
    pub midpoint: Complex<T>,
    /// `(|z_j - z_i| / 2) * i (z_j - z_i) / |z_j - z_i|`
    pub half_normal: Complex<T>,
    /// Parameter interval; either end may be infinite.
    pub s_a: T,
    pub s_b: T,
}

impl<T: Scalar> Edge<T> {
    pub fn point_at(&self, s: T) -> Complex<T> {
        self.midpoint + self.half_normal * s
    }

    pub fn is_bounded(&self) -> bool {
        self.s_a.is_finite() && self.s_b.is_finite()
    }

    pub fn geometry(&self) -> Geometry<T> {
        let dir = self.half_normal / self.half_normal.norm();
        match (self.s_a.is_finite(), self.s_b.is_finite()) {
            (true, true) => Geometry::Segment {
                a: self.point_at(self.s_a),
                b: self.point_at(self.s_b),
            },
            (true, false) => Geometry::Ray {
                origin: self.point_at(self.s_a),
                dir,
            },
            (false, true) => Geometry::Ray {
                origin: self.point_at(self.s_b),
                dir: -dir,
            },
            (false, false) => Geometry::Line {
                point: self.midpoint,
                dir,
            },
        }
    }

    /// Parameter interval cut to `|zeta - m| <= radius`.
    pub fn clipped_interval(&self, radius: T) -> (T, T) {
        let lim = radius / self.half_normal.norm();
        (self.s_a.max(-lim), self.s_b.min(lim))
    }

    /// Euclidean length (infinite for rays and lines).
    pub fn length(&self) -> T {
        (self.s_b - self.s_a) * self.half_normal.norm()
    }

    /// Distance from `z` to the edge, respecting its extent.
    pub fn distance(&self, z: Complex<T>) -> T {
        let w = self.half_normal;
        let d = z - self.midpoint;
        let s = (d.re * w.re + d.im * w.im) / w.norm_sqr();
        let s = s.max(self.s_a).min(self.s_b);
        (z - self.point_at(s)).norm()
    }
}

/// Result of [`Diagram::locate`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Location {
    Cell(usize),
    Edge(usize, usize),
    /// Sites (at least three) equidistant within tolerance, ascending.
    Vertex(Vec<usize>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Diagram<T> {
    pub sites: Vec<Complex<T>>,
    pub edges: Vec<Edge<T>>,
    pub vertices: Vec<Complex<T>>,
    /// `4 * (max pairwise site distance) + 10`, used to truncate rays.
    pub clip_radius: T,
    /// Geometric tolerance in absolute units.
    pub tol: T,
}

/// Default relative tolerance, scaled by `max(1, max |z_i|)`.
pub fn default_tol<T: Scalar>(sites: &[Complex<T>]) -> T {
    let scale = sites.iter().map(|z| z.norm()).fold(T::one(), T::max);
    T::lit(1e-9).max(T::lit(64.0) * T::epsilon()) * scale
}

/// `Phi(z) = min_i |z - z_i|`
pub fn phi<T: Scalar>(z: Complex<T>, sites: &[Complex<T>]) -> T {
    sites.iter().map(|s| (z - s).norm()).fold(T::infinity(), T::min)
}

/// Builds the diagram of `sites` with the default tolerance.
pub fn build_voronoi<T: Scalar>(sites: &[Complex<T>]) -> Result<Diagram<T>, VoronoiError> {
    build_voronoi_with_tol(sites, default_tol(sites))
}

pub fn build_voronoi_with_tol<T: Scalar>(
    sites: &[Complex<T>],
    tol: T,
) -> Result<Diagram<T>, VoronoiError> {
    let q = sites.len();
    if q < 2 {
        return Err(VoronoiError::TooFewSites(q));
    }
    if let Some(i) = sites.iter().position(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(VoronoiError::NonFiniteSite(i));
    }
    let mut max_pair = T::zero();
    for i in 0..q {
        for j in i + 1..q {
            let d = (sites[j] - sites[i]).norm();
            if d <= tol {
                return Err(VoronoiError::DuplicateSites(i, j));
            }
            max_pair = max_pair.max(d);
        }
    }

    let mut edges = Vec::new();
    for i in 0..q {
        for j in i + 1..q {
            if let Some(e) = pair_edge(sites, i, j, tol) {
                edges.push(e);
            }
        }
    }

    let mut vertices: Vec<Complex<T>> = Vec::new();
    for e in &edges {
        for s in [e.s_a, e.s_b] {
            if s.is_finite() {
                let v = e.point_at(s);
                if !vertices.iter().any(|u| (u - v).norm() <= T::lit(10.0) * tol) {
                    vertices.push(v);
                }
            }
        }
    }
    vertices.sort_by(|a, b| a.re.partial_cmp(&b.re).unwrap().then(a.im.partial_cmp(&b.im).unwrap()));

    Ok(Diagram {
        sites: sites.to_vec(),
        edges,
        vertices,
        clip_radius: T::lit(4.0) * max_pair + T::lit(10.0),
        tol,
    })
}

fn pair_edge<T: Scalar>(sites: &[Complex<T>], i: usize, j: usize, tol: T) -> Option<Edge<T>> {
    let (zi, zj) = (sites[i], sites[j]);
    let two = T::lit(2.0);
    let m = (zi + zj) / two;
    let w = (zj - zi) * Complex::i() / two;
    let wn = w.norm();
    let mut lo = T::neg_infinity();
    let mut hi = T::infinity();
    for (k, &zk) in sites.iter().enumerate() {
        if k == i || k == j {
            continue;
        }
        // |zeta - z_i|^2 <= |zeta - z_k|^2  <=>  a + b s <= 0
        let dk = zk - zi;
        let a = two * (m.re * dk.re + m.im * dk.im) + zi.norm_sqr() - zk.norm_sqr();
        let b = two * (w.re * dk.re + w.im * dk.im);
        let scale = dk.norm() * wn;
        if b.abs() <= T::epsilon() * T::lit(16.0) * scale {
            if a > T::zero() {
                return None;
            }
            continue;
        }
        let root = -a / b;
        if b > T::zero() {
            hi = hi.min(root);
        } else {
            lo = lo.max(root);
        }
    }
    if hi.is_finite() && lo.is_finite() && (hi - lo) * wn <= tol {
        return None;
    }
    if hi <= lo {
        return None;
    }
    Some(Edge {
        sites: (i, j),
        midpoint: m,
        half_normal: w,
        s_a: lo,
        s_b: hi,
    })
}

impl<T: Scalar> Diagram<T> {
    pub fn phi(&self, z: Complex<T>) -> T {
        phi(z, &self.sites)
    }

    /// Index of the nearest site (lowest index on ties).
    pub fn nearest_site(&self, z: Complex<T>) -> usize {
        let mut best = 0;
        let mut bd = T::infinity();
        for (k, s) in self.sites.iter().enumerate() {
            let d = (z - s).norm();
            if d < bd {
                bd = d;
                best = k;
            }
        }
        best
    }

    /// Classifies `z` by how many sites are nearest within `tol`.
    pub fn locate(&self, z: Complex<T>, tol: T) -> Location {
        let d: Vec<T> = self.sites.iter().map(|s| (z - s).norm()).collect();
        let dmin = d.iter().copied().fold(T::infinity(), T::min);
        let near: Vec<usize> = (0..d.len()).filter(|&k| d[k] - dmin <= tol).collect();
        match near.len() {
            1 => Location::Cell(near[0]),
            2 => Location::Edge(near[0], near[1]),
            _ => Location::Vertex(near),
        }
    }

    /// Distance from `z` to the skeleton (union of all edges).
    pub fn distance_to_skeleton(&self, z: Complex<T>) -> T {
        self.edges.iter().map(|e| e.distance(z)).fold(T::infinity(), T::min)
    }

    /// Number of cells (one per site).
    pub fn cell_count(&self) -> usize {
        self.sites.len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    #[test]
    fn two_sites_give_one_line() {
        let d = build_voronoi(&[c(0.0, 0.0), c(1.0, 0.0)]).unwrap();
        assert_eq!(d.edges.len(), 1);
        assert!(d.vertices.is_empty());
        match d.edges[0].geometry() {
            Geometry::Line { point, dir } => {
                assert!((point - c(0.5, 0.0)).norm() < 1e-15);
                assert!(dir.re.abs() < 1e-15 && (dir.im.abs() - 1.0).abs() < 1e-15);
            }
            g => panic!("expected a line, got {g:?}"),
        }
    }

    #[test]
    fn triangle_has_circumcenter_vertex() {
        let d = build_voronoi(&[c(0.0, 0.0), c(1.0, 0.0), c(0.0, 1.0)]).unwrap();
        assert_eq!(d.edges.len(), 3);
        assert_eq!(d.vertices.len(), 1);
        assert!((d.vertices[0] - c(0.5, 0.5)).norm() < 1e-12);
        assert!(d.edges.iter().all(|e| matches!(e.geometry(), Geometry::Ray { .. })));
        assert_eq!(d.locate(c(0.5, 0.5), 1e-9), Location::Vertex(vec![0, 1, 2]));
    }

    #[test]
    fn phi_examples() {
        let s = [c(0.0, 0.0), c(1.0, 0.0)];
        assert_eq!(phi(c(0.25, 0.0), &s), 0.25);
        assert_eq!(phi(c(1.0, 0.0), &s), 0.0);
        assert!((phi(c(0.5, 3.0), &s) - 9.25f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn locate_and_distance() {
        let d = build_voronoi(&[c(0.0, 0.0), c(1.0, 0.0)]).unwrap();
        assert_eq!(d.locate(c(0.2, 0.0), 1e-9), Location::Cell(0));
        assert_eq!(d.locate(c(0.5, 3.0), 1e-9), Location::Edge(0, 1));
        assert!(d.distance_to_skeleton(c(0.5, 0.0)) < 1e-15);
        assert!((d.distance_to_skeleton(c(0.3, 0.0)) - 0.2).abs() < 1e-15);
    }

    #[test]
    fn square_corners_collapse_to_one_vertex() {
        let d = build_voronoi(&[c(0.0, 0.0), c(1.0, 0.0), c(1.0, 1.0), c(0.0, 1.0)]).unwrap();
        assert_eq!(d.edges.len(), 4);
        assert_eq!(d.vertices.len(), 1);
    }

    #[test]
    fn collinear_sites_give_parallel_lines() {
        let d = build_voronoi(&[c(0.0, 0.0), c(1.0, 0.0), c(3.0, 0.0)]).unwrap();
        assert_eq!(d.edges.len(), 2);
        assert!(d.edges.iter().all(|e| !e.s_a.is_finite() && !e.s_b.is_finite()));
    }

    #[test]
    fn errors() {
        assert_eq!(build_voronoi(&[c(0.0, 0.0)]), Err(VoronoiError::TooFewSites(1)));
        assert_eq!(
            build_voronoi(&[c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)]),
            Err(VoronoiError::DuplicateSites(0, 2))
        );
    }

    #[test]
    fn works_in_f32() {
        let d = build_voronoi(&[Complex::new(0.0f32, 0.0), Complex::new(1.0, 0.0), Complex::new(0.0, 1.0)]).unwrap();
        assert_eq!(d.vertices.len(), 1);
        assert!((d.vertices[0] - Complex::new(0.5f32, 0.5)).norm() < 1e-5);
    }
}
