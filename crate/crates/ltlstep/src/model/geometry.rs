use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum RegionError {
    #[error("region `{0}` needs at least 3 vertices")]
    TooFewVertices(String),
    #[error("region `{0}` is not convex")]
    NotConvex(String),
    #[error("region `{0}` has a degenerate edge")]
    DegenerateEdge(String),
    #[error("region `{0}`: halfspace bounding box disagrees with the polygon")]
    InconsistentHalfspaces(String),
}

/// Convex obstacle-free region: counterclockwise polygon plus its halfspace
/// form `A·(x, y, θ) <= b` with outward unit normals and a zero θ column
/// (regions constrain position only).
#[derive(Debug, Clone, PartialEq)]
pub struct Region {
    pub name: String,
    pub a: Vec<[f64; 3]>,
    pub b: Vec<f64>,
    pub polygon: Vec<[f64; 2]>,
}

impl Region {
    /// Build from polygon vertices. Clockwise input is reversed; convexity
    /// and non-degeneracy are required, and the derived halfspaces are
    /// cross-checked against the polygon's bounding box.
    pub fn from_vertices(name: impl Into<String>, vertices: &[[f64; 2]]) -> Result<Self, RegionError> {
        let name = name.into();
        if vertices.len() < 3 {
            return Err(RegionError::TooFewVertices(name));
        }
        let mut poly = vertices.to_vec();
        if signed_area(&poly) < 0.0 {
            poly.reverse();
        }
        let n = poly.len();
        let mut a = Vec::with_capacity(n);
        let mut b = Vec::with_capacity(n);
        for i in 0..n {
            let v = poly[i];
            let w = poly[(i + 1) % n];
            let d = [w[0] - v[0], w[1] - v[1]];
            let len = (d[0] * d[0] + d[1] * d[1]).sqrt();
            if len < 1e-12 {
                return Err(RegionError::DegenerateEdge(name));
            }
            // outward normal of a CCW edge
            let normal = [d[1] / len, -d[0] / len];
            a.push([normal[0], normal[1], 0.0]);
            b.push(normal[0] * v[0] + normal[1] * v[1]);
        }
        let region = Self {
            name,
            a,
            b,
            polygon: poly,
        };
        // convexity: every vertex inside every halfspace
        for v in &region.polygon {
            if !region.contains(*v, 1e-9) {
                return Err(RegionError::NotConvex(region.name));
            }
        }
        // nonempty + bounded: enumerate the halfspace vertices and compare
        // the boxes (the 2·dim bounding-LP check)
        let hs_box = region
            .halfspace_bbox()
            .ok_or_else(|| RegionError::InconsistentHalfspaces(region.name.clone()))?;
        let poly_box = region.bbox();
        for i in 0..2 {
            if (hs_box[i][0] - poly_box[i][0]).abs() > 1e-7
                || (hs_box[i][1] - poly_box[i][1]).abs() > 1e-7
            {
                return Err(RegionError::InconsistentHalfspaces(region.name.clone()));
            }
        }
        Ok(region)
    }

    pub fn contains(&self, p: [f64; 2], tol: f64) -> bool {
        self.a
            .iter()
            .zip(&self.b)
            .all(|(row, &b)| row[0] * p[0] + row[1] * p[1] <= b + tol)
    }

    /// Signed violation of the worst halfspace row at `p` (<= 0 inside).
    pub fn violation(&self, p: [f64; 2]) -> f64 {
        self.a
            .iter()
            .zip(&self.b)
            .map(|(row, &b)| row[0] * p[0] + row[1] * p[1] - b)
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Axis-aligned bounding box `[[xmin, xmax], [ymin, ymax]]` of the polygon.
    pub fn bbox(&self) -> [[f64; 2]; 2] {
        let mut bx = [[f64::INFINITY, f64::NEG_INFINITY]; 2];
        for v in &self.polygon {
            for i in 0..2 {
                bx[i][0] = bx[i][0].min(v[i]);
                bx[i][1] = bx[i][1].max(v[i]);
            }
        }
        bx
    }

    /// Bounding box of `{p : A p <= b}` by vertex enumeration over all row
    /// pairs; `None` if the set is empty or (numerically) unbounded.
    pub fn halfspace_bbox(&self) -> Option<[[f64; 2]; 2]> {
        let n = self.a.len();
        let mut verts = Vec::new();
        for i in 0..n {
            for j in (i + 1)..n {
                let (a1, a2) = (&self.a[i], &self.a[j]);
                let det = a1[0] * a2[1] - a1[1] * a2[0];
                if det.abs() < 1e-12 {
                    continue;
                }
                let x = (self.b[i] * a2[1] - a1[1] * self.b[j]) / det;
                let y = (a1[0] * self.b[j] - self.b[i] * a2[0]) / det;
                if self.contains([x, y], 1e-7) {
                    verts.push([x, y]);
                }
            }
        }
        if verts.len() < 3 {
            return None;
        }
        let mut bx = [[f64::INFINITY, f64::NEG_INFINITY]; 2];
        for v in &verts {
            for i in 0..2 {
                bx[i][0] = bx[i][0].min(v[i]);
                bx[i][1] = bx[i][1].max(v[i]);
            }
        }
        Some(bx)
    }

    /// `max over the box of (a·p − b)` for halfspace row `idx`: the smallest
    /// exact big-M that relaxes the row over that box.
    pub fn row_big_m(&self, idx: usize, bx: [[f64; 2]; 2]) -> f64 {
        let a = self.a[idx];
        let hi = |c: f64, range: [f64; 2]| if c >= 0.0 { c * range[1] } else { c * range[0] };
        (hi(a[0], bx[0]) + hi(a[1], bx[1]) - self.b[idx]).max(0.0)
    }
}

fn signed_area(poly: &[[f64; 2]]) -> f64 {
    let n = poly.len();
    let mut s = 0.0;
    for i in 0..n {
        let a = poly[i];
        let b = poly[(i + 1) % n];
        s += a[0] * b[1] - b[0] * a[1];
    }
    s / 2.0
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_square() -> Region {
        Region::from_vertices(
            "sq",
            &[[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]],
        )
        .unwrap()
    }

    #[test]
    fn outward_normals_and_offsets() {
        let r = unit_square();
        assert!(r.contains([0.5, 0.5], 0.0));
        assert!(!r.contains([1.5, 0.5], 1e-9));
        assert!((r.violation([1.5, 0.5]) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn clockwise_input_is_reversed() {
        let r = Region::from_vertices(
            "cw",
            &[[0.0, 1.0], [1.0, 1.0], [1.0, 0.0], [0.0, 0.0]],
        )
        .unwrap();
        assert!(r.contains([0.5, 0.5], 0.0));
    }

    #[test]
    fn nonconvex_is_rejected() {
        let err = Region::from_vertices(
            "bad",
            &[[0.0, 0.0], [2.0, 0.0], [1.0, 0.2], [2.0, 2.0], [0.0, 2.0]],
        )
        .unwrap_err();
        assert_eq!(err, RegionError::NotConvex("bad".to_string()));
    }

    #[test]
    fn halfspace_bbox_matches_polygon() {
        let r = Region::from_vertices("tri", &[[0.0, 0.0], [2.0, 0.0], [1.0, 3.0]]).unwrap();
        let bx = r.halfspace_bbox().unwrap();
        assert!((bx[0][0] - 0.0).abs() < 1e-9);
        assert!((bx[0][1] - 2.0).abs() < 1e-9);
        assert!((bx[1][1] - 3.0).abs() < 1e-9);
    }

    #[test]
    fn row_big_m_over_workspace_box() {
        // x <= 1 row of the unit square over [−10, 10]²: worst violation is 9
        let r = unit_square();
        let idx = r
            .a
            .iter()
            .position(|row| (row[0] - 1.0).abs() < 1e-9)
            .unwrap();
        let m = r.row_big_m(idx, [[-10.0, 10.0], [-10.0, 10.0]]);
        assert!((m - 9.0).abs() < 1e-9);
    }
}
