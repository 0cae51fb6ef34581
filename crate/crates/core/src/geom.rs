//! Small Euclidean helpers shared by the metric and fibration code:
//! 3-vector algebra, 3x3 solves, tetrahedron embedding from edge lengths,
//! circumcenters, and compensated summation.

pub type Vec3 = [f64; 3];

pub fn sub(a: Vec3, b: Vec3) -> Vec3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

pub fn add(a: Vec3, b: Vec3) -> Vec3 {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

pub fn scale(a: Vec3, s: f64) -> Vec3 {
    [a[0] * s, a[1] * s, a[2] * s]
}

pub fn dot(a: Vec3, b: Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub fn cross(a: Vec3, b: Vec3) -> Vec3 {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

pub fn norm(a: Vec3) -> f64 {
    dot(a, a).sqrt()
}

pub fn normalize(a: Vec3) -> Vec3 {
    let n = norm(a);
    scale(a, 1.0 / n)
}

pub fn midpoint(a: Vec3, b: Vec3) -> Vec3 {
    scale(add(a, b), 0.5)
}

/// Solve the 3x3 system `m x = b` by elimination with partial pivoting.
/// Returns `None` for a (numerically) singular matrix.
pub fn solve3(m: [[f64; 3]; 3], b: Vec3) -> Option<Vec3> {
    let mut a = [
        [m[0][0], m[0][1], m[0][2], b[0]],
        [m[1][0], m[1][1], m[1][2], b[1]],
        [m[2][0], m[2][1], m[2][2], b[2]],
    ];
    for k in 0..3 {
        let mut p = k;
        for r in k + 1..3 {
            if a[r][k].abs() > a[p][k].abs() {
                p = r;
            }
        }
        if a[p][k].abs() < 1e-300 {
            return None;
        }
        a.swap(k, p);
        for r in k + 1..3 {
            let f = a[r][k] / a[k][k];
            for c in k..4 {
                a[r][c] -= f * a[k][c];
            }
        }
    }
    let mut x = [0.0; 3];
    for k in (0..3).rev() {
        let mut s = a[k][3];
        for c in k + 1..3 {
            s -= a[k][c] * x[c];
        }
        x[k] = s / a[k][k];
    }
    Some(x)
}

/// Embed a tetrahedron in Euclidean 3-space from its six edge lengths.
///
/// `l[i][j]` is the length between corners `i` and `j`. Corner 0 is placed at
/// the origin, corner 1 on the x-axis, corner 2 in the xy-plane, and corner 3
/// with positive z. Returns `None` when the lengths are not realizable
/// (non-positive Cayley–Menger content).
pub fn embed_tetrahedron(l: &[[f64; 4]; 4]) -> Option<[Vec3; 4]> {
    let d01 = l[0][1];
    if d01 <= 0.0 {
        return None;
    }
    let p1 = [d01, 0.0, 0.0];
    let x2 = (d01 * d01 + l[0][2] * l[0][2] - l[1][2] * l[1][2]) / (2.0 * d01);
    let y2sq = l[0][2] * l[0][2] - x2 * x2;
    if y2sq <= 0.0 {
        return None;
    }
    let y2 = y2sq.sqrt();
    let p2 = [x2, y2, 0.0];
    let x3 = (d01 * d01 + l[0][3] * l[0][3] - l[1][3] * l[1][3]) / (2.0 * d01);
    // p3 . p2 = (|p3|^2 + |p2|^2 - d23^2)/2
    let rhs = (l[0][3] * l[0][3] + l[0][2] * l[0][2] - l[2][3] * l[2][3]) / 2.0;
    let y3 = (rhs - x3 * x2) / y2;
    let z3sq = l[0][3] * l[0][3] - x3 * x3 - y3 * y3;
    if z3sq <= 0.0 {
        return None;
    }
    let p3 = [x3, y3, z3sq.sqrt()];
    Some([[0.0; 3], p1, p2, p3])
}

/// Signed volume of the tetrahedron spanned by four points.
pub fn signed_volume(p: &[Vec3; 4]) -> f64 {
    dot(sub(p[1], p[0]), cross(sub(p[2], p[0]), sub(p[3], p[0]))) / 6.0
}

/// Circumcenter of a tetrahedron (equidistant from all four corners).
pub fn tet_circumcenter(p: &[Vec3; 4]) -> Option<Vec3> {
    let a = sub(p[1], p[0]);
    let b = sub(p[2], p[0]);
    let c = sub(p[3], p[0]);
    let m = [
        [2.0 * a[0], 2.0 * a[1], 2.0 * a[2]],
        [2.0 * b[0], 2.0 * b[1], 2.0 * b[2]],
        [2.0 * c[0], 2.0 * c[1], 2.0 * c[2]],
    ];
    let rhs = [dot(a, a), dot(b, b), dot(c, c)];
    let x = solve3(m, rhs)?;
    Some(add(p[0], x))
}

/// Circumcenter of a triangle within its own plane.
pub fn tri_circumcenter(a: Vec3, b: Vec3, c: Vec3) -> Option<Vec3> {
    let ab = sub(b, a);
    let ac = sub(c, a);
    let n = cross(ab, ac);
    let m = [ab, ac, n];
    let rhs = [dot(ab, ab) / 2.0, dot(ac, ac) / 2.0, 0.0];
    let x = solve3(m, rhs)?;
    Some(add(a, x))
}

/// Dihedral angle in `(0, pi)` at the edge `(p0, p1)` between the faces
/// through `p2` and `p3`.
pub fn dihedral_angle(p0: Vec3, p1: Vec3, p2: Vec3, p3: Vec3) -> f64 {
    let e = sub(p1, p0);
    let n1 = cross(e, sub(p2, p0));
    let n2 = cross(e, sub(p3, p0));
    let cosv = dot(n1, n2);
    let sinv = norm(cross(n1, n2));
    sinv.atan2(cosv)
}

/// Kahan–Babuska compensated accumulator. Keeps global sums deterministic to
/// ~1e-15 relative regardless of term count.
#[derive(Clone, Copy, Debug, Default)]
pub struct KahanSum {
    sum: f64,
    comp: f64,
}

impl KahanSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.comp += (self.sum - t) + v;
        } else {
            self.comp += (v - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}
