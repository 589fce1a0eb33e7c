//! Circular regions (disks, half-planes, disk exteriors) and the planar
//! geometry used to build and check them.
//!
//! The exterior of a half-plane is again a half-plane, so three shapes cover
//! every circular region.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::{is_finite, Scalar};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RegionKind<T> {
    Disk { center: Complex<T>, radius: T },
    /// `{ z : Re(z * conj(direction)) <= offset }` with `|direction| = 1`.
    HalfPlane { direction: Complex<T>, offset: T },
    ExteriorDisk { center: Complex<T>, radius: T },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CircularRegion<T> {
    pub kind: RegionKind<T>,
    pub closed: bool,
}

impl<T: Scalar> CircularRegion<T> {
    pub fn disk(center: Complex<T>, radius: T, closed: bool) -> Result<Self> {
        check_disk(center, radius)?;
        Ok(CircularRegion {
            kind: RegionKind::Disk { center, radius },
            closed,
        })
    }

    pub fn exterior(center: Complex<T>, radius: T, closed: bool) -> Result<Self> {
        check_disk(center, radius)?;
        Ok(CircularRegion {
            kind: RegionKind::ExteriorDisk { center, radius },
            closed,
        })
    }

    /// Half-plane `Re(z * conj(direction)) <= offset`. A non-unit direction is
    /// normalized together with the offset, so the set is unchanged.
    pub fn half_plane(direction: Complex<T>, offset: T, closed: bool) -> Result<Self> {
        let len = direction.norm();
        if !is_finite(&direction) || !offset.is_finite() || len.is_zero() {
            return Err(Error::InvalidInput(
                "half-plane needs a finite nonzero direction and finite offset".into(),
            ));
        }
        Ok(CircularRegion {
            kind: RegionKind::HalfPlane {
                direction: direction / len,
                offset: offset / len,
            },
            closed,
        })
    }

    /// Negative inside, positive outside, zero on the boundary.
    pub fn signed_distance(&self, z: Complex<T>) -> T {
        match self.kind {
            RegionKind::Disk { center, radius } => (z - center).norm() - radius,
            RegionKind::ExteriorDisk { center, radius } => radius - (z - center).norm(),
            RegionKind::HalfPlane { direction, offset } => (z * direction.conj()).re - offset,
        }
    }

    /// Membership with a boundary band of half-width `tol * (1 + |z|)`: closed
    /// regions accept the band, open regions reject it.
    pub fn contains(&self, z: Complex<T>, tol: T) -> bool {
        let band = tol * (T::one() + z.norm());
        let d = self.signed_distance(z);
        if self.closed {
            d <= band
        } else {
            d < -band
        }
    }

    pub fn contains_default(&self, z: Complex<T>) -> bool {
        self.contains(z, T::membership_tol())
    }

    pub fn is_convex(&self) -> bool {
        !matches!(self.kind, RegionKind::ExteriorDisk { .. })
    }

    /// Set complement: closedness flips, shape turns inside out.
    pub fn complement(&self) -> Self {
        let kind = match self.kind {
            RegionKind::Disk { center, radius } => RegionKind::ExteriorDisk { center, radius },
            RegionKind::ExteriorDisk { center, radius } => RegionKind::Disk { center, radius },
            RegionKind::HalfPlane { direction, offset } => RegionKind::HalfPlane {
                direction: -direction,
                offset: -offset,
            },
        };
        CircularRegion {
            kind,
            closed: !self.closed,
        }
    }

    /// A point strictly inside the region.
    pub fn interior_point(&self) -> Complex<T> {
        match self.kind {
            RegionKind::Disk { center, .. } => center,
            RegionKind::ExteriorDisk { center, radius } => {
                center + Complex::new(radius + radius, T::zero())
            }
            RegionKind::HalfPlane { direction, offset } => direction * (offset - T::one()),
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self.kind {
            RegionKind::Disk { .. } => "disk",
            RegionKind::HalfPlane { .. } => "halfplane",
            RegionKind::ExteriorDisk { .. } => "exterior",
        }
    }
}

fn check_disk<T: Scalar>(center: Complex<T>, radius: T) -> Result<()> {
    if !is_finite(&center) || !radius.is_finite() || radius <= T::zero() {
        return Err(Error::InvalidInput(
            "disk needs a finite center and a positive radius".into(),
        ));
    }
    Ok(())
}

/// Closed disk; a zero radius is a single point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Disk<T> {
    pub center: Complex<T>,
    pub radius: T,
}

impl<T: Scalar> Disk<T> {
    pub fn new(center: Complex<T>, radius: T) -> Result<Self> {
        if !is_finite(&center) || !radius.is_finite() || radius < T::zero() {
            return Err(Error::InvalidInput(
                "disk needs a finite center and a nonnegative radius".into(),
            ));
        }
        Ok(Disk { center, radius })
    }

    pub fn contains(&self, z: Complex<T>, tol: T) -> bool {
        (z - self.center).norm() - self.radius <= tol * (T::one() + z.norm())
    }

    /// Same disk with radius scaled by `1 + rel` plus `rel` absolute slack.
    pub fn inflated(&self, rel: T) -> Self {
        Disk {
            center: self.center,
            radius: self.radius * (T::one() + rel) + rel,
        }
    }

    /// Closed circular region; zero-radius disks are widened to a tiny positive radius.
    pub fn to_region(&self) -> CircularRegion<T> {
        let radius = if self.radius > T::zero() {
            self.radius
        } else {
            T::min_positive_value()
        };
        CircularRegion {
            kind: RegionKind::Disk {
                center: self.center,
                radius,
            },
            closed: true,
        }
    }
}

fn cross<T: Scalar>(o: Complex<T>, a: Complex<T>, b: Complex<T>) -> T {
    (a.re - o.re) * (b.im - o.im) - (a.im - o.im) * (b.re - o.re)
}

fn disk_from_two<T: Scalar>(a: Complex<T>, b: Complex<T>) -> Disk<T> {
    let half = T::lit(0.5);
    Disk {
        center: (a + b) * half,
        radius: (a - b).norm() * half,
    }
}

fn disk_from_three<T: Scalar>(a: Complex<T>, b: Complex<T>, c: Complex<T>) -> Disk<T> {
    let bx = b - a;
    let cx = c - a;
    let d = T::lit(2.0) * (bx.re * cx.im - bx.im * cx.re);
    let scale = bx.norm_sqr().max(cx.norm_sqr());
    if d.abs() <= T::epsilon() * scale {
        // collinear: the farthest pair spans the disk
        let candidates = [disk_from_two(a, b), disk_from_two(a, c), disk_from_two(b, c)];
        return candidates
            .into_iter()
            .fold(candidates[0], |best, d| if d.radius > best.radius { d } else { best });
    }
    let b2 = bx.norm_sqr();
    let c2 = cx.norm_sqr();
    let ux = (cx.im * b2 - bx.im * c2) / d;
    let uy = (bx.re * c2 - cx.re * b2) / d;
    let offset = Complex::new(ux, uy);
    Disk {
        center: a + offset,
        radius: offset.norm(),
    }
}

fn inside<T: Scalar>(d: &Disk<T>, z: Complex<T>) -> bool {
    (z - d.center).norm() <= d.radius * (T::one() + T::lit(64.0) * T::epsilon())
}

/// Minimal closed disk containing every point (incremental Welzl construction).
/// The returned radius is enlarged, if needed, to cover every point exactly.
pub fn smallest_enclosing_disk<T: Scalar>(points: &[Complex<T>]) -> Result<Disk<T>> {
    let Some(&first) = points.first() else {
        return Err(Error::InvalidInput("enclosing disk of an empty set".into()));
    };
    let mut disk = Disk {
        center: first,
        radius: T::zero(),
    };
    for i in 1..points.len() {
        if inside(&disk, points[i]) {
            continue;
        }
        disk = Disk {
            center: points[i],
            radius: T::zero(),
        };
        for j in 0..i {
            if inside(&disk, points[j]) {
                continue;
            }
            disk = disk_from_two(points[i], points[j]);
            for k in 0..j {
                if !inside(&disk, points[k]) {
                    disk = disk_from_three(points[i], points[j], points[k]);
                }
            }
        }
    }
    let reach = points
        .iter()
        .map(|&z| (z - disk.center).norm())
        .fold(T::zero(), T::max);
    disk.radius = disk.radius.max(reach);
    Ok(disk)
}

/// Convex hull vertices in counterclockwise order, collinear points dropped.
/// Degenerate inputs give one vertex (all points equal) or two (a segment).
pub fn convex_hull<T: Scalar>(points: &[Complex<T>]) -> Vec<Complex<T>> {
    let mut pts = points.to_vec();
    pts.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    pts.dedup();
    if pts.len() <= 2 {
        return pts;
    }
    let mut hull: Vec<Complex<T>> = Vec::with_capacity(2 * pts.len());
    for pass in 0..2 {
        let start = hull.len();
        let iter: Box<dyn Iterator<Item = &Complex<T>>> = if pass == 0 {
            Box::new(pts.iter())
        } else {
            Box::new(pts.iter().rev())
        };
        for &p in iter {
            while hull.len() >= start + 2
                && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= T::zero()
            {
                hull.pop();
            }
            hull.push(p);
        }
        hull.pop();
    }
    if hull.len() < 2 {
        // all points collinear collapse to their endpoints
        return vec![pts[0], pts[pts.len() - 1]];
    }
    hull
}

fn segment_distance<T: Scalar>(a: Complex<T>, b: Complex<T>, z: Complex<T>) -> T {
    let ab = b - a;
    let len2 = ab.norm_sqr();
    if len2.is_zero() {
        return (z - a).norm();
    }
    let t = ((z - a) * ab.conj()).re / len2;
    let t = t.max(T::zero()).min(T::one());
    (z - (a + ab * t)).norm()
}

/// Zero inside or on the hull, Euclidean distance otherwise.
pub fn hull_distance<T: Scalar>(hull: &[Complex<T>], z: Complex<T>) -> T {
    match hull.len() {
        0 => T::infinity(),
        1 => (z - hull[0]).norm(),
        2 => segment_distance(hull[0], hull[1], z),
        n => {
            let inside = (0..n).all(|i| cross(hull[i], hull[(i + 1) % n], z) >= T::zero());
            if inside {
                return T::zero();
            }
            (0..n)
                .map(|i| segment_distance(hull[i], hull[(i + 1) % n], z))
                .fold(T::infinity(), T::min)
        }
    }
}
