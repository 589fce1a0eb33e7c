//! Static SVG scatter plots of point sets with region outlines.
//!
//! Output depends only on the input values: coordinates are written with a
//! fixed number of decimals and elements appear in input order.

use std::fmt::Write as _;
use std::path::Path;

use polygeom::{CircularRegion64, Complex64, RegionKind};

use crate::error::Result;
use crate::json::write_text;

const SIZE: f64 = 480.0;
const MARGIN: f64 = 24.0;
const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

#[derive(Debug, Clone, PartialEq)]
pub struct PointSet {
    pub label: String,
    pub points: Vec<Complex64>,
}

impl PointSet {
    pub fn new(label: impl Into<String>, points: Vec<Complex64>) -> Self {
        PointSet {
            label: label.into(),
            points,
        }
    }
}

/// World-to-pixel map for a square view.
struct View {
    lo: Complex64,
    span: f64,
}

impl View {
    fn fit(sets: &[PointSet], regions: &[CircularRegion64]) -> Self {
        let mut xs = Vec::new();
        for set in sets {
            xs.extend(set.points.iter().copied());
        }
        for r in regions {
            match r.kind {
                RegionKind::Disk { center, radius } | RegionKind::ExteriorDisk { center, radius } => {
                    xs.push(center + Complex64::new(radius, radius));
                    xs.push(center - Complex64::new(radius, radius));
                }
                RegionKind::HalfPlane { direction, offset } => xs.push(direction * offset),
            }
        }
        let xs: Vec<Complex64> = xs.into_iter().filter(|z| z.re.is_finite() && z.im.is_finite()).collect();
        if xs.is_empty() {
            return View {
                lo: Complex64::new(-1.0, -1.0),
                span: 2.0,
            };
        }
        let (mut lo, mut hi) = (xs[0], xs[0]);
        for z in &xs {
            lo = Complex64::new(lo.re.min(z.re), lo.im.min(z.im));
            hi = Complex64::new(hi.re.max(z.re), hi.im.max(z.im));
        }
        let mut span = (hi.re - lo.re).max(hi.im - lo.im);
        if span <= 0.0 {
            span = 2.0 * (1.0 + lo.norm()) * 1e-3;
        }
        let mid = (lo + hi) * 0.5;
        let span = span * 1.1;
        View {
            lo: mid - Complex64::new(span, span) * 0.5,
            span,
        }
    }

    fn scale(&self) -> f64 {
        (SIZE - 2.0 * MARGIN) / self.span
    }

    fn px(&self, z: Complex64) -> (f64, f64) {
        let s = self.scale();
        (MARGIN + (z.re - self.lo.re) * s, SIZE - MARGIN - (z.im - self.lo.im) * s)
    }

    fn corners(&self) -> [Complex64; 4] {
        let lo = self.lo;
        let d = self.span;
        [
            lo,
            lo + Complex64::new(d, 0.0),
            lo + Complex64::new(d, d),
            lo + Complex64::new(0.0, d),
        ]
    }
}

/// Part of the view square on the side `Re(z conj(direction)) <= offset`.
fn clip_half_plane(corners: &[Complex64], direction: Complex64, offset: f64) -> Vec<Complex64> {
    let side = |z: Complex64| (z * direction.conj()).re - offset;
    let mut out = Vec::new();
    for i in 0..corners.len() {
        let (a, b) = (corners[i], corners[(i + 1) % corners.len()]);
        let (sa, sb) = (side(a), side(b));
        if sa <= 0.0 {
            out.push(a);
        }
        if (sa < 0.0 && sb > 0.0) || (sa > 0.0 && sb < 0.0) {
            out.push(a + (b - a) * (sa / (sa - sb)));
        }
    }
    out
}

fn fmt_path(view: &View, poly: &[Complex64]) -> String {
    let mut d = String::new();
    for (i, z) in poly.iter().enumerate() {
        let (x, y) = view.px(*z);
        let _ = write!(d, "{}{x:.3},{y:.3} ", if i == 0 { "M" } else { "L" });
    }
    d.push('Z');
    d
}

/// Renders the scatter as an SVG document.
pub fn render_svg(sets: &[PointSet], regions: &[CircularRegion64]) -> String {
    let view = View::fit(sets, regions);
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}">"#
    );
    let _ = writeln!(out, r#"<rect width="{SIZE}" height="{SIZE}" fill="white"/>"#);
    for region in regions {
        let dash = if region.closed { "" } else { r#" stroke-dasharray="2,3""# };
        match region.kind {
            RegionKind::Disk { center, radius } => {
                let (x, y) = view.px(center);
                let _ = writeln!(
                    out,
                    r##"<circle class="region disk" cx="{x:.3}" cy="{y:.3}" r="{:.3}" fill="#888888" fill-opacity="0.12" stroke="#444444"{dash}/>"##,
                    radius * view.scale()
                );
            }
            RegionKind::ExteriorDisk { center, radius } => {
                let (x, y) = view.px(center);
                let _ = writeln!(
                    out,
                    r##"<circle class="region exterior" cx="{x:.3}" cy="{y:.3}" r="{:.3}" fill="none" stroke="#444444" stroke-dasharray="6,4"/>"##,
                    radius * view.scale()
                );
            }
            RegionKind::HalfPlane { direction, offset } => {
                let inside = clip_half_plane(&view.corners(), direction, offset);
                if inside.len() >= 3 {
                    let _ = writeln!(
                        out,
                        r##"<path class="region halfplane" d="{}" fill="#888888" fill-opacity="0.12" stroke="none"/>"##,
                        fmt_path(&view, &inside)
                    );
                }
                let normal = direction * offset;
                let tangent = direction * Complex64::i() * (view.span * 4.0);
                let (x1, y1) = view.px(normal - tangent);
                let (x2, y2) = view.px(normal + tangent);
                let _ = writeln!(
                    out,
                    r##"<line class="region boundary" x1="{x1:.3}" y1="{y1:.3}" x2="{x2:.3}" y2="{y2:.3}" stroke="#444444"{dash}/>"##
                );
            }
        }
    }
    for (i, set) in sets.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        for z in &set.points {
            let (x, y) = view.px(*z);
            let _ = writeln!(
                out,
                r#"<circle class="marker" cx="{x:.3}" cy="{y:.3}" r="3.5" fill="{color}"/>"#
            );
        }
        let _ = writeln!(
            out,
            r#"<text x="{MARGIN}" y="{:.3}" font-family="sans-serif" font-size="12" fill="{color}">{}</text>"#,
            MARGIN + 14.0 * i as f64,
            escape(&set.label)
        );
    }
    out.push_str("</svg>\n");
    out
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

pub fn emit_svg(sets: &[PointSet], regions: &[CircularRegion64], path: &Path) -> Result<()> {
    write_text(path, &render_svg(sets, regions))
}
