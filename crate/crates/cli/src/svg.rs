//! Cosmetic SVG snapshots: the disk is drawn as concentric rings of heptagon
//! glyphs shrinking toward the rim, suggesting the hyperbolic metric. The
//! layout is combinatorial (ring index and position), not a true isometric
//! embedding; snapshots never take part in verification.

use std::f64::consts::PI;

use hepta_core::rules::CellState;
use hepta_core::Configuration;

const SIZE: f64 = 720.0;
const DISK_R: f64 = 340.0;

/// Euclidean radius of ring `k` inside the unit disk.
fn ring_radius(k: usize) -> f64 {
    // tanh-like progression: rings crowd toward the rim
    let q: f64 = 0.62;
    1.0 - q.powi(k as i32)
}

pub fn render(config: &Configuration, max_ring: usize) -> String {
    let disk = config.disk();
    let max_ring = max_ring.min(disk.radius());
    let mut out = String::new();
    out.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{s}\" height=\"{s}\" \
         viewBox=\"0 0 {s} {s}\">\n",
        s = SIZE
    ));
    out.push_str(&format!(
        "<circle cx=\"{c}\" cy=\"{c}\" r=\"{r}\" fill=\"#fdfdfd\" stroke=\"#999\"/>\n",
        c = SIZE / 2.0,
        r = DISK_R + 12.0
    ));

    let sizes = disk.ring_sizes();
    let mut by_ring: Vec<Vec<_>> = vec![Vec::new(); sizes.len()];
    for cell in disk.cells() {
        let ring = disk.ring_of(cell).unwrap();
        if ring <= max_ring {
            by_ring[ring].push(cell);
        }
    }
    for (ring, cells) in by_ring.iter().enumerate() {
        let n = cells.len().max(1) as f64;
        let rho = ring_radius(ring) * DISK_R;
        let next_rho = ring_radius(ring + 1) * DISK_R;
        let glyph = ((next_rho - rho) * 0.44).max(1.4);
        for (pos, &cell) in cells.iter().enumerate() {
            let theta = 2.0 * PI * (pos as f64 + 0.5) / n - PI / 2.0;
            let (x, y) = (
                SIZE / 2.0 + rho * theta.cos(),
                SIZE / 2.0 + rho * theta.sin(),
            );
            let (fill, stroke) = match config.state_of(cell) {
                CellState::B => ("#15226b", "#0b123a"),
                CellState::W if config.is_active(cell) => ("#fff7cf", "#b5a243"),
                CellState::W => ("#ffffff", "#cccccc"),
            };
            out.push_str(&heptagon(x, y, glyph, theta + PI / 2.0, fill, stroke));
        }
    }
    out.push_str("</svg>\n");
    out
}

fn heptagon(cx: f64, cy: f64, r: f64, phase: f64, fill: &str, stroke: &str) -> String {
    let pts: Vec<String> = (0..7)
        .map(|i| {
            let t = phase + 2.0 * PI * i as f64 / 7.0;
            format!("{:.2},{:.2}", cx + r * t.cos(), cy + r * t.sin())
        })
        .collect();
    format!(
        "<polygon points=\"{}\" fill=\"{fill}\" stroke=\"{stroke}\" stroke-width=\"0.6\"/>\n",
        pts.join(" ")
    )
}
