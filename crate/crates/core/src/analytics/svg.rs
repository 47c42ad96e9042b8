use std::fmt::Write;

/// A projected circuit. `label` is `Some(true)` for infected, `Some(false)`
/// for clean and `None` when unknown.
#[derive(Debug, Clone, PartialEq)]
pub struct ScatterPoint {
    pub coords: Vec<f64>,
    pub label: Option<bool>,
}

const PANEL: f64 = 320.0;
const MARGIN: f64 = 36.0;
const MARK: f64 = 4.0;

/// SVG scatter plots of PC1 against PC2 and, when four coordinates are
/// present, PC3 against PC4. Infected circuits are drawn as `+`, clean ones
/// as `−` and unlabeled ones as dots.
pub fn scatter_svg(points: &[ScatterPoint]) -> String {
    let dims = points.iter().map(|p| p.coords.len()).min().unwrap_or(0);
    let panels: Vec<(usize, usize)> = [(0, 1), (2, 3)].into_iter().filter(|&(_, y)| y < dims).collect();
    let width = MARGIN + panels.len().max(1) as f64 * (PANEL + MARGIN);
    let height = PANEL + 2.0 * MARGIN;
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="11">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    for (i, &(cx, cy)) in panels.iter().enumerate() {
        let x0 = MARGIN + i as f64 * (PANEL + MARGIN);
        let y0 = MARGIN;
        let range = |d: usize| {
            let (lo, hi) = points.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| {
                (lo.min(p.coords[d]), hi.max(p.coords[d]))
            });
            let pad = ((hi - lo) * 0.05).max(1e-9);
            (lo - pad, hi + pad)
        };
        let (xl, xh) = range(cx);
        let (yl, yh) = range(cy);
        let _ = writeln!(s, r#"<g class="panel" id="pc{}-pc{}">"#, cx + 1, cy + 1);
        let _ = writeln!(s, r#"<rect x="{x0}" y="{y0}" width="{PANEL}" height="{PANEL}" fill="none" stroke="black"/>"#);
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">PC{}</text>"#,
            x0 + PANEL / 2.0,
            y0 + PANEL + 24.0,
            cx + 1
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="middle" transform="rotate(-90 {:.1} {:.1})">PC{}</text>"#,
            x0 - 12.0,
            y0 + PANEL / 2.0,
            x0 - 12.0,
            y0 + PANEL / 2.0,
            cy + 1
        );
        for p in points {
            let px = x0 + (p.coords[cx] - xl) / (xh - xl) * PANEL;
            let py = y0 + PANEL - (p.coords[cy] - yl) / (yh - yl) * PANEL;
            match p.label {
                Some(true) => {
                    let _ = writeln!(
                        s,
                        r#"<path class="infected" d="M{:.2} {py:.2}H{:.2}M{px:.2} {:.2}V{:.2}" stroke="crimson"/>"#,
                        px - MARK,
                        px + MARK,
                        py - MARK,
                        py + MARK
                    );
                }
                Some(false) => {
                    let _ = writeln!(
                        s,
                        r#"<path class="clean" d="M{:.2} {py:.2}H{:.2}" stroke="navy"/>"#,
                        px - MARK,
                        px + MARK
                    );
                }
                None => {
                    let _ = writeln!(s, r#"<circle class="unlabeled" cx="{px:.2}" cy="{py:.2}" r="1.5" fill="gray"/>"#);
                }
            }
        }
        let _ = writeln!(s, "</g>");
    }
    s.push_str("</svg>\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn markers_and_panels() {
        let pts = vec![
            ScatterPoint { coords: vec![0.0, 1.0, 2.0, 3.0], label: Some(true) },
            ScatterPoint { coords: vec![1.0, 0.0, -1.0, 0.5], label: Some(false) },
            ScatterPoint { coords: vec![0.5, 0.5, 0.0, 0.0], label: None },
        ];
        let svg = scatter_svg(&pts);
        assert_eq!(svg.matches(r#"class="panel""#).count(), 2);
        assert_eq!(svg.matches(r#"class="infected""#).count(), 2);
        assert_eq!(svg.matches(r#"class="clean""#).count(), 2);
        let two: Vec<ScatterPoint> = pts.iter().map(|p| ScatterPoint { coords: p.coords[..2].to_vec(), label: p.label }).collect();
        assert_eq!(scatter_svg(&two).matches(r#"class="panel""#).count(), 1);
    }
}
