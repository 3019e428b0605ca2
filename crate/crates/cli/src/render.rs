//! SVG drawing of planar subdivisions, clipped to a box and colored by the
//! determinant sign of each cell's selection.

use std::fmt::Write;

use plcert::oracle::GridBox;
use plcert::plane::polygon_vertices;
use plcert::{Error, HPolyhedron, Halfspace, PlFunction, RVector, Result, Sign};

const SIZE: f64 = 480.0;

fn fill(sign: Sign) -> &'static str {
    match sign {
        Sign::Positive => "#3566c8",
        Sign::Negative => "#c83a35",
        Sign::Zero => "#8c8c8c",
    }
}

fn coord(v: f64) -> String {
    let s = format!("{v:.3}");
    // avoid "-0.000"
    if s.trim_start_matches('-').chars().all(|c| c == '0' || c == '.') {
        "0.000".to_string()
    } else {
        s
    }
}

/// Deterministic SVG of `f` over `bounds`. Cells are drawn in index order;
/// unbounded cells get a hatched overlay.
pub fn render_svg(f: &PlFunction, bounds: &GridBox) -> Result<String> {
    if f.dim() != 2 {
        return Err(Error::UnsupportedDimension(f.dim()));
    }
    if bounds.dim() != 2 || bounds.ranges.iter().any(|(lo, hi)| lo >= hi) {
        return Err(Error::Invalid("render box must be a nondegenerate rectangle".into()));
    }
    let (split_bounded, _) = f.split_cells()?;
    let (x0, x1) = &bounds.ranges[0];
    let (y0, y1) = &bounds.ranges[1];
    let sx = SIZE / (x1 - x0).to_f64();
    let sy = SIZE / (y1 - y0).to_f64();
    let frame = {
        let mut hs = Vec::new();
        for (j, (lo, hi)) in bounds.ranges.iter().enumerate() {
            let e = RVector::unit(2, j);
            hs.push(Halfspace::new(e.neg(), -lo)?);
            hs.push(Halfspace::new(e, hi.clone())?);
        }
        HPolyhedron::new(2, hs)?
    };

    let mut out = String::new();
    writeln!(
        out,
        r##"<svg xmlns="http://www.w3.org/2000/svg" width="{s}" height="{s}" viewBox="0 0 {s} {s}">"##,
        s = SIZE
    )
    .unwrap();
    writeln!(
        out,
        r##"<defs><pattern id="hatch" width="8" height="8" patternUnits="userSpaceOnUse" patternTransform="rotate(45)"><line x1="0" y1="0" x2="0" y2="8" stroke="#000000" stroke-width="1.5" stroke-opacity="0.4"/></pattern></defs>"##
    )
    .unwrap();
    writeln!(
        out,
        r##"<desc>box [{x0},{x1}]x[{y0},{y1}]; blue det&gt;0, red det&lt;0, gray det=0; hatched cells are unbounded</desc>"##
    )
    .unwrap();
    out.push_str("<g id=\"cells\" stroke=\"#1e1e1e\" stroke-width=\"1\">\n");
    for (i, cell) in f.cells().iter().enumerate() {
        let clipped = cell.polyhedron.intersect(&frame)?;
        if !clipped.is_full_dimensional() {
            continue;
        }
        let points: Vec<String> = polygon_vertices(&clipped)?
            .iter()
            .map(|v| {
                let px = (&v[0] - x0).to_f64() * sx;
                let py = (y1 - &v[1]).to_f64() * sy;
                format!("{},{}", coord(px), coord(py))
            })
            .collect();
        let points = points.join(" ");
        let sign = f.cell_selection(i).det_sign();
        let bounded = split_bounded.contains(&i);
        writeln!(
            out,
            r##"<polygon data-cell="{i}" data-det="{}" points="{points}" fill="{}" fill-opacity="0.6"/>"##,
            sign.as_i64(),
            fill(sign)
        )
        .unwrap();
        if !bounded {
            writeln!(
                out,
                r##"<polygon data-cell="{i}" class="unbounded" points="{points}" fill="url(#hatch)" stroke="none"/>"##
            )
            .unwrap();
        }
    }
    out.push_str("</g>\n</svg>\n");
    Ok(out)
}
