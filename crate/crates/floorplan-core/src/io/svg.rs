//! Placement figures: one rectangle per block, fixed blocks shaded
//! differently, bounding-box outline, cost in the document title.

use std::path::Path;

use crate::cost::CostBreakdown;
use crate::error::{Error, Result};
use crate::model::ProblemInstance;
use crate::packer::Packing;

const CANVAS: f64 = 1000.0;
const MARGIN: f64 = 20.0;

pub fn render_svg(
    instance: &ProblemInstance,
    p: &Packing,
    cost: &CostBreakdown,
    path: impl AsRef<Path>,
) -> Result<()> {
    let path = path.as_ref();
    let svg = render_svg_string(instance, p, cost);
    std::fs::write(path, svg).map_err(|e| Error::io(path, e))
}

pub fn render_svg_string(instance: &ProblemInstance, p: &Packing, cost: &CostBreakdown) -> String {
    // world extents, including any fixed block below/left of the origin
    let mut min_x: f64 = 0.0;
    let mut min_y: f64 = 0.0;
    for b in &instance.blocks {
        let (x, y) = p.origin(b.id);
        min_x = min_x.min(x);
        min_y = min_y.min(y);
    }
    let world_w = p.bbox_width.max(1e-9);
    let world_h = p.bbox_height.max(1e-9);
    let scale = (CANVAS - 2.0 * MARGIN) / world_w.max(world_h);
    let view_w = world_w * scale + 2.0 * MARGIN;
    let view_h = world_h * scale + 2.0 * MARGIN;

    // SVG y grows downward; flip so the origin sits at the lower left
    let tx = |x: f64| MARGIN + (x - min_x) * scale;
    let ty = |y: f64, h: f64| view_h - MARGIN - (y - min_y + h) * scale;

    let mut out = String::new();
    out.push_str(&format!(
        "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n\
         <svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{view_w:.1}\" height=\"{view_h:.1}\" \
         viewBox=\"0 0 {view_w:.1} {view_h:.1}\">\n"
    ));
    out.push_str(&format!(
        "<title>{} | area {:.1} wirelength {:.1} total {:.1}</title>\n",
        escape(&instance.name),
        cost.area,
        cost.wirelength,
        cost.total
    ));
    out.push_str(&format!(
        "<rect class=\"bbox\" x=\"{:.2}\" y=\"{:.2}\" width=\"{:.2}\" height=\"{:.2}\" \
         fill=\"none\" stroke=\"#333\" stroke-width=\"1.5\" stroke-dasharray=\"6 3\"/>\n",
        tx(min_x),
        ty(min_y, world_h),
        world_w * scale,
        world_h * scale
    ));
    for b in &instance.blocks {
        let (x, y) = p.origin(b.id);
        let fill = if b.is_fixed() { "#c44" } else { "#7ab" };
        out.push_str(&format!(
            "<rect class=\"block\" x=\"{:.2}\" y=\"{:.2}\" width=\"{:.2}\" height=\"{:.2}\" \
             fill=\"{fill}\" fill-opacity=\"0.7\" stroke=\"#222\" stroke-width=\"0.8\"/>\n",
            tx(x),
            ty(y, b.height),
            b.width * scale,
            b.height * scale
        ));
        let font = (b.width.min(b.height) * scale * 0.4).clamp(4.0, 18.0);
        out.push_str(&format!(
            "<text x=\"{:.2}\" y=\"{:.2}\" font-size=\"{font:.1}\" text-anchor=\"middle\" \
             dominant-baseline=\"middle\" font-family=\"sans-serif\">{}</text>\n",
            tx(x + b.width / 2.0),
            ty(y + b.height / 2.0, 0.0),
            escape(&b.name)
        ));
    }
    out.push_str("</svg>\n");
    out
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
