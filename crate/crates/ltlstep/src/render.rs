//! Deterministic SVG figures: green region polygons, red stars for
//! right-foot steps, blue circles for left-foot steps, black orientation
//! arrows, brown step numbers, and a goal marker.

use std::fmt::Write as _;

use crate::model::{Foot, Scenario};
use crate::plan::FootstepPlan;

/// All styling in one place so output bytes stay stable.
mod style {
    pub const SCALE: f64 = 140.0; // px per meter
    pub const MARGIN: f64 = 0.45; // world-units margin around the content
    pub const REGION_FILL: &str = "#9ed69e";
    pub const REGION_STROKE: &str = "#2e7d32";
    pub const REGION_OPACITY: &str = "0.55";
    pub const RIGHT_COLOR: &str = "#d62728";
    pub const LEFT_COLOR: &str = "#1f77b4";
    pub const ARROW_COLOR: &str = "#000000";
    pub const NUMBER_COLOR: &str = "#8b5a2b";
    pub const GOAL_COLOR: &str = "#7b1fa2";
    pub const MARKER_RADIUS: f64 = 0.055; // meters
    pub const ARROW_LEN: f64 = 0.17;
    pub const FONT_SIZE_PX: f64 = 15.0;
}

struct Frame {
    min_x: f64,
    max_y: f64,
    width: f64,
    height: f64,
}

impl Frame {
    fn of(plan: &FootstepPlan, scenario: &Scenario) -> Frame {
        let mut min_x = f64::INFINITY;
        let mut max_x = f64::NEG_INFINITY;
        let mut min_y = f64::INFINITY;
        let mut max_y = f64::NEG_INFINITY;
        let mut take = |x: f64, y: f64| {
            min_x = min_x.min(x);
            max_x = max_x.max(x);
            min_y = min_y.min(y);
            max_y = max_y.max(y);
        };
        for region in &scenario.regions {
            for v in &region.polygon {
                take(v[0], v[1]);
            }
        }
        for s in &plan.steps {
            take(s.x, s.y);
        }
        take(scenario.goal.x, scenario.goal.y);
        min_x -= style::MARGIN;
        max_x += style::MARGIN;
        min_y -= style::MARGIN;
        max_y += style::MARGIN;
        Frame {
            min_x,
            max_y,
            width: (max_x - min_x) * style::SCALE,
            height: (max_y - min_y) * style::SCALE,
        }
    }

    fn px(&self, x: f64) -> f64 {
        (x - self.min_x) * style::SCALE
    }

    /// SVG's y axis points down; flip about the frame top.
    fn py(&self, y: f64) -> f64 {
        (self.max_y - y) * style::SCALE
    }
}

fn fmt(v: f64) -> String {
    format!("{v:.2}")
}

fn star_points(frame: &Frame, cx: f64, cy: f64, radius: f64) -> String {
    let inner = radius * 0.42;
    let mut pts = String::new();
    for i in 0..10 {
        let ang = -std::f64::consts::FRAC_PI_2 + i as f64 * std::f64::consts::PI / 5.0;
        let r = if i % 2 == 0 { radius } else { inner };
        let x = cx + r * ang.cos();
        let y = cy + r * ang.sin();
        if i > 0 {
            pts.push(' ');
        }
        let _ = write!(pts, "{},{}", fmt(frame.px(x)), fmt(frame.py(y)));
    }
    pts
}

/// Render a plan over its scenario. Identical inputs produce identical bytes.
pub fn render_svg(plan: &FootstepPlan, scenario: &Scenario) -> String {
    let frame = Frame::of(plan, scenario);
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{:.0}" height="{:.0}" viewBox="0 0 {:.0} {:.0}">"#,
        frame.width, frame.height, frame.width, frame.height
    );
    let _ = writeln!(
        out,
        r#"<rect x="0" y="0" width="{:.0}" height="{:.0}" fill="#ffffff"/>"#,
        frame.width, frame.height
    );

    for region in &scenario.regions {
        let pts: Vec<String> = region
            .polygon
            .iter()
            .map(|v| format!("{},{}", fmt(frame.px(v[0])), fmt(frame.py(v[1]))))
            .collect();
        let _ = writeln!(
            out,
            r#"<polygon class="region" points="{}" fill="{}" fill-opacity="{}" stroke="{}" stroke-width="1.5"/>"#,
            pts.join(" "),
            style::REGION_FILL,
            style::REGION_OPACITY,
            style::REGION_STROKE
        );
        // label at the polygon centroid
        let cx = region.polygon.iter().map(|v| v[0]).sum::<f64>() / region.polygon.len() as f64;
        let cy = region.polygon.iter().map(|v| v[1]).sum::<f64>() / region.polygon.len() as f64;
        let _ = writeln!(
            out,
            r#"<text x="{}" y="{}" font-size="{:.0}" fill="{}" text-anchor="middle" font-family="sans-serif">{}</text>"#,
            fmt(frame.px(cx)),
            fmt(frame.py(cy)),
            style::FONT_SIZE_PX,
            style::REGION_STROKE,
            region.name
        );
    }

    // goal marker: star outline plus its orientation arrow
    {
        let (gx, gy, gth) = (scenario.goal.x, scenario.goal.y, scenario.goal.theta);
        let _ = writeln!(out, r#"<g class="goal">"#);
        let _ = writeln!(
            out,
            r#"<polygon points="{}" fill="none" stroke="{}" stroke-width="2"/>"#,
            star_points(&frame, gx, gy, style::MARKER_RADIUS * 1.5),
            style::GOAL_COLOR
        );
        let _ = writeln!(
            out,
            r#"<line x1="{}" y1="{}" x2="{}" y2="{}" stroke="{}" stroke-width="2"/>"#,
            fmt(frame.px(gx)),
            fmt(frame.py(gy)),
            fmt(frame.px(gx + style::ARROW_LEN * gth.cos())),
            fmt(frame.py(gy + style::ARROW_LEN * gth.sin())),
            style::GOAL_COLOR
        );
        let _ = writeln!(out, "</g>");
    }

    for step in &plan.steps {
        let _ = writeln!(out, r#"<g class="step">"#);
        match step.foot {
            Foot::Right => {
                let _ = writeln!(
                    out,
                    r#"<polygon points="{}" fill="{}"/>"#,
                    star_points(&frame, step.x, step.y, style::MARKER_RADIUS * 1.35),
                    style::RIGHT_COLOR
                );
            }
            Foot::Left => {
                let _ = writeln!(
                    out,
                    r#"<circle cx="{}" cy="{}" r="{}" fill="none" stroke="{}" stroke-width="2.5"/>"#,
                    fmt(frame.px(step.x)),
                    fmt(frame.py(step.y)),
                    fmt(style::MARKER_RADIUS * style::SCALE),
                    style::LEFT_COLOR
                );
            }
        }
        // protruding orientation arrow with a small head
        let tip = (
            step.x + style::ARROW_LEN * step.theta.cos(),
            step.y + style::ARROW_LEN * step.theta.sin(),
        );
        let _ = writeln!(
            out,
            r#"<line x1="{}" y1="{}" x2="{}" y2="{}" stroke="{}" stroke-width="1.6"/>"#,
            fmt(frame.px(step.x)),
            fmt(frame.py(step.y)),
            fmt(frame.px(tip.0)),
            fmt(frame.py(tip.1)),
            style::ARROW_COLOR
        );
        for side in [-1.0, 1.0] {
            let ang = step.theta + std::f64::consts::PI + side * 0.5;
            let _ = writeln!(
                out,
                r#"<line x1="{}" y1="{}" x2="{}" y2="{}" stroke="{}" stroke-width="1.6"/>"#,
                fmt(frame.px(tip.0)),
                fmt(frame.py(tip.1)),
                fmt(frame.px(tip.0 + 0.05 * ang.cos())),
                fmt(frame.py(tip.1 + 0.05 * ang.sin())),
                style::ARROW_COLOR
            );
        }
        let _ = writeln!(
            out,
            r#"<text x="{}" y="{}" font-size="{:.0}" fill="{}" font-family="sans-serif">{}</text>"#,
            fmt(frame.px(step.x) + 7.0),
            fmt(frame.py(step.y) - 7.0),
            style::FONT_SIZE_PX,
            style::NUMBER_COLOR,
            step.index
        );
        let _ = writeln!(out, "</g>");
    }

    out.push_str("</svg>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::plan::{FootstepPlan, PlanStep, SolverStats, PLAN_SCHEMA_VERSION};

    fn mini() -> (Scenario, FootstepPlan) {
        let scenario = Scenario::from_json(
            &serde_json::json!({
                "name": "mini",
                "regions": [
                    {"name": "R1", "vertices": [[-1.0, -1.0], [1.0, -1.0], [1.0, 1.0], [-1.0, 1.0]]}
                ],
                "goal": {"x": 0.0, "y": 0.12, "theta": 0.0},
                "num_steps": 2,
                "initial_stance": [
                    {"x": 0.0, "y": -0.12, "theta": 0.0},
                    {"x": 0.0, "y": 0.12, "theta": 0.0}
                ]
            })
            .to_string(),
        )
        .unwrap();
        let plan = FootstepPlan {
            version: PLAN_SCHEMA_VERSION,
            scenario: "mini".to_string(),
            status: "optimal".to_string(),
            objective: Some(0.0),
            steps: vec![
                PlanStep {
                    index: 1,
                    foot: Foot::Right,
                    x: 0.0,
                    y: -0.12,
                    theta: 0.0,
                    region: "R1".to_string(),
                },
                PlanStep {
                    index: 2,
                    foot: Foot::Left,
                    x: 0.0,
                    y: 0.12,
                    theta: 0.0,
                    region: "R1".to_string(),
                },
            ],
            specs: Vec::new(),
            solver: SolverStats {
                nodes: 1,
                relative_gap: 0.0,
            },
        };
        (scenario, plan)
    }

    #[test]
    fn marker_counts_match_plan() {
        let (scenario, plan) = mini();
        let svg = render_svg(&plan, &scenario);
        assert_eq!(svg.matches(r#"class="step""#).count(), 2);
        assert_eq!(svg.matches(r#"class="goal""#).count(), 1);
    }

    #[test]
    fn output_is_byte_identical_across_runs() {
        let (scenario, plan) = mini();
        assert_eq!(render_svg(&plan, &scenario), render_svg(&plan, &scenario));
    }
}
