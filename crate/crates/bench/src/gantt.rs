//! SVG timeline of a schedule: one lane per processor and one per link,
//! interleaved top to bottom as P1, L1, P2, ..., Pm.

use std::fmt::Write;

use divload_core::{Platform, Schedule};

const LEFT: f64 = 50.0;
const TOP: f64 = 20.0;
const PLOT_WIDTH: f64 = 800.0;
const LANE: f64 = 28.0;
const GAP: f64 = 8.0;
const AXIS: f64 = 30.0;
const TICKS: usize = 5;

const PALETTE: [&str; 8] = [
    "#4e79a7", "#f28e2b", "#59a14f", "#e15759", "#76b7b2", "#edc948", "#b07aa1", "#9c755f",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Lane {
    Processor(usize),
    Link(usize),
}

pub fn lanes(p: &Platform) -> Vec<Lane> {
    let mut out = Vec::with_capacity(2 * p.m());
    for i in 0..p.m() {
        out.push(Lane::Processor(i));
        if i < p.links() {
            out.push(Lane::Link(i));
        }
    }
    out
}

/// Horizontal pixel position of time `t` for a chart ending at `horizon`.
pub fn x_of(t: f64, horizon: f64) -> f64 {
    LEFT + PLOT_WIDTH * t / horizon
}

/// Renders `s` on `p`. Zero-length activities are not drawn.
pub fn render_gantt(p: &Platform, s: &Schedule) -> String {
    let lanes = lanes(p);
    let horizon = if s.makespan > 0.0 { s.makespan } else { 1.0 };
    let height = TOP + lanes.len() as f64 * (LANE + GAP) + AXIS;
    let width = LEFT + PLOT_WIDTH + 20.0;
    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" font-family="sans-serif" font-size="10">"#
    );
    for (k, lane) in lanes.iter().enumerate() {
        let y = TOP + k as f64 * (LANE + GAP);
        let (name, starts, ends) = match *lane {
            Lane::Processor(i) => (format!("P{}", i + 1), &s.comp_start[i], &s.comp_end[i]),
            Lane::Link(l) => (format!("L{}", l + 1), &s.comm_start[l], &s.comm_end[l]),
        };
        let _ = writeln!(
            svg,
            r#"<text class="lane" x="4" y="{:.2}">{name}</text>"#,
            y + LANE * 0.65
        );
        let _ = writeln!(
            svg,
            r##"<line x1="{LEFT}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="#ccc"/>"##,
            y + LANE,
            LEFT + PLOT_WIDTH,
            y + LANE
        );
        for (n, (st, en)) in starts.iter().zip(ends).enumerate() {
            for (j, (&a, &b)) in st.iter().zip(en).enumerate() {
                if b <= a {
                    continue;
                }
                let (x0, x1) = (x_of(a, horizon), x_of(b, horizon));
                let kind = match lane {
                    Lane::Processor(_) => "comp",
                    Lane::Link(_) => "comm",
                };
                let _ = writeln!(
                    svg,
                    r#"<rect class="{kind}" x="{x0:.3}" y="{y:.2}" width="{:.3}" height="{LANE}" fill="{}" stroke="black" stroke-width="0.5"><title>load {} installment {}: {a:e} to {b:e}</title></rect>"#,
                    x1 - x0,
                    PALETTE[n % PALETTE.len()],
                    n + 1,
                    j + 1
                );
                if x1 - x0 > 18.0 {
                    let _ = writeln!(
                        svg,
                        r#"<text x="{:.3}" y="{:.2}" text-anchor="middle">{}.{}</text>"#,
                        0.5 * (x0 + x1),
                        y + LANE * 0.65,
                        n + 1,
                        j + 1
                    );
                }
            }
        }
    }
    let axis_y = TOP + lanes.len() as f64 * (LANE + GAP);
    let _ = writeln!(
        svg,
        r#"<line x1="{LEFT}" y1="{axis_y:.2}" x2="{:.2}" y2="{axis_y:.2}" stroke="black"/>"#,
        LEFT + PLOT_WIDTH
    );
    for k in 0..=TICKS {
        let t = horizon * k as f64 / TICKS as f64;
        let x = x_of(t, horizon);
        let _ = writeln!(
            svg,
            r#"<line x1="{x:.3}" y1="{axis_y:.2}" x2="{x:.3}" y2="{:.2}" stroke="black"/><text x="{x:.3}" y="{:.2}" text-anchor="middle">{}</text>"#,
            axis_y + 4.0,
            axis_y + 16.0,
            format_seconds(t)
        );
    }
    let _ = writeln!(
        svg,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="end">time (s)</text>"#,
        LEFT + PLOT_WIDTH,
        axis_y + 28.0
    );
    svg.push_str("</svg>\n");
    svg
}

fn format_seconds(t: f64) -> String {
    if t == 0.0 {
        "0".to_string()
    } else if (1e-3..1e4).contains(&t.abs()) {
        format!("{}", (t * 1e4).round() / 1e4)
    } else {
        format!("{t:.3e}")
    }
}
