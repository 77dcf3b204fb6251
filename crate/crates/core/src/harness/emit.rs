//! Trace exports: CSV, observable tables and space-time diagrams.

use std::fmt::Write as _;

use crate::error::Result;
use crate::kinematics::{InertialSignature, Trace};
use crate::lattice::{BodyRef, Color, Direction, Topology};
use crate::rational::{self, Rational};

pub const CSV_HEADER: &str = "t,body_id,color,x,dir,turned,tau,s";

/// One row per representative and time step `0..=T`. `turned` describes the
/// step `t -> t+1` and is left empty at `t = T`.
pub fn trace_csv(trace: &Trace) -> Result<String> {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    let placements = trace.initial().placements();
    let series = placements
        .iter()
        .map(|p| trace.elementary_observables(BodyRef::new(p.id)))
        .collect::<Result<Vec<_>>>()?;
    for t in 0..=trace.horizon() {
        let snapshot = &trace.snapshots()[t as usize];
        for (idx, (p, obs)) in placements.iter().zip(&series).enumerate() {
            let edge = snapshot.placements()[idx].edge;
            let dir = match edge.dir {
                Direction::Plus => "+1",
                Direction::Minus => "-1",
            };
            let turned = if t < trace.horizon() {
                if trace.turned(idx, t) {
                    "1"
                } else {
                    "0"
                }
            } else {
                ""
            };
            let t_us = t as usize;
            writeln!(
                out,
                "{t},{},{},{},{dir},{turned},{},{}",
                p.id, p.color, obs.x[t_us], obs.tau[t_us], obs.s[t_us]
            )
            .expect("writing to a String");
        }
    }
    Ok(out)
}

/// Collective observables of `members` as CSV with exact `p/q` values,
/// preceded by the inertial signature when one was found.
pub fn observables_table(trace: &Trace, members: &[BodyRef], signature: Option<&InertialSignature>) -> Result<String> {
    let obs = trace.body_observables(members)?;
    let mut out = String::new();
    let names: Vec<String> = obs.members.iter().map(|b| b.to_string()).collect();
    writeln!(out, "# members: {}", names.join(" ")).expect("writing to a String");
    match signature {
        Some(s) => writeln!(
            out,
            "# inertial: p={} d={} v={} w={}",
            s.period,
            s.displacement,
            rational::full(&s.v),
            rational::full(&s.w)
        ),
        None => writeln!(out, "# inertial: none"),
    }
    .expect("writing to a String");
    out.push_str("t,x,v,w,tau\n");
    for t in 0..obs.x.len() {
        let step = |series: &[Rational]| series.get(t).map(rational::full).unwrap_or_default();
        writeln!(
            out,
            "{t},{},{},{},{}",
            rational::full(&obs.x[t]),
            step(&obs.v),
            step(&obs.w),
            rational::full(&obs.tau[t])
        )
        .expect("writing to a String");
    }
    Ok(out)
}

/// Bodies drawn in a diagram: every representative, plus the copies
/// `-(n/2) ..` spanning `window` periods in a periodic world.
fn drawn_bodies(trace: &Trace, window: u32) -> Vec<(BodyRef, Color)> {
    let copies: Vec<i64> = match trace.initial().topology() {
        Topology::Finite => vec![0],
        Topology::Periodic(_) => {
            let n = window.max(1) as i64;
            (-(n / 2)..n - n / 2).collect()
        }
    };
    let mut out = Vec::new();
    for &c in &copies {
        for p in trace.initial().placements() {
            out.push((BodyRef::copy(p.id, c), p.color));
        }
    }
    out
}

/// Space-time diagram as text: one row per time step, latest on top. A cell
/// shows `>` or `<` for bodies moving right or left, `x` when both occur.
pub fn text_diagram(trace: &Trace, window: u32) -> Result<String> {
    let bodies = drawn_bodies(trace, window);
    let mut rows: Vec<Vec<(i64, Direction)>> = Vec::new();
    for t in 0..=trace.horizon() {
        let row = bodies
            .iter()
            .map(|(b, _)| trace.edge(*b, t).map(|e| (e.x, e.dir)))
            .collect::<Result<Vec<_>>>()?;
        rows.push(row);
    }
    let (lo, hi) = match trace.initial().period() {
        Some(lambda) => {
            let n = window.max(1) as i64;
            let lo = -(n / 2) * lambda;
            (lo, lo + n * lambda - 1)
        }
        None => {
            let xs = rows.iter().flatten().map(|(x, _)| *x);
            (xs.clone().min().unwrap_or(0), xs.max().unwrap_or(0))
        }
    };
    let width = (hi - lo + 1) as usize;
    let fold = |x: i64| -> Option<usize> {
        let x = match trace.initial().period() {
            Some(lambda) => lo + (x - lo).rem_euclid(width as i64 / lambda * lambda),
            None => x,
        };
        (lo..=hi).contains(&x).then(|| (x - lo) as usize)
    };
    let mut out = String::new();
    let label = trace.horizon().to_string().len();
    for (t, row) in rows.iter().enumerate().rev() {
        let mut cells = vec!['.'; width];
        for &(x, dir) in row {
            if let Some(i) = fold(x) {
                let mark = if dir == Direction::Plus { '>' } else { '<' };
                cells[i] = match cells[i] {
                    '.' => mark,
                    c if c == mark => mark,
                    _ => 'x',
                };
            }
        }
        let line: String = cells.into_iter().collect();
        writeln!(out, "{t:>label$} |{line}|").expect("writing to a String");
    }
    writeln!(out, "{:>label$}  x = {lo}..{hi}", "").expect("writing to a String");
    Ok(out)
}

const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf", "#8c564b", "#e377c2",
];

/// Space-time diagram as SVG. Time runs upwards; each body's continuous
/// world line over `[-1/2, T + 1/2]` is drawn as a polyline.
pub fn svg_diagram(trace: &Trace, window: u32) -> Result<String> {
    const SCALE: f64 = 16.0;
    const MARGIN: f64 = 24.0;
    let (t_lo, t_hi) = trace.window();
    let mut lines = Vec::new();
    for (body, color) in drawn_bodies(trace, window) {
        lines.push((body, color, trace.world_line(body, &t_lo, &t_hi)?));
    }
    let to_f = |r: &Rational| -> f64 {
        let n: f64 = r.numer().to_string().parse().unwrap_or(0.0);
        let d: f64 = r.denom().to_string().parse().unwrap_or(1.0);
        n / d
    };
    let xs = lines.iter().flat_map(|(_, _, pts)| pts.iter().map(|p| to_f(&p.x)));
    let x_lo = xs.clone().fold(f64::INFINITY, f64::min).min(0.0);
    let x_hi = xs.fold(f64::NEG_INFINITY, f64::max).max(0.0);
    let (t_lo_f, t_hi_f) = (to_f(&t_lo), to_f(&t_hi));
    let width = (x_hi - x_lo) * SCALE + 2.0 * MARGIN;
    let height = (t_hi_f - t_lo_f) * SCALE + 2.0 * MARGIN;
    let px = |x: f64| (x - x_lo) * SCALE + MARGIN;
    let py = |t: f64| height - MARGIN - (t - t_lo_f) * SCALE;

    let mut out = String::new();
    writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width:.0}" height="{height:.0}" viewBox="0 0 {width:.0} {height:.0}">"#
    )
    .expect("writing to a String");
    writeln!(out, r#"  <rect width="100%" height="100%" fill="white"/>"#).expect("writing to a String");
    for t in 0..=trace.horizon() {
        let y = py(t as f64);
        writeln!(
            out,
            r##"  <line x1="{:.1}" y1="{y:.1}" x2="{:.1}" y2="{y:.1}" stroke="#eeeeee" stroke-width="0.5"/>"##,
            px(x_lo),
            px(x_hi)
        )
        .expect("writing to a String");
    }
    for (body, color, pts) in &lines {
        let coords: Vec<String> = pts
            .iter()
            .map(|p| format!("{:.2},{:.2}", px(to_f(&p.x)), py(to_f(&p.t))))
            .collect();
        let opacity = if body.copy == 0 { "1" } else { "0.45" };
        writeln!(
            out,
            r#"  <polyline data-body="{body}" points="{}" fill="none" stroke="{}" stroke-opacity="{opacity}" stroke-width="1.5"/>"#,
            coords.join(" "),
            PALETTE[*color as usize % PALETTE.len()]
        )
        .expect("writing to a String");
    }
    writeln!(out, "</svg>").expect("writing to a String");
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::scenario::{Run, Scenario};
    use crate::kinematics::Limits;

    fn run(name: &str) -> Run {
        Run::new(Scenario::builtin(name).unwrap(), &Limits::default()).unwrap()
    }

    #[test]
    fn csv_has_one_row_per_body_and_step() {
        let r = run("example2");
        let csv = trace_csv(&r.traces[0]).unwrap();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], CSV_HEADER);
        assert_eq!(lines.len(), 1 + 3 * (r.scenario.horizon as usize + 1));
        assert_eq!(lines[1], "0,0,1,0,+1,1,0,0");
        assert!(lines.last().unwrap().split(',').nth(5).unwrap().is_empty());
    }

    #[test]
    fn text_diagram_rows() {
        let r = run("example1");
        let text = text_diagram(&r.traces[0], 1).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), r.scenario.horizon as usize + 2);
        assert!(lines[0].starts_with("64 |"));
        assert!(lines[lines.len() - 2].trim_start().starts_with("0 |><|"));
    }

    #[test]
    fn svg_lists_every_drawn_copy() {
        let r = run("example2");
        let svg = svg_diagram(&r.traces[0], 3).unwrap();
        assert_eq!(svg.matches("<polyline").count(), 9);
        assert!(svg.starts_with("<svg"));
    }

    #[test]
    fn observables_are_exact() {
        let r = run("example2");
        let (trace, members) = r.body("A2").unwrap();
        let sig = trace.inertial_signature(&members, 64).unwrap();
        let table = observables_table(trace, &members, sig.as_ref()).unwrap();
        assert!(table.contains("# inertial: p=3 d=1 v=1/3 w=2/3"));
        assert!(table.contains("\n1,4/3,1/3,2/3,2/3\n"));
    }
}
