//! Deterministic text and SVG drawings of diagrams, one row per slice.
//!
//! With `show_runtime` the diagram is first encoded with an explicit runtime
//! wire. The SVG then draws that wire as a single path in the runtime color,
//! running straight through every lifted box and crossing other wires at the
//! braids.

use std::fmt::Write as _;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::diagram::Diagram;
use crate::runtime::{encode, Role, RuntimeError, RuntimeSignature, RUNTIME_SORT};
use crate::signature::SortId;

/// Column distance between adjacent wires in text mode.
const TEXT_PITCH: usize = 2;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RenderMode {
    #[default]
    Text,
    Svg,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RenderOptions {
    pub mode: RenderMode,
    /// Encode before drawing so the runtime wire is visible.
    pub show_runtime: bool,
    /// SVG pixels per wire column.
    pub cell_width: u32,
    /// SVG pixels per slice row.
    pub cell_height: u32,
    /// Color of the runtime wire and of effectful boxes.
    pub runtime_color: String,
}

impl Default for RenderOptions {
    fn default() -> Self {
        RenderOptions {
            mode: RenderMode::Text,
            show_runtime: false,
            cell_width: 40,
            cell_height: 40,
            runtime_color: "#bf616a".to_owned(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RenderError {
    #[error("cell dimensions must be positive")]
    EmptyCell,
    #[error("`{0}` is not a color: use #rgb, #rrggbb or a lowercase color name")]
    BadColor(String),
    #[error(transparent)]
    Runtime(#[from] RuntimeError),
}

impl RenderOptions {
    pub fn validate(&self) -> Result<(), RenderError> {
        if self.cell_width == 0 || self.cell_height == 0 {
            return Err(RenderError::EmptyCell);
        }
        let c = &self.runtime_color;
        let hex = c
            .strip_prefix('#')
            .is_some_and(|h| matches!(h.len(), 3 | 6) && h.chars().all(|ch| ch.is_ascii_hexdigit()));
        let named = !c.is_empty() && c.chars().all(|ch| ch.is_ascii_lowercase());
        if hex || named {
            Ok(())
        } else {
            Err(RenderError::BadColor(c.clone()))
        }
    }
}

/// Renders `d` as configured by `opts`.
pub fn render(d: &Diagram, opts: &RenderOptions) -> Result<String, RenderError> {
    opts.validate()?;
    let shown;
    let d = if opts.show_runtime {
        let rsig = Arc::new(RuntimeSignature::new(d.sig())?);
        shown = encode(&rsig, d)?.into_diagram();
        &shown
    } else {
        d
    };
    Ok(match opts.mode {
        RenderMode::Text => render_text(d),
        RenderMode::Svg => render_svg(d, opts)?,
    })
}

fn wire_row(width: usize) -> String {
    (0..width)
        .map(|i| " ".repeat(i.min(1) * (TEXT_PITCH - 1)) + "|")
        .collect()
}

/// A text grid: the domain boundary, then each level of wires with the box of
/// the next slice between levels, then the codomain boundary. Wire `i` of a
/// level sits in column `i * 2`; wires right of a wide box shift right.
pub fn render_text(d: &Diagram) -> String {
    let levels = d.levels();
    let mut rows = vec![wire_row(d.dom().len()), wire_row(levels[0].len())];
    for (k, s) in d.slices().iter().enumerate() {
        let arity = d.sig().generator(&s.gen).map_or(0, |g| g.decl.dom.len());
        let mut row = String::new();
        for i in 0..s.offset {
            pad_to(&mut row, i * TEXT_PITCH);
            row.push('|');
        }
        pad_to(&mut row, s.offset * TEXT_PITCH);
        write!(row, "[{}]", s.gen).expect("writing to a string");
        for i in s.offset + arity..levels[k].len() {
            let col = (i * TEXT_PITCH).max(row.chars().count() + 1);
            pad_to(&mut row, col);
            row.push('|');
        }
        rows.push(row);
        rows.push(wire_row(levels[k + 1].len()));
    }
    rows.push(wire_row(d.cod().len()));
    let mut out = String::new();
    for row in rows {
        out.push_str(row.trim_end());
        out.push('\n');
    }
    out
}

fn pad_to(row: &mut String, col: usize) {
    let len = row.chars().count();
    row.extend(std::iter::repeat_n(' ', col.saturating_sub(len)));
}

/// A wire being drawn: its path data so far and whether it is the runtime.
struct Pen {
    data: String,
    runtime: bool,
}

struct Layout {
    margin: i64,
    cw: i64,
    ch: i64,
}

impl Layout {
    fn x(&self, i: usize) -> i64 {
        self.margin + i as i64 * self.cw + self.cw / 2
    }

    /// Top of the row of slice `k`.
    fn row_top(&self, k: usize) -> i64 {
        self.margin + self.ch / 2 + k as i64 * self.ch
    }
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

impl Pen {
    /// Extends the pen straight down to `y`, merging with a vertical run.
    fn down(&mut self, y: i64) {
        if let Some(at) = self
            .data
            .rfind(" V ")
            .filter(|&at| !self.data[at + 3..].contains(' '))
        {
            self.data.truncate(at);
        }
        write!(self.data, " V {y}").expect("writing to a string");
    }
}

/// Moves a pen from column `from` at `y0` to column `to` at `y1`.
fn route(pen: &mut Pen, l: &Layout, from: usize, to: usize, y0: i64, y1: i64) {
    let (x0, x1) = (l.x(from), l.x(to));
    if x0 == x1 {
        pen.down(y1);
    } else {
        let mid = (y0 + y1) / 2;
        write!(pen.data, " C {x0} {mid} {x1} {mid} {x1} {y1}").expect("writing to a string");
    }
}

/// An SVG 1.1 document. Boxes are black when pure and take the runtime color
/// when effectful (or lifted, for runtime diagrams); braids are crossings.
pub fn render_svg(d: &Diagram, opts: &RenderOptions) -> Result<String, RenderError> {
    opts.validate()?;
    let rsig = RuntimeSignature::recover(d.sig()).ok();
    let r = SortId::new(RUNTIME_SORT);
    let l = Layout {
        margin: i64::from(opts.cell_width) / 2,
        cw: i64::from(opts.cell_width),
        ch: i64::from(opts.cell_height),
    };
    let levels = d.levels();
    let widest = levels.iter().map(Vec::len).max().unwrap_or(0).max(1);
    let width = 2 * l.margin + widest as i64 * l.cw;
    let bottom = l.row_top(d.len()) + l.ch / 2;
    let height = bottom + l.margin;
    let color = &opts.runtime_color;

    let mut pens: Vec<Pen> = d
        .dom()
        .iter()
        .enumerate()
        .map(|(i, sort)| Pen {
            data: format!("M {} {} V {}", l.x(i), l.margin, l.row_top(0)),
            runtime: rsig.is_some() && *sort == r,
        })
        .collect();
    let mut done: Vec<Pen> = Vec::new();
    let mut boxes = String::new();
    for (k, s) in d.slices().iter().enumerate() {
        let decl = d
            .sig()
            .generator(&s.gen)
            .expect("diagram generators are declared");
        let (a, b) = (decl.decl.dom.len(), decl.decl.cod.len());
        let (y0, y1) = (l.row_top(k), l.row_top(k + 1));
        let role = rsig.as_ref().and_then(|rs| rs.role(&s.gen));
        let mut rest = pens.split_off(s.offset);
        let right = rest.split_off(a);
        let mut inputs = rest;
        for (i, pen) in pens.iter_mut().enumerate() {
            route(pen, &l, i, i, y0, y1);
        }
        match role {
            Some(Role::Over | Role::Under) => {
                // A crossing: the two wires trade places.
                let (mut first, mut second) = (inputs.remove(0), inputs.remove(0));
                route(&mut first, &l, s.offset, s.offset + 1, y0, y1);
                route(&mut second, &l, s.offset + 1, s.offset, y0, y1);
                pens.push(second);
                pens.push(first);
            }
            _ => {
                let (top, bot) = (y0 + l.ch / 4, y0 + 3 * l.ch / 4);
                let lifted = matches!(role, Some(Role::Lifted(_)));
                let mut through = None;
                for (j, mut pen) in inputs.into_iter().enumerate() {
                    if lifted && j == 0 {
                        through = Some(pen);
                        continue;
                    }
                    pen.down(top);
                    done.push(pen);
                }
                for j in 0..b {
                    let x = l.x(s.offset + j);
                    pens.push(match through.take().filter(|_| j == 0) {
                        Some(mut pen) => {
                            pen.down(y1);
                            pen
                        }
                        None => Pen {
                            data: format!("M {x} {bot} V {y1}"),
                            runtime: false,
                        },
                    });
                }
                let cols = a.max(b).max(1) as i64;
                let pad = l.cw / 8;
                let x = l.margin + s.offset as i64 * l.cw + pad;
                let w = cols * l.cw - 2 * pad;
                let (label, effectful) = match role {
                    Some(Role::Lifted(g)) => (g, true),
                    _ => (&*s.gen, !decl.is_pure()),
                };
                let (class, stroke) = if effectful {
                    ("box effectful", color.as_str())
                } else {
                    ("box pure", "black")
                };
                writeln!(
                    boxes,
                    "  <rect class=\"{class}\" x=\"{x}\" y=\"{top}\" width=\"{w}\" height=\"{}\" fill=\"white\" stroke=\"{stroke}\"/>",
                    bot - top
                )
                .expect("writing to a string");
                writeln!(
                    boxes,
                    "  <text x=\"{}\" y=\"{}\" text-anchor=\"middle\" dominant-baseline=\"central\">{}</text>",
                    x + w / 2,
                    (top + bot) / 2,
                    escape(label)
                )
                .expect("writing to a string");
            }
        }
        for (j, mut pen) in right.into_iter().enumerate() {
            route(&mut pen, &l, s.offset + a + j, s.offset + b + j, y0, y1);
            pens.push(pen);
        }
    }
    for pen in &mut pens {
        pen.down(bottom);
    }
    done.extend(pens);

    let mut out = String::new();
    writeln!(out, "<?xml version=\"1.0\" encoding=\"UTF-8\"?>").expect("writing to a string");
    writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{width}\" height=\"{height}\" viewBox=\"0 0 {width} {height}\" font-family=\"monospace\" font-size=\"12\">"
    )
    .expect("writing to a string");
    for pen in &done {
        let (class, stroke, w) = if pen.runtime {
            ("wire runtime", color.as_str(), 2)
        } else {
            ("wire", "black", 1)
        };
        writeln!(
            out,
            "  <path class=\"{class}\" d=\"{}\" fill=\"none\" stroke=\"{stroke}\" stroke-width=\"{w}\"/>",
            pen.data
        )
        .expect("writing to a string");
    }
    out.push_str(&boxes);
    out.push_str("</svg>\n");
    Ok(out)
}
