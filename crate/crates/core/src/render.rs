//! Deterministic SVG 1.1 rendering of puzzle instances.
//!
//! Layout is all integer arithmetic (cell-size units), so output is
//! byte-identical across runs and platforms. Every content-bearing mark
//! carries `data-row`/`data-col`/`data-value` attributes; a reader that
//! collects them reconstructs exactly the initial board, which is what
//! perception questions are graded against.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::grid::{CellState, Coord};
use crate::instance::PuzzleInstance;
use crate::rules::PuzzleId;

#[derive(Clone, PartialEq, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Theme {
    /// Cell edge in user units; keep it even so centres stay integral.
    pub cell: u32,
    pub background: String,
    pub grid_line: String,
    pub bold_line: String,
    pub glyph_color: String,
    /// Cage targets and other secondary clue marks.
    pub accent_color: String,
    pub wall_fill: String,
    pub font_family: String,
    /// Tints for colour groups and region shading, cycled by id.
    pub palette: Vec<String>,
}

impl Default for Theme {
    fn default() -> Self {
        Theme {
            cell: 48,
            background: "#ffffff".into(),
            grid_line: "#b0b0b0".into(),
            bold_line: "#000000".into(),
            glyph_color: "#111111".into(),
            accent_color: "#cc2222".into(),
            wall_fill: "#333333".into(),
            font_family: "DejaVu Sans, sans-serif".into(),
            palette: vec![
                "#f4cccc".into(),
                "#fce5cd".into(),
                "#fff2cc".into(),
                "#d9ead3".into(),
                "#d0e0e3".into(),
                "#cfe2f3".into(),
                "#d9d2e9".into(),
                "#ead1dc".into(),
                "#e6b8af".into(),
                "#c9daf8".into(),
                "#b6d7a8".into(),
                "#ffe599".into(),
            ],
        }
    }
}

impl Theme {
    pub fn from_json(body: &str) -> Result<Theme, RenderError> {
        serde_json::from_str(body).map_err(|e| RenderError::BadTheme(e.to_string()))
    }
}

#[derive(Error, Debug)]
pub enum RenderError {
    #[error("unsupported structure: {0}")]
    UnsupportedStructure(String),
    #[error("affine matrix is not invertible (det = {det})")]
    NonInvertible { det: f64 },
    #[error("malformed svg: {0}")]
    MalformedSvg(String),
    #[error("bad theme: {0}")]
    BadTheme(String),
}

struct Canvas {
    cell: u32,
    body: String,
}

impl Canvas {
    fn px(&self, units: u32) -> u32 {
        units * self.cell
    }

    /// Centre of a board cell; the board starts one cell in from the margin.
    fn center(&self, r: usize, c: usize) -> (u32, u32) {
        (
            (c as u32 + 1) * self.cell + self.cell / 2,
            (r as u32 + 1) * self.cell + self.cell / 2,
        )
    }

    fn origin(&self, r: usize, c: usize) -> (u32, u32) {
        ((c as u32 + 1) * self.cell, (r as u32 + 1) * self.cell)
    }

    fn push(&mut self, s: &str) {
        self.body.push_str(s);
        self.body.push('\n');
    }

    fn text(&mut self, x: u32, y: u32, size: u32, fill: &str, family: &str, attrs: &str, body: &str) {
        self.push(&format!(
            "<text x=\"{x}\" y=\"{y}\" text-anchor=\"middle\" dominant-baseline=\"central\" \
             font-family=\"{family}\" font-size=\"{size}\" fill=\"{fill}\"{attrs}>{}</text>",
            esc(body)
        ));
    }

    fn line(&mut self, x1: u32, y1: u32, x2: u32, y2: u32, stroke: &str, width: u32) {
        self.push(&format!(
            "<line x1=\"{x1}\" y1=\"{y1}\" x2=\"{x2}\" y2=\"{y2}\" stroke=\"{stroke}\" stroke-width=\"{width}\"/>"
        ));
    }
}

fn esc(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

fn cell_attrs(r: usize, c: usize, value: &str) -> String {
    format!(" data-role=\"cell\" data-row=\"{r}\" data-col=\"{c}\" data-value=\"{value}\"")
}

/// Renders an instance's posed board (conditions and structural clues, not
/// the solution) as standalone SVG.
pub fn render_svg(instance: &PuzzleInstance, theme: &Theme) -> Result<String, RenderError> {
    let n = instance.rows;
    let cell = theme.cell.max(8);
    let mut cv = Canvas { cell, body: String::new() };
    let side = cv.px(n as u32 + 2);
    let board = cv.px(n as u32);
    let glyph_size = cell * 3 / 5;
    let label_size = cell * 2 / 5;
    let state = instance.initial_state();

    cv.push(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{side}\" height=\"{side}\" viewBox=\"0 0 {side} {side}\">"
    ));
    cv.push(&format!("<rect width=\"{side}\" height=\"{side}\" fill=\"{}\"/>", theme.background));

    // Background tints go under the grid.
    match instance.definition_id {
        PuzzleId::ColoredSudoku => {
            let groups = instance
                .structures
                .color_groups
                .as_ref()
                .ok_or_else(|| RenderError::UnsupportedStructure("missing color groups".into()))?;
            let ids: std::collections::BTreeSet<usize> = groups.iter().flatten().copied().collect();
            if ids.len() > theme.palette.len() {
                return Err(RenderError::UnsupportedStructure(format!(
                    "{} colour groups exceed the {}-colour palette",
                    ids.len(),
                    theme.palette.len()
                )));
            }
            let index_of = |id: usize| ids.iter().position(|&x| x == id).expect("id present");
            for r in 0..n {
                for c in 0..n {
                    let (x, y) = cv.origin(r, c);
                    let fill = &theme.palette[index_of(groups[r][c]) % theme.palette.len()];
                    cv.push(&format!(
                        "<rect x=\"{x}\" y=\"{y}\" width=\"{cell}\" height=\"{cell}\" fill=\"{fill}\" data-role=\"color\" data-group=\"{}\"/>",
                        groups[r][c]
                    ));
                }
            }
        }
        PuzzleId::OddEvenSudoku => {
            let parity = instance
                .structures
                .parity
                .as_ref()
                .ok_or_else(|| RenderError::UnsupportedStructure("missing parity mask".into()))?;
            for r in 0..n {
                for c in 0..n {
                    if parity[r][c] {
                        let (x, y) = cv.center(r, c);
                        cv.push(&format!(
                            "<circle cx=\"{x}\" cy=\"{y}\" r=\"{}\" fill=\"none\" stroke=\"{}\" stroke-width=\"2\" data-role=\"parity\" data-row=\"{r}\" data-col=\"{c}\" data-value=\"even\"/>",
                            cell * 2 / 5,
                            theme.grid_line
                        ));
                    }
                }
            }
        }
        _ => {}
    }

    // Thin cell grid, then the bold frame.
    for k in 0..=n as u32 {
        let at = cv.px(k + 1);
        cv.line(cv.px(1), at, cv.px(1) + board, at, &theme.grid_line, 1);
        cv.line(at, cv.px(1), at, cv.px(1) + board, &theme.grid_line, 1);
    }
    cv.push(&format!(
        "<rect x=\"{0}\" y=\"{0}\" width=\"{board}\" height=\"{board}\" fill=\"none\" stroke=\"{1}\" stroke-width=\"3\"/>",
        cv.px(1),
        theme.bold_line
    ));

    if instance.definition().uses_blocks() {
        let b = (n as f64).sqrt() as u32;
        for k in 1..(n as u32 / b) {
            let at = cv.px(1) + cv.px(k * b);
            cv.line(cv.px(1), at, cv.px(1) + board, at, &theme.bold_line, 3);
            cv.line(at, cv.px(1), at, cv.px(1) + board, &theme.bold_line, 3);
        }
    }

    // Region borders (bold segment wherever neighbouring labels differ).
    let region_grid = match instance.definition_id {
        PuzzleId::Aquarium | PuzzleId::JigsawSudoku | PuzzleId::StarBattle => {
            instance.structures.regions.clone()
        }
        _ => None,
    };
    if let Some(regions) = &region_grid {
        for r in 0..n {
            for c in 0..n {
                let (x, y) = cv.origin(r, c);
                if c + 1 < n && regions[r][c] != regions[r][c + 1] {
                    cv.line(x + cell, y, x + cell, y + cell, &theme.bold_line, 3);
                }
                if r + 1 < n && regions[r][c] != regions[r + 1][c] {
                    cv.line(x, y + cell, x + cell, y + cell, &theme.bold_line, 3);
                }
            }
        }
    }

    render_structures(instance, theme, &mut cv, label_size)?;

    // Content glyphs: one mark per decided cell of the posed board.
    for at in state.coords().collect::<Vec<Coord>>() {
        let cs = state.get(at).expect("in range");
        let token = match cs {
            CellState::Unknown => continue,
            other => other.token(),
        };
        let (x, y) = cv.center(at.row, at.col);
        let attrs = cell_attrs(at.row, at.col, token);
        match (instance.definition_id, token) {
            (_, "w") if cs == CellState::Blocked => {
                let (ox, oy) = cv.origin(at.row, at.col);
                cv.push(&format!(
                    "<rect x=\"{ox}\" y=\"{oy}\" width=\"{cell}\" height=\"{cell}\" fill=\"{}\"{attrs}/>",
                    theme.wall_fill
                ));
                if let Some(walls) = &instance.structures.walls {
                    if let Some(count) =
                        walls.iter().find(|w| w.at == at).and_then(|w| w.count)
                    {
                        cv.text(
                            x,
                            y,
                            glyph_size,
                            &theme.background,
                            &theme.font_family,
                            " data-role=\"wall-count\"",
                            &count.to_string(),
                        );
                    }
                }
            }
            (PuzzleId::Binairo, t @ ("b" | "w")) => {
                let (fill, stroke) = if t == "b" {
                    (theme.glyph_color.clone(), theme.glyph_color.clone())
                } else {
                    (theme.background.clone(), theme.glyph_color.clone())
                };
                cv.push(&format!(
                    "<circle cx=\"{x}\" cy=\"{y}\" r=\"{}\" fill=\"{fill}\" stroke=\"{stroke}\" stroke-width=\"2\"{attrs}/>",
                    cell / 3
                ));
            }
            (PuzzleId::FieldExplore, "e") => {
                // Revealed safe cells show their adjacency count, and the
                // count is also the perception-level content of the cell.
                let shown = instance
                    .structures
                    .number_clues
                    .as_ref()
                    .and_then(|clues| clues.iter().find(|cl| cl.at == at))
                    .map(|cl| cl.count.to_string())
                    .unwrap_or_else(|| "e".into());
                let attrs = cell_attrs(at.row, at.col, &shown);
                cv.text(x, y, glyph_size, &theme.glyph_color, &theme.font_family, &attrs, &shown);
            }
            (PuzzleId::TreesAndTents, "tr") => {
                cv.text(x, y, glyph_size, &theme.glyph_color, &theme.font_family, &attrs, "T");
            }
            _ => {
                cv.text(x, y, glyph_size, &theme.glyph_color, &theme.font_family, &attrs, token);
            }
        }
    }

    cv.push("</svg>");
    Ok(cv.body)
}

/// Structural clue marks (sums, counts, runs, edges, cages, paths).
fn render_structures(
    instance: &PuzzleInstance,
    theme: &Theme,
    cv: &mut Canvas,
    label_size: u32,
) -> Result<(), RenderError> {
    let n = instance.rows;
    let cell = cv.cell;
    let s = &instance.structures;
    let half = cell / 2;
    let left = half;
    let top = half;
    let right = cv.px(n as u32 + 1) + half;
    let bottom = cv.px(n as u32 + 1) + half;
    let label = |cv: &mut Canvas, x: u32, y: u32, role: &str, index: usize, body: &str| {
        cv.text(
            x,
            y,
            label_size,
            &theme.glyph_color,
            &theme.font_family,
            &format!(" data-role=\"{role}\" data-index=\"{index}\""),
            body,
        );
    };

    match instance.definition_id {
        // Row/column tallies: tents and ships read right/bottom by
        // convention; water and thermometer tallies read left/top.
        PuzzleId::BattleShips | PuzzleId::TreesAndTents => {
            let rc = s.row_counts.as_ref().expect("validated");
            let cc = s.col_counts.as_ref().expect("validated");
            for (r, v) in rc.iter().enumerate() {
                label(cv, right, cv.center(r, 0).1, "row-count", r, &v.to_string());
            }
            for (c, v) in cc.iter().enumerate() {
                label(cv, cv.center(0, c).0, bottom, "col-count", c, &v.to_string());
            }
            if instance.definition_id == PuzzleId::BattleShips {
                let fleet = s.fleet.as_ref().expect("validated");
                let text = fleet
                    .iter()
                    .map(|x| x.to_string())
                    .collect::<Vec<_>>()
                    .join(" ");
                label(cv, cv.px(1), top, "fleet", 0, &format!("fleet: {text}"));
            }
        }
        PuzzleId::Aquarium | PuzzleId::Thermometers => {
            let rc = s.row_counts.as_ref().expect("validated");
            let cc = s.col_counts.as_ref().expect("validated");
            for (r, v) in rc.iter().enumerate() {
                label(cv, left, cv.center(r, 0).1, "row-count", r, &v.to_string());
            }
            for (c, v) in cc.iter().enumerate() {
                label(cv, cv.center(0, c).0, top, "col-count", c, &v.to_string());
            }
        }
        // Weighted sums sit on the right and bottom edges.
        PuzzleId::Kakurasu => {
            let rs = s.row_sums.as_ref().expect("validated");
            let cs = s.col_sums.as_ref().expect("validated");
            for (r, v) in rs.iter().enumerate() {
                label(cv, right, cv.center(r, 0).1, "row-sum", r, &v.to_string());
            }
            for (c, v) in cs.iter().enumerate() {
                label(cv, cv.center(0, c).0, bottom, "col-sum", c, &v.to_string());
            }
        }
        PuzzleId::Kakuro => {
            let rs = s.row_sums.as_ref().expect("validated");
            let cs = s.col_sums.as_ref().expect("validated");
            for (r, v) in rs.iter().enumerate() {
                label(cv, left, cv.center(r, 0).1, "row-sum", r, &v.to_string());
            }
            for (c, v) in cs.iter().enumerate() {
                label(cv, cv.center(0, c).0, top, "col-sum", c, &v.to_string());
            }
        }
        PuzzleId::Skyscraper => {
            let clues = s.view_clues.as_ref().expect("validated");
            for (c, v) in clues.top.iter().enumerate() {
                label(cv, cv.center(0, c).0, top, "view-top", c, &v.to_string());
            }
            for (c, v) in clues.bottom.iter().enumerate() {
                label(cv, cv.center(0, c).0, bottom, "view-bottom", c, &v.to_string());
            }
            for (r, v) in clues.left.iter().enumerate() {
                label(cv, left, cv.center(r, 0).1, "view-left", r, &v.to_string());
            }
            for (r, v) in clues.right.iter().enumerate() {
                label(cv, right, cv.center(r, 0).1, "view-right", r, &v.to_string());
            }
        }
        PuzzleId::Nonogram => {
            let rr = s.row_runs.as_ref().expect("validated");
            let cr = s.col_runs.as_ref().expect("validated");
            let join = |runs: &Vec<u32>| {
                if runs.is_empty() {
                    "0".to_string()
                } else {
                    runs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ")
                }
            };
            for (r, runs) in rr.iter().enumerate() {
                label(cv, left, cv.center(r, 0).1, "row-runs", r, &join(runs));
            }
            for (c, runs) in cr.iter().enumerate() {
                label(cv, cv.center(0, c).0, top, "col-runs", c, &join(runs));
            }
        }
        PuzzleId::Futoshiki => {
            for (i, ineq) in s.inequalities.as_ref().expect("validated").iter().enumerate() {
                let (sx, sy) = cv.center(ineq.small.row, ineq.small.col);
                let (lx, ly) = cv.center(ineq.large.row, ineq.large.col);
                let (mx, my) = ((sx + lx) / 2, (sy + ly) / 2);
                // Point at the smaller cell, like the usual < and > marks.
                let glyph = if ineq.small.row == ineq.large.row {
                    if ineq.small.col < ineq.large.col {
                        "<"
                    } else {
                        ">"
                    }
                } else if ineq.small.row < ineq.large.row {
                    "^"
                } else {
                    "v"
                };
                cv.text(
                    mx,
                    my,
                    label_size,
                    &theme.accent_color,
                    &theme.font_family,
                    &format!(
                        " data-role=\"inequality\" data-index=\"{i}\" data-small=\"{},{}\" data-large=\"{},{}\"",
                        ineq.small.row, ineq.small.col, ineq.large.row, ineq.large.col
                    ),
                    glyph,
                );
            }
        }
        PuzzleId::Renzoku => {
            for (i, dot) in s.dots.as_ref().expect("validated").iter().enumerate() {
                let (ax, ay) = cv.center(dot.a.row, dot.a.col);
                let (bx, by) = cv.center(dot.b.row, dot.b.col);
                cv.push(&format!(
                    "<circle cx=\"{}\" cy=\"{}\" r=\"{}\" fill=\"{}\" data-role=\"dot\" data-index=\"{i}\"/>",
                    (ax + bx) / 2,
                    (ay + by) / 2,
                    cell / 8,
                    theme.glyph_color
                ));
            }
        }
        PuzzleId::KillerSudoku => {
            let cages = s.cages.as_ref().expect("validated");
            for (i, cage) in cages.iter().enumerate() {
                let inset = cell / 12;
                for &at in &cage.cells {
                    let (x, y) = cv.origin(at.row, at.col);
                    let inside =
                        |r: i64, c: i64| cage.cells.iter().any(|p| p.row as i64 == r && p.col as i64 == c);
                    let (r, c) = (at.row as i64, at.col as i64);
                    let dash = format!(
                        " stroke=\"{}\" stroke-width=\"1\" stroke-dasharray=\"4 3\"",
                        theme.accent_color
                    );
                    if !inside(r - 1, c) {
                        cv.push(&format!(
                            "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\"{dash}/>",
                            x + inset,
                            y + inset,
                            x + cell - inset,
                            y + inset
                        ));
                    }
                    if !inside(r + 1, c) {
                        cv.push(&format!(
                            "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\"{dash}/>",
                            x + inset,
                            y + cell - inset,
                            x + cell - inset,
                            y + cell - inset
                        ));
                    }
                    if !inside(r, c - 1) {
                        cv.push(&format!(
                            "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\"{dash}/>",
                            x + inset,
                            y + inset,
                            x + inset,
                            y + cell - inset
                        ));
                    }
                    if !inside(r, c + 1) {
                        cv.push(&format!(
                            "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\"{dash}/>",
                            x + cell - inset,
                            y + inset,
                            x + cell - inset,
                            y + cell - inset
                        ));
                    }
                }
                let anchor = *cage.cells.iter().min().expect("cage nonempty");
                let (x, y) = cv.origin(anchor.row, anchor.col);
                // Cage targets are deliberately small and accent-coloured so
                // they cannot be mistaken for cell content.
                cv.text(
                    x + cell / 6,
                    y + cell / 6,
                    cell / 4,
                    &theme.accent_color,
                    &theme.font_family,
                    &format!(" data-role=\"cage-target\" data-index=\"{i}\""),
                    &cage.target.to_string(),
                );
            }
        }
        PuzzleId::Hitori => {
            let givens = s.givens.as_ref().expect("validated");
            for (r, row) in givens.iter().enumerate() {
                for (c, v) in row.iter().enumerate() {
                    let (x, y) = cv.center(r, c);
                    cv.text(
                        x,
                        y,
                        cell * 3 / 5,
                        &theme.glyph_color,
                        &theme.font_family,
                        &format!(" data-role=\"given\" data-row=\"{r}\" data-col=\"{c}\""),
                        &v.to_string(),
                    );
                }
            }
        }
        _ => {}
    }

    // Thermometer outlines draw over the tallies handled above.
    if instance.definition_id == PuzzleId::Thermometers {
        let thermos = s.thermometers.as_ref().expect("validated");
        for (i, path) in thermos.iter().enumerate() {
            let points: Vec<String> = path
                .iter()
                .map(|at| {
                    let (x, y) = cv.center(at.row, at.col);
                    format!("{x},{y}")
                })
                .collect();
            if points.len() > 1 {
                cv.push(&format!(
                    "<polyline points=\"{}\" fill=\"none\" stroke=\"{}\" stroke-width=\"{}\" stroke-linecap=\"round\" stroke-linejoin=\"round\" data-role=\"thermometer\" data-index=\"{i}\"/>",
                    points.join(" "),
                    theme.grid_line,
                    cell / 3
                ));
            }
            let (bx, by) = cv.center(path[0].row, path[0].col);
            cv.push(&format!(
                "<circle cx=\"{bx}\" cy=\"{by}\" r=\"{}\" fill=\"{}\" data-role=\"thermometer-bulb\" data-index=\"{i}\"/>",
                cell * 2 / 5,
                theme.grid_line
            ));
        }
    }
    Ok(())
}

/// Wraps rendered SVG in one affine transform `matrix(a b c d e f)` and
/// rescales the document box to the transformed bounds. The identity matrix
/// returns the input byte-for-byte.
pub fn augment(svg: &str, matrix: [f64; 6]) -> Result<String, RenderError> {
    let [a, b, c, d, e, f] = matrix;
    let det = a * d - b * c;
    if det.abs() < 1e-12 {
        return Err(RenderError::NonInvertible { det });
    }
    if matrix == [1.0, 0.0, 0.0, 1.0, 0.0, 0.0] {
        return Ok(svg.to_string());
    }
    let (x0, y0, w, h) = parse_viewbox(svg)?;
    let corners = [
        (x0, y0),
        (x0 + w, y0),
        (x0, y0 + h),
        (x0 + w, y0 + h),
    ];
    let mut min_x = f64::INFINITY;
    let mut min_y = f64::INFINITY;
    let mut max_x = f64::NEG_INFINITY;
    let mut max_y = f64::NEG_INFINITY;
    for (px, py) in corners {
        let tx = a * px + c * py + e;
        let ty = b * px + d * py + f;
        min_x = min_x.min(tx);
        min_y = min_y.min(ty);
        max_x = max_x.max(tx);
        max_y = max_y.max(ty);
    }
    let (new_w, new_h) = (max_x - min_x, max_y - min_y);
    let header_end = svg.find('>').ok_or_else(|| RenderError::MalformedSvg("no svg tag".into()))?;
    let tail = &svg[header_end + 1..];
    let inner = tail
        .strip_suffix("</svg>\n")
        .or_else(|| tail.strip_suffix("</svg>"))
        .ok_or_else(|| RenderError::MalformedSvg("unterminated svg".into()))?;
    let mut out = String::new();
    out.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{new_w}\" height=\"{new_h}\" viewBox=\"{min_x} {min_y} {new_w} {new_h}\">"
    ));
    out.push('\n');
    out.push_str(&format!("<g transform=\"matrix({a} {b} {c} {d} {e} {f})\">"));
    out.push_str(inner);
    out.push_str("</g>\n</svg>\n");
    Ok(out)
}

fn parse_viewbox(svg: &str) -> Result<(f64, f64, f64, f64), RenderError> {
    let start = svg
        .find("viewBox=\"")
        .ok_or_else(|| RenderError::MalformedSvg("missing viewBox".into()))?
        + "viewBox=\"".len();
    let end = svg[start..]
        .find('"')
        .ok_or_else(|| RenderError::MalformedSvg("unterminated viewBox".into()))?;
    let parts: Vec<f64> = svg[start..start + end]
        .split_whitespace()
        .map(|t| t.parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|e| RenderError::MalformedSvg(format!("viewBox: {e}")))?;
    if parts.len() != 4 {
        return Err(RenderError::MalformedSvg("viewBox needs four numbers".into()));
    }
    Ok((parts[0], parts[1], parts[2], parts[3]))
}

/// What each board cell visibly shows: cell-state tokens ("*" for unknown),
/// except field-explore clue cells, which display their adjacency count.
/// This matrix is the perception ground truth for a rendered instance.
pub fn display_rows(instance: &PuzzleInstance) -> Vec<Vec<String>> {
    let mut rows = instance.initial_state().token_rows();
    if instance.definition_id == PuzzleId::FieldExplore {
        if let Some(clues) = &instance.structures.number_clues {
            for clue in clues {
                rows[clue.at.row][clue.at.col] = clue.count.to_string();
            }
        }
    }
    rows
}

/// The "perfect reader": collects every `data-role="cell"` mark and rebuilds
/// the board it encodes. Transform wrappers are irrelevant because only data
/// attributes are read; unmarked cells read as "*".
pub fn read_cells(svg: &str, rows: usize, cols: usize) -> Result<Vec<Vec<String>>, RenderError> {
    let mut board = vec![vec!["*".to_string(); cols]; rows];
    for (ix, _) in svg.match_indices("data-role=\"cell\"") {
        let tag_start = svg[..ix]
            .rfind('<')
            .ok_or_else(|| RenderError::MalformedSvg("mark outside a tag".into()))?;
        let tag_end = svg[ix..]
            .find('>')
            .ok_or_else(|| RenderError::MalformedSvg("unterminated tag".into()))?
            + ix;
        let tag = &svg[tag_start..=tag_end];
        let row: usize = read_attr(tag, "data-row")?
            .parse()
            .map_err(|_| RenderError::MalformedSvg("bad data-row".into()))?;
        let col: usize = read_attr(tag, "data-col")?
            .parse()
            .map_err(|_| RenderError::MalformedSvg("bad data-col".into()))?;
        if row >= rows || col >= cols {
            return Err(RenderError::MalformedSvg(format!("mark at ({row}, {col}) out of range")));
        }
        board[row][col] = read_attr(tag, "data-value")?;
    }
    Ok(board)
}

fn read_attr(tag: &str, name: &str) -> Result<String, RenderError> {
    let needle = format!("{name}=\"");
    let start = tag
        .find(&needle)
        .ok_or_else(|| RenderError::MalformedSvg(format!("missing {name}")))?
        + needle.len();
    let end = tag[start..]
        .find('"')
        .ok_or_else(|| RenderError::MalformedSvg(format!("unterminated {name}")))?;
    Ok(tag[start..start + end].to_string())
}
