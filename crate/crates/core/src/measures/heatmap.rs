//! Fixation duration shares on a screen grid.

use serde::{Deserialize, Serialize};

use crate::gaze::Fixation;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Heatmap {
    pub rows: usize,
    pub cols: usize,
    /// Region covered, `[x0, y0, x1, y1]` in screen fractions.
    pub bounds: [f64; 4],
    /// Row-major total fixation duration per cell, ms.
    pub duration_ms: Vec<f64>,
}

impl Heatmap {
    pub fn total_ms(&self) -> f64 {
        self.duration_ms.iter().sum()
    }

    /// Row-major share of total duration per cell, percent. All zero when empty.
    pub fn shares_pct(&self) -> Vec<f64> {
        let total = self.total_ms();
        if total <= 0.0 {
            return vec![0.0; self.duration_ms.len()];
        }
        self.duration_ms.iter().map(|d| d / total * 100.0).collect()
    }

    /// Bounds of cell `(row, col)`.
    pub fn cell_bounds(&self, row: usize, col: usize) -> [f64; 4] {
        let [x0, y0, x1, y1] = self.bounds;
        let (cw, ch) = ((x1 - x0) / self.cols as f64, (y1 - y0) / self.rows as f64);
        [x0 + col as f64 * cw, y0 + row as f64 * ch, x0 + (col + 1) as f64 * cw, y0 + (row + 1) as f64 * ch]
    }
}

/// Accumulates each kept fixation's duration into the cell holding its
/// centre. Centres outside `bounds` are ignored; centres on the far edge
/// go to the last row or column.
pub fn fixation_heatmap<'a>(
    fixations: impl IntoIterator<Item = &'a Fixation>,
    rows: usize,
    cols: usize,
    bounds: [f64; 4],
) -> Heatmap {
    let [x0, y0, x1, y1] = bounds;
    let mut duration_ms = vec![0.0; rows * cols];
    for f in fixations {
        let [x, y] = f.center;
        if !(x0..=x1).contains(&x) || !(y0..=y1).contains(&y) {
            continue;
        }
        let c = (((x - x0) / (x1 - x0) * cols as f64).floor() as usize).min(cols - 1);
        let r = (((y - y0) / (y1 - y0) * rows as f64).floor() as usize).min(rows - 1);
        duration_ms[r * cols + c] += f.duration_ms;
    }
    Heatmap { rows, cols, bounds, duration_ms }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fix(x: f64, y: f64, ms: f64) -> Fixation {
        Fixation { start_frame: 0, end_frame: 0, center: [x, y], duration_ms: ms }
    }

    #[test]
    fn centre_fixation() {
        let h = fixation_heatmap(&[fix(0.5, 0.5, 100.0)], 3, 3, [0.0, 0.0, 1.0, 1.0]);
        assert_eq!(h.shares_pct()[4], 100.0);
    }

    #[test]
    fn one_per_cell() {
        let fs: Vec<Fixation> = (0..9).map(|k| fix((k % 3) as f64 / 3.0 + 1.0 / 6.0, (k / 3) as f64 / 3.0 + 1.0 / 6.0, 80.0)).collect();
        let h = fixation_heatmap(&fs, 3, 3, [0.0, 0.0, 1.0, 1.0]);
        for s in h.shares_pct() {
            assert!((s - 100.0 / 9.0).abs() < 1e-12);
        }
    }

    #[test]
    fn sub_grid_of_a_cell() {
        let outer = fixation_heatmap(&[], 3, 3, [0.0, 0.0, 1.0, 1.0]);
        let b = outer.cell_bounds(1, 1);
        let h = fixation_heatmap(&[fix(0.4, 0.4, 50.0), fix(0.9, 0.9, 50.0)], 2, 2, b);
        assert_eq!(h.total_ms(), 50.0);
        assert_eq!(h.duration_ms[0], 50.0);
    }
}
