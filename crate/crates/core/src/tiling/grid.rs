//! Parameter-rectangle raster of a closed chart polyline.

use std::collections::HashMap;
use std::f64::consts::TAU;

pub const UNLABELED: u32 = u32::MAX;

#[derive(Debug, Clone, Copy)]
pub struct ChartSeg {
    pub x0: f64,
    pub y0: f64,
    pub x1: f64,
    pub y1: f64,
}

impl ChartSeg {
    /// Copy translated by a multiple of 2pi so that it lies near `x`.
    fn near(&self, x: f64) -> ChartSeg {
        let mid = 0.5 * (self.x0 + self.x1);
        let k = ((x - mid) / TAU).round() * TAU;
        ChartSeg {
            x0: self.x0 + k,
            x1: self.x1 + k,
            ..*self
        }
    }
}

fn proper_hit(a: &ChartSeg, b: &ChartSeg) -> bool {
    let (dx1, dy1) = (a.x1 - a.x0, a.y1 - a.y0);
    let (dx2, dy2) = (b.x1 - b.x0, b.y1 - b.y0);
    let den = dx1 * dy2 - dy1 * dx2;
    if den == 0.0 {
        return false;
    }
    let (ex, ey) = (b.x0 - a.x0, b.y0 - a.y0);
    let p = (ex * dy2 - ey * dx2) / den;
    let q = (ex * dy1 - ey * dx1) / den;
    (-1e-12..=1.0 + 1e-12).contains(&p) && (-1e-12..=1.0 + 1e-12).contains(&q)
}

pub struct Grid {
    pub n1: usize,
    pub n2: usize,
    pub lo: f64,
    pub d1: f64,
    pub d2: f64,
    pub marked: Vec<bool>,
    pub segs: Vec<ChartSeg>,
    registry: HashMap<usize, Vec<u32>>,
}

impl Grid {
    pub fn new(n1: usize, n2: usize, lo: f64, hi: f64) -> Self {
        Self {
            n1,
            n2,
            lo,
            d1: TAU / n1 as f64,
            d2: (hi - lo) / n2 as f64,
            marked: vec![false; n1 * n2],
            segs: Vec::new(),
            registry: HashMap::new(),
        }
    }

    pub fn index(&self, col: i64, row: i64) -> Option<usize> {
        if row < 0 || row >= self.n2 as i64 {
            return None;
        }
        Some(row as usize * self.n1 + col.rem_euclid(self.n1 as i64) as usize)
    }

    pub fn cell_of(&self, x: f64, y: f64) -> (i64, i64) {
        (
            (x / self.d1).floor() as i64,
            (((y - self.lo) / self.d2).floor() as i64).clamp(0, self.n2 as i64 - 1),
        )
    }

    pub fn center(&self, col: i64, row: i64) -> (f64, f64) {
        (
            (col as f64 + 0.5) * self.d1,
            self.lo + (row as f64 + 0.5) * self.d2,
        )
    }

    /// Cells met by the segment (supercover, including both cells at exact
    /// corner passages).
    pub fn cells_on(&self, s: &ChartSeg) -> Vec<(i64, i64)> {
        let (gx0, gy0) = (s.x0 / self.d1, (s.y0 - self.lo) / self.d2);
        let (gx1, gy1) = (s.x1 / self.d1, (s.y1 - self.lo) / self.d2);
        let (mut cx, mut cy) = (gx0.floor() as i64, gy0.floor() as i64);
        let (ex, ey) = (gx1.floor() as i64, gy1.floor() as i64);
        let (dx, dy) = (gx1 - gx0, gy1 - gy0);
        let sx: i64 = if dx > 0.0 { 1 } else { -1 };
        let sy: i64 = if dy > 0.0 { 1 } else { -1 };
        let tdx = if dx != 0.0 {
            (1.0 / dx).abs()
        } else {
            f64::INFINITY
        };
        let tdy = if dy != 0.0 {
            (1.0 / dy).abs()
        } else {
            f64::INFINITY
        };
        let mut tmx = if dx > 0.0 {
            (cx as f64 + 1.0 - gx0) * tdx
        } else if dx < 0.0 {
            (gx0 - cx as f64) * tdx
        } else {
            f64::INFINITY
        };
        let mut tmy = if dy > 0.0 {
            (cy as f64 + 1.0 - gy0) * tdy
        } else if dy < 0.0 {
            (gy0 - cy as f64) * tdy
        } else {
            f64::INFINITY
        };
        let mut out = vec![(cx, cy)];
        let limit = (ex - cx).abs() + (ey - cy).abs() + 4;
        for _ in 0..2 * limit {
            if cx == ex && cy == ey {
                break;
            }
            if (tmx - tmy).abs() < 1e-12 {
                if tmx > 1.0 {
                    break;
                }
                out.push((cx + sx, cy));
                out.push((cx, cy + sy));
                cx += sx;
                cy += sy;
                tmx += tdx;
                tmy += tdy;
            } else if tmx < tmy {
                if tmx > 1.0 {
                    break;
                }
                cx += sx;
                tmx += tdx;
            } else {
                if tmy > 1.0 {
                    break;
                }
                cy += sy;
                tmy += tdy;
            }
            out.push((cx, cy));
        }
        out
    }

    /// Marks the cells of a polyline segment and registers it.
    pub fn add_segment(&mut self, s: ChartSeg) {
        let id = self.segs.len() as u32;
        self.segs.push(s);
        for (c, r) in self.cells_on(&s) {
            if let Some(i) = self.index(c, r) {
                self.marked[i] = true;
                let v = self.registry.entry(i).or_default();
                if v.last() != Some(&id) {
                    v.push(id);
                }
            }
        }
    }

    /// True if the straight chart path from `p` to `q` crosses no
    /// registered segment.
    pub fn visible(&self, p: (f64, f64), q: (f64, f64)) -> bool {
        let path = ChartSeg {
            x0: p.0,
            y0: p.1,
            x1: q.0,
            y1: q.1,
        };
        let mut seen: Vec<u32> = Vec::new();
        for (c, r) in self.cells_on(&path) {
            let Some(i) = self.index(c, r) else { continue };
            if let Some(ids) = self.registry.get(&i) {
                for &id in ids {
                    if seen.contains(&id) {
                        continue;
                    }
                    seen.push(id);
                    if proper_hit(&path, &self.segs[id as usize].near(p.0)) {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// 4-connected components of unmarked cells, with the two pole rows
    /// each contracted to a point. Returns labels and the component count.
    pub fn components(&self) -> (Vec<u32>, usize) {
        let mut labels = vec![UNLABELED; self.n1 * self.n2];
        let mut count = 0u32;
        let mut stack = Vec::new();
        for start in 0..labels.len() {
            if self.marked[start] || labels[start] != UNLABELED {
                continue;
            }
            labels[start] = count;
            stack.push(start);
            while let Some(i) = stack.pop() {
                let (row, col) = ((i / self.n1) as i64, (i % self.n1) as i64);
                let mut visit = |j: usize, stack: &mut Vec<usize>| {
                    if !self.marked[j] && labels[j] == UNLABELED {
                        labels[j] = count;
                        stack.push(j);
                    }
                };
                for (dc, dr) in [(1, 0), (-1, 0), (0, 1), (0, -1)] {
                    if let Some(j) = self.index(col + dc, row + dr) {
                        visit(j, &mut stack);
                    }
                }
                if row == 0 || row == self.n2 as i64 - 1 {
                    let base = row as usize * self.n1;
                    for j in base..base + self.n1 {
                        visit(j, &mut stack);
                    }
                }
            }
            count += 1;
        }
        (labels, count as usize)
    }

    /// Label of an arbitrary chart point: its own cell if unmarked, else the
    /// nearest unmarked cell reachable without crossing the polyline.
    pub fn classify(&self, labels: &[u32], x: f64, y: f64, radius: i64) -> Option<u32> {
        let (c0, r0) = self.cell_of(x, y);
        let i0 = self.index(c0, r0)?;
        if !self.marked[i0] {
            return Some(labels[i0]);
        }
        for r in 1..=radius {
            let mut ring = Vec::new();
            for dc in -r..=r {
                for dr in -r..=r {
                    if dc.abs().max(dr.abs()) != r {
                        continue;
                    }
                    let (c, rr) = (c0 + dc, r0 + dr);
                    if let Some(i) = self.index(c, rr) {
                        if !self.marked[i] {
                            let q = self.center(c, rr);
                            let d = (q.0 - x).powi(2) + (q.1 - y).powi(2);
                            ring.push((d, q, i));
                        }
                    }
                }
            }
            ring.sort_by(|a, b| a.0.total_cmp(&b.0));
            for (_, q, i) in ring {
                if self.visible((x, y), q) {
                    return Some(labels[i]);
                }
            }
        }
        None
    }

    /// Portable graymap of a label grid (one gray level per label).
    pub fn pgm(&self, labels: &[u32], count: usize) -> String {
        let mut s = format!("P2\n{} {}\n255\n", self.n1, self.n2);
        let step = 255 / count.max(1) as u32;
        for row in (0..self.n2).rev() {
            let line: Vec<String> = (0..self.n1)
                .map(|c| {
                    let l = labels[row * self.n1 + c];
                    if l == UNLABELED {
                        "0".into()
                    } else {
                        (255 - l * step).to_string()
                    }
                })
                .collect();
            s.push_str(&line.join(" "));
            s.push('\n');
        }
        s
    }
}
