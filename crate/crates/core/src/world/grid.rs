//! Dense 2-D occupancy grid with a per-cell inflation counter.

#[derive(Debug, Clone)]
pub(crate) struct GridStore {
    pub width: usize,
    pub height: usize,
    pub true_occ: Vec<bool>,
    pub known_occ: Vec<bool>,
    /// Number of known occupied cells whose inflation disk covers each cell.
    known_cover: Vec<u32>,
    true_cover: Vec<u32>,
    /// Cell offsets within the inflation radius, including (0, 0).
    offsets: Vec<(i64, i64)>,
}

impl GridStore {
    pub fn new(width: usize, height: usize, true_occ: Vec<bool>, radius_cells: f64) -> Self {
        debug_assert_eq!(true_occ.len(), width * height);
        let reach = radius_cells.floor() as i64;
        let mut offsets = Vec::new();
        for dy in -reach..=reach {
            for dx in -reach..=reach {
                if ((dx * dx + dy * dy) as f64) <= radius_cells * radius_cells + 1e-9 {
                    offsets.push((dx, dy));
                }
            }
        }
        let mut store = Self {
            width,
            height,
            known_occ: vec![false; true_occ.len()],
            known_cover: vec![0; true_occ.len()],
            true_cover: vec![0; true_occ.len()],
            true_occ,
            offsets,
        };
        for idx in 0..store.true_occ.len() {
            if store.true_occ[idx] {
                let (x, y) = store.coords(idx);
                store.stamp_true(x, y);
            }
        }
        store
    }

    #[inline]
    pub fn index(&self, x: usize, y: usize) -> usize {
        y * self.width + x
    }

    #[inline]
    pub fn coords(&self, idx: usize) -> (usize, usize) {
        (idx % self.width, idx / self.width)
    }

    pub fn in_range(&self, x: i64, y: i64) -> bool {
        x >= 0 && y >= 0 && (x as usize) < self.width && (y as usize) < self.height
    }

    fn stamp_true(&mut self, x: usize, y: usize) {
        for i in 0..self.offsets.len() {
            let (dx, dy) = self.offsets[i];
            let (nx, ny) = (x as i64 + dx, y as i64 + dy);
            if self.in_range(nx, ny) {
                let idx = self.index(nx as usize, ny as usize);
                self.true_cover[idx] += 1;
            }
        }
    }

    /// Marks a true obstacle cell as known, pushing every cell whose blocked
    /// state flipped onto `changed`. Returns false if nothing was learned.
    pub fn learn(&mut self, x: usize, y: usize, changed: &mut Vec<(usize, usize)>) -> bool {
        let idx = self.index(x, y);
        if self.known_occ[idx] || !self.true_occ[idx] {
            return false;
        }
        self.known_occ[idx] = true;
        for i in 0..self.offsets.len() {
            let (dx, dy) = self.offsets[i];
            let (nx, ny) = (x as i64 + dx, y as i64 + dy);
            if self.in_range(nx, ny) {
                let nidx = self.index(nx as usize, ny as usize);
                if self.known_cover[nidx] == 0 {
                    changed.push((nx as usize, ny as usize));
                }
                self.known_cover[nidx] += 1;
            }
        }
        true
    }

    #[inline]
    pub fn known_blocked(&self, x: usize, y: usize) -> bool {
        self.known_cover[self.index(x, y)] > 0
    }

    #[inline]
    pub fn true_blocked(&self, x: usize, y: usize) -> bool {
        self.true_cover[self.index(x, y)] > 0
    }

    pub fn true_count(&self) -> usize {
        self.true_occ.iter().filter(|&&o| o).count()
    }

    pub fn known_count(&self) -> usize {
        self.known_occ.iter().filter(|&&o| o).count()
    }
}
