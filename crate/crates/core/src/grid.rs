//! Connected-component labelling of classed grid cells, planar or toroidal.

/// Disjoint-set forest with path halving and union by size.
#[derive(Debug, Clone)]
pub(crate) struct UnionFind {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
            size: vec![1; n],
        }
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    pub fn union(&mut self, a: usize, b: usize) {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            return;
        }
        if self.size[ra] < self.size[rb] {
            std::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb] = ra;
        self.size[ra] += self.size[rb];
    }
}

/// One connected component of equally classed cells.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Component<C> {
    pub class: C,
    pub cells: Vec<usize>,
}

/// Groups 4-adjacent cells with equal class. Cells are stored row-major with
/// `width` columns; `None` cells belong to no component. `wrap_x`/`wrap_y`
/// glue opposite edges (both for a torus). Components come out ordered by
/// their first cell.
pub(crate) fn components<C: Copy + PartialEq>(
    classes: &[Option<C>],
    width: usize,
    height: usize,
    wrap_x: bool,
    wrap_y: bool,
) -> Vec<Component<C>> {
    assert_eq!(classes.len(), width * height);
    let mut uf = UnionFind::new(classes.len());
    let idx = |x: usize, y: usize| y * width + x;
    for y in 0..height {
        for x in 0..width {
            let Some(c) = classes[idx(x, y)] else {
                continue;
            };
            let right = if x + 1 < width {
                Some(x + 1)
            } else if wrap_x && width > 1 {
                Some(0)
            } else {
                None
            };
            if let Some(xr) = right {
                if classes[idx(xr, y)] == Some(c) {
                    uf.union(idx(x, y), idx(xr, y));
                }
            }
            let down = if y + 1 < height {
                Some(y + 1)
            } else if wrap_y && height > 1 {
                Some(0)
            } else {
                None
            };
            if let Some(yd) = down {
                if classes[idx(x, yd)] == Some(c) {
                    uf.union(idx(x, y), idx(x, yd));
                }
            }
        }
    }
    let mut root_slot = vec![usize::MAX; classes.len()];
    let mut out: Vec<Component<C>> = Vec::new();
    for (i, c) in classes.iter().enumerate() {
        let Some(c) = *c else { continue };
        let r = uf.find(i);
        if root_slot[r] == usize::MAX {
            root_slot[r] = out.len();
            out.push(Component {
                class: c,
                cells: Vec::new(),
            });
        }
        out[root_slot[r]].cells.push(i);
    }
    out
}

/// Reassigns every component of at most `max_size` cells to the class most
/// common among its outside neighbours (ties go to the first seen), then
/// relabels. Sampling a region thinner than one cell, such as the tip of a
/// cusp, leaves such specks behind. Planar grids only.
pub(crate) fn despeckle<C: Copy + PartialEq>(
    classes: &mut [Option<C>],
    width: usize,
    height: usize,
    max_size: usize,
) -> Vec<Component<C>> {
    for _ in 0..4 {
        let comps = components(classes, width, height, false, false);
        let mut changed = false;
        let mut owner = vec![usize::MAX; classes.len()];
        for (k, c) in comps.iter().enumerate() {
            for &i in &c.cells {
                owner[i] = k;
            }
        }
        for (k, comp) in comps.iter().enumerate() {
            if comp.cells.len() > max_size {
                continue;
            }
            let mut votes: Vec<(C, usize)> = Vec::new();
            for &i in &comp.cells {
                let (x, y) = (i % width, i / width);
                let mut near = Vec::with_capacity(4);
                if x > 0 {
                    near.push(i - 1);
                }
                if x + 1 < width {
                    near.push(i + 1);
                }
                if y > 0 {
                    near.push(i - width);
                }
                if y + 1 < height {
                    near.push(i + width);
                }
                for j in near {
                    if owner[j] == k {
                        continue;
                    }
                    let Some(c) = classes[j] else { continue };
                    match votes.iter_mut().find(|(v, _)| *v == c) {
                        Some(v) => v.1 += 1,
                        None => votes.push((c, 1)),
                    }
                }
            }
            let best = votes.iter().fold(None::<(C, usize)>, |b, &(c, n)| match b {
                Some((_, m)) if m >= n => b,
                _ => Some((c, n)),
            });
            if let Some((c, _)) = best {
                for &i in &comp.cells {
                    classes[i] = Some(c);
                }
                changed = true;
            }
        }
        if !changed {
            return comps;
        }
    }
    components(classes, width, height, false, false)
}
