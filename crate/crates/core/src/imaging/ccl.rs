//! Connected component labeling via two-pass union-find.

use super::{BBox, BinaryImage};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Connectivity {
    Four,
    Eight,
}

/// One labeled foreground region.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Component {
    pub label: u32,
    pub area: usize,
    pub bbox: BBox,
}

/// Label grid plus per-component statistics. Label 0 is background;
/// foreground labels start at 1 in raster-scan discovery order.
#[derive(Debug, Clone)]
pub struct ComponentLabeling {
    pub width: usize,
    pub height: usize,
    pub labels: Vec<u32>,
    pub components: Vec<Component>,
}

impl ComponentLabeling {
    pub fn label_at(&self, x: usize, y: usize) -> u32 {
        self.labels[y * self.width + x]
    }
}

struct DisjointSet {
    parent: Vec<u32>,
}

impl DisjointSet {
    fn new() -> Self {
        DisjointSet { parent: vec![0] } // slot for background
    }

    fn make(&mut self) -> u32 {
        let id = self.parent.len() as u32;
        self.parent.push(id);
        id
    }

    fn find(&mut self, mut x: u32) -> u32 {
        while self.parent[x as usize] != x {
            let gp = self.parent[self.parent[x as usize] as usize];
            self.parent[x as usize] = gp;
            x = gp;
        }
        x
    }

    fn union(&mut self, a: u32, b: u32) {
        let ra = self.find(a);
        let rb = self.find(b);
        if ra != rb {
            // smaller root wins so provisional ids stay raster-ordered
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.parent[hi as usize] = lo;
        }
    }
}

/// Two-pass union-find labeling. Components are numbered 1.. in the order
/// their first pixel appears in a raster scan.
pub fn connected_components(img: &BinaryImage, connectivity: Connectivity) -> ComponentLabeling {
    let (w, h) = (img.width(), img.height());
    let mut provisional = vec![0u32; w * h];
    let mut sets = DisjointSet::new();

    for y in 0..h {
        for x in 0..w {
            if !img.get(x, y) {
                continue;
            }
            let idx = y * w + x;
            let mut neighbor = 0u32;
            let mut merge = |lbl: u32, neighbor: &mut u32, sets: &mut DisjointSet| {
                if lbl != 0 {
                    if *neighbor == 0 {
                        *neighbor = lbl;
                    } else if *neighbor != lbl {
                        sets.union(*neighbor, lbl);
                    }
                }
            };
            if x > 0 {
                merge(provisional[idx - 1], &mut neighbor, &mut sets);
            }
            if y > 0 {
                merge(provisional[idx - w], &mut neighbor, &mut sets);
                if connectivity == Connectivity::Eight {
                    if x > 0 {
                        merge(provisional[idx - w - 1], &mut neighbor, &mut sets);
                    }
                    if x + 1 < w {
                        merge(provisional[idx - w + 1], &mut neighbor, &mut sets);
                    }
                }
            }
            provisional[idx] = if neighbor == 0 { sets.make() } else { neighbor };
        }
    }

    // Resolve roots and assign final labels in raster discovery order.
    let mut final_of_root = vec![0u32; sets.parent.len()];
    let mut labels = vec![0u32; w * h];
    let mut components: Vec<Component> = Vec::new();
    for y in 0..h {
        for x in 0..w {
            let idx = y * w + x;
            if provisional[idx] == 0 {
                continue;
            }
            let root = sets.find(provisional[idx]);
            let mut lbl = final_of_root[root as usize];
            if lbl == 0 {
                lbl = components.len() as u32 + 1;
                final_of_root[root as usize] = lbl;
                components.push(Component {
                    label: lbl,
                    area: 0,
                    bbox: BBox::new(x, y, 1, 1),
                });
            }
            labels[idx] = lbl;
            let comp = &mut components[(lbl - 1) as usize];
            comp.area += 1;
            let bb = &mut comp.bbox;
            let x1 = bb.right().max(x + 1);
            let y1 = bb.bottom().max(y + 1);
            bb.x = bb.x.min(x);
            bb.y = bb.y.min(y);
            bb.w = x1 - bb.x;
            bb.h = y1 - bb.y;
        }
    }

    ComponentLabeling {
        width: w,
        height: h,
        labels,
        components,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mask(w: usize, h: usize, rows: &[&str]) -> BinaryImage {
        let mut img = BinaryImage::new(w, h);
        for (y, row) in rows.iter().enumerate() {
            for (x, c) in row.chars().enumerate() {
                img.set(x, y, c == '#');
            }
        }
        img
    }

    #[test]
    fn empty_image_has_no_components() {
        let img = BinaryImage::new(6, 4);
        let out = connected_components(&img, Connectivity::Four);
        assert!(out.components.is_empty());
        assert!(out.labels.iter().all(|&l| l == 0));
    }

    #[test]
    fn two_blocks() {
        let img = mask(7, 4, &["##.....", "##.....", ".....##", ".....##"]);
        let out = connected_components(&img, Connectivity::Four);
        assert_eq!(out.components.len(), 2);
        assert_eq!(out.components[0].area, 4);
        assert_eq!(out.components[0].bbox, BBox::new(0, 0, 2, 2));
        assert_eq!(out.components[1].area, 4);
        assert_eq!(out.components[1].bbox, BBox::new(5, 2, 2, 2));
    }

    #[test]
    fn diagonal_connectivity() {
        let img = mask(3, 3, &["#..", ".#.", "..#"]);
        assert_eq!(
            connected_components(&img, Connectivity::Four).components.len(),
            3
        );
        assert_eq!(
            connected_components(&img, Connectivity::Eight).components.len(),
            1
        );
    }

    #[test]
    fn labels_follow_raster_discovery_order() {
        // U shape: left arm discovered first, right arm merges into it
        let img = mask(5, 3, &["#...#", "#...#", "#####"]);
        let out = connected_components(&img, Connectivity::Four);
        assert_eq!(out.components.len(), 1);
        assert_eq!(out.components[0].label, 1);
        assert_eq!(out.components[0].area, 9);
    }

    /// Stack-based flood fill oracle, for partition equivalence checks.
    pub(crate) fn flood_fill_labels(img: &BinaryImage, connectivity: Connectivity) -> Vec<u32> {
        let (w, h) = (img.width(), img.height());
        let mut labels = vec![0u32; w * h];
        let mut next = 1u32;
        for start in 0..w * h {
            if !img.data()[start] || labels[start] != 0 {
                continue;
            }
            let mut stack = vec![start];
            labels[start] = next;
            while let Some(idx) = stack.pop() {
                let (x, y) = (idx % w, idx / w);
                let mut push = |nx: i64, ny: i64, labels: &mut Vec<u32>, stack: &mut Vec<usize>| {
                    if nx < 0 || ny < 0 || nx >= w as i64 || ny >= h as i64 {
                        return;
                    }
                    let ni = ny as usize * w + nx as usize;
                    if img.data()[ni] && labels[ni] == 0 {
                        labels[ni] = next;
                        stack.push(ni);
                    }
                };
                push(x as i64 - 1, y as i64, &mut labels, &mut stack);
                push(x as i64 + 1, y as i64, &mut labels, &mut stack);
                push(x as i64, y as i64 - 1, &mut labels, &mut stack);
                push(x as i64, y as i64 + 1, &mut labels, &mut stack);
                if connectivity == Connectivity::Eight {
                    push(x as i64 - 1, y as i64 - 1, &mut labels, &mut stack);
                    push(x as i64 + 1, y as i64 - 1, &mut labels, &mut stack);
                    push(x as i64 - 1, y as i64 + 1, &mut labels, &mut stack);
                    push(x as i64 + 1, y as i64 + 1, &mut labels, &mut stack);
                }
            }
            next += 1;
        }
        labels
    }

    /// Same partition up to a relabeling bijection.
    pub(crate) fn partitions_equal(a: &[u32], b: &[u32]) -> bool {
        if a.len() != b.len() {
            return false;
        }
        let mut fwd = std::collections::HashMap::new();
        let mut bwd = std::collections::HashMap::new();
        for (&la, &lb) in a.iter().zip(b) {
            if (la == 0) != (lb == 0) {
                return false;
            }
            if la == 0 {
                continue;
            }
            if *fwd.entry(la).or_insert(lb) != lb {
                return false;
            }
            if *bwd.entry(lb).or_insert(la) != la {
                return false;
            }
        }
        true
    }

    #[test]
    fn random_masks_match_flood_fill() {
        let mut s = 99u64;
        for case in 0..40 {
            let mut img = BinaryImage::new(16, 16);
            for y in 0..16 {
                for x in 0..16 {
                    s ^= s << 13;
                    s ^= s >> 7;
                    s ^= s << 17;
                    img.set(x, y, s % 100 < 45);
                }
            }
            for conn in [Connectivity::Four, Connectivity::Eight] {
                let ours = connected_components(&img, conn);
                let oracle = flood_fill_labels(&img, conn);
                assert!(
                    partitions_equal(&ours.labels, &oracle),
                    "case {case} {conn:?}"
                );
                // component areas partition the foreground
                let fg = img.count_foreground();
                let total: usize = ours.components.iter().map(|c| c.area).sum();
                assert_eq!(fg, total);
            }
        }
    }
}
