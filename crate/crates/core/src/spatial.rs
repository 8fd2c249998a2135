//! Uniform hash grid for radius queries on points of 4-space.

use std::collections::HashMap;

use crate::sphere::Point4;

pub(crate) struct PointGrid<'a> {
    points: &'a [Point4],
    cell: f64,
    buckets: HashMap<[i64; 4], Vec<usize>>,
}

impl<'a> PointGrid<'a> {
    /// `cell` must be at least the largest radius that will be queried.
    pub fn new(points: &'a [Point4], cell: f64) -> Self {
        Self::with_subset(points, cell, 0..points.len())
    }

    pub fn with_subset(
        points: &'a [Point4],
        cell: f64,
        subset: impl IntoIterator<Item = usize>,
    ) -> Self {
        let mut buckets: HashMap<[i64; 4], Vec<usize>> = HashMap::new();
        for i in subset {
            buckets.entry(key(&points[i], cell)).or_default().push(i);
        }
        PointGrid {
            points,
            cell,
            buckets,
        }
    }

    /// Indices of points strictly closer than `radius` to `p`.
    pub fn within(&self, p: &Point4, radius: f64) -> Vec<usize> {
        debug_assert!(radius <= self.cell);
        let base = key(p, self.cell);
        let mut out = Vec::new();
        for offset in 0..81 {
            let mut k = base;
            let mut o = offset;
            for slot in k.iter_mut() {
                *slot += (o % 3) as i64 - 1;
                o /= 3;
            }
            if let Some(bucket) = self.buckets.get(&k) {
                out.extend(
                    bucket
                        .iter()
                        .copied()
                        .filter(|&i| self.points[i].distance(p) < radius),
                );
            }
        }
        out.sort_unstable();
        out
    }

    pub fn nearest_within(&self, p: &Point4, radius: f64) -> Option<usize> {
        self.within(p, radius).into_iter().min_by(|&a, &b| {
            self.points[a]
                .distance(p)
                .total_cmp(&self.points[b].distance(p))
        })
    }
}

fn key(p: &Point4, cell: f64) -> [i64; 4] {
    let c = p.coords();
    [0, 1, 2, 3].map(|i| (c[i] / cell).floor() as i64)
}
