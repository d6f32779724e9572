//! Sampled base-station deployments on a square window with a wrap-around
//! (torus) metric by default, plus a uniform-grid nearest-neighbor index.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};

/// Distance convention on the window.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum Metric {
    /// wrap-around distances: no edge truncation of interference
    Torus,
    /// plain Euclidean distances; callers should measure in an inner region
    Plain,
}

#[derive(Debug, Clone)]
pub struct Deployment {
    /// square side length, m
    pub window: f64,
    pub macro_points: Vec<[f64; 2]>,
    pub small_points: Vec<[f64; 2]>,
    pub seed: u64,
    pub metric: Metric,
    macro_grid: PointGrid,
    small_grid: PointGrid,
}

impl Deployment {
    /// Builds a deployment from explicit point sets (tests and tools).
    pub fn from_points(
        window: f64,
        macro_points: Vec<[f64; 2]>,
        small_points: Vec<[f64; 2]>,
        metric: Metric,
    ) -> Self {
        let macro_grid = PointGrid::build(&macro_points, window);
        let small_grid = PointGrid::build(&small_points, window);
        Self {
            window,
            macro_points,
            small_points,
            seed: 0,
            metric,
            macro_grid,
            small_grid,
        }
    }

    /// Shortest displacement from a to b under the metric.
    pub fn delta(&self, a: [f64; 2], b: [f64; 2]) -> [f64; 2] {
        let mut d = [b[0] - a[0], b[1] - a[1]];
        if self.metric == Metric::Torus {
            for v in d.iter_mut() {
                if *v > 0.5 * self.window {
                    *v -= self.window;
                } else if *v < -0.5 * self.window {
                    *v += self.window;
                }
            }
        }
        d
    }

    pub fn dist2(&self, a: [f64; 2], b: [f64; 2]) -> f64 {
        let d = self.delta(a, b);
        d[0] * d[0] + d[1] * d[1]
    }

    /// Index and squared distance of the nearest macro BS, if any.
    pub fn nearest_macro(&self, p: [f64; 2]) -> Option<(u32, f64)> {
        self.macro_grid
            .nearest(p, &self.macro_points, self.window, self.metric)
    }

    /// Index and squared distance of the nearest small cell, if any.
    pub fn nearest_small(&self, p: [f64; 2]) -> Option<(u32, f64)> {
        self.small_grid
            .nearest(p, &self.small_points, self.window, self.metric)
    }

    pub fn n_bs(&self) -> usize {
        self.macro_points.len() + self.small_points.len()
    }

    /// Global BS index layout: macros first, then small cells.
    pub fn bs_position(&self, global: u32) -> [f64; 2] {
        let g = global as usize;
        if g < self.macro_points.len() {
            self.macro_points[g]
        } else {
            self.small_points[g - self.macro_points.len()]
        }
    }

    pub fn small_global_index(&self, small_idx: u32) -> u32 {
        self.macro_points.len() as u32 + small_idx
    }
}

/// Uniform bucket grid over the window.
#[derive(Debug, Clone)]
struct PointGrid {
    dim: usize,
    cell: f64,
    buckets: Vec<Vec<u32>>,
}

impl PointGrid {
    fn build(points: &[[f64; 2]], window: f64) -> Self {
        let dim = ((points.len() as f64).sqrt().ceil() as usize).clamp(1, 1024);
        let cell = window / dim as f64;
        let mut buckets = vec![Vec::new(); dim * dim];
        for (i, p) in points.iter().enumerate() {
            let cx = ((p[0] / cell) as usize).min(dim - 1);
            let cy = ((p[1] / cell) as usize).min(dim - 1);
            buckets[cy * dim + cx].push(i as u32);
        }
        Self { dim, cell, buckets }
    }

    fn nearest(
        &self,
        p: [f64; 2],
        points: &[[f64; 2]],
        window: f64,
        metric: Metric,
    ) -> Option<(u32, f64)> {
        if points.is_empty() {
            return None;
        }
        let dim = self.dim as isize;
        let cx = ((p[0] / self.cell) as isize).clamp(0, dim - 1);
        let cy = ((p[1] / self.cell) as isize).clamp(0, dim - 1);
        let dist2 = |q: [f64; 2]| -> f64 {
            let mut dx = (q[0] - p[0]).abs();
            let mut dy = (q[1] - p[1]).abs();
            if metric == Metric::Torus {
                if dx > 0.5 * window {
                    dx = window - dx;
                }
                if dy > 0.5 * window {
                    dy = window - dy;
                }
            }
            dx * dx + dy * dy
        };

        let mut best: Option<(u32, f64)> = None;
        let max_ring = match metric {
            Metric::Torus => (self.dim / 2 + 1) as isize,
            Metric::Plain => dim,
        };
        for ring in 0..=max_ring {
            if let Some((_, b2)) = best {
                // every cell on this ring is at least (ring-1) cells away
                let reach = (ring - 1).max(0) as f64 * self.cell;
                if b2 <= reach * reach {
                    break;
                }
            }
            let mut visit = |ix: isize, iy: isize| {
                let ux = ix.rem_euclid(dim) as usize;
                let uy = iy.rem_euclid(dim) as usize;
                for &idx in &self.buckets[uy * self.dim + ux] {
                    let d2 = dist2(points[idx as usize]);
                    if best.map_or(true, |(_, b2)| d2 < b2) {
                        best = Some((idx, d2));
                    }
                }
            };
            if ring == 0 {
                visit(cx, cy);
            } else {
                for i in -ring..=ring {
                    visit(cx + i, cy - ring);
                    visit(cx + i, cy + ring);
                }
                for i in (-ring + 1)..ring {
                    visit(cx - ring, cy + i);
                    visit(cx + ring, cy + i);
                }
            }
        }
        best
    }
}

/// Draws Poisson-many uniform points per tier, independently.
/// Deterministic for a fixed seed.
pub fn sample_deployment(
    cfg: &crate::params::ScenarioConfig,
    window: f64,
    seed: u64,
    metric: Metric,
) -> Deployment {
    use rand::SeedableRng;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    sample_deployment_with_rng(cfg, window, seed, metric, &mut rng)
}

pub fn sample_deployment_with_rng(
    cfg: &crate::params::ScenarioConfig,
    window: f64,
    seed: u64,
    metric: Metric,
    rng: &mut ChaCha8Rng,
) -> Deployment {
    let draw_tier = |rng: &mut ChaCha8Rng, lambda: f64| -> Vec<[f64; 2]> {
        let mean = lambda * window * window;
        let count = if mean <= 0.0 {
            0
        } else {
            Poisson::new(mean).map(|d| d.sample(rng) as usize).unwrap_or(0)
        };
        (0..count)
            .map(|_| [rng.random::<f64>() * window, rng.random::<f64>() * window])
            .collect()
    };
    let macro_points = draw_tier(rng, cfg.lambda_macro);
    let small_points = draw_tier(rng, cfg.lambda_small);
    let macro_grid = PointGrid::build(&macro_points, window);
    let small_grid = PointGrid::build(&small_points, window);
    Deployment {
        window,
        macro_points,
        small_points,
        seed,
        metric,
        macro_grid,
        small_grid,
    }
}
