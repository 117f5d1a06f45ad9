//! Seeded test-function corpora. Sample i depends only on (seed, i): each
//! index draws from its own ChaCha stream.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::carleman::TestBump;
use crate::evolution::PolarGrid;

pub fn stream(seed: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    rng
}

/// Ranges for space-time bumps on H^2 plus the margins they must keep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BumpCorpusSpec {
    pub size: usize,
    pub rho_c: (f64, f64),
    pub t_c: (f64, f64),
    pub width: (f64, f64),
    pub t_width: (f64, f64),
    pub tilt: (f64, f64),
    /// Spatial support must end this far inside the grid.
    pub rho_limit: f64,
    /// Time support must stay this far from 0 and 1.
    pub t_margin: f64,
    /// Smallest admissible distance from the origin to the support.
    pub rho_inner: f64,
}

impl BumpCorpusSpec {
    /// Bumps for the moving-center checks: support inside `grid` with five
    /// cells to spare, time support five steps of 1/100 away from 0 and 1.
    pub fn moving(size: usize, grid: &PolarGrid) -> Self {
        BumpCorpusSpec {
            size,
            rho_c: (0.0, 3.0),
            t_c: (0.35, 0.65),
            width: (0.3, 0.7),
            t_width: (0.04, 0.1),
            tilt: (-2.0, 2.0),
            rho_limit: grid.radial.rho_max() - 5.0 * grid.radial.spacing(),
            t_margin: 0.05,
            rho_inner: 0.0,
        }
    }

    /// Bumps outside B_{rho0} whose time support lies in [1/4, 3/4].
    pub fn quadratic_log(size: usize, rho0: f64) -> Self {
        BumpCorpusSpec {
            size,
            rho_c: (rho0 + 1.0, rho0 + 3.0),
            t_c: (0.45, 0.55),
            width: (0.2, 0.33),
            t_width: (0.02, 0.05),
            tilt: (-2.0, 2.0),
            rho_limit: f64::INFINITY,
            t_margin: 0.25,
            rho_inner: rho0,
        }
    }

    pub fn admits(&self, b: &TestBump) -> bool {
        b.validate().is_ok()
            && b.rho_c + b.support <= self.rho_limit
            && b.rho_c - b.support >= self.rho_inner
            && b.t_c - b.t_support >= self.t_margin
            && b.t_c + b.t_support <= 1.0 - self.t_margin
    }
}

fn draw(rng: &mut ChaCha8Rng, (lo, hi): (f64, f64)) -> f64 {
    if hi > lo {
        rng.gen_range(lo..hi)
    } else {
        lo
    }
}

/// Bump `index` of the corpus, redrawn from its stream until it satisfies the
/// margins (None after 1000 attempts).
pub fn bump(seed: u64, index: usize, spec: &BumpCorpusSpec) -> Option<TestBump> {
    let mut rng = stream(seed, index);
    for _ in 0..1000 {
        let width = draw(&mut rng, spec.width);
        let t_width = draw(&mut rng, spec.t_width);
        let b = TestBump {
            tilt: draw(&mut rng, spec.tilt),
            ..TestBump::gaussian(
                draw(&mut rng, spec.rho_c),
                rng.gen_range(0.0..std::f64::consts::TAU),
                draw(&mut rng, spec.t_c),
                width,
                t_width,
            )
        };
        if spec.admits(&b) {
            return Some(b);
        }
    }
    None
}

pub fn corpus(seed: u64, spec: &BumpCorpusSpec) -> Vec<TestBump> {
    (0..spec.size).filter_map(|i| bump(seed, i, spec)).collect()
}

/// exp(i tilt rho) exp(-((rho - center)/width)^2) on a mode grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadialBump {
    pub center: f64,
    pub width: f64,
    pub tilt: f64,
}

impl RadialBump {
    pub fn sample(&self, grid: &PolarGrid) -> Vec<Complex64> {
        grid.sample(|r, _| {
            let x = (r - self.center) / self.width;
            Complex64::new(0.0, self.tilt * r).exp() * (-x * x).exp()
        })
    }
}

pub fn radial_corpus(seed: u64, size: usize, center: (f64, f64), width: (f64, f64), tilt: (f64, f64)) -> Vec<RadialBump> {
    (0..size)
        .map(|i| {
            let mut rng = stream(seed, i);
            RadialBump {
                center: draw(&mut rng, center),
                width: draw(&mut rng, width),
                tilt: draw(&mut rng, tilt),
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::RadialGrid;

    #[test]
    fn same_seed_same_corpus() {
        let grid = PolarGrid::plane(RadialGrid::uniform(2, 7.0, 120).unwrap(), 64).unwrap();
        let spec = BumpCorpusSpec::moving(100, &grid);
        let a = corpus(5, &spec);
        assert_eq!(a, corpus(5, &spec));
        assert_ne!(a[0], corpus(6, &spec)[0]);
        assert_eq!(a.len(), 100);
        assert!(a.iter().all(|b| spec.admits(b) && b.fits_grid(&grid, 5)));
        assert_eq!(bump(5, 37, &spec).unwrap(), a[37]);
        assert!(corpus(5, &BumpCorpusSpec { size: 0, ..spec }).is_empty());
    }

    #[test]
    fn quadratic_log_bumps_keep_their_margins() {
        let spec = BumpCorpusSpec::quadratic_log(30, 1.0);
        let c = corpus(9, &spec);
        assert_eq!(c.len(), 30);
        for b in &c {
            assert!(b.rho_c - b.support >= 1.0);
            assert!(b.t_c - b.t_support >= 0.25 && b.t_c + b.t_support <= 0.75);
        }
    }
}
