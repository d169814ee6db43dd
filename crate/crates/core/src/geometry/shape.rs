use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::RadialGraph;
use crate::error::{Error, Result};

/// How a perturbed sphere is perturbed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Perturbation {
    /// `cos(ℓθ)` on the circle, `cos(ℓφ)` on axisymmetric profiles.
    Mode(u32),
    /// Random combination of modes `2..=max_mode`, normalized so the
    /// perturbation has sup-norm at most one.
    Random { seed: u64, max_mode: u32 },
}

/// Initial surface families.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ShapeSpec {
    Sphere { radius: f64 },
    /// `x²/a² + y²/b² = 1`, curves only.
    Ellipse { a: f64, b: f64 },
    /// Equatorial semi-axis `a`, polar semi-axis `c`; axisymmetric surfaces only.
    EllipsoidOfRevolution { a: f64, c: f64 },
    /// `r = R(1 + ε·p)` with `p` from [`Perturbation`].
    PerturbedSphere { radius: f64, eps: f64, perturbation: Perturbation },
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidShape(format!("{name} must be positive, got {v}")))
    }
}

/// Samples `spec` on the grid for dimension `n` with `intervals` cells.
pub fn make_shape(spec: &ShapeSpec, n: usize, intervals: usize) -> Result<RadialGraph> {
    RadialGraph::check_grid(n, intervals)?;
    match *spec {
        ShapeSpec::Sphere { radius } => {
            positive("radius", radius)?;
            RadialGraph::from_fn(n, intervals, |_| radius)
        }
        ShapeSpec::Ellipse { a, b } => {
            positive("a", a)?;
            positive("b", b)?;
            if n != 1 {
                return Err(Error::InvalidShape("ellipse requires n = 1".into()));
            }
            RadialGraph::from_fn(n, intervals, |t| {
                a * b / (b * b * t.cos().powi(2) + a * a * t.sin().powi(2)).sqrt()
            })
        }
        ShapeSpec::EllipsoidOfRevolution { a, c } => {
            positive("a", a)?;
            positive("c", c)?;
            if n != 2 {
                return Err(Error::InvalidShape("ellipsoid_of_revolution requires n = 2".into()));
            }
            RadialGraph::from_fn(n, intervals, |phi| {
                a * c / (c * c * phi.sin().powi(2) + a * a * phi.cos().powi(2)).sqrt()
            })
        }
        ShapeSpec::PerturbedSphere { radius, eps, perturbation } => {
            positive("radius", radius)?;
            if !(eps.is_finite() && eps >= 0.0) {
                return Err(Error::InvalidShape(format!("eps must be nonnegative, got {eps}")));
            }
            let profile = perturbation_profile(n, perturbation)?;
            let graph = RadialGraph::from_fn_unchecked(n, intervals, |x| radius * (1.0 + eps * profile(x)));
            if let Some((node, &value)) =
                graph.samples().iter().enumerate().find(|(_, &v)| !(v > 0.0))
            {
                return Err(Error::InvalidShape(format!(
                    "perturbation makes the radius non-positive ({value} at node {node})"
                )));
            }
            Ok(graph)
        }
    }
}

type Profile = Box<dyn Fn(f64) -> f64>;

fn perturbation_profile(n: usize, p: Perturbation) -> Result<Profile> {
    match p {
        Perturbation::Mode(l) => Ok(Box::new(move |x: f64| (l as f64 * x).cos())),
        Perturbation::Random { seed, max_mode } => {
            if max_mode < 2 {
                return Err(Error::InvalidShape("random perturbation needs max_mode >= 2".into()));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let terms: Vec<(f64, f64, f64)> = (2..=max_mode)
                .map(|j| {
                    let c = rng.gen_range(-1.0..1.0) / j as f64;
                    // Axisymmetric profiles must stay even about both poles.
                    let phase = if n == 1 { rng.gen_range(0.0..2.0 * PI) } else { 0.0 };
                    (j as f64, c, phase)
                })
                .collect();
            let norm: f64 = terms.iter().map(|t| t.1.abs()).sum::<f64>().max(f64::MIN_POSITIVE);
            Ok(Box::new(move |x: f64| {
                terms.iter().map(|&(j, c, ph)| c * (j * x + ph).cos()).sum::<f64>() / norm
            }))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sphere_is_constant() {
        let g = make_shape(&ShapeSpec::Sphere { radius: 2.0 }, 1, 64).unwrap();
        assert!(g.samples().iter().all(|&r| r == 2.0));
    }

    #[test]
    fn ellipse_points_satisfy_implicit_equation() {
        let g = make_shape(&ShapeSpec::Ellipse { a: 2.0, b: 1.0 }, 1, 128).unwrap();
        for (i, &r) in g.samples().iter().enumerate() {
            let t = g.coord(i);
            let (x, y) = (r * t.cos(), r * t.sin());
            assert!((x * x / 4.0 + y * y - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn ellipsoid_profile_on_implicit_surface() {
        let g = make_shape(&ShapeSpec::EllipsoidOfRevolution { a: 1.5, c: 1.0 }, 2, 64).unwrap();
        for (i, &r) in g.samples().iter().enumerate() {
            let p = g.coord(i);
            let (rho, z) = (r * p.sin(), r * p.cos());
            assert!((rho * rho / 2.25 + z * z - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn mode_perturbation_by_construction() {
        let spec = ShapeSpec::PerturbedSphere { radius: 1.0, eps: 0.2, perturbation: Perturbation::Mode(3) };
        let g = make_shape(&spec, 1, 64).unwrap();
        for (i, &r) in g.samples().iter().enumerate() {
            assert!((r - (1.0 + 0.2 * (3.0 * g.coord(i)).cos())).abs() < 1e-15);
        }
    }

    #[test]
    fn random_perturbation_is_deterministic_and_bounded() {
        let spec = ShapeSpec::PerturbedSphere {
            radius: 1.0,
            eps: 0.3,
            perturbation: Perturbation::Random { seed: 7, max_mode: 5 },
        };
        for n in [1, 2] {
            let a = make_shape(&spec, n, 64).unwrap();
            let b = make_shape(&spec, n, 64).unwrap();
            assert_eq!(a, b);
            assert!(a.samples().iter().all(|&r| (0.7 - 1e-12..=1.3 + 1e-12).contains(&r)));
        }
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(make_shape(&ShapeSpec::Sphere { radius: 0.0 }, 1, 64).is_err());
        assert!(make_shape(&ShapeSpec::Sphere { radius: -1.0 }, 2, 64).is_err());
        assert!(make_shape(&ShapeSpec::Ellipse { a: 2.0, b: 1.0 }, 2, 64).is_err());
        let too_big = ShapeSpec::PerturbedSphere { radius: 1.0, eps: 1.5, perturbation: Perturbation::Mode(2) };
        assert!(matches!(make_shape(&too_big, 1, 64), Err(Error::InvalidShape(_))));
    }
}
