//! Built-in inequalities.
//!
//! | name                  | Euclidean statement                                   | curved forms          |
//! |-----------------------|-------------------------------------------------------|-----------------------|
//! | `euler`               | R >= 2r                                               | spherical, hyperbolic |
//! | `eq4-spherical-chain` | R/r >= T1 >= T2 >= T3 >= 2                            | spherical             |
//! | `eq5-lower`           | (a+b)(b+c)(c+a)/(4abc) >= 2, unified via s            | all                   |
//! | `eq5-upper`           | R/r >= (a+b)(b+c)(c+a)/(4abc), unified via s          | all                   |
//! | `eq6-left`            | R/r >= 2 (a+b+c)(a^3+b^3+c^3)/(ab+bc+ca)^2            | spherical             |
//! | `eq6-right`           | (a+b+c)(a^3+b^3+c^3)/(ab+bc+ca)^2 >= 1                | all (side-only)       |
//! | `eq7-left`            | 2R^2 + r^2 >= (a^2+b^2+c^2)/4                         | spherical             |
//! | `eq7-right`           | (a^2+b^2+c^2)/4 >= 3r(2R - r)                         | hyperbolic            |
//! | `eq8-left`            | 1/(4r^2) >= 1/a^2 + 1/b^2 + 1/c^2                     | spherical             |
//! | `eq8-middle`          | 1/a^2 + 1/b^2 + 1/c^2 >= (1/a + 1/b + 1/c)^2 / 3      | all (side-only)       |
//! | `eq8-right`           | (1/a + 1/b + 1/c)^2 / 3 >= 1/(2rR)                    | spherical, hyperbolic |

use std::sync::OnceLock;

use crate::geometry::{circumradius_functional, inradius_functional, Geometry, Triangle};

use super::{
    generalize, Basis, Claim, HomogeneousPair, Inequality, InequalityError, Link, Monotonicity,
};

/// Immutable collection of registered inequalities.
#[derive(Debug, Clone)]
pub struct Registry {
    entries: Vec<Inequality>,
}

impl Registry {
    pub fn new() -> Self {
        Registry { entries: Vec::new() }
    }

    /// Adds an entry after checking that every transport-theorem claim meets
    /// the theorem's precondition for each pair link.
    pub fn register(&mut self, ineq: Inequality) -> Result<(), InequalityError> {
        if self.get(&ineq.name).is_some() {
            return Err(InequalityError::InvalidArgument(format!("duplicate inequality '{}'", ineq.name)));
        }
        for claim in &ineq.claims {
            if claim.basis != Basis::TransportTheorem {
                continue;
            }
            for link in &ineq.links {
                if let Link::Pair(pair) = link {
                    generalize(pair, claim.geometry)?;
                }
            }
        }
        self.entries.push(ineq);
        Ok(())
    }

    pub fn get(&self, name: &str) -> Option<&Inequality> {
        self.entries.iter().find(|e| e.name == name)
    }

    pub fn lookup(&self, name: &str) -> Result<&Inequality, InequalityError> {
        self.get(name).ok_or_else(|| InequalityError::UnknownInequality(name.to_string()))
    }

    pub fn iter(&self) -> impl Iterator<Item = &Inequality> {
        self.entries.iter()
    }

    pub fn names(&self) -> Vec<&str> {
        self.entries.iter().map(|e| e.name.as_str()).collect()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Every `(inequality, geometry)` pair claimed to hold, in registry order.
    pub fn claimed(&self) -> Vec<(&Inequality, Geometry)> {
        self.entries
            .iter()
            .flat_map(|e| e.claims.iter().map(move |c| (e, c.geometry)))
            .collect()
    }

    /// Re-runs the Euclidean self-test of every pair link on `samples`
    /// triangles.
    pub fn self_test(&self, samples: usize, seed: u64) -> Result<(), InequalityError> {
        for e in &self.entries {
            for link in &e.links {
                if let Link::Pair(pair) = link {
                    pair.euclidean_self_test(samples, seed)?;
                }
            }
        }
        Ok(())
    }

    /// The shared built-in registry.
    pub fn builtin() -> &'static Registry {
        static BUILTIN: OnceLock<Registry> = OnceLock::new();
        BUILTIN.get_or_init(|| registry_builtin().expect("built-in inequalities pass registration"))
    }
}

impl Default for Registry {
    fn default() -> Self {
        Self::new()
    }
}

fn claims(list: &[(Geometry, Basis)]) -> Vec<Claim> {
    list.iter().map(|&(geometry, basis)| Claim { geometry, basis }).collect()
}

fn ratio(x: f64, y: f64) -> f64 {
    x / y
}

/// `(xyz + x^3 + y^3 + z^3) / (2xyz)`
fn chain_t1(x: f64, y: f64, z: f64) -> f64 {
    (x * y * z + x.powi(3) + y.powi(3) + z.powi(3)) / (2.0 * x * y * z)
}

fn cyclic(x: f64, y: f64, z: f64) -> f64 {
    x / y + y / z + z / x
}

fn chain_t2(x: f64, y: f64, z: f64) -> f64 {
    cyclic(x, y, z) - 1.0
}

fn chain_t3(x: f64, y: f64, z: f64) -> f64 {
    2.0 / 3.0 * cyclic(x, y, z)
}

/// `(a+b+c)(a^3+b^3+c^3) / (ab+bc+ca)^2`
fn eq6_term(a: f64, b: f64, c: f64) -> f64 {
    let q = a * b + b * c + c * a;
    (a + b + c) * (a.powi(3) + b.powi(3) + c.powi(3)) / (q * q)
}

fn sum_sq(a: f64, b: f64, c: f64) -> f64 {
    a * a + b * b + c * c
}

fn sum_inv_sq(a: f64, b: f64, c: f64) -> f64 {
    1.0 / (a * a) + 1.0 / (b * b) + 1.0 / (c * c)
}

fn third_sq_sum_inv(a: f64, b: f64, c: f64) -> f64 {
    let s = 1.0 / a + 1.0 / b + 1.0 / c;
    s * s / 3.0
}

/// `2 s((a+b)/2) s((b+c)/2) s((a+c)/2) / (s(a) s(b) s(c))`
pub fn eq5_middle(t: &Triangle) -> f64 {
    let k = t.kind();
    let [a, b, c] = t.sides();
    2.0 * k.s(0.5 * (a + b)) * k.s(0.5 * (b + c)) * k.s(0.5 * (a + c)) / t.s_product()
}

fn radius_ratio(t: &Triangle) -> f64 {
    circumradius_functional(t).value / inradius_functional(t).value
}

/// Registers the built-in inequalities and runs their registration checks.
pub fn registry_builtin() -> Result<Registry, InequalityError> {
    use Basis::*;
    use Geometry::*;
    use Monotonicity::*;

    let mut reg = Registry::new();

    reg.register(Inequality {
        name: "euler".into(),
        description: "rho(R) >= 2 rho(r)".into(),
        links: vec![Link::Pair(HomogeneousPair::new("euler", ratio, |_, _, _| 2.0, 0, Some(Decreasing), true)?)],
        claims: claims(&[(Euclidean, EuclideanBase), (Spherical, TransportTheorem), (Hyperbolic, Cited)]),
        equality_iff_equilateral: true,
    })?;

    reg.register(Inequality {
        name: "eq4-spherical-chain".into(),
        description: "rho(R)/rho(r) >= T1 >= T2 >= T3 >= 2 on s-substituted sides".into(),
        links: vec![
            Link::Pair(HomogeneousPair::new("ratio>=T1", ratio, chain_t1, 0, Some(Decreasing), true)?),
            Link::sides("T1>=T2", chain_t1, chain_t2),
            Link::sides("T2>=T3", chain_t2, chain_t3),
            Link::sides("T3>=2", chain_t3, |_, _, _| 2.0),
        ],
        claims: claims(&[(Euclidean, EuclideanBase), (Spherical, TransportTheorem)]),
        equality_iff_equilateral: false,
    })?;

    reg.register(Inequality {
        name: "eq5-lower".into(),
        description: "2 s((a+b)/2) s((b+c)/2) s((a+c)/2) / (s(a)s(b)s(c)) >= 2".into(),
        links: vec![Link::direct("middle>=2", eq5_middle, |_| 2.0)],
        claims: claims(&[(Euclidean, EuclideanBase), (Spherical, Cited), (Hyperbolic, Cited)]),
        equality_iff_equilateral: true,
    })?;

    reg.register(Inequality {
        name: "eq5-upper".into(),
        description: "rho(R)/rho(r) >= 2 s((a+b)/2) s((b+c)/2) s((a+c)/2) / (s(a)s(b)s(c))".into(),
        links: vec![Link::direct("ratio>=middle", radius_ratio, eq5_middle)],
        claims: claims(&[(Euclidean, EuclideanBase), (Spherical, Cited), (Hyperbolic, Cited)]),
        equality_iff_equilateral: true,
    })?;

    reg.register(Inequality {
        name: "eq6-left".into(),
        description: "rho(R)/rho(r) >= 2 (x+y+z)(x^3+y^3+z^3)/(xy+yz+zx)^2 at x,y,z = s(a),s(b),s(c)".into(),
        links: vec![Link::Pair(HomogeneousPair::new(
            "eq6-left",
            ratio,
            |a, b, c| 2.0 * eq6_term(a, b, c),
            0,
            Some(Decreasing),
            true,
        )?)],
        claims: claims(&[(Euclidean, EuclideanBase), (Spherical, TransportTheorem)]),
        equality_iff_equilateral: true,
    })?;

    reg.register(Inequality {
        name: "eq6-right".into(),
        description: "(x+y+z)(x^3+y^3+z^3)/(xy+yz+zx)^2 >= 1 at x,y,z = s(a),s(b),s(c)".into(),
        links: vec![Link::sides("term>=1", eq6_term, |_, _, _| 1.0)],
        claims: claims(&[
            (Euclidean, EuclideanBase),
            (Spherical, SideSubstitution),
            (Hyperbolic, SideSubstitution),
        ]),
        equality_iff_equilateral: true,
    })?;

    reg.register(Inequality {
        name: "eq7-left".into(),
        description: "2 tan^2 R + tan^2 r >= (s(a)^2+s(b)^2+s(c)^2)(s(a)+s(b)+s(c))/s(a+b+c)".into(),
        links: vec![Link::Pair(HomogeneousPair::new(
            "eq7-left",
            |x, y| 2.0 * x * x + y * y,
            |a, b, c| 0.25 * sum_sq(a, b, c),
            2,
            Some(Decreasing),
            true,
        )?)],
        claims: claims(&[(Euclidean, EuclideanBase), (Spherical, TransportTheorem)]),
        equality_iff_equilateral: true,
    })?;

    reg.register(Inequality {
        name: "eq7-right".into(),
        description: "(s(a)^2+s(b)^2+s(c)^2)(s(a)+s(b)+s(c))/s(a+b+c) >= 3 tanh r (2 tanh R - tanh r)".into(),
        links: vec![Link::Pair(HomogeneousPair::new(
            "eq7-right",
            |x, y| -3.0 * y * (2.0 * x - y),
            |a, b, c| -0.25 * sum_sq(a, b, c),
            2,
            Some(Increasing),
            true,
        )?)],
        claims: claims(&[(Euclidean, EuclideanBase), (Hyperbolic, TransportTheorem)]),
        equality_iff_equilateral: true,
    })?;

    reg.register(Inequality {
        name: "eq8-left".into(),
        description: "1/tan^2 r >= (1/s(a)^2+1/s(b)^2+1/s(c)^2) ((s(a)+s(b)+s(c))/s(a+b+c))^-1".into(),
        links: vec![Link::Pair(HomogeneousPair::new(
            "eq8-left",
            |_, y| 1.0 / (4.0 * y * y),
            sum_inv_sq,
            -2,
            Some(Decreasing),
            true,
        )?)],
        claims: claims(&[(Euclidean, EuclideanBase), (Spherical, TransportTheorem)]),
        equality_iff_equilateral: true,
    })?;

    reg.register(Inequality {
        name: "eq8-middle".into(),
        description: "1/x^2+1/y^2+1/z^2 >= (1/x+1/y+1/z)^2/3 at x,y,z = s(a),s(b),s(c)".into(),
        links: vec![Link::sides("squares>=mean", sum_inv_sq, third_sq_sum_inv)],
        claims: claims(&[
            (Euclidean, EuclideanBase),
            (Spherical, SideSubstitution),
            (Hyperbolic, SideSubstitution),
        ]),
        equality_iff_equilateral: true,
    })?;

    reg.register(Inequality {
        name: "eq8-right".into(),
        description: "(1/s(a)+1/s(b)+1/s(c))^2/3 ((s(a)+s(b)+s(c))/s(a+b+c))^-1 >= 2/(rho(r) rho(R))".into(),
        links: vec![Link::Pair(HomogeneousPair::new(
            "eq8-right",
            |x, y| -1.0 / (2.0 * x * y),
            |a, b, c| -third_sq_sum_inv(a, b, c),
            -2,
            Some(Constant),
            true,
        )?)],
        claims: claims(&[
            (Euclidean, EuclideanBase),
            (Spherical, TransportTheorem),
            (Hyperbolic, TransportTheorem),
        ]),
        equality_iff_equilateral: true,
    })?;

    Ok(reg)
}
