//! Small reference instances with known frame bounds and adjoints.
//!
//! | name | H, B, Z | contents |
//! |------|---------|----------|
//! | E1 | 4, 2, 3 | family `X = {f1 - f2, f1 + f2}`, operator `U` on `B` |
//! | E2 | 3, 2, 4 | family `y = {f1 + f2, f1 - f2}`, `S = diag(4, 4, 2, 2)` |
//! | E3 | 8, 8, 8 | componentwise product, family `g_i = 1/(i+1) * ones` |
//! | E4 | 3, 2, 4 | family `x = {f1 + f2}`, projection `K` onto `span(u1, u2)` |
//! | E5 | 3, 2, 4 | canonical family `f`, operator `V` with `V u1 = u2` |
//! | E6 | 2, 2, 4 | b-orthonormal canonical family `f`, swap `U` on `B` |

use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use crate::bilinear::BilinearMap;
use crate::family::VectorFamily;
use crate::frames::FrameFamily;
use crate::linalg::{Matrix, Space, Vector};
use crate::Result;

/// Number of elements in the discretized tight frame E3.
pub const E3_LEN: usize = 10_000;
pub const E3_DIM: usize = 8;

#[derive(Debug, Clone)]
pub struct Golden {
    pub name: String,
    pub map: BilinearMap,
    pub families: Vec<(String, VectorFamily)>,
    pub operators: Vec<(String, Matrix)>,
}

impl Golden {
    /// # Panics
    /// If no family is called `name`.
    pub fn family(&self, name: &str) -> &VectorFamily {
        self.families
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, f)| f)
            .unwrap_or_else(|| panic!("no family {name}"))
    }

    pub fn operator(&self, name: &str) -> Option<&Matrix> {
        self.operators
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, m)| m)
    }

    /// Frame family `fam`, with the operator `k` as `K` when given.
    pub fn frame(&self, fam: &str, k: Option<&str>) -> Result<FrameFamily<'_>> {
        let ff = FrameFamily::new(&self.map, self.family(fam).clone())?;
        match k.and_then(|k| self.operator(k)) {
            Some(k) => ff.with_k(k.clone()),
            None => Ok(ff),
        }
    }
}

fn unit(n: usize, k: usize) -> Vector {
    Vector::basis(n, k)
}

fn combo(n: usize, terms: &[(usize, f64)]) -> Vector {
    let mut v = Vector::zeros(n);
    for &(k, c) in terms {
        v[k] += c;
    }
    v
}

fn build(dims: (usize, usize, usize), images: &[((usize, usize), Vector)]) -> BilinearMap {
    let (h, b, z) = dims;
    BilinearMap::from_images(h, b, z, |i, j| {
        images
            .iter()
            .find(|(ij, _)| *ij == (i, j))
            .map(|(_, v)| v.clone())
            .unwrap_or_else(|| Vector::zeros(z))
    })
    .expect("golden tensor is well formed")
}

fn golden(
    name: &str,
    map: BilinearMap,
    families: Vec<(&str, VectorFamily)>,
    operators: Vec<(&str, Matrix)>,
) -> Golden {
    Golden {
        name: name.to_string(),
        map,
        families: families
            .into_iter()
            .map(|(n, f)| (n.to_string(), f))
            .collect(),
        operators: operators
            .into_iter()
            .map(|(n, m)| (n.to_string(), m))
            .collect(),
    }
}

pub fn e1_map() -> BilinearMap {
    build(
        (4, 2, 3),
        &[
            ((0, 0), unit(3, 0)),
            ((1, 0), unit(3, 2)),
            ((0, 1), unit(3, 1)),
        ],
    )
}

/// `U f1 = f1 + f2`, `U f2 = 0`.
pub fn e1() -> Golden {
    golden(
        "E1",
        e1_map(),
        vec![("X", VectorFamily::in_b(2, &[[1., -1.], [1., 1.]]).unwrap())],
        vec![(
            "U",
            Matrix::from_rows(&[[1., 0.], [1., 0.]]).with_spaces(Space::B, Space::B),
        )],
    )
}

pub fn e2_map() -> BilinearMap {
    build(
        (3, 2, 4),
        &[
            ((0, 0), unit(4, 0)),
            ((1, 0), unit(4, 2)),
            ((2, 0), unit(4, 0)),
            ((0, 1), unit(4, 1)),
            ((1, 1), unit(4, 3)),
            ((2, 1), unit(4, 1)),
        ],
    )
}

pub fn e2() -> Golden {
    golden(
        "E2",
        e2_map(),
        vec![("y", VectorFamily::in_b(2, &[[1., 1.], [1., -1.]]).unwrap())],
        Vec::new(),
    )
}

/// `b(h, x) = h * x` componentwise on `R^n`.
pub fn componentwise_map(n: usize) -> BilinearMap {
    BilinearMap::from_images(
        n,
        n,
        n,
        |i, j| {
            if i == j {
                unit(n, i)
            } else {
                Vector::zeros(n)
            }
        },
    )
    .expect("n > 0")
}

/// `m` elements `g_i = 1/(i+1) * ones` over the componentwise map on `R^n`;
/// tight with bound `sum 1/(i+1)^2`.
pub fn e3_with(n: usize, m: usize) -> Golden {
    let vectors = (0..m)
        .map(|i| Vector::from_slice(&vec![1.0 / (i as f64 + 1.0); n]))
        .collect();
    golden(
        "E3",
        componentwise_map(n),
        vec![("g", VectorFamily::new(Space::B, n, vectors).unwrap())],
        Vec::new(),
    )
}

pub fn e3() -> Golden {
    e3_with(E3_DIM, E3_LEN)
}

pub fn e4_map() -> BilinearMap {
    build(
        (3, 2, 4),
        &[
            ((0, 0), combo(4, &[(0, 1.), (1, -1.)])),
            ((1, 0), combo(4, &[(0, 1.), (1, 1.)])),
            ((2, 0), unit(4, 2)),
            ((0, 1), combo(4, &[(0, 1.), (1, 1.)])),
            ((1, 1), combo(4, &[(0, -1.), (1, 1.)])),
            ((2, 1), unit(4, 3)),
        ],
    )
}

pub fn e4() -> Golden {
    golden(
        "E4",
        e4_map(),
        vec![("x", VectorFamily::in_b(2, &[[1., 1.]]).unwrap())],
        vec![(
            "K",
            Matrix::diag(&[1., 1., 0., 0.]).with_spaces(Space::Z, Space::Z),
        )],
    )
}

pub fn e5_map() -> BilinearMap {
    build(
        (3, 2, 4),
        &[
            ((0, 0), unit(4, 0)),
            ((1, 0), unit(4, 2)),
            ((2, 0), combo(4, &[(0, 1.), (1, -1.)])),
            ((0, 1), unit(4, 1)),
            ((1, 1), unit(4, 3)),
            ((2, 1), combo(4, &[(0, 1.), (1, 1.)])),
        ],
    )
}

/// `V u1 = u2`, `V u_k = 0` otherwise.
pub fn e5() -> Golden {
    let mut v = Matrix::zeros(4, 4);
    v[(1, 0)] = 1.0;
    golden(
        "E5",
        e5_map(),
        vec![("f", VectorFamily::in_b(2, &[[1., 0.], [0., 1.]]).unwrap())],
        vec![("V", v.with_spaces(Space::Z, Space::Z))],
    )
}

pub fn e6_map() -> BilinearMap {
    build(
        (2, 2, 4),
        &[
            ((0, 0), unit(4, 0)),
            ((1, 0), unit(4, 1)),
            ((0, 1), unit(4, 2)),
            ((1, 1), unit(4, 3)),
        ],
    )
}

/// `U` swaps `f1` and `f2`.
pub fn e6() -> Golden {
    golden(
        "E6",
        e6_map(),
        vec![("f", VectorFamily::in_b(2, &[[1., 0.], [0., 1.]]).unwrap())],
        vec![(
            "U",
            Matrix::from_rows(&[[0., 1.], [1., 0.]]).with_spaces(Space::B, Space::B),
        )],
    )
}

/// E1, E2, E4, E5, E6 and a reduced E3.
pub fn all_small() -> Vec<Golden> {
    vec![e1(), e2(), e3_with(E3_DIM, 50), e4(), e5(), e6()]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn e3_is_tight_near_basel() {
        let g = e3();
        let b = g.frame("g", None).unwrap().optimal_bounds();
        let partial: f64 = (0..E3_LEN).map(|i| 1.0 / ((i + 1) as f64).powi(2)).sum();
        assert!((b.lower - b.upper).abs() <= 1e-8 * b.upper);
        assert!((b.upper - partial).abs() < 1e-10);
        assert!((b.upper - core::f64::consts::PI.powi(2) / 6.0).abs() <= 1.01e-4);
    }

    #[test]
    fn e5_dual_product_formula() {
        let m = e5_map();
        let (z, x) = (
            Vector::from_slice(&[1., 2., 3., 4.]),
            Vector::from_slice(&[0.5, -1.5]),
        );
        let (x1, x2) = (0.5, -1.5);
        let expect = [
            x1 * 1. + x2 * 2.,
            x1 * 3. + x2 * 4.,
            (x1 + x2) * 1. + (x2 - x1) * 2.,
        ];
        let got = m.dual_product(&z, &x).unwrap();
        for (a, b) in got.iter().zip(expect) {
            assert!((a - b).abs() < 1e-15);
        }
    }
}
