//! Exact Fujishige–Wolfe minimum-norm-point algorithm.
//!
//! For a submodular `f` with `f(∅) = 0`, the minimum-norm point `x*` of the
//! base polytope satisfies: `{i : x*_i < 0}` is the smallest minimizer of `f`.

use num_traits::{One, Signed, Zero};

use crate::rational::Rational;

fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Vertex of the base polytope minimizing `<w, ·>`.
fn greedy_vertex<F: Fn(&[bool]) -> Rational>(f: &F, n: usize, weights: &[Rational]) -> Vec<Rational> {
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| weights[a].cmp(&weights[b]).then(a.cmp(&b)));
    let mut x = vec![Rational::zero(); n];
    let mut set = vec![false; n];
    let mut prev = f(&set);
    for i in order {
        set[i] = true;
        let cur = f(&set);
        x[i] = &cur - &prev;
        prev = cur;
    }
    x
}

/// Solves `[[G, 1], [1ᵀ, 0]] [α; μ] = [0; 1]` for the affine minimizer
/// coefficients `α`.
fn affine_minimizer(points: &[Vec<Rational>]) -> Vec<Rational> {
    let k = points.len();
    let size = k + 1;
    let mut m: Vec<Vec<Rational>> = vec![vec![Rational::zero(); size + 1]; size];
    for i in 0..k {
        for j in 0..k {
            m[i][j] = dot(&points[i], &points[j]);
        }
        m[i][k] = Rational::one();
        m[k][i] = Rational::one();
    }
    m[k][size] = Rational::one();

    for col in 0..size {
        let pivot = (col..size)
            .find(|&r| !m[r][col].is_zero())
            .expect("corral points are affinely independent");
        m.swap(col, pivot);
        let inv = m[col][col].recip();
        for c in col..=size {
            m[col][c] = &m[col][c] * &inv;
        }
        for r in 0..size {
            if r == col || m[r][col].is_zero() {
                continue;
            }
            let factor = m[r][col].clone();
            for c in col..=size {
                let delta = &factor * &m[col][c];
                m[r][c] -= delta;
            }
        }
    }
    (0..k).map(|i| m[i][size].clone()).collect()
}

fn combine(points: &[Vec<Rational>], coeffs: &[Rational], n: usize) -> Vec<Rational> {
    let mut x = vec![Rational::zero(); n];
    for (p, c) in points.iter().zip(coeffs) {
        for (xi, pi) in x.iter_mut().zip(p) {
            *xi += c * pi;
        }
    }
    x
}

/// Minimum-norm point of the base polytope of `f` (normalized so that
/// `f(∅) = 0` internally).
pub fn min_norm_point<F: Fn(&[bool]) -> Rational>(f: F, n: usize) -> Vec<Rational> {
    let base = f(&vec![false; n]);
    let g = |x: &[bool]| f(x) - &base;

    let mut points = vec![greedy_vertex(&g, n, &vec![Rational::zero(); n])];
    let mut lambda = vec![Rational::one()];
    let mut x = points[0].clone();

    loop {
        let q = greedy_vertex(&g, n, &x);
        if dot(&x, &x) <= dot(&x, &q) {
            return x;
        }
        points.push(q);
        lambda.push(Rational::zero());

        loop {
            let alpha = affine_minimizer(&points);
            let y = combine(&points, &alpha, n);
            if alpha.iter().all(|a| a.is_positive()) {
                x = y;
                lambda = alpha;
                break;
            }
            let theta = alpha
                .iter()
                .zip(&lambda)
                .filter(|(a, l)| !a.is_positive() && *l > *a)
                .map(|(a, l)| l / (l - a))
                .min()
                .unwrap_or_else(Rational::one);
            let keep = Rational::one() - &theta;
            lambda = alpha
                .iter()
                .zip(&lambda)
                .map(|(a, l)| &theta * a + &keep * l)
                .collect();
            let mut i = 0;
            while i < points.len() {
                if lambda[i].is_zero() {
                    points.remove(i);
                    lambda.remove(i);
                } else {
                    i += 1;
                }
            }
        }
    }
}

/// Smallest minimizer of a submodular `f` on `{0, …, n-1}`.
pub fn smallest_minimizer<F: Fn(&[bool]) -> Rational>(f: F, n: usize) -> Vec<bool> {
    min_norm_point(f, n).iter().map(|v| v.is_negative()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};

    fn count(x: &[bool]) -> i64 {
        x.iter().filter(|&&b| b).count() as i64
    }

    #[test]
    fn modular_functions() {
        assert_eq!(smallest_minimizer(|x| int(count(x)), 3), vec![false; 3]);
        assert_eq!(smallest_minimizer(|x| -int(count(x)), 3), vec![true; 3]);
        let w = [int(1), int(-2), int(0), rat(-1, 3)];
        let f = |x: &[bool]| -> Rational {
            x.iter().zip(&w).filter(|(b, _)| **b).map(|(_, v)| v.clone()).sum()
        };
        assert_eq!(smallest_minimizer(f, 4), vec![false, true, false, true]);
    }

    #[test]
    fn cut_function_plus_modular() {
        // path 0 - 1 - 2 with unit weights, pulling 0 and 2 down
        let f = |x: &[bool]| -> Rational {
            let cut = (x[0] != x[1]) as i64 + (x[1] != x[2]) as i64;
            let pull = -(rat(3, 2)) * int(x[0] as i64) - rat(3, 2) * int(x[2] as i64);
            int(cut) + pull
        };
        // {0,2} costs 2 - 3 = -1, {0,1,2} costs -3
        assert_eq!(smallest_minimizer(f, 3), vec![true, true, true]);
    }
}
