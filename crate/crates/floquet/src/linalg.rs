//! Dense complex linear algebra at the 2 x 2 scale used throughout the crate.
//!
//! Everything here is closed form: the matrix exponential uses the
//! eigenvalue-pair formula with a series fallback near coincident
//! eigenvalues, eigenvectors come from the adjugate rows of `M - rho I`,
//! and Hermitian 2 x 2 matrices are diagonalized directly.

use nalgebra::{Matrix2, Vector2};
use num_complex::Complex64;

pub type C64 = Complex64;
pub type Mat2 = Matrix2<Complex64>;
pub type CVec2 = Vector2<Complex64>;
pub type RMat2 = Matrix2<f64>;
pub type RVec2 = Vector2<f64>;

/// Relative eigenvalue gap below which the exponential switches to its
/// series form: `|mu1 - mu2| < COINCIDENT_EIGS * max(1, ||A||)`.
pub const COINCIDENT_EIGS: f64 = 1e-8;

#[inline]
pub fn c(re: f64, im: f64) -> C64 {
    Complex64::new(re, im)
}

#[inline]
pub fn cr(re: f64) -> C64 {
    Complex64::new(re, 0.0)
}

/// Lift a real matrix into the complex scalar field.
pub fn to_complex(m: &RMat2) -> Mat2 {
    Mat2::new(cr(m[(0, 0)]), cr(m[(0, 1)]), cr(m[(1, 0)]), cr(m[(1, 1)]))
}

/// Matrix exponential of a complex 2 x 2 matrix.
///
/// With `m = tr(A)/2` and `B = A - m I` trace-free, Cayley-Hamilton gives
/// `B^2 = theta^2 I` where `theta^2 = -det B`, so
/// `exp(A) = e^m (cosh(theta) I + sinh(theta)/theta B)`.
/// When the eigenvalues `m +- theta` nearly coincide the quotient
/// `sinh(theta)/theta` is evaluated by its series instead.
pub fn expm2(a: &Mat2) -> Mat2 {
    let m = a.trace() * 0.5;
    let b = a - Mat2::identity() * m;
    let theta2 = -b.determinant();
    let theta = theta2.sqrt();
    let scale = a.norm().max(1.0);
    let (ch, sinhc) = if theta.norm() < 0.5 * COINCIDENT_EIGS * scale {
        // cosh(theta) and sinh(theta)/theta as series in theta^2;
        // two terms already exceed f64 accuracy at this threshold
        (
            cr(1.0) + theta2 * 0.5 + theta2 * theta2 / 24.0,
            cr(1.0) + theta2 / 6.0 + theta2 * theta2 / 120.0,
        )
    } else {
        (theta.cosh(), theta.sinh() / theta)
    };
    (Mat2::identity() * ch + b * sinhc) * m.exp()
}

/// Inverse via the adjugate; `None` when the determinant vanishes exactly.
/// Callers that need a scaled singularity threshold test the determinant
/// themselves before calling.
pub fn inv2(m: &Mat2) -> Option<Mat2> {
    let d = m.determinant();
    if d.norm() == 0.0 {
        return None;
    }
    Some(Mat2::new(m[(1, 1)], -m[(0, 1)], -m[(1, 0)], m[(0, 0)]) / d)
}

/// Eigenvector of `m` for a (numerically exact) eigenvalue `rho`.
///
/// The two adjugate rows of `m - rho I` both annihilate; the larger one is
/// kept for accuracy. Returns a unit vector; falls back to `e1` when
/// `m` is (numerically) a multiple of the identity.
pub fn eigvec2(m: &Mat2, rho: C64) -> CVec2 {
    let a = CVec2::new(m[(0, 1)], rho - m[(0, 0)]);
    let b = CVec2::new(rho - m[(1, 1)], m[(1, 0)]);
    let v = if a.norm() >= b.norm() { a } else { b };
    let scale = m.norm().max(rho.norm()).max(1.0);
    if v.norm() <= 1e-14 * scale {
        return CVec2::new(cr(1.0), cr(0.0));
    }
    v / cr(v.norm())
}

/// Jordan chain `(c, c_gen)` of a 2 x 2 matrix with double eigenvalue `rho`
/// and `m != rho I`: `m c = rho c` and `m c_gen = rho c_gen + c`.
///
/// Built from a fixed linear solve: with `N = m - rho I` (nilpotent by
/// Cayley-Hamilton), `c = N v` is automatically an eigenvector for any `v`
/// with `N v != 0`; the basis vector giving the larger image is chosen and
/// the pair is scaled so `||c|| = 1`. The chain is unique only up to adding
/// multiples of `c` to `c_gen`; this particular gauge is fixed by the solve.
pub fn jordan_chain2(m: &Mat2, rho: C64) -> Option<(CVec2, CVec2)> {
    let n = m - Mat2::identity() * rho;
    let v1 = CVec2::new(cr(1.0), cr(0.0));
    let v2 = CVec2::new(cr(0.0), cr(1.0));
    let (img1, img2) = (n * v1, n * v2);
    let (v, img) = if img1.norm() >= img2.norm() {
        (v1, img1)
    } else {
        (v2, img2)
    };
    let s = img.norm();
    if s <= 1e-14 * m.norm().max(1.0) {
        return None; // m is (numerically) rho I: diagonal, not a Jordan block
    }
    Some((img / cr(s), v / cr(s)))
}

/// Eigenvalues of a Hermitian 2 x 2 matrix together with unit eigenvectors,
/// ascending by eigenvalue. Only the Hermitian part of the input is used.
pub fn herm_eig2(m: &Mat2) -> ((f64, CVec2), (f64, CVec2)) {
    let a = m[(0, 0)].re;
    let d = m[(1, 1)].re;
    let b = (m[(0, 1)] + m[(1, 0)].conj()) * 0.5;
    let mean = 0.5 * (a + d);
    let disc = (0.25 * (a - d) * (a - d) + b.norm_sqr()).sqrt();
    let (lo, hi) = (mean - disc, mean + disc);
    let vec_for = |mu: f64| -> CVec2 {
        let u = CVec2::new(b, cr(mu - a));
        let v = CVec2::new(cr(mu - d), b.conj());
        let w = if u.norm() >= v.norm() { u } else { v };
        if w.norm() <= 1e-14 * (a.abs() + d.abs() + b.norm()).max(1.0) {
            // multiple of the identity: any orthonormal pair will do
            return if mu == lo {
                CVec2::new(cr(1.0), cr(0.0))
            } else {
                CVec2::new(cr(0.0), cr(1.0))
            };
        }
        w / cr(w.norm())
    };
    let vlo = vec_for(lo);
    let mut vhi = vec_for(hi);
    if disc <= 1e-14 * (a.abs() + d.abs() + b.norm()).max(1.0) {
        vhi = CVec2::new(cr(0.0), cr(1.0));
    }
    ((lo, vlo), (hi, vhi))
}

/// Eigenvalues of a real symmetric 2 x 2 matrix, ascending.
pub fn sym_eig2(m: &RMat2) -> (f64, f64) {
    let mean = 0.5 * (m[(0, 0)] + m[(1, 1)]);
    let b = 0.5 * (m[(0, 1)] + m[(1, 0)]);
    let disc = (0.25 * (m[(0, 0)] - m[(1, 1)]).powi(2) + b * b).sqrt();
    (mean - disc, mean + disc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    /// Reference exponential: scaling and squaring on a plain Taylor series.
    fn expm_taylor(a: &Mat2) -> Mat2 {
        let s = a.norm();
        let k = (s.log2().ceil().max(0.0) as u32) + 6;
        let b = a / cr(2f64.powi(k as i32));
        let mut term = Mat2::identity();
        let mut sum = Mat2::identity();
        for j in 1..30 {
            term = (term * b) / cr(j as f64);
            sum += term;
        }
        let mut out = sum;
        for _ in 0..k {
            out = out * out;
        }
        out
    }

    fn random_mat(rng: &mut ChaCha8Rng, scale: f64) -> Mat2 {
        Mat2::from_fn(|_, _| c(rng.gen_range(-scale..scale), rng.gen_range(-scale..scale)))
    }

    #[test]
    fn expm_zero_is_identity() {
        let e = expm2(&Mat2::zeros());
        assert_relative_eq!((e - Mat2::identity()).norm(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn expm_nilpotent_is_identity_plus() {
        // [[0,1],[0,0]] has coincident eigenvalues; exercises the series path
        let a = Mat2::new(cr(0.0), cr(1.0), cr(0.0), cr(0.0));
        let e = expm2(&a);
        assert_relative_eq!((e - (Mat2::identity() + a)).norm(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn expm_rotation_block() {
        // [[0,1],[-k^2,0]] integrates the harmonic oscillator: trace 2 cos k
        let k = std::f64::consts::PI;
        let a = Mat2::new(cr(0.0), cr(1.0), cr(-k * k), cr(0.0));
        let e = expm2(&a);
        assert_relative_eq!(e.trace().re, -2.0, epsilon = 1e-12);
        assert_relative_eq!(e.trace().im, 0.0, epsilon = 1e-14);
    }

    #[test]
    fn expm_matches_taylor_reference() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let a = random_mat(&mut rng, 3.0);
            let (e, r) = (expm2(&a), expm_taylor(&a));
            assert!(
                (e - r).norm() <= 1e-11 * r.norm().max(1.0),
                "closed form deviates from reference: {:?}",
                a
            );
        }
    }

    #[test]
    fn expm_near_coincident_eigenvalues() {
        // eigenvalue gap ~1e-9 straddles the series threshold
        for eps in [0.0_f64, 1e-12, 1e-9, 1e-7] {
            let a = Mat2::new(cr(1.0), cr(1.0), cr(eps), cr(1.0));
            let (e, r) = (expm2(&a), expm_taylor(&a));
            assert!((e - r).norm() <= 1e-11 * r.norm(), "eps = {eps}");
        }
    }

    #[test]
    fn inverse_roundtrip() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..100 {
            let a = random_mat(&mut rng, 2.0);
            if a.determinant().norm() < 1e-6 {
                continue;
            }
            let inv = inv2(&a).unwrap();
            assert!((a * inv - Mat2::identity()).norm() < 1e-12 * a.norm().max(1.0));
        }
    }

    #[test]
    fn eigvec_annihilates() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..100 {
            let a = random_mat(&mut rng, 2.0);
            let tr = a.trace();
            let disc = (tr * tr - a.determinant() * 4.0).sqrt();
            for rho in [(tr + disc) * 0.5, (tr - disc) * 0.5] {
                if disc.norm() < 1e-6 {
                    continue;
                }
                let v = eigvec2(&a, rho);
                assert!((a * v - v * rho).norm() < 1e-12 * a.norm().max(1.0));
            }
        }
    }

    #[test]
    fn jordan_chain_relations() {
        let m = Mat2::new(cr(1.0), cr(1.0), cr(0.0), cr(1.0));
        let (c0, c1) = jordan_chain2(&m, cr(1.0)).unwrap();
        assert!((m * c0 - c0).norm() < 1e-14);
        assert!((m * c1 - c1 - c0).norm() < 1e-14);
        assert!(jordan_chain2(&Mat2::identity(), cr(1.0)).is_none());
    }

    #[test]
    fn hermitian_eigendecomposition() {
        let m = Mat2::new(cr(2.0), c(0.5, 0.25), c(0.5, -0.25), cr(1.0));
        let ((lo, vlo), (hi, vhi)) = herm_eig2(&m);
        assert!(lo <= hi);
        assert!((m * vlo - vlo * cr(lo)).norm() < 1e-12);
        assert!((m * vhi - vhi * cr(hi)).norm() < 1e-12);
        assert_relative_eq!(lo + hi, m.trace().re, epsilon = 1e-12);
    }
}
