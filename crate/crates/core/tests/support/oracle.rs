//! Brute-force 2-D integration of the product of two exponential densities.
//! Test-only; shares no code with the crate under test.

#![allow(dead_code)]

const GL_X: [f64; 5] = [
    0.148_874_338_981_631_2,
    0.433_395_394_129_247_2,
    0.679_409_568_299_024_4,
    0.865_063_366_688_984_5,
    0.973_906_528_517_171_7,
];
const GL_W: [f64; 5] = [
    0.295_524_224_714_752_9,
    0.269_266_719_309_996_3,
    0.219_086_362_515_982_0,
    0.149_451_349_150_580_6,
    0.066_671_344_308_688_1,
];

fn gauss_legendre<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> f64 {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    GL_X.iter().zip(GL_W).map(|(&x, w)| w * (f(c - h * x) + f(c + h * x))).sum::<f64>() * h
}

fn halving<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, whole: f64, tol: f64, depth: u32) -> f64 {
    let m = 0.5 * (a + b);
    let left = gauss_legendre(f, a, m);
    let right = gauss_legendre(f, m, b);
    if depth > 40 || (left + right - whole).abs() <= tol {
        return left + right;
    }
    halving(f, a, m, left, 0.5 * tol, depth + 1) + halving(f, m, b, right, 0.5 * tol, depth + 1)
}

/// Adaptive 10-point Gauss–Legendre with interval halving.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> f64 {
    if b <= a {
        return 0.0;
    }
    let whole = gauss_legendre(&f, a, b);
    halving(&f, a, b, whole, tol, 0)
}

fn density(rate: f64, x: f64) -> f64 {
    rate * (-rate * x).exp()
}

/// P(T1 <= c1, T2 <= c2, T1 + T2 <= s) with T1 ~ Exp(a), T2 ~ Exp(b),
/// both integrals done numerically over the joint density.
pub fn region_probability(a: f64, b: f64, c1: f64, c2: f64, s: f64) -> f64 {
    let upper = c1.min(s);
    let outer = |x: f64| {
        let cap = c2.min(s - x);
        density(a, x) * integrate(|y| density(b, y), 0.0, cap, 1e-14)
    };
    let kink = s - c2;
    if kink > 0.0 && kink < upper {
        integrate(outer, 0.0, kink, 1e-13) + integrate(outer, kink, upper, 1e-13)
    } else {
        integrate(outer, 0.0, upper, 1e-13)
    }
}

/// P(T1 + T2 <= t) by 2-D integration over the triangle.
pub fn sum_probability(a: f64, b: f64, t: f64) -> f64 {
    if t <= 0.0 {
        return 0.0;
    }
    region_probability(a, b, t, t, t)
}
