//! Adaptive Gauss–Kronrod (7/15) quadrature for smooth vector integrands.

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_728_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Integrates the `N`-component function `f` over `[a, b]` to the relative
/// tolerance `rtol` (measured per component against the running total).
pub fn integrate<const N: usize>(
    f: &impl Fn(f64) -> [f64; N],
    a: f64,
    b: f64,
    rtol: f64,
    max_depth: u32,
) -> [f64; N] {
    let (whole, _) = gk15(f, a, b);
    let mut scale = [0.0; N];
    for i in 0..N {
        scale[i] = whole[i].abs();
    }
    let mut out = [0.0; N];
    recurse(f, a, b, rtol, &scale, max_depth, &mut out);
    out
}

fn recurse<const N: usize>(
    f: &impl Fn(f64) -> [f64; N],
    a: f64,
    b: f64,
    rtol: f64,
    scale: &[f64; N],
    depth: u32,
    out: &mut [f64; N],
) {
    let (k, err) = gk15(f, a, b);
    let ok = (0..N).all(|i| err[i] <= rtol * scale[i].max(1e-300) || err[i] <= 1e-300);
    if ok || depth == 0 {
        for i in 0..N {
            out[i] += k[i];
        }
        return;
    }
    let m = 0.5 * (a + b);
    recurse(f, a, m, rtol, scale, depth - 1, out);
    recurse(f, m, b, rtol, scale, depth - 1, out);
}

fn gk15<const N: usize>(f: &impl Fn(f64) -> [f64; N], a: f64, b: f64) -> ([f64; N], [f64; N]) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kr = [0.0; N];
    let mut ga = [0.0; N];
    for i in 0..N {
        kr[i] = fc[i] * WGK[7];
        ga[i] = fc[i] * WG[3];
    }
    for j in 0..7 {
        let dx = h * XGK[j];
        let f1 = f(c - dx);
        let f2 = f(c + dx);
        for i in 0..N {
            let s = f1[i] + f2[i];
            kr[i] += WGK[j] * s;
            if j % 2 == 1 {
                ga[i] += WG[j / 2] * s;
            }
        }
    }
    let mut err = [0.0; N];
    for i in 0..N {
        kr[i] *= h;
        ga[i] *= h;
        err[i] = (kr[i] - ga[i]).abs();
    }
    (kr, err)
}

/// Gauss–Legendre nodes and weights on [-1, 1] (Newton iteration on P_n).
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * z * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 0 { 1.0 } else if n == 1 { z } else { p1 };
            let pm = if n == 1 { 1.0 } else { p0 };
            dp = nf * (z * pn - pm) / (z * z - 1.0);
            let dz = pn / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_exact() {
        let r = integrate(&|x: f64| [x.powi(5) + 1.0, (x * 3.0).cos()], 0.0, 2.0, 1e-13, 30);
        assert!((r[0] - (64.0 / 6.0 + 2.0)).abs() < 1e-12);
        assert!((r[1] - (6.0f64).sin() / 3.0).abs() < 1e-13);
    }

    #[test]
    fn legendre_rule() {
        let (x, w) = gauss_legendre(20);
        let s: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(10)).sum();
        assert!((s - 2.0 / 11.0).abs() < 1e-14);
        assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-14);
    }
}
