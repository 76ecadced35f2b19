//! Normal-incidence reflectivity of a lossless dielectric stack by the
//! characteristic-matrix method.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::config::CoatingStack;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StackResponse {
    pub power_reflectivity: f64,
    pub power_transmissivity: f64,
}

/// 2×2 complex characteristic matrix of one homogeneous layer.
#[derive(Debug, Clone, Copy, PartialEq)]
struct CharMatrix([[Complex64; 2]; 2]);

impl CharMatrix {
    fn identity() -> Self {
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        CharMatrix([[one, zero], [zero, one]])
    }

    /// Layer of index `n` and phase thickness `delta` = 2π n d / λ.
    fn layer(n: f64, delta: f64) -> Self {
        let (s, c) = delta.sin_cos();
        CharMatrix([
            [Complex64::new(c, 0.0), Complex64::new(0.0, s / n)],
            [Complex64::new(0.0, n * s), Complex64::new(c, 0.0)],
        ])
    }

    fn mul(&self, rhs: &CharMatrix) -> CharMatrix {
        let a = &self.0;
        let b = &rhs.0;
        CharMatrix([
            [
                a[0][0] * b[0][0] + a[0][1] * b[1][0],
                a[0][0] * b[0][1] + a[0][1] * b[1][1],
            ],
            [
                a[1][0] * b[0][0] + a[1][1] * b[1][0],
                a[1][0] * b[0][1] + a[1][1] * b[1][1],
            ],
        ])
    }
}

/// Reflectivity of `(index, thickness)` layers ordered from the ambient
/// medium towards a substrate of index `substrate_index`.
pub fn layers_reflectivity(
    layers: &[(f64, f64)],
    substrate_index: f64,
    wavelength: f64,
    ambient_index: f64,
) -> StackResponse {
    let m = layers.iter().fold(CharMatrix::identity(), |acc, &(n, d)| {
        acc.mul(&CharMatrix::layer(n, 2.0 * PI * n * d / wavelength))
    });
    let ys = Complex64::new(substrate_index, 0.0);
    let b = m.0[0][0] + m.0[0][1] * ys;
    let c = m.0[1][0] + m.0[1][1] * ys;
    let r = (b * ambient_index - c) / (b * ambient_index + c);
    let refl = r.norm_sqr().clamp(0.0, 1.0);
    StackResponse {
        power_reflectivity: refl,
        power_transmissivity: 1.0 - refl,
    }
}

/// Same quantity as [`layers_reflectivity`] by Rouard's method: the
/// amplitude reflection coefficient is built up interface by interface from
/// the substrate outwards, r ← (ρ + r·e^{-2iδ})/(1 + ρ·r·e^{-2iδ}).
pub fn rouard_reflectivity(
    layers: &[(f64, f64)],
    substrate_index: f64,
    wavelength: f64,
    ambient_index: f64,
) -> f64 {
    let combine = |upper: f64, lower: f64, r: Complex64| {
        let rho = Complex64::new((upper - lower) / (upper + lower), 0.0);
        (rho + r) / (1.0 + rho * r)
    };
    let mut below = substrate_index;
    let mut r = Complex64::new(0.0, 0.0);
    for &(n, d) in layers.iter().rev() {
        r = combine(n, below, r) * Complex64::from_polar(1.0, -4.0 * PI * n * d / wavelength);
        below = n;
    }
    combine(ambient_index, below, r).norm_sqr()
}

/// Power reflectivity and transmissivity of a coating stack seen from a
/// medium of index `ambient_index`. Layers with an undefined material are
/// skipped.
pub fn stack_reflectivity(
    stack: &CoatingStack,
    wavelength: f64,
    ambient_index: f64,
) -> StackResponse {
    let layers: Vec<(f64, f64)> = stack
        .layers
        .iter()
        .filter_map(|l| stack.layer_props(l).map(|p| (p.refractive_index, l.thickness)))
        .collect();
    layers_reflectivity(
        &layers,
        stack.substrate.refractive_index,
        wavelength,
        ambient_index,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::SystemConfig;
    use approx::assert_relative_eq;

    #[test]
    fn bare_substrate_is_fresnel() {
        let r = layers_reflectivity(&[], 1.45, 1.064e-6, 1.0);
        assert_relative_eq!(r.power_reflectivity, (0.45f64 / 2.45).powi(2), max_relative = 1e-14);
        assert_relative_eq!(r.power_reflectivity, 0.033736, max_relative = 1e-4);
    }

    #[test]
    fn single_quarter_wave_layer() {
        let lambda = 1.064e-6;
        let n1 = 2.07;
        let r = layers_reflectivity(&[(n1, lambda / (4.0 * n1))], 1.45, lambda, 1.0);
        let expected = ((1.45 - n1 * n1) / (1.45 + n1 * n1)).powi(2);
        assert_relative_eq!(r.power_reflectivity, expected, max_relative = 1e-12);
        assert_relative_eq!(r.power_reflectivity, 0.2444, max_relative = 1e-3);
    }

    #[test]
    fn half_wave_layer_is_absentee() {
        let lambda = 1.0e-6;
        let bare = layers_reflectivity(&[], 1.45, lambda, 1.0);
        let r = layers_reflectivity(&[(2.07, lambda / (2.0 * 2.07))], 1.45, lambda, 1.0);
        assert_relative_eq!(r.power_reflectivity, bare.power_reflectivity, max_relative = 1e-12);
    }

    #[test]
    fn rouard_recursion_agrees() {
        let cfg = SystemConfig::table1();
        let stack = &cfg.mirror.coating;
        let layers: Vec<(f64, f64)> = stack
            .layers
            .iter()
            .map(|l| (stack.layer_props(l).unwrap().refractive_index, l.thickness))
            .collect();
        for lambda in [0.8e-6, 1.064e-6, 1.55e-6] {
            let a = layers_reflectivity(&layers, 1.45, lambda, 1.0).power_reflectivity;
            let b = rouard_reflectivity(&layers, 1.45, lambda, 1.0);
            assert!((a - b).abs() < 1e-12, "{a} vs {b}");
        }
        assert_relative_eq!(
            rouard_reflectivity(&[], 1.45, 1e-6, 1.0),
            (0.45f64 / 2.45).powi(2),
            max_relative = 1e-14
        );
    }

    #[test]
    fn table1_stack_is_highly_reflective() {
        let cfg = SystemConfig::table1();
        let r = stack_reflectivity(&cfg.mirror.coating, 1.064e-6, 1.0);
        assert!(r.power_reflectivity > 0.9 && r.power_reflectivity < 1.0);
        assert_relative_eq!(
            r.power_reflectivity + r.power_transmissivity,
            1.0,
            max_relative = 1e-15
        );
    }
}
