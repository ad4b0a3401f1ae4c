//! Reference-element quadrature rules.

/// Four-point Gauss-Legendre rule on [0, 1]; exact for polynomials of degree 7.
pub const GAUSS4_POINTS: [f64; 4] = [
    0.069_431_844_202_973_71,
    0.330_009_478_207_571_9,
    0.669_990_521_792_428_1,
    0.930_568_155_797_026_3,
];
pub const GAUSS4_WEIGHTS: [f64; 4] = [
    0.173_927_422_568_726_93,
    0.326_072_577_431_273_07,
    0.326_072_577_431_273_07,
    0.173_927_422_568_726_93,
];

/// Collapsed (Duffy) tensor rule on the unit triangle {x, y ≥ 0, x + y ≤ 1}.
///
/// Points are given in barycentric form `(λ0, λ1, λ2)` with weights that sum
/// to the reference area 1/2. Exact for total degree 6.
pub fn triangle_rule() -> Vec<([f64; 3], f64)> {
    let mut rule = Vec::with_capacity(16);
    for (&u, &wu) in GAUSS4_POINTS.iter().zip(&GAUSS4_WEIGHTS) {
        for (&v, &wv) in GAUSS4_POINTS.iter().zip(&GAUSS4_WEIGHTS) {
            let x = u;
            let y = v * (1.0 - u);
            rule.push(([1.0 - x - y, x, y], wu * wv * (1.0 - u)));
        }
    }
    rule
}

/// Barycentric 1D rule on [0, 1]: `(λ0, λ1)` with weights summing to one.
pub fn segment_rule() -> Vec<([f64; 2], f64)> {
    GAUSS4_POINTS
        .iter()
        .zip(&GAUSS4_WEIGHTS)
        .map(|(&x, &w)| ([1.0 - x, x], w))
        .collect()
}
