//! Independent oracles for the integration tests: everything here is
//! computed from first principles, without touching the library's own
//! decompositions or log-space arithmetic.

/// Enumerates every self-map of `{0, …, n-1}` as a map vector.
pub fn all_maps(n: usize) -> Vec<Vec<usize>> {
    let total = n.pow(n as u32);
    let mut out = Vec::with_capacity(total);
    for code in 0..total {
        let mut map = Vec::with_capacity(n);
        let mut rest = code;
        for _ in 0..n {
            map.push(rest % n);
            rest /= n;
        }
        out.push(map);
    }
    out
}

/// Finds the periodic orbits of a map by literal iteration: a point is
/// periodic iff some power of the map returns to it within n steps.
/// Orbits are listed in order of their smallest element, each starting at
/// that element.
pub fn brute_force_cycles(map: &[usize]) -> Vec<Vec<usize>> {
    let n = map.len();
    let mut cycles: Vec<Vec<usize>> = Vec::new();
    let mut on_cycle = vec![false; n];
    for start in 0..n {
        if on_cycle[start] {
            continue;
        }
        let mut x = start;
        let mut periodic = false;
        for _ in 0..=n {
            x = map[x];
            if x == start {
                periodic = true;
                break;
            }
        }
        if !periodic {
            continue;
        }
        let mut orbit = vec![start];
        let mut y = map[start];
        while y != start {
            orbit.push(y);
            y = map[y];
        }
        for &p in &orbit {
            on_cycle[p] = true;
        }
        cycles.push(orbit);
    }
    cycles
}

/// Exact spectral radius of the 2x2 matrix of the operator
/// `f ↦ e^{φ(·)} f(α(·))` in the point basis, via the quadratic formula.
/// Rows have a single positive entry, so both eigenvalues are real.
pub fn two_point_spectral_radius(map: &[usize], phi: &[f64]) -> f64 {
    assert_eq!(map.len(), 2);
    let mut m = [[0.0f64; 2]; 2];
    m[0][map[0]] = phi[0].exp();
    m[1][map[1]] = phi[1].exp();
    let tr = m[0][0] + m[1][1];
    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    let disc = (tr * tr / 4.0 - det).max(0.0);
    let lam_plus = tr / 2.0 + disc.sqrt();
    let lam_minus = tr / 2.0 - disc.sqrt();
    lam_plus.abs().max(lam_minus.abs())
}

/// `‖A^k‖` on L¹ from the definition: the norm is attained on a point
/// mass, giving `max_j (1/m(j)) Σ_{α^k(x)=j} e^{S_k φ(x)} m(x)`. All
/// arithmetic stays in exponential space so the only code shared with the
/// library is the standard library itself.
pub fn brute_force_operator_norm(map: &[usize], mass: &[f64], phi: &[f64], k: usize) -> f64 {
    let n = map.len();
    let mut column = vec![0.0f64; n];
    for x in 0..n {
        let mut s = 0.0;
        let mut y = x;
        for _ in 0..k {
            s += phi[y];
            y = map[y];
        }
        column[y] += s.exp() * mass[x];
    }
    column
        .iter()
        .zip(mass)
        .map(|(&c, &m)| c / m)
        .fold(f64::NEG_INFINITY, f64::max)
}
