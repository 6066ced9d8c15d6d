use tsrm_core::marginals::Marginals;
use tsrm_core::pde::{phi_eigen, solve_phi, PdeGrid};
use tsrm_core::spectrum::spectrum;

const POINTS: [(f64, f64); 7] = [(0.5, 0.0), (0.5, 0.5), (1.0, 1.0), (2.0, 0.5), (1.0, 0.0), (0.2, 0.2), (3.0, 2.0)];

#[test]
fn eigen_expansion_reduces_to_w_on_the_boundary() {
    let s = spectrum(400).unwrap();
    let m = Marginals::new(50).unwrap();
    for &x in &[0.2, 0.5, 1.0, 2.5] {
        let a = phi_eigen(&s, x, 0.0).unwrap();
        let b = m.w_of_x(x).unwrap();
        assert!((a - b).abs() < 1e-10, "x = {x}: {a} vs {b}");
    }
    // Too short a spectrum for small x is reported, not silently truncated.
    assert!(phi_eigen(&spectrum(10).unwrap(), 0.01, 0.0).is_err());
}

#[test]
fn crank_nicolson_is_second_order() {
    let s = spectrum(400).unwrap();
    let exact: Vec<f64> = POINTS.iter().map(|&(x, h)| phi_eigen(&s, x, h).unwrap()).collect();
    let mut errors = Vec::new();
    for (dx, dh) in [(0.008, 0.04), (0.004, 0.02), (0.002, 0.01)] {
        let f = solve_phi(PdeGrid {
            x_max: 4.0,
            h_max: 8.0,
            dx,
            dh,
        })
        .unwrap();
        let e = POINTS
            .iter()
            .zip(&exact)
            .map(|(&(x, h), v)| (f.phi(x, h).unwrap() - v).abs())
            .fold(0.0_f64, f64::max);
        errors.push(e);
    }
    for w in errors.windows(2) {
        let ratio = w[0] / w[1];
        assert!((3.3..5.0).contains(&ratio), "ratio {ratio}, errors {errors:?}");
    }
    assert!(errors[2] < 1e-4, "{errors:?}");
}
