mod common;

use cmvlab::cocycle::SpectralPoint;
use cmvlab::qwalk::*;
use cmvlab::{CoinField, Frequency, Phase};
use common::*;

fn quasi_periodic() -> CoinField {
    CoinField::quasi_periodic_rotation(0.6, 0.3, 0.2)
}

#[test]
fn equivalence_on_all_coin_families() {
    let w = Frequency::default_2d();
    let x = Phase::new(vec![0.3, 0.8]).unwrap();
    for coins in [CoinField::identity(2), CoinField::hadamard(2), quasi_periodic(), CoinField::strong_coupling()] {
        let r = unitary_equiv_check(&coins, &x, &w, -128, 127).unwrap();
        assert!(r.residual < 1e-10, "{r:?}");
        assert!(r.lambda_defect < 1e-12);
        assert!(r.formula_gap < 1e-12);
    }
}

#[test]
fn reflective_walk_is_unitary() {
    let w = Frequency::default_2d();
    let x = Phase::new(vec![0.3, 0.8]).unwrap();
    let walk = build_walk(&quasi_periodic(), &x, &w, -128, 127, Closure::Reflective).unwrap();
    assert!(walk.matrix().to_dense().unitarity_defect() < 1e-12);
}

#[test]
fn window_off_the_anchor() {
    let w = Frequency::default_2d();
    let x = Phase::new(vec![0.3, 0.8]).unwrap();
    for (s0, s1) in [(20, 60), (-70, -30)] {
        let r = unitary_equiv_check(&quasi_periodic(), &x, &w, s0, s1).unwrap();
        assert!(r.residual < 1e-10, "{r:?}");
    }
}

#[test]
fn free_walk_is_ballistic() {
    let w = Frequency::default_2d();
    let x = Phase::origin(2);
    let walk = build_walk(&CoinField::identity(2), &x, &w, -20, 20, Closure::Reflective).unwrap();
    let psi = WalkState::localized(-20, 20, 0, c(1.0, 0.0), c(0.0, 0.0)).unwrap();
    let (rows, _) = evolve(&walk, &psi, 10).unwrap();
    for r in &rows {
        assert!((r.mean - r.t as f64).abs() < 1e-12);
    }
}

#[test]
fn strong_walk_localizes() {
    let w = Frequency::default_2d();
    let x = Phase::new(vec![0.3, 0.8]).unwrap();
    let walk = build_walk(&CoinField::strong_coupling(), &x, &w, -1024, 1023, Closure::Reflective).unwrap();
    let psi = WalkState::localized(-1024, 1023, 0, c(1.0, 0.0), c(0.0, 0.0)).unwrap();
    let (rows, _) = evolve(&walk, &psi, 1000).unwrap();
    let s: Vec<f64> = rows.iter().step_by(100).map(|r| r.sigma).collect();
    eprintln!("sigma {s:?} norm {}", rows.last().unwrap().norm);
    assert!(!rows.last().unwrap().escaped);
}

#[test]
fn lyapunov_agreement() {
    let w = Frequency::default_2d();
    for coins in [quasi_periodic(), CoinField::strong_coupling()] {
        for k in 0..8 {
            let z = SpectralPoint::new(0.4 + k as f64 * 0.75);
            let r = walk_lyapunov_compare(&coins, &w, &z, 200, 100, 3).unwrap();
            eprintln!("{} {} {} {}", z.theta(), r.l_walk, r.l_hat, r.l_walk_stderr);
            assert!(r.consistent());
        }
    }
}
