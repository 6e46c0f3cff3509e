//! Independent reference computations shared by integration and acceptance tests.
#![allow(dead_code)]

use fridge_core::nalgebra::{Matrix3, SMatrix, SVector, Vector3};
use fridge_core::{DotParams, Operator, QpcParams, Solution, C64};

pub fn fermi(x: f64) -> f64 {
    1.0 / (x.exp() + 1.0)
}

/// `∫ f(E−μ1)(1 − f(E−μ2)) dE = u / (1 − e^{−u/T})`, `u = μ1 − μ2`.
pub fn transfer(u: f64, t: f64) -> f64 {
    if u.abs() < 1e-12 * t {
        t
    } else {
        u / (-(-u / t).exp_m1())
    }
}

/// Forward and backward transfer integrals for frequency `omega`.
pub fn transfer_pair(q: &QpcParams, omega: f64) -> (f64, f64) {
    (
        transfer(q.mu_m - omega, q.t_m),
        transfer(-q.mu_m - omega, q.t_m),
    )
}

/// Classical rate equation on `|00⟩, |+⟩, |−⟩` with measurement rates `0, +Ω, −Ω`.
pub struct RateModel {
    pub populations: [f64; 3],
    pub j_l: f64,
    pub j_r: f64,
    pub e_dot_m: f64,
}

pub fn rate_model(
    p: &DotParams,
    mu: f64,
    t_l: f64,
    t_r: f64,
    gamma: f64,
    rates: [f64; 3],
) -> RateModel {
    let th = ((p.delta() * p.delta() + p.g() * p.g()).sqrt() - p.delta()).atan2(p.g());
    let (c, s) = (th.cos(), th.sin());
    let om = (p.delta() * p.delta() + p.g() * p.g()).sqrt();
    let e = [0.0, p.epsilon() + 0.5 * om, p.epsilon() - 0.5 * om];
    let weights = [[c * c, s * s], [s * s, c * c]];
    let temps = [t_l, t_r];
    let mut gen = Matrix3::<f64>::zeros();
    let mut add = |to: usize, from: usize, r: f64| {
        gen[(to, from)] += r;
        gen[(from, from)] -= r;
    };
    for lead in 0..2 {
        for (k, level) in [1usize, 2].iter().enumerate() {
            let f = fermi((e[*level] - mu) / temps[lead]);
            add(*level, 0, gamma * weights[lead][k] * f);
            add(0, *level, gamma * weights[lead][k] * (1.0 - f));
        }
    }
    let cs2 = c * c * s * s;
    add(1, 2, rates[1] * cs2);
    add(2, 1, rates[2] * cs2);
    let mut m = gen;
    for j in 0..3 {
        m[(0, j)] = 1.0;
    }
    let x = m.lu().solve(&Vector3::new(1.0, 0.0, 0.0)).unwrap();
    let pops = [x[0], x[1], x[2]];
    let mut flows = [0.0; 2];
    for lead in 0..2 {
        for (k, level) in [1usize, 2].iter().enumerate() {
            let f = fermi((e[*level] - mu) / temps[lead]);
            let net_in = gamma * weights[lead][k] * (f * pops[0] - (1.0 - f) * pops[*level]);
            flows[lead] += (e[*level] - mu) * net_in;
        }
    }
    let e_dot_m = om * cs2 * (rates[1] * pops[2] - rates[2] * pops[1]);
    RateModel {
        populations: pops,
        j_l: flows[0],
        j_r: flows[1],
        e_dot_m,
    }
}

type Sup10 = SMatrix<C64, 10, 10>;

fn jump(k: &Operator) -> SMatrix<C64, 9, 9> {
    let kd = k.adjoint();
    let mut m = SMatrix::<C64, 9, 9>::zeros();
    for j in 0..3 {
        for i in 0..3 {
            for l in 0..3 {
                for n in 0..3 {
                    m[(i + 3 * j, n + 3 * l)] = k[(i, n)] * kd[(l, j)];
                }
            }
        }
    }
    m
}

fn trace(v: &SVector<C64, 9>) -> f64 {
    (v[0] + v[4] + v[8]).re
}

/// Two-sided zero-frequency noise `A + 2∫₀^∞ [⟨I(τ)I(0)⟩ − I²] dτ`, from the
/// detector's jump operators and a matrix exponential of the generator.
pub fn noise_by_propagation(sol: &Solution, p: &DotParams, q: &QpcParams) -> (f64, f64, f64) {
    let th = p.theta();
    let (c, s) = (th.cos(), th.sin());
    let tm = (q.t0.sqrt() - q.t1.sqrt()).powi(2);
    let om = p.omega();
    // Amplitudes in the eigenbasis, ordered 0, +Ω, −Ω.
    let mut k0 = Operator::identity() * C64::from(q.t0.sqrt());
    k0[(1, 1)] -= C64::from(tm.sqrt() * s * s);
    k0[(2, 2)] -= C64::from(tm.sqrt() * c * c);
    let mut kp = Operator::zeros();
    kp[(1, 2)] = C64::from(tm.sqrt() * c * s);
    let km = kp.adjoint();
    let mut cur = SMatrix::<C64, 9, 9>::zeros();
    let mut act = SMatrix::<C64, 9, 9>::zeros();
    for (k, w) in [(k0, 0.0), (kp, om), (km, -om)] {
        let (fwd, bwd) = transfer_pair(q, w);
        cur += jump(&k) * C64::from(fwd - bwd);
        act += jump(&k) * C64::from(fwd + bwd);
    }
    let rho = SVector::<C64, 9>::from_column_slice(sol.rho.matrix().as_slice());
    let i_ss = trace(&(cur * rho));
    let a_ss = trace(&(act * rho));
    let z = cur * rho - rho * C64::from(i_ss);
    // Remove the roundoff-level stationary component so the integral cannot drift.
    let z = z - rho * C64::from(trace(&z) / trace(&rho));
    let l = *sol.liouvillian.matrix();

    let integral = |t: f64| {
        let mut aug = Sup10::zeros();
        aug.fixed_view_mut::<9, 9>(0, 0)
            .copy_from(&(l * C64::from(t)));
        aug.fixed_view_mut::<9, 1>(0, 9)
            .copy_from(&(z * C64::from(t)));
        let e = aug.exp();
        let col: SVector<C64, 9> = e.fixed_view::<9, 1>(0, 9).into_owned();
        // The exact integral is traceless; drop any stationary leakage.
        let col = col - rho * C64::from(trace(&col) / trace(&rho));
        trace(&(cur * col))
    };
    let mut t = 100.0
        / sol
            .liouvillian
            .matrix()
            .iter()
            .map(|x| x.norm())
            .fold(0.0, f64::max);
    let mut prev = integral(t);
    loop {
        t *= 2.0;
        let next = integral(t);
        if (next - prev).abs() <= 1e-11 * next.abs().max(1e-300) || t > 1e12 {
            prev = next;
            break;
        }
        prev = next;
    }
    (a_ss + 2.0 * prev, i_ss, a_ss)
}
