//! Parameters of the flow sparsifier construction.

use crate::error::{Error, Result};
use crate::flow::RoutingOptions;

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
pub enum Profile {
    Theoretical,
    Aggressive,
}

impl std::str::FromStr for Profile {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "theoretical" => Ok(Profile::Theoretical),
            "aggressive" => Ok(Profile::Aggressive),
            _ => Err(Error::Input(format!("unknown profile '{s}'"))),
        }
    }
}

#[derive(Clone, Debug)]
pub struct FlowParams {
    pub profile: Profile,
    /// Congestion bound of a good router.
    pub eta_star: i64,
    pub c_beta: f64,
    pub r: u64,
    /// Recursion factor of the aggressive F.
    pub c_f: f64,
    /// Contractible sets need |S| > contract_factor * F(|out(S)|).
    pub contract_factor: f64,
    /// Balanced-cut lemma premise |S| > lemma_factor * F(k/2).
    pub lemma_factor: f64,
    /// Phase-two claim |S'_j| > phase2_factor * F(k/2).
    pub phase2_factor: f64,
    /// Test V \ T for being a good router before the contraction loop.
    pub precheck: bool,
    pub budget_exp: u32,
    pub routing: RoutingOptions,
}

/// beta_FCG(k) = max(1, c log2 k).
pub fn beta_fcg(k: f64, c_beta: f64) -> f64 {
    (c_beta * k.max(1.0).log2()).max(1.0)
}

/// alpha_W(z) with the exact sparsest-cut solver.
pub fn alpha_w(z: f64) -> f64 {
    1.0 / (128.0 * z.max(1.0).log2().max(1.0))
}

/// Smallest integer r >= 2 with r > 24 beta(k*) / alpha_W(k*), k* = 2 k r log2 r.
pub fn theoretical_r(k: usize, c_beta: f64) -> u64 {
    let rhs = |r: f64| {
        let ks = 2.0 * k.max(1) as f64 * r * r.log2();
        24.0 * beta_fcg(ks, c_beta) / alpha_w(ks)
    };
    let mut r = 2.0f64;
    for _ in 0..200 {
        let v = rhs(r);
        if r > v {
            break;
        }
        r = v.floor() + 1.0;
    }
    // walk down to the smallest fixpoint
    while r > 2.0 && (r - 1.0) > rhs(r - 1.0) {
        r -= 1.0;
    }
    r as u64
}

impl FlowParams {
    pub fn theoretical(k: usize) -> Self {
        let c_beta = 1.0;
        FlowParams {
            profile: Profile::Theoretical,
            eta_star: 34,
            c_beta,
            r: theoretical_r(k, c_beta),
            c_f: 0.0,
            contract_factor: 128.0,
            lemma_factor: 512.0,
            phase2_factor: 128.0,
            precheck: true,
            budget_exp: 22,
            routing: RoutingOptions::default(),
        }
    }

    pub fn aggressive() -> Self {
        FlowParams {
            profile: Profile::Aggressive,
            eta_star: 34,
            c_beta: 1.0,
            r: 3,
            c_f: 4.0,
            contract_factor: 2.0,
            lemma_factor: 4.0,
            phase2_factor: 2.0,
            precheck: false,
            budget_exp: 22,
            routing: RoutingOptions::default(),
        }
    }

    pub fn for_profile(p: Profile, k: usize) -> Self {
        match p {
            Profile::Theoretical => Self::theoretical(k),
            Profile::Aggressive => Self::aggressive(),
        }
    }

    /// F(k'): 1 up to 4, then the profile's recursion.
    pub fn f(&self, k: usize) -> f64 {
        if k <= 4 {
            return 1.0;
        }
        match self.profile {
            Profile::Theoretical => {
                let p = k.next_power_of_two();
                let r = self.r as f64;
                let base = 65536.0 * r * r * r * r.log2();
                base.powi(p.trailing_zeros() as i32 - 2)
            }
            Profile::Aggressive => self.c_f * self.f(k.div_ceil(2)),
        }
    }

    /// Largest k* used by the witness bounds.
    pub fn k_star(&self, k: usize) -> f64 {
        let r = self.r as f64;
        2.0 * k as f64 * r * r.log2().max(1.0)
    }
}
