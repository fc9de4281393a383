//! Level caps `c_j` and the loose-vertex weights `rho_j` and bereft counts
//! `b_j` they generate, all in exact integer arithmetic.

use std::f64::consts::LN_2;
use std::fmt::Write as _;

use serde::Serialize;

use super::{CutoffError, ParamSet};

/// `0` if `x <= sigma`, else `ceil(log2(x - sigma))`.
pub fn i_star(x: u128, sigma: u64) -> u32 {
    let s = sigma as u128;
    if x <= s {
        0
    } else {
        // ceil(log2 y) = bit length of y - 1, for y >= 1
        128 - (x - s - 1).leading_zeros()
    }
}

fn cap_with(coef: f64, p: &ParamSet, j: usize) -> u64 {
    let ln_n = (p.n as f64).ln();
    let boundary = p.alpha * ln_n / ln_n.ln();
    if (j as f64) <= boundary {
        (p.beta * ln_n).ceil() as u64
    } else {
        (coef / LN_2 * ln_n).ceil() as u64
    }
}

/// `c*_j`: `ceil(beta ln n)` for `j <= alpha ln n / ln ln n`, otherwise
/// `ceil((1 + eps/2) / ln 2 * ln n)`.
pub fn base_cap(p: &ParamSet, j: usize) -> u64 {
    cap_with(1.0 + p.eps / 2.0, p, j)
}

fn step(rho: u128, cj: u64, sigma: u64) -> Option<(u128, u128)> {
    let i = i_star(rho, sigma);
    let k = (cj as i128) - i as i128 - sigma as i128;
    if k < 1 {
        return None;
    }
    let k = k as u128;
    let rho_next = sigma as u128 + (1u128 << i) + k * rho;
    Some((rho_next, k))
}

/// `rho_1 = 2`, `b_1 = 1` and
/// `rho_{j+1} = sigma + 2^{i*} + (c_j - i* - sigma) rho_j`,
/// `b_{j+1} = (c_j - i* - sigma) b_j`. Returns `c.len() + 1` terms of each.
pub fn extend_sequences(c: &[u64], sigma: u64) -> Result<(Vec<u128>, Vec<u128>), CutoffError> {
    let mut rho = vec![2u128];
    let mut b = vec![1u128];
    for (j, &cj) in c.iter().enumerate() {
        let (r, k) = step(rho[j], cj, sigma).ok_or(CutoffError::SequenceDegenerate(j + 1))?;
        rho.push(r);
        b.push(k * b[j]);
    }
    Ok((rho, b))
}

/// Raises each `c_j` to at least `i*(rho_j) + sigma + 1`, so the recursion
/// stays well defined. Earlier terms fix `rho_j`, so one forward pass
/// suffices.
pub fn lift_caps(c: &[u64], sigma: u64) -> Vec<u64> {
    let mut out = Vec::with_capacity(c.len());
    let mut rho = 2u128;
    for &cj in c {
        let lifted = cj.max(i_star(rho, sigma) as u64 + sigma + 1);
        rho = step(rho, lifted, sigma).expect("lifted cap is well defined").0;
        out.push(lifted);
    }
    out
}

/// Largest `m` with `rho*_m <= target`, where `rho*` comes from the lifted
/// caps produced by `cap`. `rho*_1 = 2` always counts.
fn depth_for(target_num: u128, target_den: u128, sigma: u64, cap: impl Fn(usize) -> u64) -> usize {
    let mut rho = 2u128;
    let mut j = 1;
    loop {
        let cj = cap(j).max(i_star(rho, sigma) as u64 + sigma + 1);
        let (next, _) = step(rho, cj, sigma).unwrap();
        if next * target_den > target_num {
            return j;
        }
        rho = next;
        j += 1;
    }
}

/// Largest `m` with `rho*_m <= 8n/5`.
pub fn choose_depth(p: &ParamSet) -> usize {
    depth_for(8 * p.n as u128, 5, p.sigma, |j| base_cap(p, j))
}

/// The sequences behind one tree. `c`, `c_star` and `istar` hold the `m - 1`
/// terms that the recursion consumes; `rho` and `b` hold `m` terms.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SequenceTable {
    pub n: u64,
    pub sigma: u64,
    pub m: usize,
    pub c_star: Vec<u64>,
    pub c: Vec<u64>,
    pub rho: Vec<u128>,
    pub b: Vec<u128>,
    pub istar: Vec<u32>,
    /// Single-term increments applied by calibration.
    pub increments: u64,
    /// `rho_m` one increment before the end (calibration only).
    pub pre_final_rho_m: Option<u128>,
}

impl SequenceTable {
    fn assemble(n: u64, sigma: u64, c_star: Vec<u64>, c: Vec<u64>) -> Self {
        let (rho, b) = extend_sequences(&c, sigma).expect("caps are lifted");
        let istar = rho[..c.len()].iter().map(|&r| i_star(r, sigma)).collect();
        Self {
            n,
            sigma,
            m: rho.len(),
            c_star,
            c,
            rho,
            b,
            istar,
            increments: 0,
            pre_final_rho_m: None,
        }
    }

    pub fn rho_m(&self) -> u128 {
        *self.rho.last().unwrap()
    }

    pub fn b_m(&self) -> u128 {
        *self.b.last().unwrap()
    }

    /// Vertex count of the pruned tree, `rho_m - b_m`.
    pub fn pruned_size(&self) -> u128 {
        self.rho_m() - self.b_m()
    }

    /// One CSV row per level: `j,c_star,c,rho,b,istar` (caps blank at `m`).
    pub fn to_csv(&self) -> String {
        let mut s = String::from("j,c_star,c,rho,b,istar\n");
        for j in 0..self.m {
            if j < self.c.len() {
                writeln!(
                    s,
                    "{},{},{},{},{},{}",
                    j + 1,
                    self.c_star[j],
                    self.c[j],
                    self.rho[j],
                    self.b[j],
                    self.istar[j]
                )
                .unwrap();
            } else {
                writeln!(s, "{},,,{},{},", j + 1, self.rho[j], self.b[j]).unwrap();
            }
        }
        s
    }
}

/// Calibrated table with `rho_m >= 8n/5`.
///
/// Starts from the lifted `c*` at depth [`choose_depth`] and adds 1 to one
/// cap at a time, cycling `c_1, c_2, ..., c_{m-1}`, re-lifting after each
/// step, until `rho_m` reaches `8n/5`. The iterate before the last increment
/// is below the target by construction.
pub fn calibrate(p: &ParamSet) -> Result<SequenceTable, CutoffError> {
    let m = choose_depth(p);
    let c_star: Vec<u64> = (1..m).map(|j| base_cap(p, j)).collect();
    let mut c = lift_caps(&c_star, p.sigma);
    let reached = |t: &SequenceTable| 5 * t.rho_m() >= 8 * p.n as u128;
    let mut table = SequenceTable::assemble(p.n, p.sigma, c_star.clone(), c.clone());
    if reached(&table) {
        return Ok(table);
    }
    if c.is_empty() {
        return Err(CutoffError::CalibrationImpossible);
    }
    let limit = (8 * p.n).div_ceil(5);
    let mut increments = 0u64;
    let mut prev;
    loop {
        prev = table.rho_m();
        let j = (increments % c.len() as u64) as usize;
        c[j] += 1;
        increments += 1;
        c = lift_caps(&c, p.sigma);
        if let Some((j, &value)) = c.iter().enumerate().find(|(_, &v)| v > limit) {
            return Err(CutoffError::CalibrationDiverged { j: j + 1, value });
        }
        table = SequenceTable::assemble(p.n, p.sigma, c_star.clone(), c.clone());
        if reached(&table) {
            break;
        }
    }
    table.increments = increments;
    table.pre_final_rho_m = Some(prev);
    Ok(table)
}

/// Uncalibrated table for the multi-root construction: caps use the
/// coefficient `(c - eps/2) / ln 2` and `m` is the largest depth with
/// `rho_m <= n^(c - eps)`.
pub fn multi_root_table(p: &ParamSet, c: f64) -> Result<SequenceTable, CutoffError> {
    let coef = c - p.eps / 2.0;
    if !(coef > 0.0 && c < 1.0) {
        return Err(CutoffError::InvalidParams(format!(
            "need eps/2 < c < 1, got c = {c}, eps = {}",
            p.eps
        )));
    }
    if p.beta >= c / (10.0 * LN_2) {
        return Err(CutoffError::InvalidParams(format!(
            "need beta < c / (10 ln 2) = {:.4}, got {}",
            c / (10.0 * LN_2),
            p.beta
        )));
    }
    let target = (p.n as f64).powf(c - p.eps).floor().max(2.0) as u128;
    let m = depth_for(target, 1, p.sigma, |j| cap_with(coef, p, j));
    let c_star: Vec<u64> = (1..m).map(|j| cap_with(coef, p, j)).collect();
    let lifted = lift_caps(&c_star, p.sigma);
    Ok(SequenceTable::assemble(p.n, p.sigma, c_star, lifted))
}
