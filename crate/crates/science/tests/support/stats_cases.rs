use cynote_science::stats::special::chi_square_tail;
use cynote_science::stats::{
    chi_square_2x2, chi_square_gof, chi_square_rxc, cohens_kappa, descriptive, gk_gamma,
    kendall_tau_a, kendall_tau_c, linear_regression_pearson, mcnemar, odds_ratio, phi_coefficient,
    proportion_difference, relative_risk, z_correlated_proportions, PairCounts, Sample, Table2x2,
    TableRxC,
};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use super::pairs::brute_force_pairs;

pub fn t2(a: u64, b: u64, c: u64, d: u64) -> Table2x2 {
    Table2x2::new(a, b, c, d).unwrap()
}

pub fn rxc(g: &[&[u64]]) -> TableRxC {
    TableRxC::new(g.iter().map(|r| r.to_vec()).collect()).unwrap()
}

/// Every hand-derived value in one table: (label, computed, expected).
pub fn hand_values() -> Vec<(&'static str, f64, f64)> {
    let third = 1.0 / 3.0;
    let d = descriptive(&Sample::new(vec![1.0, 2.0, 3.0, 4.0, 5.0]).unwrap()).unwrap();
    let reg = linear_regression_pearson(&[0.0, 1.0, 2.0, 3.0], &[1.0, 3.0, 2.0, 5.0]).unwrap();
    let line = linear_regression_pearson(&[1.0, 2.0, 3.0], &[2.0, 4.0, 6.0]).unwrap();
    let rc = chi_square_rxc(&rxc(&[&[20, 30, 50], &[30, 20, 50]])).unwrap();
    vec![
        ("mean", d.mean, 3.0),
        ("median", d.median, 3.0),
        ("variance", d.variance, 2.5),
        ("slope", reg.slope, 1.1),
        ("intercept", reg.intercept, 1.1),
        ("r", reg.r, 5.5 / (5.0f64 * 8.75).sqrt()),
        ("regression p", reg.p_value, 0.1684781593797),
        ("perfect slope", line.slope, 2.0),
        ("perfect r", line.r, 1.0),
        ("perfect p", line.p_value, 0.0),
        ("phi diag", phi_coefficient(&t2(10, 0, 0, 10)).unwrap(), 1.0),
        ("phi flat", phi_coefficient(&t2(5, 5, 5, 5)).unwrap(), 0.0),
        ("phi", phi_coefficient(&t2(30, 10, 10, 50)).unwrap(), 1400.0 / 2400.0),
        ("kappa diag", cohens_kappa(&t2(10, 0, 0, 10)).unwrap(), 1.0),
        ("kappa flat", cohens_kappa(&t2(5, 5, 5, 5)).unwrap(), 0.0),
        ("kappa", cohens_kappa(&t2(20, 5, 10, 15)).unwrap(), 0.4),
        ("p1-p2 flat", proportion_difference(&t2(10, 10, 10, 10)).unwrap(), 0.0),
        ("p1-p2", proportion_difference(&t2(30, 70, 10, 90)).unwrap(), 0.2),
        ("rr flat", relative_risk(&t2(10, 10, 10, 10)).unwrap(), 1.0),
        ("rr", relative_risk(&t2(30, 70, 10, 90)).unwrap(), 3.0),
        ("or flat", odds_ratio(&t2(10, 10, 10, 10)).unwrap(), 1.0),
        ("or", odds_ratio(&t2(20, 10, 5, 40)).unwrap(), 16.0),
        ("z equal", z_correlated_proportions(&t2(1, 6, 6, 1)).unwrap().statistic, 0.0),
        ("z equal p", z_correlated_proportions(&t2(1, 6, 6, 1)).unwrap().p_value.unwrap(), 1.0),
        ("z", z_correlated_proportions(&t2(0, 10, 2, 0)).unwrap().statistic, 8.0 / 12f64.sqrt()),
        ("chi2 flat", chi_square_2x2(&t2(5, 5, 5, 5), false).unwrap().statistic, 0.0),
        ("chi2", chi_square_2x2(&t2(10, 20, 20, 10), false).unwrap().statistic, 20.0 / 3.0),
        ("chi2 yates", chi_square_2x2(&t2(10, 20, 20, 10), true).unwrap().statistic, 5.4),
        ("mcnemar equal", mcnemar(&t2(3, 4, 4, 3), false).unwrap().statistic, 0.0),
        ("mcnemar", mcnemar(&t2(0, 10, 2, 0), false).unwrap().statistic, 64.0 / 12.0),
        ("mcnemar yates", mcnemar(&t2(0, 10, 2, 0), true).unwrap().statistic, 49.0 / 12.0),
        ("gamma diag", gk_gamma(&rxc(&[&[10, 0], &[0, 10]])).unwrap(), 1.0),
        ("gamma", gk_gamma(&rxc(&[&[20, 10], &[5, 40]])).unwrap(), 750.0 / 850.0),
        ("gamma independent", gk_gamma(&rxc(&[&[1, 2, 3], &[2, 4, 6]])).unwrap(), 0.0),
        ("tau_a diag", kendall_tau_a(&rxc(&[&[10, 0], &[0, 10]])).unwrap(), 100.0 / 190.0),
        ("tau_c diag", kendall_tau_c(&rxc(&[&[10, 0], &[0, 10]])).unwrap(), 1.0),
        ("tau_a flat", kendall_tau_a(&rxc(&[&[5, 5], &[5, 5]])).unwrap(), 0.0),
        ("tau_c flat", kendall_tau_c(&rxc(&[&[5, 5], &[5, 5]])).unwrap(), 0.0),
        ("rxc uniform", chi_square_rxc(&rxc(&[&[10, 10, 10], &[10, 10, 10]])).unwrap().statistic, 0.0),
        ("rxc", rc.statistic, 4.0),
        ("rxc df", f64::from(rc.df.unwrap()), 2.0),
        ("rxc p", rc.p_value.unwrap(), (-2f64).exp()),
        ("gof", chi_square_gof(&[50.0, 30.0, 20.0], &[third, third, third]).unwrap().statistic, 14.0),
        ("gof exact", chi_square_gof(&[20.0, 30.0], &[0.4, 0.6]).unwrap().statistic, 0.0),
        ("chi tail df2", chi_square_tail(2.0, 2), (-1f64).exp()),
    ]
}

/// 100 seeded random tables with n ≤ 200; returns the number that agree.
pub fn brute_force_agreement(seed: u64) -> usize {
    let mut rng = StdRng::seed_from_u64(seed);
    let mut agree = 0;
    for _ in 0..100 {
        let rows = rng.gen_range(2..=5);
        let cols = rng.gen_range(2..=5);
        let n: u64 = rng.gen_range(2..=200);
        let mut grid = vec![vec![0u64; cols]; rows];
        for _ in 0..n {
            grid[rng.gen_range(0..rows)][rng.gen_range(0..cols)] += 1;
        }
        let (c, d) = brute_force_pairs(&grid);
        let t = TableRxC::new(grid).unwrap();
        let p = PairCounts::of(&t);
        let nf = n as f64;
        let m = rows.min(cols) as f64;
        let diff = c as f64 - d as f64;
        let gamma_ok = match gk_gamma(&t) {
            Ok(g) => c + d > 0 && g == diff / (c + d) as f64,
            Err(_) => c + d == 0,
        };
        let tau_a_ok = kendall_tau_a(&t).unwrap() == diff / (nf * (nf - 1.0) / 2.0);
        let tau_c_ok = kendall_tau_c(&t).unwrap() == 2.0 * m * diff / (nf * nf * (m - 1.0));
        if p.concordant == c && p.discordant == d && gamma_ok && tau_a_ok && tau_c_ok {
            agree += 1;
        }
    }
    agree
}

