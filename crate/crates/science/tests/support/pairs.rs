//! Concordant and discordant pair counts by enumerating every pair of
//! observations.

pub fn brute_force_pairs(grid: &[Vec<u64>]) -> (u128, u128) {
    let mut obs = Vec::new();
    for (i, row) in grid.iter().enumerate() {
        for (j, &n) in row.iter().enumerate() {
            for _ in 0..n {
                obs.push((i as i64, j as i64));
            }
        }
    }
    let (mut concordant, mut discordant) = (0u128, 0u128);
    for p in 0..obs.len() {
        for q in p + 1..obs.len() {
            let s = (obs[p].0 - obs[q].0) * (obs[p].1 - obs[q].1);
            if s > 0 {
                concordant += 1;
            } else if s < 0 {
                discordant += 1;
            }
        }
    }
    (concordant, discordant)
}
