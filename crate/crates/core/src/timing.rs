//! Transfer and computation durations, and as-early-as-possible timing.
//!
//! Every place that needs a duration goes through [`transfer_time`] and
//! [`compute_time`] so that schedules timed here are checked by the validator
//! with exactly the same floating-point expressions.

use crate::model::{grid, Grid, InstallmentCounts, Platform, Schedule, Workload};

/// Data volume (in unit loads) crossing link `l` for round `(n, j)`.
pub fn downstream(fractions: &Grid, l: usize, n: usize, j: usize) -> f64 {
    fractions[l + 1..].iter().map(|f| f[n][j]).sum()
}

/// `z_l * V_comm(n) * sum_{k > l} gamma_k^j(n)`.
pub fn transfer_time(
    p: &Platform,
    wl: &Workload,
    fractions: &Grid,
    l: usize,
    n: usize,
    j: usize,
) -> f64 {
    p.z()[l] * wl.get(n).vcomm * downstream(fractions, l, n, j)
}

/// `w_i * gamma_i^j(n) * V_comp(n)`.
pub fn compute_time(
    p: &Platform,
    wl: &Workload,
    fractions: &Grid,
    i: usize,
    n: usize,
    j: usize,
) -> f64 {
    p.w()[i] * fractions[i][n][j] * wl.get(n).vcomp
}

/// Times every communication and computation at the maximum of its lower
/// bounds, given fixed fractions and sending order.
///
/// With `strict_forward`, processor `P_i` (2 <= i <= m-1) also waits until it
/// has finished forwarding the round downstream before computing.
pub fn earliest_schedule(
    p: &Platform,
    wl: &Workload,
    q: &InstallmentCounts,
    fractions: Grid,
    strict_forward: bool,
) -> Schedule {
    let m = p.m();
    let links = p.links();
    let mut comm_start = grid(links, q);
    let mut comm_end = grid(links, q);
    let mut comp_start = grid(m, q);
    let mut comp_end = grid(m, q);

    for (n, j) in q.rounds() {
        let prev = q.previous(n, j);
        for l in 0..links {
            let mut s: f64 = 0.0;
            if l > 0 {
                s = s.max(comm_end[l - 1][n][j]);
            }
            if let Some((pn, pj)) = prev {
                s = s.max(comm_end[l][pn][pj]);
                if l + 1 < links {
                    s = s.max(comm_end[l + 1][pn][pj]);
                }
            }
            comm_start[l][n][j] = s;
            comm_end[l][n][j] = s + transfer_time(p, wl, &fractions, l, n, j);
        }
        for i in 0..m {
            let mut c = match prev {
                Some((pn, pj)) => comp_end[i][pn][pj],
                None => p.tau()[i],
            };
            if i > 0 {
                c = c.max(comm_end[i - 1][n][j]);
                if strict_forward && i < links {
                    c = c.max(comm_end[i][n][j]);
                }
            }
            comp_start[i][n][j] = c;
            comp_end[i][n][j] = c + compute_time(p, wl, &fractions, i, n, j);
        }
    }

    let mut s = Schedule {
        q: q.clone(),
        fractions,
        comm_start,
        comm_end,
        comp_start,
        comp_end,
        makespan: 0.0,
    };
    s.makespan = crate::model::makespan_of(&s);
    s
}

/// Clamps negative fractions to zero and rescales every load to sum to one.
pub fn normalize_fractions(fractions: &mut Grid) {
    if fractions.is_empty() {
        return;
    }
    let loads = fractions[0].len();
    for n in 0..loads {
        let mut total = 0.0;
        for per_proc in fractions.iter_mut() {
            for g in per_proc[n].iter_mut() {
                if *g < 0.0 {
                    *g = 0.0;
                }
                total += *g;
            }
        }
        if total > 0.0 {
            for per_proc in fractions.iter_mut() {
                for g in per_proc[n].iter_mut() {
                    *g /= total;
                }
            }
        }
    }
}
