//! Clebsch–Gordan coefficients `⟨j₁m₁; j₂m₂ | JM⟩` (Condon–Shortley phase).
//!
//! All arguments are doubled so half-integers stay integral.

use std::sync::OnceLock;

fn ln_fact(n: i64) -> f64 {
    static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
    let t = TABLE.get_or_init(|| {
        let mut v = vec![0.0; 4096];
        for k in 1..v.len() {
            v[k] = v[k - 1] + (k as f64).ln();
        }
        v
    });
    if (n as usize) < t.len() {
        t[n as usize]
    } else {
        let x = n as f64 + 1.0;
        // Stirling series for ln Γ(x)
        (x - 0.5) * x.ln() - x + 0.5 * (2.0 * std::f64::consts::PI).ln() + 1.0 / (12.0 * x)
            - 1.0 / (360.0 * x.powi(3))
    }
}

fn admissible(tj1: i64, tm1: i64, tj2: i64, tm2: i64, tj: i64, tm: i64) -> bool {
    tm1 + tm2 == tm
        && tm1.abs() <= tj1
        && tm2.abs() <= tj2
        && tm.abs() <= tj
        && (tj1 + tm1) % 2 == 0
        && (tj2 + tm2) % 2 == 0
        && (tj + tm) % 2 == 0
        && tj >= (tj1 - tj2).abs()
        && tj <= tj1 + tj2
        && (tj1 + tj2 + tj) % 2 == 0
}

/// Racah's closed formula.
pub fn clebsch_gordan(tj1: i64, tm1: i64, tj2: i64, tm2: i64, tj: i64, tm: i64) -> f64 {
    if !admissible(tj1, tm1, tj2, tm2, tj, tm) {
        return 0.0;
    }
    if tj2 <= 2 {
        return small(tj1, tm1, tj2, tm2, tj, tm);
    }
    if tj1 <= 2 {
        let phase = if ((tj1 + tj2 - tj) / 2) % 2 == 0 {
            1.0
        } else {
            -1.0
        };
        return phase * small(tj2, tm2, tj1, tm1, tj, tm);
    }
    racah(tj1, tm1, tj2, tm2, tj, tm)
}

fn racah(tj1: i64, tm1: i64, tj2: i64, tm2: i64, tj: i64, tm: i64) -> f64 {
    let h = |x: i64| x / 2;
    let (a, b, c) = (h(tj1 + tj2 - tj), h(tj1 - tj2 + tj), h(-tj1 + tj2 + tj));
    let pre = 0.5
        * ((tj as f64 + 1.0).ln() + ln_fact(a) + ln_fact(b) + ln_fact(c)
            - ln_fact(h(tj1 + tj2 + tj) + 1)
            + ln_fact(h(tj1 + tm1))
            + ln_fact(h(tj1 - tm1))
            + ln_fact(h(tj2 + tm2))
            + ln_fact(h(tj2 - tm2))
            + ln_fact(h(tj + tm))
            + ln_fact(h(tj - tm)));
    let kmin = 0.max(h(tj2 - tj - tm1)).max(h(tj1 - tj + tm2));
    let kmax = a.min(h(tj1 - tm1)).min(h(tj2 + tm2));
    let mut sum = 0.0;
    for k in kmin..=kmax {
        let l = ln_fact(k)
            + ln_fact(a - k)
            + ln_fact(h(tj1 - tm1) - k)
            + ln_fact(h(tj2 + tm2) - k)
            + ln_fact(h(tj - tj2 + tm1) + k)
            + ln_fact(h(tj - tj1 - tm2) + k);
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        sum += sign * (pre - l).exp();
    }
    sum
}

/// Closed forms for a second factor of spin 0, 1/2 or 1.
fn small(tj1: i64, _tm1: i64, tj2: i64, tm2: i64, tj: i64, tm: i64) -> f64 {
    let j1 = tj1 as f64 / 2.0;
    let m = tm as f64 / 2.0;
    match tj2 {
        0 => 1.0,
        1 => {
            let den = 2.0 * j1 + 1.0;
            match (tj - tj1, tm2) {
                (1, 1) => ((j1 + m + 0.5) / den).sqrt(),
                (1, -1) => ((j1 - m + 0.5) / den).sqrt(),
                (-1, 1) => -((j1 - m + 0.5) / den).sqrt(),
                (-1, -1) => ((j1 + m + 0.5) / den).sqrt(),
                _ => 0.0,
            }
        }
        2 => {
            let r = |x: f64| x.max(0.0).sqrt();
            match (tj - tj1, tm2) {
                (2, 2) => r((j1 + m) * (j1 + m + 1.0) / ((2.0 * j1 + 1.0) * (2.0 * j1 + 2.0))),
                (2, 0) => r((j1 - m + 1.0) * (j1 + m + 1.0) / ((2.0 * j1 + 1.0) * (j1 + 1.0))),
                (2, -2) => r((j1 - m) * (j1 - m + 1.0) / ((2.0 * j1 + 1.0) * (2.0 * j1 + 2.0))),
                (0, 2) => -r((j1 + m) * (j1 - m + 1.0) / (2.0 * j1 * (j1 + 1.0))),
                (0, 0) => m / (j1 * (j1 + 1.0)).sqrt(),
                (0, -2) => r((j1 - m) * (j1 + m + 1.0) / (2.0 * j1 * (j1 + 1.0))),
                (-2, 2) => r((j1 - m) * (j1 - m + 1.0) / (2.0 * j1 * (2.0 * j1 + 1.0))),
                (-2, 0) => -r((j1 - m) * (j1 + m) / (j1 * (2.0 * j1 + 1.0))),
                (-2, -2) => r((j1 + m + 1.0) * (j1 + m) / (2.0 * j1 * (2.0 * j1 + 1.0))),
                _ => 0.0,
            }
        }
        _ => unreachable!(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_forms_match_racah() {
        for tj1 in 0..12i64 {
            for tj2 in 0..=2i64 {
                for tj in (tj1 - tj2).abs()..=tj1 + tj2 {
                    for tm1 in (-tj1..=tj1).step_by(2) {
                        for tm2 in (-tj2..=tj2).step_by(2) {
                            let tm = tm1 + tm2;
                            if !admissible(tj1, tm1, tj2, tm2, tj, tm) {
                                continue;
                            }
                            let a = clebsch_gordan(tj1, tm1, tj2, tm2, tj, tm);
                            let b = racah(tj1, tm1, tj2, tm2, tj, tm);
                            assert!(
                                (a - b).abs() < 1e-12,
                                "{tj1} {tm1} {tj2} {tm2} {tj} {tm}: {a} {b}"
                            );
                            let c = clebsch_gordan(tj2, tm2, tj1, tm1, tj, tm);
                            let d = racah(tj2, tm2, tj1, tm1, tj, tm);
                            assert!((c - d).abs() < 1e-12);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn orthonormal_columns() {
        let (tj1, tj2) = (5i64, 4i64);
        for tm in (-9..=9i64).step_by(2) {
            for tj in (1..=9i64).step_by(2) {
                let s: f64 = (-tj1..=tj1)
                    .step_by(2)
                    .map(|m1| clebsch_gordan(tj1, m1, tj2, tm - m1, tj, tm).powi(2))
                    .sum();
                let want = if tm.abs() <= tj { 1.0 } else { 0.0 };
                assert!((s - want).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn known_values() {
        // ⟨½ ½; ½ −½ | 1 0⟩ = 1/√2, ⟨½ ½; ½ −½ | 0 0⟩ = 1/√2
        assert!((clebsch_gordan(1, 1, 1, -1, 2, 0) - 0.5f64.sqrt()).abs() < 1e-15);
        assert!((clebsch_gordan(1, 1, 1, -1, 0, 0) - 0.5f64.sqrt()).abs() < 1e-15);
        assert!((clebsch_gordan(1, -1, 1, 1, 0, 0) + 0.5f64.sqrt()).abs() < 1e-15);
    }
}
