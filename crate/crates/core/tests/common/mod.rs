//! Slow reference evaluations that share no code with the library.
#![allow(dead_code)]

pub fn pow_mod(b: u64, mut e: u64, p: u64) -> u64 {
    let (mut r, mut b, p) = (1u128, (b % p) as u128, p as u128);
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    r as u64
}

/// Legendre symbol by Euler's criterion.
pub fn rho(a: i64, p: u64) -> i64 {
    let a = a.rem_euclid(p as i64) as u64;
    if a == 0 {
        return 0;
    }
    if pow_mod(a, (p - 1) / 2, p) == 1 {
        1
    } else {
        -1
    }
}

pub fn primes(lo: u64, hi: u64) -> Vec<u64> {
    (lo.max(2)..=hi)
        .filter(|&n| (2..).take_while(|d| d * d <= n).all(|d| n % d != 0))
        .collect()
}

/// Legendre values indexed by residue.
pub fn rho_table(p: u64) -> Vec<i64> {
    (0..p as i64).map(|a| rho(a, p)).collect()
}

fn sq(x: u64, p: u64) -> i64 {
    (x * x % p) as i64
}

pub struct Naive {
    pub p: u64,
    r: Vec<i64>,
}

impl Naive {
    pub fn new(p: u64) -> Self {
        Self { p, r: rho_table(p) }
    }

    fn rho(&self, x: i64) -> i64 {
        self.r[x.rem_euclid(self.p as i64) as usize]
    }

    pub fn kernel(&self, x: u64) -> i64 {
        let p = self.p;
        (1..p)
            .map(|b| self.rho(sq(b, p) - sq(x, p)) * self.rho(sq(b, p) - 1))
            .sum()
    }

    pub fn n(&self) -> i64 {
        let p = self.p;
        let mut s = 0;
        for a in 2..p - 1 {
            for c in 1..p {
                s += self.rho(sq(a, p) - sq(c, p)) * self.rho(sq(c, p) - 1) * self.rho(sq(a, p) - 1);
            }
        }
        s
    }

    pub fn t(&self) -> i64 {
        let p = self.p;
        let mut s = 0;
        for a in 2..p - 1 {
            for b in 1..p {
                let fb = self.rho(sq(a, p) - sq(b, p)) * self.rho(sq(b, p) - 1);
                if fb == 0 {
                    continue;
                }
                for d in 1..p {
                    s += fb * self.rho(sq(a, p) - sq(d, p)) * self.rho(sq(d, p) - 1);
                }
            }
        }
        s
    }

    /// Quadruple-loop triple sum with `a^2 c^2` in the first factor.
    pub fn s(&self, a: u64) -> i64 {
        let p = self.p;
        let mut s = 0;
        for b in 1..p {
            for c in 1..p {
                let ac = a * c % p;
                let f = self.rho(sq(b, p) - sq(ac, p)) * self.rho(sq(b, p) - 1);
                if f == 0 {
                    continue;
                }
                for d in 1..p {
                    s += f * self.rho(sq(d, p) - sq(c, p)) * self.rho(sq(d, p) - 1);
                }
            }
        }
        s
    }

    pub fn triple_full(&self) -> i64 {
        self.s(1)
    }

    pub fn r(&self, a: u64) -> i64 {
        let p = self.p;
        let mut s = 0;
        for b in 1..p {
            for c in 1..p {
                let ac = a * c % p;
                s += self.rho(sq(b, p) - sq(ac, p)) * self.rho(sq(b, p) - 1) * self.rho(sq(c, p) - 1);
            }
        }
        s
    }

    pub fn phi(&self, t: u64) -> i64 {
        let p = self.p as i64;
        (1..p)
            .map(|b| self.rho(b - t as i64) * self.rho(b - 1) * self.rho(b))
            .sum()
    }
}

/// Smallest primitive root by checking the order of each candidate.
pub fn primitive_root(p: u64) -> u64 {
    (2..p)
        .find(|&g| {
            let mut x = 1u64;
            for k in 1..p - 1 {
                x = x * g % p;
                if x == 1 {
                    return k == p - 1;
                }
            }
            true
        })
        .unwrap_or(1)
}

/// `chi_k(a) = e(k ind(a) / (p-1))` as an angle in turns, by discrete log
/// search.
pub fn character_turns(p: u64, k: u64) -> Vec<Option<f64>> {
    let g = primitive_root(p);
    let mut out = vec![None; p as usize];
    let mut x = 1u64;
    for t in 0..p - 1 {
        out[x as usize] = Some(((k * t) % (p - 1)) as f64 / (p - 1) as f64);
        x = x * g % p;
    }
    out
}

/// `G(n, chi_k; p)` by direct summation with std trigonometry.
pub fn gauss_sum(p: u64, n: i64, k: u64) -> (f64, f64) {
    let chi = character_turns(p, k);
    let n = n.rem_euclid(p as i64) as u64;
    let (mut re, mut im) = (0.0, 0.0);
    for a in 1..p {
        let turns = chi[a as usize].unwrap() + (n * (a * a % p) % p) as f64 / p as f64;
        let ang = std::f64::consts::TAU * turns;
        re += ang.cos();
        im += ang.sin();
    }
    (re, im)
}

/// Euler-product constant by direct multiplication with factors summed
/// from the closed binomial expression, over primes up to `pmax`.
pub fn constant_c_reference(pmax: u64, kmax: u32) -> f64 {
    let mut sieve = vec![true; pmax as usize + 1];
    let mut log_sum = 0.0f64;
    let mut comp = 0.0f64;
    for n in 2..=pmax as usize {
        if !sieve[n] {
            continue;
        }
        let mut m = n * n;
        while m <= pmax as usize {
            sieve[m] = false;
            m += n;
        }
        let q = 1.0 / (n as f64 * n as f64);
        let mut excess = 0.0;
        let mut binom = 1.0f64; // binom(2k, k) / 4^k
        let mut qk = 1.0;
        for k in 1..=kmax {
            binom *= (2 * k - 1) as f64 / (2 * k) as f64;
            qk *= q;
            excess += binom * binom * qk;
        }
        // Kahan summation of ln(1 + excess).
        let y = excess.ln_1p() - comp;
        let t = log_sum + y;
        comp = (t - log_sum) - y;
        log_sum = t;
    }
    log_sum.exp()
}
