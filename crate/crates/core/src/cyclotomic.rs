//! Exact elements of `Z[zeta_p]`.
//!
//! Stored as coefficients of `1, z, ..., z^(p-1)` reduced modulo
//! `1 + z + ... + z^(p-1)` so that the last coefficient is zero.

use serde::{Serialize, Serializer};
use std::fmt;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Cyclotomic {
    p: u8,
    c: Vec<i64>,
}

impl Cyclotomic {
    pub fn zero(p: u8) -> Cyclotomic {
        Cyclotomic { p, c: vec![0; p as usize] }
    }

    pub fn from_int(p: u8, n: i64) -> Cyclotomic {
        let mut z = Cyclotomic::zero(p);
        z.c[0] = n;
        z
    }

    /// `sum_e counts[e] z^e`.
    pub fn from_exponent_counts(p: u8, counts: &[i64]) -> Cyclotomic {
        let mut c = vec![0; p as usize];
        for (e, &n) in counts.iter().enumerate() {
            c[e % p as usize] += n;
        }
        let mut z = Cyclotomic { p, c };
        z.normalize();
        z
    }

    fn normalize(&mut self) {
        let last = *self.c.last().unwrap();
        if last != 0 {
            for x in self.c.iter_mut() {
                *x -= last;
            }
        }
    }

    pub fn p(&self) -> u8 {
        self.p
    }

    pub fn coefficients(&self) -> &[i64] {
        &self.c
    }

    pub fn add(&self, other: &Cyclotomic) -> Cyclotomic {
        assert_eq!(self.p, other.p);
        let c = self.c.iter().zip(&other.c).map(|(a, b)| a + b).collect();
        Cyclotomic { p: self.p, c }
    }

    pub fn scale(&self, k: i64) -> Cyclotomic {
        Cyclotomic { p: self.p, c: self.c.iter().map(|x| x * k).collect() }
    }

    /// The integer value, if this element is rational.
    pub fn as_integer(&self) -> Option<i64> {
        if self.c[1..].iter().all(|&x| x == 0) {
            Some(self.c[0])
        } else {
            None
        }
    }

    /// Image under the automorphism `z -> z^a`.
    pub fn galois(&self, a: u32) -> Cyclotomic {
        let p = self.p as usize;
        let mut c = vec![0; p];
        for (e, &x) in self.c.iter().enumerate() {
            c[e * a as usize % p] += x;
        }
        let mut z = Cyclotomic { p: self.p, c };
        z.normalize();
        z
    }

    /// Whether `other` is a Galois conjugate of `self`.
    pub fn is_conjugate(&self, other: &Cyclotomic) -> bool {
        self.p == other.p && (1..self.p as u32).any(|a| &self.galois(a) == other)
    }

    /// Trace down to `Q`: the sum of all Galois conjugates.
    pub fn trace(&self) -> i64 {
        let z = (1..self.p as u32).fold(Cyclotomic::zero(self.p), |acc, a| acc.add(&self.galois(a)));
        z.as_integer().expect("trace is rational")
    }

    /// Parses `n`, `n*z^e` terms joined by `+`/`-`, or the shorthand `nw` for `n z`.
    pub fn parse(p: u8, s: &str) -> Option<Cyclotomic> {
        let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let s = s.replace('\u{2212}', "-");
        let mut counts = vec![0i64; p as usize];
        let mut rest = s.as_str();
        if rest.is_empty() {
            return None;
        }
        while !rest.is_empty() {
            let (sign, body) = match rest.as_bytes()[0] {
                b'-' => (-1, &rest[1..]),
                b'+' => (1, &rest[1..]),
                _ => (1, rest),
            };
            let end = body[1..].find(['+', '-']).map(|i| i + 1).unwrap_or(body.len());
            let term = &body[..end];
            rest = &body[end..];
            let (coef, exp) = if let Some(i) = term.find(['z', 'w']) {
                let coef = match &term[..i] {
                    "" => 1,
                    t => t.trim_end_matches('*').parse::<i64>().ok()?,
                };
                let tail = &term[i + 1..];
                let exp = if let Some(e) = tail.strip_prefix('^') {
                    e.parse::<usize>().ok()?
                } else if tail.is_empty() || tail == "3" && term.as_bytes()[i] == b'w' {
                    1
                } else {
                    return None;
                };
                (coef, exp)
            } else {
                (term.parse::<i64>().ok()?, 0)
            };
            counts[exp % p as usize] += sign * coef;
        }
        Some(Cyclotomic::from_exponent_counts(p, &counts))
    }
}

impl fmt::Display for Cyclotomic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(n) = self.as_integer() {
            return write!(f, "{}", n);
        }
        let mut first = true;
        for (e, &x) in self.c.iter().enumerate() {
            if x == 0 {
                continue;
            }
            let sign = if x < 0 { "-" } else if first { "" } else { "+" };
            let a = x.abs();
            match (e, a) {
                (0, _) => write!(f, "{}{}", sign, a)?,
                (1, 1) => write!(f, "{}z", sign)?,
                (1, _) => write!(f, "{}{}z", sign, a)?,
                (_, 1) => write!(f, "{}z^{}", sign, e)?,
                _ => write!(f, "{}{}z^{}", sign, a, e)?,
            }
            first = false;
        }
        Ok(())
    }
}

impl fmt::Debug for Cyclotomic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (p={})", self, self.p)
    }
}

impl Serialize for Cyclotomic {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sum_of_all_roots_is_zero() {
        let z = Cyclotomic::from_exponent_counts(5, &[1, 1, 1, 1, 1]);
        assert_eq!(z.as_integer(), Some(0));
    }

    #[test]
    fn p_two_collapses_to_integers() {
        let z = Cyclotomic::from_exponent_counts(2, &[10, 4]);
        assert_eq!(z.as_integer(), Some(6));
    }

    #[test]
    fn parse_and_display() {
        let z = Cyclotomic::parse(3, "9w").unwrap();
        assert_eq!(z.to_string(), "9z");
        assert!(z.is_conjugate(&Cyclotomic::parse(3, "9z^2").unwrap()));
        assert!(!z.is_conjugate(&Cyclotomic::from_int(3, 9)));
        assert_eq!(Cyclotomic::parse(5, "-2").unwrap().as_integer(), Some(-2));
        assert_eq!(Cyclotomic::parse(3, "27w3").unwrap(), Cyclotomic::parse(3, "27z").unwrap());
        // 1 + z + z^2 = 0
        assert_eq!(Cyclotomic::parse(3, "1+z+z^2").unwrap().as_integer(), Some(0));
    }

    #[test]
    fn trace_of_zeta() {
        let z = Cyclotomic::parse(7, "z").unwrap();
        assert_eq!(z.trace(), -1);
    }
}
