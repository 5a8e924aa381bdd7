//! Independent reference arithmetic for the integration tests: schoolbook
//! polynomial arithmetic over `F_p`, brute-force square roots and point
//! enumeration, and the two j-formulas written out by hand.
#![allow(dead_code)]

use std::collections::BTreeSet;
use std::path::PathBuf;

/// Element of `F_p[a]/(modulus)`, coefficients low degree first.
pub type El = Vec<u32>;

#[derive(Clone, Debug)]
pub struct Oracle {
    pub p: u32,
    /// Monic, low degree first, length `n + 1`.
    pub modulus: Vec<u32>,
}

impl Oracle {
    pub fn new(p: u32, modulus: &[u32]) -> Self {
        Oracle { p, modulus: modulus.to_vec() }
    }

    pub fn n(&self) -> usize {
        self.modulus.len() - 1
    }

    pub fn q(&self) -> u64 {
        (self.p as u64).pow(self.n() as u32)
    }

    pub fn k(&self, v: i64) -> El {
        let mut e = vec![0; self.n()];
        e[0] = v.rem_euclid(self.p as i64) as u32;
        e
    }

    pub fn zero(&self) -> El {
        self.k(0)
    }

    pub fn add(&self, a: &El, b: &El) -> El {
        a.iter().zip(b).map(|(x, y)| (x + y) % self.p).collect()
    }

    pub fn neg(&self, a: &El) -> El {
        a.iter().map(|x| (self.p - x) % self.p).collect()
    }

    pub fn sub(&self, a: &El, b: &El) -> El {
        self.add(a, &self.neg(b))
    }

    /// Full product, then long division by the modulus.
    pub fn mul(&self, a: &El, b: &El) -> El {
        let n = self.n();
        let p = self.p as u64;
        let mut prod = vec![0u64; 2 * n];
        for (i, x) in a.iter().enumerate() {
            for (j, y) in b.iter().enumerate() {
                prod[i + j] = (prod[i + j] + *x as u64 * *y as u64) % p;
            }
        }
        for deg in (n..2 * n).rev() {
            let c = prod[deg];
            if c == 0 {
                continue;
            }
            prod[deg] = 0;
            for (i, m) in self.modulus[..n].iter().enumerate() {
                let idx = deg - n + i;
                prod[idx] = (prod[idx] + (p - c) * *m as u64) % p;
            }
        }
        prod[..n].iter().map(|&v| v as u32).collect()
    }

    pub fn pow(&self, a: &El, mut e: u64) -> El {
        let mut acc = self.k(1);
        let mut base = a.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            e >>= 1;
        }
        acc
    }

    /// Every element, high coefficient varying slowest.
    pub fn elements(&self) -> Vec<El> {
        let n = self.n();
        (0..self.q())
            .map(|mut idx| {
                let mut e = vec![0; n];
                for slot in e.iter_mut() {
                    *slot = (idx % self.p as u64) as u32;
                    idx /= self.p as u64;
                }
                e
            })
            .collect()
    }

    /// `a^(q-2)`, checked.
    pub fn inv(&self, a: &El) -> Option<El> {
        let b = self.pow(a, self.q() - 2);
        (self.mul(a, &b) == self.k(1)).then_some(b)
    }

    pub fn div(&self, a: &El, b: &El) -> Option<El> {
        self.inv(b).map(|i| self.mul(a, &i))
    }

    pub fn sqrts(&self, a: &El) -> BTreeSet<El> {
        self.elements().into_iter().filter(|y| self.mul(y, y) == *a).collect()
    }

    pub fn frob(&self, a: &El) -> El {
        self.pow(a, self.p as u64)
    }

    pub fn in_prime_field(&self, a: &El) -> bool {
        a[1..].iter().all(|&c| c == 0)
    }

    /// `[m,n,l]` or a bare residue.
    pub fn show(&self, a: &El) -> String {
        if self.in_prime_field(a) {
            return a[0].to_string();
        }
        let parts: Vec<String> = a.iter().rev().map(|c| c.to_string()).collect();
        format!("[{}]", parts.join(","))
    }

    pub fn parse(&self, s: &str) -> El {
        let s = s.trim();
        match s.strip_prefix('[').and_then(|t| t.strip_suffix(']')) {
            Some(inner) => inner.split(',').rev().map(|c| c.trim().parse().unwrap()).collect(),
            None => self.k(s.parse().unwrap()),
        }
    }
}

/// Affine point or `None` for infinity on `y^2 = x^3 + a2 x^2 + a4 x + a6`.
pub type Pt = Option<(El, El)>;

#[derive(Clone, Debug)]
pub struct ShortCurve {
    pub f: Oracle,
    pub a2: El,
    pub a4: El,
    pub a6: El,
}

impl ShortCurve {
    pub fn new(f: &Oracle, a2: i64, a4: i64, a6: i64) -> Self {
        ShortCurve { a2: f.k(a2), a4: f.k(a4), a6: f.k(a6), f: f.clone() }
    }

    pub fn rhs(&self, x: &El) -> El {
        let f = &self.f;
        let x2 = f.mul(x, x);
        let x3 = f.mul(&x2, x);
        f.add(&f.add(&x3, &f.mul(&self.a2, &x2)), &f.add(&f.mul(&self.a4, x), &self.a6))
    }

    pub fn contains(&self, p: &Pt) -> bool {
        match p {
            None => true,
            Some((x, y)) => self.f.mul(y, y) == self.rhs(x),
        }
    }

    /// All `(x, y)` pairs satisfying the equation, plus infinity.
    pub fn brute_points(&self) -> Vec<Pt> {
        let els = self.f.elements();
        let squares: Vec<(El, El)> = els.iter().map(|y| (self.f.mul(y, y), y.clone())).collect();
        let mut out = vec![None];
        for x in &els {
            let r = self.rhs(x);
            out.extend(squares.iter().filter(|(s, _)| *s == r).map(|(_, y)| Some((x.clone(), y.clone()))));
        }
        out
    }

    /// `Z/n1` or `Z/n2×Z/n1` from the point count and the largest order.
    pub fn structure(&self) -> String {
        let pts = self.brute_points();
        let n1 = pts.iter().map(|p| self.order(p)).max().unwrap();
        let n2 = pts.len() as u64 / n1;
        if n2 == 1 { format!("Z/{n1}") } else { format!("Z/{n2}×Z/{n1}") }
    }

    pub fn add(&self, p: &Pt, q: &Pt) -> Pt {
        let f = &self.f;
        let ((x1, y1), (x2, y2)) = match (p, q) {
            (None, _) => return q.clone(),
            (_, None) => return p.clone(),
            (Some(a), Some(b)) => (a, b),
        };
        let lambda = if x1 == x2 {
            if f.add(y1, y2) == f.zero() {
                return None;
            }
            let num = f.add(
                &f.add(&f.mul(&f.k(3), &f.mul(x1, x1)), &f.mul(&f.k(2), &f.mul(&self.a2, x1))),
                &self.a4,
            );
            f.div(&num, &f.mul(&f.k(2), y1)).unwrap()
        } else {
            f.div(&f.sub(y2, y1), &f.sub(x2, x1)).unwrap()
        };
        let x3 = f.sub(&f.sub(&f.sub(&f.mul(&lambda, &lambda), &self.a2), x1), x2);
        let y3 = f.sub(&f.mul(&lambda, &f.sub(x1, &x3)), y1);
        Some((x3, y3))
    }

    pub fn neg(&self, p: &Pt) -> Pt {
        p.as_ref().map(|(x, y)| (x.clone(), self.f.neg(y)))
    }

    pub fn frob(&self, p: &Pt) -> Pt {
        p.as_ref().map(|(x, y)| (self.f.frob(x), self.f.frob(y)))
    }

    /// `P + φP + φ²P`.
    pub fn phi(&self, p: &Pt) -> Pt {
        let f1 = self.frob(p);
        let f2 = self.frob(&f1);
        self.add(&self.add(p, &f1), &f2)
    }

    pub fn show(&self, p: &Pt) -> String {
        match p {
            None => "(∞,∞)".into(),
            Some((x, y)) => format!("({},{})", self.f.show(x), self.f.show(y)),
        }
    }

    pub fn order(&self, p: &Pt) -> u64 {
        let mut acc = p.clone();
        let mut k = 1;
        while acc.is_some() {
            acc = self.add(&acc, p);
            k += 1;
        }
        k
    }
}

/// `j` on `X0(32)`: `t = x(x+4)/2`,
/// `j = 256 (t^4 + 8t^3 + 20t^2 + 16t + 1)^3 / (t (t+4) (t+2)^2)`.
pub fn j_x0_32(f: &Oracle, x: &El) -> Option<El> {
    let t = f.div(&f.mul(x, &f.add(x, &f.k(4))), &f.k(2))?;
    let t2 = f.mul(&t, &t);
    let t3 = f.mul(&t2, &t);
    let t4 = f.mul(&t3, &t);
    let inner = [t4, f.mul(&f.k(8), &t3), f.mul(&f.k(20), &t2), f.mul(&f.k(16), &t), f.k(1)]
        .iter()
        .fold(f.zero(), |acc, v| f.add(&acc, v));
    let num = f.mul(&f.k(256), &f.pow(&inner, 3));
    let tp2 = f.add(&t, &f.k(2));
    let den = f.mul(&f.mul(&t, &f.add(&t, &f.k(4))), &f.mul(&tp2, &tp2));
    f.div(&num, &den)
}

/// `j` on `X0(24)`: `t = x(x+6)/2`, `s = t (2t+9)^2 / (27 (t+4))`,
/// `j = 27 (s+1) (9s+1)^3 / s`.
pub fn j_x0_24(f: &Oracle, x: &El) -> Option<El> {
    let t = f.div(&f.mul(x, &f.add(x, &f.k(6))), &f.k(2))?;
    let u = f.add(&f.mul(&f.k(2), &t), &f.k(9));
    let s = f.div(&f.mul(&t, &f.mul(&u, &u)), &f.mul(&f.k(27), &f.add(&t, &f.k(4))))?;
    let v = f.add(&f.mul(&f.k(9), &s), &f.k(1));
    let num = f.mul(&f.mul(&f.k(27), &f.add(&s, &f.k(1))), &f.pow(&v, 3));
    f.div(&num, &s)
}

pub fn golden(name: &str) -> String {
    let path: PathBuf = [env!("CARGO_MANIFEST_DIR"), "golden", name].iter().collect();
    std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

/// Body rows of the first Markdown table in `text`, split into cells.
pub fn table_rows(text: &str) -> Vec<Vec<String>> {
    text.lines()
        .skip_while(|l| !l.starts_with('|'))
        .take_while(|l| l.starts_with('|'))
        .skip(2)
        .map(|l| l.trim_matches('|').split('|').map(|c| c.trim().to_string()).collect())
        .collect()
}

/// Branch name, edges and black vertices of one graph section.
pub type GraphSection = (String, Vec<(usize, usize)>, Vec<usize>);

/// One entry per `### Graph ... branch <name>` section.
pub fn graph_sections(text: &str) -> Vec<GraphSection> {
    let mut out = Vec::new();
    for section in text.split("### Graph").skip(1) {
        let branch = section.lines().next().unwrap().rsplit(' ').next().unwrap().to_string();
        let edges = section
            .lines()
            .filter_map(|l| l.strip_prefix("- "))
            .map(|l| {
                let mut it = l.split_whitespace();
                let a = it.next().unwrap().parse().unwrap();
                it.next();
                let b = it.next().unwrap().parse().unwrap();
                (a, b)
            })
            .collect();
        let black = section
            .lines()
            .find_map(|l| l.strip_prefix("black: "))
            .map(|l| l.split(", ").map(|v| v.parse().unwrap()).collect())
            .unwrap_or_default();
        out.push((branch, edges, black));
    }
    out
}
