//! Division-free rewriting of symmetric polynomials in the elementary basis.
//!
//! A symmetric polynomial in `n` formal roots is given by its coefficients on
//! the monomial symmetric functions `m_λ` (a coefficient function on
//! partitions). It is rewritten as a polynomial in `σ_1, …, σ_n` by repeatedly
//! subtracting `c·σ^β` for the lexicographically largest remaining `λ`, where
//! `β_k = λ_k − λ_{k+1}`. Only ring operations are used, so this works over
//! any 𝔽_ℓ.

use std::collections::{BTreeMap, HashMap};

use crate::coeff::Prime;

/// Exponent vector `β` of `σ_1^{β_1} ⋯ σ_n^{β_n}` mapped to its coefficient.
pub type ElementaryPoly = BTreeMap<Vec<u32>, u32>;

/// Partitions of `degree` into at most `nparts` parts, padded with zeros to length
/// `nparts`, in decreasing lexicographic order.
pub fn partitions(degree: u32, nparts: usize) -> Vec<Vec<u32>> {
    fn go(rem: u32, max: u32, slots: usize, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if slots == 0 {
            if rem == 0 {
                out.push(cur.clone());
            }
            return;
        }
        let hi = rem.min(max);
        for part in (0..=hi).rev() {
            // The remaining slots can hold at most `part` each.
            if (part as u64) * (slots as u64) < rem as u64 {
                break;
            }
            cur.push(part);
            go(rem - part, part, slots - 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if nparts == 0 {
        if degree == 0 {
            out.push(Vec::new());
        }
        return out;
    }
    go(degree, degree, nparts, &mut Vec::new(), &mut out);
    out
}

fn sorted_desc(mut v: Vec<u32>) -> Vec<u32> {
    v.sort_unstable_by(|a, b| b.cmp(a));
    v
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// Expands products of elementary symmetric polynomials in the `m_λ` basis.
struct Expander {
    p: Prime,
    n: usize,
    partitions: HashMap<u32, Vec<Vec<u32>>>,
    subsets: HashMap<usize, Vec<Vec<usize>>>,
    cache: HashMap<Vec<u32>, HashMap<Vec<u32>, u32>>,
}

impl Expander {
    fn new(p: Prime, n: usize) -> Self {
        Expander {
            p,
            n,
            partitions: HashMap::new(),
            subsets: HashMap::new(),
            cache: HashMap::new(),
        }
    }

    fn partitions(&mut self, d: u32) -> Vec<Vec<u32>> {
        let n = self.n;
        self.partitions
            .entry(d)
            .or_insert_with(|| partitions(d, n))
            .clone()
    }

    /// `f · σ_k` where `f` is homogeneous of degree `deg` in the `m_λ` basis.
    fn times_elementary(&mut self, f: &HashMap<Vec<u32>, u32>, deg: u32, k: usize) -> HashMap<Vec<u32>, u32> {
        let p = self.p;
        let n = self.n;
        let subs = self
            .subsets
            .entry(k)
            .or_insert_with(|| subsets(n, k))
            .clone();
        let mut out = HashMap::new();
        for mu in self.partitions(deg + k as u32) {
            let mut acc = 0;
            for s in &subs {
                if s.iter().any(|&j| mu[j] == 0) {
                    continue;
                }
                let mut lower = mu.clone();
                for &j in s {
                    lower[j] -= 1;
                }
                if let Some(c) = f.get(&sorted_desc(lower)) {
                    acc = p.add(acc, *c);
                }
            }
            if acc != 0 {
                out.insert(mu, acc);
            }
        }
        out
    }

    fn expand(&mut self, beta: &[u32]) -> HashMap<Vec<u32>, u32> {
        if let Some(e) = self.cache.get(beta) {
            return e.clone();
        }
        // Peel one σ_k off the last nonzero exponent and recurse.
        let result = match beta.iter().rposition(|&b| b > 0) {
            None => HashMap::from([(vec![0; self.n], 1)]),
            Some(k) => {
                let mut smaller = beta.to_vec();
                smaller[k] -= 1;
                let base = self.expand(&smaller);
                let deg: u32 = smaller
                    .iter()
                    .enumerate()
                    .map(|(i, b)| (i as u32 + 1) * b)
                    .sum();
                self.times_elementary(&base, deg, k + 1)
            }
        };
        self.cache.insert(beta.to_vec(), result.clone());
        result
    }
}

/// Rewrites the symmetric polynomial `Σ_λ coeff(λ) m_λ` (all partitions with at
/// most `nvars` parts and degree `≤ max_degree`) in elementary symmetric
/// polynomials. `coeff` receives partitions padded with zeros to length `nvars`.
pub fn reduce_to_elementary(
    p: Prime,
    nvars: usize,
    max_degree: u32,
    coeff: impl Fn(&[u32]) -> u32,
) -> ElementaryPoly {
    let mut out = ElementaryPoly::new();
    if nvars == 0 {
        let c = p.reduce(coeff(&[]) as u64);
        if c != 0 {
            out.insert(Vec::new(), c);
        }
        return out;
    }
    let mut ex = Expander::new(p, nvars);
    for d in 0..=max_degree {
        let parts = ex.partitions(d);
        let mut f: HashMap<Vec<u32>, u32> = parts
            .iter()
            .map(|l| (l.clone(), p.reduce(coeff(l) as u64)))
            .filter(|(_, c)| *c != 0)
            .collect();
        for lambda in &parts {
            let c = f.get(lambda).copied().unwrap_or(0);
            if c == 0 {
                continue;
            }
            let beta: Vec<u32> = (0..nvars)
                .map(|k| lambda[k] - lambda.get(k + 1).copied().unwrap_or(0))
                .collect();
            for (mu, e) in ex.expand(&beta) {
                let entry = f.entry(mu).or_insert(0);
                *entry = p.sub(*entry, p.mul(c, e));
            }
            debug_assert_eq!(f.get(lambda).copied().unwrap_or(0), 0);
            let slot = out.entry(beta).or_insert(0);
            *slot = p.add(*slot, c);
        }
        debug_assert!(f.values().all(|&c| c == 0), "input was not symmetric");
    }
    out.retain(|_, c| *c != 0);
    out
}

/// Formats an elementary-basis polynomial with `σ_k` rendered by `name(k)`.
pub fn format_elementary(poly: &ElementaryPoly, name: impl Fn(usize) -> String) -> String {
    if poly.is_empty() {
        return "0".to_string();
    }
    // Lower total weight first.
    let mut entries: Vec<(&Vec<u32>, &u32)> = poly.iter().collect();
    entries.sort_by_key(|(beta, _)| {
        let w: u32 = beta.iter().enumerate().map(|(i, b)| (i as u32 + 1) * b).sum();
        (w, std::cmp::Reverse((*beta).clone()))
    });
    let parts: Vec<String> = entries
        .into_iter()
        .map(|(beta, c)| {
            let mono: Vec<String> = beta
                .iter()
                .enumerate()
                .filter(|(_, e)| **e > 0)
                .map(|(k, e)| {
                    if *e == 1 {
                        name(k + 1)
                    } else {
                        format!("{}^{}", name(k + 1), e)
                    }
                })
                .collect();
            match (mono.is_empty(), *c) {
                (true, c) => c.to_string(),
                (false, 1) => mono.join("*"),
                (false, c) => format!("{c}*{}", mono.join("*")),
            }
        })
        .collect();
    parts.join(" + ")
}
