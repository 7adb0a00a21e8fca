//! Concrete permutation models of small finite groups and brute-force
//! subgroup search over them.

use std::collections::{BTreeSet, HashMap};

pub type Perm = Vec<u8>;

/// A finite field GF(p^k) with elements encoded as base-p digit strings.
pub struct Field {
    pub q: usize,
    add: Vec<usize>,
    mul: Vec<usize>,
}

impl Field {
    /// `modulus` holds the low coefficients of a monic irreducible of degree k.
    pub fn new(p: u64, modulus: &[u64]) -> Field {
        let k = modulus.len().max(1);
        let q = (p as usize).pow(k as u32);
        let digits = |mut x: usize| {
            (0..k)
                .map(|_| {
                    let d = (x % p as usize) as u64;
                    x /= p as usize;
                    d
                })
                .collect::<Vec<u64>>()
        };
        let encode = |ds: &[u64]| {
            ds.iter()
                .rev()
                .fold(0usize, |acc, &d| acc * p as usize + d as usize)
        };
        let mut add = vec![0; q * q];
        let mut mul = vec![0; q * q];
        for a in 0..q {
            for b in 0..q {
                let (da, db) = (digits(a), digits(b));
                let s: Vec<u64> = da.iter().zip(&db).map(|(x, y)| (x + y) % p).collect();
                add[a * q + b] = encode(&s);
                let mut prod = vec![0u64; 2 * k];
                for i in 0..k {
                    for j in 0..k {
                        prod[i + j] = (prod[i + j] + da[i] * db[j]) % p;
                    }
                }
                if modulus.is_empty() {
                    prod.truncate(1);
                } else {
                    for d in (k..2 * k).rev() {
                        let c = prod[d];
                        prod[d] = 0;
                        for (i, m) in modulus.iter().enumerate() {
                            prod[d - k + i] = (prod[d - k + i] + (p - m % p) * c) % p;
                        }
                    }
                    prod.truncate(k);
                }
                mul[a * q + b] = encode(&prod);
            }
        }
        Field { q, add, mul }
    }

    pub fn prime(p: u64) -> Field {
        Field::new(p, &[])
    }

    pub fn add(&self, a: usize, b: usize) -> usize {
        self.add[a * self.q + b]
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.mul[a * self.q + b]
    }

    pub fn neg(&self, a: usize) -> usize {
        (0..self.q).find(|&b| self.add(a, b) == 0).unwrap()
    }

    pub fn inv(&self, a: usize) -> Option<usize> {
        (0..self.q).find(|&b| self.mul(a, b) == 1)
    }

    /// Largest multiplicative order of a non-zero element.
    pub fn max_unit_order(&self) -> usize {
        (1..self.q)
            .map(|a| {
                let mut x = a;
                let mut k = 1;
                while x != 1 {
                    x = self.mul(x, a);
                    k += 1;
                }
                k
            })
            .max()
            .unwrap_or(0)
    }
}

/// GF(q) for the prime powers the oracle models.
pub fn field(q: u64) -> Field {
    match q {
        4 => Field::new(2, &[1, 1]),
        8 => Field::new(2, &[1, 1, 0]),
        9 => Field::new(3, &[1, 0]),
        27 => Field::new(3, &[1, 2, 0]),
        p => Field::prime(p),
    }
}

/// A finite permutation group with a full multiplication table.
pub struct Group {
    pub name: String,
    pub elems: Vec<Perm>,
    mul: Vec<u32>,
    pub identity: usize,
}

fn compose(a: &Perm, b: &Perm) -> Perm {
    // apply b first, then a
    b.iter().map(|&x| a[x as usize]).collect()
}

impl Group {
    pub fn from_elements(name: &str, mut elems: Vec<Perm>) -> Group {
        elems.sort();
        elems.dedup();
        let index: HashMap<&Perm, usize> = elems.iter().enumerate().map(|(i, e)| (e, i)).collect();
        let n = elems.len();
        let mut mul = vec![0u32; n * n];
        for i in 0..n {
            for j in 0..n {
                mul[i * n + j] = index[&compose(&elems[i], &elems[j])] as u32;
            }
        }
        let deg = elems[0].len();
        let id: Perm = (0..deg as u8).collect();
        let identity = index[&id];
        Group {
            name: name.to_owned(),
            elems,
            mul,
            identity,
        }
    }

    /// The group generated by `gens` inside the symmetric group.
    pub fn generated(name: &str, gens: &[Perm]) -> Group {
        let deg = gens[0].len();
        let mut seen: BTreeSet<Perm> = [(0..deg as u8).collect()].into_iter().collect();
        let mut frontier: Vec<Perm> = seen.iter().cloned().collect();
        while let Some(x) = frontier.pop() {
            for g in gens {
                let y = compose(g, &x);
                if seen.insert(y.clone()) {
                    frontier.push(y);
                }
            }
        }
        Group::from_elements(name, seen.into_iter().collect())
    }

    pub fn order(&self) -> usize {
        self.elems.len()
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.mul[a * self.order() + b] as usize
    }

    pub fn inv(&self, a: usize) -> usize {
        (0..self.order())
            .find(|&b| self.mul(a, b) == self.identity)
            .unwrap()
    }

    pub fn elem_order(&self, a: usize) -> usize {
        let mut x = a;
        let mut k = 1;
        while x != self.identity {
            x = self.mul(x, a);
            k += 1;
        }
        k
    }

    /// Subgroup generated by `gens`, as a sorted element list.
    pub fn closure(&self, gens: &[usize]) -> Vec<usize> {
        let mut seen = vec![false; self.order()];
        seen[self.identity] = true;
        let mut frontier = vec![self.identity];
        let mut out = vec![self.identity];
        while let Some(x) = frontier.pop() {
            for &g in gens {
                let y = self.mul(g, x);
                if !seen[y] {
                    seen[y] = true;
                    out.push(y);
                    frontier.push(y);
                }
            }
        }
        out.sort_unstable();
        out
    }

    fn commute(&self, a: usize, b: usize) -> bool {
        self.mul(a, b) == self.mul(b, a)
    }

    fn conj(&self, g: usize, x: usize) -> usize {
        self.mul(self.mul(g, x), self.inv(g))
    }
}

/// A subgroup remembered by a small generating set.
#[derive(Clone, Debug)]
pub struct Sub {
    pub gens: Vec<usize>,
    pub elems: Vec<usize>,
}

fn dedup(subs: Vec<Sub>) -> Vec<Sub> {
    let mut seen = BTreeSet::new();
    subs.into_iter()
        .filter(|s| seen.insert(s.elems.clone()))
        .collect()
}

pub fn cyclic_subgroups(g: &Group, n: usize) -> Vec<Sub> {
    dedup(
        (0..g.order())
            .filter(|&x| g.elem_order(x) == n)
            .map(|x| Sub {
                gens: vec![x],
                elems: g.closure(&[x]),
            })
            .collect(),
    )
}

/// Subgroups isomorphic to the dihedral group of order 2n.
pub fn dihedral_subgroups(g: &Group, n: usize) -> Vec<Sub> {
    let invols: Vec<usize> = (0..g.order()).filter(|&x| g.elem_order(x) == 2).collect();
    let mut out = Vec::new();
    for r in cyclic_subgroups(g, n) {
        let gen = r.gens[0];
        for &s in &invols {
            if r.elems.binary_search(&s).is_ok() || g.conj(s, gen) != g.inv(gen) {
                continue;
            }
            let elems = g.closure(&[gen, s]);
            if elems.len() == 2 * n {
                out.push(Sub {
                    gens: vec![gen, s],
                    elems,
                });
            }
        }
    }
    dedup(out)
}

/// Elementary abelian p-subgroups of order p^t.
pub fn elementary_subgroups(g: &Group, p: usize, t: u32) -> Vec<Sub> {
    let pelts: Vec<usize> = (0..g.order()).filter(|&x| g.elem_order(x) == p).collect();
    let mut level = vec![Sub {
        gens: vec![],
        elems: vec![g.identity],
    }];
    for _ in 0..t {
        let mut next = Vec::new();
        for s in &level {
            for &x in &pelts {
                if s.elems.binary_search(&x).is_ok() || !s.gens.iter().all(|&y| g.commute(x, y)) {
                    continue;
                }
                let mut gens = s.gens.clone();
                gens.push(x);
                let elems = g.closure(&gens);
                next.push(Sub { gens, elems });
            }
        }
        level = dedup(next);
    }
    level
}

/// Subgroups E ⋊ C_n with E elementary abelian of order p^t and C_n acting
/// without non-trivial fixed points on E.
pub fn borel_subgroups(g: &Group, p: usize, t: u32, n: usize) -> Vec<Sub> {
    let es = elementary_subgroups(g, p, t);
    if n == 1 {
        return es;
    }
    let mut out = Vec::new();
    for e in &es {
        for x in (0..g.order()).filter(|&x| g.elem_order(x) == n) {
            let normalizes = e
                .gens
                .iter()
                .all(|&u| e.elems.binary_search(&g.conj(x, u)).is_ok());
            if !normalizes {
                continue;
            }
            let mut y = x;
            let mut free = true;
            for _ in 1..n {
                if e.elems.iter().any(|&u| u != g.identity && g.commute(y, u)) {
                    free = false;
                    break;
                }
                y = g.mul(y, x);
            }
            if !free {
                continue;
            }
            let mut gens = e.gens.clone();
            gens.push(x);
            let elems = g.closure(&gens);
            if elems.len() == p.pow(t) * n {
                out.push(Sub { gens, elems });
            }
        }
    }
    dedup(out)
}

/// Is there a choice of one subgroup from each candidate list that
/// together generate the whole group?
pub fn some_choice_generates(g: &Group, candidates: &[Vec<Sub>]) -> bool {
    fn go(g: &Group, cands: &[Vec<Sub>], gens: &mut Vec<usize>) -> bool {
        match cands.split_first() {
            None => g.closure(gens).len() == g.order(),
            Some((first, rest)) => first.iter().any(|s| {
                let k = gens.len();
                gens.extend(&s.gens);
                let ok = go(g, rest, gens);
                gens.truncate(k);
                ok
            }),
        }
    }
    go(g, candidates, &mut Vec::new())
}

pub fn dihedral(n: usize) -> Group {
    if n == 2 {
        return Group::generated("D2", &[vec![1, 0, 3, 2], vec![2, 3, 0, 1]]);
    }
    let rot: Perm = (0..n).map(|i| ((i + 1) % n) as u8).collect();
    let refl: Perm = (0..n).map(|i| ((n - i) % n) as u8).collect();
    Group::generated(&format!("D{n}"), &[rot, refl])
}

fn symmetric(k: usize, even_only: bool, name: &str) -> Group {
    let mut perms = Vec::new();
    let mut cur: Perm = (0..k as u8).collect();
    permute(&mut cur, 0, &mut perms);
    let parity = |p: &Perm| {
        let mut inv = 0;
        for i in 0..p.len() {
            for j in i + 1..p.len() {
                if p[i] > p[j] {
                    inv += 1;
                }
            }
        }
        inv % 2 == 0
    };
    Group::from_elements(
        name,
        perms
            .into_iter()
            .filter(|p| !even_only || parity(p))
            .collect(),
    )
}

fn permute(cur: &mut Perm, i: usize, out: &mut Vec<Perm>) {
    if i == cur.len() {
        out.push(cur.clone());
        return;
    }
    for j in i..cur.len() {
        cur.swap(i, j);
        permute(cur, i + 1, out);
        cur.swap(i, j);
    }
}

pub fn alternating4() -> Group {
    symmetric(4, true, "A4")
}

pub fn symmetric4() -> Group {
    symmetric(4, false, "S4")
}

pub fn alternating5() -> Group {
    symmetric(5, true, "A5")
}

/// PGL2(q) or PSL2(q) acting on the q+1 points of the projective line;
/// point q is infinity.
pub fn projective(q: u64, special: bool) -> Group {
    let f = field(q);
    let q = f.q;
    let inf = q;
    let squares: BTreeSet<usize> = (1..q).map(|x| f.mul(x, x)).collect();
    let mut perms = Vec::new();
    for a in 0..q {
        for b in 0..q {
            for c in 0..q {
                for d in 0..q {
                    let det = f.add(f.mul(a, d), f.neg(f.mul(b, c)));
                    if det == 0 || (special && !squares.contains(&det)) {
                        continue;
                    }
                    let image = |x: usize| {
                        let (num, den) = if x == inf {
                            (a, c)
                        } else {
                            (f.add(f.mul(a, x), b), f.add(f.mul(c, x), d))
                        };
                        match f.inv(den) {
                            Some(i) => f.mul(num, i),
                            None => inf,
                        }
                    };
                    perms.push((0..=q).map(|x| image(x) as u8).collect());
                }
            }
        }
    }
    let name = format!("{}2({q})", if special { "PSL" } else { "PGL" });
    Group::from_elements(&name, perms)
}
