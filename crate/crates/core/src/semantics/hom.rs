use super::structure::{Elem, Structure};

/// Whether `map` (indexed by elements of `a`) is a homomorphism `a → b`.
pub fn is_homomorphism(a: &Structure, b: &Structure, map: &[Elem]) -> bool {
    if map.len() != a.size() || map.iter().any(|&e| e >= b.size()) {
        return false;
    }
    for (r, tuples) in a.rels() {
        for t in tuples {
            let image: Vec<Elem> = t.iter().map(|&e| map[e]).collect();
            if !b.holds(r, &image) {
                return false;
            }
        }
    }
    for (f, table) in a.funs() {
        for (args, &v) in table {
            let image: Vec<Elem> = args.iter().map(|&e| map[e]).collect();
            if b.fun_value(f, &image) != Some(map[v]) {
                return false;
            }
        }
    }
    true
}

struct HomSearch<'a> {
    b: &'a Structure,
    m: &'a Structure,
    injective: bool,
}

impl HomSearch<'_> {
    /// Whether all constraints of `b` touching only assigned elements hold.
    fn consistent(&self, h: &[Option<Elem>], last: Elem) -> bool {
        let img = |t: &[Elem]| -> Option<Vec<Elem>> { t.iter().map(|&e| h[e]).collect() };
        for (r, tuples) in self.b.rels() {
            for t in tuples {
                if !t.contains(&last) {
                    continue;
                }
                if let Some(image) = img(t) {
                    if !self.m.holds(r, &image) {
                        return false;
                    }
                }
            }
        }
        for (f, table) in self.b.funs() {
            for (args, &v) in table {
                if v != last && !args.contains(&last) {
                    continue;
                }
                if let (Some(image), Some(hv)) = (img(args), h[v]) {
                    if self.m.fun_value(f, &image) != Some(hv) {
                        return false;
                    }
                }
            }
        }
        if self.injective {
            let x = h[last];
            if h.iter().enumerate().any(|(i, &y)| i != last && y.is_some() && y == x) {
                return false;
            }
        }
        true
    }

    fn run(&self, h: &mut Vec<Option<Elem>>, next: usize) -> bool {
        if next == h.len() {
            return true;
        }
        if h[next].is_some() {
            return self.consistent(h, next) && self.run(h, next + 1);
        }
        for e in self.m.elements() {
            h[next] = Some(e);
            if self.consistent(h, next) && self.run(h, next + 1) {
                return true;
            }
        }
        h[next] = None;
        false
    }
}

fn search(b: &Structure, m: &Structure, forced: Vec<Option<Elem>>, injective: bool) -> Option<Vec<Elem>> {
    let s = HomSearch { b, m, injective };
    let mut h = forced;
    if s.run(&mut h, 0) {
        Some(h.into_iter().map(|e| e.unwrap()).collect())
    } else {
        None
    }
}

fn forced(f: &[Elem], g: &[Elem], size: usize) -> Option<Vec<Option<Elem>>> {
    let mut forced: Vec<Option<Elem>> = vec![None; size];
    for (&ga, &fa) in g.iter().zip(f) {
        match forced[ga] {
            Some(x) if x != fa => return None,
            _ => forced[ga] = Some(fa),
        }
    }
    Some(forced)
}

/// Some `h : b → m` with `h ∘ g = f`, found by lexicographic backtracking.
/// `f : a → m` and `g : a → b` are given as element maps.
pub fn hom_extend_search(f: &[Elem], g: &[Elem], b: &Structure, m: &Structure) -> Option<Vec<Elem>> {
    search(b, m, forced(f, g, b.size())?, false)
}

/// As [`hom_extend_search`], but `h` must be an isomorphism.
pub fn iso_extend_search(f: &[Elem], g: &[Elem], b: &Structure, m: &Structure) -> Option<Vec<Elem>> {
    if b.size() != m.size() || b.signature != m.signature {
        return None;
    }
    for (r, t) in b.rels() {
        if t.len() != m.rel(r).len() {
            return None;
        }
    }
    for (fun, t) in b.funs() {
        if t.len() != m.fun(fun).len() {
            return None;
        }
    }
    search(b, m, forced(f, g, b.size())?, true)
}

/// Some homomorphism `a → b`.
pub fn find_homomorphism(a: &Structure, b: &Structure) -> Option<Vec<Elem>> {
    hom_extend_search(&[], &[], a, b)
}

/// An isomorphism `a → b`: a bijective homomorphism between structures with
/// the same number of tuples per relation.
pub fn find_isomorphism(a: &Structure, b: &Structure) -> Option<Vec<Elem>> {
    iso_extend_search(&[], &[], a, b)
}

pub fn isomorphic(a: &Structure, b: &Structure) -> bool {
    find_isomorphism(a, b).is_some()
}
