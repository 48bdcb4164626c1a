//! Seeded generators and independent oracles shared by the integration tests.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use chasekit::chase::{chase, ChaseOptions, ChaseTrace};
use chasekit::normalize::{normal_theory_of, NormalTheory};
use chasekit::semantics::{Elem, Structure};
use chasekit::syntax::{Atom, Context, Formula, Sequent, Signature, Term, Theory};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const DEFAULT_SEED: u64 = 0x00c4_a5e5;

/// `CHASEKIT_SEED` if set, otherwise a fixed seed.
pub fn seed() -> u64 {
    std::env::var("CHASEKIT_SEED")
        .ok()
        .and_then(|s| s.trim().parse().ok())
        .unwrap_or(DEFAULT_SEED)
}

/// An independent stream per use site so criteria do not perturb each other.
pub fn rng(stream: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed() ^ stream.wrapping_mul(0x9e37_79b9_7f4a_7c15))
}

pub fn vars(prefix: &str, n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("{prefix}{i}")).collect()
}

/// Up to four relation symbols of arity 1 to 3.
pub fn random_signature(rng: &mut impl Rng) -> Signature {
    let names = ["P", "Q", "R", "S"];
    let n = rng.gen_range(1..=4);
    let mut sig = Signature::new();
    for name in &names[..n] {
        let arity = *[1, 1, 2, 2, 3].choose(rng).unwrap();
        sig = sig.with_rel(name, arity);
    }
    sig
}

pub fn random_atom(rng: &mut impl Rng, sig: &Signature, scope: &[String]) -> Atom {
    let rels: Vec<(&String, &usize)> = sig.rels.iter().collect();
    let (r, &n) = *rels.choose(rng).unwrap();
    Atom::Rel(r.clone(), (0..n).map(|_| Term::var(scope.choose(rng).unwrap())).collect())
}

fn atom_mentioning(rng: &mut impl Rng, sig: &Signature, scope: &[String], v: &str) -> Atom {
    let Atom::Rel(r, mut args) = random_atom(rng, sig, scope) else { unreachable!() };
    let i = rng.gen_range(0..args.len());
    args[i] = Term::var(v);
    Atom::Rel(r, args)
}

fn used_vars(atoms: &[Atom]) -> Vec<String> {
    let mut out: Vec<String> = Vec::new();
    for a in atoms {
        for t in a.terms() {
            if let Some(v) = t.as_var() {
                if !out.iter().any(|o| o == v) {
                    out.push(v.to_string());
                }
            }
        }
    }
    out
}

/// A normal, equality-free sequent `φ ⊢_x̄ ∃ȳ (φ ∧ ψ)`.
pub fn random_normal_sequent(rng: &mut impl Rng, sig: &Signature) -> Sequent {
    let xs = vars("x", rng.gen_range(1..=3));
    let n_ant = rng.gen_range(0..=2);
    let mut ant: Vec<Atom> = (0..n_ant).map(|_| random_atom(rng, sig, &xs)).collect();
    ant.dedup();
    let ctx = if ant.is_empty() { vec!["x1".to_string()] } else { used_vars(&ant) };
    let ys = if rng.gen_bool(0.35) { vec!["y1".to_string()] } else { Vec::new() };
    let scope: Vec<String> = ctx.iter().chain(&ys).cloned().collect();
    let mut matrix = ant.clone();
    let extra = rng.gen_range(1..=2);
    for i in 0..extra {
        let a = match ys.first() {
            Some(y) if i == 0 => atom_mentioning(rng, sig, &scope, y),
            _ => random_atom(rng, sig, &scope),
        };
        if !matrix.contains(&a) {
            matrix.push(a);
        }
    }
    Sequent::new(
        Context::from_names(ctx),
        Formula::conj(&ant),
        Formula::exists(ys, Formula::conj(&matrix)),
    )
}

pub fn random_normal_theory(rng: &mut impl Rng, sig: &Signature) -> Theory {
    let mut t = Theory::new(sig.clone());
    for i in 0..rng.gen_range(1..=4) {
        t.axioms.insert(format!("ax{i}"), random_normal_sequent(rng, sig));
    }
    t
}

pub fn random_structure(rng: &mut impl Rng, sig: &Signature, max_size: usize, density: f64) -> Structure {
    let mut s = Structure::new(sig.clone());
    let n = rng.gen_range(1..=max_size);
    for i in 0..n {
        s.add_element(&format!("a{i}"));
    }
    for (r, &k) in &sig.rels {
        for t in s.tuples(k) {
            if rng.gen_bool(density) {
                s.add_tuple(r, t);
            }
        }
    }
    s
}

/// A regular formula with at most `max_atoms` atoms and two nested `∃`,
/// over `free` and the variables it binds.
pub fn random_formula(rng: &mut impl Rng, sig: &Signature, free: &[String], max_atoms: usize, equality: bool) -> Formula {
    let mut budget = rng.gen_range(1..=max_atoms);
    let mut counter = 0;
    formula_rec(rng, sig, free.to_vec(), &mut budget, 2, equality, &mut counter)
}

fn formula_rec(
    rng: &mut impl Rng,
    sig: &Signature,
    mut scope: Vec<String>,
    budget: &mut usize,
    depth: usize,
    equality: bool,
    counter: &mut usize,
) -> Formula {
    if depth > 0 && *budget > 0 && rng.gen_bool(0.4) {
        *counter += 1;
        let y = format!("z{counter}");
        scope.push(y.clone());
        let body = formula_rec(rng, sig, scope, budget, depth - 1, equality, counter);
        return Formula::exists(vec![y], body);
    }
    let mut parts = Vec::new();
    let here = if *budget == 0 { 0 } else { rng.gen_range(1..=*budget) };
    for _ in 0..here {
        *budget -= 1;
        let atom = if equality && rng.gen_bool(0.25) {
            Atom::Eq(Term::var(scope.choose(rng).unwrap()), Term::var(scope.choose(rng).unwrap()))
        } else {
            random_atom(rng, sig, &scope)
        };
        parts.push(Formula::Atom(atom));
    }
    if depth > 0 && *budget > 0 && rng.gen_bool(0.5) {
        parts.push(formula_rec(rng, sig, scope, budget, depth - 1, equality, counter));
    }
    Formula::and(parts)
}

/// A term over `scope` built from the function symbols of `sig`, of depth at most `depth`.
pub fn random_term(rng: &mut impl Rng, sig: &Signature, scope: &[String], depth: usize) -> Term {
    let funs: Vec<(&String, &usize)> = sig.funs.iter().collect();
    if depth == 0 || funs.is_empty() || rng.gen_bool(0.4) {
        return Term::var(scope.choose(rng).unwrap());
    }
    let (f, &n) = *funs.choose(rng).unwrap();
    Term::app(f, (0..n).map(|_| random_term(rng, sig, scope, depth - 1)).collect())
}

/// A chase instance: a normal equality-free theory and a small structure.
pub struct Instance {
    pub theory: Theory,
    pub normal: NormalTheory,
    pub structure: Structure,
    pub trace: ChaseTrace,
}

impl Instance {
    pub fn saturated(&self) -> bool {
        self.trace.is_saturated()
    }
}

/// `n` instances chased with fuel 20. Candidates whose chase passes
/// [`MAX_CHASE`] elements at any fuel are redrawn, which keeps polynomial and
/// exponential towers out of the sample.
pub fn instances(n: usize, stream: u64, parallel: bool) -> Vec<Instance> {
    let mut rng = rng(stream);
    let mut out = Vec::new();
    while out.len() < n {
        let sig = random_signature(&mut rng);
        let theory = random_normal_theory(&mut rng, &sig);
        let structure = random_structure(&mut rng, &sig, 4, 0.25);
        let normal = normal_theory_of(&theory).expect("generated axioms are normal");
        if let Some(trace) = bounded_chase(&normal, &structure, 20, parallel) {
            out.push(Instance {
                theory,
                normal,
                structure,
                trace,
            });
        }
    }
    out
}

pub const MAX_CHASE: usize = 50;

/// The chase with `fuel`, or `None` if some prefix exceeds [`MAX_CHASE`].
pub fn bounded_chase(t: &NormalTheory, a: &Structure, fuel: usize, parallel: bool) -> Option<ChaseTrace> {
    for f in 0..=fuel {
        let mut opts = ChaseOptions::new(f);
        opts.parallel = parallel;
        let trace = chase(t, a, opts).unwrap();
        if trace.last().size() > MAX_CHASE {
            return None;
        }
        if trace.is_saturated() || f == fuel {
            return Some(trace);
        }
    }
    unreachable!()
}

type Facts = BTreeMap<String, BTreeSet<Vec<Elem>>>;

fn matches(facts: &Facts, size: usize, atoms: &[Atom], vars: &[String], env: &mut BTreeMap<String, Elem>, out: &mut Vec<BTreeMap<String, Elem>>) {
    let Some((first, rest)) = atoms.split_first() else {
        let open: Vec<&String> = vars.iter().filter(|v| !env.contains_key(*v)).collect();
        if let Some(v) = open.first() {
            for e in 0..size {
                env.insert((*v).clone(), e);
                matches(facts, size, atoms, vars, env, out);
                env.remove(*v);
            }
        } else {
            out.push(env.clone());
        }
        return;
    };
    let Atom::Rel(r, args) = first else { panic!("oracle is equality-free") };
    let Some(tuples) = facts.get(r) else { return };
    for t in tuples {
        let mut bound = Vec::new();
        let mut ok = true;
        for (arg, &e) in args.iter().zip(t) {
            let v = arg.as_var().expect("relational");
            match env.get(v) {
                Some(&x) if x != e => {
                    ok = false;
                    break;
                }
                Some(_) => {}
                None => {
                    env.insert(v.to_string(), e);
                    bound.push(v.to_string());
                }
            }
        }
        if ok {
            matches(facts, size, rest, vars, env, out);
        }
        for v in bound {
            env.remove(&v);
        }
    }
}

fn all_matches(facts: &Facts, size: usize, atoms: &[Atom], vars: &[String], env: &BTreeMap<String, Elem>) -> Vec<BTreeMap<String, Elem>> {
    let mut out = Vec::new();
    matches(facts, size, atoms, vars, &mut env.clone(), &mut out);
    out
}

fn ground(atom: &Atom, env: &BTreeMap<String, Elem>) -> (String, Vec<Elem>) {
    let Atom::Rel(r, args) = atom else { unreachable!() };
    (r.clone(), args.iter().map(|t| env[t.as_var().unwrap()]).collect())
}

/// Naive restricted chase: close under the Datalog axioms, then fire every
/// existential trigger whose consequent fails, all at once; repeat. `None`
/// after `rounds` existential rounds without a fixpoint.
pub fn naive_chase(t: &NormalTheory, a: &Structure, rounds: usize) -> Option<Structure> {
    let mut facts: Facts = BTreeMap::new();
    for (r, tuples) in a.rels() {
        facts.insert(r.clone(), tuples.clone());
    }
    let mut size = a.size();
    for _ in 0..=rounds {
        loop {
            let mut new = Vec::new();
            for ax in t.axioms.values().filter(|ax| ax.bound.is_empty()) {
                for env in all_matches(&facts, size, &ax.antecedent, ax.context.vars(), &BTreeMap::new()) {
                    for atom in &ax.matrix {
                        let (r, tuple) = ground(atom, &env);
                        if !facts.get(&r).is_some_and(|s| s.contains(&tuple)) {
                            new.push((r, tuple));
                        }
                    }
                }
            }
            if new.is_empty() {
                break;
            }
            for (r, tuple) in new {
                facts.entry(r).or_default().insert(tuple);
            }
        }
        let mut active = Vec::new();
        for ax in t.axioms.values().filter(|ax| !ax.bound.is_empty()) {
            for env in all_matches(&facts, size, &ax.antecedent, ax.context.vars(), &BTreeMap::new()) {
                let mut scope = ax.context.vars().to_vec();
                scope.extend(ax.bound.iter().cloned());
                if all_matches(&facts, size, &ax.matrix, &scope, &env).is_empty() {
                    active.push((ax, env));
                }
            }
        }
        if active.is_empty() {
            let mut s = Structure::new(a.signature.clone());
            s.extend_signature(&t.signature).unwrap();
            for i in 0..size {
                s.add_element(&format!("e{i}"));
            }
            for (r, tuples) in facts {
                for tuple in tuples {
                    s.add_tuple(&r, tuple);
                }
            }
            return Some(s);
        }
        for (ax, mut env) in active {
            for y in &ax.bound {
                env.insert(y.clone(), size);
                size += 1;
            }
            for atom in &ax.matrix {
                let (r, tuple) = ground(atom, &env);
                facts.entry(r).or_default().insert(tuple);
            }
        }
    }
    None
}

/// All tuples of length `k` over the first `n` elements.
pub fn tuples(n: usize, k: usize) -> Vec<Vec<Elem>> {
    let mut out = vec![Vec::new()];
    for _ in 0..k {
        out = out
            .into_iter()
            .flat_map(|t| {
                (0..n).map(move |e| {
                    let mut t = t.clone();
                    t.push(e);
                    t
                })
            })
            .collect();
    }
    out
}

pub type Assignment = BTreeMap<String, Elem>;

fn brute_term(a: &Structure, t: &Term, env: &Assignment) -> Elem {
    match t {
        Term::Var(v) => env[v],
        Term::App(f, args) => {
            let vals: Vec<Elem> = args.iter().map(|x| brute_term(a, x, env)).collect();
            a.fun_value(f, &vals).expect("total function")
        }
    }
}

/// Satisfaction by exhaustive search over the carrier.
pub fn brute_eval(a: &Structure, f: &Formula, env: &Assignment) -> bool {
    match f {
        Formula::Atom(Atom::Eq(l, r)) => brute_term(a, l, env) == brute_term(a, r, env),
        Formula::Atom(Atom::Rel(r, args)) => {
            let vals: Vec<Elem> = args.iter().map(|x| brute_term(a, x, env)).collect();
            a.holds(r, &vals)
        }
        Formula::And(parts) => parts.iter().all(|p| brute_eval(a, p, env)),
        Formula::Exists(vs, body) => tuples(a.size(), vs.len()).into_iter().any(|t| {
            let mut inner = env.clone();
            for (v, e) in vs.iter().zip(t) {
                inner.insert(v.clone(), e);
            }
            brute_eval(a, body, &inner)
        }),
    }
}

pub fn assignment(vars: &[String], tuple: &[Elem]) -> Assignment {
    vars.iter().cloned().zip(tuple.iter().copied()).collect()
}

/// A random structure with total function tables.
pub fn random_structure_with_functions(rng: &mut impl Rng, sig: &Signature, max_size: usize) -> Structure {
    let mut s = random_structure(rng, sig, max_size, 0.3);
    let n = s.size();
    for (f, &k) in &sig.funs {
        for args in tuples(n, k) {
            s.set_fun(f, args, rng.gen_range(0..n));
        }
    }
    s
}

/// `k` copies of every element, relations and functions copied across all
/// copies, and `e` relating copies of the same element.
pub fn inflate(a: &Structure, e: &str, k: usize) -> Structure {
    let mut sig = a.signature.clone();
    sig.rels.insert(e.to_string(), 2);
    let mut s = Structure::new(sig);
    for x in a.elements() {
        for j in 0..k {
            s.add_element(&format!("{}_{j}", a.name(x)));
        }
    }
    let copies = |x: Elem| (0..k).map(move |j| x * k + j);
    let spread = |t: &[Elem]| -> Vec<Vec<Elem>> {
        let mut out = vec![Vec::new()];
        for &x in t {
            out = out
                .into_iter()
                .flat_map(|p| {
                    copies(x).map(move |c| {
                        let mut p = p.clone();
                        p.push(c);
                        p
                    })
                })
                .collect();
        }
        out
    };
    for (r, ts) in a.rels() {
        for t in ts {
            for c in spread(t) {
                s.add_tuple(r, c);
            }
        }
    }
    for (f, table) in a.funs() {
        for (args, &v) in table {
            for c in spread(args) {
                s.set_fun(f, c, v * k);
            }
        }
    }
    for x in a.elements() {
        for i in copies(x) {
            for j in copies(x) {
                s.add_tuple(e, vec![i, j]);
            }
        }
    }
    s
}
