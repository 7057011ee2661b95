//! The free algebra with a formal linear function `F`, its standard form
//! modulo the four trace axioms, and evaluation in `M_n(𝔊)`.
//!
//! Normalization runs through a generic model: the free 𝔖-algebra with
//! 𝔖-trace on letters `x_i` of grade `{i}`. A multilinear monomial lands on
//! one basis key `path · F(c₁)⋯F(c_k)` (canonical cycles, sorted) times an
//! `exp` factor. For each key the standard-form terms landing on it are
//! enumerated, and the monomial is expressed in them by an exact solve.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use crate::coeff::{EpsMonomial, EpsPoly, PairSet};
use crate::error::AlgebraError;
use crate::grassmann::GrassElem;
use crate::hull::{mat_mul, mat_trace, Matrix};
use crate::linalg::solve_left;
use crate::scalar::{BaseRing, Scalar};

/// A factor of a trace monomial.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Atom {
    Letter(u32),
    Trace(Term),
}

/// A product of atoms; the empty product is `1`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Term(pub Vec<Atom>);

impl Term {
    pub fn letters(&self) -> Vec<u32> {
        let mut out = Vec::new();
        for a in &self.0 {
            match a {
                Atom::Letter(i) => out.push(*i),
                Atom::Trace(t) => out.extend(t.letters()),
            }
        }
        out
    }

    pub fn render(&self) -> String {
        if self.0.is_empty() {
            return "1".to_string();
        }
        self.0
            .iter()
            .map(|a| match a {
                Atom::Letter(i) => format!("x{i}"),
                Atom::Trace(t) => format!("Tr({})", t.render()),
            })
            .collect::<Vec<_>>()
            .join("*")
    }
}

/// A `C`-linear combination of trace monomials.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TracePoly {
    ring: BaseRing,
    terms: BTreeMap<Term, Scalar>,
}

impl TracePoly {
    pub fn zero(ring: BaseRing) -> Self {
        TracePoly {
            ring,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(ring: BaseRing, c: Scalar) -> Self {
        let mut p = TracePoly::zero(ring);
        p.add_term(Term::default(), c);
        p
    }

    pub fn letter(ring: BaseRing, i: u32) -> Self {
        let mut p = TracePoly::zero(ring);
        p.add_term(Term(vec![Atom::Letter(i)]), ring.one());
        p
    }

    pub fn from_terms(ring: BaseRing, terms: impl IntoIterator<Item = (Term, Scalar)>) -> Self {
        let mut p = TracePoly::zero(ring);
        for (t, c) in terms {
            p.add_term(t, c);
        }
        p
    }

    pub fn ring(&self) -> BaseRing {
        self.ring
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Term, &Scalar)> {
        self.terms.iter()
    }

    fn add_term(&mut self, t: Term, c: Scalar) {
        let e = self.terms.entry(t.clone()).or_insert_with(|| self.ring.zero());
        *e = self.ring.add(e, &c);
        if self.ring.is_zero(e) {
            self.terms.remove(&t);
        }
    }

    pub fn add(&self, other: &TracePoly) -> TracePoly {
        let mut out = self.clone();
        for (t, c) in &other.terms {
            out.add_term(t.clone(), c.clone());
        }
        out
    }

    pub fn scale(&self, c: &Scalar) -> TracePoly {
        let mut out = TracePoly::zero(self.ring);
        for (t, v) in &self.terms {
            out.add_term(t.clone(), self.ring.mul(v, c));
        }
        out
    }

    pub fn neg(&self) -> TracePoly {
        self.scale(&self.ring.from_i64(-1))
    }

    pub fn sub(&self, other: &TracePoly) -> TracePoly {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &TracePoly) -> TracePoly {
        let mut out = TracePoly::zero(self.ring);
        for (a, ca) in &self.terms {
            for (b, cb) in &other.terms {
                let mut t = a.0.clone();
                t.extend(b.0.iter().cloned());
                out.add_term(Term(t), self.ring.mul(ca, cb));
            }
        }
        out
    }

    pub fn commutator(&self, other: &TracePoly) -> TracePoly {
        self.mul(other).sub(&other.mul(self))
    }

    /// `F` applied linearly.
    pub fn trace(&self) -> TracePoly {
        let mut out = TracePoly::zero(self.ring);
        for (t, c) in &self.terms {
            out.add_term(Term(vec![Atom::Trace(t.clone())]), c.clone());
        }
        out
    }

    /// Substitutes `x_i ↦ subs[i-1]` (letters beyond the list stay fixed).
    pub fn substitute(&self, subs: &[TracePoly]) -> TracePoly {
        let mut out = TracePoly::zero(self.ring);
        for (t, c) in &self.terms {
            out = out.add(&substitute_term(self.ring, t, subs).scale(c));
        }
        out
    }

    pub fn num_letters(&self) -> u32 {
        self.terms
            .keys()
            .flat_map(|t| t.letters())
            .max()
            .unwrap_or(0)
    }

    /// Each monomial uses each of its letters once and is not constant.
    pub fn check_multilinear(&self) -> Result<(), AlgebraError> {
        for t in self.terms.keys() {
            let letters = t.letters();
            if letters.is_empty() {
                return Err(AlgebraError::NotMultilinear(format!("constant term {}", t.render())));
            }
            let set: BTreeSet<u32> = letters.iter().copied().collect();
            if set.len() != letters.len() {
                return Err(AlgebraError::NotMultilinear(format!(
                    "repeated letter in {}",
                    t.render()
                )));
            }
        }
        Ok(())
    }

    pub fn render(&self) -> String {
        let ring = self.ring;
        let mut s = String::new();
        for (k, (t, c)) in self.terms.iter().enumerate() {
            let neg = ring.is_negative(c);
            let abs = if neg { ring.neg(c) } else { c.clone() };
            if k == 0 {
                if neg {
                    s.push('-');
                }
            } else {
                s.push_str(if neg { " - " } else { " + " });
            }
            let body = t.render();
            if ring.is_one(&abs) {
                s.push_str(&body);
            } else if t.0.is_empty() {
                s.push_str(&ring.render(&abs));
            } else {
                s.push_str(&format!("{}*{body}", ring.render(&abs)));
            }
        }
        if s.is_empty() {
            "0".to_string()
        } else {
            s
        }
    }
}

impl fmt::Display for TracePoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

fn substitute_term(ring: BaseRing, t: &Term, subs: &[TracePoly]) -> TracePoly {
    let mut acc = TracePoly::constant(ring, ring.one());
    for a in &t.0 {
        let f = match a {
            Atom::Letter(i) => subs
                .get(*i as usize - 1)
                .cloned()
                .unwrap_or_else(|| TracePoly::letter(ring, *i)),
            Atom::Trace(inner) => substitute_term(ring, inner, subs).trace(),
        };
        acc = acc.mul(&f);
    }
    acc
}

/// The four defining trace identities.
pub fn axiom_polys(ring: BaseRing) -> Vec<(&'static str, TracePoly)> {
    let x = |i| TracePoly::letter(ring, i);
    let f = |p: &TracePoly| p.trace();
    vec![
        ("Tr(Tr(x1)*x2) - Tr(x1)*Tr(x2)", f(&f(&x(1)).mul(&x(2))).sub(&f(&x(1)).mul(&f(&x(2))))),
        ("Tr(x1*Tr(x2)) - Tr(x1)*Tr(x2)", f(&x(1).mul(&f(&x(2)))).sub(&f(&x(1)).mul(&f(&x(2))))),
        ("[x1,Tr([x2,x3])]", x(1).commutator(&f(&x(2).commutator(&x(3))))),
        ("[Tr(x1),[Tr(x2),x3]]", f(&x(1)).commutator(&f(&x(2)).commutator(&x(3)))),
    ]
}

/// Three consequences of the axioms used by the normalizer.
pub fn derived_consequences(ring: BaseRing) -> Vec<(&'static str, TracePoly)> {
    let x = |i| TracePoly::letter(ring, i);
    let f = |i| TracePoly::letter(ring, i).trace();
    vec![
        ("[x1,[Tr(x2),Tr(x3)]]", x(1).commutator(&f(2).commutator(&f(3)))),
        (
            "[x1,Tr(x2)]*[Tr(x3),Tr(x4)] + [x1,Tr(x3)]*[Tr(x2),Tr(x4)]",
            x(1).commutator(&f(2))
                .mul(&f(3).commutator(&f(4)))
                .add(&x(1).commutator(&f(3)).mul(&f(2).commutator(&f(4)))),
        ),
        (
            "[Tr(x1),x2]*[Tr(x3),Tr(x4)] + [Tr(x1),Tr(x3)]*[x2,Tr(x4)]",
            f(1).commutator(&x(2))
                .mul(&f(3).commutator(&f(4)))
                .add(&f(1).commutator(&f(3)).mul(&x(2).commutator(&f(4)))),
        ),
    ]
}

/// The two cyclic equalities for `s = x₁⋯x_n` and `t = x_{n+1}⋯x_{n+m}`,
/// as differences that vanish in the free algebra.
pub fn cyclic_equalities(ring: BaseRing, n: u32, m: u32) -> [TracePoly; 2] {
    let s: Vec<u32> = (1..=n).collect();
    let t: Vec<u32> = (n + 1..=n + m).collect();
    let word = |w: &[u32]| word_poly(ring, w);
    let mut with_t = word(&s).commutator(&word(&t));
    let mut plain = TracePoly::zero(ring);
    for k in 0..s.len() {
        let mut tail = s[k + 1..].to_vec();
        let mut rot = tail.clone();
        rot.extend_from_slice(&s[..k]);
        tail.extend_from_slice(&t);
        tail.extend_from_slice(&s[..k]);
        with_t = with_t.sub(&word(&[s[k]]).commutator(&word(&tail)));
        plain = plain.add(&word(&[s[k]]).commutator(&word(&rot)));
    }
    [with_t, plain]
}

/// Basis key of the model: `path · F(c₁)⋯F(c_k)` with each cycle rotated
/// to start at its least letter and the cycles sorted.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ModelKey {
    pub path: Vec<u32>,
    pub cycles: Vec<Vec<u32>>,
}

impl ModelKey {
    pub fn letter_count(&self) -> usize {
        self.path.len() + self.cycles.iter().map(|c| c.len()).sum::<usize>()
    }

    /// The monomial `path·F(c₁)⋯F(c_k)`.
    pub fn render(&self) -> String {
        let mut atoms: Vec<Atom> = self.path.iter().map(|&i| Atom::Letter(i)).collect();
        atoms.extend(
            self.cycles
                .iter()
                .map(|c| Atom::Trace(Term(c.iter().map(|&i| Atom::Letter(i)).collect()))),
        );
        Term(atoms).render()
    }
}

struct Flat {
    path: Vec<u32>,
    traces: Vec<Vec<u32>>,
    pairs: PairSet,
}

fn rotate_min(word: &[u32], pairs: &mut PairSet) -> Vec<u32> {
    let k = (0..word.len()).min_by_key(|&i| word[i]).unwrap_or(0);
    // F(ab) = exp(ε_aε_b) F(ba)
    pairs.add_product(&word[..k], &word[k..]);
    let mut out = word[k..].to_vec();
    out.extend_from_slice(&word[..k]);
    out
}

fn flatten(t: &Term) -> Result<Flat, AlgebraError> {
    let mut st = Flat {
        path: Vec::new(),
        traces: Vec::new(),
        pairs: PairSet::new(),
    };
    for a in &t.0 {
        match a {
            Atom::Letter(i) => {
                for tr in &st.traces {
                    st.pairs.add_product(tr, &[*i]);
                }
                st.path.push(*i);
            }
            Atom::Trace(inner) => {
                let sub = flatten(inner)?;
                if sub.path.is_empty() {
                    return Err(AlgebraError::PureTraceArgument(format!("Tr({})", inner.render())));
                }
                st.pairs.merge(&sub.pairs);
                let cyc = rotate_min(&sub.path, &mut st.pairs);
                st.traces.push(cyc);
                st.traces.extend(sub.traces);
            }
        }
    }
    Ok(st)
}

/// Model image of one monomial: its key and the `exp` factor.
pub fn model_monomial(t: &Term) -> Result<(ModelKey, PairSet), AlgebraError> {
    let mut st = flatten(t)?;
    let tr = &st.traces;
    for i in 0..tr.len() {
        for j in (i + 1)..tr.len() {
            if tr[i] > tr[j] {
                st.pairs.add_product(&tr[i], &tr[j]);
            }
        }
    }
    let mut cycles = st.traces;
    cycles.sort();
    Ok((
        ModelKey {
            path: st.path,
            cycles,
        },
        st.pairs,
    ))
}

/// Image of `f` in the model, as `key ↦ C[ε]` coefficient.
pub fn model_image(f: &TracePoly) -> Result<BTreeMap<ModelKey, EpsPoly>, AlgebraError> {
    let ring = f.ring;
    let mut out: BTreeMap<ModelKey, EpsPoly> = BTreeMap::new();
    for (t, c) in &f.terms {
        let (k, pairs) = model_monomial(t)?;
        let v = pairs.exp(ring).scale(c);
        let e = out.entry(k.clone()).or_insert_with(|| EpsPoly::zero(ring));
        *e = &*e + &v;
        if e.is_zero() {
            out.remove(&k);
        }
    }
    Ok(out)
}

/// A term of the standard form:
/// `w · F(v₁)⋯ · [w₁,F(u₁)]⋯ · [F(u),F(u')]⋯ · F[s₁,t₁]⋯`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct StdTerm {
    pub w: Vec<u32>,
    pub v: Vec<Vec<u32>>,
    pub mixed: Vec<(Vec<u32>, Vec<u32>)>,
    pub paired: Vec<(Vec<u32>, Vec<u32>)>,
    pub comm: Vec<(u32, Vec<u32>)>,
}

impl StdTerm {
    fn commutator_count(&self) -> usize {
        self.mixed.len() + self.paired.len() + self.comm.len()
    }
}

impl Ord for StdTerm {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.commutator_count(), &self.w, &self.v, &self.mixed, &self.paired, &self.comm).cmp(&(
            other.commutator_count(),
            &other.w,
            &other.v,
            &other.mixed,
            &other.paired,
            &other.comm,
        ))
    }
}

impl PartialOrd for StdTerm {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

fn word_poly(ring: BaseRing, w: &[u32]) -> TracePoly {
    w.iter().fold(TracePoly::constant(ring, ring.one()), |acc, &i| {
        acc.mul(&TracePoly::letter(ring, i))
    })
}

fn render_word(w: &[u32]) -> String {
    w.iter().map(|i| format!("x{i}")).collect::<Vec<_>>().join("*")
}

fn is_cyclically_minimal(w: &[u32]) -> bool {
    (1..w.len()).all(|k| {
        let mut r = w[k..].to_vec();
        r.extend_from_slice(&w[..k]);
        w <= &r[..]
    })
}

impl StdTerm {
    pub fn to_trace_poly(&self, ring: BaseRing) -> TracePoly {
        let mut p = word_poly(ring, &self.w);
        for v in &self.v {
            p = p.mul(&word_poly(ring, v).trace());
        }
        for (w, u) in &self.mixed {
            p = p.mul(&word_poly(ring, w).commutator(&word_poly(ring, u).trace()));
        }
        for (a, b) in &self.paired {
            p = p.mul(&word_poly(ring, a).trace().commutator(&word_poly(ring, b).trace()));
        }
        for (s, t) in &self.comm {
            p = p.mul(&TracePoly::letter(ring, *s).commutator(&word_poly(ring, t)).trace());
        }
        p
    }

    pub fn render(&self) -> String {
        let mut parts = Vec::new();
        if !self.w.is_empty() {
            parts.push(render_word(&self.w));
        }
        parts.extend(self.v.iter().map(|v| format!("Tr({})", render_word(v))));
        parts.extend(
            self.mixed
                .iter()
                .map(|(w, u)| format!("[{},Tr({})]", render_word(w), render_word(u))),
        );
        parts.extend(
            self.paired
                .iter()
                .map(|(a, b)| format!("[Tr({}),Tr({})]", render_word(a), render_word(b))),
        );
        parts.extend(
            self.comm
                .iter()
                .map(|(s, t)| format!("Tr([x{s},{}])", render_word(t))),
        );
        parts.join("*")
    }

    /// Checks the ordering and minimality constraints of the standard form.
    pub fn conformance(&self) -> Result<(), String> {
        if self.mixed.iter().any(|(w, _)| w.is_empty()) {
            return Err("empty mixed word".into());
        }
        if !self.v.windows(2).all(|p| p[0] < p[1]) {
            return Err("trace words not sorted".into());
        }
        let us: Vec<&Vec<u32>> = self
            .mixed
            .iter()
            .map(|(_, u)| u)
            .chain(self.paired.iter().flat_map(|(a, b)| [a, b]))
            .collect();
        if !us.windows(2).all(|p| p[0] < p[1]) {
            return Err("commutator trace words not sorted".into());
        }
        for w in self.v.iter().chain(us.iter().copied()) {
            if w.is_empty() || !is_cyclically_minimal(w) {
                return Err(format!("{} is not cyclically minimal", render_word(w)));
            }
        }
        if !self.comm.windows(2).all(|p| p[0] < p[1]) {
            return Err("trace commutator pairs not sorted".into());
        }
        for (s, t) in &self.comm {
            if !t.iter().any(|x| x > s) {
                return Err(format!("x{s} is not smaller than a letter of {}", render_word(t)));
            }
        }
        let mut letters: Vec<u32> = self.w.clone();
        letters.extend(self.v.iter().flatten());
        for (w, u) in &self.mixed {
            letters.extend(w);
            letters.extend(u);
        }
        for (a, b) in &self.paired {
            letters.extend(a);
            letters.extend(b);
        }
        for (s, t) in &self.comm {
            letters.push(*s);
            letters.extend(t);
        }
        let set: BTreeSet<u32> = letters.iter().copied().collect();
        if set.len() != letters.len() || letters.is_empty() {
            return Err("term is not multilinear".into());
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Role {
    Pure,
    Commutator,
    TraceOfCommutator(usize),
}

/// All standard-form terms whose model image lies on `key`.
pub fn standard_terms(key: &ModelKey) -> Vec<StdTerm> {
    let k = key.cycles.len();
    let options: Vec<Vec<Role>> = key
        .cycles
        .iter()
        .map(|c| {
            let mut o = vec![Role::Pure, Role::Commutator];
            let max = *c.iter().max().expect("nonempty cycle");
            o.extend((0..c.len()).filter(|&r| c[r] != max).map(Role::TraceOfCommutator));
            o
        })
        .collect();
    let mut out = Vec::new();
    let mut choice = vec![0usize; k];
    loop {
        let roles: Vec<Role> = (0..k).map(|i| options[i][choice[i]]).collect();
        emit_terms(key, &roles, &mut out);
        let mut i = 0;
        while i < k {
            choice[i] += 1;
            if choice[i] < options[i].len() {
                break;
            }
            choice[i] = 0;
            i += 1;
        }
        if i == k {
            break;
        }
    }
    out.sort();
    out
}

fn emit_terms(key: &ModelKey, roles: &[Role], out: &mut Vec<StdTerm>) {
    let mut v = Vec::new();
    let mut u = Vec::new();
    let mut comm = Vec::new();
    for (c, r) in key.cycles.iter().zip(roles) {
        match r {
            Role::Pure => v.push(c.clone()),
            Role::Commutator => u.push(c.clone()),
            Role::TraceOfCommutator(r) => {
                let mut t = c[r + 1..].to_vec();
                t.extend_from_slice(&c[..*r]);
                comm.push((c[*r], t));
            }
        }
    }
    comm.sort();
    let l = key.path.len();
    for m in 0..=u.len().min(l) {
        if (u.len() - m) % 2 == 1 {
            continue;
        }
        let paired: Vec<(Vec<u32>, Vec<u32>)> = u[m..]
            .chunks(2)
            .map(|p| (p[0].clone(), p[1].clone()))
            .collect();
        let starts: Vec<usize> = if m == 0 { vec![l] } else { (0..=l - m).collect() };
        for a in starts {
            for cuts in compositions(l - a, m) {
                let mut mixed = Vec::with_capacity(m);
                let mut pos = a;
                for (seg, ui) in cuts.iter().zip(&u[..m]) {
                    mixed.push((key.path[pos..pos + seg].to_vec(), ui.clone()));
                    pos += seg;
                }
                out.push(StdTerm {
                    w: key.path[..a].to_vec(),
                    v: v.clone(),
                    mixed,
                    paired: paired.clone(),
                    comm: comm.clone(),
                });
            }
        }
    }
}

/// Ordered ways to write `total` as `parts` positive summands.
fn compositions(total: usize, parts: usize) -> Vec<Vec<usize>> {
    if parts == 0 {
        return if total == 0 { vec![vec![]] } else { vec![] };
    }
    let mut out = Vec::new();
    for first in 1..=total.saturating_sub(parts - 1) {
        for mut rest in compositions(total - first, parts - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// Every monomial landing on `key`: each cycle is nested in the path or
/// in another cycle at any slot between letters, in any rotation.
pub fn key_monomials(key: &ModelKey) -> Vec<Term> {
    key_monomials_to_depth(key, usize::MAX)
}

/// As [`key_monomials`], with at most `depth` levels of trace nesting.
pub fn key_monomials_to_depth(key: &ModelKey, depth: usize) -> Vec<Term> {
    let k = key.cycles.len();
    let mut out = BTreeSet::new();
    let mut parent = vec![0usize; k];
    loop {
        if parents_acyclic(&parent) && nesting_depth(&parent) <= depth {
            let mut children: Vec<Vec<usize>> = vec![Vec::new(); k + 1];
            for (c, &p) in parent.iter().enumerate() {
                children[p].push(c + 1);
            }
            let mut rot = vec![0usize; k];
            loop {
                let seqs: Vec<Vec<u32>> = std::iter::once(key.path.clone())
                    .chain(key.cycles.iter().zip(&rot).map(|(c, &r)| {
                        let mut v = c[r..].to_vec();
                        v.extend_from_slice(&c[..r]);
                        v
                    }))
                    .collect();
                for t in arrangements(0, &seqs, &children) {
                    out.insert(t);
                }
                if !odometer(&mut rot, |i| key.cycles[i].len()) {
                    break;
                }
            }
        }
        if !odometer(&mut parent, |_| k + 1) {
            break;
        }
    }
    out.into_iter().collect()
}

fn odometer(digits: &mut [usize], base: impl Fn(usize) -> usize) -> bool {
    for i in 0..digits.len() {
        digits[i] += 1;
        if digits[i] < base(i) {
            return true;
        }
        digits[i] = 0;
    }
    false
}

// parent[c] is the node holding cycle c+1; node 0 is the path.
fn parents_acyclic(parent: &[usize]) -> bool {
    (0..parent.len()).all(|c| {
        let mut node = c + 1;
        for _ in 0..=parent.len() {
            if node == 0 {
                return true;
            }
            node = parent[node - 1];
            if node == c + 1 {
                return false;
            }
        }
        false
    })
}

fn nesting_depth(parent: &[usize]) -> usize {
    (0..parent.len())
        .map(|c| {
            let (mut node, mut d) = (parent[c], 1);
            while node != 0 {
                node = parent[node - 1];
                d += 1;
            }
            d
        })
        .max()
        .unwrap_or(0)
}

fn arrangements(node: usize, seqs: &[Vec<u32>], children: &[Vec<usize>]) -> Vec<Term> {
    let kids: Vec<Vec<Term>> = children[node]
        .iter()
        .map(|&c| arrangements(c, seqs, children))
        .collect();
    let letters: Vec<Atom> = seqs[node].iter().map(|&i| Atom::Letter(i)).collect();
    let mut out = vec![letters];
    for options in kids {
        let mut next = Vec::new();
        for base in &out {
            for t in &options {
                for pos in 0..=base.len() {
                    let mut v = base.clone();
                    v.insert(pos, Atom::Trace(t.clone()));
                    next.push(v);
                }
            }
        }
        out = next;
    }
    out.into_iter().map(Term).collect()
}

/// A basis element of the extended standard form: a term of the shape
/// used by the classical argument, or a canonical monomial with a trace
/// nested strictly inside another trace.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BasisTerm {
    Standard(StdTerm),
    Nested(Term),
}

impl BasisTerm {
    pub fn to_trace_poly(&self, ring: BaseRing) -> TracePoly {
        match self {
            BasisTerm::Standard(t) => t.to_trace_poly(ring),
            BasisTerm::Nested(t) => TracePoly::from_terms(ring, [(t.clone(), ring.one())]),
        }
    }

    pub fn render(&self) -> String {
        match self {
            BasisTerm::Standard(t) => t.render(),
            BasisTerm::Nested(t) => t.render(),
        }
    }

    pub fn conformance(&self) -> Result<(), String> {
        match self {
            BasisTerm::Standard(t) => t.conformance(),
            BasisTerm::Nested(t) => {
                let (key, _) = model_monomial(t).map_err(|e| e.to_string())?;
                if canonical_monomial(&key, &t.letters()).as_ref() != Some(t) {
                    return Err(format!("{} is not a canonical monomial", t.render()));
                }
                if !has_nested_trace(t) {
                    return Err(format!("{} has no nested trace", t.render()));
                }
                Ok(())
            }
        }
    }
}

fn has_nested_trace(t: &Term) -> bool {
    t.0.iter().any(|a| match a {
        Atom::Trace(inner) => inner.0.iter().any(|b| matches!(b, Atom::Trace(_))),
        Atom::Letter(_) => false,
    })
}

/// Owner of each letter of `key`: `None` for the path, `Some(c)` for cycle `c`.
fn owners(key: &ModelKey) -> HashMap<u32, Option<usize>> {
    let mut own: HashMap<u32, Option<usize>> = key.path.iter().map(|&x| (x, None)).collect();
    for (c, cyc) in key.cycles.iter().enumerate() {
        own.extend(cyc.iter().map(|&x| (x, Some(c))));
    }
    own
}

/// The monomial of `key` read as `seq`, if `seq` is a reading order of one:
/// path letters in order, each cycle read as a rotation, trace spans
/// laminar and free of path letters. Traces nest only strictly inside
/// another trace, never at its ends.
pub fn canonical_monomial(key: &ModelKey, seq: &[u32]) -> Option<Term> {
    let own = owners(key);
    if seq.len() != own.len() || seq.iter().any(|x| !own.contains_key(x)) {
        return None;
    }
    let pos: HashMap<u32, usize> = seq.iter().enumerate().map(|(i, &x)| (x, i)).collect();
    let path_order: Vec<usize> = key.path.iter().map(|x| pos[x]).collect();
    if !path_order.windows(2).all(|w| w[0] < w[1]) {
        return None;
    }
    let mut spans = Vec::with_capacity(key.cycles.len());
    for cyc in &key.cycles {
        let mut read: Vec<u32> = seq.iter().copied().filter(|x| cyc.contains(x)).collect();
        let r = read.iter().position(|x| *x == cyc[0])?;
        read.rotate_left(r);
        if &read != cyc {
            return None;
        }
        let ps: Vec<usize> = cyc.iter().map(|x| pos[x]).collect();
        spans.push((*ps.iter().min()?, *ps.iter().max()?));
    }
    for (c, &(lo, hi)) in spans.iter().enumerate() {
        for p in lo..=hi {
            match own[&seq[p]] {
                None => return None,
                Some(d) if d != c => {
                    let (dlo, dhi) = spans[d];
                    let inside = lo < dlo && dhi < hi;
                    let around = dlo < lo && hi < dhi;
                    if !inside && !around {
                        return None;
                    }
                }
                _ => {}
            }
        }
    }
    let mut i = 0;
    Some(Term(read_level(seq, &own, &spans, None, &mut i, seq.len())))
}

fn read_level(
    seq: &[u32],
    own: &HashMap<u32, Option<usize>>,
    spans: &[(usize, usize)],
    owner: Option<usize>,
    i: &mut usize,
    end: usize,
) -> Vec<Atom> {
    let mut atoms = Vec::new();
    while *i < end {
        let x = seq[*i];
        let o = own[&x];
        if o == owner {
            atoms.push(Atom::Letter(x));
            *i += 1;
        } else {
            let c = o.expect("path letters sit at the top level");
            let stop = spans[c].1 + 1;
            atoms.push(Atom::Trace(Term(read_level(seq, own, spans, Some(c), i, stop))));
        }
    }
    atoms
}

/// Reading orders of the monomials of `key`, in lexicographic order.
pub fn reading_orders(key: &ModelKey) -> Vec<Vec<u32>> {
    let mut letters: Vec<u32> = key.path.clone();
    letters.extend(key.cycles.iter().flatten());
    letters.sort_unstable();
    let mut out = Vec::new();
    let mut seq = Vec::with_capacity(letters.len());
    let mut used = vec![false; letters.len()];
    extend_orders(key, &letters, &mut used, &mut seq, &mut out);
    out
}

fn extend_orders(key: &ModelKey, letters: &[u32], used: &mut [bool], seq: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
    if seq.len() == letters.len() {
        if canonical_monomial(key, seq).is_some() {
            out.push(seq.clone());
        }
        return;
    }
    for k in 0..letters.len() {
        if used[k] || !prefix_ok(key, seq, letters[k]) {
            continue;
        }
        used[k] = true;
        seq.push(letters[k]);
        extend_orders(key, letters, used, seq, out);
        seq.pop();
        used[k] = false;
    }
}

// Cheap pruning: path letters in order and each cycle's letters following
// its cyclic order.
fn prefix_ok(key: &ModelKey, seq: &[u32], x: u32) -> bool {
    if let Some(k) = key.path.iter().position(|&p| p == x) {
        return k == 0 || seq.last().is_some_and(|_| seq.contains(&key.path[k - 1]));
    }
    for cyc in &key.cycles {
        if let Some(k) = cyc.iter().position(|&c| c == x) {
            let prev = seq.iter().rev().find(|y| cyc.contains(y));
            return match prev {
                None => true,
                Some(&y) => cyc[(k + cyc.len() - 1) % cyc.len()] == y,
            };
        }
    }
    false
}

/// Letters beyond which the nested completion is not attempted.
pub const MAX_NESTED_LETTERS: usize = 9;

/// Integer coordinates of model images in the basis of one key.
struct KeySystem {
    terms: Vec<BasisTerm>,
    rows: Vec<Vec<BigRational>>,
    columns: HashMap<EpsMonomial, usize>,
}

fn needs_nesting(key: &ModelKey) -> bool {
    key.cycles.len() >= 2 && key.cycles.iter().any(|c| c.len() >= 2)
}

impl KeySystem {
    fn new(key: &ModelKey) -> Result<Self, AlgebraError> {
        let mut terms: Vec<BasisTerm> = standard_terms(key).into_iter().map(BasisTerm::Standard).collect();
        let mut images: Vec<EpsPoly> = terms
            .iter()
            .map(|t| {
                let img = model_image(&t.to_trace_poly(BaseRing::Integers))?;
                match img.get(key) {
                    Some(c) if img.len() == 1 => Ok(c.clone()),
                    _ => Err(AlgebraError::Internal(format!("basis term {} leaves its key", t.render()))),
                }
            })
            .collect::<Result<_, _>>()?;
        let mut candidates = Vec::new();
        if needs_nesting(key) {
            if key.letter_count() > MAX_NESTED_LETTERS {
                return Err(AlgebraError::ArityTooLarge(key.letter_count(), MAX_NESTED_LETTERS));
            }
            for seq in reading_orders(key) {
                let t = canonical_monomial(key, &seq).expect("valid order");
                if has_nested_trace(&t) {
                    let (_, pairs) = model_monomial(&t)?;
                    candidates.push((t, pairs.exp(BaseRing::Integers)));
                }
            }
        }
        let mut columns = HashMap::new();
        for img in images.iter().chain(candidates.iter().map(|(_, e)| e)) {
            for (m, _) in img.terms() {
                let next = columns.len();
                columns.entry(m.clone()).or_insert(next);
            }
        }
        let int_row = |p: &EpsPoly| -> Vec<i64> {
            let mut v = vec![0i64; columns.len()];
            for (m, c) in p.terms() {
                let z = p.ring().to_bigint(c).expect("integer coefficients");
                v[columns[m]] = i64::try_from(z).expect("small coefficients");
            }
            v
        };
        let mut echelon = crate::linalg::IntEchelon::new(columns.len());
        for img in &images {
            echelon.insert(&int_row(img));
        }
        for (t, e) in candidates {
            if echelon.insert(&int_row(&e)) {
                terms.push(BasisTerm::Nested(t));
                images.push(e);
            }
        }
        let rows = images.iter().map(|img| Self::coords(&columns, img)).collect::<Option<_>>();
        let rows = rows.ok_or_else(|| AlgebraError::Internal("column map".into()))?;
        Ok(KeySystem { terms, rows, columns })
    }

    fn coords(columns: &HashMap<EpsMonomial, usize>, p: &EpsPoly) -> Option<Vec<BigRational>> {
        let mut v = vec![BigRational::zero(); columns.len()];
        for (m, c) in p.terms() {
            let x = p.ring().to_rational(c);
            v[*columns.get(m)?] = x;
        }
        Some(v)
    }

    /// Integer `z` with `Σ z_T e_T = exp(pairs)`.
    fn solve(&self, pairs: &PairSet) -> Result<Vec<BigInt>, AlgebraError> {
        let target = pairs.exp(BaseRing::Integers);
        let outside = || AlgebraError::Internal(format!("{target} outside the basis span"));
        let y = Self::coords(&self.columns, &target).ok_or_else(outside)?;
        let (x, unique) = solve_left(&self.rows, &y).ok_or_else(outside)?;
        if !unique {
            return Err(AlgebraError::Internal("basis terms are dependent".into()));
        }
        x.into_iter()
            .map(|q| {
                if q.is_integer() {
                    Ok(q.to_integer())
                } else {
                    Err(AlgebraError::Internal(format!("non-integral coordinate {q}")))
                }
            })
            .collect()
    }
}

/// Number of classical standard terms on `key` and the rank of their
/// model images.
pub fn key_rank(key: &ModelKey) -> Result<(usize, usize), AlgebraError> {
    let terms = standard_terms(key);
    let images: Vec<EpsPoly> = terms
        .iter()
        .map(|t| {
            model_image(&t.to_trace_poly(BaseRing::Integers)).map(|m| m.get(key).cloned().unwrap_or_else(|| EpsPoly::zero(BaseRing::Integers)))
        })
        .collect::<Result<_, _>>()?;
    let rows: Vec<Vec<i64>> = {
        let mut columns: HashMap<EpsMonomial, usize> = HashMap::new();
        for img in &images {
            for (m, _) in img.terms() {
                let next = columns.len();
                columns.entry(m.clone()).or_insert(next);
            }
        }
        images
            .iter()
            .map(|p| {
                let mut v = vec![0i64; columns.len()];
                for (m, c) in p.terms() {
                    v[columns[m]] = i64::try_from(p.ring().to_bigint(c).expect("integer")).expect("small");
                }
                v
            })
            .collect()
    };
    let width = rows.first().map_or(0, |r| r.len());
    Ok((terms.len(), crate::linalg::rank_rational(&rows, width)))
}

/// The full basis of one key: classical terms followed by nested monomials.
pub fn key_basis(key: &ModelKey) -> Result<Vec<BasisTerm>, AlgebraError> {
    Ok(KeySystem::new(key)?.terms)
}

/// Coordinates of one monomial of `key` in [`key_basis`].
pub fn key_coordinates(key: &ModelKey, t: &Term) -> Result<Vec<BigInt>, AlgebraError> {
    let (k, pairs) = model_monomial(t)?;
    if &k != key {
        return Err(AlgebraError::Internal(format!("{} is not on the given key", t.render())));
    }
    KeySystem::new(key)?.solve(&pairs)
}

/// A linear combination of basis terms.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StandardForm {
    ring: BaseRing,
    terms: BTreeMap<BasisTerm, Scalar>,
}

impl StandardForm {
    pub fn ring(&self) -> BaseRing {
        self.ring
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&BasisTerm, &Scalar)> {
        self.terms.iter()
    }

    pub fn to_trace_poly(&self) -> TracePoly {
        let mut p = TracePoly::zero(self.ring);
        for (t, c) in &self.terms {
            p = p.add(&t.to_trace_poly(self.ring).scale(c));
        }
        p
    }

    pub fn conformance(&self) -> Result<(), String> {
        self.terms.keys().try_for_each(|t| t.conformance())
    }

    pub fn render(&self) -> String {
        let ring = self.ring;
        let mut s = String::new();
        for (k, (t, c)) in self.terms.iter().enumerate() {
            let neg = ring.is_negative(c);
            let abs = if neg { ring.neg(c) } else { c.clone() };
            if k == 0 {
                if neg {
                    s.push('-');
                }
            } else {
                s.push_str(if neg { " - " } else { " + " });
            }
            if ring.is_one(&abs) {
                s.push_str(&t.render());
            } else {
                s.push_str(&format!("{}*{}", ring.render(&abs), t.render()));
            }
        }
        if s.is_empty() {
            "0".to_string()
        } else {
            s
        }
    }
}

impl fmt::Display for StandardForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

/// Rewrites a multilinear `f` into the extended standard form.
pub fn trace_normalize(f: &TracePoly) -> Result<StandardForm, AlgebraError> {
    f.check_multilinear()?;
    let ring = f.ring;
    let mut systems: HashMap<ModelKey, KeySystem> = HashMap::new();
    let mut out = StandardForm {
        ring,
        terms: BTreeMap::new(),
    };
    for (t, c) in &f.terms {
        let (key, pairs) = model_monomial(t)?;
        if !systems.contains_key(&key) {
            systems.insert(key.clone(), KeySystem::new(&key)?);
        }
        let sys = &systems[&key];
        let z = sys.solve(&pairs)?;
        for (term, zi) in sys.terms.iter().zip(z) {
            if zi.is_zero() {
                continue;
            }
            let v = ring.mul(c, &ring.from_bigint(&zi));
            let e = out.terms.entry(term.clone()).or_insert_with(|| ring.zero());
            *e = ring.add(e, &v);
            if ring.is_zero(e) {
                out.terms.remove(term);
            }
        }
    }
    if let Err(e) = out.conformance() {
        return Err(AlgebraError::Internal(format!("standard form violates: {e}")));
    }
    Ok(out)
}

/// Whether `f` follows from the four trace axioms.
pub fn is_trace_identity(f: &TracePoly) -> Result<bool, AlgebraError> {
    Ok(trace_normalize(f)?.is_zero())
}

/// `M_n(𝔊)` with the 𝔖-trace `estr(a⊗w) = tr(a)⊗w`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SuperTraceContext {
    pub size: usize,
}

impl SuperTraceContext {
    /// `estr(M)` as the scalar matrix `(Σ Mᵢᵢ)·I`.
    pub fn estr(&self, m: &Matrix<GrassElem>) -> Matrix<GrassElem> {
        Matrix::scalar(m.size(), &mat_trace(m))
    }
}

fn eval_term(
    t: &Term,
    ctx: &SuperTraceContext,
    subs: &[Matrix<GrassElem>],
    one: &Matrix<GrassElem>,
) -> Result<Matrix<GrassElem>, AlgebraError> {
    let mut acc = one.clone();
    for a in &t.0 {
        let m = match a {
            Atom::Letter(i) => subs
                .get(*i as usize - 1)
                .cloned()
                .ok_or(AlgebraError::ArityMismatch {
                    expected: *i as usize,
                    got: subs.len(),
                })?,
            Atom::Trace(inner) => ctx.estr(&eval_term(inner, ctx, subs, one)?),
        };
        acc = mat_mul(&acc, &m)?;
    }
    Ok(acc)
}

/// Evaluates `f` at matrices over `𝔊`, with `F ↦ estr`.
pub fn eval_trace_poly(
    f: &TracePoly,
    ctx: &SuperTraceContext,
    subs: &[Matrix<GrassElem>],
) -> Result<Matrix<GrassElem>, AlgebraError> {
    if let Some(m) = subs.iter().find(|m| m.size() != ctx.size) {
        return Err(AlgebraError::DimensionMismatch(format!(
            "substitution of size {} in a context of size {}",
            m.size(),
            ctx.size
        )));
    }
    let proto = subs
        .first()
        .map(|m| m.get(0, 0).clone())
        .unwrap_or_else(|| GrassElem::zero(f.ring));
    let zero = GrassElem::zero(f.ring).with_truncated(proto.is_truncated());
    let unit = GrassElem::one(f.ring).with_truncated(proto.is_truncated());
    let one = Matrix::from_fn(ctx.size, |i, j| if i == j { unit.clone() } else { zero.clone() });
    let mut out = Matrix::scalar(ctx.size, &zero);
    for (t, c) in &f.terms {
        let v = eval_term(t, ctx, subs, &one)?;
        let cm = GrassElem::scalar(EpsPoly::constant(f.ring, c.clone())).with_truncated(proto.is_truncated());
        out = out.add(&v.scale(&cm))?;
    }
    Ok(out)
}

/// A substitution with a nonzero value.
#[derive(Clone, Debug)]
pub struct Witness {
    pub key: ModelKey,
    pub size: usize,
    pub subs: Vec<Matrix<GrassElem>>,
    pub value: Matrix<GrassElem>,
}

/// Matrix units along the key's path and around disjoint cycles, each
/// letter `x_i` carrying the coefficient `e_i`.
pub fn schema_substitution(ring: BaseRing, key: &ModelKey, letters: u32) -> (usize, Vec<Matrix<GrassElem>>) {
    let path_vertices = if key.path.is_empty() { 0 } else { key.path.len() + 1 };
    let size = (path_vertices + key.cycles.iter().map(|c| c.len()).sum::<usize>()).max(1);
    let mut edges: BTreeMap<u32, (usize, usize)> = BTreeMap::new();
    for (k, &x) in key.path.iter().enumerate() {
        edges.insert(x, (k, k + 1));
    }
    let mut base = path_vertices;
    for c in &key.cycles {
        for (k, &x) in c.iter().enumerate() {
            edges.insert(x, (base + k, base + (k + 1) % c.len()));
        }
        base += c.len();
    }
    let zero = GrassElem::zero(ring);
    let subs = (1..=letters)
        .map(|i| match edges.get(&i) {
            Some(&(a, b)) => {
                let g = GrassElem::generator(ring, i);
                Matrix::from_fn(size, |r, s| if (r, s) == (a, b) { g.clone() } else { zero.clone() })
            }
            None => Matrix::scalar(size, &zero),
        })
        .collect();
    (size, subs)
}

/// Searches the proof's substitution schema for a nonzero value of `f`.
pub fn witness_search(f: &TracePoly, max_n: usize) -> Result<Option<Witness>, AlgebraError> {
    if trace_normalize(f)?.is_zero() {
        return Ok(None);
    }
    let image = model_image(f)?;
    let mut keys: Vec<&ModelKey> = image.keys().collect();
    let size_of = |k: &ModelKey| k.letter_count() + usize::from(!k.path.is_empty());
    keys.sort_by_key(|k| (size_of(k), (*k).clone()));
    let letters = f.num_letters();
    for key in keys {
        if size_of(key) > max_n {
            break;
        }
        let (size, subs) = schema_substitution(f.ring, key, letters);
        let value = eval_trace_poly(f, &SuperTraceContext { size }, &subs)?;
        if !value.is_zero() {
            return Ok(Some(Witness {
                key: key.clone(),
                size,
                subs,
                value,
            }));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;

    const Z: BaseRing = BaseRing::Integers;

    fn x(i: u32) -> TracePoly {
        TracePoly::letter(Z, i)
    }

    fn tr(p: &TracePoly) -> TracePoly {
        p.trace()
    }

    #[test]
    fn axioms_are_identities() {
        let a1 = tr(&tr(&x(1)).mul(&x(2))).sub(&tr(&x(1)).mul(&tr(&x(2))));
        let a2 = tr(&x(1).mul(&tr(&x(2)))).sub(&tr(&x(1)).mul(&tr(&x(2))));
        let a3 = x(1).commutator(&tr(&x(2).commutator(&x(3))));
        let a4 = tr(&x(1)).commutator(&tr(&x(2)).commutator(&x(3)));
        for a in [a1, a2, a3, a4] {
            assert!(is_trace_identity(&a).unwrap(), "{a}");
        }
        let d = x(1).commutator(&tr(&x(2)).commutator(&tr(&x(3))));
        assert!(is_trace_identity(&d).unwrap());
    }

    #[test]
    fn non_identities() {
        let f = tr(&x(1)).mul(&x(2)).sub(&x(2).mul(&tr(&x(1))));
        assert!(!is_trace_identity(&f).unwrap());
        let g = x(1).commutator(&x(2));
        assert!(!is_trace_identity(&g).unwrap());
    }

    #[test]
    fn two_atom_case() {
        let f = x(1).mul(&tr(&x(2)));
        assert_eq!(trace_normalize(&f).unwrap().render(), "x1*Tr(x2)");
        let g = tr(&x(2)).mul(&x(1));
        assert_eq!(trace_normalize(&g).unwrap().render(), "x1*Tr(x2) - [x1,Tr(x2)]");
    }

    #[test]
    fn standard_terms_n2() {
        let keys = [
            ModelKey { path: vec![1, 2], cycles: vec![] },
            ModelKey { path: vec![2, 1], cycles: vec![] },
            ModelKey { path: vec![1], cycles: vec![vec![2]] },
            ModelKey { path: vec![2], cycles: vec![vec![1]] },
            ModelKey { path: vec![], cycles: vec![vec![1], vec![2]] },
            ModelKey { path: vec![], cycles: vec![vec![1, 2]] },
        ];
        let total: usize = keys.iter().map(|k| standard_terms(k).len()).sum();
        assert_eq!(total, 10);
        for k in &keys {
            let (count, rank) = key_rank(k).unwrap();
            assert_eq!(count, rank);
        }
    }

    #[test]
    fn pure_trace_argument_rejected() {
        let f = tr(&tr(&x(1)));
        assert!(matches!(trace_normalize(&f), Err(AlgebraError::PureTraceArgument(_))));
        let g = x(1).mul(&x(1));
        assert!(matches!(trace_normalize(&g), Err(AlgebraError::NotMultilinear(_))));
    }

    #[test]
    fn evaluation_of_trace_of_identity() {
        let one = GrassElem::one(Z);
        let i2 = Matrix::scalar(2, &one);
        let ctx = SuperTraceContext { size: 2 };
        let v = eval_trace_poly(&tr(&x(1)), &ctx, &[i2]).unwrap();
        assert_eq!(v.get(0, 0).render(), "2");
        assert!(v.get(0, 1).is_zero());
    }

    #[test]
    fn witnesses() {
        let f = x(1).commutator(&x(2));
        assert!(witness_search(&f, 2).unwrap().is_none());
        let w = witness_search(&f, 3).unwrap().unwrap();
        assert_eq!(w.size, 3);
        let g = tr(&x(1)).mul(&x(2)).sub(&x(2).mul(&tr(&x(1))));
        assert!(witness_search(&g, 3).unwrap().is_some());
        let a = x(1).commutator(&tr(&x(2).commutator(&x(3))));
        assert!(witness_search(&a, 4).unwrap().is_none());
    }
}
