//! Symbolic Gödel sets: finite unions of points, closed intervals, affine
//! copies of the Cantor set and convergent harmonic sequences.

use std::collections::HashMap;
use std::fmt;

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::{fmt_q, one, parse_rational, q, q_int, zero, Q};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum SetAtom {
    Point(Q),
    Interval(Q, Q),
    /// Middle-thirds Cantor set mapped affinely onto `[a, b]`.
    Cantor(Q, Q),
    /// `{q} ∪ {q + scale/k : k >= 1}`, cut to `[0, 1]`.
    SeqDown { limit: Q, scale: Q },
    /// `{q} ∪ {q - scale/k : k >= 1}`, cut to `[0, 1]`.
    SeqUp { limit: Q, scale: Q },
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum SetError {
    #[error("set syntax error at offset {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("invalid set atom {0}")]
    InvalidAtom(String),
    #[error("a Gödel set must contain 0 and 1")]
    MissingEndpoint,
    #[error("the perfect kernel is empty")]
    EmptyKernel,
    #[error("embedding target must be an interval or a Cantor piece")]
    NotPerfect,
    #[error("points must be strictly increasing within [0, 1]")]
    BadPoints,
}

impl SetAtom {
    fn check(&self) -> Result<(), SetError> {
        let unit = |x: &Q| !x.is_negative() && *x <= one();
        let ok = match self {
            SetAtom::Point(p) => unit(p),
            SetAtom::Interval(a, b) | SetAtom::Cantor(a, b) => unit(a) && unit(b) && a < b,
            SetAtom::SeqDown { limit, scale } | SetAtom::SeqUp { limit, scale } => {
                unit(limit) && scale.is_positive()
            }
        };
        if ok {
            Ok(())
        } else {
            Err(SetError::InvalidAtom(self.to_string()))
        }
    }

    pub fn is_perfect(&self) -> bool {
        matches!(self, SetAtom::Interval(..) | SetAtom::Cantor(..))
    }

    pub fn member(&self, x: &Q) -> bool {
        match self {
            SetAtom::Point(p) => p == x,
            SetAtom::Interval(a, b) => a <= x && x <= b,
            SetAtom::Cantor(a, b) => {
                if x < a || x > b {
                    return false;
                }
                cantor_member(&((x - a) / (b - a)))
            }
            SetAtom::SeqDown { limit, scale } => {
                if x == limit {
                    return true;
                }
                if x <= limit || *x > one() {
                    return false;
                }
                let k = scale / (x - limit);
                k.is_integer() && k.is_positive()
            }
            SetAtom::SeqUp { limit, scale } => {
                if x == limit {
                    return true;
                }
                if x >= limit || x.is_negative() {
                    return false;
                }
                let k = scale / (limit - x);
                k.is_integer() && k.is_positive()
            }
        }
    }

    /// Smallest and largest element.
    pub fn hull(&self) -> (Q, Q) {
        match self {
            SetAtom::Point(p) => (p.clone(), p.clone()),
            SetAtom::Interval(a, b) | SetAtom::Cantor(a, b) => (a.clone(), b.clone()),
            SetAtom::SeqDown { limit, scale } => {
                if *limit >= one() {
                    return (limit.clone(), limit.clone());
                }
                let k = ceil_q(&(scale / (one() - limit))).max(q_int(1));
                (limit.clone(), limit + scale / k)
            }
            SetAtom::SeqUp { limit, scale } => {
                if limit.is_zero() {
                    return (zero(), zero());
                }
                let k = ceil_q(&(scale / limit)).max(q_int(1));
                (limit - scale / k, limit.clone())
            }
        }
    }

    /// Infimum of the positive elements; `None` if there are none. A result
    /// of zero means the atom accumulates at 0.
    fn inf_positive(&self) -> Option<Q> {
        match self {
            SetAtom::Point(p) => p.is_positive().then(|| p.clone()),
            SetAtom::Interval(a, _) | SetAtom::Cantor(a, _) => Some(a.clone()),
            SetAtom::SeqDown { limit, .. } => Some(limit.clone()),
            SetAtom::SeqUp { limit, scale } => {
                if limit.is_zero() {
                    return None;
                }
                let k = (scale / limit).floor() + q_int(1);
                Some(limit - scale / k)
            }
        }
    }

    /// The largest element strictly inside `(lo, hi)` if one exists;
    /// otherwise, for perfect pieces, some element near the middle.
    fn pick_in_gap(&self, lo: &Q, hi: &Q) -> Option<Q> {
        let inside = |x: &Q| lo < x && x < hi;
        match self {
            SetAtom::Point(p) => inside(p).then(|| p.clone()),
            SetAtom::Interval(a, b) => {
                let l = a.max(lo).clone();
                let h = b.min(hi).clone();
                if l < h {
                    Some((l + h) / q_int(2))
                } else {
                    None
                }
            }
            SetAtom::Cantor(a, b) => {
                let w = b - a;
                let ylo = (lo - a) / &w;
                let yhi = (hi - a) / &w;
                cantor_point_between(&ylo, &yhi, zero(), one(), 0).map(|y| a + y * w)
            }
            SetAtom::SeqDown { limit, scale } => {
                if hi > limit {
                    let k = (scale / (hi - limit)).floor() + q_int(1);
                    let v = limit + scale / k;
                    if inside(&v) && v <= one() {
                        return Some(v);
                    }
                }
                inside(limit).then(|| limit.clone())
            }
            SetAtom::SeqUp { limit, scale } => {
                if inside(limit) {
                    return Some(limit.clone());
                }
                if limit < hi {
                    return None;
                }
                if limit == hi {
                    let k = (scale / (hi - lo)).floor() + q_int(1);
                    let v = limit - scale / k;
                    return (!v.is_negative()).then_some(v);
                }
                let k = ceil_q(&(scale / (limit - hi))) - q_int(1);
                if k < q_int(1) {
                    return None;
                }
                let v = limit - scale / k;
                (inside(&v) && !v.is_negative()).then_some(v)
            }
        }
    }
}

fn ceil_q(x: &Q) -> Q {
    x.ceil()
}

/// Decides membership of `x` in the standard Cantor set by following its
/// eventually periodic ternary expansion and rejecting any forced digit 1.
fn cantor_member(x: &Q) -> bool {
    let third = q(1, 3);
    let two_thirds = q(2, 3);
    let mut seen = std::collections::HashSet::new();
    let mut x = x.clone();
    loop {
        if !seen.insert(x.clone()) {
            return true;
        }
        if x <= third {
            x *= q_int(3);
        } else if x >= two_thirds {
            x = x * q_int(3) - q_int(2);
        } else {
            return false;
        }
    }
}

/// Finds a Cantor-set point strictly between `lo` and `hi` (unit coordinates)
/// by descending the construction intervals.
fn cantor_point_between(lo: &Q, hi: &Q, u: Q, v: Q, depth: usize) -> Option<Q> {
    if depth > 64 || v <= *lo || u >= *hi {
        return None;
    }
    let inside = |x: &Q| lo < x && x < hi;
    if inside(&v) {
        return Some(v);
    }
    if inside(&u) {
        return Some(u);
    }
    let third = (&v - &u) / q_int(3);
    let right = cantor_point_between(lo, hi, &v - &third, v.clone(), depth + 1);
    right.or_else(|| cantor_point_between(lo, hi, u.clone(), &u + third, depth + 1))
}

impl fmt::Display for SetAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SetAtom::Point(p) => write!(f, "{{{}}}", fmt_q(p)),
            SetAtom::Interval(a, b) => write!(f, "[{},{}]", fmt_q(a), fmt_q(b)),
            SetAtom::Cantor(a, b) => write!(f, "cantor({},{})", fmt_q(a), fmt_q(b)),
            SetAtom::SeqDown { limit, scale } => {
                write!(f, "seqdown({};{})", fmt_q(limit), fmt_q(scale))
            }
            SetAtom::SeqUp { limit, scale } => write!(f, "sequp({};{})", fmt_q(limit), fmt_q(scale)),
        }
    }
}

/// A finite union of set atoms. Use [`GoedelSet::parse`] or
/// [`GoedelSet::new`] to get a validated set containing 0 and 1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GoedelSet {
    atoms: Vec<SetAtom>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "size")]
pub enum Cardinality {
    Finite(usize),
    CountablyInfinite,
    Uncountable,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "n")]
pub enum Verdict {
    /// Axiomatized by H.
    AxiomatizableH,
    /// Axiomatized by H plus the isolation axiom of 0.
    AxiomatizableH0,
    /// Axiomatized by H plus FIN(n).
    AxiomatizableHn(usize),
    #[serde(rename = "not_re")]
    NotRE,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Classification {
    pub cardinality: Cardinality,
    pub zero_isolated: bool,
    pub zero_in_kernel: bool,
    pub verdict: Verdict,
}

impl Classification {
    pub fn summary(&self) -> String {
        let card = match self.cardinality {
            Cardinality::Finite(n) => format!("finite ({n} values)"),
            Cardinality::CountablyInfinite => "countably infinite".to_string(),
            Cardinality::Uncountable => "uncountable".to_string(),
        };
        let zero = if self.zero_in_kernel {
            "0 in perfect kernel"
        } else if self.zero_isolated {
            "0 isolated"
        } else {
            "0 neither isolated nor in kernel"
        };
        let verdict = match self.verdict {
            Verdict::AxiomatizableH => "axiomatizable (H)".to_string(),
            Verdict::AxiomatizableH0 => "axiomatizable (H_0)".to_string(),
            Verdict::AxiomatizableHn(n) => format!("axiomatizable (H_{n})"),
            Verdict::NotRE => "not recursively enumerable".to_string(),
        };
        format!("{card}, {zero} → {verdict}")
    }
}

impl GoedelSet {
    /// Validates the atoms and checks that 0 and 1 belong to the union.
    pub fn new(atoms: Vec<SetAtom>) -> Result<GoedelSet, SetError> {
        let set = GoedelSet::union_of(atoms)?;
        if !set.member(&zero()) || !set.member(&one()) {
            return Err(SetError::MissingEndpoint);
        }
        Ok(set)
    }

    /// A simplified union that need not contain 0 and 1.
    pub fn union_of(atoms: Vec<SetAtom>) -> Result<GoedelSet, SetError> {
        atoms.iter().try_for_each(SetAtom::check)?;
        Ok(GoedelSet { atoms: simplify(atoms) })
    }

    pub fn atoms(&self) -> &[SetAtom] {
        &self.atoms
    }

    pub fn unit_interval() -> GoedelSet {
        GoedelSet { atoms: vec![SetAtom::Interval(zero(), one())] }
    }

    /// `{1 - 1/k : 1 <= k <= m-1} ∪ {1}`, the `m`-element set.
    pub fn v_m(m: usize) -> GoedelSet {
        assert!(m >= 2, "V_m needs m >= 2");
        let mut pts: Vec<Q> = (1..m as i64).map(|k| one() - q(1, k)).collect();
        pts.push(one());
        GoedelSet::from_points(pts)
    }

    /// `{1/k : k >= 1} ∪ {0}`.
    pub fn v_down() -> GoedelSet {
        GoedelSet { atoms: vec![SetAtom::SeqDown { limit: zero(), scale: one() }] }
    }

    /// `{1 - 1/k : k >= 1} ∪ {1}`.
    pub fn v_up() -> GoedelSet {
        GoedelSet { atoms: vec![SetAtom::SeqUp { limit: one(), scale: one() }] }
    }

    pub fn from_points(points: Vec<Q>) -> GoedelSet {
        GoedelSet { atoms: simplify(points.into_iter().map(SetAtom::Point).collect()) }
    }

    pub fn parse(text: &str) -> Result<GoedelSet, SetError> {
        GoedelSet::new(parse_atoms(text)?)
    }

    pub fn member(&self, x: &Q) -> bool {
        self.atoms.iter().any(|a| a.member(x))
    }

    /// Sorted elements when the set is finite.
    pub fn finite_values(&self) -> Option<Vec<Q>> {
        let mut out = Vec::new();
        for a in &self.atoms {
            match a {
                SetAtom::Point(p) => out.push(p.clone()),
                _ => return None,
            }
        }
        out.sort();
        out.dedup();
        Some(out)
    }

    pub fn is_finite(&self) -> bool {
        self.finite_values().is_some()
    }

    /// The perfect kernel: the union of the interval and Cantor pieces.
    /// Countable pieces outside them consist of non-condensation points.
    pub fn cb_kernel(&self) -> Vec<SetAtom> {
        self.atoms.iter().filter(|a| a.is_perfect()).cloned().collect()
    }

    pub fn kernel_inf(&self) -> Option<Q> {
        self.cb_kernel().iter().map(|a| a.hull().0).min()
    }

    pub fn cardinality(&self) -> Cardinality {
        if self.atoms.iter().any(SetAtom::is_perfect) {
            Cardinality::Uncountable
        } else if let Some(v) = self.finite_values() {
            Cardinality::Finite(v.len())
        } else {
            Cardinality::CountablyInfinite
        }
    }

    /// Infimum of `V \ {0}`.
    pub fn inf_positive(&self) -> Option<Q> {
        self.atoms.iter().filter_map(SetAtom::inf_positive).min()
    }

    pub fn zero_isolated(&self) -> bool {
        self.inf_positive().is_none_or(|v| v.is_positive())
    }

    pub fn zero_in_kernel(&self) -> bool {
        self.cb_kernel().iter().any(|a| a.hull().0.is_zero())
    }

    pub fn classify(&self) -> Classification {
        let cardinality = self.cardinality();
        let zero_isolated = self.zero_isolated();
        let zero_in_kernel = self.zero_in_kernel();
        let verdict = match cardinality {
            Cardinality::Finite(n) => Verdict::AxiomatizableHn(n),
            Cardinality::Uncountable if zero_in_kernel => Verdict::AxiomatizableH,
            Cardinality::Uncountable if zero_isolated => Verdict::AxiomatizableH0,
            _ => Verdict::NotRE,
        };
        Classification { cardinality, zero_isolated, zero_in_kernel, verdict }
    }

    /// `V ∪ [inf P, 1]` for the perfect kernel `P`.
    pub fn saturate_above_kernel_inf(&self) -> Result<GoedelSet, SetError> {
        let inf = self.kernel_inf().ok_or(SetError::EmptyKernel)?;
        let mut atoms = self.atoms.clone();
        if inf < one() {
            atoms.push(SetAtom::Interval(inf, one()));
        }
        Ok(GoedelSet { atoms: simplify(atoms) })
    }

    /// A finite subset of at most `n` values containing 0 and 1, and the
    /// least positive element when 0 is isolated. Further values are added
    /// one at a time into the widest gap that still meets the set.
    pub fn sample_finite(&self, n: usize) -> GoedelSet {
        let mut pts = vec![zero(), one()];
        if n > 2 && self.zero_isolated() {
            if let Some(m) = self.inf_positive().filter(|m| *m < one()) {
                pts.push(m);
            }
        }
        pts.sort();
        while pts.len() < n {
            let mut best: Option<(Q, usize, Q)> = None;
            for i in 0..pts.len() - 1 {
                let (lo, hi) = (&pts[i], &pts[i + 1]);
                let cand = self.atoms.iter().filter_map(|a| a.pick_in_gap(lo, hi)).max();
                if let Some(c) = cand {
                    let width = hi - lo;
                    if best.as_ref().is_none_or(|(w, _, _)| width >= *w) {
                        best = Some((width, i, c));
                    }
                }
            }
            match best {
                Some((_, i, c)) => pts.insert(i + 1, c),
                None => break,
            }
        }
        GoedelSet::from_points(pts)
    }
}

impl fmt::Display for GoedelSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        let mut points = Vec::new();
        for a in &self.atoms {
            match a {
                SetAtom::Point(p) => points.push(fmt_q(p)),
                other => parts.push(other.to_string()),
            }
        }
        if !points.is_empty() {
            parts.insert(0, format!("{{{}}}", points.join(",")));
        }
        if parts.is_empty() {
            return write!(f, "{{}}");
        }
        write!(f, "{}", parts.join(" + "))
    }
}

/// Merges touching intervals, absorbs pieces covered by an interval, drops
/// points already covered by another atom and sorts the result.
fn simplify(atoms: Vec<SetAtom>) -> Vec<SetAtom> {
    let mut intervals: Vec<(Q, Q)> = Vec::new();
    let mut rest = Vec::new();
    for a in atoms {
        match a {
            SetAtom::Interval(x, y) | SetAtom::Cantor(x, y) if x == y => rest.push(SetAtom::Point(x)),
            SetAtom::Interval(x, y) => intervals.push((x, y)),
            SetAtom::SeqDown { ref limit, .. } if *limit >= one() => rest.push(SetAtom::Point(one())),
            SetAtom::SeqUp { ref limit, .. } if limit.is_zero() => rest.push(SetAtom::Point(zero())),
            other => rest.push(other),
        }
    }
    intervals.sort();
    let mut merged: Vec<(Q, Q)> = Vec::new();
    for (a, b) in intervals {
        match merged.last_mut() {
            Some((_, hi)) if a <= *hi => {
                if b > *hi {
                    *hi = b;
                }
            }
            _ => merged.push((a, b)),
        }
    }
    let covered = |a: &SetAtom| {
        let (lo, hi) = a.hull();
        merged.iter().any(|(x, y)| *x <= lo && hi <= *y)
    };
    let mut kept: Vec<SetAtom> = Vec::new();
    for a in rest {
        if covered(&a) || kept.contains(&a) {
            continue;
        }
        kept.push(a);
    }
    let mut out: Vec<SetAtom> = merged.into_iter().map(|(a, b)| SetAtom::Interval(a, b)).collect();
    for (i, a) in kept.iter().enumerate() {
        if let SetAtom::Point(p) = a {
            let elsewhere = kept
                .iter()
                .enumerate()
                .any(|(j, b)| j != i && !matches!(b, SetAtom::Point(_)) && b.member(p));
            if elsewhere {
                continue;
            }
        }
        out.push(a.clone());
    }
    out.sort_by(|a, b| {
        let (ha, hb) = (a.hull(), b.hull());
        ha.cmp(&hb).then_with(|| a.to_string().cmp(&b.to_string()))
    });
    out
}

fn parse_atoms(text: &str) -> Result<Vec<SetAtom>, SetError> {
    let mut atoms = Vec::new();
    let mut offset = 0;
    for part in split_top_level(text, '+') {
        let pos = offset + part.len() - part.trim_start().len();
        offset += part.len() + 1;
        let p = part.trim();
        let err = |msg: &str| SetError::Syntax { pos, msg: msg.to_string() };
        let num = |s: &str| parse_rational(s).ok_or_else(|| err(&format!("bad rational `{}`", s.trim())));
        if p.is_empty() {
            return Err(err("empty term"));
        }
        if let Some(inner) = p.strip_prefix('{').and_then(|s| s.strip_suffix('}')) {
            for x in inner.split(',').filter(|s| !s.trim().is_empty()) {
                atoms.push(SetAtom::Point(num(x)?));
            }
        } else if let Some(inner) = p.strip_prefix('[').and_then(|s| s.strip_suffix(']')) {
            let (a, b) = inner.split_once(',').ok_or_else(|| err("interval needs two bounds"))?;
            atoms.push(SetAtom::Interval(num(a)?, num(b)?));
        } else {
            let (name, args) = p
                .split_once('(')
                .and_then(|(n, r)| r.strip_suffix(')').map(|r| (n.trim().to_ascii_lowercase(), r)))
                .ok_or_else(|| err("expected `[a,b]`, `{...}`, `cantor(a,b)`, `seqdown(q;s)` or `sequp(q;s)`"))?;
            let two = |sep: char| -> Result<(Q, Q), SetError> {
                let (a, b) = args.split_once(sep).ok_or_else(|| err(&format!("expected two arguments separated by `{sep}`")))?;
                Ok((num(a)?, num(b)?))
            };
            match name.as_str() {
                "cantor" => {
                    let (a, b) = two(',')?;
                    atoms.push(SetAtom::Cantor(a, b));
                }
                "seqdown" => {
                    let (limit, scale) = two(';')?;
                    atoms.push(SetAtom::SeqDown { limit, scale });
                }
                "sequp" => {
                    let (limit, scale) = two(';')?;
                    atoms.push(SetAtom::SeqUp { limit, scale });
                }
                other => return Err(err(&format!("unknown set constructor `{other}`"))),
            }
        }
    }
    Ok(atoms)
}

fn split_top_level(text: &str, sep: char) -> Vec<&str> {
    let mut parts = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, c) in text.char_indices() {
        match c {
            '(' | '[' | '{' => depth += 1,
            ')' | ']' | '}' => depth -= 1,
            c if c == sep && depth == 0 => {
                parts.push(&text[start..i]);
                start = i + c.len_utf8();
            }
            _ => {}
        }
    }
    parts.push(&text[start..]);
    parts
}

/// Strictly monotone map of a sorted point list into a perfect piece, with
/// the least point sent to the piece's infimum.
///
/// For a Cantor piece the points are scaled onto `[0, 1]`, written in binary
/// (terminating expansions for dyadic rationals, `0.111...` for 1), each
/// binary digit `d` becomes the ternary digit `2d`, and the result is mapped
/// affinely onto the piece.
pub fn embed_into_perfect(points: &[Q], target: &SetAtom) -> Result<Vec<Q>, SetError> {
    if points.windows(2).any(|w| w[0] >= w[1])
        || points.iter().any(|p| p.is_negative() || *p > one())
    {
        return Err(SetError::BadPoints);
    }
    let (a, b, cantor) = match target {
        SetAtom::Interval(a, b) => (a, b, false),
        SetAtom::Cantor(a, b) => (a, b, true),
        _ => return Err(SetError::NotPerfect),
    };
    let (Some(lo), Some(hi)) = (points.first(), points.last()) else {
        return Ok(Vec::new());
    };
    let span = hi - lo;
    Ok(points
        .iter()
        .map(|x| {
            let s = if span.is_zero() { zero() } else { (x - lo) / &span };
            let y = if cantor { binary_to_cantor(&s) } else { s };
            a + (b - a) * y
        })
        .collect())
}

/// Reads `y ∈ [0, 1]` in binary and rereads the doubled digits in ternary.
pub fn binary_to_cantor(y: &Q) -> Q {
    if *y >= one() {
        return one();
    }
    let mut digits: Vec<u8> = Vec::new();
    let mut seen: HashMap<Q, usize> = HashMap::new();
    let mut r = y.clone();
    let two = q_int(2);
    let period_start = loop {
        if r.is_zero() {
            break None;
        }
        if let Some(&i) = seen.get(&r) {
            break Some(i);
        }
        seen.insert(r.clone(), digits.len());
        r *= &two;
        if r >= one() {
            digits.push(1);
            r -= one();
        } else {
            digits.push(0);
        }
    };
    let third = q(1, 3);
    let ternary = |ds: &[u8]| -> Q {
        let mut v = zero();
        let mut w = third.clone();
        for &d in ds {
            v += &w * q_int(2 * d as i64);
            w *= &third;
        }
        v
    };
    match period_start {
        None => ternary(&digits),
        Some(k) => {
            let (pre, rep) = digits.split_at(k);
            let scale = num_traits::pow(third.clone(), pre.len());
            let cycle = num_traits::pow(third.clone(), rep.len());
            ternary(pre) + scale * ternary(rep) / (one() - cycle)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(s: &str) -> GoedelSet {
        GoedelSet::parse(s).unwrap()
    }

    /// Base-3 long division. For a non-triadic rational the expansion is
    /// unique and eventually periodic, so 200 digits decide membership for
    /// the small denominators used here.
    fn ternary_has_no_one(x: &Q) -> bool {
        let mut r = x.clone();
        for _ in 0..200 {
            r *= q_int(3);
            let d = r.floor();
            r -= &d;
            if d == q_int(1) {
                return false;
            }
        }
        true
    }

    fn is_triadic(x: &Q) -> bool {
        let mut d = x.denom().clone();
        let three = num_bigint::BigInt::from(3);
        while (&d % &three).is_zero() {
            d /= &three;
        }
        d == num_bigint::BigInt::from(1)
    }

    #[test]
    fn membership_examples() {
        assert!(set("[0,1]").member(&q(1, 3)));
        let c = SetAtom::Cantor(zero(), one());
        assert!(!c.member(&q(1, 2)));
        assert!(!ternary_has_no_one(&q(1, 2)));
        assert!(c.member(&q(1, 4)));
        assert!(c.member(&q(1, 3)));
        assert!(c.member(&q(3, 4)));
        let down = GoedelSet::v_down();
        assert!(down.member(&q(1, 7)));
        assert!(!down.member(&q(2, 7)));
        assert!(GoedelSet::v_up().member(&q(6, 7)));
        assert!(!GoedelSet::v_up().member(&q(5, 7)));
    }

    #[test]
    fn cantor_membership_matches_digit_oracle() {
        let c = SetAtom::Cantor(zero(), one());
        for den in 1..60i64 {
            for num in 0..=den {
                let x = q(num, den);
                let triadic = is_triadic(&x);
                if triadic {
                    continue;
                }
                assert_eq!(c.member(&x), ternary_has_no_one(&x), "x = {x}");
            }
        }
    }

    #[test]
    fn parse_and_display_round_trip() {
        for s in ["[0,1]", "{0} + [1/2,1]", "cantor(0,1)", "seqdown(0;1)", "seqUp(1;1)", "{0,1/3,2/3,1}"] {
            let v = set(s);
            assert_eq!(GoedelSet::parse(&v.to_string()).unwrap(), v, "{s}");
        }
        assert!(matches!(GoedelSet::parse("[1/2,1]"), Err(SetError::MissingEndpoint)));
        assert!(matches!(GoedelSet::parse("[0,1] + wat(1)"), Err(SetError::Syntax { .. })));
        assert!(matches!(GoedelSet::parse("[1,0]"), Err(SetError::InvalidAtom(_))));
    }

    #[test]
    fn v_m_elements() {
        let v4 = GoedelSet::v_m(4).finite_values().unwrap();
        assert_eq!(v4, vec![zero(), q(1, 2), q(2, 3), one()]);
        assert_eq!(GoedelSet::v_m(2).finite_values().unwrap(), vec![zero(), one()]);
    }

    #[test]
    fn kernel_examples() {
        assert!(GoedelSet::v_down().cb_kernel().is_empty());
        assert_eq!(set("{0} + [1/2,1]").cb_kernel(), vec![SetAtom::Interval(q(1, 2), one())]);
        assert_eq!(set("[0,1]").cb_kernel(), vec![SetAtom::Interval(zero(), one())]);
        // points inside a perfect piece are absorbed
        assert_eq!(set("[0,1] + {1/2}").atoms().len(), 1);
    }

    #[test]
    fn classification_examples() {
        let c = set("[0,1]").classify();
        assert_eq!(c.cardinality, Cardinality::Uncountable);
        assert!(c.zero_in_kernel);
        assert_eq!(c.verdict, Verdict::AxiomatizableH);
        let c = set("{0} + [1/2,1]").classify();
        assert!(c.zero_isolated && !c.zero_in_kernel);
        assert_eq!(c.verdict, Verdict::AxiomatizableH0);
        let c = GoedelSet::v_down().classify();
        assert_eq!(c.cardinality, Cardinality::CountablyInfinite);
        assert_eq!(c.verdict, Verdict::NotRE);
        let c = set("{0} + seqdown(0;1/4) + [1/2,1]").classify();
        assert_eq!(c.cardinality, Cardinality::Uncountable);
        assert!(!c.zero_isolated && !c.zero_in_kernel);
        assert_eq!(c.verdict, Verdict::NotRE);
        assert_eq!(GoedelSet::v_m(5).classify().verdict, Verdict::AxiomatizableHn(5));
        assert_eq!(set("{0} + [1/2,1]").classify().summary(), "uncountable, 0 isolated → axiomatizable (H_0)");
    }

    #[test]
    fn saturation_examples() {
        let s = set("{0} + cantor(1/2,1)").saturate_above_kernel_inf().unwrap();
        assert_eq!(s, set("{0} + [1/2,1]"));
        assert_eq!(set("[0,1]").saturate_above_kernel_inf().unwrap(), set("[0,1]"));
        let s = set("{0} + [1/4,1/2] + {1}").saturate_above_kernel_inf().unwrap();
        assert_eq!(s, set("{0} + [1/4,1]"));
        assert_eq!(GoedelSet::v_down().saturate_above_kernel_inf(), Err(SetError::EmptyKernel));
    }

    #[test]
    fn embedding_examples() {
        let cantor = SetAtom::Cantor(zero(), one());
        let out = embed_into_perfect(&[zero(), q(1, 2), one()], &cantor).unwrap();
        assert_eq!(out, vec![zero(), q(2, 3), one()]);
        let out = embed_into_perfect(&[zero(), one()], &SetAtom::Interval(q(1, 2), one())).unwrap();
        assert_eq!(out, vec![q(1, 2), one()]);
        let out = embed_into_perfect(&[zero(), q(1, 4), q(1, 2), one()], &cantor).unwrap();
        assert!(out.windows(2).all(|w| w[0] < w[1]));
        assert!(out.iter().all(|x| cantor.member(x)));
        assert_eq!(binary_to_cantor(&q(1, 3)), q(1, 4));
    }

    #[test]
    fn sampling_examples() {
        let s = GoedelSet::v_down().sample_finite(4);
        assert_eq!(s.finite_values().unwrap(), vec![zero(), q(1, 3), q(1, 2), one()]);
        let s = set("[0,1]").sample_finite(3);
        assert_eq!(s.finite_values().unwrap(), vec![zero(), q(1, 2), one()]);
        let s = set("{0} + [1/2,1]").sample_finite(4);
        assert_eq!(s.finite_values().unwrap(), vec![zero(), q(1, 2), q(3, 4), one()]);
        let v = set("{0} + cantor(1/2,1)");
        let s = v.sample_finite(6).finite_values().unwrap();
        assert_eq!(s.len(), 6);
        assert!(s.iter().all(|x| v.member(x)));
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn rat01() -> impl Strategy<Value = Q> {
            (0i64..=12, 1i64..=12).prop_map(|(n, d)| q(n.min(d), d))
        }

        fn atom() -> impl Strategy<Value = SetAtom> {
            prop_oneof![
                rat01().prop_map(SetAtom::Point),
                (rat01(), rat01()).prop_filter_map("a<b", |(a, b)| (a < b).then_some(SetAtom::Interval(a, b))),
                (rat01(), rat01()).prop_filter_map("a<b", |(a, b)| (a < b).then_some(SetAtom::Cantor(a, b))),
                (rat01(), 1i64..4).prop_map(|(l, s)| SetAtom::SeqDown { limit: l, scale: q(1, s) }),
                (rat01(), 1i64..4).prop_map(|(l, s)| SetAtom::SeqUp { limit: l, scale: q(1, s) }),
            ]
        }

        fn goedel_set() -> impl Strategy<Value = GoedelSet> {
            proptest::collection::vec(atom(), 0..4).prop_map(|mut atoms| {
                atoms.push(SetAtom::Point(zero()));
                atoms.push(SetAtom::Point(one()));
                GoedelSet::new(atoms).unwrap()
            })
        }

        fn probes() -> Vec<Q> {
            let mut out = Vec::new();
            for d in 1..=36i64 {
                for n in 0..=d {
                    out.push(q(n, d));
                }
            }
            out
        }

        proptest! {
            #[test]
            fn kernel_is_idempotent(v in goedel_set()) {
                let mut k = v.cb_kernel();
                k.push(SetAtom::Point(zero()));
                k.push(SetAtom::Point(one()));
                let again = GoedelSet::new(k).unwrap().cb_kernel();
                prop_assert_eq!(again, v.cb_kernel());
            }

            #[test]
            fn kernel_is_a_subset(v in goedel_set()) {
                let k = GoedelSet::union_of(v.cb_kernel()).unwrap();
                for x in probes() {
                    if k.member(&x) {
                        prop_assert!(v.member(&x), "{} in kernel but not in {}", x, v);
                    }
                }
            }

            #[test]
            fn simplification_preserves_membership(atoms in proptest::collection::vec(atom(), 1..5)) {
                let raw = atoms.clone();
                let v = GoedelSet::union_of(atoms).unwrap();
                for x in probes() {
                    prop_assert_eq!(v.member(&x), raw.iter().any(|a| a.member(&x)), "x = {}", x);
                }
            }

            #[test]
            fn embedding_is_monotone_into_target(
                mut pts in proptest::collection::btree_set((0i64..=16, 1i64..=16), 2..7),
                cantor in any::<bool>(),
                (a, b) in (0i64..4, 5i64..=8),
            ) {
                let mut xs: Vec<Q> = pts.iter().map(|&(n, d)| q(n.min(d), d)).collect();
                xs.sort();
                xs.dedup();
                pts.clear();
                prop_assume!(xs.len() >= 2);
                let target = if cantor {
                    SetAtom::Cantor(q(a, 8), q(b, 8))
                } else {
                    SetAtom::Interval(q(a, 8), q(b, 8))
                };
                let out = embed_into_perfect(&xs, &target).unwrap();
                prop_assert!(out.windows(2).all(|w| w[0] < w[1]));
                prop_assert!(out.iter().all(|x| target.member(x)));
                prop_assert_eq!(&out[0], &target.hull().0);
            }

            #[test]
            fn samples_are_members(v in goedel_set(), n in 2usize..7) {
                let s = v.sample_finite(n).finite_values().unwrap();
                prop_assert!(s.len() <= n);
                prop_assert!(s.contains(&zero()) && s.contains(&one()));
                prop_assert!(s.iter().all(|x| v.member(x)));
                if v.zero_isolated() && n > 2 {
                    let m = v.inf_positive().unwrap();
                    prop_assert!(m == one() || s.contains(&m));
                }
            }
        }
    }
}
