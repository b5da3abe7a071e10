//! Noncommutative polynomials in the generators `x`, `h`, `y` subject to
//!
//! ```text
//! [x, y] = h,   [h, x] = 2x,   [h, y] = -2y
//! ```
//!
//! On the ambient space `x = -Q/4`, `y` is the weighted ambient Laplacian and
//! `h` is the Euler field shifted by `(d+m+2)/2`. Reduction orients the
//! relations toward the PBW order `x^a h^b y^c`, so "modulo `x` on the left"
//! is read off as the `x`-free part of a normal form.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use crate::algebra::Rational;
use crate::error::{Error, Result};

/// Generators in PBW order: `x < h < y`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Letter {
    X,
    H,
    Y,
}

impl Letter {
    fn symbol(self) -> char {
        match self {
            Letter::X => 'x',
            Letter::H => 'h',
            Letter::Y => 'y',
        }
    }
}

pub type Word = Vec<Letter>;

#[derive(Clone, PartialEq, Eq, Default)]
pub struct NcPoly {
    terms: BTreeMap<Word, Rational>,
}

impl NcPoly {
    pub fn zero() -> Self {
        NcPoly::default()
    }

    pub fn one() -> Self {
        NcPoly::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        NcPoly::term(c, Vec::new())
    }

    pub fn term(c: Rational, word: Word) -> Self {
        let mut p = NcPoly::zero();
        p.add_term(word, c);
        p
    }

    pub fn letter(l: Letter) -> Self {
        NcPoly::term(Rational::one(), vec![l])
    }

    pub fn x() -> Self {
        NcPoly::letter(Letter::X)
    }

    pub fn h() -> Self {
        NcPoly::letter(Letter::H)
    }

    pub fn y() -> Self {
        NcPoly::letter(Letter::Y)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Word, &Rational)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree(&self) -> usize {
        self.terms.keys().map(Vec::len).max().unwrap_or(0)
    }

    fn add_term(&mut self, word: Word, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(word) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += &c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn scale(&self, c: &Rational) -> NcPoly {
        let mut out = NcPoly::zero();
        for (w, a) in &self.terms {
            out.add_term(w.clone(), a * c);
        }
        out
    }

    pub fn pow(&self, n: u32) -> NcPoly {
        (0..n).fold(NcPoly::one(), |acc, _| &acc * self)
    }

    /// `[a, b] = ab - ba`, unreduced.
    pub fn commutator(a: &NcPoly, b: &NcPoly) -> NcPoly {
        &(a * b) - &(b * a)
    }

    /// True when every word is in PBW order.
    pub fn is_normal(&self) -> bool {
        self.terms.keys().all(|w| first_inversion(w).is_none())
    }

    /// Value of a polynomial in `h` alone at `h = value`; `None` if any word
    /// contains `x` or `y`.
    pub fn evaluate_h(&self, value: &Rational) -> Option<Rational> {
        let mut acc = Rational::zero();
        for (w, c) in &self.terms {
            if w.iter().any(|&l| l != Letter::H) {
                return None;
            }
            acc += &(c * value.pow(w.len() as i32).ok()?);
        }
        Some(acc)
    }

    /// Splits a normal form into `x * rest + x_free`.
    pub fn split_left_x(&self) -> (NcPoly, NcPoly) {
        let mut rest = NcPoly::zero();
        let mut free = NcPoly::zero();
        for (w, c) in &self.terms {
            match w.first() {
                Some(Letter::X) => rest.add_term(w[1..].to_vec(), c.clone()),
                _ => free.add_term(w.clone(), c.clone()),
            }
        }
        (rest, free)
    }
}

fn first_inversion(w: &[Letter]) -> Option<usize> {
    w.windows(2).position(|p| p[0] > p[1])
}

fn inversions(w: &[Letter]) -> Vec<usize> {
    w.windows(2).enumerate().filter(|(_, p)| p[0] > p[1]).map(|(i, _)| i).collect()
}

/// One relation applied to the out-of-order pair at `pos, pos+1`.
fn rewrite_at(w: &[Letter], pos: usize) -> Vec<(Word, Rational)> {
    let splice = |mid: &[Letter]| -> Word {
        let mut out = w[..pos].to_vec();
        out.extend_from_slice(mid);
        out.extend_from_slice(&w[pos + 2..]);
        out
    };
    use Letter::*;
    match (w[pos], w[pos + 1]) {
        // yx = xy - h
        (Y, X) => vec![(splice(&[X, Y]), Rational::one()), (splice(&[H]), -Rational::one())],
        // hx = xh + 2x
        (H, X) => vec![(splice(&[X, H]), Rational::one()), (splice(&[X]), Rational::from_integer(2))],
        // yh = hy + 2y
        (Y, H) => vec![(splice(&[H, Y]), Rational::one()), (splice(&[Y]), Rational::from_integer(2))],
        pair => unreachable!("pair {pair:?} is already ordered"),
    }
}

/// Reduces to PBW order, always rewriting the leftmost inversion.
pub fn normal_form(p: &NcPoly) -> NcPoly {
    normal_form_by(p, |_| 0)
}

/// Reduces to PBW order; `choose` picks which of the listed inversion
/// positions to rewrite next. The result does not depend on the choices.
pub fn normal_form_by(p: &NcPoly, mut choose: impl FnMut(&[usize]) -> usize) -> NcPoly {
    let mut done = NcPoly::zero();
    let mut pending = p.clone();
    while let Some((word, c)) = pending.terms.pop_first() {
        let inv = inversions(&word);
        if inv.is_empty() {
            done.add_term(word, c);
            continue;
        }
        let pos = inv[choose(&inv) % inv.len()];
        for (w, a) in rewrite_at(&word, pos) {
            pending.add_term(w, a * &c);
        }
    }
    done
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CommutatorIdentity {
    /// `[y^k, x] = -k y^(k-1) (h - k + 1)`
    YkX,
    /// `[x^k, y] = k x^(k-1) (h + k - 1)`
    XkY,
}

#[derive(Debug, Clone)]
pub struct IdentityCheck {
    pub holds: bool,
    /// Normal form of `lhs - rhs`.
    pub witness: NcPoly,
}

pub fn verify_commutator_identity(kind: CommutatorIdentity, k: u32) -> Result<IdentityCheck> {
    if k == 0 {
        return Err(Error::ZeroK);
    }
    let kk = Rational::from(k);
    let (lhs, rhs) = match kind {
        CommutatorIdentity::YkX => {
            let lhs = NcPoly::commutator(&NcPoly::y().pow(k), &NcPoly::x());
            let shift = &NcPoly::h() - &NcPoly::constant(&kk - Rational::one());
            let rhs = (&NcPoly::y().pow(k - 1) * &shift).scale(&-&kk);
            (lhs, rhs)
        }
        CommutatorIdentity::XkY => {
            let lhs = NcPoly::commutator(&NcPoly::x().pow(k), &NcPoly::y());
            let shift = &NcPoly::h() + &NcPoly::constant(&kk - Rational::one());
            let rhs = (&NcPoly::x().pow(k - 1) * &shift).scale(&kk);
            (lhs, rhs)
        }
    };
    let witness = normal_form(&(&lhs - &rhs));
    Ok(IdentityCheck { holds: witness.is_zero(), witness })
}

/// `h (h+1) ... (h+n-1)`, with the empty product equal to 1.
pub fn rising_h(n: u32) -> NcPoly {
    (0..n).fold(NcPoly::one(), |acc, i| &acc * &(&NcPoly::h() + &NcPoly::constant(Rational::from(i))))
}

/// `(-1)^(k-1) (k-1)! h (h+1) ... (h+k-2)`: the `x`-free part of
/// `y^(k-1) x^(k-1)` in normal form.
pub fn corrected_constant_part(k: u32) -> NcPoly {
    let sign = if (k - 1).is_multiple_of(2) { Rational::one() } else { -Rational::one() };
    rising_h(k - 1).scale(&(sign * Rational::factorial(k - 1)))
}

/// Returns `Z_k` with
/// `y^(k-1) x^(k-1) = (-1)^(k-1) (k-1)! h (h+1) ... (h+k-2) + x Z_k`.
pub fn extract_zk(k: u32) -> Result<NcPoly> {
    if k == 0 {
        return Err(Error::ZeroK);
    }
    let product = &NcPoly::y().pow(k - 1) * &NcPoly::x().pow(k - 1);
    let remainder = normal_form(&(&product - &corrected_constant_part(k)));
    let (zk, free) = remainder.split_left_x();
    if !free.is_zero() {
        return Err(Error::NotXDivisible(free.to_string()));
    }
    Ok(zk)
}

/// The eigenvalue of `h` on functions homogeneous of weight `w`.
pub fn h_eigenvalue(w: &Rational, d: &Rational, m: &Rational) -> Rational {
    let two = Rational::from_integer(2);
    w + (d + m + &two).checked_div(&two).expect("2 is nonzero")
}

/// Normal form of `[[x,y],h] + [[y,h],x] + [[h,x],y]`.
pub fn jacobi_residual() -> NcPoly {
    let (x, y, h) = (NcPoly::x(), NcPoly::y(), NcPoly::h());
    let c = NcPoly::commutator;
    let sum = &(&c(&c(&x, &y), &h) + &c(&c(&y, &h), &x)) + &c(&c(&h, &x), &y);
    normal_form(&sum)
}

impl Add<&NcPoly> for &NcPoly {
    type Output = NcPoly;
    fn add(self, rhs: &NcPoly) -> NcPoly {
        let mut out = self.clone();
        for (w, c) in &rhs.terms {
            out.add_term(w.clone(), c.clone());
        }
        out
    }
}

impl Sub<&NcPoly> for &NcPoly {
    type Output = NcPoly;
    fn sub(self, rhs: &NcPoly) -> NcPoly {
        self + &(-rhs)
    }
}

impl Neg for &NcPoly {
    type Output = NcPoly;
    fn neg(self) -> NcPoly {
        self.scale(&-Rational::one())
    }
}

/// Concatenation product, unreduced.
impl Mul<&NcPoly> for &NcPoly {
    type Output = NcPoly;
    fn mul(self, rhs: &NcPoly) -> NcPoly {
        let mut out = NcPoly::zero();
        for (wa, a) in &self.terms {
            for (wb, b) in &rhs.terms {
                let mut w = wa.clone();
                w.extend_from_slice(wb);
                out.add_term(w, a * b);
            }
        }
        out
    }
}

/// Terms by degree, then PBW-lexicographically, e.g. `-2*y - 2*h*y + x*y*y`.
impl fmt::Display for NcPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut terms: Vec<_> = self.terms.iter().collect();
        terms.sort_by(|a, b| a.0.len().cmp(&b.0.len()).then(a.0.cmp(b.0)));
        for (i, (w, c)) in terms.into_iter().enumerate() {
            let abs = c.abs();
            match (i, c.is_negative()) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            let letters: Vec<String> = w.iter().map(|l| l.symbol().to_string()).collect();
            if w.is_empty() {
                write!(f, "{abs}")?;
            } else if abs.is_one() {
                write!(f, "{}", letters.join("*"))?;
            } else {
                write!(f, "{abs}*{}", letters.join("*"))?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for NcPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "NcPoly({self})")
    }
}

impl FromStr for NcPoly {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if compact.is_empty() {
            return Err(Error::Parse("empty polynomial".into()));
        }
        let mut pieces = Vec::new();
        let mut current = String::new();
        for ch in compact.chars() {
            if (ch == '+' || ch == '-') && !current.is_empty() && !current.ends_with('*') {
                pieces.push(std::mem::take(&mut current));
            }
            current.push(ch);
        }
        pieces.push(current);

        let mut out = NcPoly::zero();
        for piece in pieces {
            let (sign, body) = match piece.strip_prefix('-') {
                Some(rest) => (-Rational::one(), rest),
                None => (Rational::one(), piece.strip_prefix('+').unwrap_or(&piece)),
            };
            let mut coeff = sign;
            let mut word = Word::new();
            for factor in body.split('*') {
                match factor {
                    "x" => word.push(Letter::X),
                    "h" => word.push(Letter::H),
                    "y" => word.push(Letter::Y),
                    "" => return Err(Error::Parse(format!("empty factor in {piece:?}"))),
                    num => coeff = coeff * num.parse::<Rational>()?,
                }
            }
            out.add_term(word, coeff);
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn nc(s: &str) -> NcPoly {
        s.parse().unwrap()
    }

    #[test]
    fn defining_relations() {
        assert_eq!(normal_form(&nc("y*x")), nc("x*y - h"));
        assert_eq!(normal_form(&nc("h*x")), nc("x*h + 2*x"));
        assert_eq!(normal_form(&nc("y*h")), nc("h*y + 2*y"));
    }

    #[test]
    fn two_step_reduction() {
        assert_eq!(normal_form(&nc("y*y*x")), nc("x*y*y - 2*h*y - 2*y"));
    }

    #[test]
    fn text_round_trip() {
        let p = nc("-2*h*y - 2*y + x*y*y");
        assert_eq!(p.to_string(), "-2*y - 2*h*y + x*y*y");
        assert_eq!(nc(&p.to_string()), p);
        assert_eq!(nc("3/2 - x"), &NcPoly::constant(Rational::new(3, 2)) - &NcPoly::x());
        assert!("x**y".parse::<NcPoly>().is_err());
        assert!("x*q".parse::<NcPoly>().is_err());
    }

    #[test]
    fn small_commutator_identities() {
        let check = verify_commutator_identity(CommutatorIdentity::YkX, 1).unwrap();
        assert!(check.holds);
        let lhs = normal_form(&NcPoly::commutator(&NcPoly::y().pow(2), &NcPoly::x()));
        assert_eq!(lhs, nc("-2*h*y - 2*y"));
        assert!(verify_commutator_identity(CommutatorIdentity::YkX, 2).unwrap().holds);
        let lhs = normal_form(&NcPoly::commutator(&NcPoly::x().pow(2), &NcPoly::y()));
        assert_eq!(lhs, normal_form(&nc("2*x*h + 2*x")));
        assert!(verify_commutator_identity(CommutatorIdentity::XkY, 2).unwrap().holds);
        assert!(verify_commutator_identity(CommutatorIdentity::XkY, 0).is_err());
    }

    #[test]
    fn zk_small_cases() {
        assert!(extract_zk(1).unwrap().is_zero());
        assert_eq!(corrected_constant_part(1), NcPoly::one());
        assert_eq!(extract_zk(2).unwrap(), NcPoly::y());
    }

    #[test]
    fn printed_h_power_form_has_no_x_divisible_remainder() {
        // h x - (-1) h = x h + 2x + h: the x-free part h survives.
        let remainder = normal_form(&(&(&NcPoly::h() * &NcPoly::x()) + &NcPoly::h()));
        let (_, free) = remainder.split_left_x();
        assert_eq!(free, NcPoly::h());
    }

    #[test]
    fn h_eigenvalues() {
        let q = |s: &str| s.parse::<Rational>().unwrap();
        // w = -(d+m)/2 - k at d=3, m=2, k=2
        assert_eq!(h_eigenvalue(&q("-9/2"), &q("3"), &q("2")), q("-1"));
        assert_eq!(h_eigenvalue(&q("0"), &q("-4"), &q("2")), q("0"));
        assert_eq!(h_eigenvalue(&q("-3/2"), &q("3"), &q("2")), q("2"));
    }

    #[test]
    fn jacobi() {
        assert!(jacobi_residual().is_zero());
    }

    #[test]
    fn evaluate_h_only_polynomials() {
        let q = |s: &str| s.parse::<Rational>().unwrap();
        assert_eq!(rising_h(2).evaluate_h(&q("-1")), Some(q("0")));
        assert_eq!(rising_h(3).evaluate_h(&q("-3")), Some(q("-6")));
        assert_eq!(NcPoly::x().evaluate_h(&q("1")), None);
    }
}
