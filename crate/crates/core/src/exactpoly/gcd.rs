//! Multivariate gcd over the rationals (recursive primitive PRS) and
//! squarefree decomposition.

use super::multipoly::MultiPoly;

/// Greatest common divisor, normalized to a monic lex-leading coefficient.
/// `gcd(0, 0) = 0`.
pub fn gcd(f: &MultiPoly, g: &MultiPoly) -> MultiPoly {
    assert_eq!(f.nvars(), g.nvars());
    if f.is_zero() {
        return g.monic();
    }
    if g.is_zero() {
        return f.monic();
    }
    let var = match (f.main_var(), g.main_var()) {
        (None, _) | (_, None) => return MultiPoly::one(f.nvars()),
        (Some(a), Some(b)) => a.max(b),
    };
    if !f.contains_var(var) {
        return gcd(f, &content_in(g, var));
    }
    if !g.contains_var(var) {
        return gcd(&content_in(f, var), g);
    }
    let cf = content_in(f, var);
    let cg = content_in(g, var);
    let c = gcd(&cf, &cg);
    let mut a = f.div_exact(&cf).expect("content divides").primitive_integer().0;
    let mut b = g.div_exact(&cg).expect("content divides").primitive_integer().0;
    if a.degree_in(var) < b.degree_in(var) {
        std::mem::swap(&mut a, &mut b);
    }
    while !b.is_zero() {
        if !b.contains_var(var) {
            // b is a nonzero polynomial free of `var` and a is primitive.
            a = MultiPoly::one(f.nvars());
            break;
        }
        let r = a.prem(&b, var);
        a = b;
        // Clearing the integer content as well keeps coefficients small.
        b = if r.is_zero() { r } else { primitive_part_in(&r, var).primitive_integer().0 };
    }
    let pa = primitive_part_in(&a, var);
    (&c * &pa).monic()
}

/// Gcd of the coefficients of `f` viewed as a polynomial in `var`.
pub fn content_in(f: &MultiPoly, var: usize) -> MultiPoly {
    let mut acc = MultiPoly::zero(f.nvars());
    for c in f.to_univariate(var) {
        if c.is_zero() {
            continue;
        }
        acc = gcd(&acc, &c);
        if acc.is_constant() {
            return MultiPoly::one(f.nvars());
        }
    }
    acc
}

pub fn primitive_part_in(f: &MultiPoly, var: usize) -> MultiPoly {
    if f.is_zero() {
        return f.clone();
    }
    let c = content_in(f, var);
    f.div_exact(&c).expect("content divides")
}

/// Squarefree decomposition: returns `(factor, multiplicity)` pairs with
/// nonconstant, pairwise coprime factors whose product (with
/// multiplicities) equals `f` up to a rational constant.
pub fn squarefree_decomposition(f: &MultiPoly) -> Vec<(MultiPoly, u32)> {
    let mut out: Vec<(MultiPoly, u32)> = Vec::new();
    if f.is_zero() || f.is_constant() {
        return out;
    }
    let var = f.main_var().expect("nonconstant");
    let cont = content_in(f, var);
    let pp = f.div_exact(&cont).expect("content divides");
    for (p, m) in squarefree_decomposition(&cont) {
        merge(&mut out, p, m);
    }
    for (p, m) in yun(&pp, var) {
        merge(&mut out, p, m);
    }
    out.sort_by_key(|(_, m)| *m);
    out
}

fn merge(out: &mut Vec<(MultiPoly, u32)>, p: MultiPoly, m: u32) {
    if let Some(slot) = out.iter_mut().find(|(_, k)| *k == m) {
        slot.0 = (&slot.0 * &p).monic();
    } else {
        out.push((p.monic(), m));
    }
}

/// Yun's algorithm for a polynomial primitive in `var`.
fn yun(f: &MultiPoly, var: usize) -> Vec<(MultiPoly, u32)> {
    let mut out = Vec::new();
    let df = f.derivative(var);
    let a0 = gcd(f, &df);
    let mut b = f.div_exact(&a0).expect("gcd divides");
    let c = df.div_exact(&a0).expect("gcd divides");
    let mut d = &c - &b.derivative(var);
    let mut i = 1;
    while !b.is_constant() {
        let a = gcd(&b, &d);
        let b_next = b.div_exact(&a).expect("gcd divides");
        let c_next = d.div_exact(&a).expect("gcd divides");
        d = &c_next - &b_next.derivative(var);
        if !a.is_constant() {
            out.push((a, i));
        }
        b = b_next;
        i += 1;
    }
    out
}

/// Product of the distinct factors of `f`.
pub fn squarefree_part(f: &MultiPoly) -> MultiPoly {
    squarefree_decomposition(f)
        .into_iter()
        .fold(MultiPoly::one(f.nvars()), |acc, (p, _)| &acc * &p)
}

pub fn is_squarefree(f: &MultiPoly) -> bool {
    squarefree_decomposition(f).iter().all(|(_, m)| *m == 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactpoly::Q;
    use num_traits::One;

    fn v(n: usize, i: usize) -> MultiPoly {
        MultiPoly::var(n, i)
    }

    #[test]
    fn univariate_gcd() {
        let x = v(1, 0);
        let one = MultiPoly::one(1);
        let f = &(&x - &one) * &(&x + &one);
        let g = &(&x - &one) * &(&x + &one.scale(&Q::from_integer(2.into())));
        assert_eq!(gcd(&f, &g), &x - &one);
    }

    #[test]
    fn bivariate_gcd_with_content() {
        let x = v(2, 0);
        let y = v(2, 1);
        let common = &(&x * &y) + &MultiPoly::one(2);
        let f = &(&common * &x) * &(&y + &x);
        let g = &(&common * &x) * &(&y - &x);
        assert_eq!(gcd(&f, &g), (&common * &x).monic());
    }

    #[test]
    fn coprime_gives_one() {
        let x = v(3, 0);
        let y = v(3, 1);
        let z = v(3, 2);
        let f = &(&x * &x) + &(&y * &z);
        let g = &(&x * &y) - &(&z * &z);
        assert!(gcd(&f, &g).is_constant());
    }

    #[test]
    fn squarefree_decomposition_by_multiplicity() {
        let x = v(3, 0);
        let y = v(3, 1);
        let z = v(3, 2);
        let conic = &(&x * &z) - &(&y * &y);
        let f = &(&conic * &x.pow(2)) * &(&y - &z).pow(3);
        let dec = squarefree_decomposition(&f);
        assert_eq!(dec.len(), 3);
        assert_eq!(dec[0].1, 1);
        assert_eq!(dec[0].0, conic.monic());
        assert_eq!(dec[1], (x.monic(), 2));
        assert_eq!(dec[2], ((&y - &z).monic(), 3));
        assert!(!is_squarefree(&f));
        assert!(is_squarefree(&conic));
        let prod = dec
            .iter()
            .fold(MultiPoly::one(3), |acc, (p, m)| &acc * &p.pow(*m));
        assert!(prod.div_exact(&f).map(|q| q.is_constant()).unwrap_or(false));
        let _ = Q::one();
    }
}
