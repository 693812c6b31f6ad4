//! Sylvester resultants with a fraction-free (Bareiss) determinant.

use super::multipoly::MultiPoly;
use super::PolyError;

/// Resultant of `f` and `g` with respect to `var`, using their actual
/// degrees in that variable.
pub fn resultant(f: &MultiPoly, g: &MultiPoly, var: usize) -> Result<MultiPoly, PolyError> {
    if f.is_zero() || g.is_zero() {
        return Err(PolyError::ZeroPolynomial);
    }
    let m = f.degree_in(var).unwrap_or(0);
    let n = g.degree_in(var).unwrap_or(0);
    resultant_formal(f, g, var, m, n)
}

/// Resultant with prescribed formal degrees `m >= deg f`, `n >= deg g`.
/// This is the resultant of the corresponding binary forms, which stays
/// correct when leading coefficients vanish on specialization.
pub fn resultant_formal(
    f: &MultiPoly,
    g: &MultiPoly,
    var: usize,
    m: u32,
    n: u32,
) -> Result<MultiPoly, PolyError> {
    if f.is_zero() || g.is_zero() {
        return Err(PolyError::ZeroPolynomial);
    }
    if f.degree_in(var).unwrap_or(0) > m || g.degree_in(var).unwrap_or(0) > n {
        return Err(PolyError::DegreeMismatch);
    }
    let matrix = sylvester_matrix(f, g, var, m as usize, n as usize);
    Ok(bareiss_determinant(matrix, f.nvars()))
}

/// Rows `0..n` carry shifted coefficients of `f` (highest power first),
/// rows `n..n+m` those of `g`.
pub fn sylvester_matrix(
    f: &MultiPoly,
    g: &MultiPoly,
    var: usize,
    m: usize,
    n: usize,
) -> Vec<Vec<MultiPoly>> {
    let nv = f.nvars();
    let coeffs = |p: &MultiPoly, deg: usize| -> Vec<MultiPoly> {
        let mut c = p.to_univariate(var);
        c.resize(deg + 1, MultiPoly::zero(nv));
        c.reverse();
        c
    };
    let fc = coeffs(f, m);
    let gc = coeffs(g, n);
    let size = m + n;
    let mut mat = vec![vec![MultiPoly::zero(nv); size]; size];
    for r in 0..n {
        for (k, c) in fc.iter().enumerate() {
            mat[r][r + k] = c.clone();
        }
    }
    for r in 0..m {
        for (k, c) in gc.iter().enumerate() {
            mat[n + r][r + k] = c.clone();
        }
    }
    mat
}

/// Fraction-free determinant over the polynomial ring.
pub fn bareiss_determinant(mut m: Vec<Vec<MultiPoly>>, nvars: usize) -> MultiPoly {
    let size = m.len();
    if size == 0 {
        return MultiPoly::one(nvars);
    }
    let mut prev = MultiPoly::one(nvars);
    let mut negate = false;
    for k in 0..size - 1 {
        if m[k][k].is_zero() {
            match (k + 1..size).find(|&i| !m[i][k].is_zero()) {
                Some(i) => {
                    m.swap(k, i);
                    negate = !negate;
                }
                None => return MultiPoly::zero(nvars),
            }
        }
        for i in k + 1..size {
            for j in k + 1..size {
                let num = &(&m[i][j] * &m[k][k]) - &(&m[i][k] * &m[k][j]);
                m[i][j] = num.div_exact(&prev).expect("Bareiss step divides exactly");
            }
            m[i][k] = MultiPoly::zero(nvars);
        }
        prev = m[k][k].clone();
    }
    let det = m[size - 1][size - 1].clone();
    if negate {
        -&det
    } else {
        det
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactpoly::Q;
    use num_bigint::BigInt;

    fn c(n: usize, v: i64) -> MultiPoly {
        MultiPoly::constant(n, Q::from_integer(BigInt::from(v)))
    }

    // variables: x = 0, a = 1, b = 2
    #[test]
    fn linear_resultant() {
        let x = MultiPoly::var(3, 0);
        let a = MultiPoly::var(3, 1);
        let b = MultiPoly::var(3, 2);
        let r = resultant(&(&x - &a), &(&x - &b), 0).unwrap();
        assert_eq!(r, &a - &b);
    }

    #[test]
    fn substitution_resultant() {
        let x = MultiPoly::var(3, 0);
        let a = MultiPoly::var(3, 1);
        let b = MultiPoly::var(3, 2);
        let r = resultant(&(&x.pow(2) - &a), &(&x - &b), 0).unwrap();
        assert_eq!(r, &b.pow(2) - &a);
    }

    #[test]
    fn constant_resultant_of_two_quadratics() {
        let x = MultiPoly::var(1, 0);
        let r = resultant(&(&x.pow(2) + &c(1, 1)), &(&x.pow(2) - &c(1, 1)), 0).unwrap();
        assert_eq!(r, c(1, 4));
    }

    #[test]
    fn hand_sylvester_oracle_for_quadratics() {
        // det [[1,0,1,0],[0,1,0,1],[1,0,-1,0],[0,1,0,-1]] expanded by hand:
        // subtract row0 from row2, row1 from row3 -> [[1,0,1,0],[0,1,0,1],[0,0,-2,0],[0,0,0,-2]] = 4.
        let x = MultiPoly::var(1, 0);
        let m = sylvester_matrix(&(&x.pow(2) + &c(1, 1)), &(&x.pow(2) - &c(1, 1)), 0, 2, 2);
        assert_eq!(m[0][0], c(1, 1));
        assert_eq!(m[2][2], c(1, -1));
        assert_eq!(bareiss_determinant(m, 1), c(1, 4));
    }

    #[test]
    fn zero_input_rejected() {
        let x = MultiPoly::var(1, 0);
        assert_eq!(
            resultant(&MultiPoly::zero(1), &x, 0),
            Err(PolyError::ZeroPolynomial)
        );
    }

    #[test]
    fn swap_sign_rule() {
        let x = MultiPoly::var(2, 0);
        let a = MultiPoly::var(2, 1);
        let f = &(&x.pow(2) - &a) + &x;
        let g = &x.pow(3) - &c(2, 2);
        let r1 = resultant(&f, &g, 0).unwrap();
        let r2 = resultant(&g, &f, 0).unwrap();
        // (-1)^(2*3) = 1
        assert_eq!(r1, r2);
        let h = &x - &a;
        let r3 = resultant(&g, &h, 0).unwrap();
        let r4 = resultant(&h, &g, 0).unwrap();
        assert_eq!(r3, -&r4);
    }
}
