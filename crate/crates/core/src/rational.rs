//! Exact rationals and the small amount of linear algebra done over them.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::ser::SerializeStruct;
use serde::Serializer;

pub type Q = BigRational;

pub fn q(num: i64, den: i64) -> Q {
    Q::new(BigInt::from(num), BigInt::from(den))
}

pub fn q_int(n: usize) -> Q {
    Q::from_integer(BigInt::from(n))
}

/// `num/den` with an explicit denominator, even for integers.
pub fn format_q(x: &Q) -> String {
    format!("{}/{}", x.numer(), x.denom())
}

fn json_int<S: Serializer>(st: &mut S::SerializeStruct, key: &'static str, v: &BigInt) -> Result<(), S::Error> {
    match i64::try_from(v) {
        Ok(n) => st.serialize_field(key, &n),
        Err(_) => st.serialize_field(key, &v.to_string()),
    }
}

/// Serializes as `{"num": N, "den": D}` in lowest terms with `D > 0`.
pub fn serialize_q<S: Serializer>(x: &Q, s: S) -> Result<S::Ok, S::Error> {
    let mut st = s.serialize_struct("Rational", 2)?;
    json_int::<S>(&mut st, "num", x.numer())?;
    json_int::<S>(&mut st, "den", x.denom())?;
    st.end()
}

pub fn serialize_q_vec<S: Serializer>(xs: &[Q], s: S) -> Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    #[derive(serde::Serialize)]
    struct W<'a>(#[serde(serialize_with = "serialize_q")] &'a Q);
    let mut seq = s.serialize_seq(Some(xs.len()))?;
    for x in xs {
        seq.serialize_element(&W(x))?;
    }
    seq.end()
}

pub fn serialize_q_matrix<S: Serializer>(m: &[Vec<Q>], s: S) -> Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    #[derive(serde::Serialize)]
    struct Row<'a>(#[serde(serialize_with = "serialize_q_vec")] &'a [Q]);
    let mut seq = s.serialize_seq(Some(m.len()))?;
    for row in m {
        seq.serialize_element(&Row(row))?;
    }
    seq.end()
}

/// Solves `a x = b` by Gaussian elimination; `None` when `a` is singular.
/// Row `p` shared and row `r` mutable, for `p != r`.
fn pair(a: &mut [Vec<Q>], p: usize, r: usize) -> (&[Q], &mut [Q]) {
    if p < r {
        let (lo, hi) = a.split_at_mut(r);
        (&lo[p], &mut hi[0])
    } else {
        let (lo, hi) = a.split_at_mut(p);
        (&hi[0], &mut lo[r])
    }
}

pub fn solve(mut a: Vec<Vec<Q>>, mut b: Vec<Q>) -> Option<Vec<Q>> {
    let n = b.len();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, pivot);
        b.swap(col, pivot);
        let inv = a[col][col].recip();
        for r in 0..n {
            if r == col || a[r][col].is_zero() {
                continue;
            }
            let factor = &a[r][col] * &inv;
            let (pivot, row) = pair(&mut a, col, r);
            for (x, p) in row[col..].iter_mut().zip(&pivot[col..]) {
                *x -= &factor * p;
            }
            let delta = &factor * &b[col];
            b[r] -= delta;
        }
    }
    Some((0..n).map(|i| &b[i] / &a[i][i]).collect())
}

/// Exact positive semidefiniteness of a symmetric matrix by symmetric
/// elimination: a negative pivot, or a zero pivot with a nonzero entry in its
/// row, rules it out.
pub fn is_psd(m: &[Vec<Q>]) -> bool {
    let n = m.len();
    let mut a: Vec<Vec<Q>> = m.to_vec();
    for k in 0..n {
        let pivot = a[k][k].clone();
        if pivot.is_negative() {
            return false;
        }
        if pivot.is_zero() {
            if (k + 1..n).any(|j| !a[k][j].is_zero() || !a[j][k].is_zero()) {
                return false;
            }
            continue;
        }
        for i in k + 1..n {
            if a[i][k].is_zero() {
                continue;
            }
            let factor = &a[i][k] / &pivot;
            let (pivot, row) = pair(&mut a, k, i);
            for (x, p) in row[k..].iter_mut().zip(&pivot[k..]) {
                *x -= &factor * p;
            }
        }
    }
    true
}

/// Determinant by fraction elimination.
pub fn determinant(m: &[Vec<Q>]) -> Q {
    let n = m.len();
    let mut a = m.to_vec();
    let mut det = Q::one();
    for col in 0..n {
        let Some(pivot) = (col..n).find(|&r| !a[r][col].is_zero()) else {
            return Q::zero();
        };
        if pivot != col {
            a.swap(col, pivot);
            det = -det;
        }
        det *= a[col][col].clone();
        for r in col + 1..n {
            if a[r][col].is_zero() {
                continue;
            }
            let factor = &a[r][col] / &a[col][col];
            let (pivot, row) = pair(&mut a, col, r);
            for (x, p) in row[col..].iter_mut().zip(&pivot[col..]) {
                *x -= &factor * p;
            }
        }
    }
    det
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solves_small_system() {
        // x = y/2, y = z/2, z = 1/2 + x/2.
        let h = q(1, 2);
        let a = vec![
            vec![q(1, 1), -h.clone(), q(0, 1)],
            vec![q(0, 1), q(1, 1), -h.clone()],
            vec![-h.clone(), q(0, 1), q(1, 1)],
        ];
        let x = solve(a, vec![q(0, 1), q(0, 1), h]).unwrap();
        assert_eq!(x, vec![q(1, 7), q(2, 7), q(4, 7)]);
    }

    #[test]
    fn singular_system_has_no_solution() {
        assert!(solve(vec![vec![q(1, 1), q(1, 1)], vec![q(2, 1), q(2, 1)]], vec![q(0, 1), q(0, 1)]).is_none());
    }

    #[test]
    fn psd_cases() {
        assert!(is_psd(&[vec![q(1, 1), q(1, 1)], vec![q(1, 1), q(1, 1)]]));
        assert!(!is_psd(&[vec![q(1, 1), q(2, 1)], vec![q(2, 1), q(1, 1)]]));
        assert!(!is_psd(&[vec![q(0, 1), q(1, 1)], vec![q(1, 1), q(1, 1)]]));
        assert!(is_psd(&[vec![q(0, 1), q(0, 1)], vec![q(0, 1), q(3, 1)]]));
        // Leading minors are 1, 0, 0 but the trailing 2x2 block is indefinite.
        let m = vec![
            vec![q(1, 1), q(1, 1), q(0, 1)],
            vec![q(1, 1), q(1, 1), q(0, 1)],
            vec![q(0, 1), q(0, 1), q(-1, 1)],
        ];
        assert!(!is_psd(&m));
    }

    #[test]
    fn determinant_matches_hand_value() {
        let m = vec![vec![q(2, 1), q(1, 1)], vec![q(1, 1), q(3, 1)]];
        assert_eq!(determinant(&m), q(5, 1));
    }

    #[test]
    fn format_has_denominator() {
        assert_eq!(format_q(&q(2, 4)), "1/2");
        assert_eq!(format_q(&q(1, 1)), "1/1");
        assert_eq!(format_q(&q(0, 5)), "0/1");
    }
}
