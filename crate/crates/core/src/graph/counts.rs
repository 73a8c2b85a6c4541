use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::numeric::Factorials;

fn pow2(e: usize) -> BigInt {
    BigInt::one() << e
}

/// Labeled DAGs on `0..=n` nodes.
pub fn count_dags(n: usize) -> Vec<BigInt> {
    let f = Factorials::new(n);
    let mut a: Vec<BigInt> = vec![BigInt::one()];
    for i in 1..=n {
        let mut acc = BigInt::zero();
        for (l, al) in a.iter().enumerate() {
            let term = f.binomial(i, l) * pow2(l * (i - l)) * al;
            if (i - l) % 2 == 1 {
                acc += term;
            } else {
                acc -= term;
            }
        }
        a.push(acc);
    }
    a
}

/// Labeled connected simple graphs on `0..=n` nodes, with `c_0 = 0`.
pub fn count_connected(n: usize) -> Vec<BigInt> {
    let f = Factorials::new(n);
    let all = |k: usize| pow2(k * k.saturating_sub(1) / 2);
    let mut c: Vec<BigInt> = vec![BigInt::zero()];
    for i in 1..=n {
        let mut rooted = BigInt::zero();
        for (m, cm) in c.iter().enumerate().take(i).skip(1) {
            rooted += f.binomial(i, m) * BigInt::from(m) * cm * all(i - m);
        }
        c.push(all(i) - rooted / BigInt::from(i));
    }
    c
}

/// Labeled forests on `0..=n` nodes.
pub fn count_forests(n: usize) -> Vec<BigInt> {
    let f = Factorials::new(n);
    let trees = |m: usize| -> BigInt {
        if m <= 2 {
            BigInt::one()
        } else {
            BigInt::from(m).pow((m - 2) as u32)
        }
    };
    let mut out: Vec<BigInt> = vec![BigInt::one()];
    for i in 1..=n {
        let mut acc = BigInt::zero();
        for m in 1..=i {
            acc += f.binomial(i - 1, m - 1) * trees(m) * &out[i - m];
        }
        out.push(acc);
    }
    out
}
