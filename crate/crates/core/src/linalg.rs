//! Small dense complex linear algebra for the Evans computation.

use crate::C64;

pub type Mat4 = [[C64; 4]; 4];

pub const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
pub const ONE: C64 = C64 { re: 1.0, im: 0.0 };

/// Determinant by Gaussian elimination with partial pivoting.
pub fn det4(m: &Mat4) -> C64 {
    let mut a = *m;
    let mut det = ONE;
    for col in 0..4 {
        let pivot = (col..4).max_by(|&i, &j| a[i][col].norm().partial_cmp(&a[j][col].norm()).unwrap()).unwrap();
        if a[pivot][col] == ZERO {
            return ZERO;
        }
        if pivot != col {
            a.swap(pivot, col);
            det = -det;
        }
        det *= a[col][col];
        for row in col + 1..4 {
            let factor = a[row][col] / a[col][col];
            let pivot_row = a[col];
            for (dst, v) in a[row][col..].iter_mut().zip(&pivot_row[col..]) {
                *dst -= factor * v;
            }
        }
    }
    det
}

pub fn det2(m: [[C64; 2]; 2]) -> C64 {
    m[0][0] * m[1][1] - m[0][1] * m[1][0]
}

pub fn mat_vec(m: &Mat4, v: &[C64; 4]) -> [C64; 4] {
    let mut out = [ZERO; 4];
    for (o, row) in out.iter_mut().zip(m) {
        *o = row.iter().zip(v).map(|(a, b)| a * b).sum();
    }
    out
}

/// Column-stored 4×2 frame.
pub type Frame = [[C64; 4]; 2];

/// Modified Gram–Schmidt on two columns; returns the orthonormal frame and
/// the diagonal of `R` (the off-diagonal entry does not affect `det R`).
pub fn qr_frame(v: &Frame) -> (Frame, [C64; 2]) {
    let n0 = norm(&v[0]);
    let q0 = v[0].map(|z| z / n0);
    let proj = inner(&q0, &v[1]);
    let mut w = v[1];
    for (wk, qk) in w.iter_mut().zip(&q0) {
        *wk -= proj * qk;
    }
    let n1 = norm(&w);
    let q1 = w.map(|z| z / n1);
    ([q0, q1], [C64::new(n0, 0.0), C64::new(n1, 0.0)])
}

/// `⟨u, v⟩ = Σ conj(u_k) v_k`.
pub fn inner(u: &[C64; 4], v: &[C64; 4]) -> C64 {
    u.iter().zip(v).map(|(a, b)| a.conj() * b).sum()
}

pub fn norm(v: &[C64; 4]) -> f64 {
    num_traits::Float::sqrt(v.iter().map(|z| z.norm_sqr()).sum::<f64>())
}

/// `Q* V` for two 4×2 frames.
pub fn frame_overlap(q: &Frame, v: &Frame) -> [[C64; 2]; 2] {
    [[inner(&q[0], &v[0]), inner(&q[0], &v[1])], [inner(&q[1], &v[0]), inner(&q[1], &v[1])]]
}
