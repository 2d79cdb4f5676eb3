//! Scalar abstraction over the element type of all tensors.
//!
//! Everything numeric in this crate is generic over [`Scalar`] so the same
//! code runs at f32 or f64. The concrete aliases live at the crate root.

use num_traits::{Float, FromPrimitive, NumAssign, ToPrimitive};

/// Element type of tensors: an IEEE float with the conversions and kernel
/// hooks the engine needs.
pub trait Scalar:
    Float + FromPrimitive + ToPrimitive + NumAssign + Send + Sync + std::fmt::Debug + std::fmt::Display + 'static
{
    /// Lossy conversion from f64. Panics only for values outside the type's
    /// range, which never happens for the constants this crate feeds it.
    #[inline]
    fn of(v: f64) -> Self {
        Self::from_f64(v).expect("constant not representable in scalar type")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().expect("scalar not representable as f64")
    }

    /// C[m x n] = op(A) * op(B) + beta * C, row-major slices.
    ///
    /// `ta`/`tb` select the transposed reading of A (stored k x m) or
    /// B (stored n x k). The default is a naive triple loop; f32/f64
    /// dispatch to a tuned kernel.
    fn gemm(ta: bool, tb: bool, m: usize, k: usize, n: usize, a: &[Self], b: &[Self], beta: Self, c: &mut [Self]) {
        assert_eq!(c.len(), m * n, "gemm output buffer size");
        assert_eq!(a.len(), m * k, "gemm lhs buffer size");
        assert_eq!(b.len(), k * n, "gemm rhs buffer size");
        if beta == Self::zero() {
            c.fill(Self::zero());
        } else if beta != Self::one() {
            for v in c.iter_mut() {
                *v *= beta;
            }
        }
        let at = |i: usize, p: usize| if ta { a[p * m + i] } else { a[i * k + p] };
        let bt = |p: usize, j: usize| if tb { b[j * k + p] } else { b[p * n + j] };
        for i in 0..m {
            for p in 0..k {
                let av = at(i, p);
                if av == Self::zero() {
                    continue;
                }
                for j in 0..n {
                    c[i * n + j] += av * bt(p, j);
                }
            }
        }
    }
}

macro_rules! mm_gemm {
    ($t:ty, $f:path) => {
        impl Scalar for $t {
            fn gemm(ta: bool, tb: bool, m: usize, k: usize, n: usize, a: &[Self], b: &[Self], beta: Self, c: &mut [Self]) {
                assert_eq!(c.len(), m * n, "gemm output buffer size");
                assert_eq!(a.len(), m * k, "gemm lhs buffer size");
                assert_eq!(b.len(), k * n, "gemm rhs buffer size");
                let (rsa, csa) = if ta { (1, m as isize) } else { (k as isize, 1) };
                let (rsb, csb) = if tb { (1, k as isize) } else { (n as isize, 1) };
                unsafe {
                    $f(
                        m, k, n, 1.0, a.as_ptr(), rsa, csa, b.as_ptr(), rsb, csb, beta,
                        c.as_mut_ptr(), n as isize, 1,
                    );
                }
            }
        }
    };
}

mm_gemm!(f32, matrixmultiply::sgemm);
mm_gemm!(f64, matrixmultiply::dgemm);
