//! Dense eigensolvers backed by LAPACK (`zheev`, `zgeev`) from the system
//! OpenBLAS. LAPACK expects column-major storage, so inputs are copied into
//! a column-major scratch buffer before each call; at the dimensions this
//! crate works with (d <= 64, superoperators up to d^2) the copies are
//! negligible next to the factorizations.

use ndarray::prelude::*;
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

extern "C" {
    fn zheev_(
        jobz: *const u8,
        uplo: *const u8,
        n: *const i32,
        a: *mut C64,
        lda: *const i32,
        w: *mut f64,
        work: *mut C64,
        lwork: *const i32,
        rwork: *mut f64,
        info: *mut i32,
    );
    fn zgeev_(
        jobvl: *const u8,
        jobvr: *const u8,
        n: *const i32,
        a: *mut C64,
        lda: *const i32,
        w: *mut C64,
        vl: *mut C64,
        ldvl: *const i32,
        vr: *mut C64,
        ldvr: *const i32,
        work: *mut C64,
        lwork: *const i32,
        rwork: *mut f64,
        info: *mut i32,
    );
    fn zgesv_(
        n: *const i32,
        nrhs: *const i32,
        a: *mut C64,
        lda: *const i32,
        ipiv: *mut i32,
        b: *mut C64,
        ldb: *const i32,
        info: *mut i32,
    );
}

fn to_col_major(a: &Array2<C64>) -> Vec<C64> {
    let n = a.nrows();
    let mut buf = Vec::with_capacity(n * n);
    for j in 0..n {
        for i in 0..n {
            buf.push(a[[i, j]]);
        }
    }
    buf
}

fn from_col_major(buf: &[C64], n: usize) -> Array2<C64> {
    let mut out = Array2::zeros((n, n));
    for j in 0..n {
        for i in 0..n {
            out[[i, j]] = buf[j * n + i];
        }
    }
    out
}

fn check_square(a: &Array2<C64>) -> Result<usize> {
    if a.nrows() != a.ncols() {
        return Err(Error::NotSquare {
            rows: a.nrows(),
            cols: a.ncols(),
        });
    }
    Ok(a.nrows())
}

fn zheev(a: &Array2<C64>, vectors: bool) -> Result<(Array1<f64>, Option<Array2<C64>>)> {
    let n = check_square(a)?;
    if n == 0 {
        return Ok((Array1::zeros(0), vectors.then(|| Array2::zeros((0, 0)))));
    }
    let jobz = if vectors { b"V" } else { b"N" };
    let ni = n as i32;
    let mut buf = to_col_major(a);
    let mut w = vec![0.0f64; n];
    let mut rwork = vec![0.0f64; (3 * n).saturating_sub(2).max(1)];
    let mut info = 0i32;

    // Workspace query, then the actual factorization.
    let mut probe = [C64::new(0.0, 0.0)];
    let query = -1i32;
    unsafe {
        zheev_(
            jobz.as_ptr(),
            b"L".as_ptr(),
            &ni,
            buf.as_mut_ptr(),
            &ni,
            w.as_mut_ptr(),
            probe.as_mut_ptr(),
            &query,
            rwork.as_mut_ptr(),
            &mut info,
        );
    }
    if info != 0 {
        return Err(Error::Lapack {
            routine: "zheev",
            info,
        });
    }
    let lwork = (probe[0].re as i32).max(2 * ni);
    let mut work = vec![C64::new(0.0, 0.0); lwork as usize];
    unsafe {
        zheev_(
            jobz.as_ptr(),
            b"L".as_ptr(),
            &ni,
            buf.as_mut_ptr(),
            &ni,
            w.as_mut_ptr(),
            work.as_mut_ptr(),
            &lwork,
            rwork.as_mut_ptr(),
            &mut info,
        );
    }
    if info != 0 {
        return Err(Error::Lapack {
            routine: "zheev",
            info,
        });
    }
    let vecs = vectors.then(|| from_col_major(&buf, n));
    Ok((Array1::from(w), vecs))
}

/// Eigenvalues (ascending) and eigenvectors (as columns) of a Hermitian
/// matrix. Only the lower triangle is referenced.
pub fn eigh(a: &Array2<C64>) -> Result<(Array1<f64>, Array2<C64>)> {
    let (w, v) = zheev(a, true)?;
    Ok((w, v.expect("requested vectors")))
}

/// Eigenvalues (ascending) of a Hermitian matrix.
pub fn eigh_vals(a: &Array2<C64>) -> Result<Array1<f64>> {
    Ok(zheev(a, false)?.0)
}

fn zgeev(a: &Array2<C64>, vectors: bool) -> Result<(Array1<C64>, Option<Array2<C64>>)> {
    let n = check_square(a)?;
    if n == 0 {
        return Ok((Array1::zeros(0), vectors.then(|| Array2::zeros((0, 0)))));
    }
    let jobvr = if vectors { b"V" } else { b"N" };
    let ni = n as i32;
    let mut buf = to_col_major(a);
    let mut w = vec![C64::new(0.0, 0.0); n];
    let mut vr = vec![C64::new(0.0, 0.0); if vectors { n * n } else { 1 }];
    let mut vl = [C64::new(0.0, 0.0)];
    let ldvl = 1i32;
    let ldvr = if vectors { ni } else { 1 };
    let mut rwork = vec![0.0f64; 2 * n];
    let mut info = 0i32;

    let mut probe = [C64::new(0.0, 0.0)];
    let query = -1i32;
    unsafe {
        zgeev_(
            b"N".as_ptr(),
            jobvr.as_ptr(),
            &ni,
            buf.as_mut_ptr(),
            &ni,
            w.as_mut_ptr(),
            vl.as_mut_ptr(),
            &ldvl,
            vr.as_mut_ptr(),
            &ldvr,
            probe.as_mut_ptr(),
            &query,
            rwork.as_mut_ptr(),
            &mut info,
        );
    }
    if info != 0 {
        return Err(Error::Lapack {
            routine: "zgeev",
            info,
        });
    }
    let lwork = (probe[0].re as i32).max(2 * ni);
    let mut work = vec![C64::new(0.0, 0.0); lwork as usize];
    unsafe {
        zgeev_(
            b"N".as_ptr(),
            jobvr.as_ptr(),
            &ni,
            buf.as_mut_ptr(),
            &ni,
            w.as_mut_ptr(),
            vl.as_mut_ptr(),
            &ldvl,
            vr.as_mut_ptr(),
            &ldvr,
            work.as_mut_ptr(),
            &lwork,
            rwork.as_mut_ptr(),
            &mut info,
        );
    }
    if info != 0 {
        return Err(Error::Lapack {
            routine: "zgeev",
            info,
        });
    }
    let vecs = vectors.then(|| from_col_major(&vr, n));
    Ok((Array1::from(w), vecs))
}

/// Eigenvalues and right eigenvectors (as columns, unit 2-norm) of a general
/// complex matrix. Eigenvalues come in LAPACK order, which is deterministic
/// for a fixed input but otherwise unspecified.
pub fn eig(a: &Array2<C64>) -> Result<(Array1<C64>, Array2<C64>)> {
    let (w, v) = zgeev(a, true)?;
    Ok((w, v.expect("requested vectors")))
}

/// Eigenvalues of a general complex matrix.
pub fn eig_vals(a: &Array2<C64>) -> Result<Array1<C64>> {
    Ok(zgeev(a, false)?.0)
}

/// Solves A x = b for a general complex square A by LU factorization with
/// partial pivoting. A singular (to working precision) A is reported as a
/// LAPACK error with the offending pivot index.
pub fn solve(a: &Array2<C64>, b: &Array1<C64>) -> Result<Array1<C64>> {
    let n = check_square(a)?;
    if b.len() != n {
        return Err(Error::DimensionMismatch {
            left: n,
            right: b.len(),
            context: "linear solve",
        });
    }
    if n == 0 {
        return Ok(Array1::zeros(0));
    }
    let ni = n as i32;
    let nrhs = 1i32;
    let mut buf = to_col_major(a);
    let mut rhs: Vec<C64> = b.to_vec();
    let mut ipiv = vec![0i32; n];
    let mut info = 0i32;
    unsafe {
        zgesv_(
            &ni,
            &nrhs,
            buf.as_mut_ptr(),
            &ni,
            ipiv.as_mut_ptr(),
            rhs.as_mut_ptr(),
            &ni,
            &mut info,
        );
    }
    if info != 0 {
        return Err(Error::Lapack {
            routine: "zgesv",
            info,
        });
    }
    Ok(Array1::from(rhs))
}
