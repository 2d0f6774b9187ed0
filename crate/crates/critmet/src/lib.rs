use openblas_src as _;

pub fn eigh_bench(n: usize) -> f64 {
    let mut a = vec![0.0f64; n * n];
    for i in 0..n {
        a[i * n + i] = i as f64;
        if i + 1 < n {
            a[i * n + i + 1] = 1.0;
            a[(i + 1) * n + i] = 1.0;
        }
    }
    let ni = n as i32;
    let mut w = vec![0.0f64; n];
    let mut z = vec![0.0f64; n];
    let mut m = 0i32;
    let mut isuppz = vec![0i32; 2];
    let mut info = 0i32;
    let (il, iu) = (1i32, 1i32);
    let (vl, vu) = (0.0f64, 0.0f64);
    let abstol = 0.0f64;
    let mut wkopt = 0.0f64;
    let mut iwkopt = 0i32;
    let m1 = -1i32;
    unsafe {
        lapack_sys::dsyevr_(
            &(b'V' as i8), &(b'I' as i8), &(b'L' as i8),
            &ni, a.as_mut_ptr(), &ni, &vl, &vu, &il, &iu, &abstol,
            &mut m, w.as_mut_ptr(), z.as_mut_ptr(), &ni, isuppz.as_mut_ptr(),
            &mut wkopt, &m1, &mut iwkopt, &m1, &mut info,
        );
        let lwork = wkopt as i32;
        let liwork = iwkopt;
        let mut work = vec![0.0f64; lwork as usize];
        let mut iwork = vec![0i32; liwork as usize];
        lapack_sys::dsyevr_(
            &(b'V' as i8), &(b'I' as i8), &(b'L' as i8),
            &ni, a.as_mut_ptr(), &ni, &vl, &vu, &il, &iu, &abstol,
            &mut m, w.as_mut_ptr(), z.as_mut_ptr(), &ni, isuppz.as_mut_ptr(),
            work.as_mut_ptr(), &lwork, iwork.as_mut_ptr(), &liwork, &mut info,
        );
    }
    assert_eq!(info, 0);
    assert_eq!(m, 1);
    w[0]
}
