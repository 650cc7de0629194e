//! Exercises the C ABI the way a foreign binding would: handles in, status
//! codes out, buffers copied across the boundary.

use std::ptr;

use matchlab_capi::*;

#[test]
fn sample_center_match_roundtrip() {
    unsafe {
        let mut a: *mut MlGraph = ptr::null_mut();
        let mut b: *mut MlGraph = ptr::null_mut();
        let status = ml_sample_pair(40, 0.5, 0.5, 0.9, 7, &mut a, &mut b);
        assert_eq!(status, MlStatus::Ok);
        assert_eq!(ml_graph_n(a), 40);
        assert_eq!(ml_graph_n(b), 40);

        // Entries are 0/1 with a hollow diagonal.
        let mut value = -1.0;
        assert_eq!(ml_graph_get(a, 3, 3, &mut value), MlStatus::Ok);
        assert_eq!(value, 0.0);
        assert_eq!(ml_graph_get(a, 0, 1, &mut value), MlStatus::Ok);
        assert!(value == 0.0 || value == 1.0);

        // Center both by USVT with a generous threshold.
        let t = 2.0 * (40.0f64).sqrt();
        let mut ca: *mut MlGraph = ptr::null_mut();
        let mut cb: *mut MlGraph = ptr::null_mut();
        assert_eq!(ml_usvt_center(a, t, true, true, &mut ca), MlStatus::Ok);
        assert_eq!(ml_usvt_center(b, t, true, true, &mut cb), MlStatus::Ok);

        // Match centered graphs starting from the truth.
        let mut result: *mut MlMatchResult = ptr::null_mut();
        let status = ml_match(ca, cb, 30, 1e-6, true, 1, 0, &mut result);
        assert_eq!(status, MlStatus::Ok);
        assert!(ml_match_converged(result));
        assert!(ml_match_iterations(result) >= 1);

        let mut accuracy = 0.0;
        assert_eq!(
            ml_match_accuracy_vs_identity(result, 0, &mut accuracy),
            MlStatus::Ok
        );
        assert!(accuracy > 0.9, "accuracy {accuracy}");

        let mut image = [0u64; 40];
        assert_eq!(
            ml_match_permutation(result, image.as_mut_ptr(), image.len()),
            MlStatus::Ok
        );
        let mut seen = [false; 40];
        for &v in &image {
            assert!((v as usize) < 40 && !seen[v as usize]);
            seen[v as usize] = true;
        }

        ml_match_free(result);
        ml_graph_free(ca);
        ml_graph_free(cb);
        ml_graph_free(a);
        ml_graph_free(b);
    }
}

#[test]
fn dense_roundtrip_and_usvt_rank() {
    unsafe {
        // Hollow all-ones on 4 vertices: singular values (3, 1, 1, 1).
        let mut data = [1.0f64; 16];
        for i in 0..4 {
            data[i * 4 + i] = 0.0;
        }
        let mut g: *mut MlGraph = ptr::null_mut();
        assert_eq!(ml_graph_new_dense(4, data.as_ptr(), &mut g), MlStatus::Ok);

        let mut rank = usize::MAX;
        let mut est: *mut MlGraph = ptr::null_mut();
        assert_eq!(
            ml_usvt_estimate(g, 2.0, true, true, &mut est, &mut rank),
            MlStatus::Ok
        );
        assert_eq!(rank, 1);
        let mut buf = vec![0.0f64; 16];
        assert_eq!(
            ml_graph_copy_dense(est, buf.as_mut_ptr(), buf.len()),
            MlStatus::Ok
        );
        for i in 0..4 {
            for j in 0..4 {
                let want = if i == j { 0.0 } else { 0.75 };
                assert!((buf[i * 4 + j] - want).abs() < 1e-10);
            }
        }

        // Too-small output buffer is reported, not written out of bounds.
        let mut small = vec![0.0f64; 3];
        assert_eq!(
            ml_graph_copy_dense(est, small.as_mut_ptr(), small.len()),
            MlStatus::BufferTooSmall
        );

        ml_graph_free(est);
        ml_graph_free(g);
    }
}

#[test]
fn error_paths() {
    unsafe {
        let mut out: *mut MlGraph = ptr::null_mut();

        // Null pointers.
        assert_eq!(
            ml_graph_new_dense(2, ptr::null(), &mut out),
            MlStatus::NullPointer
        );
        assert!(out.is_null());

        // Non-finite input.
        let bad = [f64::NAN, 0.0, 0.0, 0.0];
        assert_eq!(
            ml_graph_new_dense(2, bad.as_ptr(), &mut out),
            MlStatus::NonFinite
        );

        // Infeasible correlation for unequal marginals.
        let mut a: *mut MlGraph = ptr::null_mut();
        let mut b: *mut MlGraph = ptr::null_mut();
        assert_eq!(
            ml_sample_pair(10, 0.8, 0.2, 0.3, 1, &mut a, &mut b),
            MlStatus::InvalidSpec
        );
        assert!(a.is_null() && b.is_null());

        // Dimension mismatch in matching.
        let small = [0.0f64; 4];
        let large = [0.0f64; 9];
        let mut g2: *mut MlGraph = ptr::null_mut();
        let mut g3: *mut MlGraph = ptr::null_mut();
        assert_eq!(ml_graph_new_dense(2, small.as_ptr(), &mut g2), MlStatus::Ok);
        assert_eq!(ml_graph_new_dense(3, large.as_ptr(), &mut g3), MlStatus::Ok);
        let mut result: *mut MlMatchResult = ptr::null_mut();
        assert_eq!(
            ml_match(g2, g3, 30, 1e-6, false, 1, 0, &mut result),
            MlStatus::Dimension
        );
        assert!(result.is_null());

        // Missing file.
        let path = std::ffi::CString::new("/definitely/not/here.edges").unwrap();
        assert_eq!(
            ml_graph_load_edge_list(path.as_ptr(), false, 0, &mut out),
            MlStatus::Io
        );

        // Freeing null handles is a no-op.
        ml_graph_free(ptr::null_mut());
        ml_match_free(ptr::null_mut());

        ml_graph_free(g2);
        ml_graph_free(g3);

        // Status messages are non-null, NUL-terminated statics.
        let message = ml_status_message(MlStatus::SizeLimit);
        assert!(!message.is_null());
        assert!(!std::ffi::CStr::from_ptr(message).to_str().unwrap().is_empty());
        assert!(!ml_version().is_null());
    }
}
