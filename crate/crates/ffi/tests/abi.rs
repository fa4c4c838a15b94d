use std::ffi::CStr;
use std::ptr;

use mutual_review_ffi::*;

fn last_error() -> String {
    let mut buf = [0 as std::ffi::c_char; 256];
    let needed = unsafe { mr_last_error_message(buf.as_mut_ptr(), buf.len()) };
    if needed == 0 {
        return String::new();
    }
    unsafe { CStr::from_ptr(buf.as_ptr()) }
        .to_string_lossy()
        .into_owned()
}

#[test]
fn version_is_a_c_string() {
    let v = unsafe { CStr::from_ptr(mr_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

#[test]
fn invalid_config_returns_null_with_message() {
    let cfg = mr_config_new(25, 30, 0.15);
    assert!(cfg.is_null());
    assert!(last_error().contains("m <= N-1"), "{}", last_error());
}

#[test]
fn null_handles_are_reported() {
    let mut out = 0.0;
    let status = unsafe { mr_borda_pmf(ptr::null(), 1, 0, &mut out) };
    assert_eq!(status, MrStatus::NullPointer);
    assert!(last_error().contains("config is null"));
    assert_eq!(unsafe { mr_config_funded_count(ptr::null()) }, 0);
    unsafe {
        mr_config_free(ptr::null_mut());
        mr_profile_free(ptr::null_mut());
    }
}

#[test]
fn error_message_truncates_and_reports_full_length() {
    assert!(mr_config_new(1, 1, 0.5).is_null());
    let full = unsafe { mr_last_error_message(ptr::null_mut(), 0) };
    let mut small = [0x7f as std::ffi::c_char; 4];
    let needed = unsafe { mr_last_error_message(small.as_mut_ptr(), small.len()) };
    assert_eq!(needed, full);
    assert!(full > 4);
    assert_eq!(small[3], 0);
}

#[test]
fn success_clears_the_previous_error() {
    assert!(mr_config_new(25, 0, 0.15).is_null());
    let cfg = mr_config_new(25, 7, 0.15);
    assert!(!cfg.is_null());
    let mut out = 0.0;
    assert_eq!(unsafe { mr_borda_pmf(cfg, 25, 6, &mut out) }, MrStatus::Ok);
    assert_eq!(unsafe { mr_last_error_message(ptr::null_mut(), 0) }, 0);
    unsafe { mr_config_free(cfg) };
}

#[test]
fn oracle_calls_match_the_library() {
    let cfg = mr_config_new(25, 7, 0.15);
    assert_eq!(unsafe { mr_config_funded_count(cfg) }, 4);
    let mut total = 0.0;
    for k in 0..7 {
        let mut p = 0.0;
        assert_eq!(unsafe { mr_borda_pmf(cfg, 13, k, &mut p) }, MrStatus::Ok);
        total += p;
    }
    assert!((total - 1.0).abs() < 1e-12);
    let mut mbc = 0.0;
    assert_eq!(
        unsafe { mr_expected_mbc(cfg, 21, 0, &mut mbc) },
        MrStatus::Ok
    );
    assert!((mbc - 20.0 / 24.0).abs() < 1e-12);
    assert_eq!(
        unsafe { mr_expected_mbc(cfg, 21, 8, &mut mbc) },
        MrStatus::InvalidArgument
    );
    assert_eq!(
        unsafe { mr_borda_pmf(cfg, 26, 0, &mut mbc) },
        MrStatus::InvalidArgument
    );

    let mut truthful = 0.0;
    let mut evil = 0.0;
    unsafe {
        assert_eq!(
            mr_utility(cfg, MrUtility::Truthful, 25, &mut truthful),
            MrStatus::Ok
        );
        assert_eq!(
            mr_utility(cfg, MrUtility::Evil, 25, &mut evil),
            MrStatus::Ok
        );
        mr_config_free(cfg);
    }
    // Reversing pays off for the top proposal when there is no bonus.
    assert!(evil > truthful);
}

#[test]
fn experiment_fills_buffers_and_probabilities_sum_to_t() {
    let cfg = mr_config_new(10, 3, 0.2);
    let profile = mr_profile_new_honest();
    let mut p = [0.0; 10];
    let mut se = [0.0; 10];
    let status =
        unsafe { mr_run_experiment(cfg, profile, 500, 3, 1, p.as_mut_ptr(), se.as_mut_ptr(), 10) };
    assert_eq!(status, MrStatus::Ok, "{}", last_error());
    assert!((p.iter().sum::<f64>() - 2.0).abs() < 1e-9);
    let status =
        unsafe { mr_run_experiment(cfg, profile, 500, 3, 1, p.as_mut_ptr(), se.as_mut_ptr(), 9) };
    assert_eq!(status, MrStatus::BufferTooSmall);
    let status =
        unsafe { mr_run_experiment(cfg, profile, 0, 3, 1, p.as_mut_ptr(), se.as_mut_ptr(), 10) };
    assert_eq!(status, MrStatus::InvalidArgument);
    unsafe {
        mr_profile_free(profile);
        mr_config_free(cfg);
    }
}

#[test]
fn identical_arms_give_exactly_zero_paired_delta() {
    let cfg = mr_config_new(10, 3, 0.2);
    let a = mr_profile_new_honest();
    let b = mr_profile_new_honest();
    let mut d = [1.0; 10];
    let mut se = [1.0; 10];
    let status = unsafe {
        mr_delta_experiment(
            cfg,
            a,
            true,
            b,
            true,
            0,
            0,
            300,
            9,
            true,
            1,
            d.as_mut_ptr(),
            se.as_mut_ptr(),
            10,
        )
    };
    assert_eq!(status, MrStatus::Ok);
    assert!(d.iter().chain(&se).all(|&x| x == 0.0));
    let status = unsafe {
        mr_delta_experiment(
            cfg,
            a,
            true,
            b,
            true,
            3,
            0,
            300,
            9,
            true,
            1,
            d.as_mut_ptr(),
            se.as_mut_ptr(),
            10,
        )
    };
    assert_eq!(status, MrStatus::InvalidArgument);
    unsafe {
        mr_profile_free(a);
        mr_profile_free(b);
        mr_config_free(cfg);
    }
}

#[test]
fn profile_setters_validate() {
    let p = mr_profile_new_honest();
    unsafe {
        assert_eq!(mr_profile_set_noise(p, -1.0), MrStatus::InvalidArgument);
        assert_eq!(mr_profile_set_noise(p, 1.0), MrStatus::Ok);
        assert_eq!(mr_profile_set_reverse(p, 0), MrStatus::InvalidArgument);
        assert_eq!(mr_profile_set_reverse(p, 21), MrStatus::Ok);
        assert_eq!(
            mr_profile_set_noisy(p, 23, f64::NAN),
            MrStatus::InvalidArgument
        );
        assert_eq!(
            mr_profile_set_one_sided_favor(p, 4, 4),
            MrStatus::InvalidArgument
        );
        assert_eq!(mr_profile_set_one_sided_favor(p, 18, 20), MrStatus::Ok);
        assert_eq!(mr_profile_set_reciprocal_pair(p, 22, 23), MrStatus::Ok);
        let merits = [17usize, 23];
        assert_eq!(
            mr_profile_set_controversy(p, merits.as_ptr(), 2, 5.0, 1.5),
            MrStatus::InvalidArgument
        );
        assert_eq!(
            mr_profile_set_controversy(p, merits.as_ptr(), 2, 5.0, 0.5),
            MrStatus::Ok
        );
        assert_eq!(
            mr_profile_set_controversy(p, ptr::null(), 2, 5.0, 0.5),
            MrStatus::NullPointer
        );
        mr_profile_free(p);
    }
}

#[test]
fn out_of_range_strategy_surfaces_at_run_time() {
    let cfg = mr_config_new(10, 3, 0.2);
    let profile = mr_profile_new_honest();
    let mut p = [0.0; 10];
    let mut se = [0.0; 10];
    unsafe {
        assert_eq!(mr_profile_set_reverse(profile, 11), MrStatus::Ok);
        let status = mr_run_experiment(cfg, profile, 10, 1, 1, p.as_mut_ptr(), se.as_mut_ptr(), 10);
        assert_eq!(status, MrStatus::InvalidArgument);
        assert!(last_error().contains("outside 1..=10"));
        mr_profile_free(profile);
        mr_config_free(cfg);
    }
}

#[test]
fn infeasible_mutual_free_assignment_reports_sampling_exhausted() {
    let cfg = mr_config_new(5, 3, 0.2);
    let profile = mr_profile_new_honest();
    let mut p = [0.0; 5];
    let mut se = [0.0; 5];
    unsafe {
        assert_eq!(mr_config_set_mutual_review(cfg, false), MrStatus::Ok);
        let status = mr_run_experiment(cfg, profile, 4, 1, 1, p.as_mut_ptr(), se.as_mut_ptr(), 5);
        assert_eq!(status, MrStatus::SamplingExhausted);
        assert_eq!(
            mr_config_set_utility_exponent(cfg, 0.0),
            MrStatus::InvalidArgument
        );
        mr_profile_free(profile);
        mr_config_free(cfg);
    }
}
