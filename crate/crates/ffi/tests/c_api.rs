use std::ffi::CStr;
use std::ptr;

use nearfield_ffi::*;

fn scenario(nx: usize, ny: usize) -> *mut NfScenario {
    let mut cfg = std::mem::MaybeUninit::<NfScenarioConfig>::uninit();
    unsafe {
        assert_eq!(nf_scenario_default_config(cfg.as_mut_ptr()), NfStatus::Ok);
        let mut cfg = cfg.assume_init();
        cfg.nx = nx;
        cfg.ny = ny;
        let mut h = ptr::null_mut();
        assert_eq!(nf_scenario_new(&cfg, &mut h), NfStatus::Ok);
        h
    }
}

fn last_error() -> String {
    let mut buf = [0 as std::ffi::c_char; 256];
    unsafe {
        nf_last_error_message(buf.as_mut_ptr(), buf.len());
        CStr::from_ptr(buf.as_ptr()).to_string_lossy().into_owned()
    }
}

#[test]
fn default_config_is_reference_array() {
    let h = scenario(20, 200);
    unsafe {
        assert_eq!(nf_scenario_element_count(h), 4000);
        let (mut d, mut f) = (0.0, 0.0);
        assert_eq!(nf_fraunhofer(h, &mut d, &mut f), NfStatus::Ok);
        assert!((f - 201.86).abs() < 0.01, "{f}");
        nf_scenario_free(h);
    }
}

#[test]
fn invalid_config_reports_field() {
    let mut cfg = std::mem::MaybeUninit::<NfScenarioConfig>::uninit();
    unsafe {
        nf_scenario_default_config(cfg.as_mut_ptr());
        let mut cfg = cfg.assume_init();
        cfg.spacing_over_lambda = 0.3;
        let mut h = ptr::null_mut();
        assert_eq!(nf_scenario_new(&cfg, &mut h), NfStatus::InvalidConfig);
        assert!(h.is_null());
        assert!(last_error().contains("element_side_over_lambda"));
        assert_eq!(nf_scenario_new(ptr::null(), &mut h), NfStatus::NullPointer);
    }
}

#[test]
fn kernels_and_domain_errors() {
    let h = scenario(2, 2);
    let r = [0.0, 0.0, 1.0];
    let o = [0.0; 3];
    let (mut re, mut im) = (0.0, 0.0);
    let (mut fre, mut fim) = (0.0, 0.0);
    unsafe {
        assert_eq!(nf_kernel_near(h, r.as_ptr(), o.as_ptr(), &mut re, &mut im), NfStatus::Ok);
        assert_eq!(nf_kernel_far(h, r.as_ptr(), o.as_ptr(), &mut fre, &mut fim), NfStatus::Ok);
        assert_eq!((re, im), (fre, fim));
        assert_eq!(nf_kernel_near(h, r.as_ptr(), r.as_ptr(), &mut re, &mut im), NfStatus::DomainError);
        assert!(last_error().contains("singular"));

        let mut dyad = [0.0; 18];
        assert_eq!(nf_green_exact(h, r.as_ptr(), dyad.as_mut_ptr()), NfStatus::Ok);
        // symmetric: (0,1) == (1,0)
        assert_eq!(dyad[2..4], dyad[6..8]);
        nf_scenario_free(h);
    }
}

#[test]
fn channel_vector_and_beam_power() {
    let h = scenario(4, 6);
    let r = [0.0, 0.0, 0.2];
    unsafe {
        let n = nf_scenario_element_count(h);
        let mut re = vec![0.0; n];
        let mut im = vec![0.0; n];
        assert_eq!(
            nf_channel_vector(h, NfModel::Near, r.as_ptr(), re.as_mut_ptr(), im.as_mut_ptr(), n - 1),
            NfStatus::BufferTooSmall
        );
        assert_eq!(
            nf_channel_vector(h, NfModel::Near, r.as_ptr(), re.as_mut_ptr(), im.as_mut_ptr(), n),
            NfStatus::Ok
        );
        let norm_sqr: f64 = re.iter().zip(&im).map(|(a, b)| a * a + b * b).sum();
        let mut p = 0.0;
        assert_eq!(nf_beam_power(h, NfModel::Near, r.as_ptr(), r.as_ptr(), &mut p), NfStatus::Ok);
        let a = 0.5 * nf_scenario_wavelength(h);
        assert!((p - a * a * norm_sqr).abs() <= 1e-12 * p);

        let mut db = 1.0;
        let mut floored = 7;
        assert_eq!(nf_normalized_power_db(h, 0.0, &mut db, &mut floored), NfStatus::Ok);
        assert_eq!((db, floored), (-200.0, 1));
        nf_scenario_free(h);
    }
}

#[test]
fn schedule_on_a_ray() {
    let h = scenario(8, 40);
    let pos: Vec<f64> = (0..10).flat_map(|i| [0.0, 0.0, 0.05 + 0.05 * i as f64]).collect();
    unsafe {
        let mut count = 0usize;
        let mut idx = [usize::MAX; 10];
        assert_eq!(
            nf_schedule(h, NfModel::Far, pos.as_ptr(), 10, 3.0, idx.as_mut_ptr(), idx.len(), &mut count),
            NfStatus::Ok
        );
        assert_eq!((count, idx[0]), (1, 0));
        assert_eq!(
            nf_schedule(h, NfModel::Near, pos.as_ptr(), 10, 3.0, idx.as_mut_ptr(), 0, &mut count),
            NfStatus::BufferTooSmall
        );
        assert!(count >= 2);
        assert_eq!(
            nf_schedule(h, NfModel::Near, pos.as_ptr(), 10, 3.0, idx.as_mut_ptr(), idx.len(), &mut count),
            NfStatus::Ok
        );
        assert_eq!(idx[0], 0);
        nf_scenario_free(h);
    }
}

#[test]
fn null_handles_are_safe() {
    unsafe {
        nf_scenario_free(ptr::null_mut());
        assert_eq!(nf_scenario_element_count(ptr::null()), 0);
        let mut d = 0.0;
        assert_eq!(nf_fraunhofer(ptr::null(), &mut d, &mut d), NfStatus::NullPointer);
        assert!(!CStr::from_ptr(nf_version()).to_bytes().is_empty());
    }
}

#[test]
fn header_compiles_as_c() {
    let dir = env!("CARGO_MANIFEST_DIR");
    let header = format!("{dir}/include/nearfield.h");
    let text = std::fs::read_to_string(&header).unwrap();
    for sym in ["nf_scenario_new", "nf_channel_vector", "nf_schedule", "NF_STATUS_DOMAIN_ERROR"] {
        assert!(text.contains(sym), "{sym} missing from header");
    }
    let tmp = std::env::temp_dir().join(format!("nearfield_header_{}.c", std::process::id()));
    std::fs::write(
        &tmp,
        "#include \"nearfield.h\"\nint main(void) { NfScenarioConfig c; NfScenario *h = 0;\n\
         if (nf_scenario_default_config(&c) != NF_STATUS_OK) return 1;\n\
         if (nf_scenario_new(&c, &h) != NF_STATUS_OK) return 1;\n\
         nf_scenario_free(h);\n  return 0;\n}\n",
    )
    .unwrap();
    let obj = tmp.with_extension("o");
    let status = std::process::Command::new("cc")
        .args(["-std=c99", "-Wall", "-Werror", "-c"])
        .arg(format!("-I{dir}/include"))
        .arg(&tmp)
        .arg("-o")
        .arg(&obj)
        .status()
        .expect("C compiler");
    let _ = std::fs::remove_file(&tmp);
    let _ = std::fs::remove_file(&obj);
    assert!(status.success());
}
