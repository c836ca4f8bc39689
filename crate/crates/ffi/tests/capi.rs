use std::ffi::{CStr, CString};
use std::ptr;

use abstractmeta::abstractnet::{self, Checkpoint, NetConfig};
use abstractmeta::metadb::Scaler;
use abstractmeta_ffi::*;
use ndarray::Array2;

fn c(s: &str) -> CString {
    CString::new(s).unwrap()
}

fn last_error() -> String {
    let p = amf_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

fn write_iris_like(dir: &std::path::Path) -> std::path::PathBuf {
    let mut text = String::from("a,b,class\n");
    for i in 0..60 {
        let k = i % 3;
        text.push_str(&format!("{},{},c{k}\n", k as f64 * 2.0 + (i as f64 * 0.37).sin(), (i as f64 * 0.11).cos()));
    }
    let path = dir.join("toy.csv");
    std::fs::write(&path, text).unwrap();
    path
}

#[test]
fn dataset_and_metafeatures_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = c(write_iris_like(dir.path()).to_str().unwrap());
    let target = c("class");
    let mut ds = ptr::null_mut();
    unsafe {
        assert_eq!(amf_dataset_load_csv(path.as_ptr(), target.as_ptr(), &mut ds), AmfStatus::AmfOk);
        let (mut n, mut d, mut k) = (0, 0, 0);
        assert_eq!(amf_dataset_shape(ds, &mut n, &mut d, &mut k), AmfStatus::AmfOk);
        assert_eq!((n, d, k), (60, 2, 3));

        let mut mf = ptr::null_mut();
        assert_eq!(amf_metafeatures_extract(ds, 7, &mut mf), AmfStatus::AmfOk);
        let len = amf_metafeatures_len(mf);
        assert!(len > 20);
        let mut written = 0;
        let mut small = vec![0.0; 1];
        assert_eq!(
            amf_metafeatures_values(mf, small.as_mut_ptr(), 1, &mut written),
            AmfStatus::AmfErrBufferTooSmall
        );
        assert_eq!(written, len);
        let mut buf = vec![0.0; len];
        assert_eq!(amf_metafeatures_values(mf, buf.as_mut_ptr(), len, &mut written), AmfStatus::AmfOk);
        let first = CStr::from_ptr(amf_metafeatures_name(mf, 0)).to_str().unwrap();
        assert_eq!(first, "nr_inst.min");
        assert_eq!(buf[0], 60.0);
        assert!(amf_metafeatures_name(mf, len).is_null());
        amf_metafeatures_free(mf);
        amf_dataset_free(ds);
    }
}

#[test]
fn errors_set_status_and_message() {
    let missing = c("/nonexistent/file.csv");
    let target = c("class");
    let mut ds = ptr::null_mut();
    unsafe {
        assert_eq!(amf_dataset_load_csv(missing.as_ptr(), target.as_ptr(), &mut ds), AmfStatus::AmfErrIo);
        assert!(last_error().contains("nonexistent"));
        assert!(ds.is_null());
        assert_eq!(amf_dataset_load_csv(ptr::null(), target.as_ptr(), &mut ds), AmfStatus::AmfErrNullPointer);
        assert_eq!(amf_dataset_shape(ptr::null(), ptr::null_mut(), ptr::null_mut(), ptr::null_mut()), AmfStatus::AmfErrNullPointer);
        // freeing null is a no-op
        amf_dataset_free(ptr::null_mut());
        amf_metafeatures_free(ptr::null_mut());
        amf_checkpoint_free(ptr::null_mut());
    }
    let ok = [0.1, 0.2];
    let mut r = AmfBayesResult::default();
    unsafe {
        assert_eq!(amf_bayes_correlated_ttest(ok.as_ptr(), 2, 0.1, 0.01, &mut r), AmfStatus::AmfOk);
    }
    assert!(amf_last_error_message().is_null());
}

#[test]
fn auc_and_bayes() {
    // perfect separation of two classes
    let scores = [0.9, 0.1, 0.8, 0.2, 0.3, 0.7, 0.1, 0.9];
    let labels = [0usize, 0, 1, 1];
    let mut auc = 0.0;
    unsafe {
        assert_eq!(amf_auc_multiclass(scores.as_ptr(), 4, 2, labels.as_ptr(), &mut auc), AmfStatus::AmfOk);
    }
    assert_eq!(auc, 1.0);

    let diffs: Vec<f64> = (0..10).map(|i| 0.05 + 0.01 * (i as f64 - 4.5)).collect();
    let mut r = AmfBayesResult::default();
    unsafe {
        assert_eq!(amf_bayes_correlated_ttest(diffs.as_ptr(), diffs.len(), 0.1, 0.01, &mut r), AmfStatus::AmfOk);
    }
    assert!((r.left + r.rope + r.right - 1.0).abs() < 1e-12);
    assert!(r.right > 0.9);
    unsafe {
        assert_eq!(amf_bayes_correlated_ttest(diffs.as_ptr(), 1, 0.1, 0.01, &mut r), AmfStatus::AmfErrInvalidInput);
    }
}

#[test]
fn checkpoint_latent_matches_core() {
    let cfg = NetConfig {
        epochs: 2,
        ..NetConfig::default()
    };
    let x = Array2::from_shape_fn((12, 6), |(i, j)| ((i * 7 + j * 3) % 11) as f64);
    let y = Array2::from_shape_fn((12, 3), |(i, j)| 0.5 + 0.01 * (i + j) as f64);
    let scaler = Scaler::fit(x.view());
    let z = scaler.transform(x.view());
    let mut net = abstractnet::init(&cfg, 6).unwrap();
    abstractnet::train(&mut net, z.view(), y.view(), &cfg).unwrap();
    let expected = abstractnet::extract_latent(&net, z.view()).unwrap();

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("net.json");
    Checkpoint::new(cfg, Some(scaler), net).save(&path).unwrap();
    let cpath = c(path.to_str().unwrap());
    let mut ck = ptr::null_mut();
    unsafe {
        assert_eq!(amf_checkpoint_load(cpath.as_ptr(), &mut ck), AmfStatus::AmfOk);
        let (mut d, mut w) = (0, 0);
        assert_eq!(amf_checkpoint_dims(ck, &mut d, &mut w), AmfStatus::AmfOk);
        assert_eq!((d, w), (6, 16));
        let flat: Vec<f64> = x.iter().copied().collect();
        let mut out = vec![0.0; 12 * 16];
        assert_eq!(
            amf_checkpoint_extract_latent(ck, flat.as_ptr(), 12, 6, out.as_mut_ptr(), 10),
            AmfStatus::AmfErrBufferTooSmall
        );
        assert_eq!(
            amf_checkpoint_extract_latent(ck, flat.as_ptr(), 12, 5, out.as_mut_ptr(), out.len()),
            AmfStatus::AmfErrShape
        );
        assert_eq!(
            amf_checkpoint_extract_latent(ck, flat.as_ptr(), 12, 6, out.as_mut_ptr(), out.len()),
            AmfStatus::AmfOk
        );
        amf_checkpoint_free(ck);
        let want: Vec<f64> = expected.0.iter().copied().collect();
        assert_eq!(out, want);
    }
}

#[test]
fn header_declares_every_export() {
    let crate_dir = std::path::Path::new(env!("CARGO_MANIFEST_DIR"));
    let header = std::fs::read_to_string(crate_dir.join("include/abstractmeta.h")).unwrap();
    let source = std::fs::read_to_string(crate_dir.join("src/lib.rs")).unwrap();
    let exports: Vec<&str> = source
        .lines()
        .filter_map(|l| l.split("extern \"C\" fn ").nth(1))
        .filter_map(|rest| rest.split('(').next())
        .collect();
    assert!(exports.len() >= 14);
    for name in exports {
        assert!(name.starts_with("amf_"), "{name}");
        assert!(header.contains(&format!("{name}(")), "header lacks {name}");
    }
    assert!(header.contains("AMF_ERR_BUFFER_TOO_SMALL = 7"));
}

#[test]
fn header_compiles_as_c() {
    let Ok(cc) = which_cc() else { return };
    let crate_dir = std::path::Path::new(env!("CARGO_MANIFEST_DIR"));
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("probe.c");
    std::fs::write(
        &src,
        "#include \"abstractmeta.h\"\nint main(void) { AmfBayesResult r; (void)r; return AMF_OK; }\n",
    )
    .unwrap();
    let status = std::process::Command::new(cc)
        .arg("-fsyntax-only")
        .arg("-Wall")
        .arg("-Werror")
        .arg("-I")
        .arg(crate_dir.join("include"))
        .arg(&src)
        .status()
        .unwrap();
    assert!(status.success());
}

fn which_cc() -> Result<&'static str, ()> {
    for cc in ["cc", "gcc", "clang"] {
        if std::process::Command::new(cc).arg("--version").output().is_ok() {
            return Ok(cc);
        }
    }
    Err(())
}
