use std::ffi::{CStr, CString};
use std::path::Path;
use std::process::Command;
use std::ptr;

use kne_ffi::*;

fn last_error() -> String {
    let p = kne_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

fn two_triangles() -> *mut KneGraph {
    // Triangle 0-1-2, triangle 3-4-5, and an isolated edge 6-7.
    let src = [0u32, 1, 2, 3, 4, 5, 6];
    let dst = [1u32, 2, 0, 4, 5, 3, 7];
    let mut g = ptr::null_mut();
    let st = unsafe { kne_graph_from_edges(src.as_ptr(), dst.as_ptr(), src.len(), 8, &mut g) };
    assert_eq!(st, KneStatus::KNE_OK);
    g
}

fn small_options() -> KneTrainOptions {
    let mut o = unsafe { std::mem::zeroed() };
    unsafe { kne_train_options_default(&mut o) };
    o.dim = 4;
    o.num_walks = 5;
    o.seed = 3;
    o
}

#[test]
fn defaults_match_library() {
    let o = small_options();
    assert_eq!((o.num_walks, o.walk_length, o.window, o.negatives, o.epochs), (5, 10, 10, 5, 1));
    assert_eq!((o.p, o.q, o.lr, o.kernel, o.kernel_param), (1.0, 1.0, 0.025, KNE_KERNEL_GAUSS, 2.0));
    assert_eq!(o.deterministic, 1);
}

#[test]
fn graph_handles() {
    let g = two_triangles();
    unsafe {
        assert_eq!(kne_graph_node_count(g), 8);
        assert_eq!(kne_graph_edge_count(g), 7);
        let mut l = ptr::null_mut();
        assert_eq!(kne_graph_lcc(g, &mut l), KneStatus::KNE_OK);
        assert_eq!((kne_graph_node_count(l), kne_graph_edge_count(l)), (3, 3));
        kne_graph_free(l);
        kne_graph_free(g);
        assert_eq!(kne_graph_node_count(ptr::null()), 0);
        kne_graph_free(ptr::null_mut());
    }
}

#[test]
fn load_from_file() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("g.edges");
    std::fs::write(&p, "# comment\na b\nb c\n").unwrap();
    let c = CString::new(p.to_str().unwrap()).unwrap();
    let mut g = ptr::null_mut();
    unsafe {
        assert_eq!(kne_graph_load(c.as_ptr(), &mut g), KneStatus::KNE_OK);
        assert_eq!(kne_graph_edge_count(g), 2);
        kne_graph_free(g);
    }
    let missing = CString::new(dir.path().join("none").to_str().unwrap()).unwrap();
    let st = unsafe { kne_graph_load(missing.as_ptr(), &mut g) };
    assert_eq!(st, KneStatus::KNE_ERR_IO);
    assert!(last_error().contains("none"));
    std::fs::write(&p, "a\n").unwrap();
    assert_eq!(unsafe { kne_graph_load(c.as_ptr(), &mut g) }, KneStatus::KNE_ERR_PARSE);
}

#[test]
fn train_copy_and_save() {
    let g = two_triangles();
    let o = small_options();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("emb.txt");
    let cpath = CString::new(path.to_str().unwrap()).unwrap();
    unsafe {
        let mut m = ptr::null_mut();
        assert_eq!(kne_train(g, &o, &mut m), KneStatus::KNE_OK);
        assert_eq!((kne_model_node_count(m), kne_model_dim(m)), (8, 4));
        let mut buf = vec![0.0; 32];
        assert_eq!(kne_model_copy_embeddings(m, buf.as_mut_ptr(), 32), KneStatus::KNE_OK);
        assert!(buf.iter().all(|x| x.is_finite()) && buf.iter().any(|&x| x != 0.0));
        assert_eq!(kne_model_copy_embeddings(m, buf.as_mut_ptr(), 31), KneStatus::KNE_ERR_DIMENSION);

        let mut again = ptr::null_mut();
        assert_eq!(kne_train(g, &o, &mut again), KneStatus::KNE_OK);
        let mut buf2 = vec![0.0; 32];
        kne_model_copy_embeddings(again, buf2.as_mut_ptr(), 32);
        assert_eq!(buf, buf2);

        assert_eq!(kne_model_save(m, cpath.as_ptr()), KneStatus::KNE_OK);
        let saved = kne::Embeddings::read(&path).unwrap();
        assert_eq!(saved.tokens[0], "0");
        for (a, b) in saved.data.iter().zip(&buf) {
            assert!((a - b).abs() < 1e-8);
        }
        kne_model_free(m);
        kne_model_free(again);
        kne_graph_free(g);
    }
}

#[test]
fn invalid_arguments_report_errors() {
    let g = two_triangles();
    let mut m = ptr::null_mut();
    unsafe {
        let mut o = small_options();
        o.kernel = 9;
        assert_eq!(kne_train(g, &o, &mut m), KneStatus::KNE_ERR_INVALID_ARGUMENT);
        assert!(last_error().contains("kernel"));
        o = small_options();
        o.kernel_param = -1.0;
        assert_eq!(kne_train(g, &o, &mut m), KneStatus::KNE_ERR_INVALID_ARGUMENT);
        o = small_options();
        o.dim = 0;
        assert_eq!(kne_train(g, &o, &mut m), KneStatus::KNE_ERR_INVALID_ARGUMENT);
        assert!(m.is_null());
        assert_eq!(kne_train(ptr::null(), &o, &mut m), KneStatus::KNE_ERR_NULL_POINTER);
        assert_eq!(kne_train(g, &o, ptr::null_mut()), KneStatus::KNE_ERR_NULL_POINTER);
        let (s, d) = ([0u32], [8u32]);
        let mut h = ptr::null_mut();
        assert_eq!(
            kne_graph_from_edges(s.as_ptr(), d.as_ptr(), 1, 8, &mut h),
            KneStatus::KNE_ERR_INVALID_ARGUMENT
        );
        kne_graph_free(g);
    }
}

#[test]
fn kernel_eval_closed_form() {
    let (x, y) = ([1.0, 1.0], [0.0, 0.0]);
    let mut out = 0.0;
    unsafe {
        assert_eq!(kne_kernel_eval(KNE_KERNEL_GAUSS, 2.0, x.as_ptr(), y.as_ptr(), 2, &mut out), KneStatus::KNE_OK);
        assert!((out - (-1f64).exp()).abs() < 1e-15);
        assert_eq!(kne_kernel_eval(KNE_KERNEL_SCH, 2.0, x.as_ptr(), y.as_ptr(), 1, &mut out), KneStatus::KNE_OK);
        assert!((out - 0.25).abs() < 1e-15);
        assert_eq!(
            kne_kernel_eval(KNE_KERNEL_SCH, 2.0, x.as_ptr(), ptr::null(), 1, &mut out),
            KneStatus::KNE_ERR_NULL_POINTER
        );
    }
}

#[test]
fn version_string() {
    let v = unsafe { CStr::from_ptr(kne_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}

#[test]
fn header_compiles_as_c_and_cpp() {
    let header = Path::new(env!("CARGO_MANIFEST_DIR")).join("include/kne.h");
    let text = std::fs::read_to_string(&header).unwrap();
    for name in ["kne_train", "kne_graph_load", "KNE_ERR_NUMERICAL", "typedef struct KneModel KneModel"] {
        assert!(text.contains(name), "header lacks {name}");
    }
    for (compiler, lang) in [("cc", "c"), ("c++", "c++")] {
        match Command::new(compiler).args(["-fsyntax-only", "-Wall", "-Werror", "-x", lang]).arg(&header).status() {
            Ok(s) => assert!(s.success(), "{compiler} rejected the header"),
            Err(_) => eprintln!("{compiler} not found; skipping syntax check"),
        }
    }
}
