//! End-to-end CLI tests: documents in, documents or reports out, with the
//! advertised exit codes (0 pass, 1 mathematical failure, 2 input error).

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use dgmod::algebra::builtin_catalog;
use dgmod::graded::GradedMap;
use dgmod::json;
use dgmod::limits::{DirectedSystem, Presentation};
use dgmod::matrix::Matrix;
use dgmod::module::{
    algebra_as_module, free_module, map_from_free, residue_module, ModuleMap, Side,
};
use std::sync::Arc;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dgmod")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn write_doc(dir: &Path, name: &str, doc: &serde_json::Value) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, json::render(doc)).unwrap();
    p
}

#[test]
fn validate_and_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let a = Arc::new(builtin_catalog("dual_numbers(2)").unwrap());
    let apath = write_doc(dir.path(), "a.json", &json::algebra_to_doc(&a));
    let ok = run(&["validate", apath.to_str().unwrap()]);
    assert_eq!(ok.status.code(), Some(0), "{}", stdout(&ok));
    assert!(stdout(&ok).contains("[pass]"));

    // malformed JSON is an input error
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{ not json").unwrap();
    assert_eq!(run(&["validate", bad.to_str().unwrap()]).status.code(), Some(2));

    // a module document validates too
    let m = algebra_as_module(&a, Side::Left);
    let mpath = write_doc(dir.path(), "m.json", &json::module_to_doc(&m));
    assert_eq!(run(&["validate", mpath.to_str().unwrap()]).status.code(), Some(0));

    // --field mismatch is an input error
    let mismatch = run(&["--field", "Q", "validate", mpath.to_str().unwrap()]);
    assert_eq!(mismatch.status.code(), Some(2));
}

#[test]
fn dualizable_verdicts() {
    let dir = tempfile::tempdir().unwrap();
    let a = Arc::new(builtin_catalog("dual_numbers(2)").unwrap());
    let free = write_doc(
        dir.path(),
        "free.json",
        &json::module_to_doc(&free_module(&a, &[0, 1], Side::Left)),
    );
    let good = run(&["dualizable", free.to_str().unwrap()]);
    assert_eq!(good.status.code(), Some(0), "{}", stdout(&good));
    assert!(stdout(&good).contains("\"dualizable\": true"));

    let k = write_doc(
        dir.path(),
        "k.json",
        &json::module_to_doc(&residue_module(&a, Side::Left)),
    );
    let badv = run(&["dualizable", k.to_str().unwrap()]);
    assert_eq!(badv.status.code(), Some(1));
    assert!(stdout(&badv).contains("\"dualizable\": false"));
}

#[test]
fn tensor_hom_dual_and_ext1() {
    let dir = tempfile::tempdir().unwrap();
    let a = Arc::new(builtin_catalog("exterior(2)").unwrap());
    let left = write_doc(
        dir.path(),
        "left.json",
        &json::module_to_doc(&algebra_as_module(&a, Side::Left)),
    );
    let right = write_doc(
        dir.path(),
        "right.json",
        &json::module_to_doc(&algebra_as_module(&a, Side::Right)),
    );
    let t = run(&["tensor", right.to_str().unwrap(), left.to_str().unwrap()]);
    assert_eq!(t.status.code(), Some(0), "{}", stdout(&t));
    // A (x)_A A = A: two basis elements in degrees 0 and 1
    assert!(stdout(&t).contains("\"dims\""));

    let h = run(&["hom", left.to_str().unwrap(), left.to_str().unwrap()]);
    assert_eq!(h.status.code(), Some(0), "{}", stdout(&h));

    let d = run(&["dual", left.to_str().unwrap()]);
    assert_eq!(d.status.code(), Some(0), "{}", stdout(&d));
    // the output is itself a valid module document
    let dpath = write_doc(
        dir.path(),
        "dual.json",
        &serde_json::from_str(&stdout(&d)).unwrap(),
    );
    assert_eq!(run(&["validate", dpath.to_str().unwrap()]).status.code(), Some(0));

    let e = run(&["ext1", left.to_str().unwrap(), left.to_str().unwrap()]);
    assert_eq!(e.status.code(), Some(0), "{}", stdout(&e));
    assert!(stdout(&e).contains("\"ext1\": 0"));

    let hml = run(&["homology", left.to_str().unwrap()]);
    assert_eq!(hml.status.code(), Some(0));
}

#[test]
fn factorize_verify_roundtrip() {
    let dir = tempfile::tempdir().unwrap();
    let a = Arc::new(builtin_catalog("dual_numbers(2)").unwrap());
    let field = a.field();
    let pres = residue_presentation_fixed(&a);
    let ppath = write_doc(dir.path(), "pres.json", &json::presentation_to_doc(&pres));

    let k = residue_module(&a, Side::Left);
    let m = free_module(&a, &[0, 0], Side::Left);
    let mut soc = Matrix::zeros(field, 4, 1);
    soc.set(1, 0, field.one());
    let u = ModuleMap::new(
        k.clone(),
        m.clone(),
        GradedMap::new(k.carrier.clone(), m.carrier.clone(), 0, BTreeMap::from([(0, soc)]))
            .unwrap(),
    )
    .unwrap();
    let upath = write_doc(dir.path(), "u.json", &json::map_to_doc(&u));

    let fpath = dir.path().join("fact.json");
    let fo = run(&[
        "--output",
        fpath.to_str().unwrap(),
        "factorize",
        upath.to_str().unwrap(),
        "--presentation",
        ppath.to_str().unwrap(),
    ]);
    assert_eq!(fo.status.code(), Some(0), "{:?}", fo);

    let vo = run(&["verify", fpath.to_str().unwrap()]);
    assert_eq!(vo.status.code(), Some(0), "{}", stdout(&vo));
    assert!(stdout(&vo).contains("[pass] composite-equals-u"));

    // tamper with w and the verifier must reject with exit 1
    let mut doc: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&fpath).unwrap()).unwrap();
    let comps = doc["payload"]["w"]["comps"].as_object_mut().unwrap();
    let (key, first) = comps.iter().next().map(|(k, v)| (k.clone(), v.clone())).unwrap();
    let mut rows: Vec<Vec<String>> = serde_json::from_value(first).unwrap();
    rows[0][0] = if rows[0][0] == "0" { "1".into() } else { "0".into() };
    comps.insert(key, serde_json::to_value(rows).unwrap());
    let tampered = write_doc(dir.path(), "tampered.json", &doc);
    let bad = run(&["verify", tampered.to_str().unwrap()]);
    assert_eq!(bad.status.code(), Some(1), "{}", stdout(&bad));

    // a non-flat target is a mathematical failure
    let id = ModuleMap::identity(&k);
    let idpath = write_doc(dir.path(), "id.json", &json::map_to_doc(&id));
    let nf = run(&[
        "factorize",
        idpath.to_str().unwrap(),
        "--presentation",
        ppath.to_str().unwrap(),
    ]);
    assert_eq!(nf.status.code(), Some(1), "{}", stdout(&nf));
    assert!(stdout(&nf).contains("not flat"));
}

// over dual_numbers the differential is zero; build f as multiplication by x directly
fn residue_presentation_fixed(a: &Arc<dgmod::algebra::DGAlgebra>) -> Presentation {
    let l0 = algebra_as_module(a, Side::Left);
    let k = residue_module(a, Side::Left);
    let field = a.field();
    let mut kimg = Matrix::zeros(field, 1, 1);
    kimg.set(0, 0, field.one());
    let g = map_from_free(&l0, &k, &[kimg]);
    let mut ximg = Matrix::zeros(field, 2, 1);
    ximg.set(1, 0, field.one());
    let f = map_from_free(&l0, &l0, &[ximg]);
    Presentation { f, g }
}

#[test]
fn factorize_through_a_system_stage() {
    let dir = tempfile::tempdir().unwrap();
    let a = Arc::new(builtin_catalog("dual_numbers(2)").unwrap());
    let stage = algebra_as_module(&a, Side::Left);
    let sys = DirectedSystem::new(
        vec![stage.clone(), stage.clone()],
        BTreeMap::from([((0, 1), ModuleMap::identity(&stage))]),
    )
    .unwrap();
    let spath = write_doc(dir.path(), "sys.json", &json::system_to_doc(&sys));

    let co = run(&["colimit", spath.to_str().unwrap()]);
    assert_eq!(co.status.code(), Some(0), "{}", stdout(&co));
    let colim_doc: serde_json::Value = serde_json::from_str(&stdout(&co)).unwrap();
    let colim = json::module_from_doc(&colim_doc).unwrap();

    let u = ModuleMap::identity(&colim);
    let upath = write_doc(dir.path(), "u.json", &json::map_to_doc(&u));
    let fo = run(&[
        "factorize",
        upath.to_str().unwrap(),
        "--system",
        spath.to_str().unwrap(),
    ]);
    assert_eq!(fo.status.code(), Some(0), "{}", stdout(&fo));
    let fact = json::factorization_from_doc(&serde_json::from_str(&stdout(&fo)).unwrap()).unwrap();
    assert!(fact.stage.is_some());
}

#[test]
fn semiflat_and_semifree() {
    let dir = tempfile::tempdir().unwrap();
    let c = dgmod::instances::corpus("ring/dual_numbers_F2").unwrap();
    let a = &c.algebra;
    let battery = json::BatteryDoc {
        ses: c.ses_battery.clone(),
        acyclics: c.acyclic_battery.clone(),
    };
    let bpath = write_doc(dir.path(), "battery.json", &json::battery_to_doc(a.field(), &battery));
    let free = write_doc(
        dir.path(),
        "free.json",
        &json::module_to_doc(&algebra_as_module(a, Side::Left)),
    );
    let ok = run(&["semiflat", free.to_str().unwrap(), "--battery", bpath.to_str().unwrap()]);
    assert_eq!(ok.status.code(), Some(0), "{:?}", ok);

    let k = write_doc(
        dir.path(),
        "k.json",
        &json::module_to_doc(&residue_module(a, Side::Left)),
    );
    let badv = run(&["semiflat", k.to_str().unwrap(), "--battery", bpath.to_str().unwrap()]);
    assert_eq!(badv.status.code(), Some(1), "{:?}", badv);

    let sf = run(&["semifree", free.to_str().unwrap()]);
    assert_eq!(sf.status.code(), Some(0), "{}", stdout(&sf));
    assert!(stdout(&sf).contains("\"semifree\": true"));
    let nsf = run(&["semifree", k.to_str().unwrap()]);
    assert_eq!(nsf.status.code(), Some(1));
}

#[test]
fn suite_is_deterministic_and_stable() {
    for name in dgmod::instances::corpus_names() {
        let one = run(&["suite", name]);
        let two = run(&["suite", name]);
        assert_eq!(one.status.code(), Some(0), "{}", stdout(&one));
        assert_eq!(one.stdout, two.stdout, "suite output for {name} is not stable");
    }
    assert_eq!(run(&["suite", "no/such_corpus"]).status.code(), Some(2));
}
