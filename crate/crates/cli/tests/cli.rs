use std::process::{Command, Output};

use rigidview::camera::tuple_to_json;
use rigidview::harness::{
    random_rig, rng, sample_generic_pair_with, sample_unit_pair_with, Height, Noise, Scene,
};
use serde_json::Value;

fn rigidview(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rigidview"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn gen_rig_is_deterministic() {
    let a = rigidview(&["gen-rig", "--n", "3", "--seed", "7"]);
    let b = rigidview(&["gen-rig", "--n", "3", "--seed", "7"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let rig = json(&a);
    assert_eq!(rig["cameras"].as_array().unwrap().len(), 3);
    assert!(rig["cameras"][0][0].is_string());
    let c = rigidview(&["gen-rig", "--n", "3", "--seed", "8"]);
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn counts_prints_the_total() {
    let out = rigidview(&["counts", "--n", "5"]);
    assert!(out.status.success());
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "4940");

    let dir = std::env::temp_dir().join(format!("rigidview-counts-{}", std::process::id()));
    let path = dir.with_extension("json");
    let out = rigidview(&["counts", "--n", "3", "--json-out", path.to_str().unwrap()]);
    assert!(out.status.success());
    let doc: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(doc["total"], 177);
    std::fs::remove_file(path).ok();
}

#[test]
fn project_then_triangulate() {
    let rig = json(&rigidview(&["gen-rig", "--n", "3", "--seed", "2"])).to_string();
    let tuple = rigidview(&["project", "--rig", &rig, "--point", r#"["1/3", "2", "-5"]"#]);
    assert!(tuple.status.success());
    let tuple = json(&tuple).to_string();
    let sol = rigidview(&["triangulate", "--rig", &rig, "--tuple", &tuple]);
    assert!(sol.status.success());
    let sol = json(&sol);
    assert_eq!(sol["affine"], serde_json::json!(["1/3", "2", "-5"]));
}

#[test]
fn check_exit_code_follows_membership() {
    let rig = random_rig(4, 2, Height::default()).unwrap();
    let mut r = rng(4);
    let rig_json = rig.to_json().to_string();
    for (family, member) in [
        ("full", true),
        ("nine", true),
        ("oracle", true),
        ("full", false),
        ("oracle", false),
    ] {
        let (x, y) = if member {
            sample_unit_pair_with(&mut r)
        } else {
            sample_generic_pair_with(&mut r)
        };
        let u = tuple_to_json(&rig.forward_map(&x).unwrap()).to_string();
        let v = tuple_to_json(&rig.forward_map(&y).unwrap()).to_string();
        let out = rigidview(&[
            "check", "--rig", &rig_json, "--u", &u, "--v", &v, "--family", family,
        ]);
        assert_eq!(out.status.success(), member, "{family}");
        assert_eq!(json(&out)["member"], member);
    }
}

#[test]
fn refine_float_input() {
    let rig = random_rig(5, 3, Height::default()).unwrap();
    let scene = Scene::unit_pair(rig, &mut rng(5))
        .unwrap()
        .with_noise(Noise {
            sigma: 1e-4,
            seed: 1,
        });
    let out = rigidview(&[
        "refine",
        "--rig",
        &scene.rig.to_json().to_string(),
        "--u",
        &tuple_to_json(&scene.images[0]).to_string(),
        "--v",
        &tuple_to_json(&scene.images[1]).to_string(),
    ]);
    let doc = json(&out);
    assert!(doc["residual"].as_f64().unwrap() <= doc["initial_residual"].as_f64().unwrap());
}

#[test]
fn verify_and_dimension() {
    let out = rigidview(&[
        "verify",
        "--experiment",
        "THM32_EQUIV",
        "--n",
        "2",
        "--samples",
        "6",
        "--seed",
        "1",
    ]);
    assert!(out.status.success());
    let rep = json(&out);
    assert_eq!(rep["experiment"], "THM32_EQUIV");
    assert_eq!(rep["pass"], true);

    let out = rigidview(&["dimension", "--scenario", "PAIRWISE_3:1,1,2", "--seed", "3"]);
    assert!(out.status.success());
    assert_eq!(json(&out)["dimension"], 5);
}

#[test]
fn usage_errors_exit_nonzero() {
    for args in [
        &["verify", "--experiment", "NOPE"][..],
        &["gen-rig", "--n", "1"],
        &["gen-rig"],
        &["counts", "--n", "3", "--backend", "fancy"],
        &["triangulate", "--rig", "{not json", "--tuple", "[]"],
        &["dimension", "--scenario", "PAIRWISE_3:1,2,5"],
    ] {
        let out = rigidview(args);
        assert!(!out.status.success(), "{args:?}");
        assert!(!out.stderr.is_empty(), "{args:?}");
    }
}
