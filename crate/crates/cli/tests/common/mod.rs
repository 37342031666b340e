#![allow(dead_code)]

use std::f64::consts::PI;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use loopbu_core::loop_core::{node, Loop, Manifold};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

pub fn bin() -> PathBuf {
    PathBuf::from(env!("CARGO_BIN_EXE_loopbu"))
}

pub fn golden_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests")
        .join("golden")
}

pub fn run(dir: &Path, args: &[&str]) -> Output {
    Command::new(bin())
        .args(args)
        .current_dir(dir)
        .env("LOOPBU_THREADS", "2")
        .output()
        .expect("loopbu runs")
}

pub fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

pub fn gaussian(rng: &mut ChaCha8Rng, len: usize) -> Vec<f64> {
    (0..len).map(|_| StandardNormal.sample(rng)).collect()
}

pub fn random_unit(rng: &mut ChaCha8Rng, len: usize) -> Vec<f64> {
    loop {
        let v = gaussian(rng, len);
        let r = norm(&v);
        if r > 1e-3 {
            return v.into_iter().map(|x| x / r).collect();
        }
    }
}

/// Random smooth loop on `S^n` based at the south pole.
pub fn random_sphere_loop(rng: &mut ChaCha8Rng, n: usize, m: usize) -> Loop {
    let modes = rng.random_range(2..6);
    let coeffs: Vec<Vec<f64>> = (0..modes)
        .map(|_| gaussian(rng, n + 1).into_iter().map(|c| 0.6 * c).collect())
        .collect();
    let mut s0 = vec![0.0; n + 1];
    s0[n] = -1.0;
    Loop::from_fn(Manifold::Sphere(n), m, s0.clone(), |i| {
        if i == 0 || i == m {
            return s0.clone();
        }
        let t = node(i, m);
        let mut v = s0.clone();
        for (k, a) in coeffs.iter().enumerate() {
            let w = ((k + 1) as f64 * PI * t).sin();
            v.iter_mut().zip(a).for_each(|(x, c)| *x += w * c);
        }
        let r = norm(&v).max(1e-9);
        v.into_iter().map(|x| x / r).collect()
    })
    .expect("valid random loop")
}

/// Random smooth path `t ↦ a + b t + Σ c_k sin(kπt + φ_k)` in `R^dim`.
pub fn random_path(rng: &mut ChaCha8Rng, dim: usize, m: usize) -> Vec<Vec<f64>> {
    let a = gaussian(rng, dim);
    let b = gaussian(rng, dim);
    let waves: Vec<(Vec<f64>, f64)> = (1..=3)
        .map(|_| (gaussian(rng, dim), rng.random_range(0.0..2.0 * PI)))
        .collect();
    (0..=m)
        .map(|i| {
            let t = node(i, m);
            (0..dim)
                .map(|d| {
                    a[d] + b[d] * t
                        + waves
                            .iter()
                            .enumerate()
                            .map(|(k, (c, ph))| 0.5 * c[d] * ((k + 1) as f64 * PI * t + ph).sin())
                            .sum::<f64>()
                })
                .collect()
        })
        .collect()
}

pub fn path_json(samples: &[Vec<f64>]) -> String {
    loopbu_core::io::paths_to_json(&[samples.to_vec()])
}

/// Writes the fixed inputs used by the golden and determinism checks into `dir`.
pub fn write_inputs(dir: &Path) {
    use loopbu_core::embeddings::embed_alpha;
    use loopbu_core::io::loop_to_json;
    use loopbu_core::sphere_geom::SpherePoint;

    let alpha = embed_alpha(&SpherePoint::on_equator(&[0.6, 0.8]).unwrap(), 64).unwrap();
    std::fs::write(dir.join("alpha.json"), loop_to_json(&alpha)).unwrap();
    std::fs::write(
        dir.join("bad.json"),
        "{\"manifold\": \"sphere\", \"n\": 2,\n",
    )
    .unwrap();
    std::fs::write(
        dir.join("wcoord.toml"),
        "[[component]]\nkind = \"wcoord\"\naxis = 0\nweight_poly = [0.0, 1.0]\n",
    )
    .unwrap();
    std::fs::write(
        dir.join("two.toml"),
        "[[component]]\nkind = \"wcoord\"\naxis = 0\nweight_poly = [0.0, 1.0]\n\n\
         [[component]]\nkind = \"sqdist\"\nbeta_poly = [[0.1, -0.2, 0.3], [0.5, 0.0, -1.0], [0.0, 0.7, 0.2]]\n",
    )
    .unwrap();
    std::fs::write(
        dir.join("sqdist.toml"),
        "[[component]]\nkind = \"sqdist\"\nbeta_poly = [[0.2, -0.1, 0.4], [0.3, 0.9, -0.5], [-0.6, 0.2, 0.1]]\n",
    )
    .unwrap();
    let beta: Vec<Vec<f64>> = (0..=64).map(|i| vec![node(i, 64)]).collect();
    std::fs::write(dir.join("beta.json"), path_json(&beta)).unwrap();
}

pub struct Case {
    pub name: &'static str,
    pub args: &'static [&'static str],
    pub exit: i32,
    /// Files produced by the command that are compared byte for byte.
    pub outputs: &'static [&'static str],
}

/// One invocation per command, small enough to run in a few seconds.
pub const CASES: &[Case] = &[
    Case {
        name: "embed_alpha",
        args: &[
            "embed",
            "--kind",
            "alpha",
            "--n",
            "2",
            "--x",
            "0,1",
            "--m",
            "32",
            "--out",
            "embed_alpha.json",
        ],
        exit: 0,
        outputs: &["embed_alpha.json"],
    },
    Case {
        name: "embed_tf",
        args: &[
            "embed",
            "--kind",
            "tf",
            "--n",
            "2",
            "--c",
            "0.6,0.8",
            "--m",
            "32",
            "--out",
            "embed_tf.json",
        ],
        exit: 0,
        outputs: &["embed_tf.json"],
    },
    Case {
        name: "embed_beta",
        args: &[
            "embed",
            "--kind",
            "beta",
            "--n",
            "2",
            "--x",
            "-0.6,0.8",
            "--lambda",
            "0.5",
            "--m",
            "32",
            "--out",
            "embed_beta.json",
        ],
        exit: 0,
        outputs: &["embed_beta.json"],
    },
    Case {
        name: "pushoff",
        args: &[
            "pushoff",
            "--in",
            "alpha.json",
            "--s",
            "1.0",
            "--out",
            "pushoff.json",
        ],
        exit: 0,
        outputs: &["pushoff.json"],
    },
    Case {
        name: "pushoff_bad_json",
        args: &[
            "pushoff",
            "--in",
            "bad.json",
            "--s",
            "1.0",
            "--out",
            "never.json",
        ],
        exit: 2,
        outputs: &[],
    },
    Case {
        name: "solve",
        args: &[
            "solve",
            "--spec",
            "wcoord.toml",
            "--n",
            "2",
            "--m",
            "64",
            "--grid",
            "512",
            "--out",
            "solve.json",
        ],
        exit: 0,
        outputs: &["solve.json"],
    },
    Case {
        name: "solve_needs_best_effort",
        args: &[
            "solve",
            "--spec",
            "two.toml",
            "--n",
            "2",
            "--m",
            "64",
            "--out",
            "never.json",
        ],
        exit: 2,
        outputs: &[],
    },
    Case {
        name: "solve_best_effort",
        args: &[
            "solve",
            "--spec",
            "two.toml",
            "--n",
            "2",
            "--m",
            "64",
            "--grid",
            "256",
            "--best-effort",
            "--out",
            "best_effort.json",
        ],
        exit: -1,
        outputs: &["best_effort.json"],
    },
    Case {
        name: "family",
        args: &[
            "family",
            "--spec",
            "sqdist.toml",
            "--n",
            "2",
            "--d",
            "0",
            "--m",
            "32",
            "--grid",
            "256",
            "--out",
            "family.json",
        ],
        exit: 0,
        outputs: &["family.json"],
    },
    Case {
        name: "linear_family",
        args: &[
            "linear-family",
            "--betas",
            "beta.json",
            "--basis",
            "4",
            "--m",
            "64",
            "--out",
            "linear_family.json",
        ],
        exit: 1,
        outputs: &["linear_family.json"],
    },
    Case {
        name: "verify",
        args: &["verify", "--loop", "alpha.json", "--spec", "wcoord.toml"],
        exit: 1,
        outputs: &[],
    },
    Case {
        name: "verify_coincident",
        args: &[
            "verify",
            "--loop",
            "solve_loop.json",
            "--spec",
            "wcoord.toml",
        ],
        exit: 0,
        outputs: &[],
    },
    Case {
        name: "export_plot",
        args: &["export-plot", "--in", "alpha.json", "--out", "plot.csv"],
        exit: 0,
        outputs: &["plot.csv"],
    },
];

/// Exit code accepted for a case; `-1` means "0 or 3".
pub fn exit_ok(case: &Case, code: i32) -> bool {
    if case.exit == -1 {
        code == 0 || code == 3
    } else {
        code == case.exit
    }
}

/// Runs every case in order inside `dir`; returns `(case, output)` pairs.
pub fn run_cases(dir: &Path) -> Vec<(&'static Case, Output)> {
    write_inputs(dir);
    let mut results = Vec::new();
    for case in CASES {
        if case.name == "verify_coincident" {
            extract_certificate_loop(dir);
        }
        results.push((case, run(dir, case.args)));
    }
    results
}

/// Copies the loop of `solve.json` into `solve_loop.json`.
fn extract_certificate_loop(dir: &Path) {
    let text = std::fs::read_to_string(dir.join("solve.json")).unwrap();
    let cert = loopbu_core::io::certificate_from_json(&text).unwrap();
    std::fs::write(
        dir.join("solve_loop.json"),
        loopbu_core::io::loop_to_json(&cert.loop_),
    )
    .unwrap();
}

/// Compares a produced file with its golden copy; `UPDATE_GOLDEN=1` rewrites the copy.
pub fn check_golden(dir: &Path, file: &str) -> Result<(), String> {
    let produced = std::fs::read(dir.join(file)).map_err(|e| format!("{file}: {e}"))?;
    let golden = golden_dir().join(file);
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        std::fs::create_dir_all(golden_dir()).unwrap();
        std::fs::write(&golden, &produced).unwrap();
        return Ok(());
    }
    let expected = std::fs::read(&golden).map_err(|e| format!("{}: {e}", golden.display()))?;
    if produced == expected {
        Ok(())
    } else {
        Err(format!("{file} differs from {}", golden.display()))
    }
}
