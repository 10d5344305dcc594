//! End-to-end tests of the `rzms` binary: the keygen -> sign -> verify
//! pipeline, exit codes, deterministic outputs, and the simulate/params
//! surfaces.

use std::path::Path;
use std::process::{Command, Output};

fn rzms(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rzms"))
        .args(args)
        .current_dir(dir)
        .env("RZMS_PARAMS", "production")
        .output()
        .expect("binary runs")
}

fn seed_hex(byte: u8) -> String {
    hex::encode([byte; 32])
}

#[test]
fn keygen_sign_verify_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();

    let out = rzms(d, &["setup", "--seed", &seed_hex(1), "--out", "rho.bin"]);
    assert!(out.status.success());
    assert_eq!(std::fs::read(d.join("rho.bin")).unwrap().len(), 32);
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("rho = "));

    for (i, name) in ["alice", "bob"].iter().enumerate() {
        let out = rzms(
            d,
            &[
                "keygen",
                "--rho",
                "rho.bin",
                "--seed",
                &seed_hex(10 + i as u8),
                "--out",
                name,
            ],
        );
        assert!(
            out.status.success(),
            "{}",
            String::from_utf8_lossy(&out.stderr)
        );
    }
    assert_eq!(std::fs::read(d.join("alice.pk")).unwrap().len(), 3104 + 6);
    assert_eq!(std::fs::read(d.join("alice.sk")).unwrap().len(), 1056 + 6);

    std::fs::write(d.join("msg.bin"), b"pay mallory 5 coins").unwrap();
    let out = rzms(
        d,
        &[
            "sign",
            "--sk",
            "alice.sk",
            "bob.sk",
            "--pks",
            "alice.pk",
            "bob.pk",
            "--msg",
            "msg.bin",
            "--out",
            "tx.sig",
            "--seed",
            &seed_hex(99),
        ],
    );
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert_eq!(std::fs::read(d.join("tx.sig")).unwrap().len(), 5408 + 6);

    let out = rzms(
        d,
        &[
            "verify", "--rho", "rho.bin", "--msg", "msg.bin", "--sig", "tx.sig",
        ],
    );
    assert!(out.status.success());
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "OK");

    // One corrupted byte: exit code 1, FAIL (or a decode rejection).
    let mut sig = std::fs::read(d.join("tx.sig")).unwrap();
    sig[100] ^= 0x55;
    std::fs::write(d.join("bad.sig"), &sig).unwrap();
    let out = rzms(
        d,
        &[
            "verify", "--rho", "rho.bin", "--msg", "msg.bin", "--sig", "bad.sig",
        ],
    );
    assert_eq!(out.status.code(), Some(1));

    // Wrong message: exit code 1 and FAIL on stdout.
    std::fs::write(d.join("other.bin"), b"pay mallory 500 coins").unwrap();
    let out = rzms(
        d,
        &[
            "verify",
            "--rho",
            "rho.bin",
            "--msg",
            "other.bin",
            "--sig",
            "tx.sig",
        ],
    );
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "FAIL");
}

#[test]
fn keygen_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert!(
        rzms(d, &["setup", "--seed", &seed_hex(7), "--out", "rho.bin"])
            .status
            .success()
    );
    for name in ["a", "b"] {
        let out = rzms(
            d,
            &[
                "keygen",
                "--rho",
                "rho.bin",
                "--seed",
                &seed_hex(42),
                "--out",
                name,
            ],
        );
        assert!(out.status.success());
    }
    assert_eq!(
        std::fs::read(d.join("a.pk")).unwrap(),
        std::fs::read(d.join("b.pk")).unwrap()
    );
    assert_eq!(
        std::fs::read(d.join("a.sk")).unwrap(),
        std::fs::read(d.join("b.sk")).unwrap()
    );
}

#[test]
fn io_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let out = rzms(
        d,
        &[
            "keygen",
            "--rho",
            "missing.bin",
            "--seed",
            &seed_hex(1),
            "--out",
            "x",
        ],
    );
    assert_eq!(out.status.code(), Some(2));

    let out = rzms(d, &["setup", "--seed", "nothex", "--out", "rho.bin"]);
    assert_eq!(out.status.code(), Some(2));

    // Unknown flags are a usage error (clap's own exit code 2).
    let out = rzms(d, &["verify", "--bogus"]);
    assert_eq!(out.status.code(), Some(2));

    // Mismatched --sk/--pks counts.
    assert!(
        rzms(d, &["setup", "--seed", &seed_hex(1), "--out", "rho.bin"])
            .status
            .success()
    );
    assert!(rzms(
        d,
        &[
            "keygen",
            "--rho",
            "rho.bin",
            "--seed",
            &seed_hex(2),
            "--out",
            "k"
        ]
    )
    .status
    .success());
    std::fs::write(d.join("m.bin"), b"m").unwrap();
    let out = rzms(
        d,
        &[
            "sign", "--sk", "k.sk", "--pks", "k.pk", "k.pk", "--msg", "m.bin", "--out", "s.sig",
        ],
    );
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn simulate_deterministic_and_faults() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let args = [
        "simulate",
        "--signers",
        "3",
        "--participants",
        "0,1",
        "--seed",
        &seed_hex(5),
        "--transcript",
        "t1.jsonl",
    ];
    let out = rzms(d, &args);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert!(String::from_utf8_lossy(&out.stdout).contains("verdict: accepted"));

    let mut args2 = args;
    args2[args.len() - 1] = "t2.jsonl";
    assert!(rzms(d, &args2).status.success());
    assert_eq!(
        std::fs::read(d.join("t1.jsonl")).unwrap(),
        std::fs::read(d.join("t2.jsonl")).unwrap()
    );

    // Without --transcript the JSONL goes to stdout.
    let out = rzms(
        d,
        &[
            "simulate",
            "--signers",
            "2",
            "--participants",
            "0,1",
            "--seed",
            &seed_hex(6),
        ],
    );
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("\"phase\":\"sign\""));
    assert!(text.contains("{\"verdict\":\"accepted\"}"));

    // Tampering the first share (index 10 = 4 setup + 6 keygen) rejects.
    let out = rzms(
        d,
        &[
            "simulate",
            "--signers",
            "3",
            "--participants",
            "0,1",
            "--seed",
            &seed_hex(5),
            "--faults",
            "tamper@10:25",
            "--transcript",
            "bad.jsonl",
        ],
    );
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stdout).contains("verdict: rejected(share)"));

    // Bad fault grammar is a usage error.
    let out = rzms(
        d,
        &[
            "simulate",
            "--signers",
            "2",
            "--participants",
            "0,1",
            "--faults",
            "explode@3",
        ],
    );
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn params_report_production_and_toy() {
    let dir = tempfile::tempdir().unwrap();
    let out = rzms(dir.path(), &["params"]);
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    for needle in [
        "q       = 8397313",
        "gamma2  = 63616",
        "beta    = 205",
        "alpha   = 127232",
        "m_high  = 66",
        "|APK| = 3072 bytes",
        "expected attempts",
    ] {
        assert!(text.contains(needle), "missing {needle:?} in:\n{text}");
    }

    let out = Command::new(env!("CARGO_BIN_EXE_rzms"))
        .arg("params")
        .env("RZMS_PARAMS", "toy")
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("parameter set: toy"));
    assert!(text.contains("q       = 257"));

    let out = Command::new(env!("CARGO_BIN_EXE_rzms"))
        .arg("params")
        .env("RZMS_PARAMS", "bogus")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn toy_pipeline_via_env() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let run = |args: &[&str]| {
        Command::new(env!("CARGO_BIN_EXE_rzms"))
            .args(args)
            .current_dir(d)
            .env("RZMS_PARAMS", "toy")
            .output()
            .unwrap()
    };
    assert!(run(&["setup", "--seed", &seed_hex(1), "--out", "rho.bin"])
        .status
        .success());
    assert!(run(&[
        "keygen",
        "--rho",
        "rho.bin",
        "--seed",
        &seed_hex(2),
        "--out",
        "k0"
    ])
    .status
    .success());
    assert!(run(&[
        "keygen",
        "--rho",
        "rho.bin",
        "--seed",
        &seed_hex(3),
        "--out",
        "k1"
    ])
    .status
    .success());
    std::fs::write(d.join("m.bin"), b"toy message").unwrap();
    let out = run(&[
        "sign",
        "--sk",
        "k0.sk",
        "k1.sk",
        "--pks",
        "k0.pk",
        "k1.pk",
        "--msg",
        "m.bin",
        "--out",
        "t.sig",
        "--seed",
        &seed_hex(4),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let out = run(&[
        "verify", "--rho", "rho.bin", "--msg", "m.bin", "--sig", "t.sig",
    ]);
    assert!(out.status.success());
}

#[test]
fn bench_smoke() {
    let dir = tempfile::tempdir().unwrap();
    let out = rzms(dir.path(), &["bench", "--iters", "3"]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("sign:"));
    assert!(text.contains("verify:"));
}
