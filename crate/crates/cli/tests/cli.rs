use std::io::{BufRead, BufReader, Write};
use std::net::TcpListener;
use std::process::{Command, Output};
use std::thread;

fn combx(args: &[&str]) -> Output {
    let cache = tempfile::tempdir().unwrap();
    combx_env(args, &[("COMBX_CACHE_DIR", cache.path().to_str().unwrap())])
}

fn combx_env(args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_combx"));
    cmd.args(args)
        .env_remove("COMBX_OFFLINE")
        .env_remove("COMBX_OEIS_URL");
    for (k, v) in env {
        cmd.env(k, v);
    }
    cmd.output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn ok(args: &[&str]) -> String {
    let o = combx(args);
    assert!(
        o.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&o.stderr)
    );
    stdout(&o)
}

#[test]
fn count_examples() {
    assert_eq!(
        ok(&["count", "--family", "beta", "--s", "3", "--t", "2", "--avoid", "312"]),
        "12\n"
    );
    assert_eq!(
        ok(&["count", "--family", "alpha", "--s", "2", "--t", "2", "--avoid", "123"]),
        "0\n"
    );
    assert_eq!(
        ok(&["count", "--family", "alpha", "--s", "3", "--t", "3"]),
        "280\n"
    );
    assert_eq!(
        ok(&[
            "count", "--family", "alpha", "--s", "3", "--n", "9", "--avoid", "231", "--avoid",
            "312"
        ]),
        "44\n"
    );
    let uneven = [
        "count", "--family", "beta", "--t", "3", "--n", "11", "--avoid", "312",
    ];
    let gentree = ok(&[&uneven[..], &["--method", "gentree"]].concat());
    assert_eq!(gentree, ok(&[&uneven[..], &["--method", "brute"]].concat()));
    assert_eq!(gentree, "91\n");
}

#[test]
fn large_counts_are_plain_decimals() {
    let out = ok(&[
        "count", "--family", "beta", "--s", "40", "--t", "5", "--avoid", "312",
    ]);
    assert!(out.trim().bytes().all(|b| b.is_ascii_digit()), "{out}");
    assert!(out.trim().len() > 40);
}

#[test]
fn json_agrees_with_text() {
    for args in [
        [
            "count", "--family", "beta", "--s", "4", "--t", "3", "--avoid", "312",
        ],
        [
            "count", "--family", "alpha", "--s", "4", "--t", "3", "--avoid", "321",
        ],
    ] {
        let text = ok(&args);
        let mut with_json = args.to_vec();
        with_json.push("--json");
        let v: serde_json::Value = serde_json::from_str(&ok(&with_json)).unwrap();
        assert_eq!(v["count"].as_str().unwrap(), text.trim());
    }
    let v: serde_json::Value = serde_json::from_str(&ok(&[
        "count", "--family", "alpha", "--s", "4", "--t", "3", "--avoid", "321", "--json",
    ]))
    .unwrap();
    assert_eq!(v["method"], "brute");
    assert_eq!(v["patterns"], serde_json::json!(["321"]));
}

#[test]
fn brute_and_formula_agree_on_proven_points() {
    let points: &[(&str, &str, &str, &[&str])] = &[
        ("alpha", "4", "2", &["213"]),
        ("alpha", "5", "2", &["312"]),
        ("beta", "3", "3", &["213"]),
        ("beta", "4", "3", &["312"]),
        ("alpha", "4", "3", &["231", "312"]),
        ("alpha", "3", "4", &["312", "321"]),
        ("beta", "4", "2", &["312", "321"]),
        ("beta", "3", "3", &["213", "321"]),
        ("alpha", "6", "2", &["213", "321"]),
    ];
    for (family, s, t, ps) in points {
        let mut args = vec!["count", "--family", family, "--s", s, "--t", t];
        for p in *ps {
            args.extend(["--avoid", p]);
        }
        let brute = ok(&[args.as_slice(), &["--method", "brute"]].concat());
        let formula = ok(&[args.as_slice(), &["--method", "formula"]].concat());
        assert_eq!(brute, formula, "{args:?}");
    }
}

#[test]
fn enumerate_lists_extensions() {
    assert_eq!(
        ok(&[
            "enumerate",
            "--family",
            "beta",
            "--s",
            "2",
            "--t",
            "2",
            "--avoid",
            "312"
        ]),
        "1 2 3 4\n1 3 2 4\n1 3 4 2\n"
    );
    let out = ok(&[
        "enumerate",
        "--family",
        "alpha",
        "--s",
        "3",
        "--t",
        "3",
        "--limit",
        "5",
    ]);
    assert_eq!(out.lines().count(), 5);
    assert_eq!(out.lines().next().unwrap(), "1 2 3 4 5 6 7 8 9");
    let all = ok(&[
        "enumerate",
        "--family",
        "alpha",
        "--s",
        "4",
        "--t",
        "3",
        "--avoid",
        "231",
        "--avoid",
        "312",
    ]);
    assert_eq!(all.lines().count(), 208);
}

#[test]
fn table_formats() {
    let base = [
        "table", "--family", "beta", "--avoid", "312", "--vary", "s", "--fixed", "2", "--range",
        "1..6",
    ];
    let csv = ok(&[&base[..], &["--format", "csv"]].concat());
    let counts: Vec<&str> = csv
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(2).unwrap())
        .collect();
    assert_eq!(csv.lines().next().unwrap(), "s,t,count,method");
    assert_eq!(counts, ["1", "3", "12", "55", "273", "1428"]);

    let json: serde_json::Value =
        serde_json::from_str(&ok(&[&base[..], &["--format", "json"]].concat())).unwrap();
    assert_eq!(
        json[0]["terms"],
        serde_json::json!(["1", "3", "12", "55", "273", "1428"])
    );
    assert_eq!(json[0]["method"], "auto");

    let text = ok(&base);
    assert!(text.lines().last().unwrap().contains("1428"));

    let vary_t = ok(&[
        "table", "--family", "beta", "--avoid", "213", "--avoid", "321", "--vary", "t", "--fixed",
        "3", "--range", "1..4", "--format", "csv",
    ]);
    assert_eq!(
        vary_t,
        "s,t,count,method\n3,1,1,formula\n3,2,3,formula\n3,3,5,formula\n3,4,7,formula\n"
    );
}

#[test]
fn table_uses_the_cache() {
    let dir = tempfile::tempdir().unwrap();
    let env = [("COMBX_CACHE_DIR", dir.path().to_str().unwrap())];
    let args = [
        "table", "--family", "alpha", "--avoid", "321", "--vary", "s", "--fixed", "2", "--range",
        "2..6", "--method", "brute", "--format", "json",
    ];
    let first = combx_env(&args, &env);
    assert!(first.status.success());
    let cached = std::fs::read_to_string(dir.path().join("sequences.json")).unwrap();
    assert!(cached.contains("\"2244\""));
    let second = combx_env(&args, &env);
    // the second run reads the stored record, timestamp included
    assert_eq!(stdout(&first), stdout(&second));
    assert_eq!(
        std::fs::read_to_string(dir.path().join("sequences.json")).unwrap(),
        cached
    );
}

#[test]
fn verify_exits_cleanly() {
    let o = combx(&["verify", "--max-n", "8"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("0 failed"));
    let o = combx(&["verify", "--max-n", "5", "--json"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(v["lines"].as_array().unwrap().len() > 50);
}

#[test]
fn gentree_and_paths() {
    let out = ok(&["gentree", "--t", "2", "--levels", "6"]);
    assert_eq!(out.lines().nth(4).unwrap(), "4 3 {2:2,3:1}");
    assert_eq!(out.lines().nth(6).unwrap().split(' ').nth(1).unwrap(), "12");
    assert_eq!(
        ok(&["gentree", "--t", "2", "--levels", "6", "--lattice"]),
        out
    );
    let cmp = combx(&["gentree", "--t", "3", "--levels", "24", "--compare"]);
    assert!(cmp.status.success());
    assert!(!stdout(&cmp).contains("MISMATCH"));
    let v: serde_json::Value =
        serde_json::from_str(&ok(&["gentree", "--t", "3", "--levels", "12", "--json"])).unwrap();
    assert_eq!(v[12]["total"], "140");

    assert_eq!(ok(&["paths", "--t", "2", "--s", "2"]), "3\n");
    assert_eq!(ok(&["paths", "--t", "2", "--s", "3"]), "12\n");
    assert_eq!(ok(&["gf231", "--terms", "7"]), "1,1,3,11,44,185,804\n");
    assert_eq!(
        ok(&["gf231", "--terms", "4", "--json"]),
        "[\"1\",\"1\",\"3\",\"11\"]\n"
    );
}

#[test]
fn registry_lists_every_entry() {
    let v: serde_json::Value = serde_json::from_str(&ok(&["registry", "--json"])).unwrap();
    let entries = v.as_array().unwrap();
    assert_eq!(entries.len(), 26);
    assert!(entries
        .iter()
        .any(|e| e["id"] == "alpha-231-321-t2" && e["status"] == "conjectured"));
    assert_eq!(ok(&["registry"]).lines().count(), 26);
}

#[test]
fn usage_errors_exit_2() {
    let cases: &[&[&str]] = &[
        &[
            "count", "--family", "beta", "--s", "3", "--t", "2", "--bogus",
        ],
        &["count", "--family", "gamma", "--s", "3", "--t", "2"],
        &["count", "--family", "beta", "--s", "3"],
        &[
            "count", "--family", "beta", "--s", "3", "--t", "2", "--avoid", "3a2",
        ],
        &[
            "count", "--family", "beta", "--s", "3", "--t", "2", "--avoid", "312", "--avoid", "312",
        ],
        &["count", "--family", "alpha", "--t", "3", "--n", "7"],
        &[
            "table", "--family", "beta", "--avoid", "312", "--vary", "s", "--fixed", "2",
            "--range", "5..1",
        ],
        &[
            "table", "--family", "beta", "--avoid", "312", "--vary", "x", "--fixed", "2",
            "--range", "1..5",
        ],
        &[
            "table", "--family", "beta", "--avoid", "312", "--vary", "s", "--fixed", "2",
            "--range", "1..5", "--format", "xml",
        ],
        &["verify", "--max-n", "2"],
        &[
            "count", "--family", "beta", "--s", "3", "--t", "2", "--method", "guess",
        ],
        &["nonsense"],
    ];
    for args in cases {
        let o = combx(args);
        assert_eq!(
            o.status.code(),
            Some(2),
            "{args:?}: {}",
            String::from_utf8_lossy(&o.stderr)
        );
        assert!(!o.stderr.is_empty());
    }
}

#[test]
fn computation_errors_exit_1() {
    let cases: &[&[&str]] = &[
        &[
            "count", "--family", "alpha", "--s", "5", "--t", "5", "--avoid", "321",
        ],
        &[
            "count", "--family", "alpha", "--s", "3", "--t", "3", "--avoid", "321", "--method",
            "formula",
        ],
        &[
            "count", "--family", "alpha", "--s", "3", "--t", "3", "--avoid", "312", "--method",
            "gentree",
        ],
        &[
            "table", "--family", "alpha", "--avoid", "231", "--vary", "s", "--fixed", "3",
            "--range", "2..6",
        ],
    ];
    for args in cases {
        let o = combx(args);
        assert_eq!(o.status.code(), Some(1), "{args:?}");
        assert!(String::from_utf8_lossy(&o.stderr).starts_with("error:"));
    }
}

#[test]
fn oeis_offline_and_against_a_local_server() {
    let args = [
        "oeis", "--family", "alpha", "--avoid", "231", "--vary", "s", "--fixed", "2", "--range",
        "2..6",
    ];
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().to_str().unwrap();
    let o = combx_env(&args, &[("COMBX_OFFLINE", "1"), ("COMBX_CACHE_DIR", cache)]);
    assert!(o.status.success());
    assert_eq!(
        stdout(&o),
        "terms: 3,11,44,185,804\noffline: lookup skipped\n"
    );

    let listener = TcpListener::bind("127.0.0.1:0").unwrap();
    let base = format!("http://{}", listener.local_addr().unwrap());
    let server = thread::spawn(move || {
        let body = r#"[{"number":127632,"data":"1,1,3,11,44,185,804,3579","name":"Catalan composition","offset":"0,3"}]"#;
        let (mut stream, _) = listener.accept().unwrap();
        let mut reader = BufReader::new(stream.try_clone().unwrap());
        let mut request = String::new();
        reader.read_line(&mut request).unwrap();
        let mut line = String::new();
        while reader.read_line(&mut line).unwrap() > 2 {
            line.clear();
        }
        write!(
            stream,
            "HTTP/1.1 200 OK\r\nContent-Length: {}\r\nConnection: close\r\n\r\n{body}",
            body.len()
        )
        .unwrap();
        request
    });
    let o = combx_env(
        &args,
        &[("COMBX_OEIS_URL", &base), ("COMBX_CACHE_DIR", cache)],
    );
    let request = server.join().unwrap();
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(request.contains("/search?q=3,11,44,185,804&fmt=json"));
    assert!(stdout(&o).contains("A127632 offset=2"));
}

#[test]
fn thread_cap_is_accepted() {
    assert_eq!(
        ok(&[
            "--threads",
            "2",
            "count",
            "--family",
            "alpha",
            "--s",
            "4",
            "--t",
            "3",
            "--avoid",
            "321"
        ]),
        "3196\n"
    );
    assert_eq!(
        combx(&["--threads", "0", "paths", "--t", "1", "--s", "1"])
            .status
            .code(),
        Some(2)
    );
}
