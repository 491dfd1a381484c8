"""End-to-end checks of the csem command line tool. The binary path arrives
in the CSEM_CLI environment variable."""

import json
import os
import subprocess
import sys
import tempfile

CLI = os.environ["CSEM_CLI"]


def run(*args, expect=0):
    proc = subprocess.run([CLI, *args], capture_output=True, text=True)
    if proc.returncode != expect:
        raise AssertionError(
            f"{args}: exit {proc.returncode} (want {expect})\n"
            f"stdout: {proc.stdout}\nstderr: {proc.stderr}"
        )
    return proc


def test_generate_extract_multiply(tmp):
    mat = os.path.join(tmp, "m.csem")
    out = run("generate", "-M", "40", "-N", "40", "--alpha", "0.5", "-U", "2",
              "--seed", "9", "-o", mat)
    assert "E=800" in out.stdout
    meta = json.load(open(mat + ".meta.json"))
    assert meta["nonzeros"] == 800 and meta["seed"] == 9

    comp = os.path.join(tmp, "m.cse.csem")
    out = run("extract", "-i", mat, "--iterations", "20", "--attempts", "60",
              "--seed", "3", "-o", comp)
    summary = dict(
        part.split(": ") for line in out.stdout.splitlines() for part in line.split("  ")
        if ": " in part
    )
    assert int(summary["E"]) == 800
    gain = int(summary["gain"])
    assert gain > 0

    vec = os.path.join(tmp, "v.json")
    json.dump([1] * 40, open(vec, "w"))
    res_path = os.path.join(tmp, "y.json")
    out = run("multiply", "-m", comp, "-v", vec, "--kernel", "cse", "--check",
              "-o", res_path)
    assert "check: MATCH" in out.stdout
    result = json.load(open(res_path))
    assert result["additions"] == 800 - gain

    dense_out = run("multiply", "-m", mat, "-v", vec, "--kernel", "dense")
    assert f"additions: 800" in dense_out.stdout
    assert json.loads(dense_out.stdout.splitlines()[0].split("y: ")[1]) == result["y"]

    # extracting an already-compressed container is refused
    bad = run("extract", "-i", comp, "-o", os.path.join(tmp, "x.csem"), expect=2)
    assert "already compressed" in bad.stderr


def test_worked_example(tmp):
    dense = os.path.join(tmp, "worked.json")
    json.dump(
        {"rows": 4, "cols": 4,
         "entries": [2, 0, 1, 0, 2, 0, 1, 0, 0, 3, 0, 5, 2, 0, 0, 5]},
        open(dense, "w"),
    )
    comp = os.path.join(tmp, "worked.csem")
    run("extract", "-i", dense, "--iterations", "30", "--attempts", "20",
        "--seed", "1", "-o", comp)

    vec = os.path.join(tmp, "ones.json")
    json.dump([1, 1, 1, 1], open(vec, "w"))
    out = run("multiply", "-m", comp, "-v", vec, "--kernel", "cse", "--check")
    assert "y: [3,3,8,7]" in out.stdout.replace(" ", "").replace("y:", "y: ")
    assert "check: MATCH" in out.stdout

    dump = run("inspect", "-i", comp)
    j = json.loads(dump.stdout)
    assert set(j) == {"rows", "cols", "weights", "wp", "cse", "cp", "singles", "sp"}
    assert j["rows"] == 4 and j["wp"][-1] == len(j["weights"])


def test_inspect_matches_format(tmp):
    mat = os.path.join(tmp, "i.csem")
    run("generate", "-M", "8", "-N", "6", "--alpha", "0.6", "-U", "3", "--seed", "4",
        "-o", mat)
    j = json.loads(run("inspect", "-i", mat).stdout)
    assert j["cse"] == [] and j["cp"] == []
    assert len(j["wp"]) == 6 and len(j["sp"]) == 8
    with open(mat, "rb") as f:
        assert f.read(4) == b"CSEM"


def test_bench_deterministic(tmp):
    args = ["bench", "--dims", "30x30", "--alphas", "0.25,0.5", "--unique", "2",
            "--iterations", "10", "--attempts", "30", "--seed", "5", "--reps", "2",
            "--no-timing"]
    a = run(*args).stdout
    b = run(*args).stdout
    assert a == b
    lines = a.strip().splitlines()
    header = lines[0].split(",")
    assert header[0] == "rows" and "adds_cse" in header and "status" in header
    assert len(lines) == 1 + 2 * 2  # two alphas x two reps
    for line in lines[1:]:
        cells = dict(zip(header, line.split(",")))
        assert cells["status"] == "ok"
        assert int(cells["adds_cse"]) == int(cells["E"]) - int(cells["gain"])
        assert int(cells["adds_baseline"]) == int(cells["E"])
        assert int(cells["s_total"]) == (
            int(cells["s_weights"]) + int(cells["s_cse"]) + int(cells["s_singles"])
        )
        assert int(cells["s_cse"]) == int(cells["gain"]) + 4 * int(cells["n_cse"])

    sweep = run("bench", "--mode", "sweep", "--dims", "50x50", "--alphas",
                "0.1,0.2,0.3", "--unique", "2,4").stdout
    rows = sweep.strip().splitlines()
    assert rows[0].startswith("rows,cols,alpha,unique_values,seed,E,s_total,s_csr,s_dense")
    assert len(rows) == 1 + 3 * 2


def test_bench_partial_failure(tmp):
    # the first cell cannot satisfy its nonzero budget; the run keeps going
    out = run("bench", "--dims", "3x3", "--alphas", "0.01,0.5", "--unique", "1",
              "--iterations", "2", "--attempts", "4", "--no-timing").stdout
    lines = out.strip().splitlines()
    header = lines[0].split(",")
    assert len(lines) == 3
    first = dict(zip(header, lines[1].split(",")))
    second = dict(zip(header, lines[2].split(",")))
    assert first["status"].startswith("error")
    assert second["status"] == "ok"
    assert len(lines[1].split(",")) == len(header)


def test_error_paths(tmp):
    # degenerate alpha is a data error with a clear message
    bad = run("generate", "-M", "3", "-N", "3", "--alpha", "0.01", "-o",
              os.path.join(tmp, "n.csem"), expect=2)
    assert "empty matrix" in bad.stderr

    # vector length mismatch
    mat = os.path.join(tmp, "e.csem")
    run("generate", "-M", "4", "-N", "4", "--alpha", "1.0", "-o", mat)
    vec = os.path.join(tmp, "short.json")
    json.dump([1, 2], open(vec, "w"))
    run("multiply", "-m", mat, "-v", vec, expect=2)

    # unknown flags are usage errors
    run("generate", "--bogus", expect=1)


def main():
    failures = 0
    for name, fn in sorted(globals().items()):
        if name.startswith("test_") and callable(fn):
            with tempfile.TemporaryDirectory() as tmp:
                try:
                    fn(tmp)
                    print(f"ok   {name}")
                except Exception as exc:  # noqa: BLE001
                    failures += 1
                    print(f"FAIL {name}: {exc!r}")
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
