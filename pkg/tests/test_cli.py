import contextlib
import io
import json
import os
import subprocess
import sys

import pytest

from ceisen.cli import main


def run(args):
    """Invoke the CLI in-process; returns (exit code, stdout, stderr)."""
    out, err = io.StringIO(), io.StringIO()
    with contextlib.redirect_stdout(out), contextlib.redirect_stderr(err):
        try:
            rc = main(args)
        except SystemExit as exc:  # argparse errors
            rc = exc.code
    return rc, out.getvalue(), err.getvalue()


# ---------------------------------------------------------------------------
# exit codes


def test_hseries_all_equal_exit_zero():
    rc, out, _ = run(["hseries", "--ramified", "11", "--dmax", "40"])
    assert rc == 0
    assert all(",true," in line or line.startswith("D,")
               for line in out.strip().split("\n"))


@pytest.mark.parametrize("argv", [
    ["hseries", "--ramified", "2,3", "--dmax", "5"],     # even ramified set
    ["hseries", "--ramified", "4", "--dmax", "5"],       # not prime
    ["hseries", "--ramified", "11", "--M", "4"],         # M not square-free
    ["hseries", "--ramified", "11", "--M", "11"],        # M not coprime to P
    ["hseries", "--ramified", "11", "--threads", "0"],
    ["hseries", "--ramified", "11", "--l", "4"],
    ["hseries", "--dmax", "5"],                          # missing --ramified
    ["verify", "--suite", "congruence", "--ramified", "11"],  # missing --l
    ["shatable", "--ramified", "11"],                    # missing --l
    ["classnum", "--dmax", "2"],
    ["verify", "--suite", "nope", "--ramified", "11"],   # argparse choice
])
def test_config_errors_exit_two(argv):
    rc, _, _ = run(argv)
    assert rc == 2


def test_congruence_precondition_exit_two():
    # l = 3 divides a unit weight at level 11: precondition, not failure
    rc, _, err = run(["verify", "--suite", "congruence", "--ramified", "11",
                      "--l", "3", "--dmax", "20"])
    assert rc == 2
    assert "not invertible" in err


def test_negative_control_exit_one():
    rc, out, _ = run(["verify", "--suite", "congruence", "--ramified", "11",
                      "--l", "7", "--dmax", "60", "--mmax", "20"])
    assert rc == 1
    assert ",false" in out


# ---------------------------------------------------------------------------
# table contents


def test_hseries_level11_prefix():
    rc, out, _ = run(["hseries", "--ramified", "11", "--dmax", "4"])
    assert rc == 0
    assert out == (
        "D,H_theta,H_closed,equal,fundamental,s,h,u\n"
        "0,5/12,5/12,true,false,0,0,1\n"
        "1,0,0,true,false,0,1,2\n"
        "2,0,0,true,false,0,1,1\n"
        "3,1/3,1/3,true,true,0,1,3\n"
        "4,1/2,1/2,true,true,0,1,2\n"
    )


def test_hseries_json():
    rc, out, _ = run(["hseries", "--ramified", "11", "--dmax", "12",
                      "--format", "json"])
    assert rc == 0
    obj = json.loads(out)
    assert obj["all_equal"] is True
    assert obj["config"] == {"ramified": [11], "M": 1}
    assert obj["rows"][0] == {"D": 0, "H_theta": "5/12", "H_closed": "5/12",
                              "equal": True, "fundamental": False,
                              "s": 0, "h": 0, "u": 1}
    assert obj["rows"][12]["H_theta"] == "4/3"


def test_classnum_values():
    rc, out, _ = run(["classnum", "--dmax", "47"])
    assert rc == 0
    lines = out.strip().split("\n")
    assert lines[0] == "D,fundamental,h,u"
    table = {int(l.split(",")[0]): l for l in lines[1:]}
    assert table[3] == "3,true,1,3"
    assert table[4] == "4,true,1,2"
    assert table[23] == "23,true,3,1"
    assert table[47] == "47,true,5,1"
    assert table[12] == "12,false,1,1"
    assert 5 not in table and 6 not in table  # -5, -6 are not discriminants


def test_verify_suites_pass():
    for suite, extra in [
        ("mass", []),
        ("rowsum", ["--mmax", "12"]),
        ("trace", ["--mmax", "8"]),
        ("hecke", ["--mmax", "15"]),
        ("congruence", ["--l", "5", "--dmax", "60", "--mmax", "20"]),
    ]:
        rc, out, _ = run(["verify", "--suite", suite, "--ramified", "11"] + extra)
        assert rc == 0, (suite, out)
        assert out.startswith("check,detail,passed\n")
        assert ",false" not in out


def test_verify_mass_210_value():
    rc, out, _ = run(["verify", "--suite", "mass", "--ramified", "2,3,7",
                      "--M", "5", "--format", "json"])
    assert rc == 0
    obj = json.loads(out)
    assert obj["passed"] is True
    assert obj["rows"][0]["detail"] == "computed=3;expected=3"


def test_shatable_summary_and_rows():
    rc, out, err = run(["shatable", "--ramified", "11", "--l", "5",
                        "--dmax", "100"])
    assert rc == 0
    assert err.strip() == "lambda=3;agree=15/15;rate=1"
    lines = out.strip().split("\n")
    assert lines[0] == "D,fundamental,s,h,h_mod_l,m_D,m_D_mod_l,agree"
    assert lines[1] == "3,true,0,1,1,-1,4,true"
    assert all(line.endswith(",true") for line in lines[1:])


def test_shatable_json_fields():
    rc, out, _ = run(["shatable", "--ramified", "2,3,11", "--l", "5",
                      "--dmax", "150", "--format", "json"])
    assert rc == 0
    obj = json.loads(out)
    assert obj["lambda"] == 2
    assert obj["line"] == [3, -2, -2, 3]
    assert obj["agree"] == obj["total"] == len(obj["rows"])
    assert obj["agreement_rate"] == "1"


# ---------------------------------------------------------------------------
# determinism, output file, cache


def test_byte_identical_reruns_and_threads():
    base = ["hseries", "--ramified", "2,3,11", "--dmax", "90"]
    first = run(base)
    second = run(base)
    threaded = run(base + ["--threads", "4"])
    assert first == second == threaded


def test_out_file_lf_and_utf8(tmp_path):
    target = tmp_path / "table.csv"
    rc, out, _ = run(["hseries", "--ramified", "11", "--dmax", "30",
                      "--out", str(target)])
    assert rc == 0 and out == ""
    raw = target.read_bytes()
    assert b"\r" not in raw
    assert raw.decode("utf-8").startswith("D,H_theta")
    rc2, stdout, _ = run(["hseries", "--ramified", "11", "--dmax", "30"])
    assert raw.decode("utf-8") == stdout


def test_cache_transparent(tmp_path):
    cache = str(tmp_path / "cache")
    base = ["verify", "--suite", "trace", "--ramified", "11", "--mmax", "6"]
    cold = run(base)
    first = run(base + ["--cache-dir", cache])
    assert os.listdir(cache) == ["classes_11_M1.json"]
    warm = run(base + ["--cache-dir", cache])
    assert cold == first == warm


def test_cache_corruption_recovers(tmp_path):
    cache = str(tmp_path / "cache")
    base = ["hseries", "--ramified", "11", "--dmax", "25", "--cache-dir", cache]
    first = run(base)
    path = os.path.join(cache, "classes_11_M1.json")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("{\"version\": 99}")
    again = run(base)
    assert again == first
    # the rebuild rewrote a valid snapshot
    with open(path, encoding="utf-8") as fh:
        assert json.load(fh)["version"] != 99


def test_console_script_subprocess():
    proc = subprocess.run(
        [sys.executable, "-c",
         "from ceisen.cli import entry; entry()",
         ],
        input="",
        capture_output=True,
        text=True,
    )
    # no subcommand -> argparse usage error
    assert proc.returncode == 2

    proc = subprocess.run(
        ["ceisen", "verify", "--suite", "mass", "--ramified", "11"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0
    assert "computed=5/12;expected=5/12" in proc.stdout
