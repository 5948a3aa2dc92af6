"""CLI behavior: subcommands, exit codes, stable JSON."""

import json

import pytest

from spectile.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_analyze_human(capsys):
    code, out, _ = run(capsys, "analyze", "12:{0,1,6,7}")
    assert code == 0
    assert "T1 holds" in out and "T2 holds" in out
    assert "found" in out


def test_analyze_json_round_trips(capsys):
    code, out, _ = run(capsys, "analyze", "--json", "12:{0,1,6,7}")
    assert code == 0
    blob = out.strip()
    obj = json.loads(blob)
    assert obj["schema"] == "spectile.analyze/1"
    assert json.dumps(obj, sort_keys=True, separators=(",", ":")) == blob
    assert obj["zero_divisors"] == [2, 4, 12]


def test_analyze_rejects_bad_literal(capsys):
    with pytest.raises(SystemExit) as err:
        run(capsys, "analyze", "12:{0,1,")
    assert err.value.code == 2


def test_verify_exit_codes(capsys):
    assert run(capsys, "verify", "--spectral", "12:{0,1,6,7}", "12:{0,1,6,7}")[0] == 0
    assert run(capsys, "verify", "--spectral", "4:{0,1}", "4:{0,1}")[0] == 1
    assert run(capsys, "verify", "--tiling", "12:{0,1,6,7}", "12:{0,2,4}")[0] == 0
    assert run(capsys, "verify", "--tiling", "6:{0,3}", "6:{0,3}")[0] == 1


def test_verify_json_and_human_verdicts_agree(capsys):
    _, human, _ = run(capsys, "verify", "--spectral", "12:{0,1,6,7}", "12:{0,1,6,7}")
    _, blob, _ = run(
        capsys, "verify", "--json", "--spectral", "12:{0,1,6,7}", "12:{0,1,6,7}"
    )
    assert "VERIFIED" in human
    assert json.loads(blob)["ok"] is True


def test_decompose(capsys):
    code, out, _ = run(capsys, "decompose", "--json", "6:{0,1,3*2,5}")
    assert code == 0
    obj = json.loads(out)
    assert obj["ok"] is True
    assert sum(obj["p_part"]) * 2 + sum(obj["q_part"]) * 3 == 5


def test_decompose_rejects_non_vanishing(capsys):
    code, out, _ = run(capsys, "decompose", "6:{0,1}")
    assert code == 1


def test_decompose_three_primes_is_usage_error(capsys):
    code, _, err = run(capsys, "decompose", "30:{0,15}")
    assert code == 2


def test_profile(capsys):
    code, out, _ = run(capsys, "profile", "--json", "12:{0,1,6,7}", "12:{0,1,6,7}")
    assert code == 0
    obj = json.loads(out)
    assert obj["ok"] is True
    assert obj["profile"]["a"]["s_p"] == [1, 2]
    assert "symmetry" in obj and "deficits" in obj


def test_profile_failure_exit(capsys):
    code, _, _ = run(capsys, "profile", "4:{0,1}", "4:{0,1}")
    assert code == 1


def test_exclude_verdicts(capsys):
    code, out, _ = run(capsys, "exclude", "--n", "2^9*3^100")
    assert code == 0 and out.startswith("EXCLUDED")
    code, out, _ = run(capsys, "exclude", "--n", "2^100*3^6")
    assert code == 0 and out.startswith("EXCLUDED")
    code, out, _ = run(capsys, "exclude", "--n", "2^5*3^7")
    assert code == 0 and out.startswith("EXCLUDED")
    code, out, _ = run(capsys, "exclude", "--n", "2^100*3^100")
    assert code == 1 and out.startswith("OPEN")


def test_exclude_json(capsys):
    code, out, _ = run(capsys, "exclude", "--json", "--n", "2^100*3^100")
    obj = json.loads(out)
    assert obj["verdict"] == "OPEN"
    assert obj["bounds"]["m_required"] == 10


def test_exclude_bad_format(capsys):
    with pytest.raises(SystemExit) as err:
        run(capsys, "exclude", "--n", "2^^3")
    assert err.value.code == 2


def test_survey_json_stream(capsys):
    code, out, _ = run(capsys, "survey", "--json", "--n", "8", "--threads", "1")
    assert code == 0
    lines = out.strip().splitlines()
    objs = [json.loads(line) for line in lines]
    assert objs[-1]["type"] == "summary"
    assert objs[-1]["f_count"] == 0
    records = [o for o in objs if o["type"] == "record"]
    assert len(records) == objs[-1]["orbits_surveyed"] == 35
    for line, obj in zip(lines, objs):
        assert json.dumps(obj, sort_keys=True, separators=(",", ":")) == line


def test_survey_human_summary(capsys):
    code, out, err = run(capsys, "survey", "--n", "6", "--threads", "1")
    assert code == 0
    assert "survey of Z_6" in out
    assert "spectral-non-tiles found: 0" in out


def test_survey_out_file(tmp_path, capsys):
    target = tmp_path / "records.jsonl"
    code, out, _ = run(
        capsys, "survey", "--json", "--n", "6", "--threads", "1", "--out", str(target)
    )
    assert code == 0
    lines = target.read_text().strip().splitlines()
    assert len(lines) == 13
    assert json.loads(out.strip().splitlines()[-1])["type"] == "summary"


def test_survey_size_and_budget_flags(capsys):
    code, out, _ = run(
        capsys,
        "survey", "--json", "--n", "12", "--size", "4", "--budget", "1000",
        "--threads", "1",
    )
    assert code == 0
    summary = json.loads(out.strip().splitlines()[-1])
    assert summary["per_size"] == {
        "4": {"surveyed": 43, "total": 43, "spectral": 8, "tiles": 8, "cm_pass": 8}
    }


def test_usage_error_exit_code(capsys):
    with pytest.raises(SystemExit) as err:
        main(["survey"])  # missing --n
    assert err.value.code == 2


def test_analyze_budget_exhaustion_exit(capsys):
    # {0,8} in Z_24 fails the structure conditions, so the complement search
    # really runs, and a one-node budget cannot finish it
    code, out, _ = run(capsys, "analyze", "--json", "--budget", "1", "24:{0,8}")
    obj = json.loads(out)
    assert obj["tile"]["verdict"] == "unknown" and code == 3


def test_survey_resume_flag(tmp_path, capsys):
    cursor = tmp_path / "cur"
    args = ["survey", "--json", "--n", "6", "--threads", "1", "--resume", str(cursor)]
    code1, out1, _ = run(capsys, *args)
    code2, out2, _ = run(capsys, *args)
    assert code1 == code2 == 0
    strip = lambda s: [l for l in s.splitlines() if '"type":"record"' in l]
    assert strip(out1) == strip(out2)


def test_profile_three_prime_order_is_usage_error(capsys):
    # a genuine spectral pair, but root profiles need a two-prime order
    code, _, err = run(capsys, "profile", "30:{0,15}", "30:{0,15}")
    assert code == 2 and "prime" in err


def test_exclude_rejects_repeated_prime(capsys):
    with pytest.raises(SystemExit) as err:
        run(capsys, "exclude", "--n", "2^3*2^4")
    assert err.value.code == 2
