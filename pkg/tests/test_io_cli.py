import json
import os
import subprocess
import sys
from fractions import Fraction as F

import pytest

from catcrypt import cli, corpus, io
from catcrypt.ensemble import NegligibilityPolicy
from catcrypt.games import check_unique_decryption, ind_cpa_guess_prob


def run(*argv):
    return cli.run(list(argv))


@pytest.mark.parametrize(
    "argv, verdict, code",
    [
        (["check-dy", "--system", "dy-otp-2"], "secure", 0),
        (["check-dy", "--system", "dy-shift26"], "secure", 0),
        (["check-dy", "--system", "dy-identity"], "insecure", 1),
        (["check-dy", "--system", "dy-constant"], "invalid", 2),
        (["check-shannon", "--system", "shannon-otp-1"], "secure", 0),
        (["check-shannon", "--system", "shannon-identity"], "insecure", 1),
        (["check-shannon", "--system", "shannon-fixed-key"], "insecure", 1),
        (["check-indcpa", "--system", "ind-identity", "--level", "2"], "insecure", 1),
        (["check-indcpa", "--system", "ind-noisy"], "invalid", 2),
        (["check-indcpa", "--system", "ind-noisy", "--no-decryption-check", "--policy", "policy-poly"], "insecure", 1),
        (["check-indcca2", "--system", "cca2-malleable-otp", "--adversaries", "cca2-adversaries"], "insecure", 1),
        (["check-indcca2", "--system", "cca2-useless-oracle", "--adversaries", "cca2-adversaries",
          "--no-decryption-check"], "secure", 0),
    ],
)
def test_verdicts_and_exit_codes(argv, verdict, code):
    report, got, _ = run(*argv)
    assert report["verdict"] == verdict and got == code == cli.EXIT[verdict]
    if verdict in ("insecure", "invalid"):
        assert report["witness"]


def test_dy_identity_witness():
    report, _, _ = run("check-dy", "--system", "dy-identity", "--format", "json")
    assert report["direct"]["holds"] is False and report["agree"] is True


def test_constant_cipher_witness():
    report, _, _ = run("check-dy", "--system", "dy-constant")
    assert report["witness"] == {"k": "0", "m": "1", "c": "0", "decrypted": "0"}


def test_ensemble_reports_carry_horizon():
    report, _, _ = run("check-indcpa", "--system", "ind-otp", "--level", "1", "--adversaries", "cpa-adversaries")
    assert report["horizon"]["L"] == 8 and report["horizon"]["levels_checked"] == [1]
    assert report["verdict"] == "secure"
    assert {g["guess_prob"]["exact"] for g in report["guess_probabilities"]} == {"1/2"}
    report, _, text = run("check-indcpa", "--system", "ind-otp", "--level", "1", "--policy", "policy-default")
    assert report["horizon"]["L"] == 5 and "2^-l" in text


def test_zero_horizon_is_vacuous(tmp_path):
    pol = tmp_path / "p.json"
    pol.write_text(json.dumps({"L": 0}))
    report, code, _ = run("check-indcpa", "--system", "ind-otp", "--policy", str(pol))
    assert report["verdict"] == "vacuous" and code == 0


def test_cca2_repeat_flag():
    report, _, _ = run("check-indcca2", "--system", "cca2-malleable-otp", "--adversaries", "cca2-adversaries",
                       "--on-repeat", "allow", "--level", "1")
    assert report["on_repeat"] == "allow"
    probs = {r["adversary"]: r["guess_prob"]["exact"] for r in report["games"]}
    assert probs == {"bit-flip": "1/1", "oracle-ignoring": "1/2"}


def test_malformed_json_reports_position(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text('{\n  "kind": "dolev-yao",\n  "carrier": [1, 2,\n}\n')
    report, code, text = run("check-dy", "--system", str(bad))
    assert report is None and code == 2
    assert "line 4" in text and "bad.json" in text
    assert cli.main(["check-dy", "--system", str(bad)]) == 2
    assert "line 4" in capsys.readouterr().err


def test_missing_field_and_missing_file(tmp_path):
    f = tmp_path / "s.json"
    f.write_text(json.dumps({"kind": "dolev-yao", "carrier": ["a"]}))
    _, code, text = run("check-dy", "--system", str(f))
    assert code == 2 and "enc" in text
    _, code, text = run("check-dy", "--system", str(tmp_path / "nope.json"))
    assert code == 2 and "no such file" in text


def test_wrong_adversary_kind():
    _, code, text = run("check-indcpa", "--system", "ind-otp", "--adversaries", "cca2-adversaries")
    assert code == 2 and "IND-CPA" in text


def test_level_out_of_range():
    _, code, text = run("check-indcpa", "--system", "ind-otp", "--level", "9")
    assert code == 2 and "--level 9" in text


def test_text_and_json_agree():
    for argv in (["check-dy", "--system", "dy-identity"],
                 ["check-shannon", "--system", "shannon-fixed-key"],
                 ["check-indcca2", "--system", "cca2-malleable-otp", "--adversaries", "cca2-adversaries"]):
        report, code_t, text = run(*argv, "--format", "text")
        parsed, code_j, js = run(*argv, "--format", "json")
        assert code_t == code_j
        doc = json.loads(js)
        assert doc["verdict"] == report["verdict"]
        assert text.splitlines()[0].endswith(doc["verdict"].upper())
        assert "witness: " + json.dumps(doc["witness"], sort_keys=True) in text


def test_json_output_is_deterministic_across_processes():
    argv = [sys.executable, "-m", "catcrypt.cli", "selftest", "--seed", "3", "--instances", "5", "--format", "json"]
    a = subprocess.run(argv, capture_output=True, check=True).stdout
    b = subprocess.run(argv, capture_output=True, check=True).stdout
    assert a == b and json.loads(a)["verdict"] == "pass"


def test_selftest_zero_instances_is_vacuous():
    report, code, _ = run("selftest", "--instances", "0")
    assert report["verdict"] == "vacuous" and code == 0


def test_examples_env_override(tmp_path, monkeypatch):
    (tmp_path / "mine.json").write_text(json.dumps(io.dump_dolev_yao(corpus.dy_otp(1), "mine")))
    monkeypatch.setenv(io.EXAMPLES_ENV, str(tmp_path))
    report, code, _ = run("check-dy", "--system", "mine")
    assert code == 0 and report["verdict"] == "secure"
    _, code, _ = run("check-dy", "--system", "dy-otp-2")
    assert code == 2


def test_dolev_yao_round_trip(tmp_path):
    s = corpus.dy_shift(5)
    p = tmp_path / "s.json"
    io.write_json(io.dump_dolev_yao(s, "s"), p)
    back = io.load_dolev_yao(p)
    assert list(back.carrier) == list(s.carrier)
    assert all(back.enc[k, m] == s.enc[k, m] for k in s.carrier for m in s.carrier)


def test_shannon_round_trip(tmp_path):
    s = corpus.shannon_otp(2, corpus.skewed(corpus.shannon_otp(2).carrier))
    p = tmp_path / "s.json"
    io.write_json(io.dump_shannon(s, "s"), p)
    back = io.load_shannon(p)
    assert back.mu.weights == s.mu.weights and back.kappa.weights == s.kappa.weights


def test_shannon_distribution_forms(tmp_path):
    doc = io.dump_shannon(corpus.shannon_otp(1), "x")
    doc["mu"] = ["1/3", "2/3"]
    doc["kappa"] = "uniform"
    p = tmp_path / "s.json"
    p.write_text(json.dumps(doc))
    s = io.load_shannon(p)
    assert s.mu[s.carrier.elements[1]] == F(2, 3)
    doc["mu"] = ["1/2", "1/3"]
    p.write_text(json.dumps(doc))
    with pytest.raises(io.InputError):
        io.load_shannon(p)


def test_abstract_and_adversary_round_trip(tmp_path):
    sys_ = corpus.otp_system(2)
    p = tmp_path / "sys.json"
    io.write_json(io.dump_abstract(sys_), p)
    back = io.load_abstract(p)
    assert check_unique_decryption(back)
    q = tmp_path / "adv.json"
    io.write_json(io.dump_adversaries(corpus.cpa_adversaries(2), "ind-cpa"), q)
    kind, advs = io.load_adversaries(q)
    assert kind == "ind-cpa" and [a.name for a in advs] == ["distinguisher", "fixed-guess", "coin-flip"]
    assert ind_cpa_guess_prob(back, advs[0], 2) == F(1, 2)


def test_sparse_table_entries(tmp_path):
    doc = {"r": 1, "s": 1, "t": 1, "table": {"0,1": "1", "1,1": "0"}}
    f = io.parse_fn(doc, "fn")
    assert f("0", "1") == "1" and f("0", "0") is None
    with pytest.raises(io.InputError):
        io.parse_fn({**doc, "table": {"0,1": "11"}}, "fn")


def test_policy_parsing():
    assert io.parse_policy({"L": 3, "threshold": "1/l^2"}) == NegligibilityPolicy(3, "1/l^2")
    with pytest.raises(io.InputError):
        io.parse_policy({"threshold": "2^-l"})
    with pytest.raises(io.InputError):
        io.parse_policy({"L": 3, "threshold": "l"})


def test_bundled_corpus_is_current(tmp_path):
    corpus.write_corpus(tmp_path)
    for p in sorted(tmp_path.glob("*.json")):
        assert p.read_text() == (io.DATA_DIR / p.name).read_text(), p.name


def test_console_script_entry():
    out = subprocess.run([sys.executable, "-m", "catcrypt.cli", "check-dy", "--system", "dy-otp-1"],
                         capture_output=True, text=True, env=dict(os.environ))
    assert out.returncode == 0 and out.stdout.startswith("check-dy: SECURE")
