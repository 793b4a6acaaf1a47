"""catcrypt: load systems and adversaries, run a security check, print a report.

Exit status: 0 secure or vacuous, 1 insecure, 2 input error (including a
system that fails its decryption condition).
"""
from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from . import io, selftest
from .ensemble import EnsembleError, NegligibilityPolicy
from .games import (
    CapExceeded,
    check_ind_cpa_diagram,
    check_unique_decryption,
    ind_cca2_guess_prob,
    ind_cpa_advantage,
    ind_cpa_guess_prob,
)
from .rational import fmt, fmt_with_decimal
from .semiring import label
from .shannon import check_sto_security, ciphertext_distribution, is_perfectly_secure_direct
from .symbolic import (
    check_decryption_condition,
    check_rel_security,
    is_algebraically_perfectly_secure,
    possible_plaintexts_constant,
)

EXIT = {"secure": 0, "vacuous": 0, "pass": 0, "insecure": 1, "fail": 1, "invalid": 2}


def jsonable(x):
    if isinstance(x, bool) or x is None or isinstance(x, (int, str)):
        return x
    if isinstance(x, Fraction):
        return fmt(x)
    if isinstance(x, dict):
        return {str(k): jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)) and not isinstance(x, str):
        if isinstance(x, tuple):
            return label(x)
        return [jsonable(v) for v in x]
    if isinstance(x, (set, frozenset)):
        return sorted(label(v) for v in x)
    return label(x)


def num(x) -> dict:
    q = Fraction(x)
    return {"exact": fmt(q), "approx": float(q)}


def _verdict_block(v) -> dict:
    return {"holds": v.holds, "witness": jsonable(v.witness)}


# --- commands --------------------------------------------------------------

def cmd_check_dy(args) -> dict:
    s = io.load_dolev_yao(args.system)
    report = {"command": "check-dy", "system": str(args.system)}
    dc = check_decryption_condition(s)
    report["decryption_condition"] = _verdict_block(dc)
    if not dc.holds:
        report["verdict"] = "invalid"
        report["witness"] = jsonable(dc.witness)
        return report
    direct = is_algebraically_perfectly_secure(s)
    diagram = check_rel_security(s)
    report["direct"] = _verdict_block(direct)
    report["possible_plaintexts_constant"] = possible_plaintexts_constant(s)
    report["diagram"] = diagram.to_json()
    report["agree"] = direct.holds == diagram.passed == report["possible_plaintexts_constant"]
    report["verdict"] = "secure" if direct.holds and diagram.passed else "insecure"
    if report["verdict"] == "insecure":
        report["witness"] = jsonable(direct.witness) if not direct.holds else diagram.failures()[0].to_json()
    return report


def cmd_check_shannon(args) -> dict:
    s = io.load_shannon(args.system)
    randomized = not s.deterministic
    direct = is_perfectly_secure_direct(s)
    diagram = check_sto_security(s, randomized=randomized)
    pc = ciphertext_distribution(s)
    report = {
        "command": "check-shannon",
        "system": str(args.system),
        "randomized": randomized,
        "ciphertext_distribution": {label(c): fmt(p) for c, p in pc.items()},
        "direct": _verdict_block(direct),
        "diagram": diagram.to_json(),
        "agree": direct.holds == diagram.passed,
    }
    report["verdict"] = "secure" if direct.holds and diagram.passed else "insecure"
    if report["verdict"] == "insecure":
        report["witness"] = jsonable(direct.witness) if not direct.holds else diagram.failures()[0].to_json()
    return report


def _policy(args) -> NegligibilityPolicy:
    return io.load_policy(args.policy) if args.policy else NegligibilityPolicy()


def _levels(sys_, policy, args) -> list[int]:
    if args.level is not None:
        if args.level not in sys_.levels:
            raise io.InputError(f"--level {args.level}: the system has levels {list(sys_.levels)}")
        return [args.level]
    return [l for l in sys_.levels if l <= policy.max_level]


def _load_ensemble_system(args):
    s = io.load_abstract(args.system)
    ud = check_unique_decryption(s)
    return s, ud


def _horizon(policy, levels) -> dict:
    return {**policy.to_json(), "levels_checked": levels, "disclaimer": policy.describe()}


def cmd_check_indcpa(args) -> dict:
    s, ud = _load_ensemble_system(args)
    policy = _policy(args)
    levels = _levels(s, policy, args)
    report = {
        "command": "check-indcpa",
        "system": str(args.system),
        "unique_decryption": _verdict_block(ud),
        "horizon": _horizon(policy, levels),
    }
    if not ud.holds and not args.no_decryption_check:
        report["verdict"] = "invalid"
        report["witness"] = jsonable(ud.witness)
        return report
    table = []
    witness = None
    for level in levels:
        r = ind_cpa_advantage(s, level)
        t = policy.t(level)
        ok = policy.close(level, r.advantage, 0)
        table.append({
            "level": level,
            "threshold": fmt(t),
            "max_advantage": num(r.advantage),
            "tv_oracle": fmt(r.tv_advantage),
            "best_pair": list(r.pair),
            "adversaries_scored": r.enumerated,
            "within_threshold": ok,
        })
        if not ok and witness is None:
            witness = {"level": level, "m0": r.pair[0], "m1": r.pair[1], "advantage": fmt(r.advantage), "threshold": fmt(t)}
    report["advantages"] = table
    secure = witness is None
    if args.adversaries:
        kind, advs = io.load_adversaries(args.adversaries)
        if kind != "ind-cpa":
            raise io.InputError(f"{args.adversaries}: expected IND-CPA adversaries, got {kind!r}")
        guesses = []
        for adv in advs:
            for level in levels:
                p = ind_cpa_guess_prob(s, adv, level)
                guesses.append({"adversary": adv.name, "level": level, "guess_prob": num(p)})
        report["guess_probabilities"] = guesses
        diagram = check_ind_cpa_diagram(s, advs, policy, levels)
        report["diagram"] = diagram.to_json()
        if not diagram.passed:
            secure = False
            if witness is None:
                witness = diagram.failures()[0].to_json()
    if not levels:
        report["verdict"] = "vacuous"
    else:
        report["verdict"] = "secure" if secure else "insecure"
    if witness is not None:
        report["witness"] = witness
    return report


def cmd_check_indcca2(args) -> dict:
    s, ud = _load_ensemble_system(args)
    policy = _policy(args)
    levels = _levels(s, policy, args)
    kind, advs = io.load_adversaries(args.adversaries)
    if kind != "ind-cca2":
        raise io.InputError(f"{args.adversaries}: expected IND-CCA2 adversaries, got {kind!r}")
    report = {
        "command": "check-indcca2",
        "system": str(args.system),
        "unique_decryption": _verdict_block(ud),
        "horizon": _horizon(policy, levels),
        "on_repeat": args.on_repeat,
    }
    if not ud.holds and not args.no_decryption_check:
        report["verdict"] = "invalid"
        report["witness"] = jsonable(ud.witness)
        return report
    rows = []
    witness = None
    for adv in advs:
        for level in levels:
            p = ind_cca2_guess_prob(s, adv, level, args.on_repeat)
            adv_ = abs(p - Fraction(1, 2))
            ok = policy.close(level, adv_, 0)
            rows.append({
                "adversary": adv.name, "level": level, "guess_prob": num(p),
                "advantage": num(adv_), "threshold": fmt(policy.t(level)), "within_threshold": ok,
            })
            if not ok and witness is None:
                witness = {"adversary": adv.name, "level": level, "guess_prob": fmt(p), "threshold": fmt(policy.t(level))}
    report["games"] = rows
    if not rows:
        report["verdict"] = "vacuous"
    else:
        report["verdict"] = "secure" if witness is None else "insecure"
    if witness is not None:
        report["witness"] = witness
    return report


def cmd_selftest(args) -> dict:
    return selftest.run(args.seed, args.instances)


# --- rendering -------------------------------------------------------------

def render_text(report: dict) -> str:
    lines = [f"{report['command']}: {report['verdict'].upper()}"]
    if "system" in report:
        lines.append(f"system: {report['system']}")
    if "horizon" in report:
        lines.append(f"horizon: {report['horizon']['disclaimer']}; levels checked {report['horizon']['levels_checked']}")
    for key in ("decryption_condition", "unique_decryption", "direct"):
        if key in report:
            b = report[key]
            lines.append(f"{key.replace('_', ' ')}: {'holds' if b['holds'] else 'fails'}")
    if "ciphertext_distribution" in report:
        dist = ", ".join(f"{c}: {p}" for c, p in report["ciphertext_distribution"].items())
        lines.append(f"ciphertext distribution: {dist}")
    for row in report.get("advantages", []):
        lines.append(
            f"  level {row['level']}: max advantage {fmt_with_decimal(Fraction(row['max_advantage']['exact']))}"
            f" (threshold {row['threshold']}) {'ok' if row['within_threshold'] else 'EXCEEDS'}"
        )
    for row in report.get("guess_probabilities", []):
        lines.append(f"  {row['adversary']} @ {row['level']}: Pr[guess] = {fmt_with_decimal(Fraction(row['guess_prob']['exact']))}")
    for row in report.get("games", []):
        lines.append(
            f"  {row['adversary']} @ {row['level']}: Pr[guess] = {fmt_with_decimal(Fraction(row['guess_prob']['exact']))},"
            f" advantage {row['advantage']['exact']} (threshold {row['threshold']})"
            f" {'ok' if row['within_threshold'] else 'EXCEEDS'}"
        )
    if "diagram" in report:
        d = report["diagram"]
        lines.append(f"diagram: {'commutes' if d['passed'] else 'does not commute'}"
                     + (f" ({d['note']})" if d.get("note") else ""))
        for r in d["pairs"]:
            if not r["equal"]:
                w = r["witness"]
                lhs, rhs = r["pair"]
                lines.append(f"  {lhs} vs {rhs}: differ at ({w['row']}, {w['col']}): {w['lhs']} vs {w['rhs']}")
    for s in report.get("suites", []):
        lines.append(f"  {s['suite']}: {s['status']} ({s['instances']} instances, {s['disagreements']} disagreements)")
    if "witness" in report:
        lines.append("witness: " + json.dumps(report["witness"], sort_keys=True))
    return "\n".join(lines)


def dumps(report: dict) -> str:
    return json.dumps(report, indent=2, sort_keys=True)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="catcrypt", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, system=True):
        if system:
            sp.add_argument("--system", required=True, help="system JSON file or bundled example name")
        sp.add_argument("--format", choices=("text", "json"), default="text")
        sp.add_argument("--seed", type=int, default=0, help="RNG seed (selftest instance generation)")

    common(sub.add_parser("check-dy", help="algebraic perfect security of a Dolev-Yao system"))
    common(sub.add_parser("check-shannon", help="Shannon perfect security of a probabilistic system"))
    for name, helptext in (("check-indcpa", "IND-CPA over an ensemble system"),
                           ("check-indcca2", "IND-CCA2 game over an ensemble system")):
        sp = sub.add_parser(name, help=helptext)
        common(sp)
        sp.add_argument("--adversaries", required=name == "check-indcca2", help="adversary JSON file")
        sp.add_argument("--policy", help="policy JSON file ({\"L\": n, \"threshold\": \"2^-l\"})")
        sp.add_argument("--level", type=int, help="check this level only")
        sp.add_argument("--no-decryption-check", action="store_true",
                        help="proceed even if unique decryption fails")
        if name == "check-indcca2":
            sp.add_argument("--on-repeat", choices=("lose", "allow"), default="lose",
                            help="scoring when the post-challenge query equals the challenge")
    sp = sub.add_parser("selftest", help="run the cross-oracle agreement suites")
    common(sp, system=False)
    sp.add_argument("--instances", type=int, help="random instances per suite (0: none)")
    return p


COMMANDS = {
    "check-dy": cmd_check_dy,
    "check-shannon": cmd_check_shannon,
    "check-indcpa": cmd_check_indcpa,
    "check-indcca2": cmd_check_indcca2,
    "selftest": cmd_selftest,
}


def run(argv=None) -> tuple[dict | None, int, str]:
    """Returns (report, exit code, rendered output)."""
    args = build_parser().parse_args(argv)
    try:
        report = COMMANDS[args.command](args)
    except (io.InputError, EnsembleError, CapExceeded) as e:
        return None, 2, f"error: {e}"
    text = dumps(report) if args.format == "json" else render_text(report)
    return report, EXIT[report["verdict"]], text


def main(argv=None) -> int:
    report, code, text = run(argv)
    stream = sys.stdout if report is not None else sys.stderr
    print(text, file=stream)
    return code


if __name__ == "__main__":
    sys.exit(main())
