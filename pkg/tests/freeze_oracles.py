"""Regenerate frozen_oracle.json from the brute-force oracle: python tests/freeze_oracles.py"""
import json
from fractions import Fraction
from pathlib import Path

import oracle as O

OUT = Path(__file__).with_name("frozen_oracle.json")


def s(x):
    return f"{Fraction(x).numerator}/{Fraction(x).denominator}"


def cpa_values():
    systems = {
        "otp": (O.otp_enc, lambda n: 0),
        "identity": (O.identity_enc, lambda n: 0),
        "noisy": (O.noisy_enc, lambda n: n + 1),
    }
    advs = {
        "distinguisher": (lambda r1, c, m0, m1, st: c[0], 0),
        "fixed-guess": (lambda r1, c, m0, m1, st: "0", 0),
        "coin-flip": (lambda r1, c, m0, m1, st: r1, 1),
    }
    out = {}
    for name, (enc, eb) in systems.items():
        for adv, (a1, a1_bits) in advs.items():
            for n in (1, 2, 3):
                a0 = lambda r0, k, n=n: ("0" * n, "1" * n, "")
                p = O.cpa_guess(n, n, enc, eb(n), a0, 0, a1, a1_bits)
                out[f"{name}/{adv}/{n}"] = s(p)
        for n in (1, 2, 3):
            out[f"{name}/tv/{n}"] = s(O.tv_advantage(n, enc, eb(n), O.words(n)))
    return out


def main():
    frozen = {}
    frozen["seed_prob"] = {
        "xor_r1": s(O.seed_count(lambda rho, x: O.xor(rho, x), 1, "0", "0")),
        "projection_table": s(O.seed_count(lambda rho, x: rho, 1, "1", "1")),
    }
    frozen["double_xor"] = {
        f"{r2}{r1},{x}": O.xor(r2, O.xor(r1, x)) for r2 in "01" for r1 in "01" for x in "01"
    }
    frozen["cpa"] = cpa_values()
    unflip = lambda mt: "0" if mt[-1] == "1" else "1"  # noqa: E731
    frozen["cca2"] = {}
    for n in (1, 2):
        frozen["cca2"][f"malleable/bit-flip/{n}"] = s(O.cca2_bitflip(n, O.xor, O.xor, unflip))
        frozen["cca2"][f"malleable/oracle-ignoring/{n}"] = s(O.cca2_bitflip(n, O.xor, O.xor, lambda mt: "0"))

    z2 = ["0", "1"]
    third = Fraction(1, 3)
    frozen["shannon"] = {
        "otp_z2_skewed_mu_posterior_c0": {
            m: s(p) for m, p in O.posterior(z2, O.xor, {"0": Fraction(1, 2), "1": Fraction(1, 2)},
                                            {"0": 2 * third, "1": third}, "0").items()
        },
        "otp_z2_skewed_kappa_posterior_c0": {
            m: s(p) for m, p in O.posterior(z2, O.xor, {"0": Fraction(3, 4), "1": Fraction(1, 4)},
                                            {"0": Fraction(1, 2), "1": Fraction(1, 2)}, "0").items()
        },
        "otp_z2_skewed_kappa_secure": O.perfectly_secure(
            z2, O.xor, {"0": Fraction(3, 4), "1": Fraction(1, 4)}, {"0": Fraction(1, 2), "1": Fraction(1, 2)}
        ),
    }
    # Z3 shift under uniform keys: every entry of the encryption matrix
    z3 = [0, 1, 2]
    enc_z3 = [[sum(Fraction(1, 3) for k in z3 if (m + k) % 3 == c) for c in z3] for m in z3]
    frozen["shannon"]["shift_z3_enc"] = [[s(x) for x in row] for row in enc_z3]
    # Sto square for OTP on Z2, uniform kappa and mu: both legs, entry (c, m)
    j = O.joint(z2, O.xor, {"0": Fraction(1, 2), "1": Fraction(1, 2)}, {"0": Fraction(1, 2), "1": Fraction(1, 2)})
    frozen["shannon"]["otp_z2_sto_leg"] = {f"{c},{m}": s(j.get((m, c), 0) / 2) for c in z2 for m in z2}
    OUT.write_text(json.dumps(frozen, indent=1, sort_keys=True) + "\n")


if __name__ == "__main__":
    main()
