import random
from fractions import Fraction as F

import numpy as np
import pytest

import oracle
from catcrypt.ensemble import (
    EnsembleError,
    FeasibleEnsemble,
    NegligibilityPolicy,
    RandomizedFn,
    StochasticEnsemble,
    alignment,
    ensemble_compose,
    first_violation,
    identity_ensemble,
    identity_fn,
    negligible_equiv,
    random_ensemble,
    random_fn,
    rcompose,
    realizes,
    restrict,
    seed_prob,
)
from catcrypt.semiring import RATIONAL, EncodedSet, Matrix, compose

XOR1 = RandomizedFn.from_callable(1, 1, 1, lambda rho, x: oracle.xor(rho, x))


def test_seed_prob_examples(frozen):
    assert str(seed_prob(XOR1, "0", "0")) == frozen["seed_prob"]["xor_r1"] == "1/2"
    const = RandomizedFn.from_callable(2, 1, 1, lambda rho, x: "1")
    assert seed_prob(const, "0", "1") == 1
    table = RandomizedFn.from_mapping(1, 1, 1, {("0", "0"): "0", ("0", "1"): "0", ("1", "0"): "1", ("1", "1"): "1"})
    assert str(seed_prob(table, "1", "1")) == frozen["seed_prob"]["projection_table"]
    with pytest.raises(EnsembleError):
        seed_prob(XOR1, "00", "0")


def test_rcompose_examples(frozen):
    assert rcompose(identity_fn(1), XOR1) == XOR1
    both = rcompose(XOR1, XOR1)
    assert both.profile == (2, 1, 1)
    got = {f"{rho},{x}": both(rho, x) for rho in ("00", "01", "10", "11") for x in "01"}
    assert got == frozen["double_xor"]
    with pytest.raises(EnsembleError, match="length"):
        rcompose(identity_fn(2), XOR1)


def test_rcompose_undefined_propagates():
    f = RandomizedFn.from_mapping(0, 1, 1, {("", "0"): "1"})
    g = RandomizedFn.from_mapping(0, 1, 1, {("", "0"): "0"})
    h = rcompose(g, f)
    assert h("", "0") is None and h("", "1") is None
    assert rcompose(f, g)("", "0") == "1"


def test_rcompose_matches_definition_on_random_tables():
    rng = random.Random(1)
    for _ in range(30):
        f = random_fn(rng.randint(0, 2), rng.randint(0, 2), 2, rng)
        g = random_fn(rng.randint(0, 2), 2, rng.randint(0, 2), rng)
        h = rcompose(g, f)
        for rho2 in oracle.words(g.seed_len):
            for rho1 in oracle.words(f.seed_len):
                for x in oracle.words(f.in_len):
                    y = f(rho1, x)
                    want = None if y is None else g(rho2, y)
                    assert h(rho2 + rho1, x) == want


def test_distribution_and_matrix():
    assert XOR1.distribution("1") == {"0": F(1, 2), "1": F(1, 2)}
    m = XOR1.matrix()
    assert m.entries == ((F(1, 2), F(1, 2)), (F(1, 2), F(1, 2)))
    partial = RandomizedFn.from_mapping(1, 1, 1, {("0", "0"): "1"})
    assert partial.distribution("0") == {"1": F(1, 2)}
    with pytest.raises(EnsembleError, match="length"):
        XOR1.matrix(EncodedSet(["a", "b", "c"]))


def test_table_validation():
    with pytest.raises(EnsembleError):
        RandomizedFn(0, 1, 1, [0, 2])
    with pytest.raises(EnsembleError):
        RandomizedFn.from_mapping(0, 1, 1, {("", "0"): "11"})
    with pytest.raises(EnsembleError, match="too large"):
        RandomizedFn(20, 20, 1, np.zeros(1))
    assert XOR1.to_mapping()["1,0"] == "1"


def test_restrict_pads_on_the_right():
    f = RandomizedFn.deterministic(2, 2, lambda x: x[::-1])
    r = restrict(f, 1)
    assert r("", "1") == "01" and r("", "0") == "00"
    with pytest.raises(EnsembleError):
        restrict(f, 3)


def test_realizes_examples():
    two = EncodedSet.bitstrings(1)
    half = Matrix(RATIONAL, two, two, [[F(1, 2), F(1, 2)], [F(1, 2), F(1, 2)]])
    xor_ens = FeasibleEnsemble((XOR1,))
    assert realizes(StochasticEnsemble((half,)), xor_ens)
    v = realizes(StochasticEnsemble((Matrix(RATIONAL, two, two, [[1, 0], [0, 1]]),)), xor_ens)
    assert not v and v.witness["level"] == 1
    assert realizes(StochasticEnsemble(()), FeasibleEnsemble(()))


def xor_ensemble(levels=(1, 2, 3)):
    return FeasibleEnsemble(
        tuple(RandomizedFn.from_callable(n, n, n, lambda rho, x: oracle.xor(rho, x)) for n in levels)
    )


def test_ensemble_compose_examples():
    psi = xor_ensemble()
    same = ensemble_compose(identity_ensemble([1, 2, 3]), psi)
    for l in psi.level_numbers:
        assert same.at(l).matrix() == psi.at(l).matrix()
    double = ensemble_compose(psi, psi)
    for n in (1, 2, 3):
        f = double.at(n)
        assert f.profile == (2 * n, n, n)
        for rho2 in oracle.words(n):
            for rho1 in oracle.words(n):
                for x in oracle.words(n):
                    assert f(rho2 + rho1, x) == oracle.xor(rho2, oracle.xor(rho1, x))


def test_compose_semantics_are_matrix_products():
    rng = random.Random(8)
    for _ in range(20):
        psi = random_ensemble(rng, 3)
        theta = random_ensemble(rng, 3, in_lens=[1, 2, 3], max_out=2)
        comp = ensemble_compose(theta, psi)
        for l, lb in alignment(theta, psi).items():
            f = psi.at(l)
            g = restrict(theta.at(lb), f.out_len)
            assert comp.at(l).matrix() == compose(f.matrix(), g.matrix())


def test_alignment_modes_and_errors():
    psi = FeasibleEnsemble((identity_fn(1), RandomizedFn.deterministic(2, 3, lambda x: x + "0")))
    theta = identity_ensemble([1, 2, 3])
    assert alignment(theta, psi) == {1: 1, 2: 3}
    assert alignment(theta, psi, "literal") == {1: 1, 2: 2}
    with pytest.raises(EnsembleError, match="cannot compose"):
        ensemble_compose(theta, psi, "literal")
    square = FeasibleEnsemble((identity_fn(1), identity_fn(2)))
    assert ensemble_compose(theta, square, "literal").at(2).profile == (0, 2, 2)
    with pytest.raises(EnsembleError, match="horizon"):
        alignment(identity_ensemble([1, 2]), psi)
    with pytest.raises(EnsembleError):
        ensemble_compose(theta, psi, "other")


def test_ensemble_profile_rules():
    with pytest.raises(EnsembleError, match="strictly"):
        FeasibleEnsemble((identity_fn(2), identity_fn(2)))
    with pytest.raises(EnsembleError, match="decrease"):
        FeasibleEnsemble((identity_fn(2), RandomizedFn.deterministic(3, 1, lambda x: "0")))
    e = FeasibleEnsemble((identity_fn(1), identity_fn(2)), start=3)
    assert list(e.level_numbers) == [3, 4] and e.profile("s") == [1, 2]
    with pytest.raises(EnsembleError):
        e.at(1)


def test_stochastic_ensemble_rejects_overweight_levels():
    one = EncodedSet.bitstrings(0)
    with pytest.raises(EnsembleError):
        StochasticEnsemble((Matrix(RATIONAL, one, one, [[2]]),))


def test_negligible_equiv_examples():
    pol = NegligibilityPolicy(10, "1/l")
    sigma = [F(1, 2)] * 10
    assert negligible_equiv(sigma, sigma, pol)
    assert negligible_equiv(sigma, [F(1, 2) + F(1, 2 ** l) for l in range(1, 11)], pol)
    assert not negligible_equiv(sigma, [F(3, 4)] * 10, pol)
    assert first_violation(sigma, [F(3, 4)] * 10, pol) == 5
    with pytest.raises(EnsembleError):
        negligible_equiv({1: 0}, {2: 0}, pol)


def test_policy_thresholds():
    assert NegligibilityPolicy(4, "1/l^2").t(3) == F(1, 9)
    assert NegligibilityPolicy(4).t(3) == F(1, 8)
    assert NegligibilityPolicy(4, "0").t(2) == 0
    strict = NegligibilityPolicy(4, "2^-l", strict=True)
    assert not strict.close(1, F(1, 2), 0) and NegligibilityPolicy(4).close(1, F(1, 2), 0)
    with pytest.raises(EnsembleError):
        NegligibilityPolicy(4, "l^2")
    with pytest.raises(EnsembleError):
        NegligibilityPolicy(4, "2")
    assert "horizon" not in NegligibilityPolicy(3).describe() and "l <= 3" in NegligibilityPolicy(3).describe()
