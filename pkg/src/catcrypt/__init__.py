"""Finite, exact checkers for cryptographic secrecy phrased as commuting diagrams."""
from .diagram import CommutativityReport, Diagram, Edge, check_commutes, exact, within
from .ensemble import (
    FeasibleEnsemble,
    NegligibilityPolicy,
    RandomizedFn,
    StochasticEnsemble,
    ensemble_compose,
    negligible_equiv,
    rcompose,
    realizes,
    seed_prob,
)
from .games import (
    AbstractCryptoSystem,
    AdversaryPair,
    CCA2Adversary,
    check_ind_cpa_diagram,
    ind_cca2_guess_prob,
    ind_cpa_guess_prob,
    max_ind_cpa_advantage,
)
from .semiring import BOOLEAN, RATIONAL, EncodedSet, Matrix, compose, identity, is_stochastic, kronecker
from .shannon import ShannonSystem, build_sto_security_diagram, is_perfectly_secure_direct
from .symbolic import (
    DolevYaoSystem,
    build_rel_security_diagram,
    check_decryption_condition,
    is_algebraically_perfectly_secure,
)

__version__ = "0.1.0"
