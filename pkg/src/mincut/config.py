"""Tunable constants shared across the toolkit.

Two profiles exist.  ``faithful`` keeps every constant at the value the
algorithms were designed around (base-case threshold 100, full round
counts).  ``fast`` shrinks thresholds so that unit tests exercise the
recursive machinery on small inputs.  Profiles never change algorithms,
only constants.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, replace
from fractions import Fraction


@dataclass(frozen=True)
class Config:
    profile: str = "faithful"

    # graph-core
    w_max: int = 2**20
    oracle_limit: int = 14

    # single-source mincuts: below this tree size the recursion computes
    # per-target maxflows directly.
    ssmc_base: int = 100

    # epsilon used when partial-SSMC builds its internal guide trees.  At
    # desk scale correctness flows through the exact base case, so this
    # only controls running time of the packing subroutine.
    ssmc_guide_eps: Fraction = Fraction(3, 10)

    # default epsilon for guide_trees() as a public operation
    guide_eps: Fraction = Fraction(1, 10)

    # default epsilon for the sparsifier / packing entry points
    pack_eps: Fraction = Fraction(1, 20)

    # skeleton graph parameters (c and eps of the near-mincut sparsifier)
    skeleton_c: Fraction = Fraction(5)
    skeleton_eps: Fraction = Fraction(1, 5)
    skeleton_lambda_cap: int = 64

    # congestion/absorption factor assumed for expander-decomposition
    # driven constants (psi).  Recorded, conservative; each decomposition
    # measures its own achieved gamma and tests assert the ceiling below.
    gamma_expdecomp: int = 8
    gamma_ceiling_factor: int = 64  # assert measured gamma <= 64*log^2(nW)

    # heavy-path decomposition constant of the guide/GH-tree round bounds
    c_path_decomp: int = 1

    # dynamic forest: asserted splice budget, splices <= C * k * log2(n)
    splice_budget_c: int = 8

    # decomposition loops: cap rounds at min(paper value, |U|) and stop
    # early once a full pass adds no new triple (coverage is checked
    # directly, so extra rounds are provably no-ops).
    early_exit_rounds: bool = True

    def stop_threshold(self) -> Fraction:
        """MWU termination threshold; any value in [1-eps, 1] is valid."""
        return Fraction(1)


FAITHFUL = Config()
FAST = replace(
    FAITHFUL,
    profile="fast",
    ssmc_base=5,
    ssmc_guide_eps=Fraction(4, 5),
)

_PROFILES = {"faithful": FAITHFUL, "fast": FAST}


def get_config(profile: str | None = None) -> Config:
    if profile is None:
        profile = os.environ.get("MINCUT_PROFILE", "faithful")
    try:
        return _PROFILES[profile]
    except KeyError:
        raise ValueError(f"unknown profile {profile!r}") from None
