"""Instance-level counting, exact uniform sampling, median stable matchings,
and brute-force sex-equal / balanced optimization.
"""
from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Optional

from .errors import CapExceededError, ValidationError
from .downsets import count_downsets, count_downsets_within, sample_downset
from .instance import Instance, Matching
from .pathdecomp import construct_path_decomposition
from .posets import enumerate_downsets_bruteforce, reachable_from
from .rotations import matching_from_downset, rotation_digraph


@dataclass(frozen=True)
class FairnessScores:
    """Total satisfaction per side plus the derived fairness measures."""

    s_men: int
    s_women: int
    delta: int
    beta: int

    @staticmethod
    def of(inst: Instance, mu: Matching) -> "FairnessScores":
        s_men = 0
        for m in range(inst.n_men):
            w = mu.woman_of(m)
            if w is None:
                raise ValidationError("scores need every man matched")
            s_men += inst.men_rank[m][w]
        s_women = 0
        for w in range(inst.n_women):
            m = mu.man_of(w)
            if m is None:
                raise ValidationError("scores need every woman matched")
            s_women += inst.women_rank[w][m]
        return FairnessScores(
            s_men, s_women, abs(s_men - s_women), max(s_men, s_women)
        )


def count_stable_matchings(inst: Instance) -> int:
    """Exact count via the rotation digraph's extent decomposition and the
    pathwidth DP; FPT in the range of the instance.
    """
    dg, x = construct_path_decomposition(inst)
    return count_downsets(dg.dag(), x)


def sample_stable_matchings(
    inst: Instance, rng: random.Random, draws: int
) -> list[Matching]:
    """Exactly uniform draws from the stable matchings of inst. The digraph
    and decomposition are computed once and reused across draws.
    """
    dg, x = construct_path_decomposition(inst)
    d = dg.dag()
    out = []
    for _ in range(draws):
        zs = sample_downset(d, x, rng)
        out.append(matching_from_downset(inst, dg, {v - 1 for v in zs}))
    return out


def sample_stable_matching(inst: Instance, rng: random.Random) -> Matching:
    return sample_stable_matchings(inst, rng, 1)[0]


def median_stable_matching(inst: Instance, upper: bool = False) -> Matching:
    """The median stable matching: keep every rotation contained in at least
    half of all downsets. For an even count the lower median is returned;
    upper=True keeps the borderline rotations as well.
    """
    dg, x = construct_path_decomposition(inst)
    d = dg.dag()
    total = count_downsets(d, x)
    if total % 2 == 1:
        threshold = (total + 1) // 2
    else:
        threshold = total // 2 if upper else total // 2 + 1
    keep = set()
    verts = set(d.vertices())
    reach = {u: reachable_from(d, u) for u in verts}
    for rho in dg.rotations:
        anc = {u for u in verts if rho.id + 1 in reach[u]}
        n_rho = count_downsets_within(d, x, verts - anc)
        if n_rho >= threshold:
            keep.add(rho.id)
    return matching_from_downset(inst, dg, keep)


def _optimize(inst: Instance, key_name: str, max_matchings: int):
    dg = rotation_digraph(inst)
    d = dg.dag()
    downsets = enumerate_downsets_bruteforce(d, max_p=d.p)
    if len(downsets) > max_matchings:
        raise CapExceededError(
            f"{len(downsets)} stable matchings exceed cap {max_matchings}"
        )
    best: Optional[tuple] = None
    for zs in downsets:
        ids = tuple(sorted(v - 1 for v in zs))
        mu = matching_from_downset(inst, dg, ids)
        scores = FairnessScores.of(inst, mu)
        key = (getattr(scores, key_name), ids)
        if best is None or key < best[0]:
            best = (key, mu, scores)
    assert best is not None
    return best[1], best[2]


def sex_equal_bruteforce(
    inst: Instance, max_matchings: int = 10**6
) -> tuple[Matching, FairnessScores]:
    """Stable matching minimizing |S_M - S_W| by enumerating all downsets;
    ties broken by the lexicographically least downset.
    """
    return _optimize(inst, "delta", max_matchings)


def balanced_bruteforce(
    inst: Instance, max_matchings: int = 10**6
) -> tuple[Matching, FairnessScores]:
    """Stable matching minimizing max(S_M, S_W), same search as sex-equal."""
    return _optimize(inst, "beta", max_matchings)
