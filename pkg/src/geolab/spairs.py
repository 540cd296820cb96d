"""Sign-sequence combinatorics: s-pair matching, depths, and sum bounds.

A crossing sequence reduces to signs s_n = +/-1 with attached angles
theta_n and nondecreasing curvature prefixes K_n.  Two indexes i < j form
an s-pair when the signs between them cancel exactly and every proper
prefix from i stays positive (bracket matching); the depth of a pair is
the length of the longest chain of pairs nested inside it, itself
included.  The depth partition powers the alternating-sum bounds checked
by :func:`check_depth_bounds`.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import pi

import numpy as np

from .reports import FAIL, PASS, LemmaReport
from .tolerances import DEFAULT

_ORACLE_CAP = 24


@dataclass(frozen=True)
class SPair:
    """Matched index pair ``i < j`` with nesting depth ``q >= 1``."""

    i: int
    j: int
    depth: int


class SignSequence:
    """Signs with optional attached angles and curvature prefixes.

    Parameters
    ----------
    signs : array-like of {+1, -1}
    theta : array-like of float, optional
        Per-index angles in radians, |theta_n| <= pi/2.
    K : array-like of float, optional
        Nondecreasing curvature prefix sums in [0, 4*pi].
    """

    def __init__(self, signs, theta=None, K=None):
        self.signs = np.asarray(signs, dtype=np.int64)
        if self.signs.ndim != 1:
            raise ValueError("signs must be one-dimensional")
        if len(self.signs) and not np.isin(self.signs, (-1, 1)).all():
            raise ValueError("signs must be +1 or -1")
        self.theta = None if theta is None else np.asarray(theta, dtype=np.float64)
        self.K = None if K is None else np.asarray(K, dtype=np.float64)
        for name, arr in (("theta", self.theta), ("K", self.K)):
            if arr is not None and arr.shape != self.signs.shape:
                raise ValueError(f"{name} must match signs in length")
        if self.theta is not None and len(self.theta):
            if np.abs(self.theta).max() > pi / 2 + DEFAULT.curvature:
                raise ValueError("theta entries must lie in [-pi/2, pi/2]")
        if self.K is not None and len(self.K):
            if (np.diff(self.K) < -DEFAULT.defect).any():
                raise ValueError("K must be nondecreasing")
            if self.K.min() < -DEFAULT.defect or self.K.max() > 4 * pi + DEFAULT.defect:
                raise ValueError("K must lie in [0, 4*pi]")

    def __len__(self):
        return len(self.signs)

    @property
    def prefix_sums(self):
        """Inclusive running sums: prefix_sums[n] = s_0 + ... + s_n."""
        return np.cumsum(self.signs)

    @classmethod
    def from_alternating(cls, alpha, signs, K=None):
        """Sequence with theta_n chosen so that s_n * theta_n = (-1)^n * alpha_n."""
        signs = np.asarray(signs, dtype=np.int64)
        alpha = np.asarray(alpha, dtype=np.float64)
        parity = np.where(np.arange(len(signs)) % 2 == 0, 1, -1)
        return cls(signs, theta=signs * parity * alpha, K=K)

    def to_json(self):
        out = {"signs": [int(s) for s in self.signs]}
        if self.theta is not None:
            out["theta"] = [float(v) for v in self.theta]
        if self.K is not None:
            out["K"] = [float(v) for v in self.K]
        return out

    @classmethod
    def from_json(cls, obj):
        return cls(obj["signs"], theta=obj.get("theta"), K=obj.get("K"))


class SPairMatching:
    """Result of matching: the pairs plus the leftover index set R."""

    def __init__(self, pairs, unpaired, n):
        self.pairs = sorted(pairs, key=lambda p: p.i)
        self.unpaired = sorted(unpaired)
        self.n = n
        self._check()

    def __iter__(self):
        return iter(self.pairs)

    def __len__(self):
        return len(self.pairs)

    def __eq__(self, other):
        return (
            isinstance(other, SPairMatching)
            and self.pairs == other.pairs
            and self.unpaired == other.unpaired
        )

    def depth_of(self):
        """Index -> depth of its pair (unpaired indexes absent)."""
        out = {}
        for p in self.pairs:
            out[p.i] = p.depth
            out[p.j] = p.depth
        return out

    @property
    def max_depth(self):
        return max((p.depth for p in self.pairs), default=0)

    def _check(self):
        seen = set()
        for p in self.pairs:
            if not (0 <= p.i < p.j < self.n) or p.depth < 1:
                raise ValueError(f"malformed pair {p}")
            if p.i in seen or p.j in seen:
                raise ValueError(f"index reused by pair {p}")
            seen.update((p.i, p.j))
        # equal-depth pairs must be disjoint, never nested
        by_depth = {}
        for p in self.pairs:
            by_depth.setdefault(p.depth, []).append(p)
        for q, ps in by_depth.items():
            ps.sort(key=lambda p: p.i)
            for a, b in zip(ps, ps[1:]):
                if b.i < a.j:
                    raise ValueError(f"depth-{q} pairs {a} and {b} overlap")

    def to_json(self):
        return {
            "pairs": [[p.i, p.j, p.depth] for p in self.pairs],
            "unpaired": list(self.unpaired),
        }


def match_spairs(seq):
    """Match all s-pairs of ``seq`` with depths, in linear time.

    A +1 opens a bracket, a -1 closes the most recent open one; a pair's
    depth is one more than the largest depth completed directly inside it,
    i.e. the length of the longest nested chain it starts.  Closes with no
    open bracket and opens never closed end up unpaired.

    Returns
    -------
    SPairMatching
        Iterable of :class:`SPair` ordered by opening index, with the
        unpaired index set in ``.unpaired``.
    """
    if isinstance(seq, SignSequence):
        signs = seq.signs
    else:
        signs = np.asarray(seq, dtype=np.int64)
    stack = []
    inner = []  # per open bracket: deepest pair completed directly inside
    pairs = []
    unpaired = []
    for n, s in enumerate(signs):
        if s > 0:
            stack.append(n)
            inner.append(0)
        elif stack:
            i = stack.pop()
            d = inner.pop() + 1
            pairs.append(SPair(int(i), int(n), int(d)))
            if inner:
                inner[-1] = max(inner[-1], d)
        else:
            unpaired.append(int(n))
    unpaired.extend(int(i) for i in stack)
    return SPairMatching(pairs, unpaired, len(signs))


def brute_force_oracle(seq):
    """Pairs by direct definition testing; exponential-safe but capped.

    Tests every (i, j) against the raw conditions (zero total, positive
    proper prefixes, s_i = +1, s_j = -1) and computes depths by explicit
    chain enumeration over the found pairs.
    """
    if isinstance(seq, SignSequence):
        signs = seq.signs
    else:
        signs = np.asarray(seq, dtype=np.int64)
    if len(signs) > _ORACLE_CAP:
        raise ValueError(f"oracle capped at length {_ORACLE_CAP}")
    raw = []
    for i in range(len(signs)):
        if signs[i] != 1:
            continue
        for j in range(i + 1, len(signs)):
            if signs[j] != -1:
                continue
            run = np.cumsum(signs[i : j + 1])
            if run[-1] == 0 and (run[:-1] > 0).all():
                raw.append((i, j))

    def chain_len(p):
        best = 0
        for q in raw:
            if p[0] < q[0] and q[1] < p[1]:
                best = max(best, chain_len(q))
        return best + 1

    pairs = [SPair(i, j, chain_len((i, j))) for i, j in raw]
    used = {x for p in pairs for x in (p.i, p.j)}
    unpaired = [n for n in range(len(signs)) if n not in used]
    return SPairMatching(pairs, unpaired, len(signs))


def partition_indices(seq, q_max=None):
    """Depth classes S_q, the unpaired set R, and level sets Q_r.

    ``S[q]`` lists indexes belonging to depth-q pairs, ``R`` the unpaired
    indexes, and ``Q[r]`` the indexes whose inclusive sign prefix sum is
    r.  Each Q_r meets R in at most two indexes (one unmatched close, one
    unmatched open); this is asserted.
    """
    if not isinstance(seq, SignSequence):
        seq = SignSequence(seq)
    matching = match_spairs(seq)
    if q_max is None:
        q_max = matching.max_depth
    S = {q: [] for q in range(1, q_max + 1)}
    for p in matching.pairs:
        if p.depth <= q_max:
            S[p.depth].extend((p.i, p.j))
    for q in S:
        S[q].sort()
    R = list(matching.unpaired)
    prefix = seq.prefix_sums
    Q = {}
    for n, r in enumerate(prefix):
        Q.setdefault(int(r), []).append(n)
    r_set = set(R)
    for r, idxs in Q.items():
        hits = [n for n in idxs if n in r_set]
        if len(hits) > 2:
            raise AssertionError(f"Q_{r} meets R in {len(hits)} > 2 indexes")
    return {"S": S, "R": R, "Q": Q}


def check_depth_bounds(seq, tol=None):
    """Alternating-sum bounds by depth class, in total, and per pair.

    Checks, with the attached angles and curvature prefixes:

    - for every depth q: |sum over S_q of s_n theta_n| <= 4*pi*q,
    - with q* the largest absolute sign sum over any index interval:
      |sum of s_n theta_n| <= 2*q*(q*+3/2)*pi,
    - for every pair (i, j) of depth d: theta_i - theta_j <= d*(K_j - K_i).

    Returns a report whose verdict is fail when any margin exceeds the
    tolerance (default the curvature slack).
    """
    if not isinstance(seq, SignSequence):
        raise TypeError("check_depth_bounds needs a SignSequence")
    if seq.theta is None or seq.K is None:
        raise ValueError("sequence must carry theta and K")
    tol = DEFAULT.curvature if tol is None else tol

    matching = match_spairs(seq)
    s_theta = seq.signs * seq.theta
    details = []
    worst_depth = 0.0
    by_depth = {}
    for p in matching.pairs:
        by_depth.setdefault(p.depth, []).append(p)
    for q, ps in sorted(by_depth.items()):
        total = float(sum(s_theta[p.i] + s_theta[p.j] for p in ps))
        excess = abs(total) - 4 * pi * q
        worst_depth = max(worst_depth, excess)
        details.append({"check": "depth-sum", "q": q, "sum": total, "bound": 4 * pi * q})

    # interval sums of signs are differences of prefix sums (with the empty
    # prefix 0 included), so their largest magnitude is max - min
    if len(seq):
        prefixes = np.concatenate([[0], seq.prefix_sums])
        q_star = int(prefixes.max() - prefixes.min())
    else:
        q_star = 0
    total_sum = float(s_theta.sum())
    total_bound = 2 * q_star * (q_star + 1.5) * pi
    total_excess = abs(total_sum) - total_bound
    details.append(
        {"check": "total-sum", "q_star": q_star, "sum": total_sum, "bound": total_bound}
    )

    worst_pair = 0.0
    for p in matching.pairs:
        lhs = float(seq.theta[p.i] - seq.theta[p.j])
        rhs = p.depth * float(seq.K[p.j] - seq.K[p.i])
        if lhs - rhs > worst_pair:
            worst_pair = lhs - rhs
            details.append(
                {"check": "pair-step", "i": p.i, "j": p.j, "depth": p.depth,
                 "lhs": lhs, "bound": rhs}
            )

    residuals = {
        "depth_sum_excess": worst_depth,
        "total_sum_excess": total_excess,
        "pair_step_excess": worst_pair,
    }
    verdict = FAIL if max(residuals.values()) > tol else PASS
    return LemmaReport(
        lemma="crossing-depth-bounds",
        instance={"n": len(seq), "n_pairs": len(matching), "q_star": q_star},
        residuals=residuals,
        tolerance={"tc": tol},
        verdict=verdict,
        details=details,
    )
