"""Rate regions, combined sum bounds, and decomposability of parallel networks.

For a TIN-optimal sub-channel the achievable region is cut out by one bound
per cycle of the interference graph (plus nonnegativity).  For a parallel
network the tightest bound on any subset's *total* (across sub-channels) rate
is the subset's best cyclic partition bound summed over sub-channels; these
"combined" bounds are valid for the parallel network as a whole.

A point in the combined region need not decompose into per-sub-channel
points of the individual regions -- ``separate_tin_decomposable`` settles
that question exactly by LP, and produces a per-user cap certificate when
decomposition is impossible.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

from .cycles import (
    _check_enum_guard,
    _cycle_scan_data,
    cycle_bound_rhs,
    enumerate_cycles,
)
from .model import CrossCheckError, InputError, Network, StrengthMatrix, as_rational
from .optimize import LinearProgram, best_partition_assignment, solve_lp

__all__ = [
    "RegionConstraint",
    "tin_region",
    "MembershipResult",
    "region_contains",
    "CombinedSumBounds",
    "combined_sum_bounds",
    "UserCap",
    "DecompositionResult",
    "separate_tin_decomposable",
]


# ---------------------------------------------------------------------------
# single sub-channel region
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RegionConstraint:
    """sum of d_k over ``users`` <= ``rhs``; ``cycle`` records the source."""

    users: tuple
    rhs: Fraction
    cycle: object = None

    def evaluate(self, point) -> Fraction:
        return sum((point[k - 1] for k in self.users), Fraction(0))

    def holds(self, point) -> bool:
        return self.evaluate(point) <= self.rhs

    def __str__(self):
        lhs = " + ".join("d%d" % k for k in self.users)
        return "%s <= %s" % (lhs, self.rhs)


def tin_region(matrix: StrengthMatrix) -> tuple:
    """One constraint per cycle, no redundancy filtering.

    This describes the sub-channel's exact achievable region when the TIN
    condition holds (together with d >= 0); otherwise the constraints are
    still valid outer bounds for what TIN itself can do.
    """
    out = []
    for cyc in enumerate_cycles(matrix.users):
        out.append(RegionConstraint(
            users=tuple(sorted(cyc.users)),
            rhs=cycle_bound_rhs(cyc, matrix),
            cycle=cyc,
        ))
    return tuple(out)


@dataclass(frozen=True)
class MembershipResult:
    inside: bool
    violated: tuple          # RegionConstraint instances the point breaks
    negative_users: tuple    # users with a negative coordinate

    def __bool__(self):
        return self.inside


def region_contains(constraints, point, users: "int | None" = None) -> MembershipResult:
    """Exact membership of a rate point in {d >= 0} cut by ``constraints``."""
    pt = tuple(as_rational(x) for x in point)
    if users is not None and len(pt) != users:
        raise InputError("point has %d coordinates, expected %d" % (len(pt), users))
    negative = tuple(k + 1 for k, x in enumerate(pt) if x < 0)
    violated = tuple(con for con in constraints if not con.holds(pt))
    return MembershipResult(
        inside=not negative and not violated,
        violated=violated,
        negative_users=negative,
    )


# ---------------------------------------------------------------------------
# combined (whole-network) sum bounds
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class CombinedSumBounds:
    """Tightest bound on each user subset's total rate across sub-channels.

    ``bounds`` maps a sorted user tuple S to the sum over sub-channels of
    the best cyclic partition bound of the sub-channel restricted to S.
    """

    users: int
    bounds: dict

    def bound(self, subset) -> Fraction:
        key = tuple(sorted(set(subset)))
        if key not in self.bounds:
            raise InputError("no bound recorded for subset %s" % (key,))
        return self.bounds[key]

    def as_constraints(self) -> tuple:
        return tuple(
            RegionConstraint(users=key, rhs=val)
            for key, val in self.bounds.items()
        )

    def contains(self, point) -> MembershipResult:
        return region_contains(self.as_constraints(), point, users=self.users)


def combined_sum_bounds(network: Network) -> CombinedSumBounds:
    """Best partition bound per user subset, accumulated over sub-channels.

    Restricting to a subset simply silences the other users, so each
    restricted sub-channel is analyzed with the same machinery (and a
    restricted TIN-optimal sub-channel stays TIN optimal).
    """
    k = network.users
    _check_enum_guard(k)
    bounds = {}
    all_users = range(1, k + 1)
    for size in range(1, k + 1):
        for subset in itertools.combinations(all_users, size):
            total = Fraction(0)
            for mat in network.matrices:
                sub = mat.submatrix(subset)
                diag = sum(
                    (sub.desired(i) for i in range(1, size + 1)), Fraction(0)
                )
                weight, _ = best_partition_assignment(sub)
                total += diag - weight
            bounds[subset] = total
    return CombinedSumBounds(users=k, bounds=bounds)


# ---------------------------------------------------------------------------
# decomposability across sub-channels
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class UserCap:
    """With every other user pinned to its target total, user ``user`` can
    reach at most ``cap`` -- strictly below its own ``target``."""

    user: int
    cap: Fraction
    target: Fraction

    def __str__(self):
        return ("user %d cannot exceed %s < %s once the other users hit "
                "their targets" % (self.user, self.cap, self.target))


@dataclass(frozen=True)
class DecompositionResult:
    feasible: bool
    target: tuple
    allocation: "tuple | None"   # per sub-channel: tuple of per-user shares
    caps: tuple                  # UserCap certificates when infeasible

    def __bool__(self):
        return self.feasible


def _parallel_cycle_lp(network: Network, objective, fixed: dict):
    """Maximize ``objective`` over per-sub-channel rate splits obeying every
    cycle bound, with selected users' totals fixed.  Variables are d_k^[m],
    indexed sub-channel-major; constraints are generated lazily the same way
    solve_cycle_lp does it."""
    k = network.users
    m = network.subchannels
    scan = _cycle_scan_data(k)
    cycles_rhs = [
        [cycle_bound_rhs(cyc, mat) for cyc in enumerate_cycles(k)]
        for mat in network.matrices
    ]
    nvars = k * m

    def var(user, chan):  # 1-based user, 0-based channel
        return chan * k + (user - 1)

    working = [list(range(k)) for _ in range(m)]
    in_working = [set(w) for w in working]

    while True:
        constraints = []
        for chan in range(m):
            for c in working[chan]:
                members, _ = scan[c]
                coeffs = [Fraction(0)] * nvars
                for u in members:
                    coeffs[var(u + 1, chan)] = Fraction(1)
                constraints.append((coeffs, "<=", cycles_rhs[chan][c]))
        for user, tgt in sorted(fixed.items()):
            coeffs = [Fraction(0)] * nvars
            for chan in range(m):
                coeffs[var(user, chan)] = Fraction(1)
            constraints.append((coeffs, "==", tgt))
        sol = solve_lp(LinearProgram.build(objective, constraints, nonneg=True))
        if sol.status == "infeasible":
            return sol
        if sol.status != "optimal":
            raise CrossCheckError("parallel cycle LP cannot be unbounded")
        added = False
        for chan in range(m):
            violated = []
            for c, (members, _) in enumerate(scan):
                if c in in_working[chan]:
                    continue
                lhs = sum(
                    (sol.point[var(u + 1, chan)] for u in members), Fraction(0)
                )
                gap = lhs - cycles_rhs[chan][c]
                if gap > 0:
                    violated.append((gap, c))
            violated.sort(key=lambda t: (-t[0], t[1]))
            for _, c in violated[:k]:
                working[chan].append(c)
                in_working[chan].add(c)
                added = True
        if not added:
            return sol


def separate_tin_decomposable(network: Network, point) -> DecompositionResult:
    """Can the rate point be split into per-sub-channel points that each obey
    their own sub-channel's cycle bounds?

    Settled exactly by LP.  When the split is impossible the result carries
    every per-user cap certificate: fix all other users at their targets and
    maximize the remaining user's total; infeasibility forces that maximum
    below the user's own target for at least one user.
    """
    k = network.users
    target = tuple(as_rational(x) for x in point)
    if len(target) != k:
        raise InputError("point has %d coordinates, expected %d" % (len(target), k))
    nvars = k * network.subchannels
    zeros = [Fraction(0)] * nvars

    fixed = {user: target[user - 1] for user in range(1, k + 1)}
    sol = _parallel_cycle_lp(network, zeros, fixed)
    if sol.status == "optimal":
        allocation = tuple(
            tuple(sol.point[chan * k + u] for u in range(k))
            for chan in range(network.subchannels)
        )
        return DecompositionResult(
            feasible=True, target=target, allocation=allocation, caps=()
        )

    caps = []
    for user in range(1, k + 1):
        objective = list(zeros)
        for chan in range(network.subchannels):
            objective[chan * k + (user - 1)] = Fraction(1)
        others = {u: t for u, t in fixed.items() if u != user}
        cap_sol = _parallel_cycle_lp(network, objective, others)
        if cap_sol.status != "optimal":
            continue
        if cap_sol.value >= target[user - 1]:
            raise CrossCheckError(
                "user %d can reach %s >= target %s although the joint split "
                "is infeasible" % (user, cap_sol.value, target[user - 1])
            )
        caps.append(UserCap(user=user, cap=cap_sol.value,
                            target=target[user - 1]))
    return DecompositionResult(
        feasible=False, target=target, allocation=None, caps=tuple(caps)
    )
