"""Exact optimization back-ends and the cross-checked sum computation.

Three mutually independent routes compute the best (tightest) sum bound of a
sub-channel, which for TIN-optimal sub-channels equals the sum-GDoF
(sum-capacity in deterministic mode):

* ``solve_cycle_lp``   -- the LP maximizing the rate sum under *all* cycle
                          bounds, solved exactly by a cutting-plane loop
                          around a rational two-phase simplex;
* ``best_partition_assignment`` -- the heaviest cyclic partition found as a
                          min-cost assignment (Hungarian method) over
                          predecessor permutations;
* ``brute_force_best_weight``   -- exhaustive scan of all K! predecessor
                          permutations with integer-scaled arithmetic.

``sum_gdof`` runs all three and refuses to return values on which they
disagree.  All arithmetic is over fractions.Fraction; no floats anywhere.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from math import lcm

from .cycles import (
    Cycle,
    CyclicPartition,
    _check_enum_guard,
    _cycle_scan_data,
    enumerate_cycles,
)
from .model import CrossCheckError, InputError, StrengthMatrix, check_tin

__all__ = [
    "LinearProgram",
    "LpSolution",
    "solve_lp",
    "CycleLpResult",
    "solve_cycle_lp",
    "RedundancyResult",
    "nonnegativity_redundancy_check",
    "min_cost_assignment",
    "best_partition_assignment",
    "brute_force_best_weight",
    "all_optimal_partitions",
    "optimal_partition",
    "SumGdofResult",
    "sum_gdof",
    "NetworkSum",
    "network_sum",
]


# ---------------------------------------------------------------------------
# general-purpose exact linear programming (two-phase simplex, Bland's rule)
# ---------------------------------------------------------------------------

_RELS = ("<=", ">=", "==")


@dataclass(frozen=True)
class LinearProgram:
    """maximize objective . x subject to linear constraints.

    ``constraints`` is a sequence of (coefficients, relation, rhs) triples
    with relation one of "<=", ">=", "==".  ``nonneg`` is either a single
    bool applying to every variable or a per-variable sequence; False means
    the variable is free (unrestricted in sign).
    """

    objective: tuple
    constraints: tuple
    nonneg: tuple

    @classmethod
    def build(cls, objective, constraints, nonneg=True) -> "LinearProgram":
        obj = tuple(Fraction(c) for c in objective)
        n = len(obj)
        rows = []
        for coeffs, rel, rhs in constraints:
            coeffs = tuple(Fraction(c) for c in coeffs)
            if len(coeffs) != n:
                raise InputError(
                    "constraint has %d coefficients, expected %d" % (len(coeffs), n)
                )
            if rel == "=":
                rel = "=="
            if rel not in _RELS:
                raise InputError("unknown relation %r" % (rel,))
            rows.append((coeffs, rel, Fraction(rhs)))
        if isinstance(nonneg, bool):
            signs = tuple(nonneg for _ in range(n))
        else:
            signs = tuple(bool(s) for s in nonneg)
            if len(signs) != n:
                raise InputError("nonneg flags must match variable count")
        return cls(objective=obj, constraints=tuple(rows), nonneg=signs)


@dataclass(frozen=True)
class LpSolution:
    status: str                # "optimal" | "infeasible" | "unbounded"
    value: "Fraction | None"
    point: "tuple | None"


def _pivot(tableau, basis, obj, row, col):
    piv = tableau[row][col]
    inv = 1 / piv
    tableau[row] = [val * inv for val in tableau[row]]
    prow = tableau[row]
    for i, other in enumerate(tableau):
        if i == row:
            continue
        factor = other[col]
        if factor != 0:
            tableau[i] = [a - factor * b for a, b in zip(other, prow)]
    factor = obj[col]
    if factor != 0:
        for j, b in enumerate(prow):
            obj[j] -= factor * b
    basis[row] = col


def _run_simplex(tableau, basis, cost):
    """Iterate Bland-rule pivots to optimality; returns (status, obj_row).

    ``obj_row[j]`` holds the reduced cost of column j and ``obj_row[-1]``
    holds minus the current objective value.
    """
    ncols = len(cost)
    obj = list(cost) + [Fraction(0)]
    for i, row in enumerate(tableau):
        cb = cost[basis[i]]
        if cb != 0:
            for j, b in enumerate(row):
                obj[j] -= cb * b
    while True:
        enter = -1
        for j in range(ncols):
            if obj[j] > 0:
                enter = j
                break
        if enter < 0:
            return "optimal", obj
        leave = -1
        best = None
        for i, row in enumerate(tableau):
            a = row[enter]
            if a > 0:
                ratio = row[-1] / a
                if (leave < 0 or ratio < best
                        or (ratio == best and basis[i] < basis[leave])):
                    leave = i
                    best = ratio
        if leave < 0:
            return "unbounded", obj
        _pivot(tableau, basis, obj, leave, enter)


def solve_lp(lp: LinearProgram) -> LpSolution:
    """Solve exactly.  Frees are split x = x+ - x-; two-phase handles >= and ==."""
    if not isinstance(lp, LinearProgram):
        lp = LinearProgram.build(*lp)
    n = len(lp.objective)

    # structural columns: (variable, sign); free variables get both signs
    struct = []
    for j in range(n):
        struct.append((j, 1))
        if not lp.nonneg[j]:
            struct.append((j, -1))
    nstruct = len(struct)

    rows = []          # (coeff list over struct cols, rel, rhs) with rhs >= 0
    for coeffs, rel, rhs in lp.constraints:
        if rhs < 0:
            coeffs = tuple(-c for c in coeffs)
            rhs = -rhs
            rel = {"<=": ">=", ">=": "<=", "==": "=="}[rel]
        rows.append(([coeffs[j] * s for j, s in struct], rel, rhs))

    m = len(rows)
    nslack = sum(1 for _, rel, _ in rows if rel != "==")
    nart = sum(1 for _, rel, _ in rows if rel != "<=")
    ncols = nstruct + nslack + nart

    tableau = []
    basis = []
    art_cols = []
    slack_at = nstruct
    art_at = nstruct + nslack
    for coeffs, rel, rhs in rows:
        row = list(coeffs) + [Fraction(0)] * (nslack + nart) + [rhs]
        if rel == "<=":
            row[slack_at] = Fraction(1)
            basis.append(slack_at)
            slack_at += 1
        elif rel == ">=":
            row[slack_at] = Fraction(-1)
            slack_at += 1
            row[art_at] = Fraction(1)
            basis.append(art_at)
            art_cols.append(art_at)
            art_at += 1
        else:  # ==
            row[art_at] = Fraction(1)
            basis.append(art_at)
            art_cols.append(art_at)
            art_at += 1
        tableau.append(row)

    if art_cols:
        cost1 = [Fraction(0)] * ncols
        for c in art_cols:
            cost1[c] = Fraction(-1)
        status, obj = _run_simplex(tableau, basis, cost1)
        if status != "optimal":
            raise CrossCheckError("phase-1 simplex cannot be unbounded")
        if -obj[-1] != 0:
            return LpSolution(status="infeasible", value=None, point=None)
        art_set = set(art_cols)
        # drive leftover artificials out of the basis (degenerate rows)
        drop_rows = []
        for i in range(m):
            if basis[i] in art_set:
                pivot_col = next(
                    (j for j in range(ncols)
                     if j not in art_set and tableau[i][j] != 0),
                    None,
                )
                if pivot_col is None:
                    drop_rows.append(i)
                else:
                    _pivot(tableau, basis, obj, i, pivot_col)
        for i in sorted(drop_rows, reverse=True):
            del tableau[i]
            del basis[i]
        keep = [j for j in range(ncols) if j not in art_set]
        remap = {old: new for new, old in enumerate(keep)}
        tableau = [[row[j] for j in keep] + [row[-1]] for row in tableau]
        basis = [remap[b] for b in basis]
        ncols = len(keep)

    cost2 = [Fraction(0)] * ncols
    for c, (j, s) in enumerate(struct):
        cost2[c] = lp.objective[j] * s
    status, obj = _run_simplex(tableau, basis, cost2)
    if status == "unbounded":
        return LpSolution(status="unbounded", value=None, point=None)

    colval = [Fraction(0)] * ncols
    for i, b in enumerate(basis):
        colval[b] = tableau[i][-1]
    point = [Fraction(0)] * n
    for c, (j, s) in enumerate(struct):
        point[j] += colval[c] * s
    return LpSolution(status="optimal", value=-obj[-1], point=tuple(point))


# ---------------------------------------------------------------------------
# cycle-bound LP via cutting planes
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CycleLpResult:
    status: str                  # "optimal" | "infeasible"
    value: "Fraction | None"
    point: "tuple | None"
    working_cycles: tuple        # cycles in the final working set

    @property
    def optimal(self) -> bool:
        return self.status == "optimal"


def _scaled_entries(matrix: StrengthMatrix):
    """Integer-scaled copy of the matrix: (scale D, D*entries as ints)."""
    denom = lcm(*(val.denominator for row in matrix.entries for val in row))
    scaled = [
        [int(val * denom) for val in row] for row in matrix.entries
    ]
    return denom, scaled


def solve_cycle_lp(matrix: StrengthMatrix, nonneg: bool = True,
                   batch: "int | None" = None) -> CycleLpResult:
    """Maximize the rate sum subject to every cycle bound of the sub-channel.

    Works with a growing subset of the cycle constraints: solve the
    restricted LP, scan *all* cycles for violated bounds with pure integer
    arithmetic, add the worst offenders, repeat.  The returned point is
    feasible for every cycle bound and optimal for a relaxation, hence
    optimal for the full LP.  The working set is seeded with the K trivial
    cycles only, so this route stays independent of the assignment and
    brute-force routes.
    """
    k = matrix.users
    cycles = enumerate_cycles(k)
    scan = _cycle_scan_data(k)
    dscale, ent = _scaled_entries(matrix)
    diag = [ent[i][i] for i in range(k)]

    rhs_scaled = []
    for members, edges in scan:
        r = sum(diag[u] for u in members)
        for i, j in edges:
            r -= ent[i][j]
        rhs_scaled.append(r)

    if batch is None:
        batch = max(3, k)
    objective = [Fraction(1)] * k
    working = list(range(k))     # enumeration lists the K trivial cycles first
    in_working = set(working)

    while True:
        constraints = []
        for c in working:
            members, _ = scan[c]
            coeffs = [Fraction(0)] * k
            for u in members:
                coeffs[u] = Fraction(1)
            constraints.append((coeffs, "<=", Fraction(rhs_scaled[c], dscale)))
        sol = solve_lp(LinearProgram.build(objective, constraints, nonneg=nonneg))
        if sol.status == "infeasible":
            return CycleLpResult(
                status="infeasible", value=None, point=None,
                working_cycles=tuple(cycles[c] for c in working),
            )
        if sol.status != "optimal":
            raise CrossCheckError(
                "restricted cycle LP cannot be unbounded (trivial cycles seed it)"
            )

        escale = lcm(*(p.denominator for p in sol.point))
        pscaled = [int(p * escale) for p in sol.point]
        violated = []
        for c, (members, _) in enumerate(scan):
            if c in in_working:
                continue
            lhs = 0
            for u in members:
                lhs += pscaled[u]
            gap = dscale * lhs - escale * rhs_scaled[c]
            if gap > 0:
                violated.append((gap, c))
        if not violated:
            return CycleLpResult(
                status="optimal", value=sol.value, point=sol.point,
                working_cycles=tuple(cycles[c] for c in working),
            )
        violated.sort(key=lambda t: (-t[0], t[1]))
        for _, c in violated[:batch]:
            working.append(c)
            in_working.add(c)


@dataclass(frozen=True)
class RedundancyResult:
    """Whether dropping the nonnegativity constraints changes the LP optimum."""

    with_nonneg: "Fraction | None"
    without_nonneg: "Fraction | None"
    redundant: bool

    def __bool__(self):
        return self.redundant


def nonnegativity_redundancy_check(matrix: StrengthMatrix) -> RedundancyResult:
    """Solve the cycle LP with and without d >= 0 and compare optima exactly."""
    bounded = solve_cycle_lp(matrix, nonneg=True)
    free = solve_cycle_lp(matrix, nonneg=False)
    redundant = (
        bounded.status == "optimal"
        and free.status == "optimal"
        and bounded.value == free.value
    )
    return RedundancyResult(
        with_nonneg=bounded.value if bounded.optimal else None,
        without_nonneg=free.value if free.optimal else None,
        redundant=redundant,
    )


# ---------------------------------------------------------------------------
# assignment route (Hungarian method, exact)
# ---------------------------------------------------------------------------

def min_cost_assignment(cost) -> tuple:
    """Minimum-cost perfect assignment on a square cost matrix of Fractions.

    Returns (total_cost, assign) with assign[j] = row matched to column j
    (0-based).  Standard O(n^3) potentials implementation.
    """
    n = len(cost)
    if n == 0:
        return Fraction(0), ()
    for row in cost:
        if len(row) != n:
            raise InputError("cost matrix must be square")
    inf = Fraction(1) + sum((abs(Fraction(v)) for row in cost for v in row),
                            Fraction(0))
    u = [Fraction(0)] * (n + 1)
    v = [Fraction(0)] * (n + 1)
    p = [0] * (n + 1)          # p[j] = row matched to column j (1-based)
    way = [0] * (n + 1)
    for i in range(1, n + 1):
        p[0] = i
        j0 = 0
        minv = [inf] * (n + 1)
        used = [False] * (n + 1)
        while True:
            used[j0] = True
            i0 = p[j0]
            delta = inf
            j1 = 0
            for j in range(1, n + 1):
                if used[j]:
                    continue
                cur = Fraction(cost[i0 - 1][j - 1]) - u[i0] - v[j]
                if cur < minv[j]:
                    minv[j] = cur
                    way[j] = j0
                if minv[j] < delta:
                    delta = minv[j]
                    j1 = j
            for j in range(n + 1):
                if used[j]:
                    u[p[j]] += delta
                    v[j] -= delta
                else:
                    minv[j] -= delta
            j0 = j1
            if p[j0] == 0:
                break
        while j0 != 0:
            j1 = way[j0]
            p[j0] = p[j1]
            j0 = j1
    assign = tuple(p[j] - 1 for j in range(1, n + 1))
    total = sum((Fraction(cost[assign[j]][j]) for j in range(n)), Fraction(0))
    return total, assign


def best_partition_assignment(matrix: StrengthMatrix):
    """Heaviest cyclic partition via min-cost assignment.

    Returns (max_weight, perm) where perm[k-1] is user k's predecessor in
    some maximizing partition (perm[k-1] == k marks a trivial cycle).
    """
    k = matrix.users
    cost = [
        [-matrix.edge_weight(r + 1, c + 1) for c in range(k)]
        for r in range(k)
    ]
    total, assign = min_cost_assignment(cost)
    perm = tuple(assign[j] + 1 for j in range(k))
    return -total, perm


# ---------------------------------------------------------------------------
# brute-force route (exhaustive permutations, integer-scaled)
# ---------------------------------------------------------------------------

def brute_force_best_weight(matrix: StrengthMatrix):
    """Heaviest cyclic partition by scanning all K! predecessor permutations."""
    k = matrix.users
    _check_enum_guard(k)
    dscale, ent = _scaled_entries(matrix)
    w = [[ent[i][j] if i != j else 0 for j in range(k)] for i in range(k)]
    best = None
    best_perm = None
    for perm in itertools.permutations(range(k)):
        s = 0
        for col in range(k):
            s += w[perm[col]][col]
        if best is None or s > best:
            best = s
            best_perm = perm
    return Fraction(best, dscale), tuple(p + 1 for p in best_perm)


def all_optimal_partitions(matrix: StrengthMatrix) -> tuple:
    """Every cyclic partition tied (exactly) for the maximum weight."""
    k = matrix.users
    _check_enum_guard(k)
    dscale, ent = _scaled_entries(matrix)
    w = [[ent[i][j] if i != j else 0 for j in range(k)] for i in range(k)]
    weights = []
    best = None
    for perm in itertools.permutations(range(k)):
        s = 0
        for col in range(k):
            s += w[perm[col]][col]
        weights.append((perm, s))
        if best is None or s > best:
            best = s
    ties = sorted(
        tuple(p + 1 for p in perm) for perm, s in weights if s == best
    )
    return tuple(CyclicPartition.from_permutation(perm) for perm in ties)


def optimal_partition(matrix: StrengthMatrix) -> CyclicPartition:
    """The maximizing partition with lexicographically smallest predecessor
    vector (trivial cycles sorting first), found by iterative fixing with
    assignment subcalls -- no exhaustive enumeration needed."""
    k = matrix.users
    max_weight, _ = best_partition_assignment(matrix)

    def completion_weight(fixed):
        used_values = set(fixed.values())
        free_users = [c for c in range(1, k + 1) if c not in fixed]
        free_values = [r for r in range(1, k + 1) if r not in used_values]
        part = sum(
            (matrix.edge_weight(p, user) for user, p in fixed.items()),
            Fraction(0),
        )
        if not free_users:
            return part
        cost = [
            [-matrix.edge_weight(r, c) for c in free_users]
            for r in free_values
        ]
        total, _ = min_cost_assignment(cost)
        return part - total

    fixed = {}
    for user in range(1, k + 1):
        # candidate predecessors in serialized order: trivial first, then 1, 2, ...
        candidates = [user] + [p for p in range(1, k + 1) if p != user]
        for p in candidates:
            if p in fixed.values():
                continue
            fixed[user] = p
            if completion_weight(fixed) == max_weight:
                break
            del fixed[user]
        else:
            raise CrossCheckError("no extendable predecessor for user %d" % user)
    perm = tuple(fixed[user] for user in range(1, k + 1))
    return CyclicPartition.from_permutation(perm)


# ---------------------------------------------------------------------------
# the cross-checked sum computation
# ---------------------------------------------------------------------------

BOUND_ONLY_LABEL = "bound-only: TIN condition fails"


@dataclass(frozen=True)
class SumGdofResult:
    """Best sum bound of one sub-channel, certified by three solvers.

    ``value`` is the sum-GDoF (gdof mode) or sum-capacity (deterministic
    mode) when the sub-channel is TIN optimal; otherwise it is only the best
    cyclic partition bound and ``label`` says so.
    """

    tin: object
    value: Fraction
    label: str
    methods: dict = field(compare=False)
    partition: CyclicPartition = None
    agreement: bool = True

    @property
    def exact(self) -> bool:
        return self.label == "exact"


def sum_gdof(matrix: StrengthMatrix) -> SumGdofResult:
    """Compute the best sum bound three independent ways and cross-check.

    For TIN-optimal sub-channels all three routes must agree exactly and
    the common value is the sum-GDoF / sum-capacity.  Otherwise the LP may
    be infeasible or strictly smaller; only assignment and brute force are
    required to agree, and the result is labeled a bound.
    """
    tin = check_tin(matrix)
    diag_sum = sum(
        (matrix.desired(i) for i in range(1, matrix.users + 1)), Fraction(0)
    )

    lp = solve_cycle_lp(matrix, nonneg=True)
    aw, _ = best_partition_assignment(matrix)
    bw, _ = brute_force_best_weight(matrix)
    assignment_value = diag_sum - aw
    brute_value = diag_sum - bw

    if assignment_value != brute_value:
        raise CrossCheckError(
            "assignment (%s) and brute force (%s) disagree"
            % (assignment_value, brute_value)
        )
    methods = {
        "lp_cycle_bounds": lp.value if lp.optimal else lp.status,
        "assignment": assignment_value,
        "brute_force": brute_value,
    }
    if tin.satisfied:
        if not lp.optimal or lp.value != assignment_value:
            raise CrossCheckError(
                "cycle LP (%s) disagrees with partition bound (%s) on a "
                "TIN-optimal sub-channel"
                % (lp.value if lp.optimal else lp.status, assignment_value)
            )
        label = "exact"
        agreement = True
    else:
        # weak duality still requires LP <= best partition bound
        if lp.optimal and lp.value > assignment_value:
            raise CrossCheckError(
                "cycle LP value %s exceeds the best partition bound %s"
                % (lp.value, assignment_value)
            )
        label = BOUND_ONLY_LABEL
        agreement = lp.optimal and lp.value == assignment_value
    return SumGdofResult(
        tin=tin,
        value=assignment_value,
        label=label,
        methods=methods,
        partition=optimal_partition(matrix),
        agreement=agreement,
    )


@dataclass(frozen=True)
class NetworkSum:
    per_channel: tuple
    total: Fraction
    label: str

    @property
    def exact(self) -> bool:
        return self.label == "exact"


def network_sum(network) -> NetworkSum:
    """Per-sub-channel sums and their total.

    The total is exact (it is the separated network's sum) only when every
    sub-channel is TIN optimal; the label carries the caveat otherwise.
    """
    per = tuple(sum_gdof(mat) for mat in network.matrices)
    total = sum((r.value for r in per), Fraction(0))
    label = "exact" if all(r.exact for r in per) else BOUND_ONLY_LABEL
    return NetworkSum(per_channel=per, total=total, label=label)
