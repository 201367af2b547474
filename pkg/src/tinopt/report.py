"""JSON-ready views of analysis results.

Every value rendered here is an int, string, bool, list, or dict -- never a
float -- so a report dumped with :func:`dumps_canonical` survives a
parse/re-dump round trip byte for byte.
"""

from __future__ import annotations

import json
from fractions import Fraction

from .model import rational_str

__all__ = [
    "dumps_canonical",
    "frac",
    "point_repr",
    "partition_repr",
    "tin_repr",
    "sum_repr",
    "network_sum_repr",
    "constraint_repr",
    "membership_repr",
    "combined_repr",
    "decomposition_repr",
    "certificate_repr",
    "invertibility_repr",
    "sufficient_repr",
    "scheme_repr",
    "separability_repr",
]


def dumps_canonical(obj) -> str:
    """The one true serialization: two-space indent, insertion order, one
    trailing newline."""
    return json.dumps(obj, indent=2) + "\n"


def frac(value):
    return rational_str(Fraction(value))


def point_repr(point) -> list:
    return [frac(x) for x in point]


def partition_repr(partition) -> dict:
    return {
        "cycles": [list(cyc.users) for cyc in partition.cycles],
        "predecessors": list(partition.predecessors()),  # 0 marks trivial cycles
    }


def tin_repr(verdict) -> dict:
    return {
        "satisfied": verdict.satisfied,
        "strict": verdict.strict,
        "violations": [
            {
                "user": v.user,
                "max_incoming": frac(v.max_incoming),
                "max_outgoing": frac(v.max_outgoing),
                "desired": frac(v.desired),
            }
            for v in verdict.violations
        ],
    }


def sum_repr(result) -> dict:
    methods = {}
    for name, val in result.methods.items():
        methods[name] = val if isinstance(val, str) else frac(val)
    return {
        "value": frac(result.value),
        "label": result.label,
        "methods": methods,
        "agreement": result.agreement,
        "tin": tin_repr(result.tin),
        "optimal_partition": partition_repr(result.partition),
    }


def network_sum_repr(nsum) -> dict:
    return {
        "per_subchannel": [sum_repr(r) for r in nsum.per_channel],
        "total": frac(nsum.total),
        "label": nsum.label,
    }


def constraint_repr(con) -> dict:
    out = {"users": list(con.users), "rhs": frac(con.rhs)}
    if con.cycle is not None:
        out["cycle"] = list(con.cycle.users)
    return out


def membership_repr(result) -> dict:
    return {
        "inside": result.inside,
        "negative_users": list(result.negative_users),
        "violated": [constraint_repr(c) for c in result.violated],
    }


def combined_repr(bounds) -> dict:
    items = sorted(bounds.bounds.items(), key=lambda kv: (len(kv[0]), kv[0]))
    return {
        "users": bounds.users,
        "bounds": [
            {"users": list(subset), "rhs": frac(rhs)} for subset, rhs in items
        ],
    }


def decomposition_repr(result) -> dict:
    out = {
        "feasible": result.feasible,
        "target": point_repr(result.target),
    }
    if result.feasible:
        out["allocation"] = [point_repr(chan) for chan in result.allocation]
    else:
        out["caps"] = [
            {"user": c.user, "cap": frac(c.cap), "target": frac(c.target)}
            for c in result.caps
        ]
    return out


def certificate_repr(cert) -> dict:
    out = {
        "partition": partition_repr(cert.partition),
        "participating_bits": cert.num_bits,
        "rank": cert.rank,
        "invertible": cert.invertible,
        "method": cert.method,
    }
    if cert.kernel is not None:
        out["kernel"] = [{"user": u, "bit": b} for u, b in cert.kernel]
    return out


def invertibility_repr(verdict) -> dict:
    return {
        "invertible": verdict.invertible,
        "method": verdict.method,
        "certificates": [certificate_repr(c) for c in verdict.certificates],
    }


def sufficient_repr(verdict) -> dict:
    out = {
        "status": verdict.status,
        "method": verdict.method,
        "reasons": list(verdict.reasons),
    }
    if verdict.witness is not None:
        out["witness_partition"] = partition_repr(verdict.witness)
    return out


def scheme_repr(scheme) -> dict:
    out = {"found": scheme.found, "sum_rate": scheme.sum_rate}
    if scheme.found:
        out["rates"] = list(scheme.rates)
        out["powers"] = list(scheme.powers)
    return out


def separability_repr(verdict) -> dict:
    legs = []
    for leg in verdict.legs:
        entry = {"subchannel": leg.channel, "status": leg.status,
                 "method": leg.method}
        if leg.detail is not None:
            if hasattr(leg.detail, "certificates"):
                entry["detail"] = invertibility_repr(leg.detail)
            elif hasattr(leg.detail, "reasons"):
                entry["detail"] = sufficient_repr(leg.detail)
        legs.append(entry)
    return {
        "certified": verdict.certified,
        "total": frac(verdict.total),
        "total_label": verdict.sums.label,
        "per_subchannel": [sum_repr(r) for r in verdict.sums.per_channel],
        "invertibility": legs,
        "reasons": list(verdict.reasons),
        "justification": verdict.justification,
    }
