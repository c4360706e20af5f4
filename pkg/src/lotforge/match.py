"""Practice-gate matching: does a candidate scene replicate a target?

Matching is a one-to-one assignment between target and candidate
instances of the same entry id, greedy nearest-neighbor processed in
ascending target instance id order. Practice scenes are small, so greedy
is adequate and fully deterministic; an optimal-assignment upgrade would
be contract-compatible.

A match passes only when nothing is missing, nothing extra was placed
(strict multiset equality of entry ids), and every matched pair sits
within the position/rotation/scale tolerances.
"""

from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass

from .scene import Scene


@dataclass(frozen=True)
class MatchTolerances:
    pos_eps: float = 1.0      # meters
    rot_eps: float = 20.0     # degrees
    scale_eps: float = 0.25

    def __post_init__(self):
        for name in ("pos_eps", "rot_eps", "scale_eps"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be strictly positive")


DEFAULT_TOLERANCES = MatchTolerances()


@dataclass(frozen=True)
class PairDeviation:
    target_id: str
    candidate_id: str
    pos_delta: float
    rot_delta: float
    scale_delta: float

    def within(self, tol: MatchTolerances) -> bool:
        return (
            self.pos_delta <= tol.pos_eps
            and self.rot_delta <= tol.rot_eps
            and self.scale_delta <= tol.scale_eps
        )


@dataclass(frozen=True)
class MatchReport:
    passed: bool
    matched_pairs: tuple[tuple[str, str], ...]
    missing: tuple[str, ...]
    extras: tuple[str, ...]
    per_pair_deviations: tuple[PairDeviation, ...]

    def as_dict(self) -> dict:
        return {
            "passed": self.passed,
            "matched_pairs": [list(p) for p in self.matched_pairs],
            "missing": list(self.missing),
            "extras": list(self.extras),
            "per_pair_deviations": [
                {
                    "target_id": d.target_id,
                    "candidate_id": d.candidate_id,
                    "pos_delta": round(d.pos_delta, 6),
                    "rot_delta": round(d.rot_delta, 6),
                    "scale_delta": round(d.scale_delta, 6),
                }
                for d in self.per_pair_deviations
            ],
        }


def _angle_delta(a: float, b: float) -> float:
    d = abs(a - b) % 360.0
    return min(d, 360.0 - d)


def match_replication(
    candidate: Scene, target: Scene, tol: MatchTolerances = DEFAULT_TOLERANCES
) -> MatchReport:
    cand_by_entry: dict[str, list] = defaultdict(list)
    for inst in sorted(candidate.instances, key=lambda i: i.instance_id):
        cand_by_entry[inst.entry_id].append(inst)

    pairs: list[tuple[str, str]] = []
    deviations: list[PairDeviation] = []
    missing: list[str] = []
    used: set[str] = set()

    for t_inst in sorted(target.instances, key=lambda i: i.instance_id):
        pool = [c for c in cand_by_entry.get(t_inst.entry_id, []) if c.instance_id not in used]
        if not pool:
            missing.append(t_inst.instance_id)
            continue
        tp = t_inst.pose.position
        best = min(
            pool,
            key=lambda c: (
                math.hypot(c.pose.position.x - tp.x, c.pose.position.y - tp.y),
                c.instance_id,
            ),
        )
        used.add(best.instance_id)
        pairs.append((t_inst.instance_id, best.instance_id))
        deviations.append(PairDeviation(
            target_id=t_inst.instance_id,
            candidate_id=best.instance_id,
            pos_delta=math.hypot(best.pose.position.x - tp.x, best.pose.position.y - tp.y),
            rot_delta=_angle_delta(best.pose.rotation_deg, t_inst.pose.rotation_deg),
            scale_delta=abs(best.pose.scale - t_inst.pose.scale),
        ))

    extras = tuple(
        inst.instance_id
        for inst in sorted(candidate.instances, key=lambda i: i.instance_id)
        if inst.instance_id not in used
    )

    passed = not missing and not extras and all(d.within(tol) for d in deviations)
    return MatchReport(
        passed=passed,
        matched_pairs=tuple(pairs),
        missing=tuple(missing),
        extras=extras,
        per_pair_deviations=tuple(deviations),
    )
