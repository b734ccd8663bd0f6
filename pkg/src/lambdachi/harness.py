"""Seeded verification campaigns and their JSONL records.

Every integer in a record is written as a decimal string; exact
rationals are written as ``"num/den"``.  Records are emitted in
(p, n, trial_index) order whatever the worker count, and carry no timing
unless asked, so identical configs give byte-identical output.
"""

from __future__ import annotations

import hashlib
import json
import random
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Any, Iterable, Iterator

from .exact_linalg import IntMatrix
from .cohomology import DEFAULT_K_CAP, dual_euler_char, tate_orders
from .invariants import RankSequence, iterated_filtration_multiplicities, rank_sequence, rep_multiplicities
from .modules import BlockSpec, CyclicPGroup, FiniteSpec, FreePart, GModule, build_module, phi
from .towers import IdentityReport, TowerInvariants, analyze_tower, identity_family, verify_all


@dataclass(frozen=True)
class CampaignConfig:
    seed: int = 0
    primes: tuple[int, ...] = (2, 3, 5)
    exponents: tuple[int, ...] = (1, 2, 3)
    max_multiplicity: int | None = None
    max_rank: int = 20
    conjugator_bound: int = 3
    trials: int = 500
    include_finite_blocks: bool = False
    output_path: str | None = None
    k_cap: int = DEFAULT_K_CAP
    dual_check: bool = False
    timing: bool = False

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("trials must be at least 1")
        if self.max_rank < 1:
            raise ValueError("max_rank must be at least 1")
        if self.conjugator_bound < 1:
            raise ValueError("conjugator_bound must be positive")
        if self.max_multiplicity is not None and self.max_multiplicity < 0:
            raise ValueError("max_multiplicity must be nonnegative")
        for p in self.primes:
            CyclicPGroup(p, 0)
        if any(n < 0 for n in self.exponents):
            raise ValueError("exponents must be nonnegative")


def trial_seed(seed: int, p: int, n: int, trial_index: int) -> int:
    """First 8 bytes (big-endian) of sha256("lambdachi:{seed}:{p}:{n}:{trial_index}")."""
    digest = hashlib.sha256(f"lambdachi:{seed}:{p}:{n}:{trial_index}".encode()).digest()
    return int.from_bytes(digest[:8], "big")


@lru_cache(maxsize=64)
def multiplicity_vectors(p: int, n: int, max_rank: int, max_multiplicity: int | None) -> tuple[tuple[int, ...], ...]:
    """All (r_0..r_n) with sum r_t·phi(p^t) <= max_rank and each r_t <= max_multiplicity."""
    weights = [phi(p, t) for t in range(n + 1)]
    cap = max_rank if max_multiplicity is None else max_multiplicity
    out: list[tuple[int, ...]] = []

    def rec(t: int, budget: int, prefix: tuple[int, ...]) -> None:
        if t < 0:
            out.append(prefix)
            return
        for r in range(min(cap, budget // weights[t]) + 1):
            rec(t - 1, budget - r * weights[t], (r,) + prefix)

    rec(n, max_rank, ())
    return tuple(sorted(out))


def sample_spec(seed: int, p: int, n: int, max_rank: int, max_multiplicity: int | None = None,
                conjugator_bound: int = 3, include_finite_blocks: bool = False) -> BlockSpec:
    """Uniform multiplicity vector under the rank cap, random conjugator and finite blocks."""
    rng = random.Random(seed)
    mults = rng.choice(multiplicity_vectors(p, n, max_rank, max_multiplicity))
    finite: list[FiniteSpec] = []
    if include_finite_blocks:
        for _ in range(rng.randint(1, 2)):
            finite.append(FiniteSpec(rng.randint(1, 3), rng.randint(1, 3), rng.randrange(2 ** 32)))
    return BlockSpec(CyclicPGroup(p, n), mults, tuple(finite), rng.randrange(2 ** 32), conjugator_bound)


# -- record serialisation -------------------------------------------------

def encode_value(v: Any) -> Any:
    if isinstance(v, bool):
        return v
    if isinstance(v, int):
        return str(v)
    if isinstance(v, Fraction):
        return f"{v.numerator}/{v.denominator}"
    if isinstance(v, (list, tuple)):
        return [encode_value(x) for x in v]
    raise TypeError(f"cannot encode {v!r}")


def decode_value(v: Any) -> Any:
    if isinstance(v, bool):
        return v
    if isinstance(v, str):
        if "/" in v:
            num, den = v.split("/")
            return Fraction(int(num), int(den))
        return int(v)
    if isinstance(v, list):
        return [decode_value(x) for x in v]
    raise TypeError(f"cannot decode {v!r}")


def _ints(xs: Iterable[int]) -> list[str]:
    return [str(x) for x in xs]


def tower_to_json(t: TowerInvariants) -> dict[str, Any]:
    return {"p": str(t.p), "n": str(t.n), "lambdas": _ints(t.lambdas), "chi_quotient": _ints(t.chi_quotient),
            "chi_subgroup": _ints(t.chi_subgroup), "chi_layer": _ints(t.chi_layer)}


def tower_from_json(d: dict[str, Any]) -> TowerInvariants:
    return TowerInvariants(int(d["p"]), int(d["n"]), *(tuple(int(x) for x in d[k]) for k in (
        "lambdas", "chi_quotient", "chi_subgroup", "chi_layer")))


def report_to_json(r: IdentityReport) -> dict[str, Any]:
    return {"name": r.name, "lhs": encode_value(r.lhs), "rhs": encode_value(r.rhs),
            "applicable": r.applicable, "passed": r.passed}


def report_from_json(d: dict[str, Any]) -> IdentityReport:
    return IdentityReport(d["name"], decode_value(d["lhs"]), decode_value(d["rhs"]), d["applicable"])


@dataclass
class TrialRecord:
    trial_index: int
    spec: BlockSpec
    trial_seed: int | None = None
    tower: TowerInvariants | None = None
    rank_sequence: RankSequence | None = None
    identities: list[IdentityReport] = field(default_factory=list)
    error: str | None = None
    wall_time: float | None = None

    @property
    def passed(self) -> bool:
        return self.error is None and all(r.passed for r in self.identities)

    def to_json(self) -> dict[str, Any]:
        doc: dict[str, Any] = {
            "record_type": "trial",
            "trial_index": str(self.trial_index),
            "trial_seed": None if self.trial_seed is None else str(self.trial_seed),
            "spec": self.spec.to_json(),
            "tower": None if self.tower is None else tower_to_json(self.tower),
            "rank_sequence": None if self.rank_sequence is None else _ints(self.rank_sequence.r),
            "identities": [report_to_json(r) for r in self.identities],
            "passed": self.passed,
            "error": self.error,
        }
        if self.wall_time is not None:
            doc["wall_time"] = repr(self.wall_time)
        return doc

    @classmethod
    def from_json(cls, doc: dict[str, Any]) -> TrialRecord:
        return cls(
            trial_index=int(doc["trial_index"]),
            spec=BlockSpec.from_json(doc["spec"]),
            trial_seed=None if doc.get("trial_seed") is None else int(doc["trial_seed"]),
            tower=None if doc.get("tower") is None else tower_from_json(doc["tower"]),
            rank_sequence=None if doc.get("rank_sequence") is None else RankSequence(
                tuple(int(x) for x in doc["rank_sequence"])),
            identities=[report_from_json(r) for r in doc.get("identities", [])],
            error=doc.get("error"),
            wall_time=float(doc["wall_time"]) if "wall_time" in doc else None,
        )


def dumps(doc: dict[str, Any]) -> str:
    return json.dumps(doc, sort_keys=True, separators=(",", ":"))


# -- analysis ---------------------------------------------------------------

def finite_only(m: GModule) -> GModule:
    return GModule(m.group, FreePart(IntMatrix.zeros(0, 0)), m.finite_blocks)


def analyze_spec(spec: BlockSpec, *, dual_check: bool = True, k_cap: int = DEFAULT_K_CAP,
                 trial_index: int = 0, seed: int | None = None, timing: bool = False) -> TrialRecord:
    """Full analysis of one module; failures land in the record, never raise."""
    start = time.perf_counter()
    record = TrialRecord(trial_index, spec, seed)
    try:
        free_spec = spec.free_only()
        m = build_module(free_spec)
        t = analyze_tower(m)
        rs = rank_sequence(m)
        record.tower, record.rank_sequence = t, rs
        reps = verify_all(t, rs)
        target = list(spec.multiplicities)
        reps.append(IdentityReport("rank_sequence_vs_spec", list(rs.r), target))
        reps.append(IdentityReport("rep_multiplicities_vs_spec", list(rep_multiplicities(m).r), target))
        reps.append(IdentityReport("filtration_vs_spec", list(iterated_filtration_multiplicities(m).r), target))
        if dual_check:
            duals = [dual_euler_char(m, i, k_cap) for i in range(spec.group.n)]
            reps.append(IdentityReport("dual_sign", duals, list(t.chi_subgroup)))
        if spec.finite_specs:
            full = build_module(spec)
            fin = finite_only(full)
            idx = range(spec.group.n + 1)
            fin_chis = [tate_orders(fin, i).chi for i in idx]
            reps.append(IdentityReport("finite_vanishing", fin_chis, [0] * len(fin_chis)))
            reps.append(IdentityReport("chi_additivity", [tate_orders(full, i).chi for i in idx],
                                       [tate_orders(m, i).chi + c for i, c in zip(idx, fin_chis)]))
        record.identities = reps
    except Exception as exc:  # noqa: BLE001 - recorded, campaign continues
        record.error = f"{type(exc).__name__}: {exc}"
    if timing:
        record.wall_time = time.perf_counter() - start
    return record


def _trial_task(args: tuple[CampaignConfig, int, int, int]) -> TrialRecord:
    config, p, n, index = args
    s = trial_seed(config.seed, p, n, index)
    spec = sample_spec(s, p, n, config.max_rank, config.max_multiplicity, config.conjugator_bound,
                       config.include_finite_blocks)
    return analyze_spec(spec, dual_check=config.dual_check, k_cap=config.k_cap, trial_index=index, seed=s,
                        timing=config.timing)


def campaign_tasks(config: CampaignConfig) -> list[tuple[CampaignConfig, int, int, int]]:
    return [(config, p, n, i) for p in config.primes for n in config.exponents for i in range(config.trials)]


def iter_campaign(config: CampaignConfig, jobs: int = 1) -> Iterator[TrialRecord]:
    tasks = campaign_tasks(config)
    if jobs <= 1:
        for task in tasks:
            yield _trial_task(task)
        return
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        # map() yields in submission order
        yield from pool.map(_trial_task, tasks, chunksize=8)


@dataclass
class CampaignSummary:
    trials: int = 0
    errors: int = 0
    failed_trials: int = 0
    identity_counts: dict[str, dict[str, int]] = field(default_factory=dict)

    def add(self, record: TrialRecord) -> None:
        self.trials += 1
        if record.error is not None:
            self.errors += 1
        if not record.passed:
            self.failed_trials += 1
        for r in record.identities:
            c = self.identity_counts.setdefault(identity_family(r), {"passed": 0, "failed": 0, "not_applicable": 0})
            if not r.applicable:
                c["not_applicable"] += 1
            elif r.passed:
                c["passed"] += 1
            else:
                c["failed"] += 1

    @property
    def all_passed(self) -> bool:
        return self.failed_trials == 0

    def to_json(self) -> dict[str, Any]:
        return {
            "record_type": "summary",
            "trials": str(self.trials),
            "errors": str(self.errors),
            "failed_trials": str(self.failed_trials),
            "identities": {k: {kk: str(vv) for kk, vv in v.items()} for k, v in sorted(self.identity_counts.items())},
            "all_passed": self.all_passed,
        }


def run_campaign(config: CampaignConfig, jobs: int = 1, stream=None) -> CampaignSummary:
    """Run every trial, writing one JSON line each and a closing summary line."""
    summary = CampaignSummary()
    for record in iter_campaign(config, jobs):
        summary.add(record)
        if stream is not None:
            stream.write(dumps(record.to_json()) + "\n")
    if stream is not None:
        stream.write(dumps(summary.to_json()) + "\n")
    return summary
