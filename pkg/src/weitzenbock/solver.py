"""Iterative closure B_0 = Q[x0] -> B_1 -> ... until tau adds nothing new."""

from __future__ import annotations

import json
import logging
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Sequence

from .derivation import apply, order, weitzenboeck
from .poly import Poly, format_poly, normalize_primitive, parse_poly, weight
from .subalgebra import (
    Evaluator,
    GeneratorInfo,
    RoundStats,
    Signature,
    SliceTracker,
    SubalgebraBasis,
    acceptable_set,
    is_member,
    signature,
)

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class SolverConfig:
    n: int
    max_rounds: int = 10
    degree_cap: int | None = None
    minimize: bool = True
    threads: int = 1

    def __post_init__(self):
        if self.n < 0:
            raise ValueError("n must be non-negative")
        if self.max_rounds < 1:
            raise ValueError("max_rounds must be at least 1")


@dataclass
class KernelResult:
    n: int
    generators: list[GeneratorInfo]
    rounds_used: int
    closed: bool
    history: list[RoundStats] = field(default_factory=list)

    def by_name(self, name: str) -> GeneratorInfo:
        for g in self.generators:
            if g.name == name:
                return g
        raise KeyError(name)

    def signatures(self) -> list[Signature]:
        return [g.sig for g in self.generators]


def initial_basis(n: int) -> SubalgebraBasis:
    t = Poly.var(0, n)
    return SubalgebraBasis((), (GeneratorInfo(t, signature(t, n), "x0", 0, "t"),))


def compute_kernel(config: SolverConfig) -> KernelResult:
    n = config.n
    basis = initial_basis(n)
    tracker = SliceTracker(n)
    history: list[RoundStats] = []
    closed = False
    rounds = 0
    pool = ProcessPoolExecutor(config.threads) if config.threads > 1 else None
    try:
        for round_no in range(1, config.max_rounds + 1):
            rounds = round_no
            stats = RoundStats()
            start = time.perf_counter()
            new = acceptable_set(
                basis, n, round_no=round_no, tracker=tracker, degree_cap=config.degree_cap, stats=stats, pool=pool
            )
            history.append(stats)
            log.info(
                "n=%d round %d: %d candidates, %d in full slices, %d evaluated, %d new (%.1fs)",
                n, round_no, stats.candidates, stats.saturated, stats.evaluated, len(new), time.perf_counter() - start,
            )
            if stats.notes:
                for note in stats.notes:
                    log.warning("n=%d round %d: %s", n, round_no, note)
            basis = basis.advance(new)
            if not new:
                closed = not stats.notes
                break
    finally:
        if pool is not None:
            pool.shutdown()
    result = KernelResult(n, list(basis.generators), rounds, closed, history)
    if config.minimize and closed:
        result = minimize(result)
    return result


def minimize(result: KernelResult) -> KernelResult:
    """Drop generators lying in the subalgebra of the others, highest degree first."""
    keep = list(result.generators)
    order_ = sorted(keep, key=lambda g: (-g.sig.deg, g.key))
    evaluator = Evaluator(result.n, modulus=None, seed=3)
    for g in order_:
        others = [h for h in keep if h is not g]
        if others and is_member(g.poly, others, result.n, z_signature=g.sig, evaluator=evaluator, check=False):
            log.info("minimize: %s is redundant", g.name)
            keep.remove(g)
    return replace(result, generators=keep)


# -- verification ---------------------------------------------------------------


@dataclass
class CheckEntry:
    name: str
    check: str
    ok: bool
    detail: str = ""


@dataclass
class VerificationReport:
    n: int
    entries: list[CheckEntry]

    @property
    def ok(self) -> bool:
        return all(e.ok for e in self.entries)

    def failures(self) -> list[CheckEntry]:
        return [e for e in self.entries if not e.ok]

    def text(self) -> str:
        lines = [f"n={self.n}: {'PASS' if self.ok else 'FAIL'}"]
        for e in self.entries:
            lines.append(f"  {'ok  ' if e.ok else 'FAIL'} {e.name:<10} {e.check:<22} {e.detail}")
        return "\n".join(lines)


def verify_result(result: KernelResult, oracle_degree: int | None = None) -> VerificationReport:
    n = result.n
    d = weitzenboeck(n)
    entries: list[CheckEntry] = []
    for g in result.generators:
        p = g.poly
        killed = bool(p) and not apply(d, p)
        entries.append(CheckEntry(g.name, "d-annihilation", killed))
        if not killed:
            continue
        try:
            sig = signature(p, n)
        except ValueError as exc:
            entries.append(CheckEntry(g.name, "signature", False, str(exc)))
            continue
        entries.append(CheckEntry(g.name, "signature", sig == g.sig, f"stored {g.sig} computed {sig}"))
        w = weight(p)
        s = order(p)
        entries.append(CheckEntry(g.name, "order == weight", s == w, f"ord={s} weight={w}"))
        entries.append(CheckEntry(g.name, "normalized", normalize_primitive(p) == p, f"{len(p)} terms"))
    if oracle_degree is not None:
        from .oracle import cross_check

        report = cross_check(result.generators, n, oracle_degree)
        for row in report.rows:
            if not row.ok:
                entries.append(
                    CheckEntry("*", f"slice ({row.deg},{row.weight})", False,
                               f"kernel dim {row.oracle_dim}, generated dim {row.subalgebra_dim}")
                )
        entries.append(CheckEntry("*", f"oracle deg<={oracle_degree}", report.ok, f"{len(report.rows)} slices"))
    return VerificationReport(n, entries)


# -- files ------------------------------------------------------------------------


def result_to_json(result: KernelResult) -> str:
    doc = {
        "n": result.n,
        "rounds": result.rounds_used,
        "closed": result.closed,
        "generators": [
            {
                "name": g.name,
                "provenance": g.provenance,
                "round": g.round,
                "signature": list(g.sig),
                "polynomial": format_poly(g.poly),
                "term_count": len(g.poly),
            }
            for g in result.generators
        ],
    }
    return json.dumps(doc, indent=2) + "\n"


def result_from_json(text: str) -> KernelResult:
    doc = json.loads(text)
    n = int(doc["n"])
    gens = [
        GeneratorInfo(
            parse_poly(item["polynomial"], n),
            Signature(*item["signature"]),
            item.get("provenance", ""),
            int(item.get("round", 0)),
            item["name"],
        )
        for item in doc["generators"]
    ]
    return KernelResult(n, gens, int(doc.get("rounds", 0)), bool(doc.get("closed", True)))


def result_table(result: KernelResult) -> str:
    rows = [f"# n={result.n}  generators={len(result.generators)}  rounds={result.rounds_used}  closed={result.closed}"]
    rows.append(f"{'name':<10} {'signature':<16} {'terms':>6}  provenance")
    for g in result.generators:
        rows.append(f"{g.name:<10} {str(g.sig):<16} {len(g.poly):>6}  {g.provenance}")
    return "\n".join(rows) + "\n"


def write_result(result: KernelResult, path: str | os.PathLike) -> tuple[Path, Path]:
    path = Path(path)
    path.write_text(result_to_json(result))
    table = path.with_suffix(".txt")
    table.write_text(result_table(result))
    return path, table


def read_result(path: str | os.PathLike) -> KernelResult:
    return result_from_json(Path(path).read_text())


def generators_from_polys(polys: Sequence[Poly], n: int) -> list[GeneratorInfo]:
    out = []
    for j, p in enumerate(polys):
        p = normalize_primitive(p)
        out.append(GeneratorInfo(p, signature(p, n), "given", 0, f"g{j}"))
    return out
