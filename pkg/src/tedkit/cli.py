"""Command-line front end: ``compute``, ``verify``, ``bench`` and ``dump``.

Exit codes: 1 for a forest syntax error, 2 for a cost-file error, 3 when
``verify`` finds a mismatch.  ``TEDKIT_THREADS`` caps the worker count of
``verify``.
"""

from __future__ import annotations

import json
import os
import random
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Callable

import click
import numpy as np

from .alignment_graph import build, to_dot
from .bbd import BBDConfig
from .costs import CostFileError, CostModel, load_cost_file, sim_to_ed
from .forest_core import Forest, ForestSyntaxError, parse_forest
from .generate import random_costs, random_forest, random_tree
from .minplus import INSTR
from .oracle import all_pairs_sim, ted_reference
from .ted import all_subtrees_ted, ted, ted_sim

EXIT_PARSE = 1
EXIT_COSTS = 2
EXIT_MISMATCH = 3
DUMP_LIMIT = 40
"""Largest grid side (``n + 1``) that ``dump`` will write."""


def _threads() -> int:
    try:
        return max(1, int(os.environ.get("TEDKIT_THREADS", "1")))
    except ValueError:
        return 1


def _read_forest(path: str) -> Forest:
    try:
        return parse_forest(Path(path).read_text())
    except ForestSyntaxError as exc:
        click.echo(f"{path}: {exc}", err=True)
        sys.exit(EXIT_PARSE)
    except OSError as exc:
        click.echo(f"{path}: {exc}", err=True)
        sys.exit(EXIT_PARSE)


def _read_costs(path: str | None) -> CostModel:
    if path is None:
        return CostModel.unweighted()
    try:
        return load_cost_file(path)
    except CostFileError as exc:
        click.echo(f"{path}: {exc}", err=True)
        sys.exit(EXIT_COSTS)


def _config(kernel: str, alpha: int, base_limit: int) -> BBDConfig:
    return BBDConfig(alpha=alpha, base_limit=base_limit, kernel=kernel)


kernel_opt = click.option("--kernel", type=click.Choice(["naive", "monotone"]), default="naive", show_default=True)
alpha_opt = click.option("--alpha", type=int, default=2, show_default=True, help="BBD split factor.")
base_opt = click.option("--base-limit", type=int, default=64, show_default=True, help="BBD grid-DP cutoff.")


@click.group()
def main() -> None:
    """Tree edit distance between ordered labelled forests."""


@main.command()
@click.argument("a", type=click.Path())
@click.argument("b", type=click.Path())
@click.option("--costs", type=click.Path(), default=None, help="Cost file (DEL/INS/SUB/DEFAULT lines).")
@kernel_opt
@alpha_opt
@base_opt
@click.option("--json", "as_json", is_flag=True, help="Emit one JSON object.")
def compute(a: str, b: str, costs: str | None, kernel: str, alpha: int, base_limit: int, as_json: bool) -> None:
    """Edit distance and similarity of the forests in files A and B."""
    F, G = _read_forest(a), _read_forest(b)
    m = _read_costs(costs)
    s = ted_sim(F, G, m, _config(kernel, alpha, base_limit))
    ed = sim_to_ed(m, F, G, s)
    if as_json:
        click.echo(json.dumps({"ed": ed, "sim": s, "n": F.n, "n_prime": G.n}))
    else:
        click.echo(f"ed={ed} sim={s} n={F.n} n'={G.n}")


# -- verify ------------------------------------------------------------------


def _drop(F: Forest, v: int) -> Forest:
    """``F`` with node ``v`` deleted; its children move up to its parent."""
    return F.induced([u for u in range(1, F.n + 1) if u != v])


def shrink(F: Forest, G: Forest, fails: Callable[[Forest, Forest], bool]) -> tuple[Forest, Forest]:
    """Greedy node removal while ``fails`` stays true."""
    changed = True
    while changed:
        changed = False
        for side in (0, 1):
            X = F if side == 0 else G
            for v in range(X.n, 0, -1):
                Y = _drop(X, v)
                cand = (Y, G) if side == 0 else (F, Y)
                if fails(*cand):
                    F, G = cand
                    changed = True
                    break
            if changed:
                break
    return F, G


def verify_instances(seed: int, count: int, max_n: int, weighted: bool) -> list[tuple[Forest, Forest, CostModel]]:
    """The instances ``verify`` checks, drawn from one seeded generator."""
    rng = random.Random(seed)
    out = []
    for _ in range(count):
        F = random_forest(rng.randint(0, max_n), rng)
        G = random_forest(rng.randint(0, max_n), rng)
        m = random_costs(rng) if weighted else CostModel.unweighted()
        out.append((F, G, m))
    return out


@main.command()
@click.option("--seed", type=int, default=1, show_default=True)
@click.option("--count", type=int, default=50, show_default=True)
@click.option("--max-n", type=int, default=24, show_default=True)
@click.option("--weighted", is_flag=True, help="Random integer costs instead of unit costs.")
@kernel_opt
@alpha_opt
@base_opt
def verify(seed: int, count: int, max_n: int, weighted: bool, kernel: str, alpha: int, base_limit: int) -> None:
    """Compare the pipeline with the reference DP on random instances."""
    cases = verify_instances(seed, count, max_n, weighted)
    cfg = _config(kernel, alpha, base_limit)

    def check(case):
        F, G, m = case
        return ted(F, G, m, cfg), ted_reference(F, G, m)

    with ThreadPoolExecutor(max_workers=_threads()) as pool:
        results = list(pool.map(check, cases))
    bad = 0
    for i, ((F, G, m), (got, want)) in enumerate(zip(cases, results)):
        if got == want:
            continue
        bad += 1
        sF, sG = shrink(F, G, lambda X, Y: ted(X, Y, m, cfg) != ted_reference(X, Y, m))
        click.echo(f"mismatch #{i}: pipeline {got} reference {want}")
        click.echo(f"  reproducer: {sF.to_text()!r} {sG.to_text()!r} -> "
                   f"{ted(sF, sG, m, cfg)} vs {ted_reference(sF, sG, m)}")
    click.echo(f"verified {count - bad}/{count} instances (seed={seed}, max_n={max_n}, "
               f"{'weighted' if weighted else 'unweighted'})")
    if bad:
        sys.exit(EXIT_MISMATCH)


# -- bench -------------------------------------------------------------------


def loglog_slope(xs: list[float], ys: list[float]) -> float:
    """Least-squares slope of ``log y`` against ``log x``."""
    lx = np.log(np.asarray(xs, dtype=float))
    ly = np.log(np.asarray(ys, dtype=float))
    return float(np.polyfit(lx, ly, 1)[0])


def measure_pipeline(n: int, seed: int, cfg: BBDConfig) -> dict[str, float]:
    rng = random.Random(seed * 1_000_003 + n)
    F, G = random_tree(n, rng), random_tree(n, rng)
    INSTR.reset()
    t = time.perf_counter()
    ted(F, G, CostModel.unweighted(), cfg)
    rep = dict(INSTR.report())
    rep["seconds"] = time.perf_counter() - t
    return rep


def measure_oracle(n: int, seed: int) -> dict[str, float]:
    rng = random.Random(seed * 1_000_003 + n)
    F, G = random_tree(n, rng), random_tree(n, rng)
    INSTR.reset()
    t = time.perf_counter()
    all_pairs_sim(F, G, CostModel.unweighted())
    rep = dict(INSTR.report())
    rep["seconds"] = time.perf_counter() - t
    return rep


def _sizes(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise click.BadParameter(str(exc)) from exc


@main.command()
@click.option("--sizes", default="64,128,256", show_default=True, help="Comma-separated n = n' values.")
@click.option("--oracle-sizes", default="", help="Also time the reference DP at these sizes.")
@click.option("--seed", type=int, default=1, show_default=True)
@kernel_opt
@alpha_opt
@base_opt
def bench(sizes: str, oracle_sizes: str, seed: int, kernel: str, alpha: int, base_limit: int) -> None:
    """Work counters and wall time per size, with log-log slopes."""
    cfg = _config(kernel, alpha, base_limit)
    for name, ns, fn in (("pipeline", _sizes(sizes), lambda n: measure_pipeline(n, seed, cfg)),
                         ("oracle", _sizes(oracle_sizes), lambda n: measure_oracle(n, seed))):
        if not ns:
            continue
        click.echo(f"{name}: {'n':>6} {'calls':>8} {'madds':>14} {'dp_cells':>14} {'work':>14} {'seconds':>9}")
        works = []
        for n in ns:
            r = fn(n)
            works.append(max(1, r["work"]))
            click.echo(f"{name}: {n:>6} {r['kernel_calls']:>8} {r['multiply_adds']:>14} {r['dp_cells']:>14} "
                       f"{r['work']:>14} {r['seconds']:>9.3f}")
        if len(ns) > 1:
            click.echo(f"{name}: log-log slope of work = {loglog_slope(ns, works):.3f}")


# -- dump --------------------------------------------------------------------


@main.command()
@click.argument("a", type=click.Path())
@click.argument("b", type=click.Path())
@click.option("--out", type=click.Path(), required=True)
@click.option("--costs", type=click.Path(), default=None)
def dump(a: str, b: str, out: str, costs: str | None) -> None:
    """Write the alignment graph of A and B, weighted by subtree similarities, as DOT."""
    F, G = _read_forest(a), _read_forest(b)
    m = _read_costs(costs)
    if F.n + 1 > DUMP_LIMIT or G.n + 1 > DUMP_LIMIT:
        raise click.UsageError(f"grid of {F.n + 1} x {G.n + 1} exceeds the {DUMP_LIMIT} x {DUMP_LIMIT} limit")
    if F.n and G.n:
        W = all_subtrees_ted(F, G, m).table
    else:
        W = np.zeros((F.n + 1, G.n + 1), dtype=np.int64)
    Path(out).write_text(to_dot(build(W, F, G)))
    click.echo(f"wrote {out}: {(F.n + 1) * (G.n + 1)} grid nodes")


if __name__ == "__main__":  # pragma: no cover
    main()
