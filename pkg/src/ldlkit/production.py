"""Form synthesis: positional cue support, overlap-constrained path
enumeration, and reranking of candidates by mapping them back into
semantic space.

A word is a path through overlapping n-grams from a boundary-initial
gram to a boundary-final one.  A per-position linear model scores how
well each inventory cue is supported at each position; paths are
assembled depth-first from the top-k supported cues per position, with
an optional tolerance budget for weakly supported cues, and the
surviving candidates are ranked by how well their own projected meaning
correlates with the target meaning.

Positional support models are estimated in closed form only; there is
no token-by-token training path for them.
"""

from __future__ import annotations

import csv
import os
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .cues import CueConfig, CueInventory, extract_grams
from .comprehension import pearson_matrix
from .mappings import Mapping, solve_endstate


class ProductionError(ValueError):
    pass


def merge_grams(grams: Sequence[str], cfg: Optional[CueConfig] = None) -> str:
    """Merge overlap-compatible grams into a surface string.

    Adjacent grams must overlap in all but one unit; the merge keeps the
    first gram and appends each following gram's final unit, then strips
    the boundary markers.
    """
    if not grams:
        raise ProductionError("no grams to merge")
    cfg = cfg or CueConfig(unit="letter", n=max(len(g) for g in grams))
    tokens = cfg.tokens(grams[0])
    for g in grams[1:]:
        gt = cfg.tokens(g)
        if len(gt) < 2:
            raise ProductionError("cannot merge length-1 grams")
        if tokens[-(len(gt) - 1) :] != gt[:-1]:
            raise ProductionError(f"grams do not overlap: {tokens} + {gt}")
        tokens.append(gt[-1])
    inner = [t for t in tokens if t != cfg.boundary]
    return cfg.joiner.join(inner)


@dataclass
class PositionalSupportModel:
    """One linear mapping per word position onto per-cue support scores.

    weights has shape (max_len, input_dim, n_cues); position p's matrix
    maps the configured input space (predicted cue vector or semantic
    vector) to a support score for every inventory cue at position p.
    """

    weights: np.ndarray
    inventory: CueInventory
    cfg: CueConfig
    input_space: str = "predicted_cues"  # predicted_cues | semantics

    @property
    def max_len(self) -> int:
        return self.weights.shape[0]

    def supports(self, x: np.ndarray) -> np.ndarray:
        """(max_len, n_cues) support scores for one input vector."""
        return np.einsum("i,pij->pj", np.asarray(x, dtype=np.float64), self.weights)


def positional_targets(
    forms: Sequence[str], inv: CueInventory, cfg: CueConfig, max_len: int
) -> np.ndarray:
    """Binary (n_items, max_len, n_cues) tensor: which gram fills which slot.

    Grams outside the inventory leave their slot empty (novel grams have
    no support to learn).
    """
    T = np.zeros((len(forms), max_len, len(inv)), dtype=np.float64)
    for i, s in enumerate(forms):
        grams = extract_grams(s, cfg)
        if len(grams) > max_len:
            raise ProductionError(
                f"form {s!r} has {len(grams)} grams, exceeding max_len={max_len}"
            )
        for p, g in enumerate(grams):
            j = inv.index.get(g)
            if j is not None:
                T[i, p, j] = 1.0
    return T


def train_positional(
    inputs: np.ndarray,
    targets: np.ndarray,
    inv: CueInventory,
    cfg: CueConfig,
    input_space: str = "predicted_cues",
) -> PositionalSupportModel:
    """Least-squares positional support model.

    One end-state solve per position over a shared input matrix; the
    input factorization is computed once and reused, which matches the
    per-position minimum-norm solutions.
    """
    if targets.shape[0] == 0:
        raise ProductionError("empty training set")
    if inputs.shape[0] != targets.shape[0]:
        raise ProductionError("inputs and targets must have one row per item")
    max_len = targets.shape[1]
    pinv = np.linalg.pinv(np.asarray(inputs, dtype=np.float64))
    weights = np.empty((max_len, inputs.shape[1], targets.shape[2]))
    for p in range(max_len):
        weights[p] = pinv @ targets[:, p, :]
    return PositionalSupportModel(weights=weights, inventory=inv, cfg=cfg, input_space=input_space)


@dataclass
class CandidatePath:
    """A complete overlap-valid gram path and its synthesis score."""

    grams: tuple[str, ...]
    surface: str
    tolerated_count: int = 0
    projected_semantics: Optional[np.ndarray] = None
    score: float = float("nan")

    def cue_vector(self, inv: CueInventory) -> np.ndarray:
        c = np.zeros(len(inv))
        for g in self.grams:
            c[inv.index[g]] = 1.0
        return c


def _position_candidates(
    support: np.ndarray, k: int, theta: float, tolerance: bool
) -> list[tuple[int, bool]]:
    """Top-k cues at one position: (cue index, is_weak) pairs.

    Cues at or above theta are free; below-theta cues appear only in
    tolerance mode and draw on the path's tolerated budget.  Order is by
    descending support, ties by cue index, so expansion is deterministic.
    """
    k = min(k, support.size)
    top = np.argpartition(-support, k - 1)[:k] if k < support.size else np.arange(support.size)
    order = top[np.lexsort((top, -support[top]))]
    out = []
    for j in order:
        if support[j] >= theta:
            out.append((int(j), False))
        elif tolerance:
            out.append((int(j), True))
    return out


def enumerate_paths(
    m: PositionalSupportModel,
    x: np.ndarray,
    k: int = 10,
    theta: float = 0.008,
    tolerance: bool = False,
    max_tolerated: int = 2,
    max_paths: Optional[int] = None,
) -> list[CandidatePath]:
    """All overlap-valid boundary-to-boundary paths over supported cues.

    Depth-first expansion over the per-position top-k candidate cues;
    a path may use at most max_tolerated sub-threshold cues when
    tolerance is on.  Results are deduplicated by surface string.  An
    empty list is a legitimate outcome (nothing sufficiently supported).
    max_paths optionally truncates the search as a runaway guard; the
    default explores everything.
    """
    if k < 1:
        raise ProductionError(f"k must be >= 1, got {k}")
    if theta < 0:
        raise ProductionError(f"theta must be >= 0, got {theta}")
    supports = m.supports(x)
    per_pos = [
        _position_candidates(supports[p], k, theta, tolerance) for p in range(m.max_len)
    ]

    cfg = m.cfg
    boundary = cfg.boundary
    grams = m.inventory.cues
    tok = {g: cfg.tokens(g) for g in grams}
    n = cfg.n

    # Index each position's candidates by their (n-1)-unit prefix so the
    # DFS only touches overlap-compatible continuations.
    by_prefix: list[dict[tuple, list[tuple[int, bool]]]] = []
    for cands in per_pos:
        d: dict[tuple, list[tuple[int, bool]]] = {}
        for j, weak in cands:
            d.setdefault(tuple(tok[grams[j]][: n - 1]), []).append((j, weak))
        by_prefix.append(d)

    results: dict[str, CandidatePath] = {}
    budget = max_tolerated if tolerance else 0

    def emit(path: list[int], tolerated: int) -> None:
        gram_seq = tuple(grams[j] for j in path)
        surface = merge_grams(gram_seq, cfg)
        if surface not in results:
            results[surface] = CandidatePath(
                grams=gram_seq, surface=surface, tolerated_count=tolerated
            )

    def dfs(path: list[int], tolerated: int) -> bool:
        if max_paths is not None and len(results) >= max_paths:
            return False
        last = tok[grams[path[-1]]]
        if last[-1] == boundary:
            emit(path, tolerated)
            return True
        depth = len(path)
        if depth >= m.max_len:
            return True
        suffix = tuple(last[-(n - 1):]) if n > 1 else None
        nexts = by_prefix[depth].get(suffix, []) if n > 1 else per_pos[depth]
        for j, weak in nexts:
            t = tolerated + int(weak)
            if t > budget:
                continue
            path.append(j)
            ok = dfs(path, t)
            path.pop()
            if not ok:
                return False
        return True

    for j, weak in per_pos[0]:
        if tok[grams[j]][0] != boundary:
            continue
        t = int(weak)
        if t > budget:
            continue
        if not dfs([j], t):
            break
    return list(results.values())


def synthesize_by_analysis(
    candidates: Sequence[CandidatePath],
    F: Mapping,
    s_target: np.ndarray,
    inv: CueInventory,
) -> list[CandidatePath]:
    """Rank candidates by the fit of their own projected meanings.

    Each candidate's binary cue vector is mapped through the
    comprehension matrix; the Pearson correlation of that projection
    with the target meaning is the candidate's score.  Sorting is by
    descending score with the surface string as deterministic
    tie-break; degenerate projections rank last.
    """
    if not candidates:
        return []
    C = np.vstack([c.cue_vector(inv) for c in candidates])
    S_hat = C @ F.W
    r = pearson_matrix(S_hat, np.asarray(s_target, dtype=np.float64)[None, :])[:, 0]
    scored = [
        CandidatePath(
            grams=c.grams,
            surface=c.surface,
            tolerated_count=c.tolerated_count,
            projected_semantics=S_hat[i],
            score=float(r[i]),
        )
        for i, c in enumerate(candidates)
    ]
    scored.sort(key=lambda c: (-(c.score if not np.isnan(c.score) else -2.0), c.surface))
    return scored


@dataclass(frozen=True)
class ProductionParams:
    k: int = 10
    theta: float = 0.008
    tolerance: bool = False
    max_tolerated: int = 2
    input_space: str = "predicted_cues"  # which vector drives the path search
    top_n: int = 5
    max_paths: Optional[int] = None


@dataclass
class ProductionResult:
    best: Optional[CandidatePath]
    top_n: list[CandidatePath]
    n_candidates: int


def produce(
    s_target: np.ndarray,
    G: Mapping,
    m: PositionalSupportModel,
    F: Mapping,
    params: ProductionParams = ProductionParams(),
) -> ProductionResult:
    """Synthesize the best-supported form for a target meaning.

    The target meaning is mapped to a predicted cue vector through the
    production matrix; paths are enumerated from the positional support
    of either that vector or the raw meaning, and reranked by synthesis
    score.  An empty candidate set is a production failure.
    """
    s_target = np.asarray(s_target, dtype=np.float64)
    c_hat = s_target @ G.W
    x = c_hat if params.input_space == "predicted_cues" else s_target
    candidates = enumerate_paths(
        m, x, k=params.k, theta=params.theta,
        tolerance=params.tolerance, max_tolerated=params.max_tolerated,
        max_paths=params.max_paths,
    )
    ranked = synthesize_by_analysis(candidates, F, s_target, m.inventory)
    return ProductionResult(
        best=ranked[0] if ranked else None,
        top_n=ranked[: params.top_n],
        n_candidates=len(ranked),
    )


def save_production_report(
    rows: Sequence[tuple[str, ProductionResult]], path: str | os.PathLike
) -> None:
    """Per-item CSV: target, best candidate, match flag, ranked top-n."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["target", "best", "match", "rank", "candidate", "score", "tolerated"])
        for target, res in rows:
            best = res.best.surface if res.best else ""
            match = int(res.best is not None and res.best.surface == target)
            if not res.top_n:
                w.writerow([target, best, match, "", "", "", ""])
            for rank, cand in enumerate(res.top_n, start=1):
                w.writerow(
                    [target, best, match, rank, cand.surface,
                     repr(cand.score), cand.tolerated_count]
                )
