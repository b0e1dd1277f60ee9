"""Pasting contexts: recognition, Dyck words, peaks, pruning, boundary
variable sets, and operation sets."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from . import flat as F
from .flat import STAR, Arrow, FlatCtx, FlatSub, FlatTerm, FlatType, Star, Var, VarSet

UP = "U"
DOWN = "D"


@dataclass(frozen=True)
class DyckWord:
    """Up/down move sequence; every prefix has at least as many ups as downs."""

    moves: tuple[str, ...]

    def __post_init__(self):
        depth = 0
        for m in self.moves:
            depth += 1 if m == UP else -1
            if depth < 0:
                raise F.MalformedSyntax("negative prefix in Dyck word")

    @property
    def trailing_dim(self) -> int:
        return sum(1 if m == UP else -1 for m in self.moves)

    def __repr__(self) -> str:
        return "Dyck(" + "".join(self.moves) + ")"


@dataclass(frozen=True)
class Peak:
    """Index of an up-move immediately followed by a down-move."""

    pos: int


class OperationSet(Enum):
    REGULAR = "regular"
    GROUPOIDAL = "groupoidal"


# ---------------------------------------------------------------------------
# ps-context recognition


def check_ps_detail(g: FlatCtx) -> tuple[bool, int | None]:
    """Decide the ps-context judgement; on failure return the offending
    entry position."""
    n = len(g)
    if n == 0 or n % 2 == 0 or g.entries[0] != STAR:
        return False, 0
    t: FlatTerm = Var(0)
    a: FlatType = STAR
    i = 1
    while i < n:
        b = g.entries[i]
        c = g.entries[i + 1]
        while F.dim_ty(a) > F.dim_ty(b):
            t = a.tgt
            a = a.base
        if a != b:
            return False, i
        expected = Arrow(F.weaken(t), F.weaken(a), Var(0))
        if c != expected:
            return False, i + 1
        t = Var(0)
        a = F.weaken(expected)
        i += 2
    return True, None


def check_ps(g: FlatCtx) -> bool:
    return check_ps_detail(g)[0]


# ---------------------------------------------------------------------------
# realisation


def dyck_realise(d: DyckWord) -> tuple[FlatCtx, FlatType, FlatTerm]:
    """The context, type and term associated to a Dyck word."""
    entries: list[FlatType] = [STAR]
    ty: FlatType = STAR
    tm: FlatTerm = Var(0)
    for m in d.moves:
        if m == UP:
            entries.append(ty)
            f_ty = Arrow(F.weaken(tm), F.weaken(ty), Var(0))
            entries.append(f_ty)
            tm = Var(0)
            ty = F.weaken(f_ty)
        else:
            if not isinstance(ty, Arrow):
                raise F.MalformedSyntax("down move at dimension 0")
            tm = ty.tgt
            ty = ty.base
    return FlatCtx(tuple(entries)), ty, tm


def ctx_to_dyck(g: FlatCtx) -> DyckWord | None:
    """Invert realisation: the unique Dyck word whose context is g, or None
    if g is not a ps-context."""
    n = len(g)
    if n == 0 or n % 2 == 0 or g.entries[0] != STAR:
        return None
    moves: list[str] = []
    t: FlatTerm = Var(0)
    a: FlatType = STAR
    i = 1
    while i < n:
        b = g.entries[i]
        while F.dim_ty(a) > F.dim_ty(b):
            if not isinstance(a, Arrow):
                return None
            t, a = a.tgt, a.base
            moves.append(DOWN)
        if a != b:
            return None
        expected = Arrow(F.weaken(t), F.weaken(a), Var(0))
        if g.entries[i + 1] != expected:
            return None
        moves.append(UP)
        t = Var(0)
        a = F.weaken(expected)
        i += 2
    while isinstance(a, Arrow):
        t, a = a.tgt, a.base
        moves.append(DOWN)
    return DyckWord(tuple(moves))


def disc_word(n: int) -> DyckWord:
    return DyckWord((UP,) * n + (DOWN,) * n)


# ---------------------------------------------------------------------------
# peaks and pruning


def peaks(d: DyckWord) -> list[Peak]:
    return [
        Peak(i)
        for i in range(len(d.moves) - 1)
        if d.moves[i] == UP and d.moves[i + 1] == DOWN
    ]


def _peak_entry_pos(d: DyckWord, p: Peak) -> int:
    """Position (from the start of the realised context) of the locally
    maximal variable introduced at the peak."""
    k = sum(1 for m in d.moves[: p.pos + 1] if m == UP)
    return 2 * k


def peak_var(d: DyckWord, p: Peak) -> FlatTerm:
    if p not in peaks(d):
        raise F.MalformedSyntax("not a peak")
    n = 1 + 2 * sum(1 for m in d.moves if m == UP)
    return Var(n - 1 - _peak_entry_pos(d, p))


def prune(d: DyckWord, p: Peak) -> tuple[DyckWord, FlatSub]:
    """Remove the peak; return the pruned word and the projection
    substitution from the original context to the pruned one."""
    if p not in peaks(d):
        raise F.MalformedSyntax("not a peak")
    prefix = d.moves[: p.pos]
    suffix = d.moves[p.pos + 2 :]
    ctx_e, ty_e, tm_e = dyck_realise(DyckWord(prefix))
    terms = F.identity_sub(ctx_e).terms + (tm_e, F.canonical_identity(ty_e, tm_e))
    for m in suffix:
        if m == UP:
            terms = tuple(F.weaken(F.weaken(t)) for t in terms) + (Var(1), Var(0))
    return DyckWord(prefix + suffix), FlatSub(STAR, terms)


def prune_sub(sigma: FlatSub, d: DyckWord, p: Peak) -> FlatSub:
    """Drop the two argument terms corresponding to the pruned peak."""
    pos = _peak_entry_pos(d, p)
    terms = sigma.terms[: pos - 1] + sigma.terms[pos + 1 :]
    return FlatSub(sigma.ty, terms)


# ---------------------------------------------------------------------------
# boundary variable sets


def boundary_set(g: FlatCtx, n: int, eps: str) -> VarSet:
    """The n-boundary variable set of a ps-context; eps is '-' or '+'."""
    ok, _ = check_ps_detail(g)
    if not ok:
        raise F.MalformedSyntax("boundary_set requires a ps-context")
    if eps not in ("-", "+"):
        raise ValueError("eps must be '-' or '+'")
    mem = [False] * len(g)
    mem[0] = True
    i = 1
    while i < len(g):
        d = F.dim_ty(g.entries[i])
        if d < n:
            mem[i] = True
            mem[i + 1] = True
        elif d == n and eps == "+":
            f_ty = g.entries[i + 1]
            src_pos = (i + 1) - 1 - f_ty.src.idx
            mem[src_pos] = False
            mem[i] = True
        i += 2
    return VarSet(tuple(mem))


def op_allowed(o: OperationSet, g: FlatCtx, u: VarSet, v: VarSet) -> bool:
    if o is OperationSet.GROUPOIDAL:
        return True
    n = len(g)
    full = VarSet.full(n)
    if (u, v) == (full, full):
        return True
    d = F.dim_ctx(g)
    if d == 0:
        return False
    return (u, v) == (boundary_set(g, d - 1, "-"), boundary_set(g, d - 1, "+"))
