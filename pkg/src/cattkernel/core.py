"""Core syntax: the elaborated language produced by the typechecker and
consumed by evaluation.

Terms over a list context use positions counted from the start; terms over
a tree context use paths.  Standard types, composites and coherences, disc
labellings, and the interior and exterior labellings of an insertion are
all built here in core syntax.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Union

from . import flat as F
from . import trees as T
from .flat import STAR, FlatTerm, FlatType, Var
from .trees import LEAF, LTree, Labelling, Path, Tree


@dataclass(frozen=True)
class CVar:
    idx: int  # position from the start of a list context


@dataclass(frozen=True)
class CPath:
    path: Path


@dataclass(frozen=True)
class CTop:
    name: str
    body: "CoreTerm"


@dataclass(frozen=True)
class CCoh:
    tree: Tree
    ty: "CoreType"


@dataclass(frozen=True)
class CId:
    n: int


@dataclass(frozen=True)
class CComp:
    tree: Tree


@dataclass(frozen=True)
class CInc:
    low: int
    high: int
    term: "CoreTerm"


@dataclass(frozen=True)
class CSub:
    term: "CoreTerm"
    sub: "CoreSub"


@dataclass(frozen=True)
class CLabel:
    term: "CoreTerm"
    label: "CoreLabel"


@dataclass(frozen=True)
class CSusp:
    term: "CoreTerm"


CoreTerm = Union[CVar, CPath, CTop, CCoh, CId, CComp, CInc, CSub, CLabel, CSusp]


@dataclass(frozen=True)
class CStar:
    pass


@dataclass(frozen=True)
class CArrow:
    src: CoreTerm
    base: "CoreType"
    tgt: CoreTerm


@dataclass(frozen=True)
class CTySub:
    ty: "CoreType"
    sub: "CoreSub"


@dataclass(frozen=True)
class CTyLabel:
    ty: "CoreType"
    label: "CoreLabel"


@dataclass(frozen=True)
class CTySusp:
    ty: "CoreType"


CoreType = Union[CStar, CArrow, CTySub, CTyLabel, CTySusp]

CSTAR = CStar()


@dataclass(frozen=True)
class CoreSub:
    """Substitution out of a list context; the type part is the image of
    the base point and drives implicit suspension."""

    ty: CoreType
    terms: tuple


@dataclass(frozen=True)
class CoreLabel:
    """Labelling out of a tree context; the type part is the type of the
    images of the zero cells."""

    lt: LTree
    ty: CoreType = CSTAR

    def shape(self) -> Tree:
        return self.lt.shape()

    def __call__(self, p: Path) -> CoreTerm:
        return self.lt.lookup(p)


# ---------------------------------------------------------------------------
# standard constructions


def boundary_clabel(t: Tree, n: int, eps: str) -> CoreLabel:
    """The inclusion of the n-boundary of t as a labelling with path
    entries."""
    return CoreLabel(
        LTree.from_fn(
            T.tree_boundary(t, n), lambda p: CPath(T.boundary_path(t, n, eps, p))
        ),
        CSTAR,
    )


def std_type(t: Tree, n: int) -> CoreType:
    if n == 0:
        return CSTAR
    b = T.tree_boundary(t, n - 1)
    inner = std_term(b, n - 1)
    return CArrow(
        CLabel(inner, boundary_clabel(t, n - 1, "-")),
        std_type(t, n - 1),
        CLabel(inner, boundary_clabel(t, n - 1, "+")),
    )


def std_coh(t: Tree, n: int) -> CCoh:
    if n < t.height or (n == 0 and t != LEAF):
        raise F.MalformedSyntax("standard coherence needs n >= h(T), n > 0")
    return CCoh(t, std_type(t, n))


def std_term(t: Tree, n: int) -> CoreTerm:
    if t == LEAF and n == 0:
        return CPath((0,))
    if n > 0 and len(t.branches) == 1:
        return CSusp(std_term(t.branches[0], n - 1))
    return std_coh(t, n)


# ---------------------------------------------------------------------------
# disc labellings


def label_from_disc(a: CoreType, t: CoreTerm) -> CoreLabel:
    """The labelling from the disc tree classifying a term and its type."""

    def ext(lab: LTree, s: CoreTerm, u: CoreTerm) -> LTree:
        if not lab.branches:
            return LTree((lab.elements[0], s), (LTree((u,), ()),))
        return LTree(lab.elements, (ext(lab.branches[0], s, u),))

    if isinstance(a, CStar):
        return CoreLabel(LTree((t,), ()), CSTAR)
    if not isinstance(a, CArrow):
        raise F.MalformedSyntax("disc labelling needs a syntactic arrow type")
    inner = label_from_disc(a.base, a.src)
    return CoreLabel(ext(inner.lt, a.tgt, t), CSTAR)


# ---------------------------------------------------------------------------
# insertion labellings


def interior_path(s: Tree, p: T.Branch, t: Tree, q: Path) -> Path:
    """Where the interior labelling of an insertion sends a path of the
    inserted tree."""
    k = p[0]
    if len(p) == 1:
        return (q[0] + k,) + q[1:]
    if len(q) == 1:
        return (k,) if q[0] == 0 else (k + 1,)
    return (k,) + interior_path(s.branches[k], p[1:], t.branches[0], q[1:])


def interior_clabel(s: Tree, p: T.Branch, t: Tree) -> CoreLabel:
    T._require_point(s, p, t)
    return CoreLabel(
        LTree.from_fn(t, lambda q: CPath(interior_path(s, p, t, q))), CSTAR
    )


def exterior_clabel(s: Tree, p: T.Branch, t: Tree) -> CoreLabel:
    T._require_point(s, p, t)
    k = p[0]
    nt = len(t.branches)

    def identity_branch(j: int, rj: int) -> LTree:
        return LTree.from_fn(s.branches[j], lambda q: CPath((rj,) + q))

    if len(p) == 1:
        m = s.branches[k].height + 1
        disc = label_from_disc(std_type(t, m), std_coh(t, m))
        mid = disc.lt.map(lambda e: CInc(k, k + nt, e)).branches[0]
        elements = tuple(
            CPath((j,) if j <= k else (j + nt - 1,))
            for j in range(len(s.branches) + 1)
        )
        branches = (
            tuple(identity_branch(j, j) for j in range(k))
            + (mid,)
            + tuple(
                identity_branch(j, j + nt - 1) for j in range(k + 1, len(s.branches))
            )
        )
        return CoreLabel(LTree(elements, branches), CSTAR)
    inner = exterior_clabel(s.branches[k], p[1:], t.branches[0])
    mid = inner.lt.map(lambda e: CInc(k, k + 1, CSusp(e)))
    elements = tuple(CPath((j,)) for j in range(len(s.branches) + 1))
    branches = (
        tuple(identity_branch(j, j) for j in range(k))
        + (mid,)
        + tuple(identity_branch(j, j) for j in range(k + 1, len(s.branches)))
    )
    return CoreLabel(LTree(elements, branches), CSTAR)


def insert_ltree(lt: LTree, p: T.Branch, m: LTree) -> LTree:
    """Splice the labelling m into lt at the branch p."""
    return T.insert_label(Labelling(lt, STAR), p, Labelling(m, STAR)).lt


# ---------------------------------------------------------------------------
# flattening

Ambient = Union[Tree, int]


def _amb_size(amb: Ambient) -> int:
    return T.ctx_size(amb) if isinstance(amb, Tree) else amb


def flatten_tm(x: CoreTerm, amb: Ambient) -> FlatTerm:
    if isinstance(x, CVar):
        return Var(_amb_size(amb) - 1 - x.idx)
    if isinstance(x, CPath):
        return T.path_var(amb, x.path)
    if isinstance(x, CTop):
        return flatten_tm(x.body, amb)
    if isinstance(x, CCoh):
        g = T.tree_to_ctx(x.tree)
        return F.Coh(g, flatten_ty(x.ty, x.tree), F.identity_sub(g))
    if isinstance(x, CId):
        return T.standard_coh(T.linear_tree(x.n), x.n + 1)
    if isinstance(x, CComp):
        return T.standard_coh(x.tree, x.tree.height)
    if isinstance(x, CInc):
        if not isinstance(amb, Tree):
            raise F.MalformedSyntax("inclusion needs a tree context")
        span = Tree(amb.branches[x.low : x.high])
        inner = flatten_tm(x.term, span)
        return F.substitute(inner, T._inclusion_sub(amb, x.low, x.high - x.low))
    if isinstance(x, CSub):
        inner = flatten_tm(x.term, len(x.sub.terms))
        return F.substitute(inner, flatten_sub(x.sub, amb))
    if isinstance(x, CLabel):
        shape = x.label.shape()
        inner = flatten_tm(x.term, shape)
        return F.substitute(inner, T.label_to_sub(flatten_label(x.label, amb)))
    if isinstance(x, CSusp):
        inner_amb = _unsuspend(amb)
        return F.suspend_tm(flatten_tm(x.term, inner_amb), _amb_size(inner_amb))
    raise TypeError(f"cannot flatten {x!r}")


def flatten_ty(a: CoreType, amb: Ambient) -> FlatType:
    if isinstance(a, CStar):
        return STAR
    if isinstance(a, CArrow):
        return F.Arrow(
            flatten_tm(a.src, amb), flatten_ty(a.base, amb), flatten_tm(a.tgt, amb)
        )
    if isinstance(a, CTySub):
        inner = flatten_ty(a.ty, len(a.sub.terms))
        return F.substitute(inner, flatten_sub(a.sub, amb))
    if isinstance(a, CTyLabel):
        shape = a.label.shape()
        inner = flatten_ty(a.ty, shape)
        return F.substitute(inner, T.label_to_sub(flatten_label(a.label, amb)))
    if isinstance(a, CTySusp):
        inner_amb = _unsuspend(amb)
        return F.suspend_ty(flatten_ty(a.ty, inner_amb), _amb_size(inner_amb))
    raise TypeError(f"cannot flatten {a!r}")


def _unsuspend(amb: Ambient) -> Ambient:
    if isinstance(amb, Tree):
        if len(amb.branches) != 1:
            raise F.MalformedSyntax("suspended term needs a suspension context")
        return amb.branches[0]
    return amb - 2


def flatten_sub(s: CoreSub, amb: Ambient) -> F.FlatSub:
    return F.FlatSub(
        flatten_ty(s.ty, amb), tuple(flatten_tm(t, amb) for t in s.terms)
    )


def flatten_label(lab: CoreLabel, amb: Ambient) -> Labelling:
    return Labelling(
        lab.lt.map(lambda e: flatten_tm(e, amb)),
        flatten_ty(lab.ty, amb),
    )


# ---------------------------------------------------------------------------
# conversion to raw syntax

from . import surface as R


def path_name(p: Path) -> str:
    return "p" + "".join(str(k) for k in p)


class Names:
    """Display names for the variables of a context."""

    def __init__(self, names=None):
        # names: a sequence for a list context, an LTree for a tree context
        self.names = names

    def var(self, idx: int) -> str:
        if self.names is not None and not isinstance(self.names, LTree):
            return self.names[idx]
        return f"v{idx}"

    def path(self, p: Path) -> str:
        if isinstance(self.names, LTree):
            n = self.names.lookup(p)
            if n is not None:
                return n
        return path_name(p)


def to_raw(x, names: Optional[Names] = None, keep_implicits: bool = False):
    nm = names or Names()
    if isinstance(x, CVar):
        return R.RVar(nm.var(x.idx))
    if isinstance(x, CPath):
        return R.RVar(nm.path(x.path))
    if isinstance(x, CTop):
        return R.RVar(x.name)
    if isinstance(x, CCoh):
        tree = _raw_tree_ctx(x.tree)
        inner = Names(LTree.from_fn(x.tree, path_name))
        return R.RCoh(tree, to_raw(x.ty, inner, keep_implicits))
    if isinstance(x, CId):
        return R.RId()
    if isinstance(x, CComp):
        return R.RComp()
    if isinstance(x, CInc):
        return R.RInc(x.low, x.high, to_raw(x.term, nm, keep_implicits))
    if isinstance(x, CSub):
        ty = to_raw(x.sub.ty, nm, keep_implicits) if keep_implicits else None
        args = R.RSubArgs(
            ty, tuple(to_raw(t, nm, keep_implicits) for t in x.sub.terms)
        )
        return R.RApp(to_raw(x.term, nm, keep_implicits), args)
    if isinstance(x, CLabel):
        return R.RApp(
            to_raw(x.term, nm, keep_implicits),
            _raw_label(x.label, nm, keep_implicits),
        )
    if isinstance(x, CSusp):
        return R.RSusp(to_raw(x.term, nm, keep_implicits))
    if isinstance(x, CStar):
        return R.RStar()
    if isinstance(x, CArrow):
        base = (
            to_raw(x.base, nm, keep_implicits)
            if keep_implicits and not isinstance(x.base, CStar)
            else None
        )
        return R.RArrow(
            to_raw(x.src, nm, keep_implicits), base, to_raw(x.tgt, nm, keep_implicits)
        )
    if isinstance(x, CTySub):
        ty = to_raw(x.sub.ty, nm, keep_implicits) if keep_implicits else None
        args = R.RSubArgs(
            ty, tuple(to_raw(t, nm, keep_implicits) for t in x.sub.terms)
        )
        return R.RTyApp(to_raw(x.ty, nm, keep_implicits), args)
    if isinstance(x, CTyLabel):
        return R.RTyApp(
            to_raw(x.ty, nm, keep_implicits), _raw_label(x.label, nm, keep_implicits)
        )
    if isinstance(x, CTySusp):
        return R.RTySusp(to_raw(x.ty, nm, keep_implicits))
    raise TypeError(f"cannot convert {x!r}")


def _raw_tree_ctx(t: Tree) -> R.RawTree:
    def build(sub: Tree, prefix: Path) -> R.RawTree:
        elements = tuple(
            path_name(prefix + (k,)) for k in range(len(sub.branches) + 1)
        )
        branches = tuple(
            build(b, prefix + (k,)) for k, b in enumerate(sub.branches)
        )
        return R.RawTree(elements, branches)

    return build(t, ())


def _raw_label(lab: CoreLabel, nm: Names, keep_implicits: bool) -> R.RLabelArgs:
    shape = lab.shape()
    keep = (
        None
        if keep_implicits
        else {tuple(p) for p in T.maximal_paths(shape)}
    )

    def build(lt: LTree, prefix: Path) -> R.RawTree:
        elements = []
        for k, e in enumerate(lt.elements):
            p = prefix + (k,)
            if keep is not None and p not in keep:
                elements.append(None)
            else:
                elements.append(to_raw(e, nm, keep_implicits))
        branches = tuple(
            build(b, prefix + (k,)) for k, b in enumerate(lt.branches)
        )
        return R.RawTree(tuple(elements), branches)

    ty = (
        to_raw(lab.ty, nm, keep_implicits)
        if keep_implicits and not isinstance(lab.ty, CStar)
        else None
    )
    return R.RLabelArgs(build(lab.lt, ()), ty)
