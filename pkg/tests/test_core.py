"""Core syntax: standard constructions, insertion labellings, flattening,
and conversion to raw syntax."""

import pytest

from cattkernel import core as C
from cattkernel import flat as F
from cattkernel import surface as R
from cattkernel import trees as T
from cattkernel.core import (
    CArrow,
    CComp,
    CId,
    CLabel,
    CPath,
    CSTAR,
    CSub,
    CSusp,
    CTop,
    CVar,
    CoreLabel,
    CoreSub,
)
from cattkernel.flat import STAR, Arrow, Var
from cattkernel.trees import LEAF, LTree, Tree, linear_tree

CHAIN2 = Tree((LEAF, LEAF))
EXAMPLE = Tree((Tree((LEAF, LEAF)), LEAF))


def all_trees(max_nodes: int):
    by_nodes: list[list[Tree]] = [[], [LEAF]]
    for n in range(2, max_nodes + 1):
        acc = []
        # trees with n nodes = head branch (k nodes) + remaining branches
        for k in range(1, n):
            for head in by_nodes[k]:
                for rest in by_nodes[n - k]:
                    acc.append(Tree((head,) + rest.branches))
        by_nodes.append(acc)
    seen = []
    for group in by_nodes[1:]:
        for t in group:
            if t not in seen:
                seen.append(t)
    return seen


TREES = all_trees(5)


# ---------------------------------------------------------------------------
# flattening of variables and applications


def test_flatten_list_variable():
    assert C.flatten_tm(CVar(0), 3) == Var(2)
    assert C.flatten_tm(CVar(2), 3) == Var(0)


def test_flatten_path_variable():
    assert C.flatten_tm(CPath((0,)), CHAIN2) == Var(4)
    assert C.flatten_tm(CPath((0, 0)), CHAIN2) == Var(2)
    assert C.flatten_tm(CPath((2,)), CHAIN2) == Var(1)


def test_flatten_top_level_unfolds():
    assert C.flatten_tm(CTop("a", CVar(1)), 3) == Var(1)


def test_flatten_sub_application():
    s = CSub(CVar(0), CoreSub(CSTAR, (CVar(2),)))
    assert C.flatten_tm(s, 4) == Var(1)


def test_flatten_label_application():
    lab = CoreLabel(LTree.from_fn(CHAIN2, CPath), CSTAR)
    s = CLabel(CComp(CHAIN2), lab)
    assert C.flatten_tm(s, CHAIN2) == T.standard_coh(CHAIN2, 1)


def test_flatten_suspension():
    tm = CSusp(CPath((0,)))
    assert C.flatten_tm(tm, T.suspend_tree(CHAIN2)) == F.suspend_tm(
        Var(4), T.ctx_size(CHAIN2)
    )


def test_flatten_identity_head():
    assert C.flatten_tm(CId(0), LEAF) == T.standard_coh(linear_tree(0), 1)
    got = C.flatten_tm(CId(1), linear_tree(1))
    assert F.is_identity(got)


# ---------------------------------------------------------------------------
# standard constructions agree with the flat ones


def test_std_type_flattens_to_standard_type():
    for t in TREES:
        for n in range(t.height, t.height + 3):
            assert C.flatten_ty(C.std_type(t, n), t) == T.standard_type(t, n)


def test_std_term_flattens_to_standard_term():
    for t in TREES:
        for n in range(max(t.height, 1), t.height + 3):
            assert C.flatten_tm(C.std_term(t, n), t) == T.standard_term(t, n)


def test_std_coh_precondition():
    with pytest.raises(F.MalformedSyntax):
        C.std_coh(CHAIN2, 0)


# ---------------------------------------------------------------------------
# disc labellings


def _lift_tm(x, n: int):
    assert isinstance(x, F.Var)
    return CVar(n - 1 - x.idx)


def _lift_ty(a, n: int):
    if isinstance(a, F.Star):
        return CSTAR
    return CArrow(_lift_tm(a.src, n), _lift_ty(a.base, n), _lift_tm(a.tgt, n))


def test_label_from_disc_matches_flat():
    g = F.disc_ctx(2)
    n = len(g)
    cases = [
        (STAR, Var(0)),
        (Arrow(Var(4), STAR, Var(3)), Var(2)),
        (Arrow(Var(2), Arrow(Var(4), STAR, Var(3)), Var(1)), Var(0)),
    ]
    for a, t in cases:
        got = C.label_from_disc(_lift_ty(a, n), _lift_tm(t, n))
        want = T.label_from_disc(a, t)
        assert got.lt.map(lambda e: C.flatten_tm(e, n)) == want.lt


def test_label_from_disc_rejects_opaque_type():
    with pytest.raises(F.MalformedSyntax):
        C.label_from_disc(C.CTySusp(CSTAR), CVar(0))


# ---------------------------------------------------------------------------
# insertion labellings agree with the flat ones


def insertion_points(max_nodes: int):
    for s in all_trees(max_nodes):
        for p in T.all_branches(s):
            for t in all_trees(max_nodes):
                if T.is_insertion_point(s, p, t):
                    yield s, tuple(p), t


def test_interior_clabel_matches_flat():
    for s, p, t in insertion_points(4):
        r = T.insert_tree(s, p, t)
        got = C.interior_clabel(s, p, t)
        flat = got.lt.map(lambda e: C.flatten_tm(e, r))
        assert flat == T.interior_label(s, p, t).lt


def test_exterior_clabel_matches_flat():
    for s, p, t in insertion_points(4):
        r = T.insert_tree(s, p, t)
        got = C.exterior_clabel(s, p, t)
        flat = got.lt.map(lambda e: C.flatten_tm(e, r))
        assert flat == T.exterior_label(s, p, t).lt


# ---------------------------------------------------------------------------
# labelling round trip


def test_label_round_trip():
    for t in TREES:
        lab = T.id_label(t)
        assert T.label_from_sub(t, T.label_to_sub(lab)) == lab


def test_label_round_trip_after_substitution():
    lab = T.id_label(EXAMPLE)
    sigma = T.label_to_sub(lab)
    assert T.label_from_sub(EXAMPLE, sigma).lt == lab.lt


def test_label_from_sub_length_mismatch():
    with pytest.raises(F.MalformedSyntax):
        T.label_from_sub(CHAIN2, F.FlatSub(STAR, (Var(0),)))


# ---------------------------------------------------------------------------
# conversion to raw syntax


def test_to_raw_variables():
    nm = C.Names(["x", "f"])
    assert C.to_raw(CVar(1), nm) == R.RVar("f")
    assert C.to_raw(CPath((0, 0))) == R.RVar("p00")


def test_to_raw_label_keeps_only_maximal_entries():
    lab = CoreLabel(LTree.from_fn(CHAIN2, CPath), CSTAR)
    raw = C.to_raw(CLabel(CComp(CHAIN2), lab))
    tree = raw.args.tree
    assert tree.elements == (None, None, None)
    assert tree.branches[0].elements == (R.RVar("p00"),)


def test_to_raw_keep_implicits():
    lab = CoreLabel(LTree.from_fn(CHAIN2, CPath), CSTAR)
    raw = C.to_raw(CLabel(CComp(CHAIN2), lab), keep_implicits=True)
    assert raw.args.tree.elements == (R.RVar("p0"), R.RVar("p1"), R.RVar("p2"))


def test_to_raw_pretty_parses_back():
    lab = CoreLabel(LTree.from_fn(CHAIN2, CPath), CSTAR)
    raw = C.to_raw(CLabel(CComp(CHAIN2), lab))
    printed = R.pretty(raw)
    assert R.strip_spans(R.parse_term(printed)) == R.strip_spans(raw)


def test_to_raw_coherence():
    raw = C.to_raw(C.std_coh(CHAIN2, 1))
    printed = R.pretty(raw)
    assert printed.startswith("coh [ p0{p00}p1{p10}p2 :")
