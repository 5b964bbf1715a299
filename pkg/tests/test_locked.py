import pytest
from hypothesis import given, strategies as st

from gbs_tiler import flow, locked
from gbs_tiler.groups import FnZElem, FnZGroup, enumerate_ball

G = FnZGroup(2)


def test_index_two_quotient():
    q = locked.quotient_fixture("f2z-a")
    assert q.index == 2
    assert [G.key(r) for r in q.representatives] == ["|t^0", "a|t^0"]


def test_trivial_quotient():
    q = locked.quotient_fixture("trivial")
    assert q.index == 1
    assert q.representatives == [G.identity]
    p = locked.canonical_locked_patch(q, 2)
    assert set(p.labels.values()) == {G.identity}


def test_rule_counts():
    q = locked.quotient_fixture("f2z-a")
    rules = locked.locked_rules(q, ["b", "t", "aa", "abA"])
    assert len(rules.fix_rules) == 4 * len(q.representatives)
    assert len(rules.sigma_rules) == 1
    assert locked.locked_rules(locked.quotient_fixture("trivial"), ["a", "b", "t"]).sigma_rules == ()
    with pytest.raises(ValueError):
        locked.locked_rules(q, ["a"])


def test_schreier_generators_lie_in_the_kernel():
    for name in ("f2z-a", "trivial", "z2-klein", "f2z-t", "bs-t"):
        q = locked.quotient_fixture(name)
        assert all(q.in_kernel(q.group.from_word(w)) for w in locked.schreier_generators(q))


def test_canonical_patch_labels_parity():
    q = locked.quotient_fixture("f2z-a")
    p = locked.canonical_locked_patch(q, 2)
    for g, r in p.labels.items():
        assert (g.w.count("a") - g.w.count("A")) % 2 == (0 if r == G.identity else 1)


@pytest.mark.parametrize("name", ["f2z-a", "trivial", "z2-klein", "f2z-t", "bs-t"])
def test_canonical_patches_validate(name):
    q = locked.quotient_fixture(name)
    rules = locked.locked_rules(q, locked.schreier_generators(q))
    for radius in range(5):
        assert locked.validate_locked(locked.canonical_locked_patch(q, radius), rules) == []


@pytest.mark.parametrize("name", ["f2z-a", "z2-klein", "bs-t"])
def test_relabelling_is_caught(name):
    q = locked.quotient_fixture(name)
    rules = locked.locked_rules(q, locked.schreier_generators(q))
    p = locked.canonical_locked_patch(q, 3)
    reps = q.representatives
    p.labels[q.group.identity] = reps[1]
    bad = locked.validate_locked(p, rules)
    assert bad and all(v.rule.startswith(("fix:", "sigma:")) for v in bad)


def test_stabilizer_examples():
    q = locked.quotient_fixture("f2z-a")
    p = locked.canonical_locked_patch(q, 4)
    assert locked.stabilizer_check(p, G.from_word("a")) == "moves"
    assert locked.stabilizer_check(p, G.from_word("aa")) == "fixes"
    assert locked.stabilizer_check(p, G.identity) == "fixes"
    with pytest.raises(ValueError):
        locked.stabilizer_check(locked.canonical_locked_patch(q, 1), G.from_word("aaa"))


@pytest.mark.parametrize("name", ["f2z-a", "trivial", "z2-klein", "f2z-t", "bs-t"])
def test_stabilizer_is_the_kernel(name):
    q = locked.quotient_fixture(name)
    p = locked.canonical_locked_patch(q, 5)
    for g in enumerate_ball(q.group, 3).elements:
        assert (locked.stabilizer_check(p, g) == "fixes") == q.in_kernel(g)


def test_quotient_files(fixtures):
    q = locked.load_quotient((fixtures / "f2z_a.quotient").read_text())
    assert q.index == 2
    assert locked.load_quotient(locked.dump_quotient(q)).table == q.table
    with pytest.raises(locked.NotAHomomorphism):
        locked.load_quotient((fixtures / "not_a_hom.quotient").read_text())
    with pytest.raises(ValueError):
        locked.build_quotient("F2xZ", [[0, 1], [0, 1]], {"a": 0, "b": 0, "t": 0})


def test_locked_patch_round_trip():
    q = locked.quotient_fixture("z2-klein")
    p = locked.canonical_locked_patch(q, 3)
    back, name = locked.load_locked(locked.dump_locked(p, q.group_name))
    assert name == "Z2" and back.labels == p.labels


@given(st.sampled_from(["a", "b", "ab", "Ba"]))
def test_product_lift(word):
    q = locked.quotient_fixture("f2z-t")
    radius = 3
    base = flow.flow_patch_from_word(word + "ba" * 3, radius, G)
    xhat = {g: base.labels[FnZElem(g.w, 0)] for g in enumerate_ball(G, radius).elements}
    lp = locked.canonical_locked_patch(q, radius)
    pair = locked.product_lift(xhat, lp, q)
    assert {g: c[0] for g, c in pair.cells.items()} == xhat
    t = G.from_word("t")
    assert not q.in_kernel(t)
    assert locked.stabilizer_check(lp, t) == "moves"
    trivial = locked.quotient_fixture("trivial")
    same = locked.product_lift(xhat, locked.canonical_locked_patch(trivial, radius), trivial)
    assert {c[1] for c in same.cells.values()} == {G.identity}


def test_product_lift_rejects_non_constant_upper_layer():
    q = locked.quotient_fixture("f2z-t")
    lp = locked.canonical_locked_patch(q, 2)
    xhat = {g: g.k for g in lp.labels}
    with pytest.raises(ValueError):
        locked.product_lift(xhat, lp, q)


def test_lift_and_restrict():
    labels = {g: len(g.w) for g in enumerate_ball(G, 3).elements}
    up = locked.lift_fnz(labels, 2, 2, 2)
    assert locked.restrict_fnz(up, 2) == {h: labels[h] for h in locked.restrict_fnz(up, 2)}
