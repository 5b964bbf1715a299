import itertools

import pytest
from hypothesis import given, strategies as st

from gbs_tiler import flow
from gbs_tiler.groups import BSGroup, FnZGroup, FreeGroup, enumerate_ball

F2 = FreeGroup(2)
BS = BSGroup()


def reduced_words(group, length):
    letters = flow.flow_alphabet(group)
    for w in itertools.product(letters, repeat=length):
        if all(not flow.backtracks(x, y, group) for x, y in zip(w, w[1:])):
            yield w


@st.composite
def free_flow_words(draw, min_size=1, max_size=10):
    n = draw(st.integers(min_size, max_size))
    out = [draw(st.sampled_from("aAbB"))]
    while len(out) < n:
        c = draw(st.sampled_from([c for c in "aAbB" if c != out[-1].swapcase()]))
        out.append(c)
    return tuple(out)


@st.composite
def bs_flow_words(draw, min_size=1, max_size=8):
    n = draw(st.integers(min_size, max_size))
    letters = flow.bs_letters()
    out = [draw(st.sampled_from(letters))]
    while len(out) < n:
        out.append(draw(st.sampled_from([c for c in letters if not flow.backtracks(out[-1], c, BS)])))
    return tuple(out)


def test_figure_patch_bab():
    p = flow.flow_patch_from_word("bab", 2, F2)
    y = {F2.key(g): s for g, s in p.labels.items()}
    assert (y["1"], y["b"], y["ba"]) == ("b", "a", "b")
    assert (y["a"], y["A"], y["B"]) == ("A", "a", "b")
    assert flow.word_of_patch(p) == ("b", "a", "b")


def test_path_cells_follow_word():
    p = flow.flow_patch_from_word("aaaa", 3, F2)
    assert all(p.labels["a" * j] == "a" for j in range(4))


def test_radius_zero_patch_reads_its_letter():
    p = flow.flow_patch_from_word("b", 0, F2)
    assert flow.word_of_patch(p) == ("b",)


def test_word_too_short():
    with pytest.raises(flow.FlowWordExhausted):
        flow.flow_patch_from_word("ab", 2, F2)


def test_backtracking_words_rejected():
    with pytest.raises(ValueError):
        flow.check_flow_word(("a", "A"), F2)
    with pytest.raises(ValueError):
        flow.check_flow_word(("aT", "t"), BS)


def built_patches(group, radius):
    return {frozenset(flow.flow_patch_from_word(w, radius, group).labels.items())
            for w in reduced_words(group, radius + 1)}


def test_free_valid_patches_are_exactly_the_word_patches():
    for radius in range(4):
        valid = {frozenset(p.labels.items()) for p in flow.enumerate_valid_patches(F2, radius)}
        assert valid == built_patches(F2, radius)


def test_bs_word_patches_are_locally_valid():
    # at radius 2 some locally valid patches do not extend: the a-chain joining
    # two cells of one coset leaves the ball
    for radius, n_valid, n_built in [(0, 5, 5), (1, 11, 11), (2, 32, 26)]:
        valid = {frozenset(p.labels.items()) for p in flow.enumerate_valid_patches(BS, radius)}
        built = built_patches(BS, radius)
        assert built <= valid
        assert (len(valid), len(built)) == (n_valid, n_built)
        # longer words add nothing new
        assert {frozenset(flow.flow_patch_from_word(w, radius, BS).labels.items())
                for w in reduced_words(BS, radius + 2)} == built


def test_frozen_patch_counts():
    assert len(flow.enumerate_valid_patches(F2, 4)) == 4 * 3 ** 4
    assert [len(flow.enumerate_valid_patches(BS, r)) for r in range(4)] == [5, 11, 32, 74]


@pytest.mark.parametrize("group", [F2, BS, FnZGroup(2)], ids=["F2", "BS", "F2xZ"])
def test_path_cells_determine_the_patch(group):
    radius = 3 if group is not BS else 3
    p = flow.flow_patch_from_word(next(reduced_words(group, radius + 1)), radius, group)
    word = flow.word_of_patch(p)
    g = group.identity
    fixed = {}
    for letter in word:
        fixed[g] = letter
        g = flow.mul_flow_letter(group, g, letter)
        if g not in p.labels:
            break
    found = flow.enumerate_valid_patches(group, radius, fixed=fixed)
    assert [q.labels for q in found] == [p.labels]


def test_empty_patch_is_valid():
    p = flow.FlowPatch(F2, enumerate_ball(F2, 0), {})
    assert flow.validate_flow_patch(p) == []


@given(free_flow_words(min_size=5, max_size=8))
def test_free_patches_validate(word):
    assert flow.validate_flow_patch(flow.flow_patch_from_word(word, 4, F2)) == []


@given(bs_flow_words(min_size=5, max_size=8))
def test_bs_patches_validate(word):
    assert flow.validate_flow_patch(flow.flow_patch_from_word(word, 4, BS)) == []


@given(free_flow_words(min_size=7, max_size=9), st.data())
def test_single_cell_mutation_is_caught(word, data):
    p = flow.flow_patch_from_word(word, 6, F2)
    inner = [g for g in p.labels if len(g) <= 5]
    g = data.draw(st.sampled_from(inner))
    other = data.draw(st.sampled_from([c for c in "aAbB" if c != p.labels[g]]))
    p.labels[g] = other
    assert flow.validate_flow_patch(p)


@given(bs_flow_words(min_size=5, max_size=6), st.data())
def test_bs_single_cell_mutation_is_caught(word, data):
    p = flow.flow_patch_from_word(word, 4, BS)
    inner = [g for g in enumerate_ball(BS, 3).elements]
    g = data.draw(st.sampled_from(inner))
    other = data.draw(st.sampled_from([c for c in flow.bs_letters() if c != p.labels[g]]))
    p.labels[g] = other
    assert flow.validate_flow_patch(p)


@given(free_flow_words(min_size=7, max_size=10))
def test_word_round_trip(word):
    p = flow.flow_patch_from_word(word, 6, F2)
    assert flow.word_of_patch(p) == word[:7]


@given(free_flow_words(min_size=5, max_size=6), st.sampled_from(["a", "b", "aB", "ba"]))
def test_translation_preserves_validity(word, h):
    p = flow.flow_patch_from_word(word, 4, F2)
    q = flow.translate_patch(p, h)
    assert flow.validate_flow_patch(q) == []
    assert q.labels[""] == p.labels[F2.inv(h)]


def test_period_forces_word_examples():
    rep = flow.period_forces_word("ab", 4, F2)
    prefixes = {"".join(w[:4]) for w in rep.invariant_words}
    assert prefixes == {"abab", "BABA"}
    assert rep.exceptions == []
    rep = flow.period_forces_word("a", 2, F2)
    assert {"".join(w[:2]) for w in rep.invariant_words} == {"aa", "AA"}
    with pytest.raises(ValueError):
        flow.period_forces_word("", 2, F2)


def test_approach_sequence_figure_instance():
    W, target = tuple("ba" * 6), tuple("BA" * 6)
    steps = flow.approach_sequence(W, target, 5, F2, generator="a")
    assert [s.n for s in steps] == [0, 2, 4]
    assert all(s.error == "A" for s in steps)
    for s in steps:
        assert flow.approach_word(s.g, target, s.n + 4, F2) == W[: s.n + 1] + ("A",) + target[:2]


def test_approach_with_equal_words():
    W = tuple("ab" * 6)
    steps = flow.approach_sequence(W, W, 4, F2)
    for s in steps:
        assert flow.approach_word(s.g, W, s.n + 3, F2) == W[: s.n + 1] + (s.error, W[0])


@given(free_flow_words(min_size=12, max_size=12), free_flow_words(min_size=4, max_size=4))
def test_approach_lengths_grow_by_one(W, target):
    steps = flow.approach_sequence(W, target, 10, F2)
    assert [s.n for s in steps] == list(range(10))
    assert all(len(b.g) == len(a.g) + 1 for a, b in zip(steps, steps[1:]))


def test_periodic_word():
    assert flow.periodic_word(("t", "at"), 5, BS) == ("t", "at", "t", "at", "t")
    with pytest.raises(ValueError):
        flow.periodic_word(("a", "b", "A"), 5, F2)


@pytest.mark.parametrize("group,word", [(F2, "abba"), (BS, ("t", "at", "t", "aT")), (FnZGroup(2), "babA")])
def test_dump_load_round_trip(group, word):
    p = flow.flow_patch_from_word(word, 3, group)
    q = flow.load_flow_patch(flow.dump_flow_patch(p))
    assert q.labels == p.labels
    assert flow.dump_flow_patch(q) == flow.dump_flow_patch(p)
