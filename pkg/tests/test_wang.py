import dataclasses
import math
import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from gbs_tiler import flow, wang
from gbs_tiler.groups import BSGroup, enumerate_ball

BS = BSGroup()
BALL6 = enumerate_ball(BS, 6).elements
HALF = Fraction(1, 2)

circle_points = st.fractions(min_value=Fraction(1, 10), max_value=Fraction(5, 2), max_denominator=400).filter(
    lambda x: x < Fraction(5, 2))


@st.composite
def bs_flow_words(draw, size=6):
    letters = flow.bs_letters()
    out = [draw(st.sampled_from(letters))]
    while len(out) < size:
        out.append(draw(st.sampled_from([c for c in letters if not flow.backtracks(out[-1], c, BS)])))
    return tuple(out)


def test_map_values():
    assert wang.T_MAP(HALF) == Fraction(5, 4)
    assert wang.T_MAP(2) == Fraction(1, 5)
    assert wang.T_INV(Fraction(1, 5)) == 2
    assert wang.orbit(wang.T_MAP, HALF, 0) == HALF
    # T(5/4) = 1/8 is already on the circle
    assert wang.orbit(wang.T_MAP, HALF, 2) == Fraction(1, 8)


def test_circle_endpoints_are_identified():
    assert wang.T_MAP.reduce(Fraction(5, 2)) == Fraction(1, 10)
    with pytest.raises(ValueError):
        wang.T_MAP(Fraction(3))


def test_forbidden_slopes_rejected():
    lo, hi = Fraction(1), Fraction(3)
    with pytest.raises(ValueError):
        wang.PLMap(lo, hi, (wang.Branch(lo, Fraction(2), Fraction(3, 2)), wang.Branch(Fraction(2), hi, Fraction(0))))
    for f in (wang.T_MAP, wang.T_INV):
        assert all(b.slope not in (Fraction(2, 3), Fraction(3, 2)) for b in f.branches)


@given(circle_points)
def test_inverse(x):
    assert wang.T_MAP(wang.T_INV(x)) == x
    assert wang.T_INV(wang.T_MAP(x)) == x


@given(circle_points)
def test_no_short_periods(x):
    y = x
    for _ in range(40):
        y = wang.T_MAP(y)
        assert y != x


def test_worked_tile():
    t = wang.tile_colors("T", HALF)
    assert (t.t1, t.t2) == (0, 1)
    assert (t.b1, t.b2, t.b3) == (1, 1, 1)
    assert (t.l, t.r) == (0, Fraction(1, 4))
    assert t.line() == "0 1 | 0/1 | 1 1 1 | 1/4 | T"
    assert wang.T_MAP(HALF) + t.l == Fraction(t.b1 + t.b2 + t.b3, 3) + t.r


def test_r_matches_l_two_steps_along_a():
    assert wang.tile_colors("T", HALF, BS.identity).r == wang.tile_colors("T", HALF, BS.from_word("aa")).l


@given(st.sampled_from(("T", "T_inv")), circle_points, st.sampled_from(BALL6))
def test_identity_and_beatty_bounds(tag, x, g):
    t = wang.tile_colors(tag, x, g)
    assert wang.tile_identity_holds(t, x)
    assert wang.computes(t)
    c = wang.map_for_tag(tag).slope(x)
    assert {t.t1, t.t2} <= {math.floor(x), math.ceil(x)}
    assert {t.b1, t.b2, t.b3} <= {math.floor(c * x), math.ceil(c * x)}


@given(st.sampled_from(("T", "T_inv")), circle_points, st.sampled_from(BALL6))
def test_matching_rule_closed_form(tag, x, g):
    assert wang.tile_colors(tag, x, g).r == wang.tile_colors(tag, x, BS.mul(g, BS.from_word("aa"))).l


def test_tile_line_round_trip():
    t = wang.tile_colors("T_inv", Fraction(7, 5), BS.from_word("tat"))
    assert wang.WangTile7.parse(t.line()) == t


@given(bs_flow_words(), st.sampled_from([HALF, Fraction(7, 5), Fraction(11, 10), Fraction(1), Fraction(1, 10)]))
def test_built_patches_validate(word, x):
    p = wang.build_bs_config(word, x, 4)
    res = wang.check_bs_patch(p)
    assert res.violations == []
    assert all(res.checked[f] > 0 for f in wang.RULE_FAMILIES)


def test_radius_zero_and_empty():
    p = wang.build_bs_config(("t",), HALF, 0)
    assert len(p.cells()) == 1
    assert p.tiles[BS.identity].f_tag == "T"
    assert wang.validate_bs_patch(p) == []
    empty = wang.BSConfigPatch(enumerate_ball(BS, 0), {}, {})
    assert wang.validate_bs_patch(empty) == []


def test_word_too_short():
    with pytest.raises(ValueError):
        wang.build_bs_config(("t", "at"), HALF, 3)


def test_tag_follows_flow():
    p = wang.build_bs_config(("t", "at", "t", "at", "t"), HALF, 4)
    for g in p.cells():
        assert (p.tiles[g].f_tag == "T") == (p.letters[g] == "t")


@given(bs_flow_words(), st.data())
def test_perturbing_r_breaks_exactly_its_edge(word, data):
    p = wang.build_bs_config(word, Fraction(7, 5), 4)
    a2 = BS.from_word("aa")
    cells = [g for g in p.cells() if BS.mul(g, a2) in p.tiles]
    g = data.draw(st.sampled_from(cells))
    p.tiles[g] = dataclasses.replace(p.tiles[g], r=p.tiles[g].r + 1)
    bad = wang.validate_bs_patch(p)
    assert [(v.cell, v.rule) for v in bad] == [(BS.key(g), "r-l")]


@given(bs_flow_words(), st.data())
def test_perturbing_b_is_caught(word, data):
    p = wang.build_bs_config(word, HALF, 4)
    g = data.draw(st.sampled_from(enumerate_ball(BS, 2).elements))
    p.tiles[g] = dataclasses.replace(p.tiles[g], b2=p.tiles[g].b2 + 1)
    assert {v.rule for v in wang.validate_bs_patch(p)} & {"b-t1", "b-t2"}


def test_flipping_tag_is_caught():
    p = wang.build_bs_config(("t", "at", "t", "at", "t"), HALF, 4)
    p.tiles[BS.identity] = dataclasses.replace(p.tiles[BS.identity], f_tag="T_inv")
    assert "f-tag" in {v.rule for v in wang.validate_bs_patch(p)}


def test_scan_finds_no_short_period():
    p = wang.build_bs_config(("t", "at", "aT", "aaT", "at", "t"), HALF, 5)
    scan = wang.scan_periods(wang.bs_patch_labels(p), BS, 2, 10)
    assert scan.survivors == []
    assert scan.refuted + len(scan.inconclusive) == 16
    assert BS.key(BS.identity) not in scan.inconclusive


def test_scan_positive_control():
    tile = wang.tile_colors("T", HALF)
    labels = {g: tile for g in enumerate_ball(BS, 4).elements}
    scan = wang.scan_periods(labels, BS, 2, 10)
    assert "|a^2" in scan.survivors


def test_scan_reports_small_overlaps_as_inconclusive():
    tile = wang.tile_colors("T", HALF)
    labels = {g: tile for g in enumerate_ball(BS, 1).elements}
    scan = wang.scan_periods(labels, BS, 2, 100)
    assert scan.survivors == [] and len(scan.inconclusive) == 16
    with pytest.raises(ValueError):
        wang.scan_periods(labels, BS, 2, 0)


def test_dump_load_round_trip():
    p = wang.build_bs_config(("at", "t", "aT", "at"), Fraction(11, 10), 3)
    text = wang.dump_bs_patch(p)
    q = wang.load_bs_patch(text)
    assert q.tiles == p.tiles and q.letters == p.letters and q.x == p.x and q.word == p.word
    assert wang.dump_bs_patch(q) == text


def test_tile_colours_stay_bounded():
    rng = random.Random(3)
    seen = set()
    for _ in range(5):
        x = Fraction(rng.randint(1, 24), 10)
        seen.update(wang.tileset_of(wang.build_bs_config(("t", "at", "t", "at", "t"), x, 4)))
    assert all(t.t1 in (0, 1, 2) for t in seen)
