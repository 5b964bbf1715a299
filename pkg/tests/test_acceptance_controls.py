"""Each criterion must be able to fail: break one ingredient and expect a FAIL."""
import dataclasses

from gbs_tiler import acceptance, heights, wang


def test_c2_detects_broken_tiles(monkeypatch):
    real = wang.tile_colors

    def shifted(tag, x, g=None, lam_value=None):
        t = real(tag, x, g, lam_value)
        return dataclasses.replace(t, r=t.r + (1 if len(g.prefix) == 1 else 0))

    monkeypatch.setattr(wang, "tile_colors", shifted)
    result = acceptance.criterion_2(0)
    assert not result.passed and result.details["violations"] > 0


def test_c3_detects_wrong_lambda(monkeypatch):
    monkeypatch.setattr(heights, "lam", lambda w, m=2, n=3: heights.alpha(w))
    assert not acceptance.criterion_3(0).passed


def test_c5_detects_a_periodic_map(monkeypatch):
    monkeypatch.setattr(wang, "T_MAP", wang.T_MAP.__class__(wang.LO, wang.HI, (wang.Branch(wang.LO, wang.HI, 1),), "id"))
    monkeypatch.setattr(wang, "T_INV", wang.T_MAP)
    result = acceptance.criterion_5(0)
    assert not result.passed and result.details["periodic"] == 50


def test_c6_detects_a_bad_normal_form(monkeypatch):
    real = acceptance.bs_normalize
    monkeypatch.setattr(acceptance, "bs_normalize", lambda w: real(w.replace("t", "").replace("T", "")))
    result = acceptance.criterion_6(0, bound=6)
    assert not result.passed and result.details["disagreements"] > 0
