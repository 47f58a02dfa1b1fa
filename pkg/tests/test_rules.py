import numpy as np
import pytest
from hypothesis import given, strategies as st

from skinrules import rules
from skinrules.errors import FormatError, InputError
from skinrules.rules import (
    ChannelRanges,
    RuleKind,
    SkinLabel,
    build_lut,
    channel_ranges,
    classify,
    classify_kovac,
    classify_kovac_rewritten,
    classify_rgb_ratio,
    classify_saleh,
    classify_swift,
    load_lut,
)

SKIN, NON = SkinLabel.SKIN, SkinLabel.NON_SKIN
channel = st.integers(0, 255)
pixels = st.tuples(channel, channel, channel)


@pytest.mark.parametrize(
    "fn, pixel, expected",
    [
        (classify_kovac, (224, 180, 150), SKIN),
        (classify_kovac, (0, 0, 0), NON),
        (classify_kovac, (96, 41, 21), SKIN),
        (classify_kovac, (100, 100, 100), NON),
        (classify_kovac_rewritten, (224, 180, 150), SKIN),
        (classify_kovac_rewritten, (0, 0, 0), NON),
        (classify_kovac_rewritten, (200, 190, 21), NON),
        (classify_swift, (200, 150, 100), SKIN),
        (classify_swift, (100, 150, 200), NON),
        (classify_swift, (40, 20, 5), NON),
        (classify_swift, (255, 255, 255), NON),
        (classify_saleh, (100, 60, 200), SKIN),
        (classify_saleh, (100, 100, 100), NON),
        (classify_saleh, (120, 100, 0), NON),
        (classify_saleh, (200, 120, 0), NON),
        (classify_rgb_ratio, (150, 100, 50), SKIN),
        (classify_rgb_ratio, (100, 150, 50), NON),
        (classify_rgb_ratio, (255, 255, 255), SKIN),
        (classify_rgb_ratio, (0, 0, 255), NON),
    ],
)
def test_rule_examples(fn, pixel, expected):
    assert fn(pixel) is expected


def test_boundary_neighbours():
    # one step inside each strict bound
    assert classify_saleh((121, 100, 0)) is SKIN
    assert classify_saleh((199, 120, 0)) is SKIN
    # 4B == R is the inclusive edge of the Swift quarter condition
    assert classify_swift((40, 20, 10)) is SKIN
    assert classify_swift((40, 20, 9)) is NON
    assert classify_swift((200, 200, 200)) is SKIN
    assert classify_swift((201, 201, 201)) is NON
    # R == 3G is the inclusive edge of (R-G)/(R+G) <= 0.5
    assert classify_rgb_ratio((150, 50, 100)) is SKIN
    assert classify_rgb_ratio((151, 50, 100)) is NON
    assert classify_rgb_ratio((150, 50, 101)) is NON


def test_swift_black_is_skin_under_disjunctive_reading():
    assert classify_swift((0, 0, 0)) is SKIN


@pytest.mark.parametrize(
    "rule, pixel, expected",
    [
        ("rgb-ratio", (150, 100, 50), SKIN),
        ("kovac", (0, 0, 0), NON),
        ("saleh", (100, 60, 200), SKIN),
        (RuleKind.SWIFT, (200, 150, 100), SKIN),
        ("kovac_rewritten", (224, 180, 150), SKIN),
    ],
)
def test_dispatcher(rule, pixel, expected):
    assert classify(rule, pixel) is expected


def test_rule_names():
    assert [k.value for k in RuleKind] == ["kovac", "kovac-rewritten", "saleh", "swift", "rgb-ratio"]
    assert [k.rule_id for k in RuleKind] == [0, 1, 2, 3, 4]
    with pytest.raises(ValueError, match="unknown rule"):
        RuleKind.parse("hsv")


def test_uint8_channels_do_not_wrap():
    px = np.array([100, 150, 50], dtype=np.uint8)
    assert classify_rgb_ratio(px) is NON
    assert classify_saleh(np.array([100, 60, 0], dtype=np.uint8)) is SKIN


def test_rgb_pixel_checked():
    assert rules.RgbPixel.checked(1, 2, 3) == (1, 2, 3)
    with pytest.raises(ValueError):
        rules.RgbPixel.checked(256, 0, 0)


@given(pixels, st.sampled_from(list(RuleKind)))
def test_dispatcher_matches_dedicated_function(p, rule):
    dedicated = {
        RuleKind.KOVAC: classify_kovac,
        RuleKind.KOVAC_REWRITTEN: classify_kovac_rewritten,
        RuleKind.SALEH: classify_saleh,
        RuleKind.SWIFT: classify_swift,
        RuleKind.RGB_RATIO: classify_rgb_ratio,
    }[rule]
    assert classify(rule, p) is dedicated(p)
    assert classify(rule, p) is classify(rule, p)


@given(pixels, st.sampled_from(list(RuleKind)))
def test_vectorised_matches_scalar(p, rule):
    assert bool(rules.skin_mask(rule, np.array([p], dtype=np.uint8))[0]) == bool(classify(rule, p))


@given(
    st.tuples(st.integers(0, 127), st.integers(0, 127), st.integers(0, 127)),
    st.integers(1, 255),
    st.integers(1, 255),
)
def test_rgb_ratio_scale_invariance(base, m, n):
    p = tuple(m * c for c in base)
    q = tuple(n * c for c in base)
    if max(p + q) > 255 or base[0] + base[1] == 0:
        return
    assert classify_rgb_ratio(p) is classify_rgb_ratio(q)


@given(pixels)
def test_rgb_ratio_float_reference_agrees(p):
    assert rules.is_skin_rgb_ratio_float(*p) == rules.is_skin_rgb_ratio(*p)


def test_saleh_ignores_blue_exhaustively():
    cube = rules.domain_mask("saleh").reshape(256, 256, 256)
    assert np.array_equal(cube, np.broadcast_to(cube[:, :, :1], cube.shape))


def test_saleh_skin_count_closed_form():
    # pairs with 21 <= R-G <= 79, times 256 free blue values
    pairs = sum(256 - d for d in range(21, 80))
    assert build_lut("saleh").skin_count() == pairs * 256


def test_domain_mask_independent_of_block_size():
    a = rules.domain_mask("swift", block=32)
    b = rules.domain_mask("swift", block=7)
    assert np.array_equal(a, b)


@pytest.fixture(scope="module")
def ratio_lut():
    return build_lut("rgb-ratio")


class TestLut:
    def test_examples(self, ratio_lut):
        assert ratio_lut.lookup((150, 100, 50)) is SKIN
        assert build_lut("kovac").lookup((0, 0, 0)) is NON

    def test_layout(self, ratio_lut):
        assert ratio_lut.table.shape == (1 << 21,)
        # (150,100,50) -> bit idx & 7 of byte idx >> 3, little-endian
        idx = 150 * 65536 + 100 * 256 + 50
        assert (ratio_lut.table[idx >> 3] >> (idx & 7)) & 1 == 1

    def test_skin_count_matches_oracle(self, ratio_lut, oracle):
        assert ratio_lut.skin_count() == int(oracle("rgb-ratio").sum())

    def test_lookup_array(self, ratio_lut):
        rng = np.random.default_rng(1)
        px = rng.integers(0, 256, size=(5000, 3), dtype=np.uint8)
        assert np.array_equal(ratio_lut.lookup_array(px), rules.skin_mask("rgb-ratio", px))

    def test_save_load_round_trip(self, ratio_lut, tmp_path):
        path = tmp_path / "ratio.sklut"
        ratio_lut.save(path)
        raw = path.read_bytes()
        assert raw[:8] == b"SKLUT001" and raw[8] == 4 and len(raw) == 9 + (1 << 21)
        back = load_lut(path)
        assert back.rule is RuleKind.RGB_RATIO
        assert np.array_equal(back.table, ratio_lut.table)

    def test_load_rejects_bad_files(self, tmp_path):
        bad = tmp_path / "bad.sklut"
        bad.write_bytes(b"NOTALUT!" + b"\x00" * 10)
        with pytest.raises(FormatError):
            load_lut(bad)
        with pytest.raises(InputError):
            load_lut(tmp_path / "missing.sklut")
        wrong_id = tmp_path / "id.sklut"
        wrong_id.write_bytes(b"SKLUT001" + b"\x09" + b"\x00" * (1 << 21))
        with pytest.raises(FormatError, match="rule id"):
            load_lut(wrong_id)

    def test_immutable(self, ratio_lut):
        with pytest.raises(ValueError):
            ratio_lut.table[0] = 1


def _oracle_ranges(flags: np.ndarray) -> ChannelRanges:
    idx = np.flatnonzero(flags)
    if len(idx) == 0:
        return ChannelRanges()
    r, g, b = idx >> 16, (idx >> 8) & 255, idx & 255
    return ChannelRanges(
        int(r.min()), int(r.max()), int(g.min()), int(g.max()), int(b.min()), int(b.max()), empty=False
    )


@pytest.mark.parametrize("rule", list(RuleKind))
def test_channel_ranges_match_oracle(rule, oracle):
    assert channel_ranges(rule) == _oracle_ranges(oracle(rule))


def test_channel_ranges_published_values():
    k = channel_ranges("kovac")
    assert (k.r_min, k.r_max, k.g_min, k.g_max, k.b_min, k.b_max) == (96, 255, 41, 239, 21, 254)
    s = channel_ranges("saleh")
    assert (s.r_min, s.r_max, s.g_min, s.g_max) == (21, 255, 0, 234)
    assert str(k) == "R:[96,255] G:[41,239] B:[21,254]"


def test_rgb_ratio_blue_extent():
    # frozen from the enumeration oracle; (255,255,255) attains 2B == R+G
    r = channel_ranges("rgb-ratio")
    assert (r.b_min, r.b_max) == (0, 255)


def test_empty_ranges_render():
    assert str(ChannelRanges()) == "empty"
