import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from sscode.channel import complex_noise, substream_rng
from sscode.codebook import build_codebook, manifold
from sscode.decoders import (
    DecoderConfig,
    EmptyVoteError,
    decode,
    decode_geo_reduced_map,
    decode_geometric,
    decode_map,
    decode_modified_geometric,
    decode_window,
    fast_candidate_enumeration,
    quantize_phase,
    scan_candidates,
    select_antennas,
    top_g,
)
from sscode.distance import pair_distance
from sscode.numtheory import ArrayGeometry, bose_chowla_set, gcd_table

GEOM19 = bose_chowla_set(19)
BOOK19 = build_codebook(GEOM19)


def brute_solutions(t, d, n):
    r = math.gcd(d, n)
    return sorted(x for x in range(n) if (x * (d // r)) % (n // r) == t)


def noisy(geom, seed, count, snr_db, phase=False):
    rng = substream_rng(seed, 0)
    var = 10 ** (-snr_db / 10)
    out = []
    for _ in range(count):
        n = int(rng.integers(1, geom.modulus + 1))
        x = cmath.exp(1j * rng.uniform(0, 2 * math.pi)) if phase else 1
        out.append((n, manifold(geom, n) * x + complex_noise(rng, geom.m, var)))
    return out


# -- quantization and congruences ------------------------------------------------

def test_quantize_phase():
    assert quantize_phase(1, 7) == 0
    assert quantize_phase(cmath.exp(2j * math.pi * 5 / 360), 360) == 5
    assert quantize_phase(cmath.exp(2j * math.pi * 359.6 / 360), 360) == 0
    assert quantize_phase(cmath.exp(-2j * math.pi * 2 / 360), 360) == 358
    with pytest.raises(ValueError):
        quantize_phase(0, 10)


def test_enumeration_examples():
    assert fast_candidate_enumeration(5, 1, 360) == [5]
    assert sorted(fast_candidate_enumeration(0, 4, 8)) == [0, 2, 4, 6]
    assert scan_candidates(0, 4, 8) == [0, 2, 4, 6]


def test_enumeration_exhaustive_small():
    for n in range(1, 41):
        for d in range(1, n + 1):
            c = n // math.gcd(d, n)
            for t in range(c):
                expected = brute_solutions(t, d, n)
                assert sorted(fast_candidate_enumeration(t, d, n)) == expected
                assert scan_candidates(t, d, n) == expected


@settings(max_examples=200)
@given(st.integers(2, 5000), st.data())
def test_enumeration_random(n, data):
    d = data.draw(st.integers(1, n - 1))
    c = n // math.gcd(d, n)
    t = data.draw(st.integers(0, c - 1))
    assert sorted(fast_candidate_enumeration(t, d, n)) == brute_solutions(t, d, n)


# -- MAP ---------------------------------------------------------------------------

def test_map_noiseless_any_phase():
    for n in range(1, 361, 7):
        y = manifold(GEOM19, n) * cmath.exp(1j * 0.1 * n)
        assert decode_map(y, BOOK19).estimated_index == n


def test_map_zero_vector_tie_break():
    out = decode_map(np.zeros(19, complex), BOOK19)
    assert out.estimated_index == 1 and out.candidate_count_examined == 360


def test_map_dimension_mismatch():
    with pytest.raises(ValueError):
        decode_map(np.ones(5, complex), BOOK19)


def test_map_is_min_subspace_distance():
    for n, y in noisy(GEOM19, 1, 300, 0.0, phase=True):
        yhat = y / np.linalg.norm(y)
        dist = [pair_distance(yhat, BOOK19.word(i)) for i in range(1, 361)]
        assert decode_map(y, BOOK19).estimated_index == int(np.argmin(dist)) + 1


# -- window ------------------------------------------------------------------------

def test_window_degenerate_sizes():
    for _, y in noisy(GEOM19, 2, 200, -2.0, phase=True):
        ref = decode_map(y, BOOK19).estimated_index
        assert decode_window(y, BOOK19, 1).estimated_index == ref
        assert decode_window(y, BOOK19, 360).estimated_index == ref


def test_window_work_count():
    y = manifold(GEOM19, 100)
    for z in (1, 2, 3, 5, 7, 360):
        out = decode_window(y, BOOK19, z)
        last = 360 % z or z
        expected = math.ceil(360 / z) + (z if out.auxiliary["window"] <= 360 // z else last)
        assert out.candidate_count_examined == expected
    assert decode_window(y, BOOK19, 2).candidate_count_examined == 182


def test_window_non_divisor_last_window():
    # y aligned with the 3-word tail window
    y = BOOK19.window_words(7)[-1]
    out = decode_window(y, BOOK19, 7)
    assert out.auxiliary["window"] == 52 and out.candidate_count_examined == 52 + 3
    assert 358 <= out.estimated_index <= 360


@pytest.mark.parametrize("z", [2, 3, 5])
def test_window_noiseless_m19(z):
    for n in range(1, 361):
        assert decode_window(manifold(GEOM19, n), BOOK19, z).estimated_index == n


def test_window_small_code_can_miss_noiselessly():
    # with M = 5 the neighbouring-codeword correlations add up in the wrong window
    geom = bose_chowla_set(5)
    book = build_codebook(geom)
    out = decode_window(manifold(geom, 1), book, 2)
    assert out.estimated_index != 1


def test_phase_invariance():
    rng = np.random.default_rng(5)
    for _, y in noisy(GEOM19, 3, 200, -3.0):
        rot = y * cmath.exp(1j * rng.uniform(0, 2 * math.pi))
        assert decode_map(rot, BOOK19).estimated_index == decode_map(y, BOOK19).estimated_index
        assert decode_window(rot, BOOK19, 3).estimated_index == decode_window(y, BOOK19, 3).estimated_index


# -- geometric family --------------------------------------------------------------

def test_geometric_single_antenna():
    geom = ArrayGeometry((1,), 8)
    y = np.array([cmath.exp(2j * math.pi * 3 / 8)])
    # root index 3 is grid index 3 + N/2 + 1 = 8
    assert decode_geometric(y, geom).estimated_index == 8
    assert manifold(geom, 8)[0] == pytest.approx(y[0])


def test_geometric_noiseless_unit_gcd_antennas():
    subset = tuple(i + 1 for i, r in enumerate(gcd_table(GEOM19)) if r == 1)
    assert len(subset) == 6
    for n in range(1, 361):
        out = decode_geometric(manifold(GEOM19, n), GEOM19, antenna_subset=subset)
        assert out.estimated_index == n and out.auxiliary["top_votes"] == len(subset)


def test_true_index_among_candidates():
    n_mod = GEOM19.modulus
    for n in range(1, n_mod + 1):
        h = manifold(GEOM19, n)
        for a, d in enumerate(GEOM19.positions):
            r = math.gcd(d, n_mod)
            t = quantize_phase(h[a] * (-1) ** d, n_mod // r)
            cands = fast_candidate_enumeration(t, d, n_mod)
            assert len(cands) == r and n - 1 in cands


@pytest.mark.parametrize("m", [5, 7, 11, 13, 19])
def test_geometric_family_noiseless(m):
    geom = bose_chowla_set(m)
    book = build_codebook(geom)
    k = (m - 1) // 2
    for n in range(1, geom.modulus + 1):
        h = manifold(geom, n)
        assert decode_geometric(h, geom).estimated_index == n
        assert decode_modified_geometric(h, geom, k).estimated_index == n
        assert decode_geo_reduced_map(h, geom, book, k, geom.modulus // 2).estimated_index == n


def test_modified_k0_is_geometric():
    for _, y in noisy(GEOM19, 4, 300, 5.0):
        assert decode_modified_geometric(y, GEOM19, 0).estimated_index == decode_geometric(y, GEOM19).estimated_index


def test_modified_saturated_window():
    # every antenna votes every residue once: all counts tie, smallest index wins
    out = decode_modified_geometric(manifold(GEOM19, 200), GEOM19, 180)
    assert out.estimated_index == 1
    assert out.auxiliary["distinct_voted"] == 360 and out.auxiliary["top_votes"] == 19


def test_scan_enumeration_matches_closed_form():
    for _, y in noisy(GEOM19, 5, 100, 3.0):
        for k in (0, 2, 9):
            a = decode_modified_geometric(y, GEOM19, k)
            b = decode_modified_geometric(y, GEOM19, k, enumeration="scan")
            assert a.estimated_index == b.estimated_index and a.candidate_count_examined == b.candidate_count_examined


def test_grmap_degenerate_shortlists():
    for _, y in noisy(GEOM19, 6, 300, 5.0):
        assert decode_geo_reduced_map(y, GEOM19, BOOK19, 9, 1).estimated_index == \
            decode_modified_geometric(y, GEOM19, 9).estimated_index
        assert decode_geo_reduced_map(y, GEOM19, BOOK19, 9, 360).estimated_index == \
            decode_map(y, BOOK19).estimated_index


def test_grmap_work_count_and_bounds():
    y = manifold(GEOM19, 9)
    for g in (1, 7, 180, 360):
        assert decode_geo_reduced_map(y, GEOM19, BOOK19, 9, g).candidate_count_examined == g
    with pytest.raises(ValueError):
        decode_geo_reduced_map(y, GEOM19, BOOK19, 9, 0)
    with pytest.raises(ValueError):
        decode_geo_reduced_map(y, GEOM19, BOOK19, 9, 361)


def test_top_g_padding():
    counts = np.array([0, 3, 0, 3, 1, 0])
    np.testing.assert_array_equal(top_g(counts, 2), [1, 3])
    np.testing.assert_array_equal(top_g(counts, 5), [1, 3, 4, 0, 2])


def test_zero_entries_abstain():
    y = manifold(GEOM19, 42).copy()
    y[:5] = 0
    assert decode_geometric(y, GEOM19).estimated_index == 42
    with pytest.raises(EmptyVoteError):
        decode_geometric(np.zeros(19, complex), GEOM19)


def test_select_antennas():
    subset = select_antennas(GEOM19, 8)
    r = gcd_table(GEOM19)
    chosen = sorted(r[i - 1] for i in subset)
    assert chosen == sorted(r)[:8]
    with pytest.raises(ValueError):
        select_antennas(GEOM19, 0)


def test_decoder_config_validation():
    with pytest.raises(ValueError):
        DecoderConfig("nope")
    with pytest.raises(ValueError):
        DecoderConfig("window", z=0)
    with pytest.raises(ValueError):
        DecoderConfig("modified-geometric", k=-1)
    with pytest.raises(ValueError):
        DecoderConfig("geo-reduced-map", g=0)
    with pytest.raises(ValueError):
        DecoderConfig("geometric", antenna_subset=())
    assert DecoderConfig("geo-reduced-map").shortlist_size(360) == 180


def test_dispatch():
    y = manifold(GEOM19, 77)
    for cfg in (DecoderConfig("map"), DecoderConfig("window", z=3), DecoderConfig("geometric"),
                DecoderConfig("modified-geometric", k=9), DecoderConfig("geo-reduced-map", k=9),
                DecoderConfig("geometric", antenna_subset=select_antennas(GEOM19, 10))):
        assert decode(y, cfg, BOOK19).estimated_index == 77
