"""Level-crossing quantizer and fingerprint plumbing."""

import numpy as np
import pytest

from sienna.breathing import (
    DisplacementSeries,
    SubjectProfile,
    arctan_demodulate,
    belt_observe,
    radar_observe,
    synth_displacement,
)
from sienna.fingerprint import (
    NORMALIZED_STD,
    FingerprintBits,
    QuantizerBank,
    default_bank,
    extract,
    hamming_similarity,
    normalize_series,
    qtz,
    segment_pad,
)


def test_qtz_piecewise_definition():
    assert qtz(0.7, 0.5, -0.5) == (1, 0)
    assert qtz(-0.6, 0.5, -0.5) == (0, 1)
    assert qtz(0.0, 0.5, -0.5) == (0, 0)
    # boundaries are inclusive
    assert qtz(0.5, 0.5, -0.5) == (1, 0)
    assert qtz(-0.5, 0.5, -0.5) == (0, 1)
    with pytest.raises(ValueError):
        qtz(0.0, -0.5, 0.5)


def test_code_11_never_emitted():
    rng = np.random.default_rng(0)
    series = DisplacementSeries(rng.normal(0, 0.3, size=601), 10.0)
    fp = extract(series, 0.0, 60.0, default_bank())
    pairs = fp.bits.reshape(-1, 2)
    assert not np.any((pairs[:, 0] == 1) & (pairs[:, 1] == 1))


def test_extract_single_branch_example():
    series = DisplacementSeries(np.array([0.7, 0.0, -0.6]), 10.0)
    bank = QuantizerBank(levels=((0.5, -0.5),), sample_interval=0.1)
    fp = extract(series, 0.0, 0.2, bank)
    assert list(fp.bits) == [1, 0, 0, 0, 0, 1]


def test_extract_zero_signal_all_zero():
    series = DisplacementSeries(np.zeros(601), 10.0)
    fp = extract(series, 0.0, 60.0, default_bank())
    assert not fp.bits.any()
    assert fp.bits.size == 10 * 2 * 601


def test_extract_bit_count_default_bank():
    profile = SubjectProfile(resp_amp=0.5, seed=1)
    series = synth_displacement(profile, 0, 61, 10)
    fp = extract(series, 0.0, 60.0, default_bank())
    assert fp.samples_per_branch == 601
    assert fp.bits.size == 10 * 2 * 601


def test_extract_window_outside_series():
    series = DisplacementSeries(np.zeros(100), 10.0)
    with pytest.raises(ValueError):
        extract(series, 5.0, 20.0, default_bank())


def test_extract_branch_major_order():
    series = DisplacementSeries(np.array([0.3, -0.3]), 10.0)
    bank = QuantizerBank(levels=((0.2, -0.2), (0.4, -0.4)), sample_interval=0.1)
    fp = extract(series, 0.0, 0.1, bank)
    # branch 0: 10 01 ; branch 1: 00 00
    assert list(fp.bits) == [1, 0, 0, 1, 0, 0, 0, 0]
    assert np.array_equal(fp.branch_codes(0), [[1, 0], [0, 1]])


def test_scale_covariance():
    rng = np.random.default_rng(2)
    series = DisplacementSeries(rng.normal(0, 0.2, size=201), 10.0)
    bank = default_bank()
    scaled_bank = QuantizerBank(
        levels=tuple((3 * a, 3 * b) for a, b in bank.levels), sample_interval=0.1
    )
    scaled_series = DisplacementSeries(series.samples * 3, 10.0)
    fp1 = extract(series, 0, 20, bank)
    fp2 = extract(scaled_series, 0, 20, scaled_bank)
    assert np.array_equal(fp1.bits, fp2.bits)


def test_bank_validation():
    with pytest.raises(ValueError):
        QuantizerBank(levels=())
    with pytest.raises(ValueError):
        QuantizerBank(levels=((0.1, 0.2),))
    with pytest.raises(ValueError):
        QuantizerBank(levels=((0.2, -0.2), (0.1, -0.4)))
    with pytest.raises(ValueError):
        QuantizerBank(levels=((0.1, -0.1),), sample_interval=0)
    assert default_bank().count == 10
    assert default_bank().levels[0] == (0.05, -0.05)
    assert default_bank().levels[-1] == (0.5, -0.5)


def test_segment_pad_examples():
    rng = np.random.default_rng(3)
    bits = rng.integers(0, 2, size=2040, dtype=np.uint8)
    segs = segment_pad(bits, 2040)
    assert len(segs) == 1 and np.array_equal(segs[0], bits)

    bits = rng.integers(0, 2, size=2041, dtype=np.uint8)
    segs = segment_pad(bits, 2040)
    assert len(segs) == 2
    assert segs[1][0] == bits[2040]
    assert not segs[1][1:].any()

    bits = rng.integers(0, 2, size=4080, dtype=np.uint8)
    segs = segment_pad(bits, 2040)
    assert len(segs) == 2 and np.array_equal(np.concatenate(segs), bits)

    with pytest.raises(ValueError):
        segment_pad(np.array([], dtype=np.uint8), 2040)
    with pytest.raises(ValueError):
        segment_pad(bits, 0)


def test_segment_concat_reproduces_input():
    rng = np.random.default_rng(4)
    bits = rng.integers(0, 2, size=5000, dtype=np.uint8)
    segs = segment_pad(bits, 2040)
    assert np.array_equal(np.concatenate(segs)[:5000], bits)


def test_hamming_similarity_examples():
    a = np.array([1, 0, 1, 0], dtype=np.uint8)
    assert hamming_similarity(a, a) == 1.0
    assert hamming_similarity(a, 1 - a) == 0.0
    assert hamming_similarity(a, np.array([1, 0, 0, 1], dtype=np.uint8)) == 0.5
    with pytest.raises(ValueError):
        hamming_similarity(a, a[:3])


def test_normalize_series():
    rng = np.random.default_rng(5)
    series = DisplacementSeries(rng.normal(3.0, 2.0, size=1000), 10.0)
    norm = normalize_series(series)
    assert norm.samples.mean() == pytest.approx(0.0, abs=1e-12)
    assert norm.samples.std() == pytest.approx(NORMALIZED_STD, rel=1e-9)
    with pytest.raises(ValueError):
        normalize_series(DisplacementSeries(np.ones(10), 10.0))


def test_cross_modality_same_subject_similarity():
    """Belt and noiseless demodulated radar views of one subject agree."""
    profile = SubjectProfile(resp_amp=0.45, heart_amp=0.03, seed=11)
    truth = synth_displacement(profile, 0, 61, 100)
    belt = normalize_series(belt_observe(truth, gain=1.7, noise_std=0.0))
    radar_truth = synth_displacement(profile, 0, 61, 10)
    radar = normalize_series(arctan_demodulate(radar_observe(radar_truth)))
    bank = default_bank()
    fp_belt = extract(belt, 0, 60, bank)
    fp_radar = extract(radar, 0, 60, bank)
    assert hamming_similarity(fp_belt.bits, fp_radar.bits) >= 0.95


def test_fingerprint_csv_dump():
    series = DisplacementSeries(np.array([0.7, 0.0, -0.6]), 10.0)
    bank = QuantizerBank(levels=((0.5, -0.5),), sample_interval=0.1)
    csv = extract(series, 0.0, 0.2, bank).to_csv()
    lines = csv.strip().splitlines()
    assert lines[0] == "branch,sample_index,code"
    assert lines[1] == "0,0,10"
    assert lines[3] == "0,2,01"


def test_fingerprint_bits_validation():
    with pytest.raises(ValueError):
        FingerprintBits(np.zeros(5, dtype=np.uint8), 1, 3, (0, 1))
