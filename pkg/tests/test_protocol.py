"""Pairing protocol: wire formats, state machine, end-to-end runs, attacks."""

import json

import numpy as np
import pytest

from sienna.bits import random_bits
from sienna.breathing import belt_observe, radar_observe, sample_profile, synth_displacement
from sienna.channel import ChannelParams, JammingLadder, ladder_levels
from sienna.commitment import commit, hash256, new_salt
from sienna.fingerprint import hamming_similarity
from sienna.protocol import (
    AckNak,
    AttackKnowledge,
    BeltDevice,
    BeltObservation,
    CommitMessage,
    EavesdropperConfig,
    InitMessage,
    PairingScene,
    PipelineConfig,
    PrmsDevice,
    ProtocolError,
    PUBLIC_PARAMETER,
    SessionState,
    SimClock,
    attack,
    begin_commit,
    bootstrap_key,
    conclude,
    decode_message,
    derive_fingerprint,
    encode_message,
    handle_ack,
    initiate,
    observe_scene,
    receive_init,
    run_pairing,
    slot_window,
    transcript_to_jsonl,
    two_subject_scene,
)
CONFIG = PipelineConfig()
CHANNEL = ChannelParams()
LADDER = ladder_levels(p_max=1000.0, p0=1.0)


def single_subject_scene(seed, **overrides):
    profile = sample_profile(seed, drift_std=overrides.pop("drift_std", 0.01))
    return PairingScene(subjects=(profile,), target_index=0, seed=seed, **overrides)


# -- wire format ---------------------------------------------------------------


def test_init_message_round_trip():
    msg = InitMessage(hash256(b"k"), 0, 60_000)
    blob = encode_message(msg)
    assert blob[:4] == b"SNNA" and blob[5] == 0x01
    back = decode_message(blob, CONFIG.rs_spec)
    assert back == msg


def test_commit_message_round_trip():
    rng = np.random.default_rng(0)
    spec = CONFIG.rs_spec
    c = commit(new_salt(spec, 5), random_bits(spec.codeword_bits, rng), spec)
    msg = CommitMessage(2, c)
    back = decode_message(encode_message(msg), spec)
    assert back.level_index == 2
    assert np.array_equal(back.commitment.masked_codeword, c.masked_codeword)
    assert back.commitment.salt_hash == c.salt_hash


def test_acknak_round_trip():
    for verdict in ("ACK", "NAK"):
        msg = AckNak(verdict, 3)
        assert decode_message(encode_message(msg), CONFIG.rs_spec) == msg


def test_wire_rejects_garbage():
    blob = encode_message(AckNak("ACK", 0))
    with pytest.raises(ValueError):
        decode_message(b"XXXX" + blob[4:], CONFIG.rs_spec)
    with pytest.raises(ValueError):
        decode_message(blob[:4] + bytes([99]) + blob[5:], CONFIG.rs_spec)
    with pytest.raises(ValueError):
        decode_message(blob[:-3], CONFIG.rs_spec)


def test_init_message_window_validation():
    with pytest.raises(ValueError):
        InitMessage(hash256(b"k"), 60_000, 60_000)


# -- state machine -------------------------------------------------------------


def test_initiate_round_one_uses_public_parameter():
    state = SessionState(role="a", rs_spec=CONFIG.rs_spec)
    msg = initiate(state, SimClock())
    assert msg.key_hash == hash256(PUBLIC_PARAMETER)
    assert state.phase == "announced"


def test_initiate_round_two_uses_key_hash():
    state = SessionState(role="a", rs_spec=CONFIG.rs_spec, round_index=1)
    state.current_key = hash256(b"prior-key")
    msg = initiate(state, SimClock())
    assert msg.key_hash == hash256(state.current_key)


def test_receive_init_rejects_wrong_lineage():
    state = SessionState(role="b", rs_spec=CONFIG.rs_spec, round_index=1)
    state.current_key = hash256(b"different")
    with pytest.raises(ProtocolError):
        receive_init(state, InitMessage(hash256(b"not-it"), 0, 1000))
    assert state.phase == "failed"


def test_phase_order_enforced():
    state = SessionState(role="a", rs_spec=CONFIG.rs_spec)
    clock = SimClock()
    with pytest.raises(ProtocolError):
        handle_ack(state, AckNak("ACK", 0), 2)  # ack before anything
    initiate(state, clock)
    with pytest.raises(ProtocolError):
        initiate(state, clock)  # double initiate
    begin_commit(state, 0)
    with pytest.raises(ProtocolError):
        begin_commit(state, 1)  # wrong level
    handle_ack(state, AckNak("ACK", 0), 2)
    assert state.phase == "committing"
    begin_commit(state, 1)
    handle_ack(state, AckNak("ACK", 1), 2)
    assert state.phase == "done"


def test_roles_enforced():
    b_state = SessionState(role="b", rs_spec=CONFIG.rs_spec)
    with pytest.raises(ProtocolError):
        initiate(b_state, SimClock())
    a_state = SessionState(role="a", rs_spec=CONFIG.rs_spec)
    with pytest.raises(ProtocolError):
        receive_init(a_state, InitMessage(hash256(PUBLIC_PARAMETER), 0, 1000))


def test_exhaustive_message_permutations_small_ladder():
    """No ordering of acks can reach `done` without the full in-order walk."""
    n_levels = 2
    legal = [("begin", 0), ("ack", 0), ("begin", 1), ("ack", 1)]
    from itertools import permutations

    outcomes = set()
    for perm in permutations(legal):
        state = SessionState(role="a", rs_spec=CONFIG.rs_spec)
        initiate(state, SimClock())
        try:
            for op, level in perm:
                if op == "begin":
                    begin_commit(state, level)
                else:
                    handle_ack(state, AckNak("ACK", level), n_levels)
            outcomes.add(("completed", state.phase))
        except ProtocolError:
            outcomes.add(("rejected", state.phase))
    assert ("completed", "done") in outcomes  # the in-order walk works
    # no permutation may complete with a phase other than done
    assert all(phase == "done" for kind, phase in outcomes if kind == "completed")


def test_conclude_changes_key_only_when_done():
    state = SessionState(role="a", rs_spec=CONFIG.rs_spec)
    salt = new_salt(CONFIG.rs_spec, 9)
    with pytest.raises(ProtocolError):
        conclude(state, salt)
    state.phase = "done"
    old = state.current_key
    new = conclude(state, salt)
    assert new != old and state.round_index == 1


def test_bootstrap_key_is_stable():
    assert bootstrap_key() == hash256(PUBLIC_PARAMETER + b":key0")


def test_slot_window_layout():
    win = (0, 60_000)
    assert slot_window(win, 4, 10.0, 0, 0) == (0, 10_000)
    assert slot_window(win, 4, 10.0, 3, 0) == (30_000, 40_000)
    assert slot_window(win, 4, 10.0, 0, 1) == (40_000, 50_000)  # retry moves on
    assert slot_window(win, 4, 10.0, 1, 1) == (50_000, 60_000)
    assert slot_window(win, 4, 10.0, 2, 1) == (0, 10_000)  # wraps


# -- fingerprints from observations ---------------------------------------------


def test_single_subject_fingerprints_match_across_modalities():
    scene = single_subject_scene(5, belt_noise_std=0.0, radar_phase_noise_std=0.0)
    belt_obs, prms_obs = observe_scene(scene)
    window = (0, 60_000)
    fa = derive_fingerprint(belt_obs, window, CONFIG)[0]
    fbs = derive_fingerprint(prms_obs, window, CONFIG)
    best = max(hamming_similarity(fa, fb) for fb in fbs)
    assert best >= 0.95


def test_two_subject_scene_yields_two_fingerprints_one_match():
    scene = two_subject_scene(8)
    belt_obs, prms_obs = observe_scene(scene)
    window = (0, 60_000)
    fa = derive_fingerprint(belt_obs, window, CONFIG)[0]
    fbs = derive_fingerprint(prms_obs, window, CONFIG)
    assert len(fbs) == 2
    sims = sorted(hamming_similarity(fa, fb) for fb in fbs)
    assert sims[1] >= 0.90  # the target's source
    assert sims[0] <= 0.85  # the bystander's source


def test_derive_fingerprint_empty_window():
    scene = single_subject_scene(2)
    belt_obs, _ = observe_scene(scene)
    with pytest.raises(ValueError):
        derive_fingerprint(belt_obs, (1000, 1000), CONFIG)


# -- end-to-end pairing ---------------------------------------------------------


def test_noiseless_single_subject_single_level_always_succeeds():
    scene = single_subject_scene(
        3, belt_noise_std=0.0, radar_phase_noise_std=0.0, drift_std=0.0
    )
    belt_obs, prms_obs = observe_scene(scene)
    out = run_pairing(
        BeltDevice(belt_obs, CONFIG),
        PrmsDevice(prms_obs, CONFIG),
        CHANNEL,
        JammingLadder((9.0,)),
        np.random.default_rng(0),
        salt_seed=1,
    )
    assert out.success
    assert out.key_a == out.key_b
    assert out.levels[0].stitched_bit_errors == 0


def test_quiet_two_subject_scene_succeeds_with_matching_keys():
    scene = two_subject_scene(11)
    belt_obs, prms_obs = observe_scene(scene)
    out = run_pairing(
        BeltDevice(belt_obs, CONFIG),
        PrmsDevice(prms_obs, CONFIG),
        CHANNEL,
        LADDER,
        np.random.default_rng(4),
        salt_seed=2,
    )
    assert out.success
    assert out.key_a == out.key_b
    assert len(out.sub_salts) == LADDER.count


def test_cross_subject_pairing_fails():
    """Belt on one subject, radar looking only at another: NAK then Failed."""
    target = sample_profile(77, 0.01)
    other = sample_profile(78, 0.01)
    belt_truth = synth_displacement(target, 0, 61, 100.0)
    belt_obs = BeltObservation(belt_observe(belt_truth, noise_std=0.001, seed=1))
    other_truth = synth_displacement(other, 0, 61, 50.0)
    iq = radar_observe(other_truth, phase_noise_std=0.002, seed=2)
    from sienna.protocol import PrmsObservation

    prms_obs = PrmsObservation((iq,))
    config = PipelineConfig(n_sources=1)
    out = run_pairing(
        BeltDevice(belt_obs, config),
        PrmsDevice(prms_obs, config),
        CHANNEL,
        JammingLadder((9.0,)),
        np.random.default_rng(5),
        salt_seed=3,
    )
    assert not out.success
    assert out.failed_level == 0
    assert out.failed_stage == "open"


def test_pairing_transcript_jsonl():
    scene = single_subject_scene(9, belt_noise_std=0.0, radar_phase_noise_std=0.0)
    belt_obs, prms_obs = observe_scene(scene)
    out = run_pairing(
        BeltDevice(belt_obs, CONFIG),
        PrmsDevice(prms_obs, CONFIG),
        CHANNEL,
        JammingLadder((9.0,)),
        np.random.default_rng(6),
        salt_seed=4,
    )
    lines = transcript_to_jsonl(out.transcript).strip().splitlines()
    records = [json.loads(line) for line in lines]
    assert records[0]["type"] == "init" and records[0]["direction"] == "a->b"
    assert any(r["type"] == "commit" for r in records)
    assert any(r["type"] == "acknak" for r in records)
    times = [r["t_ms"] for r in records]
    assert times == sorted(times)


def test_pairing_deterministic_given_seeds():
    scene = two_subject_scene(13)
    belt_obs, prms_obs = observe_scene(scene)
    outs = [
        run_pairing(
            BeltDevice(belt_obs, CONFIG),
            PrmsDevice(prms_obs, CONFIG),
            CHANNEL,
            LADDER,
            np.random.default_rng(42),
            salt_seed=5,
        )
        for _ in range(2)
    ]
    assert outs[0].success == outs[1].success
    assert outs[0].key_a == outs[1].key_a


# -- adversary ------------------------------------------------------------------


def _insider_setup(seed=3):
    scene = two_subject_scene(seed)
    belt_obs, prms_obs = observe_scene(scene)
    a, b = BeltDevice(belt_obs, CONFIG), PrmsDevice(prms_obs, CONFIG)
    true_series = synth_displacement(scene.subjects[0], 0, scene.duration_s, 100.0)
    insider = BeltDevice(BeltObservation(belt_observe(true_series, noise_std=0.0)), CONFIG)
    knowledge = AttackKnowledge(
        "perfect", fingerprint=lambda w: insider.derive_fingerprints(w)[0]
    )
    eve = EavesdropperConfig(p2=CHANNEL.p1, p0=1.0)
    return a, b, knowledge, eve


def test_insider_succeeds_without_jamming():
    a, b, knowledge, eve = _insider_setup()
    out = run_pairing(
        a, b, CHANNEL, JammingLadder((0.0,)), np.random.default_rng(7),
        salt_seed=11, eavesdropper=eve,
    )
    assert out.success
    res = attack(out.taps, out.sub_salts, knowledge, CONFIG.rs_spec,
                 rng=np.random.default_rng(1))
    assert res.salt_recovered


def test_insider_defeated_by_ladder():
    a, b, knowledge, eve = _insider_setup()
    out = run_pairing(
        a, b, CHANNEL, LADDER, np.random.default_rng(8), salt_seed=12, eavesdropper=eve
    )
    assert out.success  # legitimate side is unaffected
    res = attack(out.taps, out.sub_salts, knowledge, CONFIG.rs_spec,
                 rng=np.random.default_rng(2))
    assert not res.salt_recovered
    assert any(not lvl.recovered for lvl in res.per_level)


def test_no_knowledge_attacker_exhausts_budget():
    a, b, _, eve = _insider_setup()
    out = run_pairing(
        a, b, CHANNEL, JammingLadder((0.0,)), np.random.default_rng(9),
        salt_seed=13, eavesdropper=eve,
    )
    res = attack(
        out.taps, out.sub_salts, AttackKnowledge("none"), CONFIG.rs_spec,
        budget=2000, rng=np.random.default_rng(3),
    )
    assert not res.salt_recovered
    assert res.attempts_used >= 2000


def test_distribution_attacker_rejected():
    a, b, _, eve = _insider_setup()
    out = run_pairing(
        a, b, CHANNEL, JammingLadder((0.0,)), np.random.default_rng(10),
        salt_seed=14, eavesdropper=eve,
    )
    rng = np.random.default_rng(4)

    def sampler(i):
        profile = sample_profile(10_000 + i, 0.01)
        series = synth_displacement(profile, 0, 61, 50.0)
        obs = BeltObservation(belt_observe(series, noise_std=0.0, sample_rate=100.0))
        return BeltDevice(obs, CONFIG).derive_fingerprints((0, 10_000))[0]

    res = attack(
        out.taps, out.sub_salts, AttackKnowledge("distribution", sampler=sampler),
        CONFIG.rs_spec, budget=8, rng=rng,
    )
    assert not res.salt_recovered


def test_attack_requires_taps():
    with pytest.raises(ValueError):
        attack([], [], AttackKnowledge("none"), CONFIG.rs_spec)
