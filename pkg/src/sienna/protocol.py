"""Key-evolution pairing protocol between a belt-fed phone (a) and a radar (b).

One round: ``a`` announces an observation window, both devices turn their
breathing observations into folded fingerprints, and ``a`` commits one
sub-salt per jamming-ladder level against its fingerprint. Each commitment
payload ``{masked codeword, salt digest}`` crosses the simulated channel as
duplicated QAM symbols while ``b`` jams one copy of every pair at that
level's power, stitches its own clean view, and opens the commitment with
its best candidate fingerprint. After every level is acknowledged both
sides XOR the sub-salts into the evolution salt and derive the next key.

The device observations and channel are simulated, the cryptography and
message formats are real, and every step is deterministic per seed.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Callable, Literal, Sequence

import numpy as np
from scipy.stats import skew

from .bits import Sha256Drbg, as_bits, bits_from_bytes, bits_to_bytes, random_bits
from .breathing import (
    DisplacementSeries,
    RadarIQ,
    SubjectProfile,
    belt_observe,
    linear_demodulate,
    radar_observe,
    sample_profile,
    synth_displacement,
)
from .channel import (
    ChannelParams,
    DialogFrame,
    JammingLadder,
    QamSpec,
    dup_and_jam,
    eavesdrop,
    noise_power_for_snr,
    qam_demodulate,
    qam_modulate,
    receiver_stitch,
)
from .commitment import (
    Commitment,
    commit,
    hash256,
    kdf,
    new_salt,
    open_commitment,
    salt_digest,
    serialize_commitment,
    deserialize_commitment,
    xor_fold,
)
from .fingerprint import QuantizerBank, default_bank, extract, normalize_series, segment_pad
from .ica import jade_separate, lowpass_filter
from .rs import RsCodeSpec, standard_code

__all__ = [
    "AckNak",
    "AttackKnowledge",
    "AttackResult",
    "BeltDevice",
    "CommitMessage",
    "EavesdropperConfig",
    "EavesdropTap",
    "InitMessage",
    "PairingOutcome",
    "PairingScene",
    "PipelineConfig",
    "PrmsDevice",
    "ProtocolError",
    "PUBLIC_PARAMETER",
    "SessionState",
    "SimClock",
    "attack",
    "begin_commit",
    "bootstrap_key",
    "conclude",
    "decode_message",
    "derive_fingerprint",
    "encode_message",
    "handle_ack",
    "initiate",
    "observe_scene",
    "prepare_series",
    "receive_init",
    "run_pairing",
    "slot_window",
    "transcript_to_jsonl",
    "two_subject_scene",
]

WIRE_MAGIC = b"SNNA"
WIRE_VERSION = 1
MSG_INIT, MSG_COMMIT, MSG_ACKNAK = 0x01, 0x02, 0x03

# Known to every party; the first-round announcement carries its hash in
# place of a key hash, and the first-round prior key derives from it.
PUBLIC_PARAMETER = b"SIENNA-V1-BOOTSTRAP"


def announce_parameter_hash() -> bytes:
    return hash256(PUBLIC_PARAMETER)


def bootstrap_key() -> bytes:
    return hash256(PUBLIC_PARAMETER + b":key0")


class ProtocolError(Exception):
    """A message arrived in a phase where it is not allowed."""


@dataclass
class SimClock:
    """Simulated wall clock in milliseconds; no real-time dependencies."""

    now_ms: int = 0

    def advance(self, ms: int) -> int:
        self.now_ms += ms
        return self.now_ms


# -- messages and wire format -------------------------------------------------


@dataclass(frozen=True)
class InitMessage:
    key_hash: bytes
    t_str: int  # ms on the simulation clock
    t_end: int

    def __post_init__(self):
        if len(self.key_hash) != 32:
            raise ValueError("key hash must be 32 bytes")
        if self.t_end <= self.t_str:
            raise ValueError("observation window must have positive length")


@dataclass(frozen=True)
class CommitMessage:
    level_index: int
    commitment: Commitment


@dataclass(frozen=True)
class AckNak:
    verdict: Literal["ACK", "NAK"]
    level_index: int


def _field(data: bytes) -> bytes:
    return len(data).to_bytes(4, "big") + data


def encode_message(msg: InitMessage | CommitMessage | AckNak) -> bytes:
    """SNNA wire form: magic, version, type, u32-length-prefixed fields."""
    if isinstance(msg, InitMessage):
        body = (
            _field(msg.key_hash)
            + _field(msg.t_str.to_bytes(8, "big"))
            + _field(msg.t_end.to_bytes(8, "big"))
        )
        mtype = MSG_INIT
    elif isinstance(msg, CommitMessage):
        body = _field(msg.level_index.to_bytes(4, "big")) + _field(
            serialize_commitment(msg.commitment)
        )
        mtype = MSG_COMMIT
    elif isinstance(msg, AckNak):
        body = _field(b"\x01" if msg.verdict == "ACK" else b"\x00") + _field(
            msg.level_index.to_bytes(4, "big")
        )
        mtype = MSG_ACKNAK
    else:
        raise TypeError(f"not a protocol message: {type(msg)!r}")
    return WIRE_MAGIC + bytes([WIRE_VERSION, mtype]) + body


def _split_fields(body: bytes) -> list[bytes]:
    fields, pos = [], 0
    while pos < len(body):
        if pos + 4 > len(body):
            raise ValueError("truncated field length")
        n = int.from_bytes(body[pos : pos + 4], "big")
        pos += 4
        if pos + n > len(body):
            raise ValueError("truncated field body")
        fields.append(body[pos : pos + n])
        pos += n
    return fields


def decode_message(data: bytes, rs_spec: RsCodeSpec) -> InitMessage | CommitMessage | AckNak:
    if data[:4] != WIRE_MAGIC:
        raise ValueError("bad message magic")
    if data[4] != WIRE_VERSION:
        raise ValueError(f"unsupported message version {data[4]}")
    mtype, fields = data[5], _split_fields(data[6:])
    if mtype == MSG_INIT:
        key_hash, t_str, t_end = fields
        return InitMessage(key_hash, int.from_bytes(t_str, "big"), int.from_bytes(t_end, "big"))
    if mtype == MSG_COMMIT:
        level, blob = fields
        return CommitMessage(int.from_bytes(level, "big"), deserialize_commitment(blob, rs_spec))
    if mtype == MSG_ACKNAK:
        verdict, level = fields
        return AckNak("ACK" if verdict == b"\x01" else "NAK", int.from_bytes(level, "big"))
    raise ValueError(f"unknown message type 0x{mtype:02x}")


# -- session state machine ----------------------------------------------------

Phase = Literal["idle", "announced", "committing", "await-ack", "done", "failed"]


@dataclass
class SessionState:
    """Per-device key-evolution state. The key changes only on ``done``."""

    role: Literal["a", "b"]
    rs_spec: RsCodeSpec
    current_key: bytes = field(default_factory=bootstrap_key)
    window_ms: tuple[int, int] = (0, 60_000)
    round_index: int = 0
    phase: Phase = "idle"
    level: int = 0
    pending: list = field(default_factory=list)

    def announce_hash(self) -> bytes:
        if self.round_index == 0:
            return announce_parameter_hash()
        return hash256(self.current_key)

    def _require(self, *phases: Phase):
        if self.phase not in phases:
            raise ProtocolError(f"{self.role}: illegal transition from phase {self.phase!r}")

    def fail(self, stage: str):
        self.phase = "failed"
        self.fail_stage = stage


def initiate(state: SessionState, clock: SimClock) -> InitMessage:
    """Device a announces the observation window (and key lineage)."""
    if state.role != "a":
        raise ProtocolError("only device a initiates")
    state._require("idle")
    msg = InitMessage(state.announce_hash(), state.window_ms[0], state.window_ms[1])
    state.phase = "announced"
    clock.advance(1)
    return msg


def receive_init(state: SessionState, msg: InitMessage) -> None:
    """Device b validates the announcement against its own key lineage."""
    if state.role != "b":
        raise ProtocolError("only device b receives the announcement")
    state._require("idle")
    if msg.key_hash != state.announce_hash():
        state.fail("announce-key-mismatch")
        raise ProtocolError("announced key hash does not match this device's lineage")
    state.window_ms = (msg.t_str, msg.t_end)
    state.phase = "announced"


def begin_commit(state: SessionState, level: int) -> None:
    state._require("announced", "committing")
    if level != state.level:
        raise ProtocolError(f"commit level {level} out of order (expected {state.level})")
    state.phase = "await-ack"


def handle_ack(state: SessionState, msg: AckNak, n_levels: int) -> None:
    state._require("await-ack")
    if msg.level_index != state.level:
        raise ProtocolError("acknowledgement for the wrong level")
    if msg.verdict == "ACK":
        state.level += 1
        state.phase = "done" if state.level >= n_levels else "committing"
    else:
        state.phase = "committing"  # caller decides retry vs. fail


def conclude(state: SessionState, salt_bits: np.ndarray) -> bytes:
    state._require("done")
    state.current_key = kdf(state.current_key, salt_bits)
    state.round_index += 1
    return state.current_key


# -- fingerprint pipelines ----------------------------------------------------


@dataclass(frozen=True)
class PipelineConfig:
    """Shared fingerprinting parameters both devices must agree on."""

    bank: QuantizerBank = field(default_factory=default_bank)
    rs_spec: RsCodeSpec = field(default_factory=standard_code)
    n_sources: int = 2
    lowpass_hz: float = 10.0
    # Each ladder level commits against its own slot of the announced
    # window; 10 s of 10 Hz quantization is 2020 bits, one padded codeword.
    commit_slot_s: float = 10.0
    # Model-order selection: mixture eigenvalues below this fraction of the
    # leading one are treated as distortion/noise, not extra subjects.
    source_rank_rel: float = 0.02


def _orient(series: DisplacementSeries) -> DisplacementSeries:
    """Fix the sign ambiguity by the breathing waveform's skewness.

    Fast inhales and slow exhales leave positively skewed displacement, so
    orienting every modality to positive skew makes belt and separated
    radar views comparable regardless of sensor polarity or ICA sign.
    """
    s = skew(series.samples)
    if s < 0:
        return DisplacementSeries(-series.samples, series.sample_rate, series.t_start)
    return series


def _window_fingerprint(
    series: DisplacementSeries, window_ms: tuple[int, int], config: PipelineConfig
) -> np.ndarray:
    """Quantize one already-normalized series over a window and fold."""
    t_str, t_end = window_ms[0] / 1000.0, window_ms[1] / 1000.0
    fp = extract(series, t_str, t_end, config.bank)
    segments = segment_pad(fp.bits, config.rs_spec.codeword_bits)
    return xor_fold(segments)


@dataclass(frozen=True)
class BeltObservation:
    series: DisplacementSeries


@dataclass(frozen=True)
class PrmsObservation:
    iq_channels: tuple[RadarIQ, ...]
    low_confidence: bool = False


def prepare_series(
    observation: BeltObservation | PrmsObservation, config: PipelineConfig
) -> list[DisplacementSeries]:
    """Low-pass, demodulate/separate, normalize, and orient one observation.

    Returns the candidate breathing series this device can quantize: one
    for the belt, one per separated source for the radar (in separation
    confidence order). Normalization and orientation happen once over the
    whole observation so every sub-window is quantized consistently.
    """
    if isinstance(observation, BeltObservation):
        series = observation.series
        filtered = DisplacementSeries(
            lowpass_filter(series.samples, series.sample_rate, config.lowpass_hz),
            series.sample_rate,
            series.t_start,
        )
        return [_orient(normalize_series(filtered))]

    rate = observation.iq_channels[0].sample_rate
    t_start = observation.iq_channels[0].t_start
    mixture = np.stack([linear_demodulate(iq) for iq in observation.iq_channels])
    mixture = lowpass_filter(mixture, rate, config.lowpass_hz)
    centered = mixture - mixture.mean(axis=1, keepdims=True)
    eigvals = np.linalg.eigvalsh(centered @ centered.T / centered.shape[1])[::-1]
    effective = int(np.sum(eigvals > config.source_rank_rel * eigvals[0]))
    n_sources = max(1, min(config.n_sources, mixture.shape[0], effective))
    separation = jade_separate(mixture, n_sources)
    return [
        _orient(normalize_series(DisplacementSeries(row, rate, t_start)))
        for row in separation.sources
    ]


def derive_fingerprint(
    observation: BeltObservation | PrmsObservation,
    window_ms: tuple[int, int],
    config: PipelineConfig,
) -> list[np.ndarray]:
    """Folded fingerprint(s) over a window: one for the belt, one per
    separated source for the radar."""
    if window_ms[1] <= window_ms[0]:
        raise ValueError("empty observation window")
    return [
        _window_fingerprint(series, window_ms, config)
        for series in prepare_series(observation, config)
    ]


class _Device:
    """Shared caching: observations are processed once per announced window."""

    def __init__(self, observation, config: PipelineConfig):
        self.observation = observation
        self.config = config
        self._prepared: list[DisplacementSeries] | None = None

    def prepared_series(self) -> list[DisplacementSeries]:
        if self._prepared is None:
            self._prepared = prepare_series(self.observation, self.config)
        return self._prepared

    def derive_fingerprints(self, window_ms: tuple[int, int]) -> list[np.ndarray]:
        if window_ms[1] <= window_ms[0]:
            raise ValueError("empty observation window")
        return [
            _window_fingerprint(series, window_ms, self.config)
            for series in self.prepared_series()
        ]


class BeltDevice(_Device):
    """Device a: phone plus respiratory belt (one fingerprint)."""


class PrmsDevice(_Device):
    """Device b: radar unit; candidates are the separated subjects.

    Finite-sample ICA leaves a little of each bystander in the separated
    target, so beyond the raw sources the device also offers fingerprints
    of leakage-corrected recombinations ``s_i - mu * s_j`` for a small grid
    of ``mu``. Opening attempts walk the candidates most-plausible-first;
    the commitment digest decides, so extra candidates cost retries at
    worst, never a wrong key.
    """

    leakage_grid: tuple[float, ...] = (-0.08, -0.05, -0.02, 0.02, 0.05, 0.08)

    def derive_fingerprints(self, window_ms: tuple[int, int]) -> list[np.ndarray]:
        if window_ms[1] <= window_ms[0]:
            raise ValueError("empty observation window")
        sources = self.prepared_series()
        candidates = list(sources)
        for i, primary in enumerate(sources):
            for j, other in enumerate(sources):
                if i == j:
                    continue
                for mu in self.leakage_grid:
                    corrected = DisplacementSeries(
                        primary.samples - mu * other.samples,
                        primary.sample_rate,
                        primary.t_start,
                    )
                    candidates.append(_orient(normalize_series(corrected)))
        return [
            _window_fingerprint(series, window_ms, self.config) for series in candidates
        ]


def slot_window(
    window_ms: tuple[int, int], n_levels: int, slot_s: float, level: int, attempt: int
) -> tuple[int, int]:
    """Commitment sub-window for one (level, attempt) pair.

    Successive levels take successive slots of the announced window; a
    reattempt of a level moves on by ``n_levels`` slots so it re-measures
    a different stretch of breathing. Wraps around when the ladder and
    retries need more slots than the window holds.
    """
    slot_ms = int(round(slot_s * 1000))
    total = window_ms[1] - window_ms[0]
    n_slots = max(1, total // slot_ms)
    slot = (level + attempt * n_levels) % n_slots
    t0 = window_ms[0] + slot * slot_ms
    return (t0, min(t0 + slot_ms, window_ms[1]))


# -- scene harness ------------------------------------------------------------


@dataclass(frozen=True)
class PairingScene:
    """Everything needed to simulate one pairing attempt's observations."""

    subjects: tuple[SubjectProfile, ...]
    target_index: int = 0
    radar_mixing: np.ndarray = None  # (n_channels, n_subjects), path gains
    belt_gain: float = 1.0
    belt_noise_std: float = 0.002  # cm
    radar_phase_noise_std: float = 0.004  # rad
    wavelength_cm: float = 1.07
    duration_s: float = 61.0
    radar_rate_hz: float = 50.0
    belt_rate_hz: float = 100.0
    seed: int = 0

    def __post_init__(self):
        mixing = self.radar_mixing
        if mixing is None:
            mixing = _default_radar_mixing(len(self.subjects), self.seed)
        object.__setattr__(self, "radar_mixing", np.asarray(mixing, dtype=np.float64))
        if self.radar_mixing.shape[1] != len(self.subjects):
            raise ValueError("radar mixing needs one column per subject")
        if not 0 <= self.target_index < len(self.subjects):
            raise ValueError("target index out of range")


def _default_radar_mixing(n_subjects: int, seed: int) -> np.ndarray:
    """Path gains keeping each channel's phase arc within the linear regime."""
    rng = np.random.default_rng(seed ^ 0x5CE9E)
    n_channels = max(2, n_subjects)
    base = 0.10 * np.eye(n_channels)[:, :n_subjects]
    cross = rng.uniform(0.02, 0.05, size=(n_channels, n_subjects))
    return base + cross


def two_subject_scene(seed: int, drift_std: float = 0.01, **overrides) -> PairingScene:
    """Default noisy two-person scene; the belt wearer is subject 0.

    The bystander is redrawn until the breathing rates differ by at least
    1.2 breaths/min: near-identical rates leave the two sources mutually
    coherent over a one-minute window and no fourth-order method can
    separate them (nor could the radar hope to tell the people apart).
    """
    rng = np.random.default_rng(seed)
    target = sample_profile(int(rng.integers(1 << 31)), drift_std)
    other = sample_profile(int(rng.integers(1 << 31)), drift_std)
    while abs(other.resp_rate - target.resp_rate) < 1.2:
        other = sample_profile(int(rng.integers(1 << 31)), drift_std)
    return PairingScene(subjects=(target, other), target_index=0, seed=seed, **overrides)


def observe_scene(scene: PairingScene) -> tuple[BeltObservation, PrmsObservation]:
    """Belt view of the target subject and the radar's view of everyone."""
    rng = np.random.default_rng(scene.seed)
    sources = [
        synth_displacement(p, 0.0, scene.duration_s, scene.radar_rate_hz)
        for p in scene.subjects
    ]
    target_hi = synth_displacement(
        scene.subjects[scene.target_index], 0.0, scene.duration_s, scene.belt_rate_hz
    )
    belt = belt_observe(
        target_hi,
        gain=scene.belt_gain,
        noise_std=scene.belt_noise_std,
        sample_rate=scene.belt_rate_hz,
        seed=int(rng.integers(1 << 31)),
    )

    source_matrix = np.stack([s.samples for s in sources])
    iqs = []
    for m in range(scene.radar_mixing.shape[0]):
        mixed = scene.radar_mixing[m] @ source_matrix
        series = DisplacementSeries(mixed, scene.radar_rate_hz, 0.0)
        iqs.append(
            radar_observe(
                series,
                wavelength=scene.wavelength_cm,
                theta0=float(rng.uniform(0, 2 * np.pi)),
                phase_noise_std=scene.radar_phase_noise_std,
                seed=int(rng.integers(1 << 31)),
            )
        )
    return BeltObservation(belt), PrmsObservation(tuple(iqs))


# -- pairing run --------------------------------------------------------------


@dataclass(frozen=True)
class EavesdropperConfig:
    """Insider tap: its own signal power, thermal floor, and pick strategy."""

    p2: float
    p0: float = 1.0
    strategy: str = "random-pick"


@dataclass(frozen=True)
class EavesdropTap:
    level_index: int
    retry: int
    window_ms: tuple[int, int]
    frame: DialogFrame
    jam_power: float
    truth_bits: np.ndarray


@dataclass
class LevelRecord:
    level_index: int
    jam_power: float
    retries: int
    verdict: str
    stitched_bit_errors: int
    candidate_used: int | None


@dataclass
class PairingOutcome:
    success: bool
    key_a: bytes | None
    key_b: bytes | None
    evolution_salt: np.ndarray | None
    transcript: list[dict]
    levels: list[LevelRecord]
    failed_level: int | None = None
    failed_stage: str | None = None
    taps: list[EavesdropTap] = field(default_factory=list)
    sub_salts: list[np.ndarray] = field(default_factory=list)


def _payload_bits(commitment: Commitment) -> np.ndarray:
    return np.concatenate(
        [commitment.masked_codeword, bits_from_bytes(commitment.salt_hash)]
    )


def _payload_to_commitment(bits: np.ndarray, spec: RsCodeSpec) -> Commitment:
    mask = bits[: spec.codeword_bits]
    digest = bits_to_bytes(bits[spec.codeword_bits : spec.codeword_bits + 256])
    return Commitment(masked_codeword=mask, salt_hash=digest, spec=spec)


def run_pairing(
    device_a: BeltDevice,
    device_b: PrmsDevice,
    channel: ChannelParams,
    ladder: JammingLadder,
    rng: np.random.Generator,
    *,
    qam: QamSpec = QamSpec(4),
    clock: SimClock | None = None,
    retry_budget: int = 3,
    salt_seed: int | None = None,
    eavesdropper: EavesdropperConfig | None = None,
) -> PairingOutcome:
    """Execute one full key-evolution round over the simulated channel."""
    clock = clock or SimClock()
    config = device_a.config
    rs_spec = config.rs_spec
    state_a = SessionState(role="a", rs_spec=rs_spec)
    state_b = SessionState(role="b", rs_spec=rs_spec)
    transcript: list[dict] = []
    taps: list[EavesdropTap] = []

    def log(direction: str, mtype: str, **extra):
        transcript.append(
            {"t_ms": clock.now_ms, "direction": direction, "type": mtype, **extra}
        )

    init = initiate(state_a, clock)
    log("a->b", "init", t_str=init.t_str, t_end=init.t_end, key_hash=init.key_hash.hex())
    receive_init(state_b, init)

    drbg = Sha256Drbg(salt_seed if salt_seed is not None else int(rng.integers(1 << 62)))
    sub_salts: list[np.ndarray] = [None] * ladder.count
    noise_main = noise_power_for_snr(channel.snr_main, qam)
    noise_tap = (
        noise_power_for_snr(eavesdropper.p2 / eavesdropper.p0, qam) if eavesdropper else 0.0
    )

    levels: list[LevelRecord] = []
    recovered_salts: list[np.ndarray] = []
    for level_idx, jam_level in enumerate(ladder.levels):
        begin_commit(state_a, level_idx)

        verdict = "NAK"
        outcome_salt = None
        candidate_used = None
        stitched_errors = 0
        attempt = 0
        while attempt <= retry_budget:
            clock.advance(10)
            # Every (re)attempt binds a fresh sub-salt to a fresh slot of
            # the announced window; b derives its candidates for the same
            # slot, and re-randomizes its jam mask per transmission.
            window = slot_window(
                state_a.window_ms, ladder.count, config.commit_slot_s, level_idx, attempt
            )
            fp_a = device_a.derive_fingerprints(window)[0]
            sub_salts[level_idx] = new_salt(rs_spec, drbg)
            commitment = commit(sub_salts[level_idx], fp_a, rs_spec)
            payload = _payload_bits(commitment)
            symbols = qam_modulate(payload, qam)
            mask = random_bits(symbols.size, rng)
            frame_b = dup_and_jam(
                symbols, mask, jam_level / channel.p1, rng, noise_power=noise_main
            )
            if eavesdropper is not None:
                frame_e = dup_and_jam(
                    symbols,
                    mask,
                    jam_level / eavesdropper.p2,
                    rng,
                    noise_power=noise_tap,
                )
                taps.append(
                    EavesdropTap(
                        level_index=level_idx,
                        retry=attempt,
                        window_ms=window,
                        frame=frame_e,
                        jam_power=jam_level,
                        truth_bits=payload,
                    )
                )
            log("a->b", "commit", level=level_idx, retry=attempt, bits=int(payload.size))

            stitched = receiver_stitch(frame_b, mask)
            rx_payload = qam_demodulate(stitched, qam, n_bits=payload.size)
            stitched_errors = int(np.sum(rx_payload != payload))
            rx_commitment = _payload_to_commitment(rx_payload, rs_spec)
            for cand_idx, fp_candidate in enumerate(device_b.derive_fingerprints(window)):
                opened = open_commitment(rx_commitment, fp_candidate, rs_spec)
                if opened.recovered:
                    outcome_salt = opened.salt
                    candidate_used = cand_idx
                    break
            verdict = "ACK" if outcome_salt is not None else "NAK"
            clock.advance(5)
            log("b->a", "acknak", level=level_idx, verdict=verdict)
            ack = AckNak(verdict, level_idx)
            if verdict == "ACK":
                handle_ack(state_a, ack, ladder.count)
                break
            attempt += 1
            if attempt > retry_budget:
                handle_ack(state_a, ack, ladder.count)

        levels.append(
            LevelRecord(
                level_index=level_idx,
                jam_power=jam_level,
                retries=attempt,
                verdict=verdict,
                stitched_bit_errors=stitched_errors,
                candidate_used=candidate_used,
            )
        )
        if verdict != "ACK":
            state_a.fail("commitment-rejected")
            state_b.fail("commitment-rejected")
            return PairingOutcome(
                success=False,
                key_a=None,
                key_b=None,
                evolution_salt=None,
                transcript=transcript,
                levels=levels,
                failed_level=level_idx,
                failed_stage="open",
                taps=taps,
                sub_salts=[s for s in sub_salts if s is not None],
            )
        recovered_salts.append(outcome_salt)

    evolution_salt = xor_fold(sub_salts)
    state_b.phase = "done"
    key_a = conclude(state_a, evolution_salt)
    key_b = conclude(state_b, xor_fold(recovered_salts))
    log("a<->b", "kdf", round=state_a.round_index)
    return PairingOutcome(
        success=key_a == key_b,
        key_a=key_a,
        key_b=key_b,
        evolution_salt=evolution_salt,
        transcript=transcript,
        levels=levels,
        taps=taps,
        sub_salts=list(sub_salts),
    )


def transcript_to_jsonl(transcript: Sequence[dict]) -> str:
    return "\n".join(json.dumps(entry, sort_keys=True) for entry in transcript) + "\n"


# -- adversary harness --------------------------------------------------------


@dataclass(frozen=True)
class AttackKnowledge:
    """What the attacker knows about the opening fingerprint.

    ``none``: nothing. ``distribution``: a generative sampler of plausible
    fingerprints. ``perfect``: the insider measures their own breathing,
    so it can produce the exact fingerprint for any commitment window;
    supply either one array (reused everywhere) or a callable mapping a
    window in ms to the fingerprint bits.
    """

    kind: Literal["none", "distribution", "perfect"]
    fingerprint: np.ndarray | Callable[[tuple[int, int]], np.ndarray] | None = None
    sampler: Callable[[int], np.ndarray] | None = None

    def fingerprint_for(self, tap: "EavesdropTap") -> np.ndarray:
        if self.fingerprint is None:
            raise ValueError("perfect knowledge requires the fingerprint(s)")
        if callable(self.fingerprint):
            return self.fingerprint(tap.window_ms)
        return self.fingerprint


@dataclass(frozen=True)
class LevelAttackOutcome:
    level_index: int
    recovered: bool
    ber: float


@dataclass(frozen=True)
class AttackResult:
    salt_recovered: bool
    observed_ber: float
    attempts_used: int
    per_level: tuple[LevelAttackOutcome, ...]


def attack(
    taps: Sequence[EavesdropTap],
    true_sub_salts: Sequence[np.ndarray],
    knowledge: AttackKnowledge,
    rs_spec: RsCodeSpec,
    *,
    qam: QamSpec = QamSpec(4),
    strategy: str = "random-pick",
    budget: int = 1000,
    rng: np.random.Generator | None = None,
) -> AttackResult:
    """Process eavesdropped frames and try to recover the evolution salt.

    Success requires every sub-salt: a single undecodable level destroys
    the XOR-folded evolution salt. ``observed_ber`` is measured against the
    transmitted payload ground truth.
    """
    rng = rng or np.random.default_rng(0)
    if not taps:
        raise ValueError("attack needs at least one eavesdropped frame")
    codec = rs_spec.codec()
    n_levels = max(t.level_index for t in taps) + 1
    attempts_used = 0

    # Only the final transmission of each level carries the sub-salt that
    # survives into the evolution salt; earlier attempts were discarded by
    # the protocol but still contribute to the observed BER statistics.
    final_tap: dict[int, EavesdropTap] = {}
    for tap in taps:
        prev = final_tap.get(tap.level_index)
        if prev is None or tap.retry > prev.retry:
            final_tap[tap.level_index] = tap

    bers = []
    per_level = []
    for level_idx in range(n_levels):
        tap = final_tap[level_idx]
        estimates = eavesdrop(tap.frame, strategy, rng)
        rx_bits = qam_demodulate(estimates, qam, n_bits=tap.truth_bits.size)
        ber = float(np.mean(rx_bits != tap.truth_bits))
        bers.append(ber)
        rx_mask = rx_bits[: rs_spec.codeword_bits]
        true_salt = as_bits(true_sub_salts[level_idx])
        recovered = False

        if knowledge.kind == "perfect":
            attempts_used += 1
            noisy = np.bitwise_xor(rx_mask, as_bits(knowledge.fingerprint_for(tap)))
            message = codec.decode(codec.bits_to_symbols(noisy))
            if message is not None:
                recovered = np.array_equal(codec.symbols_to_bits(message), true_salt)
        elif knowledge.kind == "distribution":
            true_digest = salt_digest(true_salt)
            for _ in range(max(1, budget // n_levels)):
                attempts_used += 1
                noisy = np.bitwise_xor(rx_mask, as_bits(knowledge.sampler(attempts_used)))
                message = codec.decode(codec.bits_to_symbols(noisy))
                if message is not None and salt_digest(codec.symbols_to_bits(message)) == true_digest:
                    recovered = True
                    break
        else:  # no knowledge: brute-force salts against the digest
            true_digest = salt_digest(true_salt)
            drbg = Sha256Drbg(int(rng.integers(1 << 62)))
            for _ in range(max(1, budget // n_levels)):
                attempts_used += 1
                if salt_digest(drbg.bits(rs_spec.message_bits)) == true_digest:
                    recovered = True
                    break
        per_level.append(LevelAttackOutcome(level_idx, recovered, ber))

    all_recovered = all(lvl.recovered for lvl in per_level)
    return AttackResult(
        salt_recovered=all_recovered,
        observed_ber=float(np.mean(bers)) if bers else 1.0,
        attempts_used=attempts_used,
        per_level=tuple(per_level),
    )
