"""Simulated neural front-end.

Synthetic feature frames, the linear cursor-velocity decoder, the
logistic click classifier, a noisy phoneme channel standing in for the
speech decoder, gaze sample generation, and the calibration routines
that re-fit decoder parameters. Everything is seeded and reproducible:
identical seed and config give bit-identical streams.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

ARPABET = (
    "AA", "AE", "AH", "AO", "AW", "AY", "B", "CH", "D", "DH", "EH", "ER",
    "EY", "F", "G", "HH", "IH", "IY", "JH", "K", "L", "M", "N", "NG", "OW",
    "OY", "P", "R", "S", "SH", "T", "TH", "UH", "UW", "V", "W", "Y", "Z",
    "ZH",
)

DEFAULT_FEATURE_DIM = 64


class ConfigurationError(Exception):
    """Dimension mismatches and invalid decoder configuration."""


class CalibrationError(Exception):
    """Calibration cannot produce parameters from the given samples."""


class LexiconError(Exception):
    """A word has no pronunciation in the lexicon."""


@dataclass(frozen=True, eq=False)
class NeuralFrame:
    features: np.ndarray
    t_ms: int = 0

    def __post_init__(self) -> None:
        arr = np.asarray(self.features, dtype=float)
        if arr.ndim != 1:
            raise ConfigurationError("features must be a 1-D vector")
        if not np.all(np.isfinite(arr)):
            raise ConfigurationError("features must be finite")
        arr.setflags(write=False)
        object.__setattr__(self, "features", arr)

    @property
    def dim(self) -> int:
        return self.features.shape[0]


@dataclass(frozen=True, eq=False)
class CursorDecoderParams:
    W: np.ndarray  # (2, F) velocity gains, screen-units/s per feature unit
    b: np.ndarray  # (2,) bias

    def __post_init__(self) -> None:
        W = np.asarray(self.W, dtype=float)
        b = np.asarray(self.b, dtype=float)
        if W.ndim != 2 or W.shape[0] != 2:
            raise ConfigurationError("W must have shape (2, F)")
        if b.shape != (2,):
            raise ConfigurationError("b must have shape (2,)")
        if not (np.all(np.isfinite(W)) and np.all(np.isfinite(b))):
            raise ConfigurationError("decoder parameters must be finite")
        W.setflags(write=False)
        b.setflags(write=False)
        object.__setattr__(self, "W", W)
        object.__setattr__(self, "b", b)

    @property
    def dim(self) -> int:
        return self.W.shape[1]


@dataclass(frozen=True, eq=False)
class ClickDecoderParams:
    w: np.ndarray  # (F,)
    c: float = 0.0
    threshold: float = 0.5
    refractory_ms: int = 300

    def __post_init__(self) -> None:
        w = np.asarray(self.w, dtype=float)
        if w.ndim != 1:
            raise ConfigurationError("w must be a vector")
        if not np.all(np.isfinite(w)) or not math.isfinite(self.c):
            raise ConfigurationError("click parameters must be finite")
        if not 0.0 < self.threshold < 1.0:
            raise ConfigurationError("threshold must be in (0, 1)")
        if self.refractory_ms < 0:
            raise ConfigurationError("refractory must be >= 0")
        w.setflags(write=False)
        object.__setattr__(self, "w", w)

    @property
    def dim(self) -> int:
        return self.w.shape[0]


def decode_cursor(frame: NeuralFrame, params: CursorDecoderParams) -> np.ndarray:
    """velocity = W @ features + b, exactly."""
    if frame.dim != params.dim:
        raise ConfigurationError(
            f"feature dim {frame.dim} != decoder dim {params.dim}")
    return params.W @ frame.features + params.b


@dataclass(frozen=True)
class ClickDecision:
    p: float
    fired: bool


def _logistic(score: float) -> float:
    """Numerically stable, clamped into the open interval (0, 1)."""
    if score >= 0:
        p = 1.0 / (1.0 + math.exp(-score))
    else:
        e = math.exp(score)
        p = e / (1.0 + e)
    return min(max(p, 5e-324), math.nextafter(1.0, 0.0))


def decode_click(frame: NeuralFrame, params: ClickDecoderParams,
                 last_click_ms: int | None = None) -> ClickDecision:
    """p = logistic(w.x + c); fires above threshold outside the refractory."""
    if frame.dim != params.dim:
        raise ConfigurationError(
            f"feature dim {frame.dim} != decoder dim {params.dim}")
    score = float(params.w @ frame.features) + params.c
    p = _logistic(score)
    outside_refractory = (last_click_ms is None
                          or frame.t_ms - last_click_ms >= params.refractory_ms)
    return ClickDecision(p=p, fired=p > params.threshold and outside_refractory)


def calibrate_cursor(
    samples: Sequence[tuple[NeuralFrame, Sequence[float]]],
) -> CursorDecoderParams:
    """Ordinary least squares with a bias column over (frame, velocity) pairs."""
    if not samples:
        raise CalibrationError("no calibration samples")
    dim = samples[0][0].dim
    if any(f.dim != dim for f, _ in samples):
        raise CalibrationError("inconsistent feature dimensions")
    if len(samples) < dim + 1:
        raise CalibrationError(
            f"need at least {dim + 1} samples for {dim} features, got {len(samples)}")

    X = np.empty((len(samples), dim + 1))
    Y = np.empty((len(samples), 2))
    for i, (frame, velocity) in enumerate(samples):
        X[i, :dim] = frame.features
        X[i, dim] = 1.0
        Y[i] = np.asarray(velocity, dtype=float)

    if np.linalg.matrix_rank(X) < dim + 1:
        raise CalibrationError("rank-deficient design matrix")

    theta, *_ = np.linalg.lstsq(X, Y, rcond=None)
    return CursorDecoderParams(W=theta[:dim].T.copy(), b=theta[dim].copy())


def calibrate_click(
    samples: Sequence[tuple[NeuralFrame, int]],
    threshold: float = 0.5,
    refractory_ms: int = 300,
    step: float = 0.1,
    grad_tol: float = 1e-8,
    max_iter: int = 10_000,
) -> ClickDecoderParams:
    """Logistic regression by full-batch gradient descent.

    Steps on the mean log-loss gradient until its max-abs entry falls
    below grad_tol or max_iter is reached.
    """
    if not samples:
        raise CalibrationError("no calibration samples")
    labels = {int(label) for _, label in samples}
    if labels != {0, 1}:
        raise CalibrationError("need both click and no-action examples")
    dim = samples[0][0].dim
    if any(f.dim != dim for f, _ in samples):
        raise CalibrationError("inconsistent feature dimensions")

    X = np.empty((len(samples), dim + 1))
    y = np.empty(len(samples))
    for i, (frame, label) in enumerate(samples):
        X[i, :dim] = frame.features
        X[i, dim] = 1.0
        y[i] = float(label)

    theta = np.zeros(dim + 1)
    n = len(samples)
    for _ in range(max_iter):
        z = X @ theta
        p = 1.0 / (1.0 + np.exp(-z))
        grad = X.T @ (p - y) / n
        if np.max(np.abs(grad)) < grad_tol:
            break
        theta -= step * grad

    return ClickDecoderParams(w=theta[:dim].copy(), c=float(theta[dim]),
                              threshold=threshold, refractory_ms=refractory_ms)


@dataclass(frozen=True)
class SpeechChannelConfig:
    """Per-phoneme corruption rates for the simulated speech channel."""

    substitution_rate: float = 0.0
    deletion_rate: float = 0.0
    insertion_rate: float = 0.0
    seed: int = 0

    def __post_init__(self) -> None:
        rates = (self.substitution_rate, self.deletion_rate, self.insertion_rate)
        if any(not 0.0 <= r < 1.0 for r in rates):
            raise ConfigurationError("rates must be in [0, 1)")
        if sum(rates) >= 1.0:
            raise ConfigurationError("rates must sum to < 1")


@dataclass(frozen=True)
class PhonemeEvent:
    kind: str  # "phoneme" | "word_boundary"
    label: str
    t_ms: int


def load_lexicon(path: str | Path) -> dict[str, tuple[str, ...]]:
    """Lexicon file: `word TAB PH PH ...`, lowercase words, ARPAbet phonemes."""
    lexicon: dict[str, tuple[str, ...]] = {}
    with Path(path).open(encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.rstrip("\n")
            if not line:
                continue
            try:
                word, phones = line.split("\t")
            except ValueError as exc:
                raise LexiconError(f"{path}:{lineno}: expected `word TAB phonemes`") from exc
            lexicon[word] = tuple(phones.split())
    return lexicon


def bundled_lexicon_path() -> Path:
    return Path(__file__).parent / "data" / "lexicon.txt"


def bundled_corpus_path() -> Path:
    return Path(__file__).parent / "data" / "corpus.txt"


def bundled_filter_path() -> Path:
    return Path(__file__).parent / "data" / "filter_words.txt"


def synth_speech(
    words: Sequence[str],
    lexicon: Mapping[str, tuple[str, ...]],
    cfg: SpeechChannelConfig,
    start_ms: int = 0,
    phoneme_period_ms: int = 80,
) -> tuple[PhonemeEvent, ...]:
    """Timed phoneme events for an attempted sentence, word boundaries kept.

    Each pronounced phoneme is independently substituted or deleted
    (mutually exclusive draws), and an extra phoneme is inserted after
    it with the configured probability. With all rates zero the output
    is the exact lexicon concatenation. Deterministic for a fixed seed.
    """
    missing = [w for w in words if w not in lexicon]
    if missing:
        raise LexiconError(f"out-of-lexicon words: {missing}")

    rng = np.random.default_rng(cfg.seed)
    events: list[PhonemeEvent] = []
    t = start_ms
    for word in words:
        for phoneme in lexicon[word]:
            u = rng.random()
            if u < cfg.substitution_rate:
                others = [p for p in ARPABET if p != phoneme]
                emitted: str | None = others[int(rng.integers(len(others)))]
            elif u < cfg.substitution_rate + cfg.deletion_rate:
                emitted = None
            else:
                emitted = phoneme
            if emitted is not None:
                events.append(PhonemeEvent("phoneme", emitted, t))
                t += phoneme_period_ms
            if cfg.insertion_rate and rng.random() < cfg.insertion_rate:
                extra = ARPABET[int(rng.integers(len(ARPABET)))]
                events.append(PhonemeEvent("phoneme", extra, t))
                t += phoneme_period_ms
        events.append(PhonemeEvent("word_boundary", word, t))
    return tuple(events)


def segment_phonemes(events: Iterable[PhonemeEvent]) -> list[list[str]]:
    """Split a phoneme-event stream into per-word segments at boundaries."""
    segments: list[list[str]] = []
    current: list[str] = []
    for ev in events:
        if ev.kind == "word_boundary":
            segments.append(current)
            current = []
        else:
            current.append(ev.label)
    if current:
        segments.append(current)
    return segments


@dataclass(frozen=True)
class GazeSample:
    p: tuple[float, float]
    t_ms: int
    valid: bool = True


@dataclass(frozen=True)
class GazePathSegment:
    point: tuple[float, float]
    dwell_ms: float
    valid: bool = True


def gaze_stream(
    path: Sequence[GazePathSegment],
    jitter_sigma: float,
    rate_hz: float,
    seed: int = 0,
    start_ms: int = 0,
    display_size: tuple[int, int] = (1920, 1080),
) -> tuple[GazeSample, ...]:
    """Sampled gaze positions along a dwell path with Gaussian jitter.

    Invalid path segments pass through unmodified (no jitter, valid
    False). With sigma zero the target points are reproduced exactly.
    """
    if jitter_sigma < 0:
        raise ConfigurationError("jitter sigma must be >= 0")
    if rate_hz <= 0:
        raise ConfigurationError("sample rate must be > 0")

    rng = np.random.default_rng(seed)
    period = 1000.0 / rate_hz
    samples: list[GazeSample] = []
    t = float(start_ms)
    w, h = display_size
    for seg in path:
        n = max(1, int(round(seg.dwell_ms / period)))
        for _ in range(n):
            if seg.valid and jitter_sigma > 0:
                dx, dy = rng.normal(0.0, jitter_sigma, 2)
                x = min(max(seg.point[0] + dx, 0.0), float(w))
                y = min(max(seg.point[1] + dy, 0.0), float(h))
            else:
                x, y = seg.point
            samples.append(GazeSample(p=(x, y), t_ms=int(round(t)), valid=seg.valid))
            t += period
    return tuple(samples)


def synth_cursor_frames(
    params: CursorDecoderParams,
    intended_velocities: Sequence[Sequence[float]],
    noise_sigma: float = 0.0,
    seed: int = 0,
    start_ms: int = 0,
    frame_period_ms: int = 20,
) -> list[tuple[NeuralFrame, np.ndarray]]:
    """Feature frames consistent with a ground-truth linear decoder.

    Solves W x = v - b for a minimum-norm x per intended velocity and
    adds Gaussian feature noise; used to drive calibration tests and
    cursor-control simulation.
    """
    rng = np.random.default_rng(seed)
    pinv = np.linalg.pinv(params.W)
    out = []
    t = start_ms
    for v in intended_velocities:
        v = np.asarray(v, dtype=float)
        x = pinv @ (v - params.b)
        if noise_sigma > 0:
            x = x + rng.normal(0.0, noise_sigma, x.shape)
        out.append((NeuralFrame(features=x, t_ms=t), v))
        t += frame_period_ms
    return out
