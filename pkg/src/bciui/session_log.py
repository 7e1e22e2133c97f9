"""Append-only session event log and usage analytics.

The log is newline-delimited JSON, one event per line, flushed per
event. Privacy mode drops every event except the privacy-span
boundaries themselves, so a persisted log never contains content from
inside a privacy span.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Any, IO, Iterable, Sequence


class LogError(Exception):
    """Raised when an event cannot be appended (e.g. time regression)."""


class AnalysisError(Exception):
    """Raised by compute_stats on a malformed log; names the bad event."""


class LogKind(str, Enum):
    STATE_ENTER = "StateEnter"
    STATE_EXIT = "StateExit"
    SENTENCE_FINALIZED = "SentenceFinalized"
    RATING_GIVEN = "RatingGiven"
    EDIT_APPLIED = "EditApplied"
    MODALITY_SWITCH = "ModalitySwitch"
    HOST_CONTROL_SPAN = "HostControlSpan"
    PRIVACY_SPAN = "PrivacySpan"


@dataclass(frozen=True)
class LogEvent:
    t_ms: int
    kind: LogKind
    payload: dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> dict[str, Any]:
        return {"t": self.t_ms, "kind": self.kind.value, "payload": self.payload}

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "LogEvent":
        return cls(t_ms=int(data["t"]), kind=LogKind(data["kind"]),
                   payload=dict(data.get("payload", {})))


class SessionLog:
    """Single-writer append-only log. Pass a path to persist as NDJSON."""

    def __init__(self, path: str | Path | None = None):
        self._events: list[LogEvent] = []
        self._last_t: int | None = None
        self._fh: IO[str] | None = None
        self.path = Path(path) if path is not None else None
        if self.path is not None:
            self.path.parent.mkdir(parents=True, exist_ok=True)
            self._fh = self.path.open("a", encoding="utf-8")

    @property
    def events(self) -> tuple[LogEvent, ...]:
        return tuple(self._events)

    def record(self, event: LogEvent, privacy_active: bool) -> bool:
        """Append `event` unless privacy is active; returns True if appended.

        Privacy-span boundary events are always appended (span existence
        is loggable, contents are not). Raises LogError if the event's
        timestamp precedes the last appended one.
        """
        if self._last_t is not None and event.t_ms < self._last_t:
            raise LogError(
                f"time regression: {event.t_ms} < {self._last_t} ({event.kind.value})"
            )
        if privacy_active and event.kind is not LogKind.PRIVACY_SPAN:
            return False
        self._events.append(event)
        self._last_t = event.t_ms
        if self._fh is not None:
            self._fh.write(json.dumps(event.to_dict(), sort_keys=True) + "\n")
            self._fh.flush()
        return True

    def close(self) -> None:
        if self._fh is not None:
            self._fh.close()
            self._fh = None

    def __enter__(self) -> "SessionLog":
        return self

    def __exit__(self, *exc: object) -> None:
        self.close()


def read_log(path: str | Path) -> list[LogEvent]:
    events = []
    with Path(path).open(encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                events.append(LogEvent.from_dict(json.loads(line)))
    return events


@dataclass(frozen=True)
class SessionStats:
    """Usage metrics derived from one session log.

    A "successfully corrected" sentence is one rated Correct after the
    corrections screen was entered. Correction times are the summed
    durations inside the sentence- and word-correction screens per
    episode. A corrected sentence is attributed to the "typed" editing
    feature if any TypeWord edit occurred during its episode, otherwise
    to "alternatives" (replace / add / delete / refresh or candidate
    choice).
    """

    total_use_ms: int = 0
    active_state_ms: int = 0
    host_control_ms: int = 0
    host_neural_cursor_fraction: float = 0.0
    host_neural_cursor_fraction_active: float = 0.0
    ui_modality_ms: dict[str, int] = field(default_factory=dict)
    sentences_total: int = 0
    sentences_corrected: int = 0
    sentences_successfully_corrected: int = 0
    word_level_share: float = 0.0
    sentence_level_share: float = 0.0
    mean_correction_time_ms: dict[str, float] = field(default_factory=dict)
    fully_correct_rate: dict[str, float] = field(default_factory=dict)
    mean_sentence_length: dict[str, float] = field(default_factory=dict)
    edit_counts: dict[str, int] = field(default_factory=dict)

    def to_dict(self) -> dict[str, Any]:
        return {
            "total_use_ms": self.total_use_ms,
            "active_state_ms": self.active_state_ms,
            "host_control_ms": self.host_control_ms,
            "host_neural_cursor_fraction": self.host_neural_cursor_fraction,
            "host_neural_cursor_fraction_active": self.host_neural_cursor_fraction_active,
            "ui_modality_ms": dict(self.ui_modality_ms),
            "sentences_total": self.sentences_total,
            "sentences_corrected": self.sentences_corrected,
            "sentences_successfully_corrected": self.sentences_successfully_corrected,
            "word_level_share": self.word_level_share,
            "sentence_level_share": self.sentence_level_share,
            "mean_correction_time_ms": dict(self.mean_correction_time_ms),
            "fully_correct_rate": dict(self.fully_correct_rate),
            "mean_sentence_length": dict(self.mean_sentence_length),
            "edit_counts": dict(self.edit_counts),
        }


_CORRECTION_TAGS = {"SentenceCorrection", "WordCorrection"}
_ALT_EDIT_KINDS = {"ReplaceWithCandidate", "DeleteWord", "AddWordBefore",
                   "AddWordAfter", "Refresh", "ChooseCandidateSentence"}


@dataclass
class _Episode:
    entered_corrections: bool = False
    word_level: bool = False
    correction_ms: int = 0
    used_type_word: bool = False
    used_alternatives: bool = False
    rating: str | None = None
    final_length: int | None = None


def compute_stats(events: Sequence[LogEvent]) -> SessionStats:
    """Derive SessionStats from a well-nested event log.

    Raises AnalysisError naming the first offending event when state
    enter/exit pairing or span pairing is broken.
    """
    if not events:
        return SessionStats()

    open_tag: str | None = None
    open_t = 0
    active_ms = 0
    state_ms: dict[str, int] = {}

    ui_source = "Gaze"
    ui_since: int | None = None
    ui_ms: dict[str, int] = {}

    host_open_t: int | None = None
    host_source: str | None = None
    host_ms = 0
    host_neural_ms = 0

    privacy_open = False

    episodes: list[_Episode] = []
    current: _Episode | None = None
    edit_counts: dict[str, int] = {}

    def close_state(t: int) -> None:
        nonlocal active_ms, open_tag
        if open_tag is None:
            return
        dur = t - open_t
        active_ms += dur
        state_ms[open_tag] = state_ms.get(open_tag, 0) + dur
        if current is not None and open_tag in _CORRECTION_TAGS:
            current.correction_ms += dur
        open_tag = None

    for i, ev in enumerate(events):
        kind = ev.kind
        if kind is LogKind.STATE_ENTER:
            if open_tag is not None:
                raise AnalysisError(f"event {i}: StateEnter({ev.payload.get('tag')}) "
                                    f"while {open_tag} still open")
            open_tag = str(ev.payload.get("tag"))
            open_t = ev.t_ms
            if ui_since is None:
                ui_since = ev.t_ms
            if open_tag == "Speaking" and current is None:
                current = _Episode()
            if current is not None:
                if open_tag == "SentenceCorrection":
                    current.entered_corrections = True
                elif open_tag == "WordCorrection":
                    current.word_level = True
        elif kind is LogKind.STATE_EXIT:
            tag = str(ev.payload.get("tag"))
            if open_tag is None or tag != open_tag:
                raise AnalysisError(f"event {i}: StateExit({tag}) does not match "
                                    f"open state {open_tag}")
            close_state(ev.t_ms)
        elif kind is LogKind.EDIT_APPLIED:
            edit_kind = str(ev.payload.get("edit"))
            edit_counts[edit_kind] = edit_counts.get(edit_kind, 0) + 1
            if current is not None:
                if edit_kind == "TypeWord":
                    current.used_type_word = True
                elif edit_kind in _ALT_EDIT_KINDS:
                    current.used_alternatives = True
        elif kind is LogKind.SENTENCE_FINALIZED:
            words = ev.payload.get("words", [])
            if current is not None:
                current.final_length = len(words)
            else:
                # Typed/keyboard sentences finalize without a Speaking episode.
                episodes.append(_Episode(final_length=len(words)))
        elif kind is LogKind.RATING_GIVEN:
            if current is not None:
                current.rating = str(ev.payload.get("rating"))
                episodes.append(current)
                current = None
        elif kind is LogKind.MODALITY_SWITCH:
            channel = ev.payload.get("channel")
            if channel == "ui":
                if ui_since is not None:
                    ui_ms[ui_source] = ui_ms.get(ui_source, 0) + (ev.t_ms - ui_since)
                ui_source = str(ev.payload.get("source"))
                ui_since = ev.t_ms
        elif kind is LogKind.HOST_CONTROL_SPAN:
            phase = ev.payload.get("phase")
            if phase == "begin":
                if host_open_t is not None:
                    raise AnalysisError(f"event {i}: nested HostControlSpan begin")
                host_open_t = ev.t_ms
                host_source = str(ev.payload.get("source"))
            else:
                if host_open_t is None:
                    raise AnalysisError(f"event {i}: HostControlSpan end without begin")
                dur = ev.t_ms - host_open_t
                host_ms += dur
                if host_source == "NeuralCursor":
                    host_neural_ms += dur
                host_open_t = None
        elif kind is LogKind.PRIVACY_SPAN:
            phase = ev.payload.get("phase")
            if phase == "begin":
                if privacy_open:
                    raise AnalysisError(f"event {i}: nested PrivacySpan begin")
                privacy_open = True
            else:
                if not privacy_open:
                    raise AnalysisError(f"event {i}: PrivacySpan end without begin")
                privacy_open = False

    last_t = events[-1].t_ms
    close_state(last_t)
    if current is not None:
        episodes.append(current)
    if ui_since is not None:
        ui_ms[ui_source] = ui_ms.get(ui_source, 0) + (last_t - ui_since)
    if host_open_t is not None:
        dur = last_t - host_open_t
        host_ms += dur
        if host_source == "NeuralCursor":
            host_neural_ms += dur

    total_ms = last_t - events[0].t_ms

    rated = [e for e in episodes if e.rating is not None]
    corrected = [e for e in rated if e.entered_corrections]
    successful = [e for e in corrected if e.rating == "Correct"]
    word_succ = [e for e in successful if e.word_level]
    word_all = [e for e in corrected if e.word_level]
    sent_all = [e for e in corrected if not e.word_level]

    def mean(values: Iterable[float]) -> float:
        values = list(values)
        return sum(values) / len(values) if values else 0.0

    def rate_correct(group: list[_Episode]) -> float:
        if not group:
            return 0.0
        return sum(1 for e in group if e.rating == "Correct") / len(group)

    typed_group = [e for e in corrected if e.used_type_word]
    alt_group = [e for e in corrected if e.used_alternatives and not e.used_type_word]

    return SessionStats(
        total_use_ms=total_ms,
        active_state_ms=active_ms,
        host_control_ms=host_ms,
        host_neural_cursor_fraction=(host_neural_ms / total_ms) if total_ms else 0.0,
        host_neural_cursor_fraction_active=(host_neural_ms / active_ms) if active_ms else 0.0,
        ui_modality_ms=ui_ms,
        sentences_total=len(episodes),
        sentences_corrected=len(corrected),
        sentences_successfully_corrected=len(successful),
        word_level_share=(len(word_succ) / len(successful)) if successful else 0.0,
        sentence_level_share=((len(successful) - len(word_succ)) / len(successful))
        if successful else 0.0,
        mean_correction_time_ms={
            "word_level": mean(e.correction_ms for e in word_all),
            "sentence_level": mean(e.correction_ms for e in sent_all),
            "overall": mean(e.correction_ms for e in corrected),
        },
        fully_correct_rate={
            "typed": rate_correct(typed_group),
            "alternatives": rate_correct(alt_group),
        },
        mean_sentence_length={
            "word_level": mean(e.final_length for e in word_all if e.final_length is not None),
            "sentence_level": mean(e.final_length for e in sent_all if e.final_length is not None),
        },
        edit_counts=edit_counts,
    )
