"""Single-event-loop finite state machine for the communication UI.

`dispatch` is a pure reducer: (state, event, context) in, (state,
context, effects) out. Effects are descriptions only; executing them
(logging, broadcasting, host injection, audio) is the caller's job, so
the FSM itself performs no I/O. Unknown (state, event) pairs leave the
state unchanged with no effects; malformed payloads raise
RejectedEventError and leave the state unchanged.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from enum import Enum
from typing import Any, Callable, Mapping, Sequence

from .correction_engine import (
    CandidateSet,
    CorrectionError,
    DecodedSentence,
    SentenceOrigin,
    WordEdit,
    WordEditKind,
    apply_edit,
    filter_text,
)
from .interaction import ControlRouting, HostAction, LayoutError, PointerSample, PointerSource
from .session_log import LogEvent, LogKind

SPEAKING_TIMEOUT_MS = 6000
HISTORY_CAPACITY = 5

Segments = tuple[tuple[str, ...], ...]
CandidateProvider = Callable[[DecodedSentence, Segments], CandidateSet]
AlternativesProvider = Callable[[DecodedSentence, int, frozenset[str]], CandidateSet]


class RejectedEventError(Exception):
    """A malformed or out-of-order event; the FSM state is unchanged."""

    def __init__(self, event: "UiEvent", reason: str):
        super().__init__(f"{event.kind.value}: {reason}")
        self.event = event
        self.reason = reason


class Tag(str, Enum):
    IDLE = "Idle"
    SPEAKING = "Speaking"
    SENTENCE_RATING = "SentenceRating"
    SENTENCE_CORRECTION = "SentenceCorrection"
    WORD_CORRECTION = "WordCorrection"
    MENU = "Menu"
    SPEECH_MENU = "SpeechMenu"
    CURSOR_MENU = "CursorMenu"
    HISTORY = "History"
    ON_SCREEN_KEYBOARD = "OnScreenKeyboard"
    SPEECH_CALIBRATION = "SpeechCalibration"
    CURSOR_CALIBRATION = "CursorCalibration"
    GAZE_CALIBRATION = "GazeCalibration"
    HOST_CONTROL_PANEL = "HostControlPanel"


class Rating(str, Enum):
    CORRECT = "Correct"
    ONE_WORD_WRONG = "OneWordWrong"
    MOSTLY_CORRECT = "MostlyCorrect"
    INCORRECT = "Incorrect"


RATING_ORDER = (Rating.CORRECT, Rating.ONE_WORD_WRONG,
                Rating.MOSTLY_CORRECT, Rating.INCORRECT)


class UiEventKind(str, Enum):
    SPEECH_DETECTED = "SpeechDetected"
    PARTIAL_WORDS = "PartialWords"
    DONE_PRESSED = "DonePressed"
    TIMEOUT_ELAPSED = "TimeoutElapsed"
    RATING_SELECTED = "RatingSelected"
    MAKE_CORRECTIONS_PRESSED = "MakeCorrectionsPressed"
    CANDIDATE_SENTENCE_CHOSEN = "CandidateSentenceChosen"
    WORD_SELECTED = "WordSelected"
    WORD_EDIT = "WordEdit"
    CORRECTIONS_DONE = "CorrectionsDone"
    BUTTON_PRESSED = "ButtonPressed"
    POINTER_SAMPLE = "PointerSample"
    CLIENT_CONNECTED = "ClientConnected"
    PRIVACY_TOGGLED = "PrivacyToggled"
    HORN_PRESSED = "HornPressed"


@dataclass(frozen=True)
class UiEvent:
    kind: UiEventKind
    timestamp_ms: int
    words: tuple[str, ...] | None = None
    segments: Segments | None = None
    rating: Rating | None = None
    index: int | None = None
    edit: WordEdit | None = None
    button_id: str | None = None
    flag: bool | None = None
    sample: PointerSample | None = None
    client_id: str | None = None

    @classmethod
    def speech_detected(cls, t: int) -> "UiEvent":
        return cls(UiEventKind.SPEECH_DETECTED, t)

    @classmethod
    def partial_words(cls, t: int, words: Sequence[str],
                      segments: Sequence[Sequence[str]] = ()) -> "UiEvent":
        return cls(UiEventKind.PARTIAL_WORDS, t, words=tuple(words),
                   segments=tuple(tuple(s) for s in segments))

    @classmethod
    def done_pressed(cls, t: int) -> "UiEvent":
        return cls(UiEventKind.DONE_PRESSED, t)

    @classmethod
    def timeout_elapsed(cls, t: int) -> "UiEvent":
        return cls(UiEventKind.TIMEOUT_ELAPSED, t)

    @classmethod
    def rating_selected(cls, t: int, rating: Rating) -> "UiEvent":
        return cls(UiEventKind.RATING_SELECTED, t, rating=rating)

    @classmethod
    def make_corrections(cls, t: int) -> "UiEvent":
        return cls(UiEventKind.MAKE_CORRECTIONS_PRESSED, t)

    @classmethod
    def candidate_chosen(cls, t: int, index: int) -> "UiEvent":
        return cls(UiEventKind.CANDIDATE_SENTENCE_CHOSEN, t, index=index)

    @classmethod
    def word_selected(cls, t: int, index: int) -> "UiEvent":
        return cls(UiEventKind.WORD_SELECTED, t, index=index)

    @classmethod
    def word_edit(cls, t: int, edit: WordEdit) -> "UiEvent":
        return cls(UiEventKind.WORD_EDIT, t, edit=edit)

    @classmethod
    def corrections_done(cls, t: int) -> "UiEvent":
        return cls(UiEventKind.CORRECTIONS_DONE, t)

    @classmethod
    def button_pressed(cls, t: int, button_id: str) -> "UiEvent":
        return cls(UiEventKind.BUTTON_PRESSED, t, button_id=button_id)

    @classmethod
    def pointer_sample(cls, t: int, sample: PointerSample) -> "UiEvent":
        return cls(UiEventKind.POINTER_SAMPLE, t, sample=sample)

    @classmethod
    def client_connected(cls, t: int, client_id: str) -> "UiEvent":
        return cls(UiEventKind.CLIENT_CONNECTED, t, client_id=client_id)

    @classmethod
    def privacy_toggled(cls, t: int, flag: bool) -> "UiEvent":
        return cls(UiEventKind.PRIVACY_TOGGLED, t, flag=flag)

    @classmethod
    def horn_pressed(cls, t: int) -> "UiEvent":
        return cls(UiEventKind.HORN_PRESSED, t)

    def to_dict(self) -> dict[str, Any]:
        out: dict[str, Any] = {"kind": self.kind.value, "t": self.timestamp_ms}
        if self.words is not None:
            out["words"] = list(self.words)
        if self.segments is not None:
            out["segments"] = [list(s) for s in self.segments]
        if self.rating is not None:
            out["rating"] = self.rating.value
        if self.index is not None:
            out["index"] = self.index
        if self.edit is not None:
            out["edit"] = self.edit.to_dict()
        if self.button_id is not None:
            out["button_id"] = self.button_id
        if self.flag is not None:
            out["flag"] = self.flag
        if self.sample is not None:
            out["sample"] = self.sample.to_dict()
        if self.client_id is not None:
            out["client_id"] = self.client_id
        return out

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "UiEvent":
        return cls(
            kind=UiEventKind(data["kind"]),
            timestamp_ms=int(data["t"]),
            words=tuple(data["words"]) if "words" in data else None,
            segments=tuple(tuple(s) for s in data["segments"])
            if "segments" in data else None,
            rating=Rating(data["rating"]) if "rating" in data else None,
            index=int(data["index"]) if "index" in data else None,
            edit=WordEdit.from_dict(data["edit"]) if "edit" in data else None,
            button_id=data.get("button_id"),
            flag=bool(data["flag"]) if "flag" in data else None,
            sample=PointerSample.from_dict(data["sample"]) if "sample" in data else None,
            client_id=data.get("client_id"),
        )


# Button ids that are aliases for semantic events.
_RATING_BUTTONS = {
    "rate_correct": Rating.CORRECT,
    "rate_one_word_wrong": Rating.ONE_WORD_WRONG,
    "rate_mostly_correct": Rating.MOSTLY_CORRECT,
    "rate_incorrect": Rating.INCORRECT,
}


def normalize_event(event: UiEvent) -> UiEvent:
    """Map semantic button presses onto their dedicated event kinds."""
    if event.kind is not UiEventKind.BUTTON_PRESSED or event.button_id is None:
        return event
    bid = event.button_id
    t = event.timestamp_ms
    if bid == "done":
        return UiEvent.done_pressed(t)
    if bid == "make_corrections":
        return UiEvent.make_corrections(t)
    if bid == "corrections_done":
        return UiEvent.corrections_done(t)
    if bid == "horn":
        return UiEvent.horn_pressed(t)
    if bid in _RATING_BUTTONS:
        return UiEvent.rating_selected(t, _RATING_BUTTONS[bid])
    if bid.startswith("candidate_") and bid[10:].isdigit():
        return UiEvent.candidate_chosen(t, int(bid[10:]))
    if bid.startswith("word_") and bid[5:].isdigit():
        return UiEvent.word_selected(t, int(bid[5:]))
    return event


class EffectKind(str, Enum):
    PLAY_TTS = "PlayTts"
    TYPE_TO_HOST = "TypeToHost"
    HOST_POINTER = "HostPointer"
    SOUND_EFFECT = "SoundEffect"
    HORN = "Horn"
    BROADCAST_SNAPSHOT = "BroadcastSnapshot"
    LOG_APPEND = "LogAppend"
    START_CALIBRATION = "StartCalibration"


@dataclass(frozen=True)
class Effect:
    kind: EffectKind
    text: str | None = None
    action: HostAction | None = None
    name: str | None = None
    log_event: LogEvent | None = None
    modality: str | None = None

    @classmethod
    def play_tts(cls, text: str) -> "Effect":
        return cls(EffectKind.PLAY_TTS, text=text)

    @classmethod
    def type_to_host(cls, text: str) -> "Effect":
        return cls(EffectKind.TYPE_TO_HOST, text=text)

    @classmethod
    def host_pointer(cls, action: HostAction) -> "Effect":
        return cls(EffectKind.HOST_POINTER, action=action)

    @classmethod
    def sound(cls, name: str) -> "Effect":
        return cls(EffectKind.SOUND_EFFECT, name=name)

    @classmethod
    def horn(cls) -> "Effect":
        return cls(EffectKind.HORN)

    @classmethod
    def broadcast(cls) -> "Effect":
        return cls(EffectKind.BROADCAST_SNAPSHOT)

    @classmethod
    def log(cls, event: LogEvent) -> "Effect":
        return cls(EffectKind.LOG_APPEND, log_event=event)

    @classmethod
    def start_calibration(cls, modality: str) -> "Effect":
        return cls(EffectKind.START_CALIBRATION, modality=modality)


@dataclass(frozen=True)
class SentenceHistory:
    """Most-recent-first finalized sentences, capacity 5."""

    entries: tuple[DecodedSentence, ...] = ()

    def __post_init__(self) -> None:
        if len(self.entries) > HISTORY_CAPACITY:
            raise ValueError(f"history holds at most {HISTORY_CAPACITY} sentences")


def push_history(hist: SentenceHistory, sentence: DecodedSentence) -> SentenceHistory:
    """Push a finalized sentence at position 0, evicting the oldest past 5."""
    return SentenceHistory(entries=(sentence,) + hist.entries[:HISTORY_CAPACITY - 1])


def _default_candidates(sentence: DecodedSentence, segments: Segments) -> CandidateSet:
    if sentence.is_empty:
        return CandidateSet()
    return CandidateSet.ranked([(sentence.text, 0.0)])


def _default_alternatives(sentence: DecodedSentence, index: int,
                          excluded: frozenset[str]) -> CandidateSet:
    return CandidateSet(shown_before=excluded)


@dataclass(frozen=True)
class SessionContext:
    """Session-wide data the FSM carries across states."""

    history: SentenceHistory = SentenceHistory()
    last_sentence: DecodedSentence | None = None
    privacy_active: bool = False
    filter_enabled: bool = False
    filter_words: frozenset[str] = frozenset()
    routing: ControlRouting = ControlRouting()
    candidate_provider: CandidateProvider = _default_candidates
    alternatives_provider: AlternativesProvider = _default_alternatives
    host_nudge_px: int = 40
    host_nudge_fast_px: int = 120

    def spoken_text(self, sentence: DecodedSentence) -> str:
        return filter_text(sentence.words, self.filter_words, self.filter_enabled)


@dataclass(frozen=True)
class SpeakingPayload:
    partial: DecodedSentence
    segments: Segments = ()
    last_activity_ms: int = 0


@dataclass(frozen=True)
class RatingPayload:
    sentence: DecodedSentence
    segments: Segments = ()
    after_corrections: bool = False


@dataclass(frozen=True)
class SentenceCorrectionPayload:
    sentence: DecodedSentence
    candidates: CandidateSet
    segments: Segments = ()


@dataclass(frozen=True)
class WordCorrectionPayload:
    sentence: DecodedSentence
    word_index: int
    alternatives: CandidateSet
    shown: frozenset[str] = frozenset()
    sentence_candidates: CandidateSet = CandidateSet()
    segments: Segments = ()

    def __post_init__(self) -> None:
        if not 0 <= self.word_index < max(len(self.sentence.words), 1):
            raise CorrectionError(f"selected word index {self.word_index} out of bounds")


@dataclass(frozen=True)
class KeyboardPayload:
    buffer: str = ""


@dataclass(frozen=True)
class HostPanelPayload:
    fast: bool = False


@dataclass(frozen=True)
class TaskState:
    tag: Tag
    payload: Any = None

    @classmethod
    def idle(cls) -> "TaskState":
        return cls(Tag.IDLE)


@dataclass(frozen=True)
class DispatchResult:
    state: TaskState
    ctx: SessionContext
    effects: tuple[Effect, ...]


def _result(state: TaskState, ctx: SessionContext, *effects: Effect) -> DispatchResult:
    return DispatchResult(state=state, ctx=ctx, effects=tuple(effects))


def _finalized_log(sentence: DecodedSentence, rating: Rating | None,
                   corrected: bool, t: int) -> LogEvent:
    return LogEvent(t, LogKind.SENTENCE_FINALIZED, {
        "words": list(sentence.words),
        "origin": sentence.origin.value,
        "rating": rating.value if rating else None,
        "corrected": corrected,
    })


def _fresh_alternatives(ctx: SessionContext, sentence: DecodedSentence,
                        index: int) -> CandidateSet:
    if sentence.is_empty:
        return CandidateSet()
    return ctx.alternatives_provider(sentence, index, frozenset())


def dispatch(state: TaskState, event: UiEvent, ctx: SessionContext) -> DispatchResult:
    """Pure transition function of the task-state graph.

    Returns the successor state, the (possibly updated) session
    context, and the effects the runtime must execute. The spec'd
    operation signature returns (state, effects); the immutable context
    rides along because history, privacy, and routing changes have no
    other side-effect-free channel.
    """
    event = normalize_event(event)
    kind = event.kind
    t = event.timestamp_ms
    tag = state.tag

    # Session-global events behave identically in every state.
    if kind is UiEventKind.HORN_PRESSED:
        return _result(state, ctx, Effect.horn())
    if kind is UiEventKind.CLIENT_CONNECTED:
        return _result(state, ctx, Effect.broadcast())
    if kind is UiEventKind.POINTER_SAMPLE:
        return _result(state, ctx)
    if kind is UiEventKind.PRIVACY_TOGGLED:
        if event.flag is None:
            raise RejectedEventError(event, "missing privacy flag")
        return _set_privacy(state, ctx, event.flag, t)
    if (kind is UiEventKind.BUTTON_PRESSED and event.button_id == "privacy_toggle"):
        return _set_privacy(state, ctx, not ctx.privacy_active, t)

    handler = _HANDLERS.get(tag)
    if handler is None:  # pragma: no cover - all tags are registered
        return _result(state, ctx)
    return handler(state, event, ctx)


def _set_privacy(state: TaskState, ctx: SessionContext, flag: bool,
                 t: int) -> DispatchResult:
    if flag == ctx.privacy_active:
        return _result(state, ctx)
    phase = "begin" if flag else "end"
    span = LogEvent(t, LogKind.PRIVACY_SPAN, {"phase": phase})
    return _result(state, replace(ctx, privacy_active=flag),
                   Effect.log(span), Effect.broadcast())


def _content_logs(ctx: SessionContext, *events: LogEvent) -> tuple[Effect, ...]:
    """LogAppend effects for content events, suppressed under privacy."""
    if ctx.privacy_active:
        return ()
    return tuple(Effect.log(ev) for ev in events)


def _finalize(state_tag: Tag, ctx: SessionContext, sentence: DecodedSentence,
              rating: Rating | None, corrected: bool, t: int) -> DispatchResult:
    rated = replace(sentence, rating=rating) if rating is not None else sentence
    new_ctx = replace(ctx, history=push_history(ctx.history, rated),
                      last_sentence=rated)
    logs = [_finalized_log(rated, rating, corrected, t)]
    if rating is not None:
        logs.append(LogEvent(t, LogKind.RATING_GIVEN, {
            "rating": rating.value, "after_corrections": corrected,
        }))
    effects = _content_logs(ctx, *logs) + (Effect.broadcast(),)
    return DispatchResult(TaskState.idle(), new_ctx, effects)


def _handle_idle(state: TaskState, event: UiEvent, ctx: SessionContext) -> DispatchResult:
    t = event.timestamp_ms
    if event.kind is UiEventKind.SPEECH_DETECTED:
        speaking = TaskState(Tag.SPEAKING, SpeakingPayload(
            partial=DecodedSentence.from_words(()), segments=(), last_activity_ms=t))
        return _result(speaking, ctx, Effect.broadcast())
    if event.kind is UiEventKind.BUTTON_PRESSED:
        bid = event.button_id
        if bid == "menu":
            return _result(TaskState(Tag.MENU), ctx, Effect.broadcast())
        if bid == "keyboard":
            return _result(TaskState(Tag.ON_SCREEN_KEYBOARD, KeyboardPayload()),
                           ctx, Effect.broadcast())
        if bid == "play_tts":
            if ctx.last_sentence is None:
                return _result(state, ctx)
            return _result(state, ctx, Effect.play_tts(ctx.spoken_text(ctx.last_sentence)))
        if bid == "type_to_host":
            if ctx.last_sentence is None:
                return _result(state, ctx)
            return _result(state, ctx,
                           Effect.type_to_host(ctx.spoken_text(ctx.last_sentence)))
    return _result(state, ctx)


def _handle_speaking(state: TaskState, event: UiEvent,
                     ctx: SessionContext) -> DispatchResult:
    payload: SpeakingPayload = state.payload
    t = event.timestamp_ms
    if event.kind is UiEventKind.SPEECH_DETECTED:
        return _result(TaskState(Tag.SPEAKING, replace(payload, last_activity_ms=t)), ctx)
    if event.kind is UiEventKind.PARTIAL_WORDS:
        words = event.words or ()
        if len(words) < len(payload.partial.words):
            raise RejectedEventError(event, "partial sentence may only grow")
        segments = event.segments if event.segments is not None else payload.segments
        new_payload = SpeakingPayload(
            partial=DecodedSentence.from_words(words),
            segments=segments,
            last_activity_ms=t,
        )
        return _result(TaskState(Tag.SPEAKING, new_payload), ctx, Effect.broadcast())
    if event.kind in (UiEventKind.DONE_PRESSED, UiEventKind.TIMEOUT_ELAPSED):
        if payload.partial.is_empty:
            return _result(TaskState.idle(), ctx, Effect.broadcast())
        rating_state = TaskState(Tag.SENTENCE_RATING, RatingPayload(
            sentence=payload.partial, segments=payload.segments,
            after_corrections=False))
        return _result(rating_state, ctx, Effect.broadcast())
    return _result(state, ctx)


def _handle_rating(state: TaskState, event: UiEvent,
                   ctx: SessionContext) -> DispatchResult:
    payload: RatingPayload = state.payload
    t = event.timestamp_ms
    if event.kind is UiEventKind.RATING_SELECTED:
        if event.rating is None:
            raise RejectedEventError(event, "missing rating value")
        return _finalize(state.tag, ctx, payload.sentence, event.rating,
                         payload.after_corrections, t)
    if event.kind is UiEventKind.MAKE_CORRECTIONS_PRESSED:
        candidates = ctx.candidate_provider(payload.sentence, payload.segments)
        correction = TaskState(Tag.SENTENCE_CORRECTION, SentenceCorrectionPayload(
            sentence=payload.sentence, candidates=candidates,
            segments=payload.segments))
        return _result(correction, ctx, Effect.broadcast())
    return _result(state, ctx)


def _handle_sentence_correction(state: TaskState, event: UiEvent,
                                ctx: SessionContext) -> DispatchResult:
    payload: SentenceCorrectionPayload = state.payload
    t = event.timestamp_ms
    if event.kind is UiEventKind.CANDIDATE_SENTENCE_CHOSEN:
        if event.index is None or not 0 <= event.index < len(payload.candidates.items):
            raise RejectedEventError(event, "candidate index out of range")
        text = payload.candidates.items[event.index][0]
        chosen = DecodedSentence.from_words(text.split(),
                                            origin=SentenceOrigin.CORRECTED)
        log = LogEvent(t, LogKind.EDIT_APPLIED,
                       {"edit": "ChooseCandidateSentence", "index": event.index})
        rating_state = TaskState(Tag.SENTENCE_RATING, RatingPayload(
            sentence=chosen, segments=payload.segments, after_corrections=True))
        return _result(rating_state, ctx, *_content_logs(ctx, log), Effect.broadcast())
    if event.kind is UiEventKind.WORD_SELECTED:
        if event.index is None or not 0 <= event.index < len(payload.sentence.words):
            raise RejectedEventError(event, "word index out of range")
        alternatives = _fresh_alternatives(ctx, payload.sentence, event.index)
        word_state = TaskState(Tag.WORD_CORRECTION, WordCorrectionPayload(
            sentence=payload.sentence, word_index=event.index,
            alternatives=alternatives, shown=frozenset(alternatives.texts),
            sentence_candidates=payload.candidates, segments=payload.segments))
        return _result(word_state, ctx, Effect.broadcast())
    if event.kind is UiEventKind.CORRECTIONS_DONE:
        rating_state = TaskState(Tag.SENTENCE_RATING, RatingPayload(
            sentence=payload.sentence, segments=payload.segments,
            after_corrections=True))
        return _result(rating_state, ctx, Effect.broadcast())
    return _result(state, ctx)


_EDIT_LOG_KINDS = {
    WordEditKind.TYPE_WORD: "TypeWord",
    WordEditKind.DELETE_WORD: "DeleteWord",
    WordEditKind.ADD_WORD_BEFORE: "AddWordBefore",
    WordEditKind.ADD_WORD_AFTER: "AddWordAfter",
    WordEditKind.REPLACE_WITH_CANDIDATE: "ReplaceWithCandidate",
    WordEditKind.REFRESH: "Refresh",
}


def _handle_word_correction(state: TaskState, event: UiEvent,
                            ctx: SessionContext) -> DispatchResult:
    payload: WordCorrectionPayload = state.payload
    t = event.timestamp_ms
    if event.kind is UiEventKind.WORD_EDIT:
        if event.edit is None:
            raise RejectedEventError(event, "missing edit payload")
        edit = event.edit
        log = LogEvent(t, LogKind.EDIT_APPLIED, {
            "edit": _EDIT_LOG_KINDS[edit.kind], "index": payload.word_index,
        })
        if edit.kind is WordEditKind.REFRESH:
            exclude = payload.shown | frozenset(payload.alternatives.texts)
            refreshed = ctx.alternatives_provider(payload.sentence,
                                                  payload.word_index, exclude)
            new_payload = replace(payload, alternatives=refreshed,
                                  shown=exclude | frozenset(refreshed.texts))
            return _result(TaskState(Tag.WORD_CORRECTION, new_payload), ctx,
                           *_content_logs(ctx, log), Effect.broadcast())
        try:
            edited = apply_edit(payload.sentence, payload.word_index, edit,
                                payload.alternatives.texts)
        except CorrectionError as exc:
            raise RejectedEventError(event, str(exc)) from exc
        if edited.is_empty:
            back = TaskState(Tag.SENTENCE_CORRECTION, SentenceCorrectionPayload(
                sentence=edited, candidates=payload.sentence_candidates,
                segments=payload.segments))
            return _result(back, ctx, *_content_logs(ctx, log), Effect.broadcast())
        if edit.kind is WordEditKind.DELETE_WORD:
            new_index = min(payload.word_index, len(edited.words) - 1)
        elif edit.kind is WordEditKind.ADD_WORD_BEFORE:
            new_index = payload.word_index + 1
        else:
            new_index = payload.word_index
        alternatives = _fresh_alternatives(ctx, edited, new_index)
        new_payload = WordCorrectionPayload(
            sentence=edited, word_index=new_index, alternatives=alternatives,
            shown=frozenset(alternatives.texts),
            sentence_candidates=payload.sentence_candidates,
            segments=payload.segments)
        return _result(TaskState(Tag.WORD_CORRECTION, new_payload), ctx,
                       *_content_logs(ctx, log), Effect.broadcast())
    if event.kind is UiEventKind.WORD_SELECTED:
        if event.index is None or not 0 <= event.index < len(payload.sentence.words):
            raise RejectedEventError(event, "word index out of range")
        alternatives = _fresh_alternatives(ctx, payload.sentence, event.index)
        new_payload = replace(payload, word_index=event.index,
                              alternatives=alternatives,
                              shown=frozenset(alternatives.texts))
        return _result(TaskState(Tag.WORD_CORRECTION, new_payload), ctx,
                       Effect.broadcast())
    if event.kind is UiEventKind.CORRECTIONS_DONE:
        rating_state = TaskState(Tag.SENTENCE_RATING, RatingPayload(
            sentence=payload.sentence, segments=payload.segments,
            after_corrections=True))
        return _result(rating_state, ctx, Effect.broadcast())
    if event.kind is UiEventKind.BUTTON_PRESSED and event.button_id == "back":
        back = TaskState(Tag.SENTENCE_CORRECTION, SentenceCorrectionPayload(
            sentence=payload.sentence, candidates=payload.sentence_candidates,
            segments=payload.segments))
        return _result(back, ctx, Effect.broadcast())
    return _result(state, ctx)


def _switch_ui_source(state: TaskState, ctx: SessionContext, source: PointerSource,
                      t: int) -> DispatchResult:
    if ctx.routing.ui_source == source:
        return _result(state, ctx)
    try:
        routing = ControlRouting(ui_source=source, host_source=ctx.routing.host_source)
    except LayoutError as exc:
        raise RejectedEventError(
            UiEvent.button_pressed(t, f"ui_{source.value.lower()}"), str(exc)) from exc
    log = LogEvent(t, LogKind.MODALITY_SWITCH, {"channel": "ui", "source": source.value})
    return _result(state, replace(ctx, routing=routing),
                   Effect.log(log), Effect.broadcast())


def _switch_host_source(state: TaskState, ctx: SessionContext,
                        source: PointerSource | None, t: int,
                        event: UiEvent) -> DispatchResult:
    if ctx.routing.host_source == source:
        return _result(state, ctx)
    try:
        routing = ControlRouting(ui_source=ctx.routing.ui_source, host_source=source)
    except LayoutError as exc:
        raise RejectedEventError(event, str(exc)) from exc
    logs = []
    if ctx.routing.host_source is not None:
        logs.append(LogEvent(t, LogKind.HOST_CONTROL_SPAN, {
            "phase": "end", "source": ctx.routing.host_source.value}))
    if source is not None:
        logs.append(LogEvent(t, LogKind.HOST_CONTROL_SPAN, {
            "phase": "begin", "source": source.value}))
    logs.append(LogEvent(t, LogKind.MODALITY_SWITCH, {
        "channel": "host", "source": source.value if source else None}))
    effects = tuple(Effect.log(ev) for ev in logs) + (Effect.broadcast(),)
    return DispatchResult(state, replace(ctx, routing=routing), effects)


def _handle_menu(state: TaskState, event: UiEvent,
                 ctx: SessionContext) -> DispatchResult:
    if event.kind is not UiEventKind.BUTTON_PRESSED:
        return _result(state, ctx)
    bid = event.button_id
    t = event.timestamp_ms
    if bid == "speech_menu":
        return _result(TaskState(Tag.SPEECH_MENU), ctx, Effect.broadcast())
    if bid == "cursor_menu":
        return _result(TaskState(Tag.CURSOR_MENU), ctx, Effect.broadcast())
    if bid == "gaze_calibration":
        return _result(TaskState(Tag.GAZE_CALIBRATION), ctx,
                       Effect.start_calibration("gaze"), Effect.broadcast())
    if bid == "history":
        return _result(TaskState(Tag.HISTORY), ctx, Effect.broadcast())
    if bid == "keyboard":
        return _result(TaskState(Tag.ON_SCREEN_KEYBOARD, KeyboardPayload()), ctx,
                       Effect.broadcast())
    if bid == "host_panel":
        return _result(TaskState(Tag.HOST_CONTROL_PANEL, HostPanelPayload()), ctx,
                       Effect.broadcast())
    if bid == "filter_toggle":
        return _result(state, replace(ctx, filter_enabled=not ctx.filter_enabled),
                       Effect.broadcast())
    if bid == "back":
        return _result(TaskState.idle(), ctx, Effect.broadcast())
    return _result(state, ctx)


def _handle_speech_menu(state: TaskState, event: UiEvent,
                        ctx: SessionContext) -> DispatchResult:
    if event.kind is not UiEventKind.BUTTON_PRESSED:
        return _result(state, ctx)
    if event.button_id == "speech_calibration":
        return _result(TaskState(Tag.SPEECH_CALIBRATION), ctx,
                       Effect.start_calibration("speech"), Effect.broadcast())
    if event.button_id == "back":
        return _result(TaskState(Tag.MENU), ctx, Effect.broadcast())
    return _result(state, ctx)


def _handle_cursor_menu(state: TaskState, event: UiEvent,
                        ctx: SessionContext) -> DispatchResult:
    if event.kind is not UiEventKind.BUTTON_PRESSED:
        return _result(state, ctx)
    bid = event.button_id
    t = event.timestamp_ms
    if bid == "cursor_calibration":
        return _result(TaskState(Tag.CURSOR_CALIBRATION), ctx,
                       Effect.start_calibration("cursor"), Effect.broadcast())
    if bid == "ui_neural":
        return _switch_ui_source(state, ctx, PointerSource.NEURAL_CURSOR, t)
    if bid == "ui_gaze":
        return _switch_ui_source(state, ctx, PointerSource.GAZE, t)
    if bid == "host_neural":
        return _switch_host_source(state, ctx, PointerSource.NEURAL_CURSOR, t, event)
    if bid == "host_off":
        return _switch_host_source(state, ctx, None, t, event)
    if bid == "host_gaze":
        # Gaze host control is the on-screen nudge panel, not sample routing.
        return _result(TaskState(Tag.HOST_CONTROL_PANEL, HostPanelPayload()), ctx,
                       Effect.broadcast())
    if bid == "back":
        return _result(TaskState(Tag.MENU), ctx, Effect.broadcast())
    return _result(state, ctx)


def _handle_history(state: TaskState, event: UiEvent,
                    ctx: SessionContext) -> DispatchResult:
    if event.kind is not UiEventKind.BUTTON_PRESSED:
        return _result(state, ctx)
    bid = event.button_id or ""
    if bid.startswith("select_") and bid[7:].isdigit():
        idx = int(bid[7:])
        if idx >= len(ctx.history.entries):
            return _result(state, ctx)
        return _result(state, replace(ctx, last_sentence=ctx.history.entries[idx]),
                       Effect.broadcast())
    if bid == "play_tts":
        if ctx.last_sentence is None:
            return _result(state, ctx)
        return _result(state, ctx, Effect.play_tts(ctx.spoken_text(ctx.last_sentence)))
    if bid == "back":
        return _result(TaskState(Tag.MENU), ctx, Effect.broadcast())
    return _result(state, ctx)


def _handle_keyboard(state: TaskState, event: UiEvent,
                     ctx: SessionContext) -> DispatchResult:
    payload: KeyboardPayload = state.payload or KeyboardPayload()
    t = event.timestamp_ms
    if event.kind is UiEventKind.DONE_PRESSED:
        text = " ".join(payload.buffer.split())
        if not text:
            return _result(TaskState.idle(), ctx, Effect.broadcast())
        typed = DecodedSentence.from_words(text.split(), origin=SentenceOrigin.TYPED)
        return _finalize(state.tag, ctx, typed, None, False, t)
    if event.kind is not UiEventKind.BUTTON_PRESSED:
        return _result(state, ctx)
    bid = event.button_id or ""
    if bid == "cancel":
        return _result(TaskState.idle(), ctx, Effect.broadcast())
    if bid == "key_space":
        new = KeyboardPayload(buffer=payload.buffer + " ")
        return _result(TaskState(Tag.ON_SCREEN_KEYBOARD, new), ctx, Effect.broadcast())
    if bid == "key_backspace":
        new = KeyboardPayload(buffer=payload.buffer[:-1])
        return _result(TaskState(Tag.ON_SCREEN_KEYBOARD, new), ctx, Effect.broadcast())
    if bid.startswith("key_") and len(bid) == 5 and bid[4].isalpha():
        new = KeyboardPayload(buffer=payload.buffer + bid[4].lower())
        return _result(TaskState(Tag.ON_SCREEN_KEYBOARD, new), ctx, Effect.broadcast())
    return _result(state, ctx)


def _make_calibration_handler(parent: Tag) -> Callable[..., DispatchResult]:
    def handler(state: TaskState, event: UiEvent, ctx: SessionContext) -> DispatchResult:
        done = event.kind is UiEventKind.DONE_PRESSED or (
            event.kind is UiEventKind.BUTTON_PRESSED and event.button_id == "back")
        if done:
            return _result(TaskState(parent), ctx, Effect.broadcast())
        return _result(state, ctx)
    return handler


_HOST_PANEL_KEYS = {"key_tab": "tab", "key_enter": "enter", "key_space": "space",
                    "key_backspace": "backspace"}


def _handle_host_panel(state: TaskState, event: UiEvent,
                       ctx: SessionContext) -> DispatchResult:
    payload: HostPanelPayload = state.payload or HostPanelPayload()
    if event.kind is not UiEventKind.BUTTON_PRESSED:
        return _result(state, ctx)
    bid = event.button_id or ""
    step = ctx.host_nudge_fast_px if payload.fast else ctx.host_nudge_px
    moves = {"host_up": (0, -step), "host_down": (0, step),
             "host_left": (-step, 0), "host_right": (step, 0)}
    if bid in moves:
        dx, dy = moves[bid]
        return _result(state, ctx, Effect.host_pointer(HostAction.move(dx, dy)))
    if bid == "host_click":
        return _result(state, ctx, Effect.host_pointer(HostAction.click()))
    if bid == "host_speed":
        toggled = TaskState(Tag.HOST_CONTROL_PANEL, HostPanelPayload(fast=not payload.fast))
        return _result(toggled, ctx, Effect.broadcast())
    if bid in _HOST_PANEL_KEYS:
        return _result(state, ctx,
                       Effect.host_pointer(HostAction.press_key(_HOST_PANEL_KEYS[bid])))
    if bid == "type_last":
        if ctx.last_sentence is None:
            return _result(state, ctx)
        return _result(state, ctx,
                       Effect.type_to_host(ctx.spoken_text(ctx.last_sentence)))
    if bid == "back":
        return _result(TaskState(Tag.MENU), ctx, Effect.broadcast())
    return _result(state, ctx)


_HANDLERS: dict[Tag, Callable[[TaskState, UiEvent, SessionContext], DispatchResult]] = {
    Tag.IDLE: _handle_idle,
    Tag.SPEAKING: _handle_speaking,
    Tag.SENTENCE_RATING: _handle_rating,
    Tag.SENTENCE_CORRECTION: _handle_sentence_correction,
    Tag.WORD_CORRECTION: _handle_word_correction,
    Tag.MENU: _handle_menu,
    Tag.SPEECH_MENU: _handle_speech_menu,
    Tag.CURSOR_MENU: _handle_cursor_menu,
    Tag.HISTORY: _handle_history,
    Tag.ON_SCREEN_KEYBOARD: _handle_keyboard,
    Tag.SPEECH_CALIBRATION: _make_calibration_handler(Tag.SPEECH_MENU),
    Tag.CURSOR_CALIBRATION: _make_calibration_handler(Tag.CURSOR_MENU),
    Tag.GAZE_CALIBRATION: _make_calibration_handler(Tag.MENU),
    Tag.HOST_CONTROL_PANEL: _handle_host_panel,
}


@dataclass(frozen=True)
class StateSnapshot:
    """Everything a graphics client needs to render the current screen."""

    tag: str
    payload: dict[str, Any]
    last_sentence: dict[str, Any] | None
    history: tuple[dict[str, Any], ...]
    privacy_active: bool
    filter_enabled: bool
    ui_source: str
    host_source: str | None

    def to_dict(self) -> dict[str, Any]:
        return {
            "tag": self.tag,
            "payload": self.payload,
            "last_sentence": self.last_sentence,
            "history": list(self.history),
            "privacy_active": self.privacy_active,
            "filter_enabled": self.filter_enabled,
            "ui_source": self.ui_source,
            "host_source": self.host_source,
        }

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "StateSnapshot":
        return cls(
            tag=str(data["tag"]),
            payload=dict(data["payload"]),
            last_sentence=data.get("last_sentence"),
            history=tuple(data.get("history", [])),
            privacy_active=bool(data["privacy_active"]),
            filter_enabled=bool(data["filter_enabled"]),
            ui_source=str(data["ui_source"]),
            host_source=data.get("host_source"),
        )


def snapshot(state: TaskState, ctx: SessionContext) -> StateSnapshot:
    """Immutable render model for the current state and session context."""
    payload: dict[str, Any] = {}
    p = state.payload
    if state.tag is Tag.SPEAKING:
        payload = {"partial_words": list(p.partial.words)}
    elif state.tag is Tag.SENTENCE_RATING:
        payload = {"sentence": p.sentence.to_dict(),
                   "after_corrections": p.after_corrections,
                   "ratings": [r.value for r in RATING_ORDER]}
    elif state.tag is Tag.SENTENCE_CORRECTION:
        payload = {"sentence": p.sentence.to_dict(),
                   "candidates": p.candidates.to_dict()}
    elif state.tag is Tag.WORD_CORRECTION:
        payload = {"sentence": p.sentence.to_dict(), "word_index": p.word_index,
                   "alternatives": p.alternatives.to_dict()}
    elif state.tag is Tag.ON_SCREEN_KEYBOARD:
        payload = {"buffer": p.buffer if p else ""}
    elif state.tag is Tag.HOST_CONTROL_PANEL:
        payload = {"fast": p.fast if p else False}
    elif state.tag is Tag.SPEECH_CALIBRATION:
        payload = {"modality": "speech"}
    elif state.tag is Tag.CURSOR_CALIBRATION:
        payload = {"modality": "cursor"}
    elif state.tag is Tag.GAZE_CALIBRATION:
        payload = {"modality": "gaze"}

    return StateSnapshot(
        tag=state.tag.value,
        payload=payload,
        last_sentence=ctx.last_sentence.to_dict() if ctx.last_sentence else None,
        history=tuple(s.to_dict() for s in ctx.history.entries),
        privacy_active=ctx.privacy_active,
        filter_enabled=ctx.filter_enabled,
        ui_source=ctx.routing.ui_source.value,
        host_source=ctx.routing.host_source.value if ctx.routing.host_source else None,
    )


class Fsm:
    """Owns the serialized event loop around the pure dispatch function."""

    def __init__(self, ctx: SessionContext | None = None,
                 state: TaskState | None = None):
        self.state = state if state is not None else TaskState.idle()
        self.ctx = ctx if ctx is not None else SessionContext()
        self.last_event_ms: int | None = None
        self._timeout_emitted_for: int | None = None

    def handle(self, event: UiEvent) -> tuple[Effect, ...]:
        if self.last_event_ms is not None and event.timestamp_ms < self.last_event_ms:
            raise RejectedEventError(
                event, f"timestamp {event.timestamp_ms} < {self.last_event_ms}")
        result = dispatch(self.state, event, self.ctx)
        self.state = result.state
        self.ctx = result.ctx
        self.last_event_ms = event.timestamp_ms
        if self.state.tag is not Tag.SPEAKING:
            self._timeout_emitted_for = None
        return result.effects

    def tick(self, now_ms: int) -> list[UiEvent]:
        """TimeoutElapsed exactly once per quiet Speaking period >= 6 s."""
        if self.state.tag is not Tag.SPEAKING:
            return []
        payload: SpeakingPayload = self.state.payload
        if self._timeout_emitted_for == payload.last_activity_ms:
            return []
        if now_ms - payload.last_activity_ms >= SPEAKING_TIMEOUT_MS:
            self._timeout_emitted_for = payload.last_activity_ms
            return [UiEvent.timeout_elapsed(now_ms)]
        return []

    def snapshot(self) -> StateSnapshot:
        return snapshot(self.state, self.ctx)
