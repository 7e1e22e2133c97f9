"""Headless harness: scripted personas driven through the full stack.

A persona speaks intended sentences through the noisy phoneme channel,
watches the decoded output, and corrects it according to its policy,
with a simulated clock so every artifact (transcript, event stream,
log, stats) is a pure function of (script, seed, config).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from enum import Enum
from pathlib import Path
from typing import Any, Sequence

import numpy as np

from .correction_engine import (
    CandidateSet,
    CorrectionPipeline,
    DecodedSentence,
    NGramLM,
    WordEdit,
    WordEditKind,
    load_corpus,
    load_filter_words,
    train_ngram,
)
from .decoder_sim import (
    SpeechChannelConfig,
    bundled_corpus_path,
    bundled_filter_path,
    bundled_lexicon_path,
    load_lexicon,
    synth_speech,
)
from .runtime import Runtime
from .session_log import SessionLog, SessionStats, compute_stats
from .state_machine import (
    Rating,
    SessionContext,
    Tag,
    UiEvent,
    UiEventKind,
)


class CorrectionPolicy(str, Enum):
    NO_CORRECTION = "NoCorrection"
    SENTENCE_CANDIDATES_ONLY = "SentenceCandidatesOnly"
    WORD_LEVEL = "WordLevel"
    TYPE_WHEN_STUCK = "TypeWhenStuck"


@dataclass(frozen=True)
class PersonaScript:
    sentences: tuple[tuple[str, ...], ...]
    channel: SpeechChannelConfig = SpeechChannelConfig()
    correction_policy: CorrectionPolicy = CorrectionPolicy.WORD_LEVEL
    refresh_budget: int = 1
    seed: int = 0


# Simulated time cost of each persona action (plus seeded jitter).
ACTION_COST_MS = {
    "gap": 2000,
    "look": 1000,
    "enter_corrections": 1200,
    "choose_candidate": 1500,
    "select_word": 900,
    "replace_word": 1100,
    "refresh": 900,
    "type_word_base": 500,
    "type_word_per_char": 250,
    "corrections_done": 800,
    "rate": 700,
}
ACTION_JITTER_MS = 400


@dataclass
class SimConfig:
    lexicon_path: Path = field(default_factory=bundled_lexicon_path)
    corpus_path: Path = field(default_factory=bundled_corpus_path)
    lm_order: int = 3
    lm_add_k: float = 0.01
    lm: NGramLM | None = None  # pre-trained model wins over corpus_path
    beam_width: int = 16
    candidate_k: int = 5
    alternatives_k: int = 5
    lm_weight: float = 1.0
    out_dir: Path | None = None
    filter_enabled: bool = False


@dataclass
class SessionResult:
    events: list[UiEvent]
    transcript: list[dict[str, Any]]
    stats: SessionStats
    log_path: Path | None
    final_sentences: list[tuple[str, str, str]]  # (intended, final, rating)

    @property
    def fully_correct_rate(self) -> float:
        rated = [r for _, _, r in self.final_sentences]
        if not rated:
            return 0.0
        return sum(1 for r in rated if r == Rating.CORRECT.value) / len(rated)


def sample_sentences(
    n: int,
    seed: int,
    corpus_path: Path | None = None,
    novel_fraction: float = 0.0,
    lexicon_path: Path | None = None,
) -> tuple[tuple[str, ...], ...]:
    """Draw n intended sentences from the bundled corpus distribution.

    novel_fraction of them get one word swapped for a random vocabulary
    word, modelling out-of-distribution utterances the language model
    has never seen (names, new topics), which is where sentence-level
    candidates fall short and word-level correction earns its keep.
    """
    corpus = load_corpus(corpus_path or bundled_corpus_path())
    vocab = sorted(load_lexicon(lexicon_path or bundled_lexicon_path()))
    rng = np.random.default_rng(seed)
    picks = rng.integers(0, len(corpus), size=n)
    sentences = []
    for i in picks:
        words = list(corpus[i])
        if rng.random() < novel_fraction:
            pos = int(rng.integers(0, len(words)))
            words[pos] = vocab[int(rng.integers(0, len(vocab)))]
        sentences.append(tuple(words))
    return tuple(sentences)


def closeness_rating(final: Sequence[str], intended: Sequence[str]) -> Rating:
    """How the persona rates a sentence it could not fully fix."""
    if tuple(final) == tuple(intended):
        return Rating.CORRECT
    dist = _word_edit_distance(tuple(final), tuple(intended))
    if dist == 1:
        return Rating.ONE_WORD_WRONG
    if dist <= max(1, round(0.3 * len(intended))):
        return Rating.MOSTLY_CORRECT
    return Rating.INCORRECT


def _word_edit_distance(a: tuple[str, ...], b: tuple[str, ...]) -> int:
    prev = list(range(len(b) + 1))
    for i in range(1, len(a) + 1):
        cur = [i]
        for j in range(1, len(b) + 1):
            cur.append(min(prev[j] + 1, cur[j - 1] + 1,
                           prev[j - 1] + (a[i - 1] != b[j - 1])))
        prev = cur
    return prev[len(b)]


class _Persona:
    """Drives one Runtime like a scripted user with a simulated clock."""

    def __init__(self, script: PersonaScript, config: SimConfig,
                 runtime: Runtime, pipeline: CorrectionPipeline,
                 lexicon: dict[str, tuple[str, ...]]):
        self.script = script
        self.config = config
        self.runtime = runtime
        self.pipeline = pipeline
        self.lexicon = lexicon
        self.rng = np.random.default_rng(script.seed)
        self.clock = 0
        self.events: list[UiEvent] = []
        self.final_sentences: list[tuple[str, str, str]] = []

    def submit(self, event: UiEvent) -> None:
        self.events.append(event)
        self.runtime.submit(event)

    def advance(self, action: str, extra_ms: int = 0) -> None:
        cost = ACTION_COST_MS.get(action, 500) + extra_ms
        self.clock += cost + int(self.rng.integers(0, ACTION_JITTER_MS))

    @property
    def state(self):
        return self.runtime.fsm.state

    def run(self) -> None:
        for i, intended in enumerate(self.script.sentences):
            self._speak_and_correct(i, intended)

    # -- one sentence ------------------------------------------------------

    def _speak_and_correct(self, index: int, intended: tuple[str, ...]) -> None:
        self.advance("gap")
        self.submit(UiEvent.speech_detected(self.clock))

        channel = replace(self.script.channel,
                          seed=(self.script.channel.seed * 1_000_003 + index) & 0x7FFFFFFF)
        phoneme_events = synth_speech(intended, self.lexicon, channel,
                                      start_ms=self.clock)
        segments: list[tuple[str, ...]] = []
        words: list[str] = []
        current: list[str] = []
        for ev in phoneme_events:
            if ev.kind == "word_boundary":
                segment = tuple(current)
                current = []
                segments.append(segment)
                decoded = self.pipeline.greedy_word(segment)
                words.append(decoded if decoded is not None else intended[len(words)])
                self.clock = max(self.clock + 1, ev.t_ms)
                self.submit(UiEvent.partial_words(self.clock, tuple(words),
                                                  tuple(segments)))
            else:
                current.append(ev.label)

        self.advance("look")
        self.submit(UiEvent.done_pressed(self.clock))
        if self.state.tag is not Tag.SENTENCE_RATING:
            return  # empty utterance fell back to Idle

        decoded_words = self.state.payload.sentence.words
        if decoded_words == intended:
            self._rate(intended)
            return
        policy = self.script.correction_policy
        if policy is CorrectionPolicy.NO_CORRECTION:
            self._rate(intended)
            return

        self.advance("enter_corrections")
        self.submit(UiEvent.make_corrections(self.clock))
        candidates: CandidateSet = self.state.payload.candidates
        intended_text = " ".join(intended)
        self.advance("choose_candidate")
        if intended_text in candidates.texts:
            idx = candidates.texts.index(intended_text)
            self.submit(UiEvent.candidate_chosen(self.clock, idx))
            self._rate(intended)
            return
        if policy is CorrectionPolicy.SENTENCE_CANDIDATES_ONLY:
            self.submit(UiEvent.corrections_done(self.clock))
            self._rate(intended)
            return

        self._fix_words(intended)
        self.advance("corrections_done")
        self.submit(UiEvent.corrections_done(self.clock))
        self._rate(intended)

    def _fix_words(self, intended: tuple[str, ...]) -> None:
        """Word-level pass: alternatives, refresh, then typing if allowed."""
        can_type = self.script.correction_policy is CorrectionPolicy.TYPE_WHEN_STUCK
        position = 0
        while position < len(intended):
            sentence: DecodedSentence = self._current_sentence()
            if position >= len(sentence.words):
                break
            if sentence.words[position] == intended[position]:
                position += 1
                continue
            self.advance("select_word")
            self.submit(UiEvent.word_selected(self.clock, position))
            if self.state.tag is not Tag.WORD_CORRECTION:
                break
            fixed = self._fix_one_word(position, intended[position], can_type)
            position += 1
        # Trailing length mismatches (not produced by the standard channel,
        # but personas handle them defensively).
        sentence = self._current_sentence()
        while len(sentence.words) > len(intended) and not sentence.is_empty:
            idx = len(sentence.words) - 1
            self.advance("select_word")
            self.submit(UiEvent.word_selected(self.clock, idx))
            self.advance("replace_word")
            self.submit(UiEvent.word_edit(
                self.clock, WordEdit(WordEditKind.DELETE_WORD)))
            sentence = self._current_sentence()
        while len(sentence.words) < len(intended) and can_type:
            idx = max(len(sentence.words) - 1, 0)
            missing = intended[len(sentence.words)]
            self.advance("type_word",
                         extra_ms=ACTION_COST_MS["type_word_per_char"] * len(missing))
            self.submit(UiEvent.word_edit(
                self.clock, WordEdit(WordEditKind.ADD_WORD_AFTER, text=missing)))
            sentence = self._current_sentence()

    def _fix_one_word(self, position: int, wanted: str, can_type: bool) -> bool:
        for attempt in range(self.script.refresh_budget + 1):
            alternatives: CandidateSet = self.state.payload.alternatives
            if wanted in alternatives.texts:
                self.advance("replace_word")
                self.submit(UiEvent.word_edit(self.clock, WordEdit(
                    WordEditKind.REPLACE_WITH_CANDIDATE,
                    candidate_index=alternatives.texts.index(wanted))))
                return True
            if attempt < self.script.refresh_budget:
                self.advance("refresh")
                self.submit(UiEvent.word_edit(self.clock,
                                              WordEdit(WordEditKind.REFRESH)))
        if can_type:
            self.advance("type_word",
                         extra_ms=ACTION_COST_MS["type_word_per_char"] * len(wanted))
            self.submit(UiEvent.word_edit(self.clock, WordEdit(
                WordEditKind.TYPE_WORD, text=wanted)))
            return True
        return False

    def _current_sentence(self) -> DecodedSentence:
        payload = self.state.payload
        return payload.sentence

    def _rate(self, intended: tuple[str, ...]) -> None:
        sentence: DecodedSentence = self.state.payload.sentence
        rating = closeness_rating(sentence.words, intended)
        self.advance("rate")
        self.submit(UiEvent.rating_selected(self.clock, rating))
        self.final_sentences.append((" ".join(intended), sentence.text, rating.value))


def build_pipeline(config: SimConfig) -> tuple[CorrectionPipeline, dict[str, tuple[str, ...]]]:
    lexicon = load_lexicon(config.lexicon_path)
    lm = config.lm
    if lm is None:
        lm = train_ngram(load_corpus(config.corpus_path), config.lm_order,
                         config.lm_add_k)
    pipeline = CorrectionPipeline(
        lexicon, lm, beam_width=config.beam_width, k=config.candidate_k,
        alternatives_k=config.alternatives_k, lm_weight=config.lm_weight)
    return pipeline, lexicon


def run_session(script: PersonaScript, config: SimConfig | None = None,
                pipeline: CorrectionPipeline | None = None,
                lexicon: dict[str, tuple[str, ...]] | None = None) -> SessionResult:
    """Drive the FSM through the whole workflow for every sentence."""
    config = config or SimConfig()
    if pipeline is None or lexicon is None:
        pipeline, lexicon = build_pipeline(config)

    out_dir = config.out_dir
    log_path = None
    if out_dir is not None:
        out_dir.mkdir(parents=True, exist_ok=True)
        log_path = out_dir / "session.ndjson"
        if log_path.exists():
            log_path.unlink()

    transcript: list[dict[str, Any]] = []
    ctx = SessionContext(
        candidate_provider=pipeline.candidates,
        alternatives_provider=pipeline.alternatives,
        filter_enabled=config.filter_enabled,
        filter_words=load_filter_words(bundled_filter_path()),
    )
    runtime = Runtime(ctx=ctx, log=SessionLog(log_path),
                      transcript=transcript.append)
    persona = _Persona(script, config, runtime, pipeline, lexicon)
    runtime.start(0)
    persona.run()
    runtime.shutdown(persona.clock + 1)

    stats = compute_stats(runtime.log.events)
    result = SessionResult(
        events=persona.events,
        transcript=transcript,
        stats=stats,
        log_path=log_path,
        final_sentences=persona.final_sentences,
    )
    if out_dir is not None:
        _write_artifacts(out_dir, result)
    return result


def _write_artifacts(out_dir: Path, result: SessionResult) -> None:
    with (out_dir / "events.jsonl").open("w", encoding="utf-8") as fh:
        for ev in result.events:
            fh.write(json.dumps(ev.to_dict(), sort_keys=True) + "\n")
    with (out_dir / "transcript.txt").open("w", encoding="utf-8") as fh:
        for intended, final, rating in result.final_sentences:
            fh.write(f"intended: {intended}\n")
            fh.write(f"final:    {final}\n")
            fh.write(f"rating:   {rating}\n\n")
        for line in result.transcript:
            fh.write(json.dumps(line, sort_keys=True) + "\n")
    (out_dir / "stats.json").write_text(
        json.dumps(result.stats.to_dict(), indent=2, sort_keys=True) + "\n",
        encoding="utf-8")


def replay_events(events: Sequence[UiEvent],
                  ctx: SessionContext | None = None,
                  log_path: Path | None = None,
                  start_ms: int = 0) -> Runtime:
    """Re-run a recorded event stream through a fresh FSM.

    Sessions recorded by run_session start their log at t=0, so a
    replay with the same providers reproduces the log byte for byte.
    """
    runtime = Runtime(ctx=ctx, log=SessionLog(log_path))
    runtime.start(start_ms)
    last_t = start_ms
    for ev in events:
        runtime.submit(ev)
        last_t = ev.timestamp_ms
    runtime.shutdown(last_t + 1)
    return runtime


def load_events(path: Path) -> list[UiEvent]:
    events = []
    with path.open(encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                events.append(UiEvent.from_dict(json.loads(line)))
    return events


# --- smoke walk --------------------------------------------------------------

StepDescriptor = tuple[str, str, str | None]  # (state tag, event kind, detail)


def run_smoke(runtime: Runtime) -> list[StepDescriptor]:
    """Walk every documented (state, event) pair once; returns the visits.

    Each step records (state tag before dispatch, normalized event
    kind, button id / edit kind detail) and asserts the expected
    successor tag, so a broken walk fails loudly rather than silently
    skipping coverage.
    """
    from .state_machine import normalize_event

    visited: list[StepDescriptor] = []
    clock = [0]

    def submit(event: UiEvent, expect: Tag | None = None) -> None:
        normalized = normalize_event(event)
        detail: str | None = None
        if normalized.kind is UiEventKind.BUTTON_PRESSED:
            detail = normalized.button_id
        elif normalized.kind is UiEventKind.WORD_EDIT and normalized.edit:
            detail = normalized.edit.kind.value
        visited.append((runtime.fsm.state.tag.value, normalized.kind.value, detail))
        runtime.submit(event)
        if expect is not None and runtime.fsm.state.tag is not expect:
            raise AssertionError(
                f"smoke walk: expected {expect.value} after "
                f"{normalized.kind.value}/{detail}, got {runtime.fsm.state.tag.value}")

    def t(step_ms: int = 500) -> int:
        clock[0] += step_ms
        return clock[0]

    B = UiEvent.button_pressed
    runtime.start(0)

    # Globals on Idle.
    submit(UiEvent.client_connected(t(), "smoke"), Tag.IDLE)
    from .interaction import PointerSample, PointerSource
    submit(UiEvent.pointer_sample(t(), PointerSample((10, 10), PointerSource.GAZE, clock[0])),
           Tag.IDLE)
    submit(UiEvent.horn_pressed(t()), Tag.IDLE)

    # Utterance A: full happy path with Done.
    submit(UiEvent.speech_detected(t()), Tag.SPEAKING)
    submit(B(t(), "nonexistent_button"), Tag.SPEAKING)  # unmapped no-op
    submit(UiEvent.partial_words(t(), ("hello",), (("HH", "AH", "L", "OW"),)),
           Tag.SPEAKING)
    submit(UiEvent.partial_words(
        t(), ("hello", "how"), (("HH", "AH", "L", "OW"), ("HH", "AW"))), Tag.SPEAKING)
    submit(UiEvent.speech_detected(t()), Tag.SPEAKING)
    submit(UiEvent.done_pressed(t()), Tag.SENTENCE_RATING)
    submit(UiEvent.rating_selected(t(), Rating.CORRECT), Tag.IDLE)

    # Idle quick actions now that a sentence exists.
    submit(B(t(), "play_tts"), Tag.IDLE)
    submit(B(t(), "type_to_host"), Tag.IDLE)

    # Utterance B: timeout finalization, candidate choice.
    submit(UiEvent.speech_detected(t()), Tag.SPEAKING)
    submit(UiEvent.partial_words(t(), ("good", "morning")), Tag.SPEAKING)
    timeout_events = runtime.fsm.tick(clock[0] + 6000)
    assert timeout_events, "tick must emit the 6-second timeout"
    clock[0] += 6000
    submit(timeout_events[0], Tag.SENTENCE_RATING)
    submit(UiEvent.make_corrections(t()), Tag.SENTENCE_CORRECTION)
    submit(UiEvent.candidate_chosen(t(), 0), Tag.SENTENCE_RATING)
    submit(UiEvent.rating_selected(t(), Rating.ONE_WORD_WRONG), Tag.IDLE)

    # Utterance C: the whole word-correction toolbox.
    submit(UiEvent.speech_detected(t()), Tag.SPEAKING)
    submit(UiEvent.partial_words(t(), ("i", "want", "water")), Tag.SPEAKING)
    submit(UiEvent.done_pressed(t()), Tag.SENTENCE_RATING)
    submit(UiEvent.make_corrections(t()), Tag.SENTENCE_CORRECTION)
    submit(UiEvent.word_selected(t(), 1), Tag.WORD_CORRECTION)
    submit(UiEvent.word_edit(t(), WordEdit(WordEditKind.REFRESH)), Tag.WORD_CORRECTION)
    submit(UiEvent.word_edit(
        t(), WordEdit(WordEditKind.REPLACE_WITH_CANDIDATE, candidate_index=0)),
        Tag.WORD_CORRECTION)
    submit(UiEvent.word_selected(t(), 2), Tag.WORD_CORRECTION)
    submit(UiEvent.word_edit(t(), WordEdit(WordEditKind.TYPE_WORD, text="tea")),
           Tag.WORD_CORRECTION)
    submit(UiEvent.word_edit(t(), WordEdit(WordEditKind.ADD_WORD_BEFORE, text="please")),
           Tag.WORD_CORRECTION)
    submit(UiEvent.word_edit(t(), WordEdit(WordEditKind.ADD_WORD_AFTER, text="now")),
           Tag.WORD_CORRECTION)
    submit(UiEvent.word_edit(t(), WordEdit(WordEditKind.DELETE_WORD)),
           Tag.WORD_CORRECTION)
    submit(B(t(), "back"), Tag.SENTENCE_CORRECTION)
    submit(UiEvent.word_selected(t(), 0), Tag.WORD_CORRECTION)
    submit(UiEvent.corrections_done(t()), Tag.SENTENCE_RATING)
    submit(UiEvent.make_corrections(t()), Tag.SENTENCE_CORRECTION)
    submit(UiEvent.corrections_done(t()), Tag.SENTENCE_RATING)
    submit(UiEvent.rating_selected(t(), Rating.MOSTLY_CORRECT), Tag.IDLE)

    # Utterance D: incorrect rating; empty-done edge.
    submit(UiEvent.speech_detected(t()), Tag.SPEAKING)
    submit(UiEvent.partial_words(t(), ("maybe",)), Tag.SPEAKING)
    submit(UiEvent.done_pressed(t()), Tag.SENTENCE_RATING)
    submit(UiEvent.rating_selected(t(), Rating.INCORRECT), Tag.IDLE)
    submit(UiEvent.speech_detected(t()), Tag.SPEAKING)
    submit(UiEvent.done_pressed(t()), Tag.IDLE)

    # Privacy toggle from Idle (both the event and the button form).
    submit(UiEvent.privacy_toggled(t(), True), Tag.IDLE)
    submit(B(t(), "privacy_toggle"), Tag.IDLE)

    # Menu tour.
    submit(B(t(), "menu"), Tag.MENU)
    submit(UiEvent.privacy_toggled(t(), True), Tag.MENU)
    submit(B(t(), "privacy_toggle"), Tag.MENU)
    submit(B(t(), "filter_toggle"), Tag.MENU)
    submit(B(t(), "speech_menu"), Tag.SPEECH_MENU)
    submit(B(t(), "speech_calibration"), Tag.SPEECH_CALIBRATION)
    submit(B(t(), "back"), Tag.SPEECH_MENU)
    submit(B(t(), "back"), Tag.MENU)
    submit(B(t(), "cursor_menu"), Tag.CURSOR_MENU)
    submit(B(t(), "cursor_calibration"), Tag.CURSOR_CALIBRATION)
    submit(B(t(), "back"), Tag.CURSOR_MENU)
    submit(B(t(), "ui_neural"), Tag.CURSOR_MENU)
    submit(B(t(), "ui_gaze"), Tag.CURSOR_MENU)
    submit(B(t(), "host_neural"), Tag.CURSOR_MENU)
    submit(B(t(), "host_off"), Tag.CURSOR_MENU)
    submit(B(t(), "back"), Tag.MENU)
    submit(B(t(), "cursor_menu"), Tag.CURSOR_MENU)
    submit(B(t(), "host_gaze"), Tag.HOST_CONTROL_PANEL)
    submit(B(t(), "back"), Tag.MENU)
    submit(B(t(), "gaze_calibration"), Tag.GAZE_CALIBRATION)
    submit(B(t(), "back"), Tag.MENU)
    submit(B(t(), "history"), Tag.HISTORY)
    submit(B(t(), "select_0"), Tag.HISTORY)
    submit(B(t(), "play_tts"), Tag.HISTORY)
    submit(B(t(), "back"), Tag.MENU)
    submit(B(t(), "host_panel"), Tag.HOST_CONTROL_PANEL)
    for bid in ("host_up", "host_down", "host_left", "host_right", "host_click",
                "host_speed", "key_tab", "key_enter", "key_space",
                "key_backspace", "type_last"):
        submit(B(t(), bid), Tag.HOST_CONTROL_PANEL)
    submit(B(t(), "back"), Tag.MENU)
    submit(B(t(), "keyboard"), Tag.ON_SCREEN_KEYBOARD)
    for bid in ("key_h", "key_i", "key_space", "key_o", "key_k",
                "key_backspace", "key_backspace", "key_backspace"):
        submit(B(t(), bid), Tag.ON_SCREEN_KEYBOARD)
    submit(UiEvent.done_pressed(t()), Tag.IDLE)

    # Keyboard entered from Idle, then cancelled.
    submit(B(t(), "keyboard"), Tag.ON_SCREEN_KEYBOARD)
    submit(B(t(), "cancel"), Tag.IDLE)
    submit(B(t(), "menu"), Tag.MENU)
    submit(B(t(), "back"), Tag.IDLE)

    runtime.shutdown(t())
    return visited


def smoke_runtime(pipeline: CorrectionPipeline | None = None,
                  log_path: Path | None = None) -> Runtime:
    """Runtime for the smoke walk; a real or stub pipeline both work."""
    if pipeline is not None:
        ctx = SessionContext(candidate_provider=pipeline.candidates,
                             alternatives_provider=pipeline.alternatives)
    else:
        def candidates(sentence: DecodedSentence, segments) -> CandidateSet:
            if sentence.is_empty:
                return CandidateSet()
            return CandidateSet.ranked([(sentence.text, 0.0)])

        def alternatives(sentence: DecodedSentence, index: int,
                         excluded: frozenset[str]) -> CandidateSet:
            pool = ("are", "is", "was", "did", "do", "you", "we", "water",
                    "tea", "coffee")
            scored = [(w, -float(i)) for i, w in enumerate(pool)
                      if w not in excluded and w != sentence.words[index]]
            return CandidateSet.ranked(scored, shown_before=excluded).take(5)

        ctx = SessionContext(candidate_provider=candidates,
                             alternatives_provider=alternatives)
    return Runtime(ctx=ctx, log=SessionLog(log_path))
