from __future__ import annotations

import random

import pytest

from bciui.correction_engine import DecodedSentence, WordEdit, WordEditKind
from bciui.session_log import LogKind
from bciui.state_machine import (
    EffectKind,
    Fsm,
    Rating,
    RejectedEventError,
    SentenceHistory,
    SessionContext,
    SpeakingPayload,
    Tag,
    TaskState,
    UiEvent,
    UiEventKind,
    dispatch,
    push_history,
    snapshot,
    StateSnapshot,
)

from fsm_table import (
    SENTENCE,
    TRANSITION_TABLE,
    build_event,
    state_for,
    table_ctx,
)


def effect_kinds(effects):
    return [e.kind for e in effects]


class TestDispatchExamples:
    def test_idle_speech_detected_enters_speaking(self):
        ctx = table_ctx()
        res = dispatch(TaskState.idle(), UiEvent.speech_detected(10), ctx)
        assert res.state.tag is Tag.SPEAKING
        assert res.state.payload.partial.is_empty
        assert effect_kinds(res.effects) == [EffectKind.BROADCAST_SNAPSHOT]

    def test_unmapped_button_is_noop(self):
        ctx = table_ctx()
        state = state_for(Tag.SPEAKING)
        res = dispatch(state, UiEvent.button_pressed(10, "no_such_button"), ctx)
        assert res.state == state
        assert res.effects == ()

    def test_rating_returns_to_idle_with_log_and_broadcast(self):
        ctx = table_ctx()
        res = dispatch(state_for(Tag.SENTENCE_RATING),
                       UiEvent.rating_selected(10, Rating.MOSTLY_CORRECT), ctx)
        assert res.state.tag is Tag.IDLE
        kinds = effect_kinds(res.effects)
        assert EffectKind.BROADCAST_SNAPSHOT in kinds
        rating_logs = [e for e in res.effects
                       if e.kind is EffectKind.LOG_APPEND
                       and e.log_event.kind is LogKind.RATING_GIVEN]
        assert len(rating_logs) == 1
        assert rating_logs[0].log_event.payload["rating"] == "MostlyCorrect"

    def test_full_documented_path(self):
        """Idle->Speaking->Rating->SentenceCorrection->WordCorrection->Rating->Idle."""
        fsm = Fsm(ctx=table_ctx())
        steps = [
            (UiEvent.speech_detected(0), Tag.SPEAKING),
            (UiEvent.partial_words(100, ("hello", "how", "did", "you")), Tag.SPEAKING),
            (UiEvent.done_pressed(200), Tag.SENTENCE_RATING),
            (UiEvent.make_corrections(300), Tag.SENTENCE_CORRECTION),
            (UiEvent.word_selected(400, 2), Tag.WORD_CORRECTION),
            (UiEvent.word_edit(500, WordEdit(WordEditKind.TYPE_WORD, text="are")),
             Tag.WORD_CORRECTION),
            (UiEvent.corrections_done(600), Tag.SENTENCE_RATING),
            (UiEvent.rating_selected(700, Rating.CORRECT), Tag.IDLE),
        ]
        for event, expected in steps:
            fsm.handle(event)
            assert fsm.state.tag is expected
        assert fsm.ctx.last_sentence.words == ("hello", "how", "are", "you")
        assert fsm.ctx.history.entries[0].rating is Rating.CORRECT


class TestConformanceTable:
    @pytest.mark.parametrize("tag,descriptor,expected", TRANSITION_TABLE,
                             ids=lambda v: getattr(v, "value", str(v)))
    def test_documented_pair(self, tag, descriptor, expected):
        kind, detail = descriptor
        res = dispatch(state_for(tag), build_event(kind, detail), table_ctx())
        assert res.state.tag is expected

    def test_only_speech_detection_enters_speaking(self):
        for tag, (kind, detail), expected in TRANSITION_TABLE:
            if expected is Tag.SPEAKING and tag is not Tag.SPEAKING:
                assert kind == "SpeechDetected"

    def test_corrections_always_reenter_rating_before_idle(self):
        for tag, _, expected in TRANSITION_TABLE:
            if tag in (Tag.SENTENCE_CORRECTION, Tag.WORD_CORRECTION):
                assert expected is not Tag.IDLE


class TestRejectedEvents:
    def test_word_selected_out_of_range(self):
        ctx = table_ctx()
        state = state_for(Tag.SENTENCE_CORRECTION)
        with pytest.raises(RejectedEventError) as err:
            dispatch(state, UiEvent.word_selected(10, 99), ctx)
        assert err.value.event.index == 99

    def test_candidate_index_out_of_range(self):
        with pytest.raises(RejectedEventError):
            dispatch(state_for(Tag.SENTENCE_CORRECTION),
                     UiEvent.candidate_chosen(10, 17), table_ctx())

    def test_shrinking_partial_rejected(self):
        state = state_for(Tag.SPEAKING)  # partial has 4 words
        with pytest.raises(RejectedEventError):
            dispatch(state, UiEvent.partial_words(10, ("hello",)), table_ctx())

    def test_timestamp_regression_rejected_by_fsm(self):
        fsm = Fsm(ctx=table_ctx())
        fsm.handle(UiEvent.speech_detected(1000))
        with pytest.raises(RejectedEventError):
            fsm.handle(UiEvent.done_pressed(500))
        assert fsm.state.tag is Tag.SPEAKING


class TestTimeout:
    def test_boundary_5999_does_not_fire(self):
        fsm = Fsm(ctx=table_ctx())
        fsm.handle(UiEvent.speech_detected(0))
        assert fsm.tick(5999) == []

    def test_boundary_6000_fires_once(self):
        fsm = Fsm(ctx=table_ctx())
        fsm.handle(UiEvent.speech_detected(0))
        events = fsm.tick(6000)
        assert [e.kind for e in events] == [UiEventKind.TIMEOUT_ELAPSED]
        assert fsm.tick(6001) == []  # exactly once per quiet period

    def test_activity_resets_timer(self):
        fsm = Fsm(ctx=table_ctx())
        fsm.handle(UiEvent.speech_detected(0))
        fsm.handle(UiEvent.partial_words(4000, ("hello",)))
        assert fsm.tick(9999) == []
        assert len(fsm.tick(10000)) == 1

    def test_idle_never_times_out(self):
        fsm = Fsm(ctx=table_ctx())
        assert fsm.tick(1_000_000) == []


class TestHistory:
    def test_push_onto_empty(self):
        hist = push_history(SentenceHistory(), SENTENCE)
        assert hist.entries == (SENTENCE,)

    def test_capacity_five_evicts_oldest(self):
        hist = SentenceHistory()
        sentences = [DecodedSentence.from_words((f"s{i}",)) for i in range(6)]
        for s in sentences:
            hist = push_history(hist, s)
        assert len(hist.entries) == 5
        assert [s.words[0] for s in hist.entries] == ["s5", "s4", "s3", "s2", "s1"]

    def test_duplicates_are_distinct_utterances(self):
        hist = push_history(push_history(SentenceHistory(), SENTENCE), SENTENCE)
        assert hist.entries == (SENTENCE, SENTENCE)


class TestSnapshot:
    def test_idle_snapshot_carries_last_sentence(self):
        snap = snapshot(TaskState.idle(), table_ctx())
        assert snap.tag == "Idle"
        assert snap.last_sentence["words"] == list(SENTENCE.words)

    def test_speaking_snapshot_carries_partial_words(self):
        state = TaskState(Tag.SPEAKING, SpeakingPayload(
            partial=DecodedSentence.from_words(("hello", "how"))))
        snap = snapshot(state, table_ctx())
        assert snap.payload == {"partial_words": ["hello", "how"]}

    @pytest.mark.parametrize("tag", list(Tag), ids=lambda t: t.value)
    def test_round_trip_identity_for_every_screen(self, tag):
        snap = snapshot(state_for(tag), table_ctx())
        assert StateSnapshot.from_dict(snap.to_dict()) == snap


class TestPurityAndPrivacy:
    def test_dispatch_same_inputs_same_outputs(self):
        ctx = table_ctx()
        cases = [
            (TaskState.idle(), UiEvent.speech_detected(5)),
            (state_for(Tag.SENTENCE_RATING),
             UiEvent.rating_selected(5, Rating.CORRECT)),
            (state_for(Tag.WORD_CORRECTION),
             UiEvent.word_edit(5, WordEdit(WordEditKind.DELETE_WORD))),
            (state_for(Tag.MENU), UiEvent.button_pressed(5, "history")),
        ]
        for state, event in cases:
            assert dispatch(state, event, ctx) == dispatch(state, event, ctx)

    def test_privacy_suppresses_content_logs(self):
        ctx = table_ctx()
        private_ctx = SessionContext(
            history=ctx.history, last_sentence=ctx.last_sentence,
            privacy_active=True, candidate_provider=ctx.candidate_provider,
            alternatives_provider=ctx.alternatives_provider)
        res = dispatch(state_for(Tag.SENTENCE_RATING),
                       UiEvent.rating_selected(5, Rating.CORRECT), private_ctx)
        assert res.state.tag is Tag.IDLE
        assert all(e.kind is not EffectKind.LOG_APPEND for e in res.effects)
        # History still updates; privacy only stops persistence.
        assert res.ctx.history.entries[0].words == SENTENCE.words

    def test_privacy_toggle_emits_span_markers(self):
        ctx = table_ctx()
        on = dispatch(TaskState.idle(), UiEvent.privacy_toggled(5, True), ctx)
        span_logs = [e.log_event for e in on.effects
                     if e.kind is EffectKind.LOG_APPEND]
        assert [ev.payload["phase"] for ev in span_logs] == ["begin"]
        off = dispatch(TaskState.idle(), UiEvent.privacy_toggled(6, False), on.ctx)
        span_logs = [e.log_event for e in off.effects
                     if e.kind is EffectKind.LOG_APPEND]
        assert [ev.payload["phase"] for ev in span_logs] == ["end"]

    def test_redundant_privacy_toggle_is_noop(self):
        ctx = table_ctx()
        res = dispatch(TaskState.idle(), UiEvent.privacy_toggled(5, False), ctx)
        assert res.effects == ()

    def test_language_filter_masks_spoken_and_typed_output(self):
        base = table_ctx()
        sentence = DecodedSentence.from_words(("well", "damn"))
        ctx = SessionContext(
            history=base.history, last_sentence=sentence,
            filter_enabled=True, filter_words=frozenset({"damn"}),
            candidate_provider=base.candidate_provider,
            alternatives_provider=base.alternatives_provider)
        tts = dispatch(TaskState.idle(), UiEvent.button_pressed(5, "play_tts"), ctx)
        assert tts.effects[0].kind is EffectKind.PLAY_TTS
        assert tts.effects[0].text == "well d***"
        host = dispatch(TaskState.idle(), UiEvent.button_pressed(6, "type_to_host"), ctx)
        assert host.effects[0].text == "well d***"
        # Disabled filter passes the text through byte for byte.
        plain = SessionContext(
            history=base.history, last_sentence=sentence,
            filter_enabled=False, filter_words=frozenset({"damn"}),
            candidate_provider=base.candidate_provider,
            alternatives_provider=base.alternatives_provider)
        tts2 = dispatch(TaskState.idle(), UiEvent.button_pressed(7, "play_tts"), plain)
        assert tts2.effects[0].text == "well damn"


class TestFuzz:
    def test_transition_closure_under_random_events(self):
        """10^5 random events: never leave the tag enum, never throw
        anything but RejectedEventError."""
        rng = random.Random(20240901)
        fsm = Fsm(ctx=table_ctx())
        kinds = list(UiEventKind)
        buttons = ["menu", "back", "done", "keyboard", "history", "play_tts",
                   "speech_menu", "cursor_menu", "host_panel", "host_up",
                   "key_a", "key_space", "cancel", "privacy_toggle",
                   "filter_toggle", "select_0", "select_9", "bogus",
                   "rate_correct", "candidate_0", "candidate_9", "word_0",
                   "word_99", "ui_gaze", "ui_neural", "host_neural",
                   "host_off", "host_gaze", "corrections_done",
                   "make_corrections", "horn"]
        edits = [WordEdit(WordEditKind.TYPE_WORD, text="tea"),
                 WordEdit(WordEditKind.DELETE_WORD),
                 WordEdit(WordEditKind.ADD_WORD_BEFORE, text="please"),
                 WordEdit(WordEditKind.ADD_WORD_AFTER, text="now"),
                 WordEdit(WordEditKind.REPLACE_WITH_CANDIDATE, candidate_index=0),
                 WordEdit(WordEditKind.REPLACE_WITH_CANDIDATE, candidate_index=40),
                 WordEdit(WordEditKind.REFRESH)]
        t = 0
        rejected = 0
        for _ in range(100_000):
            t += rng.randint(0, 50)
            kind = rng.choice(kinds)
            if kind is UiEventKind.BUTTON_PRESSED:
                event = UiEvent.button_pressed(t, rng.choice(buttons))
            elif kind is UiEventKind.PARTIAL_WORDS:
                n = rng.randint(0, 6)
                event = UiEvent.partial_words(t, tuple(f"w{i}" for i in range(n)))
            elif kind is UiEventKind.RATING_SELECTED:
                event = UiEvent.rating_selected(t, rng.choice(list(Rating)))
            elif kind is UiEventKind.CANDIDATE_SENTENCE_CHOSEN:
                event = UiEvent.candidate_chosen(t, rng.randint(0, 8))
            elif kind is UiEventKind.WORD_SELECTED:
                event = UiEvent.word_selected(t, rng.randint(0, 8))
            elif kind is UiEventKind.WORD_EDIT:
                event = UiEvent.word_edit(t, rng.choice(edits))
            elif kind is UiEventKind.PRIVACY_TOGGLED:
                event = UiEvent.privacy_toggled(t, rng.random() < 0.5)
            elif kind is UiEventKind.CLIENT_CONNECTED:
                event = UiEvent.client_connected(t, "fuzz")
            else:
                event = UiEvent(kind, t)
            try:
                fsm.handle(event)
            except RejectedEventError:
                rejected += 1
            assert fsm.state.tag in Tag
        assert rejected > 0  # the generator does produce malformed payloads
