"""Glue between the pure FSM and the outside world.

The runtime owns the serialized event loop: it feeds UiEvents to the
FSM, executes the returned effects (logging, host injection, broadcast,
audio-as-transcript), and synthesizes the StateEnter/StateExit log
events around state changes and privacy spans so persisted logs stay
well-nested.
"""

from __future__ import annotations

from typing import Any, Callable

from .interaction import HostAdapter, HostControlDisabledError
from .session_log import LogEvent, LogKind, SessionLog
from .state_machine import (
    Effect,
    EffectKind,
    Fsm,
    RejectedEventError,
    SessionContext,
    StateSnapshot,
    TaskState,
    UiEvent,
)

Broadcaster = Callable[[StateSnapshot], None]
TranscriptSink = Callable[[dict[str, Any]], None]


class Runtime:
    """Executes effects for one FSM session; single-threaded by contract."""

    def __init__(
        self,
        ctx: SessionContext | None = None,
        state: TaskState | None = None,
        log: SessionLog | None = None,
        host: HostAdapter | None = None,
        broadcaster: Broadcaster | None = None,
        transcript: TranscriptSink | None = None,
        on_calibration: Callable[[str], None] | None = None,
    ):
        self.fsm = Fsm(ctx=ctx, state=state)
        self.log = log if log is not None else SessionLog()
        self.host = host
        self._broadcaster = broadcaster
        self._transcript = transcript
        self._on_calibration = on_calibration
        self._started = False
        self.rejected_events: list[tuple[UiEvent, str]] = []

    @property
    def snapshot(self) -> StateSnapshot:
        return self.fsm.snapshot()

    def start(self, t_ms: int) -> None:
        """Open the state log with the initial state's enter event."""
        if self._started:
            return
        self._started = True
        self._log_state_enter(self.fsm.state, t_ms)

    def submit(self, event: UiEvent) -> tuple[Effect, ...]:
        """Dispatch one event, execute its effects; swallows rejections.

        Rejected events leave the FSM unchanged and are recorded on
        rejected_events; a live assistive session must not crash on a
        stale client event.
        """
        if not self._started:
            self.start(event.timestamp_ms)
        before_state = self.fsm.state
        before_privacy = self.fsm.ctx.privacy_active
        try:
            effects = self.fsm.handle(event)
        except RejectedEventError as exc:
            self.rejected_events.append((event, exc.reason))
            self._note("rejected_event", t=event.timestamp_ms,
                       event_kind=event.kind.value, reason=exc.reason)
            return ()
        t = event.timestamp_ms
        after_privacy = self.fsm.ctx.privacy_active
        if after_privacy and not before_privacy:
            # Close the open state before the span begins so the
            # persisted log stays well-nested around the blackout.
            self.log.record(
                LogEvent(t, LogKind.STATE_EXIT, {"tag": before_state.tag.value}),
                privacy_active=False)
        if self.fsm.state.tag is not before_state.tag:
            self._log_state_exit(before_state, t)
            self._log_state_enter(self.fsm.state, t)
        self._execute(effects, t)
        if before_privacy and not after_privacy:
            # Span end was just recorded via its LogAppend effect;
            # re-enter the current state so later exits pair up.
            self.log.record(
                LogEvent(t, LogKind.STATE_ENTER, {"tag": self.fsm.state.tag.value}),
                privacy_active=False)
        return effects

    def tick(self, now_ms: int) -> list[tuple[Effect, ...]]:
        return [self.submit(ev) for ev in self.fsm.tick(now_ms)]

    def shutdown(self, t_ms: int) -> None:
        """Append the closing state-exit so the log stays well-nested."""
        if self._started:
            self._log_state_exit(self.fsm.state, t_ms)
            self._started = False
        if self._broadcaster is not None:
            self._broadcaster(self.fsm.snapshot())
        self.log.close()

    # -- effect execution -----------------------------------------------

    def _execute(self, effects: tuple[Effect, ...], t: int) -> None:
        for effect in effects:
            if effect.kind is EffectKind.LOG_APPEND:
                assert effect.log_event is not None
                self._record(effect.log_event)
            elif effect.kind is EffectKind.BROADCAST_SNAPSHOT:
                if self._broadcaster is not None:
                    self._broadcaster(self.fsm.snapshot())
            elif effect.kind is EffectKind.PLAY_TTS:
                self._note("play_tts", t=t, text=effect.text)
            elif effect.kind is EffectKind.TYPE_TO_HOST:
                self._inject_text(effect.text or "", t)
            elif effect.kind is EffectKind.HOST_POINTER:
                self._inject_action(effect, t)
            elif effect.kind is EffectKind.SOUND_EFFECT:
                self._note("sound", t=t, name=effect.name)
            elif effect.kind is EffectKind.HORN:
                self._note("horn", t=t)
            elif effect.kind is EffectKind.START_CALIBRATION:
                self._note("start_calibration", t=t, modality=effect.modality)
                if self._on_calibration is not None and effect.modality:
                    self._on_calibration(effect.modality)

    def _inject_text(self, text: str, t: int) -> None:
        from .interaction import HostAction

        if self.host is None:
            self._note("host_dropped", t=t, reason="no adapter", text=text)
            return
        try:
            record = self.host.inject(HostAction.type_text(text))
        except HostControlDisabledError:
            self._note("host_rejected", t=t, reason="disabled")
            return
        self._note("host_command", t=t, record=record)

    def _inject_action(self, effect: Effect, t: int) -> None:
        if self.host is None or effect.action is None:
            self._note("host_dropped", t=t, reason="no adapter")
            return
        try:
            record = self.host.inject(effect.action)
        except HostControlDisabledError:
            self._note("host_rejected", t=t, reason="disabled")
            return
        self._note("host_command", t=t, record=record)

    # -- logging helpers --------------------------------------------------

    def _record(self, event: LogEvent) -> None:
        self.log.record(event, self.fsm.ctx.privacy_active)

    def _log_state_enter(self, state: TaskState, t: int) -> None:
        self.log.record(LogEvent(t, LogKind.STATE_ENTER, {"tag": state.tag.value}),
                        self.fsm.ctx.privacy_active)

    def _log_state_exit(self, state: TaskState, t: int) -> None:
        self.log.record(LogEvent(t, LogKind.STATE_EXIT, {"tag": state.tag.value}),
                        self.fsm.ctx.privacy_active)

    def _note(self, kind: str, **fields: Any) -> None:
        if self._transcript is not None:
            self._transcript({"event": kind, **fields})
