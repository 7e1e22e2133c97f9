"""Desk-scale assistive communication UI backend.

A finite-state-machine logic node driven by simulated neural decoders,
a noisy-channel sentence correction engine, a snapshot-broadcast
protocol for graphics clients, and session analytics.
"""

__version__ = "0.1.0"

from .state_machine import (  # noqa: F401
    Effect,
    EffectKind,
    Fsm,
    Rating,
    RejectedEventError,
    SessionContext,
    StateSnapshot,
    Tag,
    TaskState,
    UiEvent,
    UiEventKind,
    dispatch,
    snapshot,
)
