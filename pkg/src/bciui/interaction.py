"""Pointer pipeline: hit testing, gaze magnetization, dwell selection,
control-modality routing, and the host-injection adapter.

Magnetization is a discrete snap: once the pointer enters a button's
capture region it jumps to the button center, which makes dwell
selection exactly testable. Capture regions of enabled buttons must
never overlap; layouts are validated on construction.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import IO, Any, Iterable, Mapping

DEFAULT_CAPTURE_SCALE = 1.5
DEFAULT_DWELL_MS = 800


class LayoutError(Exception):
    """Invalid layout geometry or layout file."""


class HostControlDisabledError(Exception):
    """Host injection attempted while host control is disabled."""


class PointerSource(str, Enum):
    NEURAL_CURSOR = "NeuralCursor"
    GAZE = "Gaze"
    EXTERNAL = "External"


class Destination(str, Enum):
    UI_POINTER = "UiPointer"
    HOST_POINTER = "HostPointer"
    DROPPED = "Dropped"


@dataclass(frozen=True)
class Button:
    id: str
    center: tuple[float, float]
    radius: float
    label: str = ""
    enabled: bool = True

    def __post_init__(self) -> None:
        if self.radius <= 0:
            raise LayoutError(f"button {self.id!r}: radius must be > 0")


@dataclass(frozen=True)
class Layout:
    screen: str
    display_size: tuple[int, int]
    buttons: tuple[Button, ...]
    capture_scale: float = DEFAULT_CAPTURE_SCALE
    dwell_ms: int = DEFAULT_DWELL_MS

    def __post_init__(self) -> None:
        if self.capture_scale < 1.0:
            raise LayoutError("capture scale must be >= 1 (capture >= button radius)")
        ids = [b.id for b in self.buttons]
        if len(set(ids)) != len(ids):
            raise LayoutError(f"{self.screen}: duplicate button ids")
        w, h = self.display_size
        for b in self.buttons:
            x, y = b.center
            if not (b.radius <= x <= w - b.radius and b.radius <= y <= h - b.radius):
                raise LayoutError(
                    f"{self.screen}: button {b.id!r} extends outside the display")
        enabled = [b for b in self.buttons if b.enabled]
        for i, b1 in enumerate(enabled):
            for b2 in enabled[i + 1:]:
                gap = math.dist(b1.center, b2.center)
                if gap < self.capture_radius(b1) + self.capture_radius(b2):
                    raise LayoutError(
                        f"{self.screen}: capture regions of {b1.id!r} and "
                        f"{b2.id!r} overlap")

    def capture_radius(self, button: Button) -> float:
        return self.capture_scale * button.radius

    def button(self, button_id: str) -> Button | None:
        for b in self.buttons:
            if b.id == button_id:
                return b
        return None


@dataclass(frozen=True)
class PointerSample:
    p: tuple[float, float]
    source: PointerSource
    t_ms: int

    def to_dict(self) -> dict[str, Any]:
        return {"p": list(self.p), "source": self.source.value, "t": self.t_ms}

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "PointerSample":
        x, y = data["p"]
        return cls(p=(float(x), float(y)), source=PointerSource(data["source"]),
                   t_ms=int(data["t"]))


def clamp_to_display(p: tuple[float, float],
                     display_size: tuple[int, int]) -> tuple[float, float]:
    w, h = display_size
    return (min(max(p[0], 0.0), float(w)), min(max(p[1], 0.0), float(h)))


@dataclass(frozen=True)
class ControlRouting:
    """Which pointer source drives the UI and which (if any) the host."""

    ui_source: PointerSource = PointerSource.GAZE
    host_source: PointerSource | None = None

    def __post_init__(self) -> None:
        if self.host_source is not None and self.host_source == self.ui_source:
            raise LayoutError("UI and host cannot share a pointer source")


def magnetize(p: tuple[float, float], layout: Layout,
              capture_radius: float | None = None) -> tuple[float, float]:
    """Snap to the nearest enabled button center within capture range.

    With capture_radius None each button uses capture_scale * radius;
    a float applies one uniform radius. Nearest center wins; exact ties
    break on button id. Points outside every capture region pass
    through unchanged.
    """
    best: tuple[float, str, tuple[float, float]] | None = None
    for b in layout.buttons:
        if not b.enabled:
            continue
        cap = capture_radius if capture_radius is not None else layout.capture_radius(b)
        d = math.dist(p, b.center)
        if d <= cap:
            key = (d, b.id, b.center)
            if best is None or key < best:
                best = key
    return best[2] if best is not None else p


def hit_button(p: tuple[float, float], layout: Layout,
               capture_radius: float | None = None) -> Button | None:
    """The button capturing p under the magnetization rule, if any."""
    snapped = magnetize(p, layout, capture_radius)
    for b in layout.buttons:
        if b.enabled and b.center == snapped:
            return b
    return None


@dataclass(frozen=True)
class DwellSelection:
    button_id: str
    t_ms: int


class DwellTracker:
    """Incremental dwell detector over magnetized pointer samples.

    A selection fires when samples stay on one button continuously for
    at least dwell_ms; leaving the button resets the accumulator, and a
    fired button cannot re-fire until the pointer leaves it.
    """

    def __init__(self, layout: Layout, dwell_ms: int | None = None,
                 capture_radius: float | None = None):
        if dwell_ms is not None and dwell_ms <= 0:
            raise LayoutError("dwell duration must be > 0")
        self.layout = layout
        self.dwell_ms = dwell_ms if dwell_ms is not None else layout.dwell_ms
        self.capture_radius = capture_radius
        self._button_id: str | None = None
        self._entered_ms = 0
        self._fired = False

    def feed(self, sample: PointerSample) -> list[DwellSelection]:
        button = hit_button(sample.p, self.layout, self.capture_radius)
        if button is None:
            self._button_id = None
            self._fired = False
            return []
        if button.id != self._button_id:
            self._button_id = button.id
            self._entered_ms = sample.t_ms
            self._fired = False
        if not self._fired and sample.t_ms - self._entered_ms >= self.dwell_ms:
            self._fired = True
            return [DwellSelection(button_id=button.id, t_ms=sample.t_ms)]
        return []


def dwell_select(samples: Iterable[PointerSample], layout: Layout,
                 dwell_ms: int | None = None,
                 capture_radius: float | None = None) -> list[DwellSelection]:
    """Offline scan of a sample stream for dwell selections."""
    tracker = DwellTracker(layout, dwell_ms, capture_radius)
    selections: list[DwellSelection] = []
    for sample in samples:
        selections.extend(tracker.feed(sample))
    return selections


def route(sample: PointerSample, routing: ControlRouting) -> Destination:
    """Partition samples between UI and host; everything else is dropped."""
    if sample.source == routing.ui_source:
        return Destination.UI_POINTER
    if routing.host_source is not None and sample.source == routing.host_source:
        return Destination.HOST_POINTER
    return Destination.DROPPED


class HostActionKind(str, Enum):
    TYPE_TEXT = "text"
    MOVE_CURSOR = "move"
    CLICK = "click"
    KEY = "key"


HOST_KEYS = frozenset({"tab", "enter", "space", "backspace",
                       "up", "down", "left", "right"})


@dataclass(frozen=True)
class HostAction:
    kind: HostActionKind
    text: str | None = None
    dx: int = 0
    dy: int = 0
    key: str | None = None

    def __post_init__(self) -> None:
        if self.kind is HostActionKind.KEY and self.key not in HOST_KEYS:
            raise LayoutError(f"unsupported host key {self.key!r}")
        if self.kind is HostActionKind.TYPE_TEXT and self.text is None:
            raise LayoutError("TypeText requires text")

    @classmethod
    def type_text(cls, text: str) -> "HostAction":
        return cls(kind=HostActionKind.TYPE_TEXT, text=text)

    @classmethod
    def move(cls, dx: int, dy: int) -> "HostAction":
        return cls(kind=HostActionKind.MOVE_CURSOR, dx=dx, dy=dy)

    @classmethod
    def click(cls) -> "HostAction":
        return cls(kind=HostActionKind.CLICK)

    @classmethod
    def press_key(cls, key: str) -> "HostAction":
        return cls(kind=HostActionKind.KEY, key=key)

    def to_record(self) -> dict[str, Any]:
        if self.kind is HostActionKind.TYPE_TEXT:
            return {"type": "text", "value": self.text}
        if self.kind is HostActionKind.MOVE_CURSOR:
            return {"type": "move", "dx": self.dx, "dy": self.dy}
        if self.kind is HostActionKind.CLICK:
            return {"type": "click"}
        return {"type": "key", "value": self.key}


class HostAdapter:
    """Outbox of host command records consumed by a pluggable sink.

    Real OS injection is out of scope; the file sink writes one JSON
    record per line, the in-memory outbox is always kept for tests.
    """

    def __init__(self, enabled: bool = True, sink_path: str | Path | None = None):
        self.enabled = enabled
        self.outbox: list[dict[str, Any]] = []
        self._fh: IO[str] | None = None
        if sink_path is not None:
            path = Path(sink_path)
            path.parent.mkdir(parents=True, exist_ok=True)
            self._fh = path.open("a", encoding="utf-8")

    def inject(self, action: HostAction) -> dict[str, Any]:
        """Append exactly one command record; rejected while disabled."""
        if not self.enabled:
            raise HostControlDisabledError("host control is disabled")
        record = action.to_record()
        self.outbox.append(record)
        if self._fh is not None:
            self._fh.write(json.dumps(record, sort_keys=True) + "\n")
            self._fh.flush()
        return record

    def close(self) -> None:
        if self._fh is not None:
            self._fh.close()
            self._fh = None


def layout_from_dict(data: Mapping[str, Any]) -> Layout:
    try:
        buttons = tuple(
            Button(
                id=str(b["id"]),
                center=(float(b["center"][0]), float(b["center"][1])),
                radius=float(b["radius"]),
                label=str(b.get("label", "")),
                enabled=bool(b.get("enabled", True)),
            )
            for b in data["buttons"]
        )
        return Layout(
            screen=str(data["screen"]),
            display_size=(int(data["display"][0]), int(data["display"][1])),
            buttons=buttons,
            capture_scale=float(data.get("capture_scale", DEFAULT_CAPTURE_SCALE)),
            dwell_ms=int(data.get("dwell_ms", DEFAULT_DWELL_MS)),
        )
    except (KeyError, TypeError, ValueError, IndexError) as exc:
        raise LayoutError(f"malformed layout document: {exc}") from exc


def layout_to_dict(layout: Layout) -> dict[str, Any]:
    return {
        "screen": layout.screen,
        "display": list(layout.display_size),
        "capture_scale": layout.capture_scale,
        "dwell_ms": layout.dwell_ms,
        "buttons": [
            {"id": b.id, "center": list(b.center), "radius": b.radius,
             "label": b.label, "enabled": b.enabled}
            for b in layout.buttons
        ],
    }


def load_layouts(path: str | Path) -> dict[str, Layout]:
    """Layout file: JSON mapping screen tag -> layout document."""
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise LayoutError(f"{path}: invalid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise LayoutError(f"{path}: expected an object of screen -> layout")
    layouts = {}
    for screen, doc in data.items():
        layout = layout_from_dict({"screen": screen, **doc})
        layouts[screen] = layout
    return layouts


def bundled_layouts_path() -> Path:
    return Path(__file__).parent / "data" / "layouts.json"
