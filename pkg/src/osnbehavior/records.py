"""Event and retweet-observation records plus their JSON-lines codecs."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from datetime import datetime, timezone
from typing import Iterable, Optional

from .errors import MonotonicityError, ParseError

_TS_FORMAT = "%Y-%m-%dT%H:%M:%SZ"


def parse_timestamp(text: str) -> datetime:
    """Parse an RFC 3339 timestamp into an aware UTC datetime.

    Sub-second digits are truncated.  A missing offset is rejected rather than
    guessed.
    """
    if not isinstance(text, str) or len(text.strip()) < 19:
        raise ValueError(f"not an RFC 3339 timestamp: {text!r}")
    s = text.strip()
    if s[-1] in "Zz":
        s = s[:-1] + "+00:00"
    if s[10] not in "Tt ":
        raise ValueError(f"not an RFC 3339 timestamp: {text!r}")
    s = s[:10] + "T" + s[11:]
    try:
        dt = datetime.fromisoformat(s)
    except ValueError:
        raise ValueError(f"not an RFC 3339 timestamp: {text!r}") from None
    if dt.tzinfo is None:
        raise ValueError(f"timestamp has no UTC offset: {text!r}")
    return dt.astimezone(timezone.utc).replace(microsecond=0)


def format_timestamp(dt: datetime) -> str:
    return dt.astimezone(timezone.utc).strftime(_TS_FORMAT)


@dataclass(frozen=True)
class EventRecord:
    user_id: str
    message_id: str
    timestamp: datetime
    retweet_of: Optional[str] = None

    def __post_init__(self):
        if not isinstance(self.user_id, str) or not self.user_id:
            raise ValueError("empty user_id")
        if not isinstance(self.message_id, str) or not self.message_id:
            raise ValueError("empty message_id")
        if self.timestamp.tzinfo is None:
            raise ValueError("timestamp must be timezone-aware")
        if self.retweet_of is not None:
            if not isinstance(self.retweet_of, str) or not self.retweet_of:
                raise ValueError("retweet_of must be a non-empty string")
            if self.retweet_of == self.message_id:
                raise ValueError("retweet_of equals message_id")

    def to_dict(self) -> dict:
        d = {
            "user_id": self.user_id,
            "message_id": self.message_id,
            "timestamp": format_timestamp(self.timestamp),
        }
        if self.retweet_of is not None:
            d["retweet_of"] = self.retweet_of
        return d


@dataclass(frozen=True)
class RetweetObservation:
    message_id: str
    age_hours: float
    count: float  # integer for loaded data; real only for noiseless synthetic curves

    def __post_init__(self):
        if not isinstance(self.message_id, str) or not self.message_id:
            raise ValueError("empty message_id")
        if not math.isfinite(self.age_hours) or self.age_hours < 0:
            raise ValueError(f"age_hours must be finite and >= 0, got {self.age_hours!r}")
        if self.count < 0:
            raise ValueError(f"count must be >= 0, got {self.count!r}")

    def to_dict(self) -> dict:
        return {"message_id": self.message_id, "age_hours": self.age_hours, "count": self.count}


def _load_object(line: str, line_number):
    try:
        obj = json.loads(line)
    except json.JSONDecodeError as exc:
        raise ParseError(f"malformed JSON ({exc.msg})", line_number) from None
    if not isinstance(obj, dict):
        raise ParseError("expected a JSON object", line_number)
    return obj


def _require(obj: dict, key: str, line_number):
    if key not in obj:
        raise ParseError(f"missing required key {key!r}", line_number)
    return obj[key]


def parse_event_line(line: str, line_number: Optional[int] = None) -> EventRecord:
    """Parse one events.jsonl line; unknown keys are ignored."""
    obj = _load_object(line, line_number)
    user_id = _require(obj, "user_id", line_number)
    message_id = _require(obj, "message_id", line_number)
    raw_ts = _require(obj, "timestamp", line_number)
    try:
        ts = parse_timestamp(raw_ts)
    except ValueError as exc:
        raise ParseError(str(exc), line_number) from None
    try:
        return EventRecord(user_id, message_id, ts, obj.get("retweet_of"))
    except (TypeError, ValueError) as exc:
        raise ParseError(str(exc), line_number) from None


def format_event_line(event: EventRecord) -> str:
    return json.dumps(event.to_dict(), separators=(",", ":"))


def parse_observation_line(line: str, line_number: Optional[int] = None) -> RetweetObservation:
    obj = _load_object(line, line_number)
    message_id = _require(obj, "message_id", line_number)
    age = _require(obj, "age_hours", line_number)
    count = _require(obj, "count", line_number)
    if isinstance(age, bool) or not isinstance(age, (int, float)):
        raise ParseError("age_hours must be a number", line_number)
    if isinstance(count, bool) or not isinstance(count, (int, float)) or count != int(count):
        raise ParseError("count must be an integer", line_number)
    try:
        return RetweetObservation(message_id, float(age), int(count))
    except (TypeError, ValueError) as exc:
        raise ParseError(str(exc), line_number) from None


def format_observation_line(obs: RetweetObservation) -> str:
    return json.dumps(obs.to_dict(), separators=(",", ":"))


def _content_lines(lines: Iterable[str]):
    for number, line in enumerate(lines, start=1):
        if line.strip():
            yield number, line


def load_events(lines: Iterable[str]) -> list[EventRecord]:
    return [parse_event_line(line, number) for number, line in _content_lines(lines)]


def load_observations(lines: Iterable[str]) -> dict[str, list[RetweetObservation]]:
    """Group observations by message id, each series sorted by age.

    Raises MonotonicityError if a cumulative count ever decreases with age.
    """
    groups: dict[str, list[RetweetObservation]] = {}
    for number, line in _content_lines(lines):
        obs = parse_observation_line(line, number)
        groups.setdefault(obs.message_id, []).append(obs)
    for message_id, series in groups.items():
        series.sort(key=lambda o: (o.age_hours, o.count))
        for prev, cur in zip(series, series[1:]):
            if cur.count < prev.count:
                raise MonotonicityError(message_id, cur.age_hours)
    return groups
