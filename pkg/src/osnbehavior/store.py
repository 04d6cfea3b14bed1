"""JSON model store: fitted user mixtures and message growth curves."""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path

from .errors import OsnError, StoreVersionError
from .gmm import GmmFit
from .loggrowth import LogGrowthFit
from .records import format_timestamp, parse_timestamp

FORMAT_VERSION = 1
EPOCH = datetime(1970, 1, 1, tzinfo=timezone.utc)


@dataclass
class ModelStore:
    user_fits: dict[str, dict[str, GmmFit]] = field(default_factory=dict)
    message_fits: dict[str, LogGrowthFit] = field(default_factory=dict)
    created_at: datetime = EPOCH
    format_version: int = FORMAT_VERSION

    def to_dict(self) -> dict:
        return {
            "format_version": self.format_version,
            "created_at": format_timestamp(self.created_at),
            "user_fits": {
                user: {pattern: fit.to_dict() for pattern, fit in sorted(fits.items())}
                for user, fits in sorted(self.user_fits.items())
            },
            "message_fits": {
                mid: fit.to_dict() for mid, fit in sorted(self.message_fits.items())
            },
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "ModelStore":
        version = doc.get("format_version")
        if version != FORMAT_VERSION:
            raise StoreVersionError(
                f"unsupported model store format_version {version!r} (expected {FORMAT_VERSION})"
            )
        try:
            return cls(
                user_fits={
                    user: {pattern: GmmFit.from_dict(f) for pattern, f in fits.items()}
                    for user, fits in doc.get("user_fits", {}).items()
                },
                message_fits={
                    mid: LogGrowthFit.from_dict(f)
                    for mid, f in doc.get("message_fits", {}).items()
                },
                created_at=parse_timestamp(doc["created_at"]),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise OsnError(f"malformed model store: {exc}") from None

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=False) + "\n"


def save_store(store: ModelStore, path) -> None:
    """Write atomically: a temp file in the same directory, then rename."""
    path = Path(path)
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(store.dumps(), encoding="utf-8")
    os.replace(tmp, path)


def load_store(path) -> ModelStore:
    text = Path(path).read_text(encoding="utf-8")
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise OsnError(f"{path}: not valid JSON ({exc.msg})") from None
    if not isinstance(doc, dict):
        raise OsnError(f"{path}: model store must be a JSON object")
    return ModelStore.from_dict(doc)
