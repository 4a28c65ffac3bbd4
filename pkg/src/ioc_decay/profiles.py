"""Decay-profile persistence: one JSON file per attribute type.

Profiles are keyed by exact attr_type match with a ``"*"`` fallback. Writes
go through a temp file and an atomic rename.
"""

from __future__ import annotations

import json
import os
import tempfile
from pathlib import Path
from typing import Optional, Union
from urllib.parse import quote, unquote

from .model import DecayProfile, validate_profile

FALLBACK_TYPE = "*"


class ProfileStore:
    def __init__(self, directory: Union[str, Path]) -> None:
        self.directory = Path(directory)
        self.directory.mkdir(parents=True, exist_ok=True)

    def _path(self, attr_type: str) -> Path:
        # Percent-encode so any attr_type (including "*" and "/") maps to a safe filename.
        return self.directory / f"{quote(attr_type, safe='')}.json"

    def save(self, profile: DecayProfile) -> None:
        validate_profile(profile)
        payload = json.dumps(profile.to_json_dict(), indent=2) + "\n"
        fd, tmp_name = tempfile.mkstemp(dir=self.directory, suffix=".tmp")
        try:
            with os.fdopen(fd, "w", encoding="utf-8") as fh:
                fh.write(payload)
            os.replace(tmp_name, self._path(profile.attr_type))
        except BaseException:
            if os.path.exists(tmp_name):
                os.unlink(tmp_name)
            raise

    def get(self, attr_type: str) -> Optional[DecayProfile]:
        path = self._path(attr_type)
        if not path.exists():
            return None
        return DecayProfile.from_json_dict(json.loads(path.read_text(encoding="utf-8")))

    def resolve(self, attr_type: str) -> Optional[DecayProfile]:
        """Exact-match profile, falling back to the ``"*"`` profile."""
        return self.get(attr_type) or self.get(FALLBACK_TYPE)

    def list(self) -> list[DecayProfile]:
        profiles = []
        for path in self.directory.glob("*.json"):
            attr_type = unquote(path.stem)
            profile = self.get(attr_type)
            if profile is not None:
                profiles.append(profile)
        return sorted(profiles, key=lambda p: p.attr_type)

    def delete(self, attr_type: str) -> bool:
        path = self._path(attr_type)
        if path.exists():
            path.unlink()
            return True
        return False
