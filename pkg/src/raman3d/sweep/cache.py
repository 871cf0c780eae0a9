"""Content-addressed result cache: one JSON file per input hash."""

from __future__ import annotations

import hashlib
import json
import math
import os
import tempfile
import time


def _normalise(obj):
    if isinstance(obj, float):
        if math.isinf(obj):
            return "infinite" if obj > 0 else "-infinite"
        # fixed precision so representation noise never changes the hash
        return float(f"{obj:.15g}")
    if isinstance(obj, dict):
        return {str(k): _normalise(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_normalise(v) for v in obj]
    return obj


def canonical_json(inputs: dict) -> str:
    return json.dumps(_normalise(inputs), sort_keys=True, separators=(",", ":"))


def params_hash(inputs: dict) -> str:
    """128-bit hex digest of the canonical input JSON."""
    return hashlib.blake2b(canonical_json(inputs).encode("utf-8"), digest_size=16).hexdigest()


class ResultCache:
    def __init__(self, directory):
        self.directory = os.fspath(directory)
        os.makedirs(self.directory, exist_ok=True)

    def _path(self, digest):
        return os.path.join(self.directory, f"{digest}.json")

    def get(self, inputs: dict):
        digest = params_hash(inputs)
        try:
            with open(self._path(digest), encoding="utf-8") as fh:
                record = json.load(fh)
        except (OSError, json.JSONDecodeError):
            return None
        if record.get("params_hash") != digest or record.get("inputs") != json.loads(canonical_json(inputs)):
            return None
        return record["outputs"]

    def put(self, inputs: dict, outputs: dict, tool_version: str) -> str:
        digest = params_hash(inputs)
        record = {
            "params_hash": digest,
            "inputs": json.loads(canonical_json(inputs)),
            "outputs": outputs,
            "tool_version": tool_version,
            "timestamp": time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()),
        }
        fd, tmp = tempfile.mkstemp(dir=self.directory, prefix=".tmp-", suffix=".json")
        try:
            with os.fdopen(fd, "w", encoding="utf-8") as fh:
                json.dump(record, fh, indent=1, sort_keys=True)
            os.replace(tmp, self._path(digest))
        except BaseException:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise
        return digest
