import hashlib
import json
import logging
import os
import tempfile

import numpy as np

from field_lab import __version__

logger = logging.getLogger(__name__)

# Shortest repr that round-trips a float64.
FLOAT_FORMAT = "%.17g"


def sha256_hash(data):
    """
    Hex digest that identifies a run configuration in output headers.
    Non-string input is hashed through its canonical JSON form, so two
    configs with the same keys and values hash alike whatever their order.
    """
    if not isinstance(data, str):
        data = serialize(data)
    return hashlib.sha256(data.encode()).hexdigest()


def serialize(obj):
    """Canonical JSON: sorted keys, numpy scalars and arrays as plain values."""
    return json.dumps(obj, sort_keys=True, default=_json_default)


def _json_default(obj):
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    return str(obj)


def provenance_lines(config_hash, seed, extra=None):
    """
    Header lines that open every output file.
    """
    lines = [
        f"# tool=field-lab {__version__}",
        f"# config_hash={config_hash}",
        f"# seed={seed}",
    ]
    for key, value in sorted((extra or {}).items()):
        lines.append(f"# {key}={value}")
    return lines


def atomic_write_bytes(path, payload):
    """
    Write bytes next to the target and rename into place.
    """
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp_path = tempfile.mkstemp(dir=directory, prefix=".tmp-")
    try:
        with os.fdopen(fd, "wb") as handle:
            handle.write(payload)
        os.replace(tmp_path, path)
    except Exception:
        if os.path.exists(tmp_path):
            os.remove(tmp_path)
        raise


def write_table(path, frame, header_lines=()):
    """
    Write a pandas DataFrame as CSV with '#'-prefixed header lines.
    """
    body = frame.to_csv(index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
    text = "".join(line + "\n" for line in header_lines) + body
    atomic_write_bytes(path, text.encode("utf-8"))
    logger.debug("wrote %d rows to %s", len(frame), path)


def relative_error(actual, expected):
    actual = np.asarray(actual)
    expected = np.asarray(expected)
    scale = float(np.linalg.norm(expected.ravel()))
    diff = float(np.linalg.norm((actual - expected).ravel()))
    if scale == 0.0:
        return diff
    return diff / scale
