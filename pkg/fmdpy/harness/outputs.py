"""
output files. floats carry 12 significant digits, lines end with '\n' and
nothing run-dependent (wall time, paths) is written, so equal inputs and
seeds give byte-identical files.
"""
import io
import json
import logging
import math
import os
import typing as t

import pandas as pd
from Redy.Tools.PathLib import Path

logger = logging.getLogger(__name__)

FLOAT_FORMAT = '%.12g'
OUT_ENV = 'FMDPY_OUT'


def output_dir(out: t.Optional[str] = None) -> Path:
    directory = Path(out or os.environ.get(OUT_ENV) or '.')
    if not directory.exists():
        directory.mkdir()
    return directory


def _write(path: Path, text: str):
    with path.open('wb') as f:
        f.write(text.encode('utf-8'))
    logger.info('wrote %s', path)


def write_text(directory: Path, name: str, text: str) -> Path:
    path = directory.into(name)
    _write(path, text)
    return path


def format_csv(frame: pd.DataFrame) -> str:
    buffer = io.StringIO()
    frame.to_csv(buffer, index=False, float_format=FLOAT_FORMAT, lineterminator='\n')
    return buffer.getvalue()


def write_csv(directory: Path, name: str, frame: pd.DataFrame) -> Path:
    return write_text(directory, name, format_csv(frame))


def _round(value):
    if isinstance(value, bool) or value is None or isinstance(value, (int, str)):
        return value
    if isinstance(value, float):
        if not math.isfinite(value):
            return None
        return float(FLOAT_FORMAT % value)
    if isinstance(value, dict):
        return {str(k): _round(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_round(v) for v in value]
    # numpy scalars
    if hasattr(value, 'item'):
        return _round(value.item())
    return value


def format_json(obj: dict) -> str:
    """
    title: json rounding
    prepare:
    >>> from fmdpy.harness.outputs import format_json
    test:
    >>> import json
    >>> text = format_json({'b': 1 / 3, 'a': float('nan'), 'c': [True, 2]})
    >>> assert text.endswith('}\\n') and text.index('"a"') < text.index('"b"')
    >>> assert json.loads(text) == {'a': None, 'b': 0.333333333333, 'c': [True, 2]}
    """
    return json.dumps(_round(obj), sort_keys=True, indent=2) + '\n'


def write_json(directory: Path, name: str, obj: dict) -> Path:
    return write_text(directory, name, format_json(obj))
