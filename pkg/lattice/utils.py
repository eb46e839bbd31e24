import csv
import json
import math
import numbers
import os
import tempfile
from pathlib import Path

from .constants import CSV_FLOAT_FORMAT


def format_cell(value):
    if value is None:
        return ''
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, numbers.Integral):
        return str(int(value))
    if isinstance(value, numbers.Real):
        value = float(value)
        if math.isnan(value):
            return 'nan'
        if math.isinf(value):
            return 'inf' if value > 0 else '-inf'
        return CSV_FLOAT_FORMAT.format(value)
    return str(value)


def _atomic_write(path, write):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp_path = tempfile.mkstemp(prefix=path.stem + '.', suffix='.tmp',
                                    dir=str(path.parent))
    try:
        with os.fdopen(fd, 'w', newline='', encoding='utf-8') as handle:
            write(handle)
        os.replace(tmp_path, path)
    except Exception:
        if os.path.exists(tmp_path):
            os.remove(tmp_path)
        raise
    return path


def write_csv(path, header, rows):
    """Write a header and rows, floats with 17 significant digits."""
    def write(handle):
        writer = csv.writer(handle, lineterminator='\n')
        writer.writerow(header)
        for row in rows:
            writer.writerow([format_cell(value) for value in row])
    return _atomic_write(path, write)


def write_json(path, data):
    def write(handle):
        json.dump(data, handle, indent=2, sort_keys=True)
        handle.write('\n')
    return _atomic_write(path, write)


def flatten_errors(errors, prefix=''):
    """DRF error details as ``field: message`` lines."""
    lines = []
    if isinstance(errors, dict):
        for key, value in errors.items():
            name = '' if key == 'non_field_errors' else key
            label = '.'.join(part for part in (prefix, name) if part)
            lines.extend(flatten_errors(value, label))
    elif isinstance(errors, (list, tuple)):
        for value in errors:
            lines.extend(flatten_errors(value, prefix))
    else:
        lines.append(f'{prefix}: {errors}' if prefix else str(errors))
    return lines
