"""CSV and config plumbing.

Complex CSV entries use the `a+bi` form with `.` as the decimal separator.
Result CSVs carry a fixed column order with floats printed to 17 significant
digits, so write -> read -> write reproduces the file byte for byte and no
timestamps ever enter data rows.
"""

import csv
import os
import re

import numpy as np
import tomli

from .errors import RmtkitError, ValidationError

_FLOAT_FMT = "%.17g"
_COMPLEX_RE = re.compile(
    r"^\s*([+-]?[\d.eE+-]*?)\s*([+-]\s*[\d.eE+-]*?)i\s*$"
)


def format_float(x):
    return _FLOAT_FMT % float(x)


def format_complex(z):
    z = complex(z)
    re_s = _FLOAT_FMT % z.real
    im_s = _FLOAT_FMT % abs(z.imag)
    sign = "-" if (z.imag < 0 or (z.imag == 0 and str(z.imag)[0] == "-")) else "+"
    return f"{re_s}{sign}{im_s}i"


def parse_complex(s):
    s = s.strip()
    m = _COMPLEX_RE.match(s)
    if m:
        re_part, im_part = m.group(1), m.group(2).replace(" ", "")
        if im_part in ("+", "-"):
            im_part += "1"
        try:
            return complex(float(re_part or 0.0), float(im_part))
        except ValueError:
            pass
    try:
        return complex(float(s))
    except ValueError as exc:
        raise ValidationError(f"cannot parse complex entry {s!r}") from exc


def write_matrix_csv(A, path):
    A = np.asarray(A, dtype=np.complex128)
    if A.ndim != 2:
        raise ValidationError("expected a 2-d array")
    try:
        with open(path, "w", newline="") as fh:
            for row in A:
                fh.write(",".join(format_complex(z) for z in row) + "\n")
    except OSError as exc:
        raise RmtkitError(f"cannot write matrix to {path}: {exc}") from exc


def read_matrix_csv(path):
    try:
        with open(path, newline="") as fh:
            rows = [
                [parse_complex(cell) for cell in line.split(",")]
                for line in (raw.strip() for raw in fh)
                if line
            ]
    except OSError as exc:
        raise RmtkitError(f"cannot read matrix from {path}: {exc}") from exc
    if not rows:
        raise ValidationError(f"empty matrix file {path}")
    width = len(rows[0])
    if any(len(r) != width for r in rows):
        raise ValidationError(f"ragged rows in matrix file {path}")
    return np.array(rows, dtype=np.complex128)


def _format_cell(value):
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return format_float(value)
    if isinstance(value, (complex, np.complexfloating)):
        return format_complex(value)
    return str(value)


_INT_RE = re.compile(r"^[+-]?\d+$")


def _parse_cell(text):
    if text == "true":
        return True
    if text == "false":
        return False
    if _INT_RE.match(text):
        return int(text)
    try:
        return float(text)
    except ValueError:
        pass
    if text.endswith("i"):
        try:
            return parse_complex(text)
        except ValidationError:
            pass
    return text


def persist_results(records, path, fieldnames=None):
    """Write dict records as CSV with a fixed column order.

    The column order is `fieldnames` if given, else the key order of the
    first record; all records must share exactly that key set.
    """
    records = list(records)
    if fieldnames is None:
        if not records:
            raise ValidationError(
                "cannot infer a header from an empty record list; "
                "pass fieldnames"
            )
        fieldnames = list(records[0].keys())
    for rec in records:
        if list(rec.keys()) != list(fieldnames) and set(rec) != set(fieldnames):
            raise ValidationError(
                f"record keys {sorted(rec)} do not match header {fieldnames}"
            )
    try:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(fieldnames)
            for rec in records:
                writer.writerow([_format_cell(rec[k]) for k in fieldnames])
    except OSError as exc:
        raise RmtkitError(f"cannot write results to {path}: {exc}") from exc


def load_results(path):
    try:
        with open(path, newline="") as fh:
            reader = csv.reader(fh)
            try:
                header = next(reader)
            except StopIteration:
                raise ValidationError(f"results file {path} has no header")
            rows = [
                {k: _parse_cell(v) for k, v in zip(header, row)}
                for row in reader
                if row
            ]
    except OSError as exc:
        raise RmtkitError(f"cannot read results from {path}: {exc}") from exc
    return header, rows


def load_config(path):
    """Parse a nested key/value (TOML) config file into a plain dict."""
    try:
        with open(path, "rb") as fh:
            return tomli.load(fh)
    except OSError as exc:
        raise RmtkitError(f"cannot read config {path}: {exc}") from exc
    except tomli.TOMLDecodeError as exc:
        raise ValidationError(f"malformed config {path}: {exc}") from exc


def resolve_matrix_field(value, n, base_dir=".", nonneg=False):
    """Resolve shift/scale config forms into an n x n array.

    Accepted forms: scalar number; the string "identity*c"; an inline list of
    row lists whose entries are numbers or `a+bi` strings; a path to a
    complex-CSV matrix file.
    """
    if isinstance(value, (int, float)):
        out = np.full((n, n), float(value), dtype=np.complex128)
    elif isinstance(value, str):
        m = re.match(r"^identity\s*\*\s*([^\s]+)$", value)
        if m:
            out = complex(parse_complex(_ident_coeff(m.group(1)))) * np.eye(
                n, dtype=np.complex128
            )
        else:
            out = read_matrix_csv(os.path.join(base_dir, value))
    elif isinstance(value, list):
        out = np.array(
            [
                [
                    parse_complex(cell) if isinstance(cell, str) else complex(cell)
                    for cell in row
                ]
                for row in value
            ],
            dtype=np.complex128,
        )
    else:
        raise ValidationError(f"unsupported matrix field {value!r}")
    if out.shape != (n, n):
        raise ValidationError(f"matrix field has shape {out.shape}, expected ({n}, {n})")
    if nonneg:
        if np.any(np.abs(out.imag) > 0):
            raise ValidationError("scale entries must be real")
        if np.any(out.real < 0):
            raise ValidationError("scale entries must be nonnegative")
        return np.ascontiguousarray(out.real)
    return out


def _ident_coeff(token):
    # allow bare reals like "2" or "0.5" as well as full a+bi entries
    return token if token.endswith("i") else token + "+0i"
