"""Shared plumbing: schema-checked CSV loading and deterministic saving."""

import csv

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402


class SchemaError(ValueError):
    """Input CSV does not match the documented rmtkit schema."""


def load_csv(path, required_columns):
    """Rows as dicts of floats; raises SchemaError naming missing columns."""
    try:
        with open(path, newline="") as fh:
            reader = csv.DictReader(fh)
            header = reader.fieldnames
            if header is None:
                raise SchemaError(f"{path}: empty file, no header row")
            missing = [c for c in required_columns if c not in header]
            if missing:
                raise SchemaError(
                    f"{path}: missing required column(s) {', '.join(missing)}"
                )
            rows = []
            for row in reader:
                try:
                    rows.append({c: float(row[c]) for c in required_columns})
                except (TypeError, ValueError) as exc:
                    raise SchemaError(
                        f"{path}: non-numeric cell in row {len(rows) + 2}"
                    ) from exc
    except OSError as exc:
        raise SchemaError(f"{path}: {exc}") from exc
    if not rows:
        raise SchemaError(f"{path}: no data rows under columns "
                          f"{', '.join(required_columns)}")
    return rows


def new_figure():
    return plt.subplots(figsize=(6.0, 6.0), dpi=120)


def save_deterministic(fig, out_path):
    """Raster output with no embedded timestamps or tool versions."""
    fig.savefig(out_path, format="png",
                metadata={"Software": None, "Creation Time": None})
    plt.close(fig)
