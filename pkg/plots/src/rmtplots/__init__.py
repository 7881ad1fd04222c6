"""Presentation-only figure scripts over the rmtkit CSV schemas.

No statistics are computed here; every number comes from the CSV inputs.
Rendering is deterministic: fixed figure geometry, Agg backend, and no
timestamps or versions embedded in the output bytes.
"""

__version__ = "0.1.0"
