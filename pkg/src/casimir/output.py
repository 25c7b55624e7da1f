"""Tabular results with a units row and a metadata block.

CSV layout::

    # key: value            (metadata, one line per key, JSON-encoded values)
    col_a,col_b,...         (header)
    unit_a,unit_b,...       (units)
    1.0,2.0,...             (rows)

Numbers are written with ``repr`` so a table reads back bit-identically.
"""

from dataclasses import dataclass, field
import csv
import io
import json

import numpy as np

TIMESTAMP_KEY = "timestamp"


@dataclass
class DataTable:
    columns: list
    units: list
    rows: list = field(default_factory=list)
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        self.columns = list(self.columns)
        self.units = list(self.units)
        if len(self.units) != len(self.columns):
            raise ValueError("need exactly one unit per column")
        self.rows = [list(map(float, r)) for r in self.rows]
        for r in self.rows:
            if len(r) != len(self.columns):
                raise ValueError(f"row has {len(r)} values for {len(self.columns)} columns")

    def __len__(self):
        return len(self.rows)

    def column(self, name):
        i = self.columns.index(name)
        return np.array([r[i] for r in self.rows], dtype=float)

    def as_array(self):
        return np.array(self.rows, dtype=float).reshape(len(self.rows), len(self.columns))

    def to_csv(self, timestamp=True):
        buf = io.StringIO()
        for key, value in self.metadata.items():
            if key == TIMESTAMP_KEY and not timestamp:
                continue
            buf.write(f"# {key}: {json.dumps(value, sort_keys=True)}\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.columns)
        w.writerow(self.units)
        for r in self.rows:
            w.writerow([repr(v) for v in r])
        return buf.getvalue()

    def to_json(self, timestamp=True):
        meta = {k: v for k, v in self.metadata.items() if timestamp or k != TIMESTAMP_KEY}
        doc = {
            "metadata": meta,
            "columns": {c: [r[i] for r in self.rows] for i, c in enumerate(self.columns)},
            "units": dict(zip(self.columns, self.units)),
            "order": self.columns,
        }
        return json.dumps(doc, indent=2, sort_keys=True) + "\n"

    def write(self, path, fmt="csv"):
        text = self.to_json() if fmt == "json" else self.to_csv()
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)

    @classmethod
    def from_csv(cls, text):
        meta, body = {}, []
        for line in text.splitlines():
            if line.startswith("# ") and not body:
                key, _, value = line[2:].partition(": ")
                meta[key] = json.loads(value)
            else:
                body.append(line)
        rows = list(csv.reader(body))
        return cls(rows[0], rows[1], [[float(v) for v in r] for r in rows[2:]], meta)

    @classmethod
    def from_json(cls, text):
        doc = json.loads(text)
        cols = doc["order"]
        n = len(doc["columns"][cols[0]]) if cols else 0
        rows = [[doc["columns"][c][i] for c in cols] for i in range(n)]
        return cls(cols, [doc["units"][c] for c in cols], rows, doc["metadata"])
