#!/usr/bin/env python3
"""Convert a raw Z-Alizadeh Sani export into the CSV this project expects.

The UCI distribution is an Excel sheet; export it as CSV first, then run

    python3 tools/convert_zalizadeh.py raw_export.csv data/zalizadeh.csv

Column names are matched ignoring case and punctuation, renamed to the
schema names of data/zalizadeh.profiles, values are mapped (Fmale ->
Female, Cath -> CAD yes/No, ordinal Function class / Region with RWMA
collapse to Normal/high), and columns outside the 48-input/1-target schema
are dropped.
"""

import csv
import re
import sys

SCHEMA_COLUMNS = [
    "FBS", "Age", "LDL", "HDL", "Cr", "WBC", "BUN", "K", "HB", "Na", "PLT",
    "BP", "PR", "TG", "Neut", "Lymph", "EF", "ESR", "Gender", "DM", "HTN",
    "Obesity", "Smoker", "Ex_Smoker", "FH", "CRF", "CVA", "Airway Disease",
    "Thyroid Disease", "DLP", "Edema", "Weak peripheral pulse", "Lung Rales",
    "Systolic murmur", "Diastolic murmur", "Typical Chest Pain", "Dyspnea",
    "Function class", "Region with RWMA", "Atypical", "Nonanginal CP",
    "Q Wave", "ST Elevation", "ST Depression", "T inversion", "LVH",
    "Poor R progression", "VHD", "CAD",
]

# raw spellings seen in the wild, normalized -> schema name
RAW_ALIASES = {
    "sex": "Gender",
    "currentsmoker": "Smoker",
    "exsmoker": "Ex_Smoker",
    "airwaydisease": "Airway Disease",
    "weakperipheralpulse": "Weak peripheral pulse",
    "lungrales": "Lung Rales",
    "systolicmurmur": "Systolic murmur",
    "diastolicmurmur": "Diastolic murmur",
    "functionclass": "Function class",
    "nonanginal": "Nonanginal CP",
    "nonanginalcp": "Nonanginal CP",
    "stelevation": "ST Elevation",
    "stdepression": "ST Depression",
    "tinversion": "T inversion",
    "poorrprogression": "Poor R progression",
    "regionrwma": "Region with RWMA",
    "regionwithrwma": "Region with RWMA",
    "eftte": "EF",
    "cr": "Cr",
    "cath": "CAD",
}


def norm(name: str) -> str:
    return re.sub(r"[^a-z0-9]", "", name.lower())


def to_schema_name(raw: str):
    n = norm(raw)
    if n in RAW_ALIASES:
        return RAW_ALIASES[n]
    for col in SCHEMA_COLUMNS:
        if norm(col) == n:
            return col
    return None


def collapse_ordinal(value: str) -> str:
    v = value.strip().lower()
    if v in ("0", "normal", "n"):
        return "Normal"
    return "high"


def map_value(column: str, value: str) -> str:
    v = value.strip()
    if column == "Gender":
        if norm(v) in ("fmale", "female", "f"):
            return "Female"
        if norm(v) in ("male", "m"):
            return "Male"
        sys.exit(f"unrecognized Gender value: {value!r}")
    if column == "CAD":
        if norm(v) in ("cad", "yes", "1"):
            return "yes"
        if norm(v) in ("normal", "no", "0"):
            return "No"
        sys.exit(f"unrecognized Cath/CAD value: {value!r}")
    if column in ("Function class", "Region with RWMA"):
        return collapse_ordinal(v)
    if column == "VHD" and norm(v) == "n":
        return "Normal"
    return v


def main() -> None:
    if len(sys.argv) != 3:
        sys.exit(__doc__)
    src, dst = sys.argv[1], sys.argv[2]

    with open(src, newline="", encoding="utf-8-sig") as f:
        reader = csv.reader(f)
        header = next(reader)
        rows = [row for row in reader if any(cell.strip() for cell in row)]

    position = {}
    dropped = []
    for i, raw in enumerate(header):
        name = to_schema_name(raw)
        if name is None:
            dropped.append(raw)
        elif name in position:
            sys.exit(f"two input columns map to {name!r}")
        else:
            position[name] = i

    missing = [c for c in SCHEMA_COLUMNS if c not in position]
    if missing:
        sys.exit(f"input lacks required columns: {missing}")

    with open(dst, "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f)
        writer.writerow(SCHEMA_COLUMNS)
        for row in rows:
            writer.writerow([map_value(c, row[position[c]]) for c in SCHEMA_COLUMNS])

    print(f"wrote {len(rows)} records to {dst}")
    if dropped:
        print(f"dropped columns: {', '.join(dropped)}")


if __name__ == "__main__":
    main()
