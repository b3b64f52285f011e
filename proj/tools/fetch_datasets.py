#!/usr/bin/env python3
"""Download and prepare the six UCI regression benchmarks.

Writes data/<name>.csv with a numeric feature block and the response in a
column named 'y', which is what `acdt bench --data-dir data` and the dataset
acceptance check expect.

Preparation choices (kept deliberately simple and reproducible):
  forest    Forest Fires. Drops the categorical month/day columns; the
            response is log1p(area), the standard variance-stabilizing
            transform for this heavily skewed target.
  student   Student Performance (student-mat.csv from student.zip). Keeps the
            13 numeric attributes; the response is the final grade G3. The
            intermediate grades G1/G2 are excluded so the task stays a
            genuine prediction problem rather than grade interpolation.
  slump     Concrete Slump Test. Response SLUMP(cm); drops the row id and the
            two alternative outputs (FLOW, 28-day compressive strength).
  stockTL   Istanbul Stock Exchange, ISE return in TL. Features are the seven
            international indexes (SP, DAX, FTSE, NIKKEI, BOVESPA, EU, EM);
            the USD-based ISE column is excluded as it is the same quantity
            in another currency.
  stockUSD  Same file, ISE return in USD as the response; the TL column is
            excluded for the same reason.
  airfoil   Airfoil Self-Noise. Five physical features, response is the
            scaled sound pressure level.

Checksums: the PINNED table below is empty because this repository was
assembled in an offline environment; run with --print-sha256 after the first
successful download and paste the digests into PINNED to pin them. Once
pinned, any mismatch aborts the preparation.
"""

import argparse
import csv
import hashlib
import io
import math
import re
import sys
import urllib.request
import zipfile
from pathlib import Path
from xml.etree import ElementTree

UCI = "https://archive.ics.uci.edu/ml/machine-learning-databases"

SOURCES = {
    "forest": f"{UCI}/forest-fires/forestfires.csv",
    "student": f"{UCI}/00320/student.zip",
    "slump": f"{UCI}/concrete/slump/slump_test.data",
    "stock": f"{UCI}/00247/data_akbilgic.xlsx",
    "airfoil": f"{UCI}/00291/airfoil_self_noise.dat",
}

# sha256 hex digests, filled in after a verified download (see module docstring)
PINNED: dict[str, str] = {}


def fetch(key: str, raw_dir: Path) -> bytes:
    path = raw_dir / Path(SOURCES[key]).name
    if path.exists():
        blob = path.read_bytes()
    else:
        print(f"downloading {SOURCES[key]}")
        with urllib.request.urlopen(SOURCES[key], timeout=60) as resp:
            blob = resp.read()
        raw_dir.mkdir(parents=True, exist_ok=True)
        path.write_bytes(blob)
    digest = hashlib.sha256(blob).hexdigest()
    if key in PINNED and PINNED[key] != digest:
        raise SystemExit(
            f"{key}: sha256 mismatch (expected {PINNED[key]}, got {digest}); "
            "delete the cached file and retry"
        )
    return blob


def parse_float(token: str, where: str) -> str:
    token = token.strip()
    try:
        value = float(token)
    except ValueError as exc:
        raise SystemExit(f"{where}: cannot parse '{token}' as a number") from exc
    if not math.isfinite(value):
        raise SystemExit(f"{where}: non-finite value '{token}'")
    return token


def write_dataset(out_dir: Path, name: str, header: list[str], rows: list[list[str]]) -> None:
    if any("," in h for h in header):
        raise SystemExit(f"{name}: header contains a comma")
    if len(set(header)) != len(header):
        raise SystemExit(f"{name}: duplicate column names in {header}")
    out = out_dir / f"{name}.csv"
    with out.open("w", newline="") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(row) + "\n")
    print(f"wrote {out} ({len(rows)} rows, {len(header) - 1} features)")


def snake(s: str) -> str:
    s = re.sub(r"[^0-9A-Za-z]+", "_", s.strip()).strip("_").lower()
    return s or "col"


def prep_forest(blob: bytes, out_dir: Path) -> None:
    reader = csv.reader(io.StringIO(blob.decode("utf-8")))
    header = next(reader)
    drop = {"month", "day", "area"}
    keep = [i for i, h in enumerate(header) if h not in drop]
    area_idx = header.index("area")
    rows = []
    for lineno, row in enumerate(reader, start=2):
        if not row:
            continue
        feats = [parse_float(row[i], f"forest line {lineno}") for i in keep]
        area = float(parse_float(row[area_idx], f"forest line {lineno}"))
        rows.append(feats + [repr(math.log1p(area))])
    # the spatial grid coordinates X/Y would otherwise collide with the response name
    renames = {"X": "x_coord", "Y": "y_coord"}
    names = [snake(renames.get(header[i], header[i])) for i in keep]
    write_dataset(out_dir, "forest", names + ["y"], rows)


STUDENT_NUMERIC = [
    "age", "Medu", "Fedu", "traveltime", "studytime", "failures", "famrel",
    "freetime", "goout", "Dalc", "Walc", "health", "absences",
]


def prep_student(blob: bytes, out_dir: Path) -> None:
    with zipfile.ZipFile(io.BytesIO(blob)) as zf:
        inner = next(n for n in zf.namelist() if n.endswith("student-mat.csv"))
        text = zf.read(inner).decode("utf-8")
    reader = csv.reader(io.StringIO(text), delimiter=";")
    header = next(reader)
    header = [h.strip().strip('"') for h in header]
    keep = [header.index(c) for c in STUDENT_NUMERIC]
    g3 = header.index("G3")
    rows = []
    for lineno, row in enumerate(reader, start=2):
        if not row:
            continue
        cells = [c.strip().strip('"') for c in row]
        feats = [parse_float(cells[i], f"student line {lineno}") for i in keep]
        rows.append(feats + [parse_float(cells[g3], f"student line {lineno}")])
    write_dataset(out_dir, "student", [snake(c) for c in STUDENT_NUMERIC] + ["y"], rows)


def prep_slump(blob: bytes, out_dir: Path) -> None:
    reader = csv.reader(io.StringIO(blob.decode("utf-8")))
    header = [h.strip() for h in next(reader)]
    response = "SLUMP(cm)"
    drop = {"No", response, "FLOW(cm)", "Compressive Strength (28-day)(Mpa)"}
    keep = [i for i, h in enumerate(header) if h not in drop]
    y_idx = header.index(response)
    rows = []
    for lineno, row in enumerate(reader, start=2):
        if not row or all(not c.strip() for c in row):
            continue
        feats = [parse_float(row[i], f"slump line {lineno}") for i in keep]
        rows.append(feats + [parse_float(row[y_idx], f"slump line {lineno}")])
    write_dataset(out_dir, "slump", [snake(header[i]) for i in keep] + ["y"], rows)


def read_xlsx_rows(blob: bytes) -> list[list[str]]:
    """Minimal xlsx sheet reader (stdlib only): first worksheet, cells by column."""
    ns = "{http://schemas.openxmlformats.org/spreadsheetml/2006/main}"
    with zipfile.ZipFile(io.BytesIO(blob)) as zf:
        shared = []
        if "xl/sharedStrings.xml" in zf.namelist():
            root = ElementTree.fromstring(zf.read("xl/sharedStrings.xml"))
            for si in root.iter(f"{ns}si"):
                shared.append("".join(t.text or "" for t in si.iter(f"{ns}t")))
        sheet_name = next(
            n for n in zf.namelist() if re.fullmatch(r"xl/worksheets/sheet1\.xml", n)
        )
        root = ElementTree.fromstring(zf.read(sheet_name))
    rows = []
    for row_el in root.iter(f"{ns}row"):
        cells: dict[int, str] = {}
        for c in row_el.iter(f"{ns}c"):
            ref = c.get("r", "A1")
            col = 0
            for ch in ref:
                if ch.isalpha():
                    col = col * 26 + (ord(ch.upper()) - ord("A") + 1)
                else:
                    break
            v = c.find(f"{ns}v")
            raw = v.text if v is not None and v.text is not None else ""
            if c.get("t") == "s" and raw:
                raw = shared[int(raw)]
            cells[col - 1] = raw
        width = max(cells) + 1 if cells else 0
        rows.append([cells.get(i, "") for i in range(width)])
    return rows


def prep_stock(blob: bytes, out_dir: Path) -> None:
    rows = read_xlsx_rows(blob)
    header_idx = next(
        i for i, r in enumerate(rows) if r and r[0].strip().lower() == "date"
    )
    # columns: date, ISE(TL), ISE(USD), then the seven international indexes
    index_names = ["sp", "dax", "ftse", "nikkei", "bovespa", "eu", "em"]
    data = [r for r in rows[header_idx + 1 :] if len(r) >= 10 and r[1].strip()]
    for name, y_col in (("stockTL", 1), ("stockUSD", 2)):
        out_rows = []
        for lineno, r in enumerate(data, start=header_idx + 2):
            feats = [parse_float(r[i], f"{name} row {lineno}") for i in range(3, 10)]
            out_rows.append(feats + [parse_float(r[y_col], f"{name} row {lineno}")])
        write_dataset(out_dir, name, index_names + ["y"], out_rows)


def prep_airfoil(blob: bytes, out_dir: Path) -> None:
    names = ["frequency", "angle_of_attack", "chord_length", "velocity",
             "displacement_thickness"]
    rows = []
    for lineno, line in enumerate(blob.decode("utf-8").splitlines(), start=1):
        if not line.strip():
            continue
        cells = line.split()
        if len(cells) != 6:
            raise SystemExit(f"airfoil line {lineno}: expected 6 columns")
        rows.append([parse_float(c, f"airfoil line {lineno}") for c in cells])
    write_dataset(out_dir, "airfoil", names + ["y"], rows)


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default="data", help="output directory (default: data)")
    ap.add_argument("--only", default="", help="comma-separated subset of: "
                    "forest,student,slump,stock,airfoil")
    ap.add_argument("--print-sha256", action="store_true",
                    help="print digests of the downloaded archives and exit")
    args = ap.parse_args()

    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    raw_dir = out_dir / "raw"
    wanted = set(args.only.split(",")) if args.only else set(SOURCES)

    if args.print_sha256:
        for key in sorted(wanted):
            blob = fetch(key, raw_dir)
            print(f"{key}: {hashlib.sha256(blob).hexdigest()}")
        return

    preps = {
        "forest": prep_forest,
        "student": prep_student,
        "slump": prep_slump,
        "stock": prep_stock,
        "airfoil": prep_airfoil,
    }
    for key, prep in preps.items():
        if key in wanted:
            prep(fetch(key, raw_dir), out_dir)


if __name__ == "__main__":
    sys.exit(main())
