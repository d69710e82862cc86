#!/usr/bin/env python3
"""Generate the bundled W-shape catalogs (src/framefx/data/*.csv).

The tables are representative reconstructions of the US wide-flange catalog:
designations and nominal weights follow the standard W series (267 shapes in
the full table, 37 in the W14 column series).  Area comes exactly from the
nominal weight (A = w_plf / 3.4 in^2, the defining relation for 490 pcf
steel); depth and flange width are interpolated across each series from the
published end points; the remaining properties use standard wide-flange
proportions (rx/d, ry/bf, shape factor).  Output units are cm based.

Run from the reprepository root:  python tools/make_catalogs.py
"""

import csv
from pathlib import Path

IN2_TO_CM2 = 6.4516
IN3_TO_CM3 = 16.387064
IN4_TO_CM4 = 41.6231426
IN_TO_CM = 2.54

# series -> (weights plf, depth range in, flange width range in), light -> heavy
SERIES = {
    "W44": ([230, 262, 290, 335], (42.9, 44.0), (12.5, 15.9)),
    "W40": ([183, 211, 235, 264, 278, 294, 327, 331, 174, 199, 215, 249, 277,
             297, 324, 362, 372, 397, 431, 503, 593], (39.4, 43.0), (11.8, 16.7)),
    "W36": ([150, 160, 170, 182, 194, 210, 232, 256, 231, 247, 262, 282, 302,
             330, 361, 395, 441, 487, 529, 652], (35.6, 41.1), (12.0, 17.6)),
    "W33": ([118, 130, 141, 152, 169, 201, 221, 241, 263, 291, 318, 354, 387],
            (32.9, 36.0), (11.5, 16.2)),
    "W30": ([90, 99, 108, 116, 124, 132, 148, 173, 191, 211, 235, 261, 292,
             326, 357, 391], (29.5, 33.2), (10.4, 15.6)),
    "W27": ([84, 94, 102, 114, 129, 146, 161, 178, 194, 217, 235, 258, 281,
             307, 336, 368, 539], (26.7, 32.5), (10.0, 15.3)),
    "W24": ([55, 62, 68, 76, 84, 94, 103, 104, 117, 131, 146, 162, 176, 192,
             207, 229, 250, 279, 306, 335, 370], (23.6, 28.0), (7.0, 13.7)),
    "W21": ([44, 48, 50, 55, 57, 62, 68, 73, 83, 93, 101, 111, 122, 132, 147,
             166, 182, 201], (20.7, 23.0), (6.5, 12.6)),
    "W18": ([35, 40, 46, 50, 55, 60, 65, 71, 76, 86, 97, 106, 119, 130, 143,
             158, 175, 192, 211, 234, 258], (17.7, 21.1), (6.0, 11.6)),
    "W16": ([26, 31, 36, 40, 45, 50, 57, 67, 77, 89, 100], (15.7, 17.0), (5.5, 10.4)),
    "W14": ([22, 26, 30, 34, 38, 43, 48, 53, 61, 68, 74, 82, 90, 99, 109, 120,
             132, 145, 159, 176, 193, 211, 233, 257, 283, 311, 342, 370, 398,
             426, 455, 500, 550, 605, 665, 730, 808], (13.7, 22.8), (5.0, 18.6)),
    "W12": ([14, 16, 19, 22, 26, 30, 35, 40, 45, 50, 53, 58, 65, 72, 79, 87,
             96, 106, 120, 136, 152, 170, 190, 210, 230, 252, 279, 305, 336],
            (11.9, 16.8), (4.0, 13.4)),
    "W10": ([12, 15, 17, 19, 22, 26, 30, 33, 39, 45, 49, 54, 60, 68, 77, 88,
             100, 112], (9.7, 11.4), (4.0, 10.4)),
    "W8": ([10, 13, 15, 18, 21, 24, 28, 31, 35, 40, 48, 58, 67], (7.9, 9.0), (4.0, 8.3)),
    "W6": ([9, 12, 15, 16, 20, 25], (5.9, 6.4), (4.0, 6.1)),
    "W5": ([19], (5.15, 5.15), (5.0, 5.0)),
    "W4": ([13], (4.16, 4.16), (4.06, 4.06)),
}


def series_rows(prefix, weights, d_range, bf_range):
    wmin, wmax = min(weights), max(weights)
    rows = []
    for w in weights:
        t = 0.5 if wmax == wmin else (w - wmin) / (wmax - wmin)
        d = d_range[0] + t * (d_range[1] - d_range[0])
        bf = bf_range[0] + t * (bf_range[1] - bf_range[0])
        area = w / 3.4
        rx = d * (0.43 - 0.06 * t)
        ix = area * rx**2
        sx = 2.0 * ix / d
        zx = 1.12 * sx
        ry = 0.25 * bf
        rows.append({
            "name": f"{prefix}X{w:g}",
            "area_cm2": round(area * IN2_TO_CM2, 2),
            "ix_cm4": round(ix * IN4_TO_CM4, 1),
            "sx_cm3": round(sx * IN3_TO_CM3, 1),
            "zx_cm3": round(zx * IN3_TO_CM3, 1),
            "rx_cm": round(rx * IN_TO_CM, 3),
            "ry_cm": round(ry * IN_TO_CM, 3),
            "depth_cm": round(d * IN_TO_CM, 2),
        })
    return rows


def main():
    all_rows = []
    for prefix, (weights, d_range, bf_range) in SERIES.items():
        all_rows.extend(series_rows(prefix, weights, d_range, bf_range))
    assert len(all_rows) == 267, f"full table must have 267 rows, got {len(all_rows)}"
    w14_rows = [r for r in all_rows if r["name"].startswith("W14X")]
    assert len(w14_rows) == 37, f"W14 table must have 37 rows, got {len(w14_rows)}"

    out_dir = Path(__file__).resolve().parents[1] / "src" / "framefx" / "data"
    out_dir.mkdir(parents=True, exist_ok=True)
    header = ["name", "area_cm2", "ix_cm4", "sx_cm3", "zx_cm3", "rx_cm", "ry_cm", "depth_cm"]
    for filename, rows in [("w_shapes.csv", all_rows), ("w14_shapes.csv", w14_rows)]:
        with open(out_dir / filename, "w", newline="") as fh:
            writer = csv.DictWriter(fh, fieldnames=header)
            writer.writeheader()
            writer.writerows(rows)
        print(f"wrote {out_dir / filename} ({len(rows)} shapes)")


if __name__ == "__main__":
    main()
