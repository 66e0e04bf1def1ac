#!/usr/bin/env python3
"""Regenerates the synthetic 10-app evidence corpus (app01..app10.json).

Layout of the corpus, chosen so the aggregate statistics are hand-checkable:
  - presentation records in apps 01-09 (9 of 10 apps -> percent 0.9) with
    distinct-site counts [12, 8, 16, 10, 14, 12, 9, 15, 12]; the sum is 108,
    so the average is exactly 12.0. Apps 01, 03, 05, 07, 09 also use the
    duration technique (share 5/9). app01 carries one extra record that
    reuses a site, which must not change the distinct count.
  - binary records in apps 02 (4 sites) and 10 (3 sites, one record with
    motion details): percent 0.2, average 3.5, frequency share 1.0, motion
    share 0.5.
"""

import json
from pathlib import Path

PRESENTATION_SITES = {1: 12, 2: 8, 3: 16, 4: 10, 5: 14, 6: 12, 7: 9, 8: 15, 9: 12}
DURATION_APPS = {1, 3, 5, 7, 9}
BINARY_SITES = {2: 4, 10: 3}


def record(app, kind, techniques, index, element, id_prefix):
    return {
        "widget": {
            "layout": "res/layout/main.xml",
            "id": f"{id_prefix}{index}",
            "element": element,
        },
        "data_type": kind,
        "techniques": techniques,
        "invocation": {
            "class": f"Lcom/corpus/app{app:02d}/Screen;",
            "method": f"track_{kind}",
            "descriptor": "(Landroid/view/View;)V",
            "index": index,
        },
        "library": "Firebase Analytics",
        "callback": "onClick",
        "listener": f"Lcom/corpus/app{app:02d}/Screen${kind};",
    }


def main():
    out_dir = Path(__file__).parent
    for app in range(1, 11):
        records = []
        if app in PRESENTATION_SITES:
            techniques = ["frequency", "duration"] if app in DURATION_APPS else ["frequency"]
            for i in range(PRESENTATION_SITES[app]):
                records.append(record(app, "presentation", techniques, i, "View", "view"))
            if app == 1:
                duplicate = dict(records[0])
                duplicate["widget"] = {
                    "layout": "res/layout/main.xml",
                    "id": "view_alias",
                    "element": "ImageView",
                }
                records.append(duplicate)
        if app in BINARY_SITES:
            for i in range(BINARY_SITES[app]):
                techniques = ["frequency"]
                if app == 10 and i == 0:
                    techniques = ["frequency", "motion_details"]
                records.append(record(app, "binary", techniques, 100 + i, "Button", "btn"))

        evidence = {
            "app_id": f"com.corpus.app{app:02d}",
            "record_count": len(records),
            "evidenced_types": sorted({r["data_type"] for r in records}),
            "evidenced_techniques": sorted({t for r in records for t in r["techniques"]}),
            "records": records,
        }
        path = out_dir / f"app{app:02d}.json"
        path.write_text(json.dumps(evidence, indent=2) + "\n")
        print(f"wrote {path.name}: {len(records)} records")


if __name__ == "__main__":
    main()
