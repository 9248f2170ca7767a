#!/usr/bin/env python3
"""Generate the bundled demo activity file: 20 students, 5 statistics KCs,
2 questions per KC, in the tutoring-log (assistments) column layout.

The cohort is synthesized from three archetypes (strong / average /
struggling-on-two-KCs) so the stream produces visible cluster structure,
at least one hint-heavy student, and a class-struggle question. Output is
deterministic for a fixed seed; the committed CSV is the contract, this
script just documents how it was made.
"""

from __future__ import annotations

import argparse
import csv
import random
from pathlib import Path

KCS = {
    "Mean": ["31426", "31427"],
    "Circle Graph": ["33118", "33119"],
    "Venn Diagram": ["35704", "35705"],
    "Box and Whisker": ["37012", "37013"],
    "Scatter Plot": ["39240", "39241"],
}

WEAK_KCS = {"Venn Diagram", "Box and Whisker"}


def synthesize(seed: int = 20260809):
    rng = random.Random(seed)
    students = [str(rng.randint(50000, 99999)) for _ in range(20)]
    assert len(set(students)) == 20
    archetype = ["strong"] * 8 + ["average"] * 7 + ["struggler"] * 5
    rng.shuffle(archetype)

    rows = []
    for sid, kind in zip(students, archetype):
        order = [(kc, q) for kc, qs in KCS.items() for q in qs]
        rng.shuffle(order)
        t = rng.uniform(0, 120)
        for kc, problem in order:
            if kind == "strong":
                p_correct, p_hint, max_hints = 0.92, 0.05, 1
            elif kind == "average":
                p_correct, p_hint, max_hints = 0.72, 0.12, 1
            elif kc in WEAK_KCS:
                p_correct, p_hint, max_hints = 0.25, 0.55, 2
            else:
                p_correct, p_hint, max_hints = 0.65, 0.10, 1
            correct = 1 if rng.random() < p_correct else 0
            hints = rng.randint(1, max_hints) if rng.random() < p_hint else 0
            t += rng.uniform(30, 300)
            rows.append({"user": sid, "problem": problem, "kc": kc, "correct": correct,
                         "hints": hints, "t": t})

    # Guarantee one clearly hint-heavy student for the alert demo.
    per_student = {}
    for r in rows:
        per_student[r["user"]] = per_student.get(r["user"], 0) + r["hints"]
    heaviest = max(per_student, key=per_student.get)
    if per_student[heaviest] < 6:
        for r in rows:
            if r["user"] == heaviest and r["kc"] in WEAK_KCS and per_student[heaviest] < 6:
                bump = 6 - per_student[heaviest]
                r["hints"] += min(bump, 2)
                per_student[heaviest] += min(bump, 2)

    rows.sort(key=lambda r: r["t"])
    return rows


def write_csv(rows, path: Path) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["user_id", "problem_id", "skill_name", "correct", "hint_count", "order_id"])
        for i, r in enumerate(rows):
            writer.writerow([r["user"], r["problem"], r["kc"], r["correct"], r["hints"], 1000 + i])


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", type=Path, default=Path("data/demo_activity.csv"))
    parser.add_argument("--seed", type=int, default=20260809)
    args = parser.parse_args()
    rows = synthesize(args.seed)
    write_csv(rows, args.out)
    total_events = len(rows) + sum(r["hints"] for r in rows)
    print(f"wrote {args.out}: {len(rows)} rows, {total_events} events "
          f"({sum(r['hints'] for r in rows)} hints)")


if __name__ == "__main__":
    main()
