/** Scorecard tab: score histogram plus the sortable student table. */

import { histogramChart } from "../charts.js";
import { el, formatScore } from "../dom.js";
import type { ProgressRowWire, SnapshotWire } from "../types.js";

export type SortKey = "name" | "score" | "answered" | "hints";

export interface ScorecardState {
  sortKey: SortKey;
  descending: boolean;
}

const COLUMNS: Array<{ key: SortKey; label: string }> = [
  { key: "name", label: "Student" },
  { key: "score", label: "Score" },
  { key: "answered", label: "Answered" },
  { key: "hints", label: "Hints" },
];

function sortValue(row: ProgressRowWire, key: SortKey): string | number {
  switch (key) {
    case "name":
      return row.name;
    case "score":
      return row.score ?? -1;
    case "answered":
      return row.answered;
    case "hints":
      return row.total_hints;
  }
}

/** Array.prototype.sort is stable, so ties keep their roster order. */
export function sortRows(rows: ProgressRowWire[], state: ScorecardState): ProgressRowWire[] {
  const direction = state.descending ? -1 : 1;
  return [...rows].sort((a, b) => {
    const va = sortValue(a, state.sortKey);
    const vb = sortValue(b, state.sortKey);
    if (va < vb) return -direction;
    if (va > vb) return direction;
    return 0;
  });
}

export function renderScorecard(
  snapshot: SnapshotWire,
  container: HTMLElement,
  state: ScorecardState,
  onSort: (key: SortKey) => void,
): void {
  const histogram = histogramChart(snapshot.histogram.bins, snapshot.histogram.edges);

  const header = el("tr", {},
    COLUMNS.map(({ key, label }) => {
      const active = state.sortKey === key;
      const th = el("th", {
        class: `sortable${active ? " sorted" : ""}`,
        "data-sort": key,
        text: `${label}${active ? (state.descending ? " ▾" : " ▴") : ""}`,
      });
      th.addEventListener("click", () => onSort(key));
      return th;
    }),
  );
  const rows = sortRows(snapshot.progress, state).map((row) =>
    el("tr", { "data-student": row.student_id }, [
      el("td", { text: row.name }),
      el("td", { class: "num", text: formatScore(row.score) }),
      el("td", { class: "num", text: `${row.answered}/${row.questions.length}${row.completed ? " ✓" : ""}` }),
      el("td", { class: "num", text: String(row.total_hints) }),
    ]),
  );
  const table = el("table", { class: "scorecard-table" }, [
    el("thead", {}, [header]),
    el("tbody", {}, rows),
  ]);

  container.append(
    el("section", { class: "panel" }, [el("h3", { text: "Score distribution" }), histogram]),
    el("section", { class: "panel" }, [el("h3", { text: "Students" }), table]),
  );
}
