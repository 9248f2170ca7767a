/** Quick Analysis tab: live per-question progress matrix plus per-KC bars of
 * incorrect responses and hint uses. */

import { groupedBarChart } from "../charts.js";
import { el } from "../dom.js";
import { FAMILY_COLORS, STATUS_COLORS } from "../palette.js";
import type { SnapshotWire } from "../types.js";

export function renderQuickAnalysis(snapshot: SnapshotWire, container: HTMLElement): void {
  const questions = snapshot.progress[0]?.questions.map((q) => q.question_id) ?? [];

  const header = el("tr", {}, [
    el("th", { text: "Student" }),
    ...questions.map((q) => el("th", { class: "qid", text: q })),
    el("th", { text: "Hints" }),
  ]);
  const body = snapshot.progress.map((row) =>
    el("tr", { "data-student": row.student_id }, [
      el("td", { text: row.name }),
      ...row.questions.map((q) => {
        const cell = el("td", {
          class: `status status-${q.status}`,
          title: `${q.question_id}: ${q.status}${q.hints ? `, ${q.hints} hints` : ""}`,
          text: q.status === "unattempted" ? "·" : q.status === "correct" ? "✓" : "✗",
        });
        cell.style.color = STATUS_COLORS[q.status];
        return cell;
      }),
      el("td", { class: "hints-count", text: String(row.total_hints) }),
    ]),
  );
  const matrix = el("table", { class: "progress-matrix" }, [
    el("thead", {}, [header]),
    el("tbody", {}, body),
  ]);

  const kcs = snapshot.kc_summary.kcs;
  const chart = groupedBarChart(
    kcs.map((kc) => kc.name),
    [
      { label: "Incorrect", color: FAMILY_COLORS.incorrect, values: kcs.map((kc) => kc.incorrect_total) },
      { label: "Hints", color: FAMILY_COLORS.hints, values: kcs.map((kc) => kc.hints_total) },
    ],
  );

  container.append(
    el("section", { class: "panel" }, [el("h3", { text: "Progress" }), matrix]),
    el("section", { class: "panel" }, [el("h3", { text: "Incorrect responses and hints per KC" }), chart]),
  );
}
