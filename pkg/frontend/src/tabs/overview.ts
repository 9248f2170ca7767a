/** Overview tab: KPI cards, a per-student score plot, and the alert feed.
 * Absent KPIs render as explicit "awaiting data" states, never blank zeros. */

import { el, formatScore } from "../dom.js";
import { STATUS_COLORS } from "../palette.js";
import type { SnapshotWire } from "../types.js";

function kpiCard(label: string, value: number | null, format: (v: number) => string): HTMLElement {
  const awaiting = value === null;
  return el("div", { class: `kpi-card${awaiting ? " kpi-awaiting" : ""}` }, [
    el("div", { class: "kpi-label", text: label }),
    el("div", { class: "kpi-value", text: awaiting ? "awaiting data" : format(value!) }),
  ]);
}

export function renderOverview(snapshot: SnapshotWire, container: HTMLElement): void {
  const kpis = snapshot.kpis;
  const pct = (v: number) => `${v.toFixed(1)}%`;
  const cards = el("div", { class: "kpi-row" }, [
    kpiCard("Min score", kpis.min_score, pct),
    kpiCard("Max score", kpis.max_score, pct),
    kpiCard("Median score", kpis.median_score, pct),
    kpiCard("Mean score", kpis.mean_score, pct),
    el("div", { class: "kpi-card" }, [
      el("div", { class: "kpi-label", text: "Completed all questions" }),
      el("div", { class: "kpi-value", text: String(kpis.completed_count) }),
    ]),
    el("div", { class: "kpi-card" }, [
      el("div", { class: "kpi-label", text: "Active students" }),
      el("div", { class: "kpi-value", text: String(kpis.active_students) }),
    ]),
  ]);

  const rows = [...snapshot.progress].sort((a, b) => (b.score ?? -1) - (a.score ?? -1));
  const plot = el("div", { class: "score-plot" },
    rows.map((row) => {
      const width = row.score === null ? 0 : row.score;
      const bar = el("div", { class: "score-bar" });
      bar.style.width = `${width}%`;
      bar.style.background = row.score === null
        ? STATUS_COLORS.unattempted
        : row.score >= 60 ? STATUS_COLORS.correct : STATUS_COLORS.incorrect;
      return el("div", { class: "score-row", "data-student": row.student_id, title: `${row.name}: ${formatScore(row.score)}` }, [
        el("span", { class: "score-name", text: row.name }),
        el("div", { class: "score-track" }, [bar]),
        el("span", { class: "score-value", text: formatScore(row.score) }),
      ]);
    }),
  );

  const alerts = el("ul", { class: "alert-list" },
    snapshot.alerts.length === 0
      ? [el("li", { class: "alert-none", text: "No alerts." })]
      : snapshot.alerts.map((alert) =>
          el("li", { class: `alert alert-${alert.severity}`, "data-rule": alert.rule }, [
            el("span", { class: "alert-kind", text: alert.kind.replace("_", " ") }),
            el("span", { class: "alert-message", text: alert.message }),
          ]),
        ),
  );

  container.append(
    cards,
    el("div", { class: "panel-grid" }, [
      el("section", { class: "panel" }, [el("h3", { text: "Scores" }), plot]),
      el("section", { class: "panel" }, [el("h3", { text: "Alerts & recommendations" }), alerts]),
    ]),
  );
}
