/** AI tab: the dendrogram (top left), one recommendation card per cluster
 * (top right), and per-cluster KC breakdown charts below. Clicking a
 * dendrogram subtree or a card selects that cluster and filters the charts. */

import { groupedBarChart } from "../charts.js";
import { renderDendrogram } from "../dendrogram.js";
import { el } from "../dom.js";
import { clusterColor, FAMILY_COLORS } from "../palette.js";
import type { ClusterWire, SnapshotWire } from "../types.js";

const REASON_TEXT: Record<string, string> = {
  insufficient_observations: "Waiting for at least two active students before clustering.",
  degenerate_features: "No variation in the data yet; clustering resumes once students diverge.",
};

export function renderAi(
  snapshot: SnapshotWire,
  container: HTMLElement,
  selected: number | null,
  onSelect: (cluster: number | null) => void,
): void {
  const clustering = snapshot.clustering;
  if (!clustering.available || !clustering.dendrogram) {
    const reason = clustering.reason ?? "unavailable";
    container.append(
      el("div", { class: "ai-unavailable", "data-reason": reason, text: REASON_TEXT[reason] ?? `Clustering unavailable (${reason}).` }),
    );
    return;
  }

  const acs = clustering.acs ?? {};
  const acBadges = el("div", { class: "ac-row" },
    Object.entries(acs).map(([linkage, ac]) =>
      el("span", {
        class: `ac-badge${linkage === clustering.selected ? " ac-selected" : ""}`,
        text: `${linkage} ${ac.toFixed(3)}`,
      }),
    ),
  );

  const dendro = renderDendrogram(clustering.dendrogram, {
    assignment: clustering.assignment,
    selected,
    onSelect: (cluster) => onSelect(cluster === selected ? null : cluster),
  });

  const cards = el("div", { class: "rec-cards" },
    snapshot.recommendations.map((rec) => {
      const active = rec.cluster === selected;
      const card = el("div", {
        class: `rec-card${active ? " rec-selected" : ""}`,
        "data-cluster": rec.cluster,
      }, [
        el("div", { class: "rec-title", text: `Group ${rec.cluster + 1}` }),
        el("p", { class: "rec-message", text: rec.message }),
      ]);
      card.style.borderLeftColor = clusterColor(rec.cluster);
      card.addEventListener("click", () => onSelect(active ? null : rec.cluster));
      return card;
    }),
  );

  const clusters: ClusterWire[] = clustering.clusters ?? [];
  const shown = selected === null ? clusters : clusters.filter((c) => c.index === selected);
  const kcNames = snapshot.kc_summary.kcs.map((kc) => kc.name);
  const kcIds = snapshot.kc_summary.kcs.map((kc) => kc.id);
  const breakdowns = el("div", { class: "cluster-charts" },
    shown.map((cluster) => {
      const chart = groupedBarChart(kcNames, [
        {
          label: "Incorrect",
          color: FAMILY_COLORS.incorrect,
          values: kcIds.map((id) => cluster.incorrect_by_kc[id] ?? 0),
        },
        {
          label: "Hints",
          color: FAMILY_COLORS.hints,
          values: kcIds.map((id) => cluster.hints_by_kc[id] ?? 0),
        },
      ], { width: 380, height: 200 });
      const title = el("h4", { text: `Group ${cluster.index + 1} (${cluster.names.length} students)` });
      title.style.color = clusterColor(cluster.index);
      return el("div", { class: "cluster-chart", "data-cluster": cluster.index }, [title, chart]);
    }),
  );

  container.append(
    acBadges,
    el("div", { class: "panel-grid" }, [
      el("section", { class: "panel" }, [
        el("h3", { text: `Student groups (${clustering.selected} linkage, k = ${clustering.k})` }),
        dendro,
      ]),
      el("section", { class: "panel" }, [el("h3", { text: "Group insights" }), cards]),
    ]),
    el("section", { class: "panel" }, [
      el("h3", { text: selected === null ? "Per-group KC breakdown" : `Group ${selected + 1} KC breakdown` }),
      breakdowns,
    ]),
  );
}
