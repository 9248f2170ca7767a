/** The dashboard shell: tab navigation, connection banner, version badge,
 * and re-rendering on pushed snapshot versions.
 *
 * Rendering is a pure function of (snapshot, view state); every number on
 * screen comes from exactly one snapshot version and that version is shown
 * in the header. The client computes no analytics of its own.
 */

import { fetchSnapshot, PushChannel } from "./api.js";
import type { ConnectionStatus, EventSourceFactory, Fetcher } from "./api.js";
import { clear, el } from "./dom.js";
import { renderAi } from "./tabs/ai.js";
import { renderOverview } from "./tabs/overview.js";
import { renderQuickAnalysis } from "./tabs/quick.js";
import { renderScorecard } from "./tabs/scorecard.js";
import type { ScorecardState, SortKey } from "./tabs/scorecard.js";
import type { SnapshotWire } from "./types.js";

export type Tab = "overview" | "quick" | "scorecard" | "ai";

const TABS: Array<{ id: Tab; label: string }> = [
  { id: "overview", label: "Overview" },
  { id: "quick", label: "Quick Analysis" },
  { id: "scorecard", label: "Scorecard" },
  { id: "ai", label: "AI" },
];

export interface DashboardOptions {
  baseUrl?: string;
  pushFactory?: EventSourceFactory;
  fetcher?: Fetcher;
}

export class Dashboard {
  tab: Tab = "overview";
  snapshot: SnapshotWire | null = null;
  connection: ConnectionStatus = "connecting";
  selectedCluster: number | null = null;
  scorecard: ScorecardState = { sortKey: "score", descending: true };

  private readonly baseUrl: string;
  private readonly fetcher: Fetcher | undefined;
  private channel: PushChannel | null = null;
  private fetching: Promise<void> | null = null;

  constructor(private readonly root: HTMLElement, options: DashboardOptions = {}) {
    this.baseUrl = options.baseUrl ?? "";
    this.fetcher = options.fetcher;
    if (options.pushFactory) {
      this.channel = new PushChannel(this.baseUrl, this.handlers(), { factory: options.pushFactory });
    } else {
      this.channel = new PushChannel(this.baseUrl, this.handlers());
    }
  }

  private handlers() {
    return {
      onVersion: (version: number) => void this.onVersion(version),
      onStatus: (status: ConnectionStatus) => {
        if (status !== this.connection) {
          this.connection = status;
          this.render();
        }
      },
    };
  }

  start(): void {
    this.render();
    this.channel?.connect();
  }

  stop(): void {
    this.channel?.close();
  }

  /** Pushed version bump: pull the latest snapshot and re-render. */
  async onVersion(version: number): Promise<void> {
    if (this.snapshot && version <= this.snapshot.version) return;
    const work = (async () => {
      try {
        const snapshot = await fetchSnapshot(this.baseUrl, this.fetcher);
        if (!this.snapshot || snapshot.version > this.snapshot.version) {
          this.snapshot = snapshot;
          this.render();
        }
      } catch {
        this.connection = "disconnected";
        this.render();
      }
    })();
    this.fetching = work;
    await work;
  }

  /** Awaitable by tests: resolves when the in-flight fetch (if any) lands. */
  async settled(): Promise<void> {
    await this.fetching;
  }

  setTab(tab: Tab): void {
    this.tab = tab;
    this.render();
  }

  selectCluster(cluster: number | null): void {
    this.selectedCluster = cluster;
    this.render();
  }

  sortScorecard(key: SortKey): void {
    if (this.scorecard.sortKey === key) {
      this.scorecard = { sortKey: key, descending: !this.scorecard.descending };
    } else {
      this.scorecard = { sortKey: key, descending: key === "score" };
    }
    this.render();
  }

  render(): void {
    clear(this.root);

    const banner = this.connection === "live"
      ? null
      : el("div", { class: `banner banner-${this.connection}` }, [
          this.connection === "connecting"
            ? "Connecting to the live stream…"
            : "Connection lost — reconnecting automatically…",
        ]);

    const nav = el("nav", { class: "tabs" },
      TABS.map(({ id, label }) => {
        const button = el("button", {
          class: `tab${id === this.tab ? " tab-active" : ""}`,
          "data-tab": id,
          text: label,
        });
        button.addEventListener("click", () => this.setTab(id));
        return button;
      }),
    );

    const version = this.snapshot
      ? `snapshot v${this.snapshot.version} · ${this.snapshot.events_seen} events`
      : "no snapshot yet";
    const header = el("header", { class: "header" }, [
      el("h1", { text: "Class Pulse" }),
      nav,
      el("span", { class: "version-badge", text: version }),
    ]);

    const main = el("main", { class: "content", "data-tab": this.tab });
    if (this.snapshot === null) {
      main.append(el("div", { class: "empty", text: "Waiting for the first snapshot…" }));
    } else if (this.tab === "overview") {
      renderOverview(this.snapshot, main);
    } else if (this.tab === "quick") {
      renderQuickAnalysis(this.snapshot, main);
    } else if (this.tab === "scorecard") {
      renderScorecard(this.snapshot, main, this.scorecard, (key) => this.sortScorecard(key));
    } else {
      renderAi(this.snapshot, main, this.selectedCluster, (c) => this.selectCluster(c));
    }

    if (banner) this.root.append(banner);
    this.root.append(header, main);
    if (this.snapshot?.degraded) {
      this.root.append(el("div", { class: "banner banner-degraded", text: `Snapshot degraded: ${this.snapshot.error ?? "unknown error"}` }));
    }
  }
}
